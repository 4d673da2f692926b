#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

namespace {

struct Result {
  int status = -1;
  std::string output;  // stdout and stderr
};

Result cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(SPDHG_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(SPDHG_CONFIG_DIR) + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "spdhg_test_cli" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string first_line(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
  const auto unknown = cli("frobnicate " + config("scalar_toy.toml"));
  CHECK(unknown.status == 2);
  CHECK(unknown.output.find("validate-eso") != std::string::npos);
  CHECK(cli("").status == 2);
  CHECK(cli("run").status == 2);
  CHECK(cli("plan --scale huge " + config("scalar_toy.toml")).status == 2);
  CHECK(cli("--help").status == 0);
}

TEST_CASE("plan on a symmetric profile") {
  const auto r = cli("plan " + config("profile_symmetric.toml"));
  REQUIRE(r.status == 0);
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = r.output.find("theta       0.75\n", pos)) != std::string::npos; ++pos) ++count;
  CHECK(count == 3);
  CHECK(r.output.find("FAILED") == std::string::npos);
}

TEST_CASE("plan on an experiment prints a reproducible config") {
  const auto r = cli("plan --config " + config("pet_linear.toml") + " --scale desk");
  REQUIRE(r.status == 0);
  CHECK(r.output.find("validate_plan passed") != std::string::npos);
  CHECK(r.output.find("planner = \"explicit\"") != std::string::npos);
}

TEST_CASE("validate-eso") {
  const auto r = cli("validate-eso " + config("scalar_toy.toml"));
  REQUIRE(r.status == 0);
  CHECK(r.output.find("ESO holds") != std::string::npos);
  std::smatch m;
  REQUIRE(std::regex_search(r.output, m, std::regex("max ratio\\s+([0-9.eE+-]+)")));
  CHECK(std::stod(m[1]) <= 1.0 + 1e-9);
}

TEST_CASE("malformed configs report the line") {
  const auto dir = scratch("bad");
  const auto bad = dir / "bad.toml";
  std::ofstream(bad) << "experiment = \"scalar_toy\"\n[run]\nseeds = [1,\n";
  const auto r = cli("run " + bad.string());
  CHECK(r.status == 1);
  CHECK(r.output.find("bad.toml:") != std::string::npos);
  CHECK(r.output.find("unterminated array") != std::string::npos);

  const auto typo = dir / "typo.toml";
  std::ofstream(typo) << "experiment = \"scalar_toy\"\n[run]\nseedz = 3\n";
  const auto t = cli("run " + typo.string());
  CHECK(t.status == 1);
  CHECK(t.output.find("typo.toml:3: run.seedz: unknown key") != std::string::npos);

  CHECK(cli("run /nonexistent/none.toml").status == 1);
}

TEST_CASE("run writes the metric table") {
  const auto dir = scratch("run");
  const auto r = cli("run " + config("scalar_toy.toml") + " --seeds 2 --out " + dir.string());
  REQUIRE(r.status == 0);
  CHECK(first_line(dir / "scalar_toy.csv") == "seed,epoch,iteration,metric,value");
  CHECK(std::filesystem::exists(dir / "scalar_toy.summary.json"));

  const auto env_dir = scratch("env");
  const auto e = cli("run " + config("scalar_toy.toml") + " --seeds 1", "SPDHG_OUT_DIR=" + env_dir.string());
  REQUIRE(e.status == 0);
  CHECK(std::filesystem::exists(env_dir / "scalar_toy.csv"));
}
