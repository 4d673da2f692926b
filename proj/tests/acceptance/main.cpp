// Acceptance runner: one PASS/FAIL line per criterion, details indented below it.

#include <CLI11.hpp>

#include <chrono>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <set>

#include "criteria.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the spdhg toolkit"};
  std::string out = "acceptance-out";
  std::string configs = SPDHG_ACCEPTANCE_CONFIGS;
  std::vector<std::string> only;
  app.add_option("--out", out, "directory for runs, references and metric tables");
  app.add_option("--configs", configs, "directory holding the acceptance configs");
  app.add_option("--only", only, "criteria to run, e.g. AC1 AC6");
  CLI11_PARSE(app, argc, argv);

  const acceptance::Context ctx{out, configs};
  std::filesystem::create_directories(ctx.out);
  const std::set<std::string> wanted(only.begin(), only.end());

  int failed = 0, ran = 0;
  for (const auto& c : acceptance::criteria()) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    acceptance::Outcome outcome;
    std::string error;
    try {
      outcome = c.run(ctx);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = error.empty() && outcome.pass() && in_time;
    if (!pass) ++failed;
    std::cout << c.id << ' ' << (pass ? "PASS" : "FAIL") << "  " << c.title << "  (" << std::fixed
              << std::setprecision(2) << secs << " s, limit " << std::defaultfloat << c.time_limit_s << " s)\n";
    for (const auto& chk : outcome.checks)
      std::cout << "    [" << (chk.pass ? "ok" : "FAIL") << "] " << chk.what << ": " << chk.detail << '\n';
    if (!error.empty()) std::cout << "    [FAIL] error: " << error << '\n';
    if (!in_time) std::cout << "    [FAIL] over the time limit\n";
    std::cout.flush();
  }
  std::cout << (failed == 0 ? "all " : "") << ran - failed << " of " << ran << " criteria passed\n";
  return failed == 0 && ran > 0 ? 0 : 1;
}
