#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace acceptance {

struct Check {
  std::string what;
  bool pass = false;
  std::string detail;
};

struct Outcome {
  std::vector<Check> checks;
  bool pass() const;
  void add(std::string what, bool pass, std::string detail = "");
};

struct Context {
  std::filesystem::path out;      // runs, references and tables go here
  std::filesystem::path configs;  // configs/acceptance
};

struct Criterion {
  std::string id;
  std::string title;
  double time_limit_s;
  std::function<Outcome(const Context&)> run;
};

std::vector<Criterion> criteria();

}  // namespace acceptance
