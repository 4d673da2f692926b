#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spdhg/diagnostics.hpp"
#include "spdhg/experiments.hpp"
#include "spdhg/sampling.hpp"
#include "spdhg/solvers.hpp"

namespace spdhg {

struct MetricRow {
  std::uint64_t seed = 0;
  double epoch = 0.0;
  std::size_t iteration = 0;
  std::string metric;
  double value = 0.0;
};

/// Long-format metric table, ordered by seed, then iteration, then metric emission order.
struct MetricTable {
  std::vector<MetricRow> rows;

  /// Header `seed,epoch,iteration,metric,value`, numbers printed with 17 significant digits.
  void write_csv(std::ostream& os) const;
  std::vector<std::string> metric_names() const;
  /// (iteration, mean over seeds) for iterations reported by every seed.
  std::vector<std::pair<std::size_t, double>> mean_series(const std::string& metric) const;
};

struct ExperimentResult {
  ExperimentConfig config;
  StepPlan plan;
  EsoParams eso;
  SaddleReference reference;
  std::filesystem::path reference_path;  // empty when the saddle point is known in closed form
  bool reference_computed = false;
  MetricTable table;
  std::size_t iterations = 0;
  double epochs = 0.0;
  /// Block-operator evaluations counted during the solver runs, summed over seeds,
  /// and 2 x the number of sampled blocks.
  std::uint64_t operator_calls = 0;
  std::uint64_t expected_calls = 0;
  /// Ergodic-gap constant for the plain variant (NaN otherwise).
  double theorem1_constant = 0.0;
  /// JSON text of the run summary (plan, reference, fitted rates, final means).
  std::string summary;
};

/// $SPDHG_OUT_DIR if set, else "spdhg-out".
std::filesystem::path default_out_dir();
/// Output directory: cfg.out_dir or default_out_dir().
std::filesystem::path out_dir(const ExperimentConfig& cfg);
/// cfg.reference or <out>/<name>.ref.
std::filesystem::path reference_stem(const ExperimentConfig& cfg);

/// Saddle reference for the experiment: the closed form if there is one, else the
/// persisted file, else a fresh long PDHG run that is then saved. `refresh` forces recomputation.
SaddleReference obtain_reference(const ExperimentConfig& cfg, const Experiment& experiment, bool refresh,
                                 std::filesystem::path* used = nullptr, bool* computed = nullptr);

/// Iterations at which metrics are recorded.
std::vector<std::size_t> checkpoint_schedule(const ExperimentConfig& cfg, std::size_t iterations, double per_epoch);

/// Runs every seed (in parallel, one problem instance each) and collects metrics.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes <dir>/<name>.csv and <dir>/<name>.summary.json.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace spdhg
