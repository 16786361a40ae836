#pragma once

// Square-bias versus burn-in harness and the relative-loss surface.
//
// For each strategy, `replicates` independent chains are run for
// max(t0_grid) + window steps. Along each chain the time averages
//
//   I^s(t0) = (1/T) sum_{k=t0+1}^{t0+T} mean_i (X_k^i)^2
//   I^m(t0) = (1/T) sum_{k=t0+1}^{t0+T} mean_i X_k^i
//
// are collected, and their replicate means are compared to the stationary
// values of the target.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tscale/chains.hpp"
#include "tscale/strategy.hpp"
#include "tscale/targets.hpp"

namespace tscale {

enum class InitKind { point, gaussian, stationary };

struct InitSpec {
  InitKind kind = InitKind::point;
  double value = 0.0;     ///< every coordinate, for `point`
  double mean = 0.0;      ///< for `gaussian`
  double variance = 1.0;  ///< for `gaussian`
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string target = "gaussian";
  std::size_t n = 50;
  std::uint64_t window = 500;
  std::vector<std::uint64_t> t0_grid;
  std::size_t replicates = 50;
  std::vector<Strategy> strategies;
  InitSpec init;
  std::uint64_t seed = 20240901;
  /// Use the same seed for every replicate (degenerate check, stderr = 0).
  bool common_seed = false;
  /// Worker threads; 0 means hardware concurrency.
  unsigned threads = 0;

  /// Throws ConfigError on invalid fields.
  void validate() const;
  [[nodiscard]] std::uint64_t steps() const;
};

/// Scenario ids: gaussian-0, gaussian-10, double-well-10, double-well-gauss.
/// Scale ids: desk (n=50, T=500, 50 replicates) and paper (n=100, T=1500,
/// 200 replicates).
ExperimentConfig experiment_preset(std::string_view scenario, std::string_view scale);
std::vector<std::string> preset_scenarios();

/// Time average of the coordinate mean of x^2 over steps t0+1 .. t0+window.
/// `trace` holds one value per step, index 0 being the initial state.
double estimator_s(const MomentTrace& trace, std::uint64_t t0, std::uint64_t window);
/// Same with the coordinate mean of x.
double estimator_m(const MomentTrace& trace, std::uint64_t t0, std::uint64_t window);

struct BiasPoint {
  std::uint64_t t0;
  double sq_bias_s;
  double sq_bias_m;
  double stderr_s;  ///< standard error of the replicate mean of I^s
  double stderr_m;
};

struct BiasCurve {
  std::string label;
  std::string strategy_spec;
  std::vector<BiasPoint> points;
  double mean_acc_prob = 0.0;  ///< over all replicates and steps
};

struct SweepResult {
  EquilibriumValues equilibrium;
  std::vector<BiasCurve> curves;  ///< in config strategy order
};

/// Runs the sweep on a worker pool. Output does not depend on the thread
/// count: each (strategy, replicate) job owns its RNG substream and the
/// reduction runs in replicate order.
SweepResult square_bias_sweep(const ExperimentConfig& cfg);

/// Squared 3-sigma band of the replicate mean.
inline double noise_floor(double stderr_value) { return 9.0 * stderr_value * stderr_value; }

struct LossEntry {
  double alpha;
  double b;
  double a;
  double loss;
};

/// Relative loss (F(a,b,l*) - F(a,b,l^alpha)) / F(a,b,l*) on the full
/// product grid, ordered by alpha, then b, then a.
std::vector<LossEntry> relative_loss_surface(const std::vector<double>& b_values,
                                             const std::vector<double>& a_grid,
                                             const std::vector<double>& alphas);

/// Mean loss per alpha, in the order of `alphas`. Every row has equal
/// weight, so the spacing of the a grid decides the averaging measure.
std::vector<double> mean_loss_by_alpha(const std::vector<LossEntry>& table,
                                       const std::vector<double>& alphas);

/// Largest loss per alpha, in the order of `alphas`.
std::vector<double> max_loss_by_alpha(const std::vector<LossEntry>& table,
                                      const std::vector<double>& alphas);

/// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// `count` evenly spaced points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

// Serialization.

void write_bias_csv(std::ostream& out, const BiasCurve& curve);
void write_loss_csv(std::ostream& out, const std::vector<LossEntry>& table);

/// JSON text of the fully resolved config (round-trips through
/// config_from_json).
std::string config_to_json(const ExperimentConfig& cfg);
/// Parses a config or a manifest (its "config" member). Missing keys keep
/// their defaults. Throws ConfigError.
ExperimentConfig config_from_json(std::string_view text);

/// Writes <dir>/<name>_<label>.csv per strategy and <dir>/<name>.manifest.json.
/// Each file is written to a temporary and renamed into place. Returns the
/// paths written.
std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir,
                                                    const ExperimentConfig& cfg,
                                                    const SweepResult& result);

/// Writes `contents` to `path` through a temporary file in the same directory,
/// creating missing parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace tscale
