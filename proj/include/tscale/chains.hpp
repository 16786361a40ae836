#pragma once

// Finite-dimensional Metropolis chains on the product target
// p(x) = prod_i exp(-V(x_i)):
//
//   RWM   Y = X + (l/sqrt n) G,                     accept w.p. 1 ^ p(Y)/p(X)
//   MALA  Y = X + sigma G - (sigma^2/2) V'(X),      Metropolis-Hastings correction
//
// Coordinate i draws its Gaussian increments from RNG stream streams[i] at
// counter k; the acceptance uniform comes from kAcceptStream.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tscale/rng.hpp"
#include "tscale/strategy.hpp"
#include "tscale/targets.hpp"

namespace tscale {

struct ChainState {
  std::vector<double> coords;
  std::uint64_t k = 0;
  CounterRng rng{};
  double theta = 0.0;  ///< log sigma, used by the adaptive strategy
  std::uint64_t accept_count = 0;
  std::vector<std::uint64_t> streams;  ///< per-coordinate RNG stream ids

  ChainState() = default;
  /// Streams default to 0..n-1.
  ChainState(std::vector<double> init, std::uint64_t seed);

  [[nodiscard]] std::size_t dim() const noexcept { return coords.size(); }
};

struct StepRecord {
  std::uint64_t k = 0;
  double ell_used = 0.0;  ///< l for RWM; sigma itself for MALA
  bool accepted = false;
  double acc_prob = 0.0;
  double a_hat = 0.0;
  double b_hat = 0.0;
};

/// Coordinate averages of x and x^2 at the start of the step.
MomentEstimates coordinate_moments(const Potential& p, std::span<const double> xs);

/// Initial theta for the adaptive strategy (log of the initial sigma); zero
/// for the other strategies.
double initial_theta(const Strategy& strategy, std::size_t n);

/// One random walk Metropolis step. Updates `state` in place.
StepRecord rwm_step(ChainState& state, const Potential& p, const Strategy& strategy);

/// Per-coordinate term of the MALA log acceptance ratio for increment g:
///   V(x) - V(y) + ((g)^2 - (g - sigma/2 (V'(x) + V'(y)))^2) / 2,
/// with y = x + sigma g - sigma^2 V'(x)/2.
double mala_log_acceptance_term(const Potential& p, double x, double g, double sigma);

/// One MALA step with fixed sigma > 0. Updates `state` in place.
StepRecord mala_step(ChainState& state, const Potential& p, double sigma);

/// Coordinate means of x and x^2 after each step; index 0 is the initial state.
struct MomentTrace {
  std::vector<double> mean;
  std::vector<double> second_moment;
};

struct ChainRun {
  std::vector<StepRecord> records;
  MomentTrace trace;
  ChainState final_state;
  std::uint64_t accepted = 0;
  double mean_acc_prob = 0.0;
};

/// Runs `steps` RWM steps from `state`. A StepRecord is kept for each step
/// index k with k % record_every == 0 (none when record_every == 0).
ChainRun run_chain(ChainState state, const Potential& p, const Strategy& strategy,
                   std::uint64_t steps, std::uint64_t record_every);

/// Convenience overload seeding a fresh state from `init`.
ChainRun run_chain(std::vector<double> init, const Potential& p, const Strategy& strategy,
                   std::uint64_t steps, std::uint64_t record_every, std::uint64_t seed);

/// MALA counterpart of run_chain.
ChainRun run_mala_chain(ChainState state, const Potential& p, double sigma, std::uint64_t steps,
                        std::uint64_t record_every);

/// CSV with header `k,ell_used,acc_prob,a_hat,b_hat`.
void write_step_records_csv(std::ostream& out, std::span<const StepRecord> records);

}  // namespace tscale
