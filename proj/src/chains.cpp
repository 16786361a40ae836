#include "tscale/chains.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "tscale/error.hpp"

namespace tscale {
namespace {

double acceptance_probability(double log_ratio) {
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

void push_trace(MomentTrace& trace, std::span<const double> xs) {
  double sum = 0.0;
  double sum2 = 0.0;
  for (double x : xs) {
    sum += x;
    sum2 += x * x;
  }
  const double inv = 1.0 / static_cast<double>(xs.size());
  trace.mean.push_back(sum * inv);
  trace.second_moment.push_back(sum2 * inv);
}

template <class Step>
ChainRun run_generic(ChainState state, std::uint64_t steps, std::uint64_t record_every,
                     Step&& step) {
  detail::require(state.dim() >= 1, "chain dimension must be at least 1");
  ChainRun run;
  run.trace.mean.reserve(steps + 1);
  run.trace.second_moment.reserve(steps + 1);
  push_trace(run.trace, state.coords);
  double acc_sum = 0.0;
  const std::uint64_t accepted_before = state.accept_count;
  for (std::uint64_t i = 0; i < steps; ++i) {
    const StepRecord rec = step(state);
    acc_sum += rec.acc_prob;
    if (record_every != 0 && rec.k % record_every == 0) run.records.push_back(rec);
    push_trace(run.trace, state.coords);
  }
  run.accepted = state.accept_count - accepted_before;
  run.mean_acc_prob = steps == 0 ? 0.0 : acc_sum / static_cast<double>(steps);
  run.final_state = std::move(state);
  return run;
}

}  // namespace

ChainState::ChainState(std::vector<double> init, std::uint64_t seed)
    : coords(std::move(init)), rng(seed), streams(coords.size()) {
  std::iota(streams.begin(), streams.end(), std::uint64_t{0});
}

MomentEstimates coordinate_moments(const Potential& p, std::span<const double> xs) {
  const auto functionals = empirical_moments(p, xs);
  MomentEstimates m;
  m.a_hat = functionals.a;
  m.b_hat = functionals.b;
  for (double x : xs) {
    m.m_hat += x;
    m.s_hat += x * x;
  }
  m.m_hat /= static_cast<double>(xs.size());
  m.s_hat /= static_cast<double>(xs.size());
  return m;
}

double initial_theta(const Strategy& strategy, std::size_t n) {
  if (const auto* adaptive = std::get_if<ConstantAccAdaptive>(&strategy.kind)) {
    return std::log(adaptive->initial_ell / std::sqrt(static_cast<double>(n)));
  }
  return 0.0;
}

StepRecord rwm_step(ChainState& state, const Potential& p, const Strategy& strategy) {
  const std::size_t n = state.dim();
  detail::require(n >= 1 && state.streams.size() == n, "rwm_step: malformed chain state");

  const MomentEstimates mom = coordinate_moments(p, state.coords);
  const double ell = choose_ell(strategy, mom, n, state.theta);
  const double sigma = ell / std::sqrt(static_cast<double>(n));

  thread_local std::vector<double> proposal;
  proposal.resize(n);
  double log_ratio = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = state.coords[i];
    const double y = x + sigma * state.rng.normal(state.streams[i], state.k);
    proposal[i] = y;
    log_ratio += p.v(x) - p.v(y);
  }
  const double acc_prob = acceptance_probability(log_ratio);
  const bool accepted = state.rng.uniform(kAcceptStream, state.k) < acc_prob;
  if (accepted) {
    state.coords.assign(proposal.begin(), proposal.end());
    ++state.accept_count;
  }

  if (const auto* adaptive = std::get_if<ConstantAccAdaptive>(&strategy.kind)) {
    const double observed = adaptive->indicator ? (accepted ? 1.0 : 0.0) : acc_prob;
    state.theta = adaptive_update(state.theta, observed, adaptive->alpha, state.k,
                                  adaptive->schedule);
  }

  StepRecord rec{state.k, ell, accepted, acc_prob, mom.a_hat, mom.b_hat};
  ++state.k;
  return rec;
}

double mala_log_acceptance_term(const Potential& p, double x, double g, double sigma) {
  const double gx = p.d1(x);
  const double y = x + sigma * g - 0.5 * sigma * sigma * gx;
  const double back = g - 0.5 * sigma * (gx + p.d1(y));
  return p.v(x) - p.v(y) + 0.5 * (g * g - back * back);
}

StepRecord mala_step(ChainState& state, const Potential& p, double sigma) {
  const std::size_t n = state.dim();
  detail::require(n >= 1 && state.streams.size() == n, "mala_step: malformed chain state");
  detail::require(sigma > 0.0 && std::isfinite(sigma), "mala_step: sigma must be positive");

  const auto functionals = empirical_moments(p, state.coords);
  thread_local std::vector<double> proposal;
  proposal.resize(n);
  double log_ratio = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = state.coords[i];
    const double g = state.rng.normal(state.streams[i], state.k);
    proposal[i] = x + sigma * g - 0.5 * sigma * sigma * p.d1(x);
    log_ratio += mala_log_acceptance_term(p, x, g, sigma);
  }
  const double acc_prob = acceptance_probability(log_ratio);
  const bool accepted = state.rng.uniform(kAcceptStream, state.k) < acc_prob;
  if (accepted) {
    state.coords.assign(proposal.begin(), proposal.end());
    ++state.accept_count;
  }
  StepRecord rec{state.k, sigma, accepted, acc_prob, functionals.a, functionals.b};
  ++state.k;
  return rec;
}

ChainRun run_chain(ChainState state, const Potential& p, const Strategy& strategy,
                   std::uint64_t steps, std::uint64_t record_every) {
  return run_generic(std::move(state), steps, record_every,
                     [&](ChainState& s) { return rwm_step(s, p, strategy); });
}

ChainRun run_chain(std::vector<double> init, const Potential& p, const Strategy& strategy,
                   std::uint64_t steps, std::uint64_t record_every, std::uint64_t seed) {
  ChainState state(std::move(init), seed);
  state.theta = initial_theta(strategy, state.dim());
  return run_chain(std::move(state), p, strategy, steps, record_every);
}

ChainRun run_mala_chain(ChainState state, const Potential& p, double sigma, std::uint64_t steps,
                        std::uint64_t record_every) {
  return run_generic(std::move(state), steps, record_every,
                     [&](ChainState& s) { return mala_step(s, p, sigma); });
}

void write_step_records_csv(std::ostream& out, std::span<const StepRecord> records) {
  out << "k,ell_used,acc_prob,a_hat,b_hat\n";
  out << std::setprecision(17);
  for (const auto& r : records) {
    out << r.k << ',' << r.ell_used << ',' << r.acc_prob << ',' << r.a_hat << ',' << r.b_hat
        << '\n';
  }
}

}  // namespace tscale
