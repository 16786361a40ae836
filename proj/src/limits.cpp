#include "tscale/limits.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "tscale/coefficients.hpp"
#include "tscale/detail/search.hpp"
#include "tscale/error.hpp"
#include "tscale/tuning.hpp"

namespace tscale {

GaussianRates gaussian_ode_rhs(double m, double s, double ell) {
  return {-drift_coefficient(s, 1.0, ell) * m, entropy_rate_unit(s, ell) * (1.0 - s)};
}

double gaussian_policy_ell(const Strategy& policy, double m, double s) {
  Strategy effective = policy;
  if (const auto* adaptive = std::get_if<ConstantAccAdaptive>(&policy.kind)) {
    effective.kind = ConstantAccNumeric{adaptive->alpha};
  }
  return choose_ell(effective, MomentEstimates{s, 1.0, m, s}, 1, 0.0);
}

OdeStep gaussian_ode_step(const GaussianMoments& gm, const Strategy& policy, double dt) {
  detail::require(dt > 0.0, "gaussian_ode_step: dt must be positive");
  detail::require(gm.s >= gm.m * gm.m && std::isfinite(gm.s),
                  "gaussian_ode_step: requires s >= m^2");
  const double ell = gaussian_policy_ell(policy, gm.m, gm.s);

  double h = dt;
  for (int attempt = 0; attempt < 40; ++attempt, h *= 0.5) {
    // An intermediate stage with s < 0 has no meaning as a moment and also
    // rejects the step.
    const auto k1 = gaussian_ode_rhs(gm.m, gm.s, ell);
    const double s2 = gm.s + 0.5 * h * k1.ds;
    if (!(s2 >= 0.0)) continue;
    const auto k2 = gaussian_ode_rhs(gm.m + 0.5 * h * k1.dm, s2, ell);
    const double s3 = gm.s + 0.5 * h * k2.ds;
    if (!(s3 >= 0.0)) continue;
    const auto k3 = gaussian_ode_rhs(gm.m + 0.5 * h * k2.dm, s3, ell);
    const double s4 = gm.s + h * k3.ds;
    if (!(s4 >= 0.0)) continue;
    const auto k4 = gaussian_ode_rhs(gm.m + h * k3.dm, s4, ell);
    GaussianMoments next{gm.m + h / 6.0 * (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm),
                         gm.s + h / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds),
                         gm.t + h};
    if (next.s >= next.m * next.m) return {next, ell, h};
  }
  throw ConvergenceError("gaussian_ode_step: could not keep s >= m^2");
}

double gaussian_entropy(const GaussianMoments& gm) {
  const double variance = gm.s - gm.m * gm.m;
  detail::require(variance > 0.0, "gaussian_entropy requires s > m^2");
  return 0.5 * (gm.s - std::log(variance) - 1.0);
}

namespace {

LimitSample sample_at(const GaussianMoments& gm, double ell) {
  const double variance = gm.s - gm.m * gm.m;
  const double h = variance > 0.0 ? gaussian_entropy(gm) : std::numeric_limits<double>::infinity();
  return {gm.t, gm.m, gm.s, h, ell, acceptance_rate(gm.s, 1.0, ell)};
}

}  // namespace

std::vector<LimitSample> integrate_gaussian_ode(GaussianMoments init, const Strategy& policy,
                                                double dt, double t_end,
                                                std::uint64_t record_every) {
  detail::require(t_end >= init.t, "integrate_gaussian_ode: t_end before start");
  std::vector<LimitSample> out;
  GaussianMoments gm = init;
  std::uint64_t step = 0;
  double last_ell = gaussian_policy_ell(policy, gm.m, gm.s);
  out.push_back(sample_at(gm, last_ell));
  while (gm.t < t_end - 1e-12 * std::max(1.0, t_end)) {
    const double h = std::min(dt, t_end - gm.t);
    const auto next = gaussian_ode_step(gm, policy, h);
    gm = next.state;
    last_ell = next.ell_used;
    ++step;
    if (record_every != 0 && step % record_every == 0) out.push_back(sample_at(gm, last_ell));
  }
  if (out.back().t != gm.t) out.push_back(sample_at(gm, last_ell));
  return out;
}

void write_limit_csv(std::ostream& out, std::span<const LimitSample> samples) {
  out << "t,m,s,H,ell_used,acc\n" << std::setprecision(17);
  for (const auto& x : samples) {
    out << x.t << ',' << x.m << ',' << x.s << ',' << x.entropy << ',' << x.ell_used << ','
        << x.acc << '\n';
  }
}

ParticleEnsemble gaussian_ensemble(std::size_t count, double mean, double variance, double dt,
                                   std::uint64_t seed) {
  detail::require(count >= 2, "particle ensemble needs at least two particles");
  detail::require(dt > 0.0, "particle ensemble: dt must be positive");
  detail::require(variance >= 0.0, "particle ensemble: variance must be >= 0");
  ParticleEnsemble pe;
  pe.rng = CounterRng(seed);
  pe.dt = dt;
  pe.xs.resize(count);
  const CounterRng init = pe.rng.child(0);
  const double sd = std::sqrt(variance);
  for (std::size_t i = 0; i < count; ++i) pe.xs[i] = mean + sd * init.normal(i, 0);
  return pe;
}

void meanfield_particle_step(ParticleEnsemble& pe, const Potential& p, double ell) {
  detail::require(pe.xs.size() >= 2 && pe.dt > 0.0, "meanfield_particle_step: bad ensemble");
  const auto mom = empirical_moments(p, pe.xs);
  const double gamma = diffusion_coefficient(mom.a, mom.b, ell);
  const double drift = drift_coefficient(mom.a, mom.b, ell);
  const double noise = std::sqrt(gamma * pe.dt);
  for (std::size_t i = 0; i < pe.xs.size(); ++i) {
    const double x = pe.xs[i];
    pe.xs[i] = x - drift * p.d1(x) * pe.dt + noise * pe.rng.normal(i, pe.step);
  }
  ++pe.step;
  pe.t += pe.dt;
}

double entropy_rate_bound(double a, double b, double ell, double fisher) {
  detail::require(fisher >= 0.0, "entropy_rate_bound: Fisher information must be >= 0");
  if (fisher == 0.0) return 0.0;
  return -0.5 * entropy_rate(a, b, ell) * fisher;
}

double default_regime_band(double moment) { return 1e-8 * std::max(1.0, std::abs(moment)); }

MalaRegime mala_regime(double moment, double eps) {
  detail::require(eps >= 0.0, "mala_regime: eps must be >= 0");
  if (std::abs(moment) <= eps) return {MalaRegimeTag::stationary_moment, moment, 1.0 / 3.0};
  if (moment < 0.0) return {MalaRegimeTag::negative_moment, moment, 0.5};
  return {MalaRegimeTag::positive_moment, moment, 0.0};
}

std::string_view to_string(MalaRegimeTag tag) {
  switch (tag) {
    case MalaRegimeTag::negative_moment: return "negative_moment";
    case MalaRegimeTag::stationary_moment: return "stationary_moment";
    case MalaRegimeTag::positive_moment: return "positive_moment";
  }
  return "unknown";
}

double mala_w(double moment, double ell) {
  detail::require(ell > 0.0, "mala_w: ell must be positive");
  const double exponent = std::pow(ell, 4) / 8.0 * moment;
  return ell * ell * (exponent >= 0.0 ? 1.0 : std::exp(exponent));
}

double mala_stationary_moment(const Potential& p) {
  return stationary_expectation(p, [&p](double x) {
    const double v2 = p.d2(x);
    const double v3 = p.d3(x);
    return 5.0 * v3 * v3 - 3.0 * v2 * v2 * v2;
  });
}

double mala_z(double k_moment, double ell) {
  detail::require(ell > 0.0, "mala_z: ell must be positive");
  if (k_moment < 0.0) {
    throw DomainError("mala_z: E[5 (V''')^2 - 3 (V'')^3] = " + std::to_string(k_moment) +
                      " < 0, the square root in z is undefined");
  }
  return 2.0 * ell * ell * normal_cdf(-std::pow(ell, 3) * std::sqrt(k_moment / 3.0) / 8.0);
}

double mala_z_stationary(const Potential& p, double ell) {
  return mala_z(mala_stationary_moment(p), ell);
}

MalaOptimum mala_z_optimum(double k_moment) {
  if (!(k_moment > 0.0)) throw DomainError("mala_z_optimum requires K > 0");
  // z = 2 (u/c)^{2/3} Phi(-u) with u = c l^3, c = sqrt(K/3)/8.
  const double c = std::sqrt(k_moment / 3.0) / 8.0;
  const auto best = detail::golden_section_maximize(
      [](double u) { return std::pow(u, 2.0 / 3.0) * normal_cdf(-u); }, 1e-9, 6.0, 1e-13);
  const double ell = std::cbrt(best.x / c);
  const double z = mala_z(k_moment, ell);
  return {ell, z, z / (ell * ell)};
}

std::vector<double> mala_ar1_limit(double ell, std::uint64_t steps, double y0,
                                   const CounterRng& rng) {
  detail::require(ell > 0.0 && ell < 2.0, "mala_ar1_limit requires 0 < ell < 2");
  std::vector<double> ys;
  ys.reserve(steps + 1);
  ys.push_back(y0);
  const double contraction = 1.0 - 0.5 * ell * ell;
  double y = y0;
  for (std::uint64_t k = 0; k < steps; ++k) {
    y = contraction * y + ell * rng.normal(0, k);
    ys.push_back(y);
  }
  return ys;
}

}  // namespace tscale
