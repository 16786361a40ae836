#pragma once

// Mean-field limits of the Metropolis chains.
//
// For the Gaussian target the law of the limiting RWM process is described
// by its mean m and second moment s:
//
//   ds/dt = F1(s, l) (1 - s),     dm/dt = -G(s, 1, l) m,
//
// and its relative entropy to N(0, 1) is H = (s - ln(s - m^2) - 1) / 2.
// For general targets the nonlinear SDE
//
//   dX = sqrt(Gamma(a, b, l)) dB - G(a, b, l) V'(X) dt,  a = E[(V')^2], b = E[V'']
//
// is integrated with an interacting particle Euler-Maruyama scheme.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "tscale/rng.hpp"
#include "tscale/strategy.hpp"
#include "tscale/targets.hpp"

namespace tscale {

/// Mean and second moment of the limiting law at time t. Requires
/// s >= m^2; the equality case is a Dirac law, allowed as an initial point.
struct GaussianMoments {
  double m = 0.0;
  double s = 1.0;
  double t = 0.0;
};

struct GaussianRates {
  double dm;
  double ds;
};

/// Right-hand side of the moment system at fixed l.
GaussianRates gaussian_ode_rhs(double m, double s, double ell);

/// l selected by `policy` at the moment state (m, s), where (a, b) = (s, 1).
/// The adaptive kind is read as its exact-acceptance counterpart.
double gaussian_policy_ell(const Strategy& policy, double m, double s);

struct OdeStep {
  GaussianMoments state;
  double ell_used;
  double dt_used;
};

/// One explicit RK4 step with l frozen at the value chosen at the start of
/// the step. The step is halved (repeatedly) if it would produce s < m^2.
OdeStep gaussian_ode_step(const GaussianMoments& gm, const Strategy& policy, double dt);

/// Relative entropy of N(m, s - m^2) to N(0, 1). Throws DomainError if s <= m^2.
double gaussian_entropy(const GaussianMoments& gm);

struct LimitSample {
  double t;
  double m;
  double s;
  double entropy;  ///< +infinity at a Dirac state
  double ell_used;
  double acc;
};

/// Trajectory of the moment system; one sample per `record_every` steps
/// plus the final state.
std::vector<LimitSample> integrate_gaussian_ode(GaussianMoments init, const Strategy& policy,
                                                double dt, double t_end,
                                                std::uint64_t record_every = 1);

/// CSV with header `t,m,s,H,ell_used,acc`.
void write_limit_csv(std::ostream& out, std::span<const LimitSample> samples);

struct ParticleEnsemble {
  std::vector<double> xs;
  double t = 0.0;
  double dt = 1e-3;
  CounterRng rng{};
  std::uint64_t step = 0;
};

/// Ensemble with xs[i] drawn i.i.d. from N(mean, variance) using stream i.
ParticleEnsemble gaussian_ensemble(std::size_t count, double mean, double variance, double dt,
                                   std::uint64_t seed);

/// One Euler-Maruyama step of the particle system with coefficients evaluated
/// at the empirical moments of the ensemble.
void meanfield_particle_step(ParticleEnsemble& pe, const Potential& p, double ell);

/// Right-hand side bound -F(a, b, l) I / 2 on the entropy dissipation.
double entropy_rate_bound(double a, double b, double ell, double fisher);

enum class MalaRegimeTag { negative_moment, stationary_moment, positive_moment };

struct MalaRegime {
  MalaRegimeTag tag;
  double moment;
  /// Exponent q in sigma^2 = l^2 / n^q; 0 for the positive regime, where
  /// sigma should go to zero as slowly as possible.
  double variance_exponent;
};

/// Default dead band: 1e-8 * max(1, |moment|).
double default_regime_band(double moment);

MalaRegime mala_regime(double moment, double eps);
std::string_view to_string(MalaRegimeTag tag);

/// w = l^2 (exp(l^4 moment / 8) ^ 1).
double mala_w(double moment, double ell);

/// K = E[5 (V''')^2 - 3 (V'')^3] under the stationary law.
double mala_stationary_moment(const Potential& p);

/// z(l) = 2 l^2 Phi(-l^3 sqrt(K/3) / 8). Throws DomainError if K < 0.
double mala_z(double k_moment, double ell);

/// z(l) for the target p, K by quadrature.
double mala_z_stationary(const Potential& p, double ell);

struct MalaOptimum {
  double ell;
  double z;
  double acceptance;  ///< z / l^2 at the optimum
};

/// Maximizer of l -> z(l) for a given K > 0.
MalaOptimum mala_z_optimum(double k_moment);

/// Y_{k+1} = (1 - l^2/2) Y_k + l G_{k+1}, 0 < l < 2. Returns Y_0..Y_steps.
std::vector<double> mala_ar1_limit(double ell, std::uint64_t steps, double y0,
                                   const CounterRng& rng);

}  // namespace tscale
