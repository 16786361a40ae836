#pragma once

// Step-scale strategies: how l in sigma^2 = l^2/n is chosen along a run from
// the current moment estimates.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace tscale {

/// Robbins-Monro gains gamma_k = scale * k^(-exponent), k >= 1.
struct GainSchedule {
  double exponent = 0.6;
  double scale = 1.0;

  [[nodiscard]] double gain(std::uint64_t k) const;
};

struct ConstantEll {
  double ell = 2.38;
};

/// l = l~alpha(a_hat, b_hat) computed numerically each step.
struct ConstantAccNumeric {
  double alpha = 0.27;
};

/// Adaptive scaling Metropolis: sigma_k = exp(theta_k) with
/// theta_{k+1} = theta_k + gamma_{k+1} (alpha_k - alpha).
struct ConstantAccAdaptive {
  double alpha = 0.27;
  GainSchedule schedule{};
  double initial_ell = 2.38;
  /// Feed the 0/1 acceptance indicator instead of the acceptance probability.
  bool indicator = false;
};

/// l = l~*(a_hat, b_hat).
struct RateOptimal {};

/// l = l^ent(m_hat, s_hat); meaningful for the Gaussian target only.
struct EntropyOptimalGaussian {};

/// Always the cap value.
struct EllCap {
  double ell_max = 10.0;
};

using StrategyKind = std::variant<ConstantEll, ConstantAccNumeric, ConstantAccAdaptive,
                                  RateOptimal, EntropyOptimalGaussian, EllCap>;

struct Strategy {
  StrategyKind kind = ConstantEll{};
  /// Used by the numeric rules when b_hat <= 0, where no finite optimum exists.
  double ell_cap = 10.0;

  /// Short label used in file names and tables, e.g. "alpha0.27-A".
  [[nodiscard]] std::string label() const;
  [[nodiscard]] bool is_adaptive() const noexcept {
    return std::holds_alternative<ConstantAccAdaptive>(kind);
  }

  /// Parse "constant:2.38", "alpha:0.27", "adaptive:0.27[:exponent]", "star",
  /// "ent" or "cap:10". Throws ConfigError.
  static Strategy parse(std::string_view spec);
  /// Inverse of parse.
  [[nodiscard]] std::string spec() const;
};

/// Moment estimates available to a strategy at one step.
struct MomentEstimates {
  double a_hat = 0.0;  ///< mean of (V')^2
  double b_hat = 0.0;  ///< mean of V''
  double m_hat = 0.0;  ///< mean of x
  double s_hat = 0.0;  ///< mean of x^2
};

/// Step scale l chosen by `strategy`. For the adaptive kind this is the l
/// equivalent exp(theta) sqrt(n) of the current sigma.
double choose_ell(const Strategy& strategy, const MomentEstimates& moments, std::size_t n,
                  double theta);

/// One Robbins-Monro update; k is the index of the step that produced acc_prob
/// (k = 0 for the first step, which uses gamma_1).
double adaptive_update(double theta, double acc_prob, double alpha_target, std::uint64_t k,
                       const GainSchedule& schedule);

}  // namespace tscale
