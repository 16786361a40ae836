#include "tscale/strategy.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "tscale/error.hpp"
#include "tscale/tuning.hpp"

namespace tscale {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

double parse_alpha(std::string_view text) {
  const double alpha = parse_number(text, "acceptance rate");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("acceptance rate must lie in (0, 1)");
  return alpha;
}

double parse_positive(std::string_view text, std::string_view what) {
  const double value = parse_number(text, what);
  if (!(value > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  return value;
}

std::string format_number(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

}  // namespace

double GainSchedule::gain(std::uint64_t k) const {
  return scale * std::pow(static_cast<double>(k), -exponent);
}

std::string Strategy::label() const {
  return std::visit(
      overloaded{
          [](const ConstantEll& s) { return "constant" + format_number(s.ell); },
          [](const ConstantAccNumeric& s) { return "alpha" + format_number(s.alpha) + "-N"; },
          [](const ConstantAccAdaptive& s) { return "alpha" + format_number(s.alpha) + "-A"; },
          [](const RateOptimal&) { return std::string("star"); },
          [](const EntropyOptimalGaussian&) { return std::string("ent"); },
          [](const EllCap& s) { return "cap" + format_number(s.ell_max); },
      },
      kind);
}

std::string Strategy::spec() const {
  return std::visit(
      overloaded{
          [](const ConstantEll& s) { return "constant:" + format_number(s.ell); },
          [](const ConstantAccNumeric& s) { return "alpha:" + format_number(s.alpha); },
          [](const ConstantAccAdaptive& s) {
            return "adaptive:" + format_number(s.alpha) + ":" + format_number(s.schedule.exponent);
          },
          [](const RateOptimal&) { return std::string("star"); },
          [](const EntropyOptimalGaussian&) { return std::string("ent"); },
          [](const EllCap& s) { return "cap:" + format_number(s.ell_max); },
      },
      kind);
}

Strategy Strategy::parse(std::string_view spec) {
  const auto parts = split(spec, ':');
  const auto name = parts[0];
  auto expect_args = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() - 1 < lo || parts.size() - 1 > hi) {
      throw ConfigError("malformed strategy '" + std::string(spec) + "'");
    }
  };
  Strategy s;
  if (name == "constant") {
    expect_args(1, 1);
    s.kind = ConstantEll{parse_positive(parts[1], "ell")};
  } else if (name == "alpha") {
    expect_args(1, 1);
    s.kind = ConstantAccNumeric{parse_alpha(parts[1])};
  } else if (name == "adaptive") {
    expect_args(1, 2);
    ConstantAccAdaptive adaptive{parse_alpha(parts[1])};
    if (parts.size() == 3) {
      adaptive.schedule.exponent = parse_number(parts[2], "gain exponent");
      if (!(adaptive.schedule.exponent > 0.5 && adaptive.schedule.exponent <= 1.0)) {
        throw ConfigError("gain exponent must lie in (0.5, 1]");
      }
    }
    s.kind = adaptive;
  } else if (name == "star") {
    expect_args(0, 0);
    s.kind = RateOptimal{};
  } else if (name == "ent") {
    expect_args(0, 0);
    s.kind = EntropyOptimalGaussian{};
  } else if (name == "cap") {
    expect_args(1, 1);
    s.kind = EllCap{parse_positive(parts[1], "ell cap")};
  } else {
    throw ConfigError("unknown strategy '" + std::string(spec) +
                      "' (expected constant:L, alpha:A, adaptive:A, star, ent or cap:L)");
  }
  return s;
}

double choose_ell(const Strategy& strategy, const MomentEstimates& mom, std::size_t n,
                  double theta) {
  return std::visit(
      overloaded{
          [](const ConstantEll& s) { return s.ell; },
          [&](const ConstantAccNumeric& s) {
            if (!(mom.b_hat > 0.0)) return strategy.ell_cap;
            return ell_alpha_ab(mom.a_hat, mom.b_hat, Probability(s.alpha)).ell;
          },
          [&](const ConstantAccAdaptive&) {
            return std::exp(theta) * std::sqrt(static_cast<double>(n));
          },
          [&](const RateOptimal&) {
            if (!(mom.b_hat > 0.0)) return strategy.ell_cap;
            return ell_star_ab(mom.a_hat, mom.b_hat).ell;
          },
          [&](const EntropyOptimalGaussian&) {
            const double variance = mom.s_hat - mom.m_hat * mom.m_hat;
            if (variance <= 1e-12 * std::max(1.0, mom.s_hat)) {
              return ell_max_diffusion(mom.s_hat).ell;
            }
            return ell_ent_gaussian(mom.m_hat, mom.s_hat).ell;
          },
          [](const EllCap& s) { return s.ell_max; },
      },
      strategy.kind);
}

double adaptive_update(double theta, double acc_prob, double alpha_target, std::uint64_t k,
                       const GainSchedule& schedule) {
  return theta + schedule.gain(k + 1) * (acc_prob - alpha_target);
}

}  // namespace tscale
