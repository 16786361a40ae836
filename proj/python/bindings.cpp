#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "tscale/chains.hpp"
#include "tscale/coefficients.hpp"
#include "tscale/experiments.hpp"
#include "tscale/limits.hpp"
#include "tscale/special.hpp"
#include "tscale/tuning.hpp"
#include "tscale/validation.hpp"

namespace py = pybind11;
using namespace tscale;

namespace {

GradMoment to_grad_moment(double a) {
  return std::isinf(a) && a > 0 ? GradMoment::infinite() : GradMoment(a);
}

py::dict tuning_dict(const TuningResult& r) {
  py::dict d;
  d["ell"] = r.ell;
  d["objective"] = r.objective;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tscale, m) {
  m.doc() = "Limiting coefficients, step-scale rules and simulators for Metropolis chains";
  m.attr("__version__") = TSCALE_VERSION;

  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));

  m.def(
      "diffusion_coefficient",
      [](double a, double b, double ell) { return diffusion_coefficient(to_grad_moment(a), b, ell); },
      py::arg("a"), py::arg("b"), py::arg("ell"), "Gamma(a, b, l); a may be float('inf').");
  m.def(
      "drift_coefficient",
      [](double a, double b, double ell) { return drift_coefficient(to_grad_moment(a), b, ell); },
      py::arg("a"), py::arg("b"), py::arg("ell"));
  m.def(
      "acceptance_rate",
      [](double a, double b, double ell) { return acceptance_rate(to_grad_moment(a), b, ell); },
      py::arg("a"), py::arg("b"), py::arg("ell"));
  m.def("entropy_rate", &entropy_rate, py::arg("a"), py::arg("b"), py::arg("ell"));
  m.def("entropy_rate_unit", &entropy_rate_unit, py::arg("s"), py::arg("ell"));
  m.def("acceptance_curve", &acceptance_curve, py::arg("s"), py::arg("ell"));

  m.def("ell_star", [](double s) { return tuning_dict(ell_star(s)); }, py::arg("s"));
  m.def("ell_star_ab", [](double a, double b) { return tuning_dict(ell_star_ab(a, b)); },
        py::arg("a"), py::arg("b"));
  m.def("ell_alpha",
        [](double s, double alpha) { return tuning_dict(ell_alpha(s, Probability(alpha))); },
        py::arg("s"), py::arg("alpha"));
  m.def("ell_alpha_ab",
        [](double a, double b, double alpha) {
          return tuning_dict(ell_alpha_ab(a, b, Probability(alpha)));
        },
        py::arg("a"), py::arg("b"), py::arg("alpha"));
  m.def("ell_ent_gaussian", [](double mean, double s) { return tuning_dict(ell_ent_gaussian(mean, s)); },
        py::arg("m"), py::arg("s"));
  m.def("asymptotic_star_ratio", &asymptotic_star_ratio);
  m.def("matched_alpha",
        [](const std::string& regime) { return matched_alpha(parse_match_regime(regime)); },
        py::arg("regime"),
        "regime: near_equilibrium, s_to_zero or s_to_infinity");

  m.def("gaussian_entropy",
        [](double mean, double s) { return gaussian_entropy({mean, s, 0.0}); }, py::arg("m"),
        py::arg("s"));
  m.def(
      "integrate_gaussian_ode",
      [](double m0, double s0, const std::string& strategy, double dt, double t_end,
         std::uint64_t record_every) {
        const auto traj = integrate_gaussian_ode({m0, s0, 0.0}, Strategy::parse(strategy), dt,
                                                 t_end, record_every);
        py::dict out;
        std::vector<double> t, mm, s, h, ell, acc;
        for (const auto& x : traj) {
          t.push_back(x.t);
          mm.push_back(x.m);
          s.push_back(x.s);
          h.push_back(x.entropy);
          ell.push_back(x.ell_used);
          acc.push_back(x.acc);
        }
        out["t"] = t;
        out["m"] = mm;
        out["s"] = s;
        out["H"] = h;
        out["ell_used"] = ell;
        out["acc"] = acc;
        return out;
      },
      py::arg("m0"), py::arg("s0"), py::arg("strategy") = "star", py::arg("dt") = 1e-3,
      py::arg("t_end") = 40.0, py::arg("record_every") = 100);

  m.def(
      "run_chain",
      [](std::vector<double> init, const std::string& target, const std::string& strategy,
         std::uint64_t steps, std::uint64_t seed) {
        const auto run =
            run_chain(std::move(init), Potential::by_name(target), Strategy::parse(strategy), steps,
                      0, seed);
        py::dict out;
        out["mean"] = run.trace.mean;
        out["second_moment"] = run.trace.second_moment;
        out["mean_acc_prob"] = run.mean_acc_prob;
        out["accepted"] = run.accepted;
        out["final"] = run.final_state.coords;
        return out;
      },
      py::arg("init"), py::arg("target") = "gaussian", py::arg("strategy") = "constant:2.38",
      py::arg("steps") = 1000, py::arg("seed") = 1);

  m.def(
      "equilibrium_values",
      [](const std::string& target) {
        const auto eq = equilibrium_values(Potential::by_name(target));
        return py::make_tuple(eq.mean, eq.second_moment);
      },
      py::arg("target"));

  m.def(
      "mala_ar1_limit",
      [](double ell, std::uint64_t steps, double y0, std::uint64_t seed) {
        return mala_ar1_limit(ell, steps, y0, CounterRng(seed));
      },
      py::arg("ell"), py::arg("steps"), py::arg("y0") = 0.0, py::arg("seed") = 1);

  m.def(
      "relative_loss_surface",
      [](const std::vector<double>& b_values, const std::vector<double>& a_grid,
         const std::vector<double>& alphas) {
        std::vector<py::tuple> rows;
        for (const auto& e : relative_loss_surface(b_values, a_grid, alphas)) {
          rows.push_back(py::make_tuple(e.alpha, e.b, e.a, e.loss));
        }
        return rows;
      },
      py::arg("b_values"), py::arg("a_grid"), py::arg("alphas"),
      "Rows (alpha, b, a, loss).");

  m.def("experiment_preset",
        [](const std::string& scenario, const std::string& scale) {
          return config_to_json(experiment_preset(scenario, scale));
        },
        py::arg("scenario"), py::arg("scale") = "desk", "Preset config as JSON text.");
  m.def(
      "square_bias_sweep",
      [](const std::string& config_json, unsigned threads) {
        auto cfg = config_from_json(config_json);
        cfg.threads = threads;
        SweepResult result;
        {
          py::gil_scoped_release release;
          result = square_bias_sweep(cfg);
        }
        py::list curves;
        for (const auto& c : result.curves) {
          py::dict d;
          d["label"] = c.label;
          d["strategy"] = c.strategy_spec;
          d["mean_acc_prob"] = c.mean_acc_prob;
          std::vector<std::uint64_t> t0;
          std::vector<double> bs, bm, ss, sm;
          for (const auto& p : c.points) {
            t0.push_back(p.t0);
            bs.push_back(p.sq_bias_s);
            bm.push_back(p.sq_bias_m);
            ss.push_back(p.stderr_s);
            sm.push_back(p.stderr_m);
          }
          d["t0"] = t0;
          d["sq_bias_s"] = bs;
          d["sq_bias_m"] = bm;
          d["stderr_s"] = ss;
          d["stderr_m"] = sm;
          curves.append(d);
        }
        return curves;
      },
      py::arg("config_json"), py::arg("threads") = 0);

  m.def(
      "validate",
      [](std::uint64_t samples, std::uint64_t seed) {
        std::vector<py::tuple> rows;
        for (const auto& r : run_validation_suite(samples, seed)) {
          rows.push_back(py::make_tuple(r.name, r.passed, r.detail));
        }
        return rows;
      },
      py::arg("samples") = 100000, py::arg("seed") = 12345, "Rows (name, passed, detail).");
}
