#include "tscale/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "tscale/coefficients.hpp"
#include "tscale/error.hpp"
#include "tscale/rng.hpp"
#include "tscale/tuning.hpp"

namespace tscale {
namespace {

using nlohmann::json;

std::vector<std::uint64_t> arithmetic_grid(std::uint64_t lo, std::uint64_t hi, std::uint64_t step) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t t = lo; t <= hi; t += step) out.push_back(t);
  return out;
}

std::vector<double> initial_coords(const ExperimentConfig& cfg, const CounterRng& rng) {
  std::vector<double> xs(cfg.n);
  switch (cfg.init.kind) {
    case InitKind::point:
      std::fill(xs.begin(), xs.end(), cfg.init.value);
      break;
    case InitKind::gaussian: {
      const double sd = std::sqrt(cfg.init.variance);
      for (std::size_t i = 0; i < cfg.n; ++i) xs[i] = cfg.init.mean + sd * rng.normal(i, 0);
      break;
    }
    case InitKind::stationary:
      for (std::size_t i = 0; i < cfg.n; ++i) xs[i] = rng.normal(i, 0);
      break;
  }
  return xs;
}

struct ReplicateOutput {
  std::vector<double> is;
  std::vector<double> im;
  double mean_acc = 0.0;
};

// Runs jobs 0..count-1 on `threads` workers; rethrows the first failure.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

std::string init_kind_name(InitKind k) {
  switch (k) {
    case InitKind::point: return "point";
    case InitKind::gaussian: return "gaussian";
    case InitKind::stationary: return "stationary";
  }
  return "point";
}

InitKind parse_init_kind(const std::string& s) {
  if (s == "point") return InitKind::point;
  if (s == "gaussian") return InitKind::gaussian;
  if (s == "stationary") return InitKind::stationary;
  throw ConfigError("unknown init kind '" + s + "' (expected point, gaussian or stationary)");
}

json strategy_to_json(const Strategy& s) {
  json j{{"spec", s.spec()}, {"ell_cap", s.ell_cap}};
  if (const auto* a = std::get_if<ConstantAccAdaptive>(&s.kind)) {
    j["initial_ell"] = a->initial_ell;
    j["indicator"] = a->indicator;
    j["gain_scale"] = a->schedule.scale;
  }
  return j;
}

Strategy strategy_from_json(const json& j) {
  if (j.is_string()) return Strategy::parse(j.get<std::string>());
  if (!j.is_object() || !j.contains("spec")) throw ConfigError("strategy entry needs a 'spec'");
  Strategy s = Strategy::parse(j.at("spec").get<std::string>());
  s.ell_cap = j.value("ell_cap", s.ell_cap);
  if (!(s.ell_cap > 0.0)) throw ConfigError("ell_cap must be positive");
  if (auto* a = std::get_if<ConstantAccAdaptive>(&s.kind)) {
    a->initial_ell = j.value("initial_ell", a->initial_ell);
    a->indicator = j.value("indicator", a->indicator);
    a->schedule.scale = j.value("gain_scale", a->schedule.scale);
  }
  return s;
}

std::string file_stem(const std::string& text) {
  std::string out;
  for (char c : text) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    out.push_back(keep ? c : '_');
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (window < 1) throw ConfigError("window T must be at least 1");
  if (replicates < 2) throw ConfigError("replicates must be at least 2");
  if (t0_grid.empty()) throw ConfigError("t0 grid must not be empty");
  for (std::size_t i = 1; i < t0_grid.size(); ++i) {
    if (t0_grid[i] < t0_grid[i - 1]) throw ConfigError("t0 grid must be nondecreasing");
  }
  if (strategies.empty()) throw ConfigError("at least one strategy is required");
  if (init.kind == InitKind::gaussian && !(init.variance >= 0.0)) {
    throw ConfigError("initial variance must be >= 0");
  }
  if (init.kind == InitKind::stationary && target != "gaussian") {
    throw ConfigError("stationary initialization is only available for the gaussian target");
  }
  (void)Potential::by_name(target);
}

std::uint64_t ExperimentConfig::steps() const { return t0_grid.back() + window; }

std::vector<std::string> preset_scenarios() {
  return {"gaussian-0", "gaussian-10", "double-well-10", "double-well-gauss"};
}

ExperimentConfig experiment_preset(std::string_view scenario, std::string_view scale) {
  ExperimentConfig cfg;
  if (scale == "desk") {
    cfg.n = 50;
    cfg.window = 500;
    cfg.replicates = 50;
    cfg.t0_grid = arithmetic_grid(0, 1000, 50);
  } else if (scale == "paper") {
    cfg.n = 100;
    cfg.window = 1500;
    cfg.replicates = 200;
    cfg.t0_grid = arithmetic_grid(0, 3000, 100);
  } else {
    throw ConfigError("unknown preset scale '" + std::string(scale) + "' (expected desk or paper)");
  }
  cfg.name = std::string(scenario) + "-" + std::string(scale);

  auto strategies = [](std::initializer_list<const char*> specs) {
    std::vector<Strategy> out;
    for (const char* s : specs) out.push_back(Strategy::parse(s));
    return out;
  };

  if (scenario == "gaussian-0") {
    cfg.target = "gaussian";
    cfg.init = {InitKind::point, 0.0};
    cfg.strategies = strategies({"constant:2.38", "adaptive:0.27", "star", "ent"});
  } else if (scenario == "gaussian-10") {
    cfg.target = "gaussian";
    cfg.init = {InitKind::point, 10.0};
    cfg.strategies =
        strategies({"constant:2.38", "alpha:0.27", "adaptive:0.27", "star", "ent"});
  } else if (scenario == "double-well-10" || scenario == "double-well-gauss") {
    cfg.target = "double-well";
    const double fisher = Potential::double_well().fisher_information();
    Strategy constant{ConstantEll{2.38 / std::sqrt(fisher)}};
    if (scenario == "double-well-10") {
      cfg.init = {InitKind::point, 10.0};
      cfg.strategies = strategies({"alpha:0.27", "adaptive:0.27", "star"});
    } else {
      cfg.init = {InitKind::gaussian, 0.0, 1.0, 0.143};
      cfg.strategies = strategies({"adaptive:0.27", "adaptive:0.35", "star"});
    }
    cfg.strategies.insert(cfg.strategies.begin(), constant);
  } else {
    throw ConfigError("unknown preset scenario '" + std::string(scenario) + "'");
  }
  return cfg;
}

namespace {

double window_average(const std::vector<double>& values, std::uint64_t t0, std::uint64_t window) {
  detail::require(window >= 1, "estimator window must be at least 1");
  if (values.size() < t0 + window + 1) {
    throw DomainError("trajectory too short: need " + std::to_string(t0 + window + 1) +
                      " states, have " + std::to_string(values.size()));
  }
  double sum = 0.0;
  for (std::uint64_t k = t0 + 1; k <= t0 + window; ++k) sum += values[k];
  return sum / static_cast<double>(window);
}

}  // namespace

double estimator_s(const MomentTrace& trace, std::uint64_t t0, std::uint64_t window) {
  return window_average(trace.second_moment, t0, window);
}

double estimator_m(const MomentTrace& trace, std::uint64_t t0, std::uint64_t window) {
  return window_average(trace.mean, t0, window);
}

SweepResult square_bias_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Potential target = Potential::by_name(cfg.target);
  SweepResult result;
  result.equilibrium = equilibrium_values(target);

  const std::size_t n_strat = cfg.strategies.size();
  const std::size_t reps = cfg.replicates;
  const std::size_t n_t0 = cfg.t0_grid.size();
  std::vector<ReplicateOutput> outputs(n_strat * reps);
  const CounterRng master(cfg.seed);

  const unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  parallel_for(outputs.size(), threads, [&](std::size_t job) {
    const std::size_t strat = job / reps;
    const std::size_t rep = job % reps;
    // Replicate r uses the same substream under every strategy.
    const CounterRng rep_rng = master.child(cfg.common_seed ? 0 : rep);
    const auto init = initial_coords(cfg, rep_rng.child(0));
    const auto run = run_chain(init, target, cfg.strategies[strat], cfg.steps(), 0,
                               rep_rng.child(1).seed());
    ReplicateOutput& out = outputs[job];
    out.is.resize(n_t0);
    out.im.resize(n_t0);
    for (std::size_t j = 0; j < n_t0; ++j) {
      out.is[j] = estimator_s(run.trace, cfg.t0_grid[j], cfg.window);
      out.im[j] = estimator_m(run.trace, cfg.t0_grid[j], cfg.window);
    }
    out.mean_acc = run.mean_acc_prob;
  });

  const double r = static_cast<double>(reps);
  for (std::size_t strat = 0; strat < n_strat; ++strat) {
    BiasCurve curve;
    curve.label = cfg.strategies[strat].label();
    curve.strategy_spec = cfg.strategies[strat].spec();
    double acc = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) acc += outputs[strat * reps + rep].mean_acc;
    curve.mean_acc_prob = acc / r;
    for (std::size_t j = 0; j < n_t0; ++j) {
      // Deviations are taken from the first replicate before averaging, so
      // identical replicates give a standard error of exactly zero.
      const auto& first = outputs[strat * reps];
      const double pivot_s = first.is[j], pivot_m = first.im[j];
      double sum_s = 0.0, sum_m = 0.0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        sum_s += outputs[strat * reps + rep].is[j] - pivot_s;
        sum_m += outputs[strat * reps + rep].im[j] - pivot_m;
      }
      const double shift_s = sum_s / r;
      const double shift_m = sum_m / r;
      double ss = 0.0, sm = 0.0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const double ds = outputs[strat * reps + rep].is[j] - pivot_s - shift_s;
        const double dm = outputs[strat * reps + rep].im[j] - pivot_m - shift_m;
        ss += ds * ds;
        sm += dm * dm;
      }
      const double mean_s = pivot_s + shift_s;
      const double mean_m = pivot_m + shift_m;
      const double bias_s = mean_s - result.equilibrium.second_moment;
      const double bias_m = mean_m - result.equilibrium.mean;
      curve.points.push_back({cfg.t0_grid[j], bias_s * bias_s, bias_m * bias_m,
                              std::sqrt(ss / (r - 1.0) / r), std::sqrt(sm / (r - 1.0) / r)});
    }
    result.curves.push_back(std::move(curve));
  }
  return result;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  detail::require(lo > 0.0 && hi >= lo && count >= 1, "log_grid: need 0 < lo <= hi, count >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  detail::require(hi >= lo && count >= 1, "linear_grid: need lo <= hi, count >= 1");
  std::vector<double> out(count, lo);
  if (count == 1) return out;
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<LossEntry> relative_loss_surface(const std::vector<double>& b_values,
                                             const std::vector<double>& a_grid,
                                             const std::vector<double>& alphas) {
  std::vector<LossEntry> table;
  table.reserve(alphas.size() * b_values.size() * a_grid.size());
  for (double alpha : alphas) {
    const Probability p(alpha);
    for (double b : b_values) {
      detail::require(b > 0.0, "relative_loss_surface: b must be positive");
      for (double a : a_grid) {
        detail::require(a >= 0.0, "relative_loss_surface: a must be >= 0");
        const auto best = ell_star_ab(a, b);
        const double f_alpha = entropy_rate(a, b, ell_alpha_ab(a, b, p).ell);
        table.push_back({alpha, b, a, (best.objective - f_alpha) / best.objective});
      }
    }
  }
  return table;
}

std::vector<double> mean_loss_by_alpha(const std::vector<LossEntry>& table,
                                       const std::vector<double>& alphas) {
  std::vector<double> out;
  for (double alpha : alphas) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& e : table) {
      if (e.alpha == alpha) {
        sum += e.loss;
        ++count;
      }
    }
    out.push_back(count == 0 ? std::nan("") : sum / static_cast<double>(count));
  }
  return out;
}

std::vector<double> max_loss_by_alpha(const std::vector<LossEntry>& table,
                                      const std::vector<double>& alphas) {
  std::vector<double> out;
  for (double alpha : alphas) {
    double worst = std::nan("");
    for (const auto& e : table) {
      if (e.alpha == alpha && !(e.loss <= worst)) worst = e.loss;
    }
    out.push_back(worst);
  }
  return out;
}

void write_bias_csv(std::ostream& out, const BiasCurve& curve) {
  out << "t0,sq_bias_s,sq_bias_m,stderr_s,stderr_m\n" << std::setprecision(17);
  for (const auto& p : curve.points) {
    out << p.t0 << ',' << p.sq_bias_s << ',' << p.sq_bias_m << ',' << p.stderr_s << ','
        << p.stderr_m << '\n';
  }
}

void write_loss_csv(std::ostream& out, const std::vector<LossEntry>& table) {
  out << "alpha,b,a,loss\n" << std::setprecision(17);
  for (const auto& e : table) out << e.alpha << ',' << e.b << ',' << e.a << ',' << e.loss << '\n';
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json strategies = json::array();
  for (const auto& s : cfg.strategies) strategies.push_back(strategy_to_json(s));
  json j{{"name", cfg.name},
         {"target", cfg.target},
         {"n", cfg.n},
         {"window", cfg.window},
         {"t0_grid", cfg.t0_grid},
         {"replicates", cfg.replicates},
         {"strategies", strategies},
         {"init",
          {{"kind", init_kind_name(cfg.init.kind)},
           {"value", cfg.init.value},
           {"mean", cfg.init.mean},
           {"variance", cfg.init.variance}}},
         {"seed", cfg.seed},
         {"common_seed", cfg.common_seed}};
  return j.dump(2);
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.contains("config")) j = j.at("config");
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    cfg.target = j.value("target", cfg.target);
    cfg.n = j.value("n", cfg.n);
    cfg.window = j.value("window", cfg.window);
    cfg.t0_grid = j.value("t0_grid", cfg.t0_grid);
    cfg.replicates = j.value("replicates", cfg.replicates);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.common_seed = j.value("common_seed", cfg.common_seed);
    if (j.contains("strategies")) {
      for (const auto& s : j.at("strategies")) cfg.strategies.push_back(strategy_from_json(s));
    }
    if (j.contains("init")) {
      const auto& init = j.at("init");
      cfg.init.kind = parse_init_kind(init.value("kind", std::string("point")));
      cfg.init.value = init.value("value", cfg.init.value);
      cfg.init.mean = init.value("mean", cfg.init.mean);
      cfg.init.variance = init.value("variance", cfg.init.variance);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir,
                                                    const ExperimentConfig& cfg,
                                                    const SweepResult& result) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  json files = json::array();
  for (const auto& curve : result.curves) {
    std::ostringstream csv;
    write_bias_csv(csv, curve);
    const auto path = dir / (file_stem(cfg.name + "_" + curve.label) + ".csv");
    write_file_atomic(path, csv.str());
    written.push_back(path);
    files.push_back({{"strategy", curve.strategy_spec},
                     {"label", curve.label},
                     {"file", path.filename().string()},
                     {"mean_acc_prob", curve.mean_acc_prob}});
  }
  json manifest{{"tool", "tscale"},
                {"version", TSCALE_VERSION},
                {"config", json::parse(config_to_json(cfg))},
                {"equilibrium",
                 {{"mean", result.equilibrium.mean},
                  {"second_moment", result.equilibrium.second_moment}}},
                {"outputs", files}};
  const auto manifest_path = dir / (file_stem(cfg.name) + ".manifest.json");
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");
  written.push_back(manifest_path);
  return written;
}

}  // namespace tscale
