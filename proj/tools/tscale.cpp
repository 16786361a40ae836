// tscale command-line tool: tune, simulate, experiment, validate.
//
// Exit codes: 0 success, 1 validation failure, 2 usage or configuration error.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tscale/chains.hpp"
#include "tscale/error.hpp"
#include "tscale/experiments.hpp"
#include "tscale/limits.hpp"
#include "tscale/tuning.hpp"
#include "tscale/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tscale;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::uint64_t parse_count(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid " + what + " '" + text + "'");
  }
  if (used != text.size() || !(value >= 1.0) || value != std::floor(value) || value > 1e15) {
    throw ConfigError(what + " must be a positive integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(value);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  try {
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid " + what + " '" + text + "'");
}

InitSpec parse_init(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw ConfigError("empty --init");
  InitSpec init;
  if (parts[0] == "point" && parts.size() == 2) {
    init.kind = InitKind::point;
    init.value = parse_double(parts[1], "initial point");
  } else if (parts[0] == "gaussian" && parts.size() == 3) {
    init.kind = InitKind::gaussian;
    init.mean = parse_double(parts[1], "initial mean");
    init.variance = parse_double(parts[2], "initial variance");
    if (init.variance < 0.0) throw ConfigError("initial variance must be >= 0");
  } else if (parts[0] == "stationary" && parts.size() == 1) {
    init.kind = InitKind::stationary;
  } else {
    throw ConfigError("malformed --init '" + text +
                      "' (expected point:X, gaussian:MEAN:VAR or stationary)");
  }
  return init;
}

// Output files are first rendered in memory; nothing touches --out until the
// whole run succeeded.
struct PendingOutputs {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents

  void add(std::string name, std::string contents) {
    files.emplace_back(std::move(name), std::move(contents));
  }

  json commit(const fs::path& dir, const json& command, std::uint64_t seed) const {
    fs::create_directories(dir);
    json names = json::array();
    for (const auto& [name, contents] : files) {
      write_file_atomic(dir / name, contents);
      names.push_back(name);
    }
    json run{{"tool", "tscale"},
             {"version", TSCALE_VERSION},
             {"command", command},
             {"seed", seed},
             {"wall_clock_utc", utc_now()},
             {"out_dir", fs::absolute(dir).string()},
             {"outputs", names}};
    write_file_atomic(dir / "run.json", run.dump(2) + "\n");
    return run;
  }
};

// ---------------------------------------------------------------- tune

struct TuneArgs {
  std::string mode = "star";
  std::vector<double> s_values;
  std::string s_grid;
  double a = std::nan("");
  double b = std::nan("");
  double m = 0.0;
  double alpha = 0.234;
  std::string out;
};

int cmd_tune(const TuneArgs& args) {
  if (args.mode != "star" && args.mode != "alpha" && args.mode != "ent") {
    throw ConfigError("--mode must be star, alpha or ent");
  }
  std::vector<double> s_values = args.s_values;
  if (!args.s_grid.empty()) {
    const auto parts = split(args.s_grid, ':');
    if (parts.size() != 3) throw ConfigError("--s-grid expects LO:HI:COUNT");
    const auto grid = log_grid(parse_double(parts[0], "grid start"),
                               parse_double(parts[1], "grid end"),
                               parse_count(parts[2], "grid size"));
    s_values.insert(s_values.end(), grid.begin(), grid.end());
  }
  const bool have_ab = !std::isnan(args.a) || !std::isnan(args.b);
  if (have_ab && (std::isnan(args.a) || std::isnan(args.b))) {
    throw ConfigError("--a and --b must be given together");
  }
  if (have_ab && args.mode == "ent") throw ConfigError("--mode ent takes --m and --s, not --a/--b");
  if (!have_ab && s_values.empty()) throw ConfigError("give --s, --s-grid or --a/--b");

  std::ostringstream table;
  table << std::setprecision(12);
  if (have_ab) {
    table << "a,b,ell,objective,converged\n";
    const auto r = args.mode == "star" ? ell_star_ab(args.a, args.b)
                                       : ell_alpha_ab(args.a, args.b, Probability(args.alpha));
    table << args.a << ',' << args.b << ',' << r.ell << ',' << r.objective << ','
          << (r.converged ? "true" : "false") << '\n';
  } else {
    table << (args.mode == "ent" ? "m,s,ell,objective,converged\n" : "s,ell,objective,converged\n");
    for (double s : s_values) {
      TuningResult r;
      if (args.mode == "star") {
        r = ell_star(s);
      } else if (args.mode == "alpha") {
        r = ell_alpha(s, Probability(args.alpha));
      } else {
        r = ell_ent_gaussian(args.m, s);
        table << args.m << ',';
      }
      table << s << ',' << r.ell << ',' << r.objective << ',' << (r.converged ? "true" : "false")
            << '\n';
    }
  }
  std::cout << table.str();
  if (!args.out.empty()) {
    PendingOutputs pending;
    pending.add("tune_" + args.mode + ".csv", table.str());
    pending.commit(args.out,
                   {{"subcommand", "tune"},
                    {"mode", args.mode},
                    {"s", s_values},
                    {"a", have_ab ? json(args.a) : json()},
                    {"b", have_ab ? json(args.b) : json()},
                    {"m", args.m},
                    {"alpha", args.alpha}},
                   0);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string kind = "rwm";
  std::string target = "gaussian";
  std::size_t n = 100;
  std::string steps = "10000";
  std::string strategy = "constant:2.38";
  std::uint64_t seed = 1;
  std::string init = "stationary";
  double ell = 1.0;
  double sigma = 0.0;
  double m0 = 10.0;
  double s0 = 100.0;
  double dt = 1e-3;
  double t_end = 40.0;
  std::size_t particles = 10000;
  std::uint64_t record_every = 1;
  std::string out = "tscale-out";
};

std::vector<double> initial_state(const SimulateArgs& args, const InitSpec& init) {
  std::vector<double> xs(args.n);
  const CounterRng rng = CounterRng(args.seed).child(0);
  for (std::size_t i = 0; i < args.n; ++i) {
    switch (init.kind) {
      case InitKind::point: xs[i] = init.value; break;
      case InitKind::gaussian: xs[i] = init.mean + std::sqrt(init.variance) * rng.normal(i, 0); break;
      case InitKind::stationary: xs[i] = rng.normal(i, 0); break;
    }
  }
  return xs;
}

std::string trace_csv(const MomentTrace& trace, std::uint64_t every) {
  std::ostringstream out;
  out << "k,mean,second_moment\n" << std::setprecision(17);
  for (std::size_t k = 0; k < trace.mean.size(); ++k) {
    if (every == 0 || k % every == 0 || k + 1 == trace.mean.size()) {
      out << k << ',' << trace.mean[k] << ',' << trace.second_moment[k] << '\n';
    }
  }
  return out.str();
}

int cmd_simulate(const SimulateArgs& args) {
  // Resolve and validate everything before any output is produced.
  const Potential target = Potential::by_name(args.target);
  const Strategy strategy = Strategy::parse(args.strategy);
  const InitSpec init = parse_init(args.init);
  const std::uint64_t steps = parse_count(args.steps, "--steps");
  if (init.kind == InitKind::stationary && args.target != "gaussian") {
    throw ConfigError("--init stationary is only available for the gaussian target");
  }
  if (args.n < 1) throw ConfigError("--n must be at least 1");
  if (!(args.dt > 0.0)) throw ConfigError("--dt must be positive");

  json command{{"subcommand", "simulate"}, {"kind", args.kind},       {"target", args.target},
               {"n", args.n},              {"steps", steps},          {"strategy", strategy.spec()},
               {"seed", args.seed},        {"init", args.init},       {"ell", args.ell},
               {"sigma", args.sigma},      {"m0", args.m0},           {"s0", args.s0},
               {"dt", args.dt},            {"t_end", args.t_end},     {"particles", args.particles},
               {"record_every", args.record_every}};
  PendingOutputs pending;

  if (args.kind == "rwm") {
    const auto run = run_chain(initial_state(args, init), target, strategy, steps,
                               args.record_every, args.seed);
    std::ostringstream records;
    write_step_records_csv(records, run.records);
    pending.add("rwm_steps.csv", records.str());
    pending.add("rwm_moments.csv", trace_csv(run.trace, args.record_every));
    std::cout << "mean acceptance probability " << run.mean_acc_prob << '\n';
  } else if (args.kind == "mala") {
    const double sigma =
        args.sigma > 0.0 ? args.sigma : args.ell / std::pow(static_cast<double>(args.n), 0.25);
    command["sigma"] = sigma;
    ChainState state(initial_state(args, init), args.seed);
    const auto run = run_mala_chain(std::move(state), target, sigma, steps, args.record_every);
    std::ostringstream records;
    write_step_records_csv(records, run.records);
    pending.add("mala_steps.csv", records.str());
    pending.add("mala_moments.csv", trace_csv(run.trace, args.record_every));
    std::cout << "sigma " << sigma << ", accepted fraction "
              << static_cast<double>(run.accepted) / static_cast<double>(steps) << '\n';
  } else if (args.kind == "ode") {
    if (args.target != "gaussian") throw ConfigError("--kind ode requires --target gaussian");
    if (!(args.s0 >= args.m0 * args.m0)) throw ConfigError("--s0 must be >= m0^2");
    const auto traj = integrate_gaussian_ode({args.m0, args.s0, 0.0}, strategy, args.dt,
                                             args.t_end, args.record_every);
    std::ostringstream csv;
    write_limit_csv(csv, traj);
    pending.add("ode.csv", csv.str());
    std::cout << std::setprecision(10) << "final t=" << traj.back().t << " m=" << traj.back().m
              << " s=" << traj.back().s << " H=" << traj.back().entropy << '\n';
  } else if (args.kind == "particles") {
    if (strategy.is_adaptive()) throw ConfigError("--kind particles does not support adaptive strategies");
    ParticleEnsemble pe;
    switch (init.kind) {
      case InitKind::point:
        pe = gaussian_ensemble(args.particles, init.value, 0.0, args.dt, args.seed);
        break;
      case InitKind::gaussian:
        pe = gaussian_ensemble(args.particles, init.mean, init.variance, args.dt, args.seed);
        break;
      case InitKind::stationary:
        pe = gaussian_ensemble(args.particles, 0.0, 1.0, args.dt, args.seed);
        break;
    }
    std::ostringstream csv;
    csv << "t,mean,second_moment,ell_used\n" << std::setprecision(17);
    auto emit = [&](double ell) {
      double m = 0.0, s = 0.0;
      for (double x : pe.xs) {
        m += x;
        s += x * x;
      }
      const double inv = 1.0 / static_cast<double>(pe.xs.size());
      csv << pe.t << ',' << m * inv << ',' << s * inv << ',' << ell << '\n';
    };
    emit(0.0);
    for (std::uint64_t k = 1; k <= steps; ++k) {
      const auto mom = coordinate_moments(target, pe.xs);
      const double ell = choose_ell(strategy, mom, 1, 0.0);
      meanfield_particle_step(pe, target, ell);
      if (args.record_every != 0 && (k % args.record_every == 0 || k == steps)) emit(ell);
    }
    pending.add("particles.csv", csv.str());
  } else if (args.kind == "ar1") {
    const auto ys = mala_ar1_limit(args.ell, steps, 0.0, CounterRng(args.seed));
    double sum = 0.0, sum2 = 0.0;
    for (double y : ys) {
      sum += y;
      sum2 += y * y;
    }
    const double count = static_cast<double>(ys.size());
    const double var = sum2 / count - (sum / count) * (sum / count);
    std::ostringstream csv;
    csv << "k,y\n" << std::setprecision(17);
    for (std::size_t k = 0; k < ys.size(); ++k) {
      if (args.record_every != 0 && k % args.record_every == 0) csv << k << ',' << ys[k] << '\n';
    }
    pending.add("ar1.csv", csv.str());
    std::cout << std::setprecision(8) << "sample variance " << var << " (stationary "
              << 1.0 / (1.0 - args.ell * args.ell / 4.0) << ")\n";
  } else {
    throw ConfigError("unknown --kind '" + args.kind + "' (expected rwm, mala, ode, particles or ar1)");
  }
  pending.commit(args.out, command, args.seed);
  return kExitOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string preset;
  std::string scenario = "all";
  std::string config;
  std::string out = "tscale-out";
  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_experiment(const ExperimentArgs& args) {
  if (args.preset.empty() == args.config.empty()) {
    throw ConfigError("give exactly one of --preset or --config");
  }
  std::vector<ExperimentConfig> configs;
  bool loss_surface = false;
  if (!args.config.empty()) {
    configs.push_back(config_from_json(read_file(args.config)));
  } else {
    std::vector<std::string> scenarios;
    if (args.scenario == "all") {
      scenarios = preset_scenarios();
      loss_surface = true;
    } else if (args.scenario == "loss-surface") {
      loss_surface = true;
    } else {
      scenarios.push_back(args.scenario);
    }
    for (const auto& s : scenarios) configs.push_back(experiment_preset(s, args.preset));
  }
  for (auto& cfg : configs) {
    if (args.seed_given) cfg.seed = args.seed;
    cfg.threads = args.threads;
    cfg.validate();
  }

  json outputs = json::array();
  for (const auto& cfg : configs) {
    const auto start = std::chrono::steady_clock::now();
    const auto result = square_bias_sweep(cfg);
    for (const auto& path : write_experiment(args.out, cfg, result)) {
      outputs.push_back(path.filename().string());
    }
    std::cout << cfg.name << ": " << cfg.strategies.size() << " strategies x " << cfg.replicates
              << " replicates in "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
              << " s\n";
  }
  if (loss_surface) {
    const std::vector<double> alphas{0.27, 0.35, 0.37};
    const auto table = relative_loss_surface({0.1, 1.0, 10.0}, log_grid(1e-2, 1e2, 41), alphas);
    std::ostringstream csv;
    write_loss_csv(csv, table);
    fs::create_directories(args.out);
    write_file_atomic(fs::path(args.out) / "loss_surface.csv", csv.str());
    outputs.push_back("loss_surface.csv");
    const auto means = mean_loss_by_alpha(
        relative_loss_surface({0.1, 1.0, 10.0}, linear_grid(1e-2, 1e2, 401), alphas), alphas);
    const auto worst = max_loss_by_alpha(table, alphas);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      std::cout << "relative loss alpha=" << alphas[i] << ": mean " << means[i] << ", max "
                << worst[i] << '\n';
    }
  }
  json run{{"tool", "tscale"},
           {"version", TSCALE_VERSION},
           {"command",
            {{"subcommand", "experiment"},
             {"preset", args.preset},
             {"scenario", args.scenario},
             {"config", args.config},
             {"threads", args.threads}}},
           {"wall_clock_utc", utc_now()},
           {"out_dir", fs::absolute(args.out).string()},
           {"outputs", outputs}};
  if (loss_surface) {
    run["loss_surface"] = {{"a_grid", "log-spaced, 41 points on [0.01, 100]"},
                           {"b_values", {0.1, 1.0, 10.0}},
                           {"alphas", {0.27, 0.35, 0.37}}};
  }
  write_file_atomic(fs::path(args.out) / "run.json", run.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const std::string& samples_text, std::uint64_t seed) {
  const auto samples = parse_count(samples_text, "--samples");
  if (samples < 100) throw ConfigError("--samples must be at least 100");
  const auto results = run_validation_suite(samples, seed);
  return print_report(std::cout, results) ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal scaling of Metropolis chains out of equilibrium: tuning rules, "
               "simulators and experiments"};
  app.set_version_flag("--version", std::string("tscale ") + TSCALE_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Compute step scales l*, l^alpha or l^ent");
  tune_cmd->add_option("--mode", tune.mode, "star | alpha | ent");
  tune_cmd->add_option("--s", tune.s_values, "Moment ratio(s) s = a/b (second moment for ent)")
      ->delimiter(',');
  tune_cmd->add_option("--s-grid", tune.s_grid, "Log-spaced grid LO:HI:COUNT of s values");
  tune_cmd->add_option("--a", tune.a, "E[(V')^2] (with --b)");
  tune_cmd->add_option("--b", tune.b, "E[V''] (with --a)");
  tune_cmd->add_option("--m", tune.m, "Mean, for --mode ent");
  tune_cmd->add_option("--alpha", tune.alpha, "Target acceptance rate, for --mode alpha");
  tune_cmd->add_option("--out", tune.out, "Directory for the table and run.json (optional)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a chain, limit ODE, particle system or AR(1)");
  sim_cmd->add_option("--kind", sim.kind, "rwm | mala | ode | particles | ar1");
  sim_cmd->add_option("--target", sim.target, "gaussian | double-well");
  sim_cmd->add_option("--n", sim.n, "Dimension (rwm, mala)");
  sim_cmd->add_option("--steps", sim.steps, "Number of steps (rwm, mala, particles, ar1)");
  sim_cmd->add_option("--strategy", sim.strategy,
                      "constant:L | alpha:A | adaptive:A[:EXP] | star | ent | cap:L");
  sim_cmd->add_option("--seed", sim.seed, "Master seed");
  sim_cmd->add_option("--init", sim.init, "point:X | gaussian:MEAN:VAR | stationary");
  sim_cmd->add_option("--ell", sim.ell, "l for ar1; l in sigma = l n^(-1/4) for mala");
  sim_cmd->add_option("--sigma", sim.sigma, "MALA proposal scale (overrides --ell when > 0)");
  sim_cmd->add_option("--m0", sim.m0, "Initial mean (ode)");
  sim_cmd->add_option("--s0", sim.s0, "Initial second moment (ode)");
  sim_cmd->add_option("--dt", sim.dt, "Time step (ode, particles)");
  sim_cmd->add_option("--t-end", sim.t_end, "Final time (ode)");
  sim_cmd->add_option("--particles", sim.particles, "Ensemble size (particles)");
  sim_cmd->add_option("--record-every", sim.record_every, "Output cadence in steps");
  sim_cmd->add_option("--out", sim.out, "Output directory");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Square-bias sweeps and the relative-loss surface");
  exp_cmd->add_option("--preset", exp.preset, "desk | paper");
  exp_cmd->add_option("--scenario", exp.scenario,
                      "all | gaussian-0 | gaussian-10 | double-well-10 | double-well-gauss | "
                      "loss-surface");
  exp_cmd->add_option("--config", exp.config, "JSON config or manifest to run instead of a preset");
  exp_cmd->add_option("--out", exp.out, "Output directory");
  exp_cmd->add_option("--threads", exp.threads, "Worker threads (0 = all logical cores)");
  auto* seed_opt = exp_cmd->add_option("--seed", exp.seed, "Override the master seed");

  std::string samples = "10000000";
  std::uint64_t validate_seed = 12345;
  auto* val_cmd = app.add_subcommand("validate", "Run identity checks and the Monte Carlo oracle");
  val_cmd->add_option("--samples", samples, "Oracle samples per (a, b, l) triple, e.g. 1e5");
  val_cmd->add_option("--seed", validate_seed, "Oracle seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*tune_cmd) return cmd_tune(tune);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*exp_cmd) {
      exp.seed_given = seed_opt->count() > 0;
      return cmd_experiment(exp);
    }
    if (*val_cmd) return cmd_validate(samples, validate_seed);
  } catch (const std::invalid_argument& e) {  // ConfigError
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
