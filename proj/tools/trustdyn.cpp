// trustdyn: command-line front end for the trust-game dynamics.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "trustdyn/experiment.hpp"

using namespace trustdyn;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kLemmaDisagreement = 4 };

// Options shared by every subcommand: a config file plus one flag per key.
struct CommonOptions {
  std::string config_path;
  std::map<std::string, std::string> flags;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key=value configuration file");
    for (auto key : kGameParamKeys) add_key(app, std::string(key));
    for (auto key : kRunConfigKeys) add_key(app, std::string(key));
  }

  void add_key(CLI::App* app, const std::string& key) {
    app->add_option_function<std::string>(
        "--" + key, [this, key](const std::string& v) { flags[key] = v; },
        "override '" + key + "'");
  }

  // File < TRUSTDYN_SEED < flags.
  RunConfig resolve() const {
    KeyValues kv;
    if (!config_path.empty()) kv = load_key_values(config_path);
    if (const char* env = std::getenv("TRUSTDYN_SEED"); env && *env) kv["seed"] = env;
    for (const auto& [k, v] : flags) kv[k] = v;
    return run_config_from(kv);
  }
};

void print_stationary(const MonomorphicChain& chain, const ChainMetrics& m) {
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    std::cout << "  p" << i << "  " << chain.states[i].label() << "  "
              << format_real(chain.stationary[i]) << "\n";
  }
  std::cout << "coop_freq=" << format_real(m.coop_freq)
            << " adoption_level=" << format_real(m.adoption_level) << "\n";
}

int cmd_finite(const CommonOptions& common, const std::string& out, const std::string& mc_out) {
  const RunConfig cfg = common.resolve();
  const auto chain = build_chain(cfg.params, cfg.finite);
  const auto metrics = chain_metrics(chain, cfg.params);
  print_stationary(chain, metrics);
  if (!out.empty()) {
    CsvWriter w(finite_header(cfg.finite.trust_enabled));
    w.add_row(finite_row(cfg, {chain.stationary, metrics}));
    w.write_file(out);
  }
  if (cfg.mc_steps > 0) {
    McOptions opt;
    opt.steps = cfg.mc_steps;
    opt.seed = cfg.seed;
    opt.mutation_rate = cfg.mutation_rate;
    const auto samples = monte_carlo_run(cfg.params, cfg.finite, opt);
    const auto occ = monomorphic_occupancy(samples, cfg.finite);
    std::cout << "monte carlo (" << cfg.mc_steps << " steps, seed " << cfg.seed << "):\n";
    for (std::size_t i = 0; i < chain.states.size(); ++i) {
      std::cout << "  " << chain.states[i].label() << "  " << format_real(occ.mean[i]) << " +- "
                << format_real(occ.std_error[i]) << "\n";
    }
    if (!mc_out.empty()) occupancy_csv(chain, occ).write_file(mc_out);
  }
  return kOk;
}

int cmd_replicator(const CommonOptions& common, const std::string& out) {
  const RunConfig cfg = common.resolve();
  const auto init = cfg.initial.value_or(ReplicatorState::uniform(cfg.variant));
  const auto traj = integrate(init, cfg.params, cfg.variant, cfg.integrate);
  const auto& s = traj.states.back();
  const auto osc = trailing_alpha_range(traj);
  std::cout << "t=" << format_real(traj.times.back()) << " x=" << format_real(s.x)
            << " y=" << format_real(s.y) << " z=" << format_real(s.z) << " w=" << format_real(s.w)
            << " dtg=" << format_real(s.dtg()) << " alpha=" << format_real(s.alpha) << "\n"
            << "trailing alpha range [" << format_real(osc.alpha_min) << ", "
            << format_real(osc.alpha_max) << "], modal user strategy "
            << name(modal_user_strategy(s, cfg.variant)) << "\n";
  if (!out.empty()) trajectory_csv(traj).write_file(out);
  return kOk;
}

int cmd_qlearn(const CommonOptions& common, const std::string& out, unsigned threads) {
  const RunConfig cfg = common.resolve();
  const auto trace = run_experiment(cfg.params, cfg.q, {}, threads);
  std::cout << "after " << cfg.q.episodes << " episodes (" << cfg.q.runs << " runs):\n";
  for (std::size_t k = 0; k < kNumUserStrategies; ++k) {
    std::cout << "  " << name(kAllUserStrategies[k]) << "  " << format_real(trace.user.back()[k])
              << "\n";
  }
  std::cout << "  creator cooperation  " << format_real(trace.creator.back()[0]) << "\n";
  if (!out.empty()) trace_csv(trace).write_file(out);
  return kOk;
}

int cmd_equilibria(const CommonOptions& common, const std::string& out) {
  const RunConfig cfg = common.resolve();
  const int disagreements = report_equilibria(cfg.params, std::cout);
  if (!out.empty()) {
    for (Variant v : {Variant::kFive, Variant::kThree}) {
      std::vector<EquilibriumRecord> recs;
      for (auto& r : equilibrium_catalog(cfg.params, v))
        recs.push_back(classify_stability(r, cfg.params, v));
      equilibrium_csv(recs, v).write_file(out + "_" + std::string(name(v)) + ".csv");
    }
  }
  return disagreements ? kLemmaDisagreement : kOk;
}

SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  SweepAxis axis;
  axis.name = text.substr(0, eq);
  if (eq == std::string::npos) {
    if (axis.name != "eps") throw ConfigError("axis '" + text + "' needs values (name=list)");
    axis.values = linspace(0.0, 1.0, 21);
  } else {
    axis.values = parse_value_list(std::string_view(text).substr(eq + 1));
  }
  return axis;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolutionary dynamics of user trust and AI creator compliance"};
  app.require_subcommand(1);

  std::string out, mc_out, mode = "finite", trust = "both", axis1, axis2;
  unsigned threads = 0;

  CommonOptions finite_opts, rep_opts, q_opts, eq_opts, sweep_opts;

  auto* finite = app.add_subcommand("finite", "stationary distribution of the small-mutation chain");
  finite_opts.attach(finite);
  finite->add_option("--out", out, "CSV with the stationary distribution");
  finite->add_option("--mc-out", mc_out, "CSV with Monte Carlo occupancy (needs --mc_steps)");

  auto* rep = app.add_subcommand("replicator", "integrate the replicator dynamics");
  rep_opts.attach(rep);
  rep->add_option("--out", out, "trajectory CSV");

  auto* ql = app.add_subcommand("qlearn", "Q-learning populations");
  q_opts.attach(ql);
  ql->add_option("--out", out, "trace CSV");
  ql->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* eq = app.add_subcommand("equilibria", "equilibrium catalog and stability report");
  eq_opts.attach(eq);
  eq->add_option("--out", out, "prefix for <prefix>_five.csv and <prefix>_three.csv");

  auto* sw = app.add_subcommand("sweep", "parameter sweep over one or two axes");
  sweep_opts.attach(sw);
  sw->add_option("--mode", mode, "finite | replicator | qlearn");
  sw->add_option("--axis1", axis1, "name=v1,v2,... or name=lo:hi:n (bare 'eps' = 21 points)")
      ->required();
  sw->add_option("--axis2", axis2, "second axis, same syntax");
  sw->add_option("--trust", trust, "both | with | without (finite mode)");
  sw->add_option("--out", out, "output prefix")->required();
  sw->add_option("--threads", threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (finite->parsed()) return cmd_finite(finite_opts, out, mc_out);
    if (rep->parsed()) return cmd_replicator(rep_opts, out);
    if (ql->parsed()) return cmd_qlearn(q_opts, out, threads);
    if (eq->parsed()) return cmd_equilibria(eq_opts, out);
    SweepSpec spec;
    spec.axis1 = parse_axis(axis1);
    if (!axis2.empty()) spec.axis2 = parse_axis(axis2);
    spec.mode = parse_sweep_mode(mode);
    spec.trust_variants = parse_trust_variants(trust);
    spec.output_prefix = out;
    for (const auto& path : run_sweep(spec, sweep_opts.resolve(), threads))
      std::cout << "wrote " << path << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
