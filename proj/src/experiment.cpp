#include "trustdyn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace trustdyn {

namespace {

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key) + ": expected a boolean, got '" + std::string(text) + "'");
}

int parse_int(std::string_view key, std::string_view text) {
  const long long v = parse_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(std::string(key) + ": out of range");
  return static_cast<int>(v);
}

}  // namespace

bool is_run_config_key(std::string_view key) {
  return std::find(std::begin(kRunConfigKeys), std::end(kRunConfigKeys), key) !=
         std::end(kRunConfigKeys);
}

RunConfig run_config_from(const KeyValues& kv) {
  RunConfig cfg;
  for (const auto& [key, _] : kv) {
    if (!is_game_param_key(key) && !is_run_config_key(key))
      throw ConfigError("unknown configuration key '" + key + "'");
  }
  cfg.params = game_params_from(kv);

  auto get = [&](std::string_view key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto s = get("Z_u")) cfg.finite.Z_u = parse_int("Z_u", *s);
  if (auto s = get("Z_c")) cfg.finite.Z_c = parse_int("Z_c", *s);
  if (auto s = get("beta")) cfg.finite.beta = parse_real("beta", *s);
  if (auto s = get("trust_enabled")) cfg.finite.trust_enabled = parse_bool("trust_enabled", *s);
  if (auto s = get("seed")) {
    const long long seed = parse_integer("seed", *s);
    if (seed < 0) throw ConfigError("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (auto s = get("learn_rate")) cfg.q.learn_rate = parse_real("learn_rate", *s);
  if (auto s = get("explore_rate")) cfg.q.explore_rate = parse_real("explore_rate", *s);
  if (auto s = get("pop_size")) cfg.q.pop_size = cfg.q.creator_pop_size = parse_int("pop_size", *s);
  if (auto s = get("episodes")) cfg.q.episodes = parse_int("episodes", *s);
  if (auto s = get("runs")) cfg.q.runs = parse_int("runs", *s);
  if (auto s = get("sampled_census")) cfg.q.sampled_census = parse_bool("sampled_census", *s);
  if (auto s = get("dt")) cfg.integrate.dt = parse_real("dt", *s);
  if (auto s = get("t_end")) cfg.integrate.t_end = parse_real("t_end", *s);
  if (auto s = get("record_every")) cfg.integrate.record_every = parse_integer("record_every", *s);
  if (auto s = get("variant")) {
    if (*s == "five") cfg.variant = Variant::kFive;
    else if (*s == "three") cfg.variant = Variant::kThree;
    else throw ConfigError("variant must be 'five' or 'three'");
  }
  if (auto s = get("mc_steps")) cfg.mc_steps = parse_integer("mc_steps", *s);
  if (auto s = get("mutation_rate")) cfg.mutation_rate = parse_real("mutation_rate", *s);

  const bool any_initial = get("x0") || get("y0") || get("z0") || get("w0") || get("alpha0");
  if (any_initial) {
    ReplicatorState s = ReplicatorState::uniform(cfg.variant);
    if (auto v = get("x0")) s.x = parse_real("x0", *v);
    if (auto v = get("y0")) s.y = parse_real("y0", *v);
    if (auto v = get("z0")) s.z = parse_real("z0", *v);
    if (auto v = get("w0")) s.w = parse_real("w0", *v);
    if (auto v = get("alpha0")) s.alpha = parse_real("alpha0", *v);
    if (cfg.variant == Variant::kThree && !get("z0")) s.z = 1.0 - s.x - s.y;
    cfg.initial = s;
  }

  cfg.q.seed = cfg.seed;
  try {
    cfg.finite.validate();
    cfg.q.validate();
    if (cfg.initial) cfg.initial->validate(cfg.variant);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.integrate.dt > 0.0) || !(cfg.integrate.t_end >= 0.0) ||
      cfg.integrate.record_every < 1)
    throw ConfigError("need dt > 0, t_end >= 0 and record_every >= 1");
  if (cfg.mc_steps < 0) throw ConfigError("mc_steps must be >= 0");
  if (!(cfg.mutation_rate >= 0.0 && cfg.mutation_rate <= 1.0))
    throw ConfigError("mutation_rate must lie in [0,1]");
  return cfg;
}

std::string to_key_values(const RunConfig& cfg) {
  std::ostringstream os;
  os << to_key_values(cfg.params);
  os << "Z_u=" << cfg.finite.Z_u << "\nZ_c=" << cfg.finite.Z_c
     << "\nbeta=" << format_real(cfg.finite.beta)
     << "\ntrust_enabled=" << (cfg.finite.trust_enabled ? "true" : "false")
     << "\nseed=" << cfg.seed << "\nlearn_rate=" << format_real(cfg.q.learn_rate)
     << "\nexplore_rate=" << format_real(cfg.q.explore_rate) << "\npop_size=" << cfg.q.pop_size
     << "\nepisodes=" << cfg.q.episodes << "\nruns=" << cfg.q.runs
     << "\nsampled_census=" << (cfg.q.sampled_census ? "true" : "false")
     << "\ndt=" << format_real(cfg.integrate.dt) << "\nt_end=" << format_real(cfg.integrate.t_end)
     << "\nrecord_every=" << cfg.integrate.record_every << "\nvariant=" << name(cfg.variant)
     << "\nmc_steps=" << cfg.mc_steps << "\nmutation_rate=" << format_real(cfg.mutation_rate)
     << "\n";
  if (cfg.initial) {
    os << "x0=" << format_real(cfg.initial->x) << "\ny0=" << format_real(cfg.initial->y)
       << "\nz0=" << format_real(cfg.initial->z) << "\nw0=" << format_real(cfg.initial->w)
       << "\nalpha0=" << format_real(cfg.initial->alpha) << "\n";
  }
  return os.str();
}

bool is_sweep_axis(std::string_view name) {
  return is_game_param_key(name) || name == "Z_u" || name == "Z_c" || name == "beta";
}

void set_axis_value(RunConfig& cfg, std::string_view name, double value) {
  if (name == "beta") {
    cfg.finite.beta = value;
  } else if (name == "Z_u" || name == "Z_c") {
    if (value != std::floor(value)) throw ConfigError(std::string(name) + " must be an integer");
    (name == "Z_u" ? cfg.finite.Z_u : cfg.finite.Z_c) = static_cast<int>(value);
  } else if (is_game_param_key(name)) {
    set_game_param(cfg.params, name, format_real(value));
  } else {
    throw ConfigError("cannot sweep over '" + std::string(name) + "'");
  }
}

// ---- single analyses --------------------------------------------------------

FinitePoint finite_point(const GameParams& params, const FiniteConfig& cfg) {
  const auto chain = build_chain(params, cfg);
  return {chain.stationary, chain_metrics(chain, params)};
}

std::vector<std::string> finite_header(bool trust_enabled,
                                       const std::vector<std::string>& extra_axes) {
  std::vector<std::string> h{"eps", "v"};
  h.insert(h.end(), extra_axes.begin(), extra_axes.end());
  h.push_back("trust_enabled");
  const std::size_t n = 2 * user_strategies(trust_enabled).size();
  for (std::size_t i = 0; i < n; ++i) h.push_back("stationary_p" + std::to_string(i));
  h.push_back("coop_freq");
  h.push_back("adoption_level");
  return h;
}

namespace {

double axis_value(const RunConfig& cfg, std::string_view name) {
  if (name == "beta") return cfg.finite.beta;
  if (name == "Z_u") return cfg.finite.Z_u;
  if (name == "Z_c") return cfg.finite.Z_c;
  return get_game_param(cfg.params, name);
}

}  // namespace

std::vector<std::string> finite_row(const RunConfig& cfg, const FinitePoint& point,
                                    const std::vector<std::string>& extra_axes) {
  std::vector<std::string> row{format_real(cfg.params.eps), format_real(cfg.params.v)};
  for (const auto& a : extra_axes) row.push_back(format_real(axis_value(cfg, a)));
  row.push_back(cfg.finite.trust_enabled ? "1" : "0");
  for (double p : point.stationary) row.push_back(format_real(p));
  row.push_back(format_real(point.metrics.coop_freq));
  row.push_back(format_real(point.metrics.adoption_level));
  return row;
}

CsvWriter occupancy_csv(const MonomorphicChain& chain, const Occupancy& occ) {
  CsvWriter w({"state", "label", "stationary", "mc_occupancy", "mc_std_error"});
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    w.add_row({std::to_string(i), chain.states[i].label(), format_real(chain.stationary[i]),
               format_real(occ.mean[i]), format_real(occ.std_error[i])});
  }
  return w;
}

CsvWriter trajectory_csv(const Trajectory& traj) {
  CsvWriter w({"t", "x", "y", "z", "w", "dtg", "alpha"});
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    w.add_row(std::vector<double>{traj.times[i], s.x, s.y, s.z, s.w, s.dtg(), s.alpha});
  }
  return w;
}

CsvWriter equilibrium_csv(const std::vector<EquilibriumRecord>& records, Variant v) {
  std::vector<std::string> header{"label", "member", "x", "y", "z", "w", "alpha",
                                  "feasible", "reason"};
  const std::size_t n = dimension(v);
  for (std::size_t k = 1; k <= n; ++k) {
    header.push_back("eig" + std::to_string(k) + "_re");
    header.push_back("eig" + std::to_string(k) + "_im");
  }
  header.push_back("stability");
  CsvWriter w(header);
  for (const auto& r : records) {
    // Reasons are free text; keep the CSV unquoted.
    std::string reason = r.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::vector<std::string> row{r.label,
                                 r.member,
                                 format_real(r.coords.x),
                                 format_real(r.coords.y),
                                 format_real(r.coords.z),
                                 format_real(r.coords.w),
                                 format_real(r.coords.alpha),
                                 r.feasible ? "1" : "0",
                                 reason};
    for (std::size_t k = 0; k < n; ++k) {
      if (k < r.eigenvalues.size()) {
        row.push_back(format_real(r.eigenvalues[k].real()));
        row.push_back(format_real(r.eigenvalues[k].imag()));
      } else {
        row.push_back("");
        row.push_back("");
      }
    }
    row.push_back(std::string(name(r.stability)));
    w.add_row(std::move(row));
  }
  return w;
}

CsvWriter trace_csv(const LearningTrace& trace) {
  std::vector<std::string> header{"episode"};
  for (auto s : kAllUserStrategies) header.push_back("user_" + std::string(name(s)));
  for (auto s : kAllCreatorStrategies) header.push_back("creator_" + std::string(name(s)));
  header.push_back("creator_coop_fraction");
  CsvWriter w(header);
  for (std::size_t e = 0; e < trace.user.size(); ++e) {
    std::vector<std::string> row{std::to_string(e + 1)};
    for (double f : trace.user[e]) row.push_back(format_real(f));
    for (double f : trace.creator[e]) row.push_back(format_real(f));
    row.push_back(format_real(trace.creator[e][index(CreatorStrategy::kC)]));
    w.add_row(std::move(row));
  }
  return w;
}

int report_equilibria(const GameParams& params, std::ostream& out) {
  int disagreements = 0;
  for (Variant v : {Variant::kFive, Variant::kThree}) {
    const auto lemma = v == Variant::kFive ? five_strategy_lemma_check(params)
                                           : three_strategy_lemma_check(params);
    out << (v == Variant::kFive ? "five-strategy system (x, y, z, w, alpha)"
                                : "three-strategy system (x, y, alpha)")
        << "\n";
    out << std::left << std::setw(6) << "point" << std::setw(8) << "member" << std::setw(10)
        << "feasible" << std::setw(22) << "stability" << "notes\n";
    for (auto rec : equilibrium_catalog(params, v)) {
      rec = classify_stability(rec, params, v);
      std::string notes;
      for (const auto& l : lemma) {
        if (l.label != rec.label) continue;
        notes += "lemma: stable iff " + l.condition + " -> expected " +
                 (l.expected_stable ? "stable" : "not stable");
        if (!l.agrees()) {
          notes += " [DISAGREES]";
          ++disagreements;
        }
      }
      if ((rec.label == "p9" || rec.label == "q6") && rec.stability == Stability::kStable)
        notes += "; desirable equilibrium";
      if (!rec.feasible) notes += (notes.empty() ? "" : "; ") + rec.reason;
      out << std::left << std::setw(6) << rec.label << std::setw(8)
          << (rec.member.empty() ? "-" : rec.member) << std::setw(10)
          << (rec.feasible ? "yes" : "no") << std::setw(22) << name(rec.stability) << notes
          << "\n";
    }
    out << "\n";
  }
  out << "lemma disagreements: " << disagreements << "\n";
  return disagreements;
}

// ---- sweeps -----------------------------------------------------------------

SweepMode parse_sweep_mode(std::string_view text) {
  if (text == "finite") return SweepMode::kFinite;
  if (text == "replicator") return SweepMode::kReplicator;
  if (text == "qlearn") return SweepMode::kQLearn;
  throw ConfigError("unknown sweep mode '" + std::string(text) + "'");
}

TrustVariants parse_trust_variants(std::string_view text) {
  if (text == "both") return TrustVariants::kBoth;
  if (text == "with") return TrustVariants::kWith;
  if (text == "without") return TrustVariants::kWithout;
  throw ConfigError("trust variants must be both, with or without");
}

void SweepSpec::validate() const {
  auto check = [](const SweepAxis& a) {
    if (!is_sweep_axis(a.name)) throw ConfigError("unknown sweep parameter '" + a.name + "'");
    if (a.values.empty()) throw ConfigError("sweep axis '" + a.name + "' has no values");
  };
  check(axis1);
  if (axis2) {
    check(*axis2);
    if (axis2->name == axis1.name) throw ConfigError("sweep axes must differ");
  }
  if (output_prefix.empty()) throw ConfigError("sweep needs an output prefix");
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("linspace needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / double(n - 1);
  out.back() = hi;
  return out;
}

std::vector<double> parse_value_list(std::string_view text) {
  if (text.empty()) return {};
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos) throw ConfigError("range must be lo:hi:n");
    return linspace(parse_real("range", text.substr(0, a)),
                    parse_real("range", text.substr(a + 1, b - a - 1)),
                    static_cast<int>(parse_integer("range", text.substr(b + 1))));
  }
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    out.push_back(parse_real("value list", text.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

namespace {

struct GridPoint {
  double a1 = 0.0;
  std::optional<double> a2;
};

std::vector<std::string> axis_header(const SweepSpec& spec) {
  std::vector<std::string> h{spec.axis1.name};
  if (spec.axis2) h.push_back(spec.axis2->name);
  return h;
}

// Extra columns for finite sweeps: axes that are not eps or v.
std::vector<std::string> extra_axes(const SweepSpec& spec) {
  std::vector<std::string> out;
  for (const auto& n : axis_header(spec))
    if (n != "eps" && n != "v") out.push_back(n);
  return out;
}

RunConfig at_point(const SweepSpec& spec, RunConfig cfg, const GridPoint& p) {
  set_axis_value(cfg, spec.axis1.name, p.a1);
  if (spec.axis2) set_axis_value(cfg, spec.axis2->name, *p.a2);
  try {
    cfg.params.validate();
    cfg.finite.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, unsigned threads, Fn fn) {
  std::vector<Result> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string mode_name(SweepMode m) {
  switch (m) {
    case SweepMode::kFinite: return "finite";
    case SweepMode::kReplicator: return "replicator";
    case SweepMode::kQLearn: return "qlearn";
  }
  return "?";
}

std::string values_text(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + format_real(values[i]);
  return s;
}

}  // namespace

std::vector<std::string> run_sweep(const SweepSpec& spec_in, const RunConfig& base,
                                   unsigned threads) {
  SweepSpec spec = spec_in;
  spec.validate();
  std::sort(spec.axis1.values.begin(), spec.axis1.values.end());
  if (spec.axis2) std::sort(spec.axis2->values.begin(), spec.axis2->values.end());

  std::vector<GridPoint> grid;
  for (double a : spec.axis1.values) {
    if (!spec.axis2) {
      grid.push_back({a, std::nullopt});
    } else {
      for (double b : spec.axis2->values) grid.push_back({a, b});
    }
  }
  // Fail on bad axis values before any work is done.
  for (const auto& p : grid) at_point(spec, base, p);

  std::vector<std::pair<std::string, CsvWriter>> outputs;
  const auto prefix = spec.output_prefix;

  if (spec.mode == SweepMode::kFinite) {
    std::vector<bool> variants;
    if (spec.trust_variants != TrustVariants::kWithout) variants.push_back(true);
    if (spec.trust_variants != TrustVariants::kWith) variants.push_back(false);
    const auto extra = extra_axes(spec);
    std::vector<std::vector<FinitePoint>> results;
    for (bool trust : variants) {
      CsvWriter w(finite_header(trust, extra));
      auto points = parallel_map<FinitePoint>(grid.size(), threads, [&](std::size_t i) {
        RunConfig cfg = at_point(spec, base, grid[i]);
        cfg.finite.trust_enabled = trust;
        return finite_point(cfg.params, cfg.finite);
      });
      for (std::size_t i = 0; i < grid.size(); ++i) {
        RunConfig cfg = at_point(spec, base, grid[i]);
        cfg.finite.trust_enabled = trust;
        w.add_row(finite_row(cfg, points[i], extra));
      }
      outputs.emplace_back(prefix + (trust ? "_with_trust.csv" : "_without_trust.csv"),
                           std::move(w));
      results.push_back(std::move(points));
    }
    if (variants.size() == 2) {
      std::vector<std::string> h{"eps", "v"};
      h.insert(h.end(), extra.begin(), extra.end());
      for (const char* c : {"adoption_with_trust", "adoption_without_trust", "adoption_diff"})
        h.push_back(c);
      CsvWriter w(h);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const RunConfig cfg = at_point(spec, base, grid[i]);
        const double with = results[0][i].metrics.adoption_level;
        const double without = results[1][i].metrics.adoption_level;
        std::vector<double> row{cfg.params.eps, cfg.params.v};
        for (const auto& a : extra) row.push_back(axis_value(cfg, a));
        row.insert(row.end(), {with, without, with - without});
        w.add_row(row);
      }
      outputs.emplace_back(prefix + "_adoption_diff.csv", std::move(w));
    }
  } else if (spec.mode == SweepMode::kReplicator) {
    auto h = axis_header(spec);
    for (const char* c : {"x", "y", "z", "w", "dtg", "alpha", "alpha_min", "alpha_max",
                          "modal_user"})
      h.push_back(c);
    CsvWriter w(h);
    auto trajs = parallel_map<Trajectory>(grid.size(), threads, [&](std::size_t i) {
      const RunConfig cfg = at_point(spec, base, grid[i]);
      const auto init = cfg.initial.value_or(ReplicatorState::uniform(cfg.variant));
      return integrate(init, cfg.params, cfg.variant, cfg.integrate);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& s = trajs[i].states.back();
      const auto osc = trailing_alpha_range(trajs[i]);
      std::vector<std::string> row{format_real(grid[i].a1)};
      if (grid[i].a2) row.push_back(format_real(*grid[i].a2));
      for (double q : {s.x, s.y, s.z, s.w, s.dtg(), s.alpha, osc.alpha_min, osc.alpha_max})
        row.push_back(format_real(q));
      row.push_back(std::string(name(modal_user_strategy(s, trajs[i].variant))));
      w.add_row(std::move(row));
    }
    outputs.emplace_back(prefix + "_replicator.csv", std::move(w));
  } else {
    auto h = axis_header(spec);
    for (auto s : kAllUserStrategies) h.push_back("user_" + std::string(name(s)));
    for (auto s : kAllCreatorStrategies) h.push_back("creator_" + std::string(name(s)));
    h.push_back("creator_coop_fraction");
    CsvWriter w(h);
    auto traces = parallel_map<LearningTrace>(grid.size(), threads, [&](std::size_t i) {
      const RunConfig cfg = at_point(spec, base, grid[i]);
      return run_experiment(cfg.params, cfg.q, {}, 1);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> row{grid[i].a1};
      if (grid[i].a2) row.push_back(*grid[i].a2);
      for (double f : traces[i].user.back()) row.push_back(f);
      for (double f : traces[i].creator.back()) row.push_back(f);
      row.push_back(traces[i].creator.back()[index(CreatorStrategy::kC)]);
      w.add_row(row);
    }
    outputs.emplace_back(prefix + "_qlearn.csv", std::move(w));
  }

  std::vector<std::string> written;
  try {
    const auto parent = std::filesystem::path(prefix).parent_path();
    if (!parent.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(parent, ec);
      if (ec) throw OutputError("cannot create " + parent.string() + ": " + ec.message());
    }
    for (const auto& [path, writer] : outputs) {
      written.push_back(path);
      writer.write_file(path);
    }
    const std::string meta = prefix + ".meta";
    written.push_back(meta);
    std::ofstream m(meta, std::ios::binary);
    m << "# sweep metadata\n"
      << "created=" << utc_timestamp() << "\n"
      << "mode=" << mode_name(spec.mode) << "\n"
      << "axis1=" << spec.axis1.name << "\n"
      << "axis1_values=" << values_text(spec.axis1.values) << "\n";
    if (spec.axis2) {
      m << "axis2=" << spec.axis2->name << "\n"
        << "axis2_values=" << values_text(spec.axis2->values) << "\n";
    }
    for (std::size_t i = 0; i < outputs.size(); ++i)
      m << "file" << i + 1 << "=" << std::filesystem::path(outputs[i].first).filename().string()
        << "\n";
    m << to_key_values(base);
    m.flush();
    if (!m) throw OutputError("cannot write " + meta);
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
  return written;
}

}  // namespace trustdyn
