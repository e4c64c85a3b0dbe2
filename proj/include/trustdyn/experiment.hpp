#ifndef TRUSTDYN_EXPERIMENT_HPP_
#define TRUSTDYN_EXPERIMENT_HPP_

// Glue between configuration, the three dynamics and CSV artifacts. The
// command-line tool is a thin layer over this.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trustdyn/config.hpp"
#include "trustdyn/csv.hpp"
#include "trustdyn/finite.hpp"
#include "trustdyn/qlearning.hpp"
#include "trustdyn/replicator.hpp"

namespace trustdyn {

struct RunConfig {
  GameParams params;
  FiniteConfig finite;
  QConfig q;
  IntegrateOptions integrate;
  Variant variant = Variant::kFive;
  std::optional<ReplicatorState> initial;  // uniform when unset
  std::int64_t mc_steps = 0;               // 0 = no Monte Carlo run
  double mutation_rate = 1e-3;
  std::uint64_t seed = 1;
};

// Non-GameParams keys understood in configuration files.
inline constexpr std::string_view kRunConfigKeys[] = {
    "Z_u",      "Z_c",          "beta",       "trust_enabled", "seed",    "learn_rate",
    "explore_rate", "pop_size", "episodes",   "runs",          "sampled_census", "dt",
    "t_end",    "record_every", "variant",    "mc_steps",      "mutation_rate",  "x0",
    "y0",       "z0",           "w0",         "alpha0"};

bool is_run_config_key(std::string_view key);

// Builds a RunConfig from key=value pairs on top of defaults. Unknown keys
// and malformed values raise ConfigError.
RunConfig run_config_from(const KeyValues& kv);
std::string to_key_values(const RunConfig& cfg);

// Sets a sweepable parameter (GameParams field, Z_u, Z_c or beta).
bool is_sweep_axis(std::string_view name);
void set_axis_value(RunConfig& cfg, std::string_view name, double value);

// ---- single analyses --------------------------------------------------------

struct FinitePoint {
  std::vector<double> stationary;
  ChainMetrics metrics;
};

FinitePoint finite_point(const GameParams& params, const FiniteConfig& cfg);

// Columns: eps, v, trust_enabled, stationary_p0..p9 (p0..p5 without trust
// strategies), coop_freq, adoption_level; extra axis columns follow v.
std::vector<std::string> finite_header(bool trust_enabled,
                                       const std::vector<std::string>& extra_axes = {});
std::vector<std::string> finite_row(const RunConfig& cfg, const FinitePoint& point,
                                    const std::vector<std::string>& extra_axes = {});

CsvWriter occupancy_csv(const MonomorphicChain& chain, const Occupancy& occ);
CsvWriter trajectory_csv(const Trajectory& traj);
CsvWriter equilibrium_csv(const std::vector<EquilibriumRecord>& records, Variant v);
// episode, user_<strategy>..., creator_C, creator_D, creator_coop_fraction.
CsvWriter trace_csv(const LearningTrace& trace);

// Prints the catalog with feasibility, stability and the lemma expectation
// for both variants. Returns the number of lemma disagreements.
int report_equilibria(const GameParams& params, std::ostream& out);

// ---- sweeps -----------------------------------------------------------------

enum class SweepMode { kFinite, kReplicator, kQLearn };
enum class TrustVariants { kBoth, kWith, kWithout };

SweepMode parse_sweep_mode(std::string_view text);
TrustVariants parse_trust_variants(std::string_view text);

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepSpec {
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  SweepMode mode = SweepMode::kFinite;
  TrustVariants trust_variants = TrustVariants::kBoth;
  // Prefix for the emitted files: <prefix>_<kind>.csv and <prefix>.meta.
  std::string output_prefix;

  void validate() const;
};

std::vector<double> linspace(double lo, double hi, int n);
// "a,b,c" or "lo:hi:n".
std::vector<double> parse_value_list(std::string_view text);

// Runs every grid point (axis values sorted ascending, axis1 outermost) on
// up to `threads` workers and writes the CSVs plus a meta file. Returns the
// paths written. On failure everything written so far is removed and the
// exception propagates.
std::vector<std::string> run_sweep(const SweepSpec& spec, const RunConfig& base,
                                   unsigned threads = 0);

}  // namespace trustdyn

#endif  // TRUSTDYN_EXPERIMENT_HPP_
