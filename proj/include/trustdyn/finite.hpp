#ifndef TRUSTDYN_FINITE_HPP_
#define TRUSTDYN_FINITE_HPP_

// Stochastic dynamics in two finite, well-mixed populations (users and
// creators) under pairwise-comparison (Fermi) imitation.
//
// In the limit of rare mutations each population is monomorphic almost
// all the time, so the process reduces to a Markov chain over the
// (user strategy, creator strategy) pairs. A transition changes the
// strategy of exactly one population and happens with probability
// rho / (2 (n - 1)), where rho is the fixation probability of a single
// mutant and n the number of strategies of the mutating population.

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustdyn/game.hpp"
#include "trustdyn/linalg.hpp"

namespace trustdyn {

class DegeneratePopulation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonErgodicChain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FiniteConfig {
  int Z_u = 100;
  int Z_c = 100;
  double beta = 0.1;
  bool trust_enabled = true;

  void validate() const;
};

// AllA, AllN, TFT (+ TUA, DtG when trust strategies are enabled).
std::vector<UserStrategy> user_strategies(bool trust_enabled);

struct MonomorphicState {
  UserStrategy user;
  CreatorStrategy creator;

  std::size_t index() const { return 2 * trustdyn::index(user) + trustdyn::index(creator); }
  std::string label() const;
  friend bool operator==(const MonomorphicState&, const MonomorphicState&) = default;
};

std::vector<MonomorphicState> monomorphic_states(bool trust_enabled);

// Probability that A imitates B: 1 / (1 + exp(-beta (f_B - f_A))).
// Saturates to exactly 0 or 1 once |beta (f_B - f_A)| exceeds 700.
double fermi_probability(double f_A, double f_B, double beta);

// Fixation probability of a single mutant in a population of Z, where
// delta_f(k) = f_mutant - f_resident with k mutants present (1 <= k < Z).
// Evaluated as 1 / sum_{i=0}^{Z-1} exp(-beta sum_{j=1}^{i} delta_f(j)) via
// log-sum-exp.
double fixation_probability(const std::function<double(int)>& delta_f, int Z, double beta);

// Game-specific fixation: a mutant user strategy invading a resident user
// population while creators are fixed at `opponent` (and vice versa).
double fixation_probability(UserStrategy resident, UserStrategy mutant, CreatorStrategy opponent,
                            const PayoffTable& table, const FiniteConfig& cfg);
double fixation_probability(CreatorStrategy resident, CreatorStrategy mutant,
                            UserStrategy opponent, const PayoffTable& table,
                            const FiniteConfig& cfg);

struct MonomorphicChain {
  std::vector<MonomorphicState> states;
  // fixation(i, j): probability that the single mutant leading from state i
  // to state j fixates; zero unless i and j are neighbours.
  DenseMatrix fixation;
  DenseMatrix transition;
  std::vector<double> stationary;
};

MonomorphicChain build_chain(const GameParams& params, const FiniteConfig& cfg);

// Left eigenvector for eigenvalue 1, normalised to sum 1. Direct solve,
// power iteration as fallback. Throws NonErgodicChain if neither works.
std::vector<double> stationary_distribution(const DenseMatrix& transition);

struct ChainMetrics {
  double coop_freq = 0.0;
  double adoption_level = 0.0;
};

ChainMetrics chain_metrics(const MonomorphicChain& chain, const GameParams& params);

struct RiskDominanceRow {
  int row = 0;
  std::string transition;
  std::string condition;
  bool holds = false;
};

std::array<RiskDominanceRow, 11> risk_dominance_report(const GameParams& params);

// Agent-based simulation of imitation with mutation in both populations.
// Each step picks the user or creator population with probability 1/2 and
// a focal agent within it. With probability `mutation_rate` the focal agent
// switches to a uniformly chosen different strategy; otherwise it compares
// itself with a random other member of its population and copies that
// member's strategy with the Fermi probability.
struct McSample {
  std::int64_t step = 0;
  std::array<int, kNumUserStrategies> user_counts{};
  std::array<int, kNumCreatorStrategies> creator_counts{};
};

struct McOptions {
  double mutation_rate = 1e-3;
  std::int64_t steps = 100000;
  std::uint64_t seed = 1;
  std::int64_t record_every = 1;
  MonomorphicState initial{UserStrategy::kAllN, CreatorStrategy::kD};
};

std::vector<McSample> monte_carlo_run(const GameParams& params, const FiniteConfig& cfg,
                                      const McOptions& options);

// Fraction of samples spent in each monomorphic state (indexed like
// monomorphic_states), normalised over monomorphic samples only, together
// with batch-means standard errors over `batches` contiguous blocks.
struct Occupancy {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::int64_t monomorphic_samples = 0;
};

Occupancy monomorphic_occupancy(const std::vector<McSample>& samples, const FiniteConfig& cfg,
                                int batches = 20);

// Repeated single-mutant invasions with no mutation; counts how often the
// mutant takes over.
struct FixationEstimate {
  std::int64_t fixations = 0;
  std::int64_t trials = 0;
  double frequency() const { return trials ? double(fixations) / double(trials) : 0.0; }
  double std_error(double p) const;
};

FixationEstimate simulate_user_fixation(UserStrategy resident, UserStrategy mutant,
                                        CreatorStrategy opponent, const PayoffTable& table,
                                        const FiniteConfig& cfg, std::int64_t trials,
                                        std::uint64_t seed);
FixationEstimate simulate_creator_fixation(CreatorStrategy resident, CreatorStrategy mutant,
                                           UserStrategy opponent, const PayoffTable& table,
                                           const FiniteConfig& cfg, std::int64_t trials,
                                           std::uint64_t seed);

}  // namespace trustdyn

#endif  // TRUSTDYN_FINITE_HPP_
