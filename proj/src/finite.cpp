#include "trustdyn/finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace trustdyn {

void FiniteConfig::validate() const {
  if (Z_u < 2 || Z_c < 2) {
    throw DegeneratePopulation("population sizes must be >= 2 (got Z_u=" + std::to_string(Z_u) +
                               ", Z_c=" + std::to_string(Z_c) + ")");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("selection strength beta must be finite and >= 0");
  }
}

std::vector<UserStrategy> user_strategies(bool trust_enabled) {
  if (trust_enabled) return {kAllUserStrategies.begin(), kAllUserStrategies.end()};
  return {UserStrategy::kAllA, UserStrategy::kAllN, UserStrategy::kTFT};
}

std::string MonomorphicState::label() const {
  return std::string(name(user)) + "-" + std::string(name(creator));
}

std::vector<MonomorphicState> monomorphic_states(bool trust_enabled) {
  std::vector<MonomorphicState> out;
  for (auto u : user_strategies(trust_enabled))
    for (auto cr : kAllCreatorStrategies) out.push_back({u, cr});
  return out;
}

double fermi_probability(double f_A, double f_B, double beta) {
  const double x = beta * (f_B - f_A);
  if (x > 700.0) return 1.0;
  if (x < -700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

double fixation_probability(const std::function<double(int)>& delta_f, int Z, double beta) {
  if (Z < 2) throw DegeneratePopulation("fixation_probability: Z must be >= 2");
  // Terms of the denominator in log space: log_terms[i] = -beta * sum_{j<=i} delta_f(j).
  std::vector<double> log_terms(Z);
  log_terms[0] = 0.0;
  double acc = 0.0;
  for (int i = 1; i < Z; ++i) {
    acc -= beta * delta_f(i);
    log_terms[i] = acc;
  }
  const double top = *std::max_element(log_terms.begin(), log_terms.end());
  double sum = 0.0;
  for (double t : log_terms) sum += std::exp(t - top);
  const double log_rho = -(top + std::log(sum));
  return std::exp(log_rho);
}

double fixation_probability(UserStrategy resident, UserStrategy mutant, CreatorStrategy opponent,
                            const PayoffTable& table, const FiniteConfig& cfg) {
  cfg.validate();
  if (resident == mutant) throw std::invalid_argument("fixation_probability: resident == mutant");
  const int Z = cfg.Z_u;
  const double alpha = opponent == CreatorStrategy::kC ? 1.0 : 0.0;
  auto delta = [&](int k) {
    PopulationMix mix;
    mix.user_freqs[index(mutant)] = double(k) / Z;
    mix.user_freqs[index(resident)] = double(Z - k) / Z;
    mix.creator_coop_freq = alpha;
    const auto f = user_fitness(mix, table);
    return f[index(mutant)] - f[index(resident)];
  };
  return fixation_probability(delta, Z, cfg.beta);
}

double fixation_probability(CreatorStrategy resident, CreatorStrategy mutant,
                            UserStrategy opponent, const PayoffTable& table,
                            const FiniteConfig& cfg) {
  cfg.validate();
  if (resident == mutant) throw std::invalid_argument("fixation_probability: resident == mutant");
  const int Z = cfg.Z_c;
  auto delta = [&](int k) {
    const double mutant_share = double(k) / Z;
    PopulationMix mix = PopulationMix::pure(
        opponent, mutant == CreatorStrategy::kC ? mutant_share : 1.0 - mutant_share);
    const auto f = creator_fitness(mix, table);
    return f[index(mutant)] - f[index(resident)];
  };
  return fixation_probability(delta, Z, cfg.beta);
}

std::vector<double> stationary_distribution(const DenseMatrix& transition) {
  const std::size_t n = transition.rows();
  if (n == 0 || transition.cols() != n) throw std::invalid_argument("stationary: bad matrix");

  auto acceptable = [&](const std::vector<double>& pi) {
    double sum = 0.0;
    for (double p : pi) {
      if (!std::isfinite(p) || p < -1e-12) return false;
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) return false;
    const auto next = left_multiply(pi, transition);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(next[i] - pi[i]) > 1e-10) return false;
    return true;
  };
  auto clean = [](std::vector<double> pi) {
    double sum = 0.0;
    for (double& p : pi) {
      p = std::max(p, 0.0);
      sum += p;
    }
    for (double& p : pi) p /= sum;
    return pi;
  };

  // pi (T - I) = 0 with the last equation replaced by sum(pi) = 1.
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = transition(j, i) - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  std::vector<double> b(n, 0.0);
  b[n - 1] = 1.0;
  try {
    auto pi = clean(solve_linear(a, b));
    if (acceptable(pi)) return pi;
  } catch (const SingularMatrix&) {
  }

  std::vector<double> pi(n, 1.0 / double(n));
  constexpr int kMaxIterations = 200000;
  for (int it = 0; it < kMaxIterations; ++it) {
    auto next = left_multiply(pi, transition);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(next[i] - pi[i]));
    pi = std::move(next);
    if (diff < 1e-14) {
      pi = clean(pi);
      if (acceptable(pi)) return pi;
      break;
    }
  }
  throw NonErgodicChain("stationary distribution could not be determined; chain is not ergodic "
                        "to working precision");
}

MonomorphicChain build_chain(const GameParams& params, const FiniteConfig& cfg) {
  cfg.validate();
  const PayoffTable table = build_payoff_table(params);
  MonomorphicChain chain;
  chain.states = monomorphic_states(cfg.trust_enabled);
  const std::size_t n = chain.states.size();
  const double n_users = double(user_strategies(cfg.trust_enabled).size());
  const double n_creators = double(kNumCreatorStrategies);

  chain.fixation = DenseMatrix(n, n);
  chain.transition = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& from = chain.states[i];
    double off_diagonal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& to = chain.states[j];
      double rho = 0.0;
      double divisor = 0.0;
      if (from.creator == to.creator && from.user != to.user) {
        rho = fixation_probability(from.user, to.user, from.creator, table, cfg);
        divisor = 2.0 * (n_users - 1.0);
      } else if (from.user == to.user && from.creator != to.creator) {
        rho = fixation_probability(from.creator, to.creator, from.user, table, cfg);
        divisor = 2.0 * (n_creators - 1.0);
      } else {
        continue;
      }
      chain.fixation(i, j) = rho;
      chain.transition(i, j) = rho / divisor;
      off_diagonal += chain.transition(i, j);
    }
    chain.transition(i, i) = 1.0 - off_diagonal;
  }
  chain.stationary = stationary_distribution(chain.transition);
  return chain;
}

ChainMetrics chain_metrics(const MonomorphicChain& chain, const GameParams& params) {
  if (chain.stationary.size() != chain.states.size()) {
    throw std::invalid_argument("chain_metrics: stationary size does not match states");
  }
  ChainMetrics m;
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    const auto s = per_state_metrics(chain.states[i].user, chain.states[i].creator, params);
    m.coop_freq += chain.stationary[i] * s.coop_flag;
    m.adoption_level += chain.stationary[i] * s.adoption_rate;
  }
  return m;
}

std::array<RiskDominanceRow, 11> risk_dominance_report(const GameParams& p) {
  const double r = p.r;
  // "b" in the creator rows is the creator's benefit.
  const bool repeated_creator = p.b_c * (1 - r) + r * p.c > p.v;
  return {{
      {1, "(AllA,C)->(AllA,D)", "c > v", p.c > p.v},
      {2, "(AllN,C)->(AllN,D)", "c > 0", p.c > 0},
      {3, "(TFT,C)->(TFT,D)", "b_c(1-r)+rc > v", repeated_creator},
      {4, "(TUA,C)->(TUA,D)", "b_c(1-r)+rc > v", repeated_creator},
      {5, "(DtG,C)->(DtG,D)", "b_c(1-r)+rc > v", repeated_creator},
      {6, "(AllA,C)->(AllN,C)", "b_u > 0", p.b_u > 0},
      {7, "(AllA,C)->(TFT,C)", "eps > 0", p.eps > 0},
      {8, "(TFT,C)->(TUA,C)", "eps[r-(r-theta_T)p_T] < theta_T c",
       p.eps * (r - (r - p.theta_T) * p.p_T) < p.theta_T * p.c},
      {9, "(AllA,D)->(AllN,D)", "mu b_u > 0", p.mu * p.b_u > 0},
      {10, "(AllA,D)->(TFT,D)", "r eps > mu b_u (1-r)", r * p.eps > p.mu * p.b_u * (1 - r)},
      {11, "(TFT,D)->(DtG,D)", "eps[r-(r-theta_D)p_D] < theta_D c",
       p.eps * (r - (r - p.theta_D) * p.p_D) < p.theta_D * p.c},
  }};
}

namespace {

using Rng = std::mt19937_64;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

int uniform_below(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

// Picks a strategy slot proportionally to counts, with `excluded` having
// one fewer member (the focal agent itself).
template <std::size_t N>
std::size_t pick_by_count(const std::array<int, N>& counts, int total, Rng& rng,
                          std::size_t excluded = N) {
  int draw = uniform_below(rng, total);
  for (std::size_t s = 0; s < N; ++s) {
    const int c = counts[s] - (s == excluded ? 1 : 0);
    if (draw < c) return s;
    draw -= c;
  }
  return N - 1;
}

template <std::size_t N>
std::size_t pick_other(const std::vector<std::size_t>& active, std::size_t current, Rng& rng) {
  const int choice = uniform_below(rng, static_cast<int>(active.size()) - 1);
  int seen = 0;
  for (std::size_t s : active) {
    if (s == current) continue;
    if (seen++ == choice) return s;
  }
  return active.back();
}

}  // namespace

std::vector<McSample> monte_carlo_run(const GameParams& params, const FiniteConfig& cfg,
                                      const McOptions& opt) {
  cfg.validate();
  if (!(opt.mutation_rate >= 0.0 && opt.mutation_rate <= 1.0)) {
    throw std::invalid_argument("mutation_rate must lie in [0,1]");
  }
  if (opt.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  const PayoffTable table = build_payoff_table(params);
  std::vector<std::size_t> user_active;
  for (auto u : user_strategies(cfg.trust_enabled)) user_active.push_back(index(u));
  if (std::find(user_active.begin(), user_active.end(), index(opt.initial.user)) ==
      user_active.end()) {
    throw std::invalid_argument("initial user strategy is not enabled");
  }
  const std::vector<std::size_t> creator_active = {0, 1};

  Rng rng(opt.seed);
  McSample cur;
  cur.user_counts[index(opt.initial.user)] = cfg.Z_u;
  cur.creator_counts[index(opt.initial.creator)] = cfg.Z_c;

  std::vector<McSample> out;
  out.reserve(static_cast<std::size_t>(opt.steps / opt.record_every + 1));
  out.push_back(cur);

  for (std::int64_t step = 1; step <= opt.steps; ++step) {
    if (uniform01(rng) < 0.5) {
      auto& counts = cur.user_counts;
      const std::size_t focal = pick_by_count(counts, cfg.Z_u, rng);
      if (uniform01(rng) < opt.mutation_rate) {
        const std::size_t to = pick_other<kNumUserStrategies>(user_active, focal, rng);
        --counts[focal];
        ++counts[to];
      } else {
        const std::size_t model = pick_by_count(counts, cfg.Z_u - 1, rng, focal);
        if (model != focal) {
          PopulationMix mix;
          mix.creator_coop_freq = double(cur.creator_counts[0]) / cfg.Z_c;
          const auto f = user_fitness(mix, table);
          if (uniform01(rng) < fermi_probability(f[focal], f[model], cfg.beta)) {
            --counts[focal];
            ++counts[model];
          }
        }
      }
    } else {
      auto& counts = cur.creator_counts;
      const std::size_t focal = pick_by_count(counts, cfg.Z_c, rng);
      if (uniform01(rng) < opt.mutation_rate) {
        const std::size_t to = pick_other<kNumCreatorStrategies>(creator_active, focal, rng);
        --counts[focal];
        ++counts[to];
      } else {
        const std::size_t model = pick_by_count(counts, cfg.Z_c - 1, rng, focal);
        if (model != focal) {
          PopulationMix mix;
          for (std::size_t s = 0; s < kNumUserStrategies; ++s)
            mix.user_freqs[s] = double(cur.user_counts[s]) / cfg.Z_u;
          const auto f = creator_fitness(mix, table);
          if (uniform01(rng) < fermi_probability(f[focal], f[model], cfg.beta)) {
            --counts[focal];
            ++counts[model];
          }
        }
      }
    }
    if (step % opt.record_every == 0) {
      cur.step = step;
      out.push_back(cur);
    }
  }
  return out;
}

Occupancy monomorphic_occupancy(const std::vector<McSample>& samples, const FiniteConfig& cfg,
                                int batches) {
  if (batches < 2) throw std::invalid_argument("monomorphic_occupancy: need >= 2 batches");
  const auto states = monomorphic_states(cfg.trust_enabled);
  const std::size_t n = states.size();
  auto state_of = [&](const McSample& s) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < n; ++i) {
      if (s.user_counts[index(states[i].user)] == cfg.Z_u &&
          s.creator_counts[index(states[i].creator)] == cfg.Z_c) {
        return static_cast<std::ptrdiff_t>(i);
      }
    }
    return -1;
  };

  Occupancy occ;
  occ.mean.assign(n, 0.0);
  occ.std_error.assign(n, 0.0);
  std::vector<std::vector<double>> batch_counts(batches, std::vector<double>(n, 0.0));
  std::vector<double> batch_totals(batches, 0.0);
  const std::size_t per_batch = std::max<std::size_t>(1, samples.size() / batches);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto s = state_of(samples[k]);
    if (s < 0) continue;
    const std::size_t b = std::min<std::size_t>(k / per_batch, batches - 1);
    batch_counts[b][s] += 1.0;
    batch_totals[b] += 1.0;
    occ.mean[s] += 1.0;
    ++occ.monomorphic_samples;
  }
  if (occ.monomorphic_samples == 0) return occ;
  for (double& m : occ.mean) m /= double(occ.monomorphic_samples);

  int used = 0;
  std::vector<double> sq(n, 0.0);
  for (int b = 0; b < batches; ++b) {
    if (batch_totals[b] == 0.0) continue;
    ++used;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = batch_counts[b][i] / batch_totals[b] - occ.mean[i];
      sq[i] += d * d;
    }
  }
  if (used > 1) {
    for (std::size_t i = 0; i < n; ++i)
      occ.std_error[i] = std::sqrt(sq[i] / double(used - 1) / double(used));
  }
  return occ;
}

double FixationEstimate::std_error(double p) const {
  return trials ? std::sqrt(p * (1.0 - p) / double(trials)) : 0.0;
}

namespace {

// Imitation-only birth-death run of one population from a single mutant.
// gain[k] / lose[k] are the probabilities that a focal/model draw moves the
// mutant count up / down from k.
FixationEstimate simulate_fixation(const std::vector<double>& delta_f, int Z, double beta,
                                   std::int64_t trials, std::uint64_t seed) {
  Rng rng(seed);
  FixationEstimate est;
  est.trials = trials;
  for (std::int64_t t = 0; t < trials; ++t) {
    int k = 1;
    while (k > 0 && k < Z) {
      const bool focal_is_mutant = uniform_below(rng, Z) < k;
      const int mutants_left = focal_is_mutant ? k - 1 : k;
      const bool model_is_mutant = uniform_below(rng, Z - 1) < mutants_left;
      if (focal_is_mutant == model_is_mutant) continue;
      const double df = delta_f[k];
      if (focal_is_mutant) {
        // Mutant (fitness f_res + df) considers copying a resident.
        if (uniform01(rng) < fermi_probability(df, 0.0, beta)) --k;
      } else {
        if (uniform01(rng) < fermi_probability(0.0, df, beta)) ++k;
      }
    }
    if (k == Z) ++est.fixations;
  }
  return est;
}

}  // namespace

FixationEstimate simulate_user_fixation(UserStrategy resident, UserStrategy mutant,
                                        CreatorStrategy opponent, const PayoffTable& table,
                                        const FiniteConfig& cfg, std::int64_t trials,
                                        std::uint64_t seed) {
  cfg.validate();
  const int Z = cfg.Z_u;
  std::vector<double> delta(Z + 1, 0.0);
  for (int k = 1; k < Z; ++k) {
    PopulationMix mix;
    mix.user_freqs[index(mutant)] = double(k) / Z;
    mix.user_freqs[index(resident)] = double(Z - k) / Z;
    mix.creator_coop_freq = opponent == CreatorStrategy::kC ? 1.0 : 0.0;
    const auto f = user_fitness(mix, table);
    delta[k] = f[index(mutant)] - f[index(resident)];
  }
  return simulate_fixation(delta, Z, cfg.beta, trials, seed);
}

FixationEstimate simulate_creator_fixation(CreatorStrategy resident, CreatorStrategy mutant,
                                           UserStrategy opponent, const PayoffTable& table,
                                           const FiniteConfig& cfg, std::int64_t trials,
                                           std::uint64_t seed) {
  cfg.validate();
  const int Z = cfg.Z_c;
  std::vector<double> delta(Z + 1, 0.0);
  for (int k = 1; k < Z; ++k) {
    const double share = double(k) / Z;
    const auto mix =
        PopulationMix::pure(opponent, mutant == CreatorStrategy::kC ? share : 1.0 - share);
    const auto f = creator_fitness(mix, table);
    delta[k] = f[index(mutant)] - f[index(resident)];
  }
  return simulate_fixation(delta, Z, cfg.beta, trials, seed);
}

}  // namespace trustdyn
