#include "trustdyn/qlearning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace trustdyn {

void QConfig::validate() const {
  if (!(learn_rate >= 0.0 && learn_rate <= 1.0))
    throw std::invalid_argument("learn_rate must lie in [0,1]");
  if (!(explore_rate >= 0.0 && explore_rate <= 1.0))
    throw std::invalid_argument("explore_rate must lie in [0,1]");
  if (pop_size < 1) throw std::invalid_argument("pop_size must be >= 1");
  if (creator_pop_size != pop_size)
    throw std::invalid_argument("user and creator populations must have equal size");
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
}

QAgent QAgent::make(Role role) {
  QAgent a;
  a.role = role;
  a.q_values.assign(role == Role::kUser ? kNumUserStrategies : kNumCreatorStrategies, 0.0);
  return a;
}

std::vector<double> action_probabilities(std::span<const double> q, double explore_rate) {
  const double best = *std::max_element(q.begin(), q.end());
  const auto ties = std::count(q.begin(), q.end(), best);
  const double n = double(q.size());
  std::vector<double> p(q.size());
  for (std::size_t a = 0; a < q.size(); ++a) {
    p[a] = explore_rate / n + (q[a] == best ? (1.0 - explore_rate) / double(ties) : 0.0);
  }
  return p;
}

std::size_t select_action(const QAgent& agent, double explore_rate, std::mt19937_64& rng) {
  const auto p = action_probabilities(agent.q_values, explore_rate);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    acc += p[a];
    if (u < acc) return a;
  }
  return p.size() - 1;
}

void update_q(QAgent& agent, std::size_t action, double reward, double learn_rate) {
  if (!std::isfinite(reward)) throw std::invalid_argument("update_q: non-finite reward");
  if (action >= agent.q_values.size()) throw std::invalid_argument("update_q: bad action");
  double& q = agent.q_values[action];
  q += learn_rate * (reward - q);
}

void add_greedy_share(std::span<const double> q, std::span<double> census) {
  const double best = *std::max_element(q.begin(), q.end());
  const auto ties = std::count(q.begin(), q.end(), best);
  for (std::size_t a = 0; a < q.size(); ++a)
    if (q[a] == best) census[a] += 1.0 / double(ties);
}

namespace {

LearningTrace single_run(const PayoffTable& table, const QConfig& cfg, int run,
                         const RewardLogger& logger) {
  std::mt19937_64 rng(cfg.seed + std::uint64_t(run));
  const int n = cfg.pop_size;
  std::vector<QAgent> users(n, QAgent::make(Role::kUser));
  std::vector<QAgent> creators(n, QAgent::make(Role::kCreator));
  std::vector<int> partner(n);
  std::iota(partner.begin(), partner.end(), 0);
  std::vector<std::size_t> ua(n), ca(n);

  LearningTrace trace;
  trace.user.resize(cfg.episodes);
  trace.creator.resize(cfg.episodes);
  for (int e = 0; e < cfg.episodes; ++e) {
    std::shuffle(partner.begin(), partner.end(), rng);
    for (int i = 0; i < n; ++i) ua[i] = select_action(users[i], cfg.explore_rate, rng);
    for (int j = 0; j < n; ++j) ca[j] = select_action(creators[j], cfg.explore_rate, rng);
    for (int i = 0; i < n; ++i) {
      const int j = partner[i];
      const double ru = table.user_payoff[ua[i]][ca[j]];
      const double rc = table.creator_payoff[ua[i]][ca[j]];
      update_q(users[i], ua[i], ru, cfg.learn_rate);
      update_q(creators[j], ca[j], rc, cfg.learn_rate);
      if (logger) logger({run, e, ua[i], ca[j], ru, rc});
    }
    auto& uc = trace.user[e];
    auto& cc = trace.creator[e];
    for (int i = 0; i < n; ++i) {
      if (cfg.sampled_census) {
        uc[ua[i]] += 1.0;
        cc[ca[i]] += 1.0;
      } else {
        add_greedy_share(users[i].q_values, uc);
        add_greedy_share(creators[i].q_values, cc);
      }
    }
    for (double& f : uc) f /= n;
    for (double& f : cc) f /= n;
  }
  return trace;
}

}  // namespace

LearningTrace run_experiment(const GameParams& params, const QConfig& cfg,
                             const RewardLogger& logger, unsigned threads) {
  cfg.validate();
  const PayoffTable table = build_payoff_table(params);
  std::vector<LearningTrace> per_run(cfg.runs);

  // The logger is not assumed thread-safe.
  if (logger) threads = 1;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, unsigned(cfg.runs));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(cfg.runs);
  auto worker = [&] {
    for (int k = next++; k < cfg.runs; k = next++) {
      try {
        per_run[k] = single_run(table, cfg, k, logger);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  LearningTrace avg;
  avg.user.resize(cfg.episodes);
  avg.creator.resize(cfg.episodes);
  for (const auto& tr : per_run) {
    for (int e = 0; e < cfg.episodes; ++e) {
      for (std::size_t k = 0; k < kNumUserStrategies; ++k) avg.user[e][k] += tr.user[e][k];
      for (std::size_t k = 0; k < kNumCreatorStrategies; ++k)
        avg.creator[e][k] += tr.creator[e][k];
    }
  }
  for (int e = 0; e < cfg.episodes; ++e) {
    for (double& f : avg.user[e]) f /= cfg.runs;
    for (double& f : avg.creator[e]) f /= cfg.runs;
  }
  return avg;
}

}  // namespace trustdyn
