#ifndef TRUSTDYN_QLEARNING_HPP_
#define TRUSTDYN_QLEARNING_HPP_

// Two co-adapting populations of stateless Q-learners: users choose among
// the five user strategies, creators between C and D. Each episode pairs
// every user with exactly one creator and both learn from the per-round
// average payoff of the realised strategy pair.

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "trustdyn/game.hpp"

namespace trustdyn {

struct QConfig {
  double learn_rate = 0.05;
  double explore_rate = 0.05;
  int pop_size = 100;
  int creator_pop_size = 100;
  int episodes = 5000;
  int runs = 10;
  std::uint64_t seed = 1;
  // Census of sampled actions instead of greedy ones.
  bool sampled_census = false;

  void validate() const;
};

enum class Role { kUser, kCreator };

struct QAgent {
  Role role = Role::kUser;
  std::vector<double> q_values;

  static QAgent make(Role role);
};

// P(a) = explore/|A| + [a is greedy] (1 - explore)/|greedy|.
std::vector<double> action_probabilities(std::span<const double> q, double explore_rate);

std::size_t select_action(const QAgent& agent, double explore_rate, std::mt19937_64& rng);

// Q(a) += learn_rate (reward - Q(a)). Throws std::invalid_argument on a
// non-finite reward or out-of-range action.
void update_q(QAgent& agent, std::size_t action, double reward, double learn_rate);

// Share of greedy mass per action: ties split equally.
void add_greedy_share(std::span<const double> q, std::span<double> census);

struct LearningTrace {
  // user[e][k], creator[e][k]: fraction of the population on action k after
  // episode e + 1, averaged over runs.
  std::vector<std::array<double, kNumUserStrategies>> user;
  std::vector<std::array<double, kNumCreatorStrategies>> creator;
};

// Called once per pairing with the realised actions and rewards; lets tests
// check the rewards against the payoff table.
struct RewardEvent {
  int run = 0;
  int episode = 0;
  std::size_t user_action = 0;
  std::size_t creator_action = 0;
  double user_reward = 0.0;
  double creator_reward = 0.0;
};
using RewardLogger = std::function<void(const RewardEvent&)>;

// Runs are seeded with seed + run index and executed on up to `threads`
// workers (0 = hardware concurrency); averaging is done in run order so the
// result does not depend on the thread count.
LearningTrace run_experiment(const GameParams& params, const QConfig& cfg,
                             const RewardLogger& logger = {}, unsigned threads = 0);

}  // namespace trustdyn

#endif  // TRUSTDYN_QLEARNING_HPP_
