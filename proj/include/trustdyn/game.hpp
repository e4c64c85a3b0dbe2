#ifndef TRUSTDYN_GAME_HPP_
#define TRUSTDYN_GAME_HPP_

// Repeated user/creator trust game: parameters, payoff matrix and fitness.
//
// Users pick one of five strategies (AllA, AllN, TFT, TUA, DtG), creators
// pick C (safe) or D (unsafe). Every payoff is the per-round average over
// the r rounds of the repeated game.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trustdyn {

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedPair : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class UserStrategy : int { kAllA = 0, kAllN = 1, kTFT = 2, kTUA = 3, kDtG = 4 };
enum class CreatorStrategy : int { kC = 0, kD = 1 };

inline constexpr std::size_t kNumUserStrategies = 5;
inline constexpr std::size_t kNumCreatorStrategies = 2;

inline constexpr std::array<UserStrategy, kNumUserStrategies> kAllUserStrategies = {
    UserStrategy::kAllA, UserStrategy::kAllN, UserStrategy::kTFT,
    UserStrategy::kTUA, UserStrategy::kDtG};
inline constexpr std::array<CreatorStrategy, kNumCreatorStrategies> kAllCreatorStrategies = {
    CreatorStrategy::kC, CreatorStrategy::kD};

constexpr std::size_t index(UserStrategy s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index(CreatorStrategy s) { return static_cast<std::size_t>(s); }

std::string_view name(UserStrategy s);
std::string_view name(CreatorStrategy s);
UserStrategy parse_user_strategy(std::string_view text);

struct GameParams {
  double b_u = 4.0;
  double b_c = 4.0;
  double c = 0.5;
  double v = 0.1;
  double mu = -0.2;
  double eps = 0.1;
  double p_T = 0.25;
  double p_D = 0.25;
  int theta_T = 3;
  int theta_D = 3;
  int r = 10;

  // Throws InvalidParams naming the first violated constraint.
  void validate() const;

  // Expected monitoring cost per round for TUA (resp. DtG) once the
  // threshold phase is over: (theta*eps + (r - theta)*p*eps) / r.
  double tua_monitoring() const;
  double dtg_monitoring() const;
};

// 5x2 per-round-average payoffs, rows in UserStrategy order, columns C, D.
struct PayoffTable {
  using Matrix = std::array<std::array<double, kNumCreatorStrategies>, kNumUserStrategies>;

  Matrix user_payoff{};
  Matrix creator_payoff{};
  GameParams params;

  double user(UserStrategy u, CreatorStrategy cr) const {
    return user_payoff[index(u)][index(cr)];
  }
  double creator(UserStrategy u, CreatorStrategy cr) const {
    return creator_payoff[index(u)][index(cr)];
  }
};

PayoffTable build_payoff_table(const GameParams& params);

// Frequencies of AllA, AllN, TFT, TUA, DtG in the user population and the
// fraction of cooperating (C) creators.
struct PopulationMix {
  std::array<double, kNumUserStrategies> user_freqs{};
  double creator_coop_freq = 0.0;

  static PopulationMix from_xyzw(double x, double y, double z, double w, double alpha);
  static PopulationMix pure(UserStrategy u, double alpha);

  double x() const { return user_freqs[0]; }
  double y() const { return user_freqs[1]; }
  double z() const { return user_freqs[2]; }
  double w() const { return user_freqs[3]; }
  double alpha() const { return creator_coop_freq; }

  // Throws std::invalid_argument if frequencies leave [0,1] or do not sum to 1.
  void validate(double tol = 1e-12) const;
};

std::array<double, kNumUserStrategies> user_fitness(const PopulationMix& mix,
                                                    const PayoffTable& table);
std::array<double, kNumCreatorStrategies> creator_fitness(const PopulationMix& mix,
                                                          const PayoffTable& table);

// Transcribed closed forms f_first - f_second. Both strategies must belong
// to the same population; use the CreatorStrategy overload for C vs D.
double fitness_difference_closed_form(UserStrategy first, UserStrategy second,
                                      const PopulationMix& mix, const GameParams& params);
double fitness_difference_closed_form(CreatorStrategy first, CreatorStrategy second,
                                      const PopulationMix& mix, const GameParams& params);

struct StateMetrics {
  double adoption_rate = 0.0;
  int coop_flag = 0;
};

// Fraction of the r rounds in which the user adopts, and whether the creator
// is safe. Conditional strategies facing D adopt in the first round only.
StateMetrics per_state_metrics(UserStrategy u, CreatorStrategy cr, const GameParams& params);

}  // namespace trustdyn

#endif  // TRUSTDYN_GAME_HPP_
