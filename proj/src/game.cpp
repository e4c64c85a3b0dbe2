#include "trustdyn/game.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace trustdyn {

namespace {

constexpr std::array<std::string_view, kNumUserStrategies> kUserNames = {
    "AllA", "AllN", "TFT", "TUA", "DtG"};
constexpr std::array<std::string_view, kNumCreatorStrategies> kCreatorNames = {"C", "D"};

void require(bool ok, const char* what) {
  if (!ok) throw InvalidParams(std::string("invalid parameters: ") + what);
}

}  // namespace

std::string_view name(UserStrategy s) { return kUserNames[index(s)]; }
std::string_view name(CreatorStrategy s) { return kCreatorNames[index(s)]; }

UserStrategy parse_user_strategy(std::string_view text) {
  for (auto s : kAllUserStrategies) {
    if (name(s) == text) return s;
  }
  throw std::invalid_argument("unknown user strategy: " + std::string(text));
}

void GameParams::validate() const {
  require(std::isfinite(b_u) && std::isfinite(b_c) && std::isfinite(c) && std::isfinite(v) &&
              std::isfinite(mu) && std::isfinite(eps) && std::isfinite(p_T) &&
              std::isfinite(p_D),
          "all values must be finite");
  require(mu <= 1.0, "mu must be <= 1");
  require(p_T >= 0.0 && p_T <= 1.0, "p_T must lie in [0,1]");
  require(p_D >= 0.0 && p_D <= 1.0, "p_D must lie in [0,1]");
  require(r >= 1, "r must be >= 1");
  require(theta_T >= 0 && theta_T <= r, "theta_T must lie in [0,r]");
  require(theta_D >= 0 && theta_D <= r, "theta_D must lie in [0,r]");
  require(eps >= 0.0, "eps must be >= 0");
  require(c >= 0.0, "c must be >= 0");
  require(v >= 0.0, "v must be >= 0");
}

double GameParams::tua_monitoring() const {
  return (theta_T * eps + (r - theta_T) * p_T * eps) / r;
}

double GameParams::dtg_monitoring() const {
  return (theta_D * eps + (r - theta_D) * p_D * eps) / r;
}

PayoffTable build_payoff_table(const GameParams& params) {
  params.validate();
  const double r = params.r;
  const double unsafe_conditional = params.mu * params.b_u / r;
  const double creator_exposed = (params.b_c - params.v) / r;

  PayoffTable t;
  t.params = params;
  t.user_payoff = {{
      {params.b_u, params.mu * params.b_u},
      {0.0, 0.0},
      {params.b_u - params.eps, unsafe_conditional - params.eps},
      {params.b_u - params.tua_monitoring(), unsafe_conditional - params.eps},
      {params.b_u - params.eps, unsafe_conditional - params.dtg_monitoring()},
  }};
  t.creator_payoff = {{
      {params.b_c - params.c, params.b_c - params.v},
      {-params.c, 0.0},
      {params.b_c - params.c, creator_exposed},
      {params.b_c - params.c, creator_exposed},
      {params.b_c - params.c, creator_exposed},
  }};
  return t;
}

PopulationMix PopulationMix::from_xyzw(double x, double y, double z, double w, double alpha) {
  PopulationMix m;
  m.user_freqs = {x, y, z, w, 1.0 - x - y - z - w};
  m.creator_coop_freq = alpha;
  return m;
}

PopulationMix PopulationMix::pure(UserStrategy u, double alpha) {
  PopulationMix m;
  m.user_freqs[index(u)] = 1.0;
  m.creator_coop_freq = alpha;
  return m;
}

void PopulationMix::validate(double tol) const {
  double sum = 0.0;
  for (double f : user_freqs) {
    if (!(f >= -tol && f <= 1.0 + tol)) {
      std::ostringstream os;
      os << "user frequency " << f << " outside [0,1]";
      throw std::invalid_argument(os.str());
    }
    sum += f;
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << "user frequencies sum to " << sum << ", expected 1";
    throw std::invalid_argument(os.str());
  }
  if (!(creator_coop_freq >= -tol && creator_coop_freq <= 1.0 + tol)) {
    throw std::invalid_argument("creator cooperation frequency outside [0,1]");
  }
}

std::array<double, kNumUserStrategies> user_fitness(const PopulationMix& mix,
                                                    const PayoffTable& table) {
  const double a = mix.alpha();
  std::array<double, kNumUserStrategies> f{};
  for (std::size_t i = 0; i < kNumUserStrategies; ++i) {
    f[i] = a * table.user_payoff[i][0] + (1.0 - a) * table.user_payoff[i][1];
  }
  return f;
}

std::array<double, kNumCreatorStrategies> creator_fitness(const PopulationMix& mix,
                                                          const PayoffTable& table) {
  std::array<double, kNumCreatorStrategies> f{};
  for (std::size_t j = 0; j < kNumCreatorStrategies; ++j) {
    for (std::size_t i = 0; i < kNumUserStrategies; ++i) {
      f[j] += mix.user_freqs[i] * table.creator_payoff[i][j];
    }
  }
  return f;
}

namespace {

// Ordered pair key: 5*first + second.
constexpr int pair_key(UserStrategy a, UserStrategy b) {
  return 5 * static_cast<int>(a) + static_cast<int>(b);
}

// The ten printed forms with first listed before second in strategy order.
double user_difference_ordered(UserStrategy a, UserStrategy b, double alpha,
                               const GameParams& p) {
  using U = UserStrategy;
  const double r = p.r;
  const double bu = p.b_u;
  const double mu = p.mu;
  const double eps = p.eps;
  const double mt = p.tua_monitoring();
  const double md = p.dtg_monitoring();
  switch (pair_key(a, b)) {
    case pair_key(U::kAllA, U::kAllN):
      return alpha * bu + (1 - alpha) * mu * bu;
    case pair_key(U::kAllA, U::kTFT):
      return alpha * eps + (1 - alpha) * (mu * bu - mu * bu / r + eps);
    case pair_key(U::kAllA, U::kTUA):
      return alpha * mt + (1 - alpha) * (mu * bu - mu * bu / r + eps);
    case pair_key(U::kAllA, U::kDtG):
      return alpha * eps + (1 - alpha) * (mu * bu - mu * bu / r + md);
    case pair_key(U::kAllN, U::kTFT):
      return -alpha * (bu - eps) - (1 - alpha) * (mu * bu / r - eps);
    case pair_key(U::kAllN, U::kTUA):
      return -alpha * (bu - mt) - (1 - alpha) * (mu * bu / r - eps);
    case pair_key(U::kAllN, U::kDtG):
      return -alpha * (bu - eps) - (1 - alpha) * (mu * bu / r - md);
    case pair_key(U::kTFT, U::kTUA):
      return alpha * mt;
    case pair_key(U::kTFT, U::kDtG):
      return (1 - alpha) * (-eps + md);
    case pair_key(U::kTUA, U::kDtG):
      return alpha * (eps - mt) + (1 - alpha) * (md - eps);
    default:
      break;
  }
  throw UnsupportedPair("no closed form for this user strategy pair");
}

}  // namespace

double fitness_difference_closed_form(UserStrategy first, UserStrategy second,
                                      const PopulationMix& mix, const GameParams& params) {
  if (first == second) return 0.0;
  if (index(first) < index(second)) {
    return user_difference_ordered(first, second, mix.alpha(), params);
  }
  return -user_difference_ordered(second, first, mix.alpha(), params);
}

double fitness_difference_closed_form(CreatorStrategy first, CreatorStrategy second,
                                      const PopulationMix& mix, const GameParams& params) {
  if (first == second) return 0.0;
  const double x = mix.x();
  const double y = mix.y();
  const double bc = params.b_c;
  const double diff = (bc * (1 - y) - params.c) -
                      (x * (bc - params.v) + (1 - x - y) * (bc - params.v) / params.r);
  return first == CreatorStrategy::kC ? diff : -diff;
}

StateMetrics per_state_metrics(UserStrategy u, CreatorStrategy cr, const GameParams& params) {
  StateMetrics m;
  m.coop_flag = cr == CreatorStrategy::kC ? 1 : 0;
  switch (u) {
    case UserStrategy::kAllA:
      m.adoption_rate = 1.0;
      break;
    case UserStrategy::kAllN:
      m.adoption_rate = 0.0;
      break;
    default:
      m.adoption_rate = cr == CreatorStrategy::kC ? 1.0 : 1.0 / params.r;
      break;
  }
  return m;
}

}  // namespace trustdyn
