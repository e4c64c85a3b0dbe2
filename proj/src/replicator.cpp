#include "trustdyn/replicator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace trustdyn {

std::size_t dimension(Variant v) { return v == Variant::kFive ? 5 : 3; }

std::string_view name(Variant v) { return v == Variant::kFive ? "five" : "three"; }

std::string_view name(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kDegenerateNonstable: return "degenerate-nonstable";
    case Stability::kInfeasible: return "infeasible";
    case Stability::kUnclassified: break;
  }
  return "unclassified";
}

ReplicatorState ReplicatorState::uniform(Variant v) {
  if (v == Variant::kFive) return {0.2, 0.2, 0.2, 0.2, 0.5};
  return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.5};
}

ReplicatorState ReplicatorState::from_coords(std::span<const double> c, Variant v) {
  if (c.size() != dimension(v)) throw std::invalid_argument("from_coords: wrong dimension");
  if (v == Variant::kFive) return {c[0], c[1], c[2], c[3], c[4]};
  return {c[0], c[1], 1.0 - c[0] - c[1], 0.0, c[2]};
}

std::vector<double> ReplicatorState::coords(Variant v) const {
  if (v == Variant::kFive) return {x, y, z, w, alpha};
  return {x, y, alpha};
}

void ReplicatorState::validate(Variant v, double tol) const {
  auto check = [&](double value, const char* what) {
    if (!std::isfinite(value) || value < -tol || value > 1.0 + tol) {
      std::ostringstream os;
      os << "state off simplex: " << what << " = " << value;
      throw OffSimplex(os.str());
    }
  };
  check(x, "x");
  check(y, "y");
  check(z, "z");
  check(w, "w");
  check(dtg(), "1-x-y-z-w");
  check(alpha, "alpha");
  if (v == Variant::kThree && (std::abs(w) > tol || std::abs(dtg()) > tol)) {
    throw OffSimplex("three-strategy state must have w = 0 and x + y + z = 1");
  }
}

std::vector<double> rhs_raw(std::span<const double> c, const PayoffTable& table, Variant v) {
  const auto s = ReplicatorState::from_coords(c, v);
  const auto mix = s.mix();
  const auto fu = user_fitness(mix, table);
  const auto fc = creator_fitness(mix, table);
  const double alpha_dot = s.alpha * (1.0 - s.alpha) * (fc[0] - fc[1]);
  if (v == Variant::kFive) {
    double mean = 0.0;
    for (std::size_t i = 0; i < kNumUserStrategies; ++i) mean += mix.user_freqs[i] * fu[i];
    return {s.x * (fu[0] - mean), s.y * (fu[1] - mean), s.z * (fu[2] - mean),
            s.w * (fu[3] - mean), alpha_dot};
  }
  const double mean = s.x * fu[0] + s.y * fu[1] + s.z * fu[2];
  return {s.x * (fu[0] - mean), s.y * (fu[1] - mean), alpha_dot};
}

std::vector<double> rhs(const ReplicatorState& state, const GameParams& params, Variant v) {
  state.validate(v);
  return rhs_raw(state.coords(v), build_payoff_table(params), v);
}

std::vector<double> rhs_explicit(const ReplicatorState& s, const GameParams& p, Variant v) {
  s.validate(v);
  p.validate();
  const double x = s.x, y = s.y, z = s.z, w = s.w, a = s.alpha;
  const double bu = p.b_u, bc = p.b_c, c = p.c, vv = p.v, mu = p.mu, eps = p.eps;
  const double pT = p.p_T, pD = p.p_D, tT = p.theta_T, tD = p.theta_D, r = p.r;

  const double alpha_dot =
      (a - 1) * a * (bc * (r - 1) * (x + y - 1) + c * r + vv * (-r * x + x + y - 1)) / r;

  if (v == Variant::kThree) {
    const double dx = x * ((a - 1) * bu * mu * ((r - 1) * (x - 1) - y) / r + a * bu * y -
                           eps * (x + y - 1));
    const double dy = y * (-(a - 1) * bu * mu * (-r * x + x + y - 1) / r + a * bu * (y - 1) -
                           eps * (x + y - 1));
    return {dx, dy, alpha_dot};
  }

  const double s4 = w + x + y + z - 1;
  // Shared pieces of the x and y equations (minus the mean fitness).
  const double benefit = -(a - 1) * bu * mu * (-r * x + x + y - 1) / r + a * bu * (y - 1);
  const double monitoring =
      eps *
      (-r * (a + a * (pT - 2) * w + w - a * (x + y + z) + z) + a * tT * (pT - 1) * w -
       (a - 1) * pD * (r - tD) * s4 - (a - 1) * tD * s4) /
      r;

  const double dx = x * (bu * (a * (-mu) + a + mu) + benefit - monitoring);
  const double dy = y * (benefit - monitoring);
  const double dz =
      (z * (-(a - 1) * bu * mu * (-r * x + x + y) + a * bu * r * y +
            eps * (r * (a + a * (pT - 2) * w + (a - 1) * pD * s4 + w - a * (x + y + z) + z - 1) -
                   a * tT * (pT - 1) * w - (a - 1) * tD * (pD - 1) * s4))) /
      r;
  const double dw =
      (w * (-(a - 1) * bu * mu * (-r * x + x + y) + a * bu * r * y +
            eps * (r * (a * (pT - 2) * w - a * (pT + x + y + z - 2) + (a - 1) * pD * s4 + w + z -
                        1) -
                   a * tT * (pT - 1) * (w - 1) - (a - 1) * tD * (pD - 1) * s4))) /
      r;
  return {dx, dy, dz, dw, alpha_dot};
}

namespace {

void project(std::vector<double>& c, Variant v) {
  const std::size_t n = c.size();
  // Users: all coordinates but the last, plus the implied remainder.
  std::vector<double> users(c.begin(), c.end() - 1);
  users.push_back(1.0 - std::accumulate(users.begin(), users.end(), 0.0));
  double sum = 0.0;
  for (double& u : users) {
    if (u < 0.0) u = 0.0;
    sum += u;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) c[i] = users[i] / sum;
  c[n - 1] = std::clamp(c[n - 1], 0.0, 1.0);
  (void)v;
}

void check_blow_up(const std::vector<double>& c, double t) {
  for (double value : c) {
    if (!std::isfinite(value) || std::abs(value) > 2.0) {
      std::ostringstream os;
      os << "integration blew up at t=" << t << " (coordinate " << value << ")";
      throw IntegrationBlowUp(os.str());
    }
  }
}

}  // namespace

Trajectory integrate(const ReplicatorState& initial, const GameParams& params, Variant v,
                     const IntegrateOptions& opt) {
  if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw std::invalid_argument("dt must be > 0");
  if (!(opt.t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  if (opt.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  initial.validate(v);
  const PayoffTable table = build_payoff_table(params);
  const std::size_t n = dimension(v);

  Trajectory traj;
  traj.params = params;
  traj.variant = v;
  std::vector<double> y = initial.coords(v);
  traj.times.push_back(0.0);
  traj.states.push_back(ReplicatorState::from_coords(y, v));

  const auto steps = static_cast<std::int64_t>(std::llround(opt.t_end / opt.dt));
  std::vector<double> tmp(n);
  auto axpy = [&](const std::vector<double>& base, const std::vector<double>& k, double h) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = base[i] + h * k[i];
    return tmp;
  };
  const double dt = opt.dt;
  for (std::int64_t step = 1; step <= steps; ++step) {
    const auto k1 = rhs_raw(y, table, v);
    const auto k2 = rhs_raw(axpy(y, k1, dt / 2), table, v);
    const auto k3 = rhs_raw(axpy(y, k2, dt / 2), table, v);
    const auto k4 = rhs_raw(axpy(y, k3, dt), table, v);
    for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    const double t = double(step) * dt;
    check_blow_up(y, t);
    project(y, v);
    if (step % opt.record_every == 0 || step == steps) {
      traj.times.push_back(t);
      traj.states.push_back(ReplicatorState::from_coords(y, v));
    }
  }
  return traj;
}

OscillationSummary trailing_alpha_range(const Trajectory& traj, double trailing_fraction) {
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
  const double t_end = traj.times.back();
  const double t_start = t_end * (1.0 - trailing_fraction);
  OscillationSummary s{1.0, 0.0};
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (traj.times[i] < t_start) continue;
    s.alpha_min = std::min(s.alpha_min, traj.states[i].alpha);
    s.alpha_max = std::max(s.alpha_max, traj.states[i].alpha);
  }
  return s;
}

UserStrategy modal_user_strategy(const ReplicatorState& s, Variant v) {
  const auto f = s.mix().user_freqs;
  const std::size_t n = v == Variant::kFive ? kNumUserStrategies : 3;
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (f[i] > f[best]) best = i;
  return kAllUserStrategies[best];
}

// ---------------------------------------------------------------------------
// Equilibria

namespace {

bool in_cube(const ReplicatorState& s) {
  const double vals[] = {s.x, s.y, s.z, s.w, s.dtg(), s.alpha};
  return std::all_of(std::begin(vals), std::end(vals), [](double q) {
    return std::isfinite(q) && q >= -1e-12 && q <= 1.0 + 1e-12;
  });
}

EquilibriumRecord make(std::string label, ReplicatorState coords, bool feasible,
                       std::string reason) {
  EquilibriumRecord r;
  r.label = std::move(label);
  r.coords = coords;
  r.feasible = feasible;
  r.reason = std::move(reason);
  r.in_unit_cube = in_cube(coords);
  r.stability = feasible ? Stability::kUnclassified : Stability::kInfeasible;
  return r;
}

std::string fmt(double value) {
  std::ostringstream os;
  os.precision(6);
  os << value;
  return os.str();
}

std::vector<EquilibriumRecord> five_strategy_catalog(const GameParams& p) {
  const double bu = p.b_u, bc = p.b_c, c = p.c, v = p.v, mu = p.mu, eps = p.eps;
  const double pT = p.p_T, pD = p.p_D, tT = p.theta_T, tD = p.theta_D, r = p.r;
  std::vector<EquilibriumRecord> out;
  const std::string always = "exists for all parameter values";

  for (double wv : {0.0, 0.5, 1.0}) {
    auto rec = make("p1", {0, 0, 1 - wv, wv, 0}, true, always);
    rec.set_descriptor = "x=0,y=0,z=1-w,w in [0;1],alpha=0";
    rec.member = "w=" + fmt(wv);
    out.push_back(std::move(rec));
  }
  for (double zv : {0.0, 0.5, 1.0}) {
    auto rec = make("p2", {0, 0, zv, 0, 1}, true, always);
    rec.set_descriptor = "x=0,y=0,z in [0;1],w=0,alpha=1";
    rec.member = "z=" + fmt(zv);
    out.push_back(std::move(rec));
  }
  out.push_back(make("p3", {0, 0, 1, 0, 0}, true, always));
  out.push_back(make("p4", {0, 1, 0, 0, 0}, true, always));
  out.push_back(make("p5", {1, 0, 0, 0, 0}, true, always));
  out.push_back(make("p6", {0, 0, 0, 1, 0}, true, always));
  out.push_back(make("p7", {0, 0, 0, 0, 0}, true, always));
  out.push_back(make("p8", {0, 1, 0, 0, 1}, true, always));
  out.push_back(make("p9", {1, 0, 0, 0, 1}, true, always));
  out.push_back(make("p10", {0, 0, 0, 1, 1}, true, always));
  out.push_back(make("p11", {0, 0, 0, 0, 1}, true, always));

  {
    const bool ok = 0 <= c && c <= v && mu < 0 && v > 0;
    out.push_back(make("p12", {c / v, (v - c) / v, 0, 0, mu / (mu - 1)}, ok,
                       ok ? "0 <= c <= v and mu < 0" : "requires 0 <= c <= v and mu < 0"));
  }
  const double denom = bc * r - bc + v;
  const double y_share = (bc * r - bc - c * r + v) / denom;
  {
    const bool ok = 0 <= c * r && c * r <= denom && mu / r <= eps / bu && eps / bu <= 1;
    out.push_back(make("p13",
                       {0, y_share, c * r / denom, 0, (r * eps - bu * mu) / (bu * (r - mu))}, ok,
                       ok ? "0 <= cr <= b_c r - b_c + v and mu/r <= eps/b_u <= 1"
                          : "requires 0 <= cr <= b_c r - b_c + v and mu/r <= eps/b_u <= 1"));
  }
  {
    const double num = -bu * mu + pD * r * eps - tD * pD * eps + tD * eps;
    const double den = -bu * mu + bu * r + pD * r * eps - tD * pD * eps - r * eps + tD * eps;
    const bool ok =
        0 <= c * r && c * r <= denom && bu * mu <= eps * (pD * r + (1 - pD) * tD);
    out.push_back(make("p14", {0, y_share, 0, 0, num / den}, ok,
                       ok ? "0 <= cr <= b_c r - b_c + v and b_u mu <= eps[p_D r + (1-p_D) theta_D]"
                          : "requires 0 <= cr <= b_c r - b_c + v and "
                            "b_u mu <= eps[p_D r + (1-p_D) theta_D]"));
  }
  const double x_share = (bc * r - bc - c * r + v) / ((r - 1) * (bc - v));
  auto outside = [](EquilibriumRecord rec, const std::string& why) {
    rec.reason = why;
    if (rec.in_unit_cube) rec.reason += "; note: coordinates evaluate inside the unit cube here";
    return rec;
  };
  out.push_back(outside(
      make("p15",
           {x_share, 0, 0, -c * r / denom,
            (bu * mu - bu * mu * r - r * eps) /
                (bu * mu - bu * mu * r + pT * r * eps - tT * pT * eps - r * eps + tT * eps)},
           false, ""),
      "never in [0,1]^5: w = -cr/(b_c r - b_c + v) < 0"));
  out.push_back(outside(
      make("p16",
           {x_share, 0, -r * (c - v) / ((r - 1) * (v - bc)), 0,
            (-bu * mu + bu * mu * r + r * eps) / (bu * mu * (r - 1))},
           false, ""),
      "never in [0,1]^5: alpha = (-b_u mu + b_u mu r + r eps)/(b_u mu (r-1)) > 1"));
  out.push_back(outside(
      make("p17",
           {x_share, 0, 0, 0,
            (-bu * mu + bu * mu * r + pD * r * eps - tD * pD * eps + tD * eps) /
                (-bu * mu + bu * mu * r + pD * r * eps - tD * pD * eps - r * eps + tD * eps)},
           false, ""),
      "never in [0,1]^5: alpha outside [0,1]"));
  return out;
}

std::vector<EquilibriumRecord> three_strategy_catalog(const GameParams& p) {
  const double bu = p.b_u, bc = p.b_c, c = p.c, v = p.v, mu = p.mu, eps = p.eps, r = p.r;
  // Three-strategy states keep TFT in z and w = 0.
  auto st = [](double x, double y, double a) { return ReplicatorState{x, y, 1 - x - y, 0, a}; };
  std::vector<EquilibriumRecord> out;
  const std::string corner = "vertex of [0,1]^3, exists for all parameter values";

  {
    const double y1 = 1 - c * r / (bc * (r - 1) + v);
    const double a1 = (r * eps - bu * mu) / (bu * r - bu * mu);
    auto rec = make("q1", st(0, y1, a1), false, "");
    rec.feasible = rec.in_unit_cube;
    rec.reason = rec.feasible ? "coordinates lie in [0,1]^3" : "coordinates leave [0,1]^3";
    out.push_back(std::move(rec));
  }
  out.push_back(make("q2", st(0, 1, 0), true, corner));
  out.push_back(make("q3", st(1, 0, 0), true, corner));
  out.push_back(make("q4", st(0, 0, 0), true, corner));
  out.push_back(make("q5", st(0, 1, 1), true, corner));
  out.push_back(make("q6", st(1, 0, 1), true, corner));
  out.push_back(make("q7", st(0, 0, 1), true, corner));
  {
    const bool ok = 0 <= c && c <= v && mu < 0 && v > 0;
    out.push_back(make("q8", st(c / v, 1 - c / v, mu / (mu - 1)), ok,
                       ok ? "0 <= c <= v and mu < 0" : "requires 0 <= c <= v and mu < 0"));
  }
  for (auto& rec : out) {
    if (!rec.feasible) rec.stability = Stability::kInfeasible;
  }
  return out;
}

}  // namespace

std::vector<EquilibriumRecord> equilibrium_catalog(const GameParams& params, Variant v) {
  params.validate();
  return v == Variant::kFive ? five_strategy_catalog(params) : three_strategy_catalog(params);
}

std::optional<std::vector<std::complex<double>>> closed_form_eigenvalues(
    const std::string& label, const GameParams& p) {
  using C = std::complex<double>;
  const double bu = p.b_u, bc = p.b_c, c = p.c, v = p.v, mu = p.mu, eps = p.eps;
  const double pT = p.p_T, pD = p.p_D, tT = p.theta_T, tD = p.theta_D, r = p.r;
  auto real = [](std::initializer_list<double> xs) {
    std::vector<C> out;
    for (double x : xs) out.emplace_back(x, 0.0);
    return out;
  };
  if (label == "p1" || label == "p3" || label == "p6") {
    return real({0.0, (bc * (r - 1) - c * r + v) / r, -(pD - 1) * eps * (r - tD) / r,
                 eps - bu * mu / r, bu * mu * (r - 1) / r + eps});
  }
  if (label == "p2" || label == "p11") {
    return real({0.0, (bc * (-r) + bc + c * r - v) / r, eps, eps - bu,
                 -(pT - 1) * eps * (r - tT) / r});
  }
  if (label == "p4") {
    return real({-c, bu * mu, bu * mu / r - eps, bu * mu / r - eps,
                 (bu * mu + pD * eps * (tD - r) + tD * (-eps)) / r});
  }
  if (label == "p5") {
    return real({v - c, -bu * mu, bu * mu * (1 / r - 1) - eps, bu * mu * (1 / r - 1) - eps,
                 (-bu * mu * (r - 1) + pD * eps * (tD - r) + tD * (-eps)) / r});
  }
  if (label == "p7") {
    return real({(bc * (r - 1) - c * r + v) / r, (pD - 1) * eps * (r - tD) / r,
                 (pD - 1) * eps * (r - tD) / r, (-bu * mu + pD * eps * (r - tD) + tD * eps) / r,
                 (bu * mu * (r - 1) + pD * eps * (r - tD) + tD * eps) / r});
  }
  if (label == "p8") {
    return real({bu, c, bu - eps, bu - eps, bu + tT * (pT - 1) * eps / r - pT * eps});
  }
  if (label == "p9") {
    return real({-bu, c - v, -eps, -eps, tT * (pT - 1) * eps / r - pT * eps});
  }
  if (label == "p10") {
    return real({(bc * (-r) + bc + c * r - v) / r, eps * (tT + pT * (r - tT)) / r,
                 (pT - 1) * eps * (r - tT) / r, (pT - 1) * eps * (r - tT) / r,
                 eps * (tT + pT * (r - tT)) / r - bu});
  }
  if (label == "p12") {
    if (mu == 0.0 || v == 0.0) return std::nullopt;
    const C i(0.0, 1.0);
    const C lambda = i * std::sqrt(C(bu)) * std::sqrt(C(c)) * std::sqrt(C(c - v)) /
                     (std::sqrt(C((mu - 1) / mu)) * std::sqrt(C(v)));
    return std::vector<C>{
        -lambda, lambda, C((r * (bu * mu - mu * eps + eps) - bu * mu) / ((mu - 1) * r)),
        C((bu * mu * (r - 1) + pD * eps * (r - tD) + eps * (tD - mu * r)) / ((mu - 1) * r)),
        C((bu * mu * (r - 1) - mu * eps * (tT + pT * (r - tT)) + r * eps) / ((mu - 1) * r))};
  }
  return std::nullopt;
}

DenseMatrix jacobian(const ReplicatorState& s, const GameParams& params, Variant v, double h) {
  const PayoffTable table = build_payoff_table(params);
  const std::size_t n = dimension(v);
  const auto base = s.coords(v);
  DenseMatrix jac(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    auto plus = base;
    auto minus = base;
    plus[j] += h;
    minus[j] -= h;
    const auto fp = rhs_raw(plus, table, v);
    const auto fm = rhs_raw(minus, table, v);
    for (std::size_t i = 0; i < n; ++i) jac(i, j) = (fp[i] - fm[i]) / (2 * h);
  }
  return jac;
}

EquilibriumRecord classify_stability(EquilibriumRecord rec, const GameParams& params,
                                     Variant v) {
  if (!rec.feasible) {
    rec.stability = Stability::kInfeasible;
    rec.eigenvalues.clear();
    return rec;
  }
  rec.eigenvalues = eigenvalues(jacobian(rec.coords, params, v));
  std::sort(rec.eigenvalues.begin(), rec.eigenvalues.end(),
            [](const auto& a, const auto& b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
  if (v == Variant::kFive) rec.closed_form_eigenvalues = closed_form_eigenvalues(rec.label, params);

  bool all_negative = true;
  bool marginal = false;
  for (const auto& ev : rec.eigenvalues) {
    if (ev.real() >= -kStabilityMargin) all_negative = false;
    if (std::abs(ev.real()) <= kStabilityMargin) marginal = true;
    if (std::abs(ev) <= kStabilityMargin) rec.jacobian_singular = true;
  }
  if (all_negative) rec.stability = Stability::kStable;
  else if (marginal) rec.stability = Stability::kDegenerateNonstable;
  else rec.stability = Stability::kUnstable;
  return rec;
}

bool spectra_match(std::span<const std::complex<double>> a,
                   std::span<const std::complex<double>> b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) ok = std::abs(a[i] - b[perm[i]]) <= tol;
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

namespace {

bool numerically_stable(const std::string& label, const GameParams& params, Variant v) {
  for (auto& rec : equilibrium_catalog(params, v)) {
    if (rec.label == label) {
      return classify_stability(rec, params, v).stability == Stability::kStable;
    }
  }
  throw std::logic_error("no catalog entry " + label);
}

std::vector<LemmaCheck> lemma_check(const GameParams& p, Variant v,
                                    const std::array<std::string, 3>& labels) {
  std::vector<LemmaCheck> out;
  out.push_back({labels[0], "mu < 0", p.mu < 0, numerically_stable(labels[0], p, v)});
  out.push_back({labels[1], "mu > 0 and v - c < 0", p.mu > 0 && p.v - p.c < 0,
                 numerically_stable(labels[1], p, v)});
  out.push_back({labels[2], "c - v < 0", p.c - p.v < 0, numerically_stable(labels[2], p, v)});
  return out;
}

}  // namespace

std::vector<LemmaCheck> five_strategy_lemma_check(const GameParams& params) {
  return lemma_check(params, Variant::kFive, {"p4", "p5", "p9"});
}

std::vector<LemmaCheck> three_strategy_lemma_check(const GameParams& params) {
  return lemma_check(params, Variant::kThree, {"q2", "q3", "q6"});
}

}  // namespace trustdyn
