#ifndef TRUSTDYN_REPLICATOR_HPP_
#define TRUSTDYN_REPLICATOR_HPP_

// Two-population replicator dynamics for the trust game in infinite,
// well-mixed populations.
//
// Five-strategy variant: coordinates (x, y, z, w, alpha) for AllA, AllN,
// TFT, TUA and the creator cooperation level; DtG = 1 - x - y - z - w.
// Three-strategy variant (no trust strategies): coordinates (x, y, alpha)
// for AllA, AllN and alpha; TFT = 1 - x - y.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustdyn/game.hpp"
#include "trustdyn/linalg.hpp"

namespace trustdyn {

enum class Variant { kFive, kThree };

std::size_t dimension(Variant v);
std::string_view name(Variant v);

class OffSimplex : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IntegrationBlowUp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReplicatorState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 0.0;
  double alpha = 0.0;

  double dtg() const { return 1.0 - x - y - z - w; }

  // Uniform user mix over the variant's strategies; alpha = 1/2.
  static ReplicatorState uniform(Variant v);
  // Builds a state from reduced coordinates (5 or 3 entries).
  static ReplicatorState from_coords(std::span<const double> coords, Variant v);
  std::vector<double> coords(Variant v) const;

  PopulationMix mix() const { return PopulationMix::from_xyzw(x, y, z, w, alpha); }

  // Throws OffSimplex if any coordinate leaves [0,1] by more than tol, or
  // the variant's fixed coordinates are violated.
  void validate(Variant v, double tol = 1e-9) const;
};

// Time derivatives of the reduced coordinates, computed from the payoff
// table: x_i' = x_i (f_i - mean f) for users, alpha' = alpha (1 - alpha)
// (f_C - f_D) for creators.
std::vector<double> rhs(const ReplicatorState& state, const GameParams& params, Variant v);

// Same system written out as explicit polynomials.
std::vector<double> rhs_explicit(const ReplicatorState& state, const GameParams& params,
                                 Variant v);

// Unchecked evaluation on raw reduced coordinates (used for Jacobians,
// where the stencil steps outside the simplex).
std::vector<double> rhs_raw(std::span<const double> coords, const PayoffTable& table, Variant v);

struct Trajectory {
  std::vector<double> times;
  std::vector<ReplicatorState> states;
  GameParams params;
  Variant variant = Variant::kFive;
};

struct IntegrateOptions {
  double dt = 0.01;
  double t_end = 500.0;
  // Keep every n-th step (the final state is always kept).
  std::int64_t record_every = 1;
};

// Classical fixed-step RK4. After each step negative coordinates are set to
// 0 and the user frequencies renormalised to sum 1; alpha is clipped to
// [0,1]. Throws IntegrationBlowUp if a coordinate exceeds 2 in magnitude or
// turns non-finite.
Trajectory integrate(const ReplicatorState& initial, const GameParams& params, Variant v,
                     const IntegrateOptions& options = {});

struct OscillationSummary {
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double amplitude() const { return alpha_max - alpha_min; }
};

// min/max of alpha over the trailing fraction of the trajectory.
OscillationSummary trailing_alpha_range(const Trajectory& traj, double trailing_fraction = 0.2);

// Index of the modal user strategy (in UserStrategy order) at a state.
UserStrategy modal_user_strategy(const ReplicatorState& s, Variant v);

enum class Stability { kUnclassified, kStable, kUnstable, kDegenerateNonstable, kInfeasible };
std::string_view name(Stability s);

struct EquilibriumRecord {
  std::string label;           // p1..p17 or q1..q8
  std::string member;          // sampled member of an equilibrium set, e.g. "w=0.5"
  std::string set_descriptor;  // free-coordinate description for sets
  ReplicatorState coords;
  bool feasible = false;
  std::string reason;
  // Coordinates evaluate to finite values inside the unit cube. Informational;
  // feasibility follows the analytic existence conditions.
  bool in_unit_cube = false;
  std::vector<std::complex<double>> eigenvalues;
  std::optional<std::vector<std::complex<double>>> closed_form_eigenvalues;
  bool jacobian_singular = false;
  Stability stability = Stability::kUnclassified;
};

// Candidate equilibria: p1..p17 for the five-strategy system (the sets p1
// and p2 are sampled at both endpoints and the midpoint of their free
// coordinate), q1..q8 for the three-strategy system. Eigenvalues are not
// computed here; see classify_stability.
std::vector<EquilibriumRecord> equilibrium_catalog(const GameParams& params, Variant v);

// Tabulated eigenvalue expressions for p1..p12 (nullopt elsewhere).
std::optional<std::vector<std::complex<double>>> closed_form_eigenvalues(
    const std::string& label, const GameParams& params);

DenseMatrix jacobian(const ReplicatorState& s, const GameParams& params, Variant v,
                     double h = 1e-6);

inline constexpr double kStabilityMargin = 1e-8;

// Fills eigenvalues (numeric Jacobian spectrum), the closed forms where
// known, and the verdict: stable iff every real part < -1e-8; degenerate
// (never stable) if some |real part| <= 1e-8; unstable otherwise.
// Infeasible records are returned with stability kInfeasible.
EquilibriumRecord classify_stability(EquilibriumRecord record, const GameParams& params,
                                     Variant v);

// True if the two spectra agree as multisets within tol (best matching).
bool spectra_match(std::span<const std::complex<double>> a,
                   std::span<const std::complex<double>> b, double tol);

struct LemmaCheck {
  std::string label;
  std::string condition;
  bool expected_stable = false;
  bool numeric_stable = false;
  bool agrees() const { return expected_stable == numeric_stable; }
};

// p4 stable iff mu<0; p5 iff mu>0 and v<c; p9 iff c<v.
std::vector<LemmaCheck> five_strategy_lemma_check(const GameParams& params);
// q2 stable iff mu<0; q3 iff mu>0 and v<c; q6 iff c<v.
std::vector<LemmaCheck> three_strategy_lemma_check(const GameParams& params);

}  // namespace trustdyn

#endif  // TRUSTDYN_REPLICATOR_HPP_
