#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "trustdyn/linalg.hpp"

#ifdef TRUSTDYN_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace trustdyn;
using Cx = std::complex<double>;

namespace {

bool same_spectrum(std::vector<Cx> a, std::vector<Cx> b, double tol) {
  if (a.size() != b.size()) return false;
  // greedy nearest matching is enough for well-separated test spectra
  for (const auto& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](const Cx& p, const Cx& q) {
      return std::abs(p - x) < std::abs(q - x);
    });
    if (std::abs(*it - x) > tol) return false;
    b.erase(it);
  }
  return true;
}

DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  DenseMatrix m(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("linear solve") {
  const auto a = from_rows({{0, 2, 1}, {1, 1, 1}, {2, 1, 0}});
  const auto x = solve_linear(a, {5, 4, 4});
  CHECK(x[0] == doctest::Approx(1));
  CHECK(x[1] == doctest::Approx(2));
  CHECK(x[2] == doctest::Approx(1));
  CHECK_THROWS_AS(solve_linear(from_rows({{1, 2}, {2, 4}}), {1, 2}), SingularMatrix);
}

TEST_CASE("eigenvalues of small known matrices") {
  // triangular: the diagonal
  auto ev = eigenvalues(from_rows({{3, 1, 4}, {0, -2, 7}, {0, 0, 0.5}}));
  CHECK(same_spectrum(ev, {3, -2, 0.5}, 1e-12));
  // rotation generator: +-i
  ev = eigenvalues(from_rows({{0, -1}, {1, 0}}));
  CHECK(same_spectrum(ev, {Cx(0, 1), Cx(0, -1)}, 1e-12));
  // companion matrix of (t-1)(t-2)(t-3)(t-4)
  ev = eigenvalues(from_rows({{10, -35, 50, -24}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}));
  CHECK(same_spectrum(ev, {1, 2, 3, 4}, 1e-9));
  // Jordan block: repeated eigenvalue
  ev = eigenvalues(from_rows({{2, 1, 0}, {0, 2, 1}, {0, 0, 2}}));
  for (const auto& e : ev) CHECK(std::abs(e - 2.0) < 1e-12);
  CHECK(eigenvalues(DenseMatrix(1, 1, -7.5))[0] == Cx(-7.5, 0));
  CHECK_THROWS_AS(eigenvalues(DenseMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("trace and determinant are preserved") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 6;
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = g(rng);
    const auto ev = eigenvalues(m);
    Cx sum = 0;
    for (const auto& e : ev) sum += e;
    double trace = 0;
    for (std::size_t i = 0; i < n; ++i) trace += m(i, i);
    CHECK(std::abs(sum - trace) < 1e-9);
    // complex eigenvalues come in conjugate pairs
    for (const auto& e : ev) {
      if (e.imag() == 0) continue;
      CHECK(std::any_of(ev.begin(), ev.end(),
                        [&](const Cx& f) { return std::abs(f - std::conj(e)) < 1e-9; }));
    }
  }
}

#ifdef TRUSTDYN_HAVE_EIGEN
TEST_CASE("eigenvalues agree with Eigen on random dense matrices") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + trial % 9;
    DenseMatrix m(n, n);
    Eigen::MatrixXd e(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e(i, j) = m(i, j) = g(rng);
    const auto ours = eigenvalues(m);
    const Eigen::VectorXcd ref = Eigen::EigenSolver<Eigen::MatrixXd>(e, false).eigenvalues();
    std::vector<Cx> theirs(ref.data(), ref.data() + n);
    CHECK(same_spectrum(ours, theirs, 1e-8));
  }
}
#endif
