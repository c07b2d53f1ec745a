#pragma once

// Random generators and brute-force reference computations shared by the test binaries.
// Everything here is assembled directly from the operator definition, without the library's kernels.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gaplabel/model.hpp"

namespace gaplabel::testing {

using Rng = std::mt19937_64;
using Mat = Eigen::MatrixXcd;

inline constexpr double kGolden = 0.6180339887498949;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline BasePoint point(double x) {
  BasePoint p(1);
  p(0) = x;
  return p;
}

/// m = 1, C = 1, f = 0 over a golden rotation.
inline OperatorModel free_laplacian() {
  return OperatorModel(Mat::Identity(1, 1), Potential::free(1), BaseDynamics::torus_rotation({kGolden}));
}

inline Mat random_matrix(Rng& rng, int m, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Mat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = {g(rng), g(rng)};
  return a;
}

inline Mat random_hermitian(Rng& rng, int m, double scale = 1.0) {
  const Mat a = random_matrix(rng, m, scale);
  return (a + a.adjoint()) / 2.0;
}

inline double cond(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

/// Invertible matrix with condition number at most `max_cond`.
inline Mat random_invertible(Rng& rng, int m, double max_cond = 100.0) {
  for (;;) {
    Mat c = random_matrix(rng, m) + Mat::Identity(m, m) * 0.5;
    if (cond(c) <= max_cond) return c;
  }
}

inline Mat random_unitary(Rng& rng, int m) {
  Eigen::HouseholderQR<Mat> qr(random_matrix(rng, m));
  return qr.householderQ() * Mat::Identity(m, m);
}

/// Random Lagrangian frame: X = (W + I)/2, Y = (W - I)/(2i) for a random unitary W.
inline Mat random_lagrangian_stack(Rng& rng, int m) {
  const Mat w = random_unitary(rng, m);
  const Mat id = Mat::Identity(m, m);
  Mat stack(2 * m, m);
  stack << (w + id) / 2.0, (w - id) / std::complex<double>(0.0, 2.0);
  return stack;
}

/// f(theta) = H0 + B e(theta) + B* e(-theta) on the circle rotated by the golden mean.
inline OperatorModel random_model(Rng& rng, int m, double potential_scale = 1.0, double max_cond = 100.0) {
  const Mat h0 = random_hermitian(rng, m, potential_scale);
  const Mat b = random_matrix(rng, m, potential_scale * 0.5);
  std::vector<FourierBlock> blocks{{{0}, h0}, {{1}, b}, {{-1}, b.adjoint()}};
  return OperatorModel(random_invertible(rng, m, max_cond), Potential::trig_blocks(m, std::move(blocks)),
                       BaseDynamics::torus_rotation({kGolden}));
}

/// f(T^n theta) for n = 1..N.
inline std::vector<Mat> sites(const OperatorModel& model, const BasePoint& theta, int n) {
  std::vector<Mat> out;
  for (int k = 1; k <= n; ++k) out.push_back(model.f(model.base().iterate(theta, k)));
  return out;
}

/// Dense H^N with site N in the top-left block, C below the diagonal and C* above it.
inline Mat dense_h(const OperatorModel& model, const std::vector<Mat>& f) {
  const int m = model.m(), n = static_cast<int>(f.size());
  Mat h = Mat::Zero(m * n, m * n);
  for (int b = 0; b < n; ++b) {
    const int site = n - b;
    h.block(b * m, b * m, m, m) = f[static_cast<std::size_t>(site - 1)];
    if (b + 1 < n) {
      h.block((b + 1) * m, b * m, m, m) = model.c();
      h.block(b * m, (b + 1) * m, m, m) = model.c().adjoint();
    }
  }
  return h;
}

inline Eigen::VectorXd dense_eigenvalues(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// A_E = [[(E - f) C^-1, -C*], [C^-1, 0]].
inline Mat transfer(const OperatorModel& model, double e, const Mat& f) {
  const int m = model.m();
  const Mat ci = model.c().inverse();
  Mat a = Mat::Zero(2 * m, 2 * m);
  a.topLeftCorner(m, m) = (e * Mat::Identity(m, m) - f) * ci;
  a.topRightCorner(m, m) = -model.c().adjoint();
  a.bottomLeftCorner(m, m) = ci;
  return a;
}

/// A(T^{n-1} theta) ... A(theta).
inline Mat product(const OperatorModel& model, double e, const BasePoint& theta, int n) {
  const int m = model.m();
  Mat p = Mat::Identity(2 * m, 2 * m);
  for (int k = 0; k < n; ++k) p = transfer(model, e, model.f(model.base().iterate(theta, k))) * p;
  return p;
}

inline Mat cayley_w(const Mat& stack) {
  const int m = static_cast<int>(stack.cols());
  const std::complex<double> i(0.0, 1.0);
  const Mat x = stack.topRows(m), y = stack.bottomRows(m);
  return (x + i * y) * (x - i * y).inverse();
}

/// Cayley unitary of P(E) [start] computed in extended precision, for finite differences in E.
inline Mat cayley_w_extended(const OperatorModel& model, long double e, const BasePoint& theta, int n, const Mat& start) {
  using MatL = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
  const int m = model.m();
  const MatL c = model.c().cast<std::complex<long double>>();
  const MatL ci = c.inverse();
  MatL frame = start.cast<std::complex<long double>>();
  for (int k = 0; k < n; ++k) {
    const MatL f = model.f(model.base().iterate(theta, k)).cast<std::complex<long double>>();
    MatL a = MatL::Zero(2 * m, 2 * m);
    a.topLeftCorner(m, m) = (e * MatL::Identity(m, m) - f) * ci;
    a.topRightCorner(m, m) = -c.adjoint();
    a.bottomLeftCorner(m, m) = ci;
    frame = a * frame;
  }
  const std::complex<long double> i(0.0L, 1.0L);
  const MatL x = frame.topRows(m), y = frame.bottomRows(m);
  const MatL w = (x + i * y) * (x - i * y).inverse();
  return w.cast<std::complex<double>>();
}

/// Sturm count of eigenvalues <= e for the scalar chain u_{n+1} + u_{n-1} + v_n u_n.
inline long sturm_count(const std::vector<double>& v, double e) {
  long count = 0;
  double d = 1.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    d = (v[k] - e) - (k ? 1.0 / d : 0.0);
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

/// min over |k| <= k_max, j in Z of |x - k alpha - j|.
inline double distance_mod(double x, double alpha, int k_max, int* best_k = nullptr, long* best_j = nullptr) {
  double best = 1e300;
  for (int k = -k_max; k <= k_max; ++k) {
    const double r = x - k * alpha;
    const double j = std::round(r);
    const double d = std::abs(r - j);
    // Prefer the smallest |k| among near-ties.
    if (d < best - 1e-12 || (std::abs(d - best) <= 1e-12 && best_k && std::abs(k) < std::abs(*best_k))) {
      best = d;
      if (best_k) *best_k = k;
      if (best_j) *best_j = static_cast<long>(j);
    }
  }
  return best;
}

inline double circular_distance(double a, double b) {
  const double d = std::abs(a - b) - std::floor(std::abs(a - b));
  return std::min(d, 1.0 - d);
}

}  // namespace gaplabel::testing

namespace gaplabel::testing {

struct Label {
  int k;
  long j;
  double distance;
};

/// Label of x in Z alpha + Z: among (k, j) with |x - k alpha - j| < tol and |k| <= k_max, the smallest |k|.
inline std::optional<Label> label_within(double x, double alpha, int k_max, double tol) {
  for (int a = 0; a <= k_max; ++a)
    for (int k : {-a, a}) {
      const double r = x - k * alpha;
      const double j = std::round(r);
      if (std::abs(r - j) < tol) return Label{k, static_cast<long>(j), std::abs(r - j)};
      if (a == 0) break;
    }
  return std::nullopt;
}

}  // namespace gaplabel::testing
