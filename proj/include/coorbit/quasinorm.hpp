#pragma once

// Homogeneous quasi-norms for expansive dilations: an ellipsoid Omega built
// from a geometric matrix series, a step quasi-norm that is exactly
// homogeneous under A, and an empirical equivalence test between two such
// quasi-norms (the classification criterion for coinciding anisotropic
// scales).

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <coorbit/common.hpp>
#include <coorbit/group.hpp>
#include <coorbit/la.hpp>

namespace coorbit {

struct QuasiNorm {
  Mat A;
  Mat P;  // Omega = {x : x^T P x <= 1}
  double detA = 0.0;
};

// P = sum_k (A^{-k})^T A^{-k}; converges since A^{-1} is a contraction.
// The limit satisfies P - A^{-T} P A^{-1} = I, so A Omega contains Omega
// strictly, which is what makes the step construction well defined.
inline QuasiNorm build_quasinorm(const Mat& A) {
  require(A.rows() == A.cols() && A.rows() >= 1, "square matrix expected");
  require(is_expansive(A), "dilation must be expansive");
  const int d = static_cast<int>(A.rows());
  const Mat Ainv = inverse(A);
  Mat P = Mat::Zero(d, d);
  Mat M = Mat::Identity(d, d);  // A^{-k}
  int k = 0;
  while (true) {
    const Mat term = M.transpose() * M;
    P += term;
    if (term.norm() < 1e-14) break;
    require(++k < 10000, "ellipsoid series did not converge within 10000 terms");
    M = Ainv * M;
  }
  P = 0.5 * (P + P.transpose());

  const Mat gap = P - Ainv.transpose() * P * Ainv;
  double eig_min = kInf;
  for (const cplx& ev : eigenvalues(Mat(0.5 * (gap + gap.transpose()))))
    eig_min = std::min(eig_min, ev.real());
  require(eig_min > 0.0, "ellipsoid is not strictly expanded by the dilation");
  return {A, P, std::abs(A.determinant())};
}

namespace detail {

// (A^{-j}x)^T P (A^{-j}x); overflow to inf / underflow to 0 keeps the
// membership comparison against 1 meaningful at extreme levels.
inline double level_form(const QuasiNorm& qn, const Vec& x, long j) {
  Vec y = x;
  if (j >= 0) {
    const Mat Ainv = inverse(qn.A);
    for (long k = 0; k < j; ++k) y = Ainv * y;
  } else {
    for (long k = 0; k < -j; ++k) y = qn.A * y;
  }
  return y.dot(qn.P * y);
}

}  // namespace detail

inline constexpr long kQuasiLevelCap = 1200;

// Step quasi-norm: rho(x) = |det A|^j on A^{j+1}Omega \ A^jOmega, rho(0)=0.
// The nested levels make membership monotone in j, so the smallest level
// containing x is found by an exponential bracket plus bisection. When the
// bracket runs past the level cap the value saturates and *saturated is set.
inline double evaluate(const QuasiNorm& qn, const Vec& x, bool* saturated = nullptr) {
  require(x.size() == qn.A.rows(), "point dimension mismatch");
  if (saturated) *saturated = false;
  if (x.norm() == 0.0) return 0.0;

  const auto inside = [&](long j) { return detail::level_form(qn, x, j) <= 1.0; };
  long in, out;  // inside(in), !inside(out), out < in
  if (inside(0)) {
    in = 0;
    out = -1;
    while (inside(out)) {
      in = out;
      out *= 2;
      if (-out > kQuasiLevelCap) {
        if (saturated) *saturated = true;
        return std::pow(qn.detA, static_cast<double>(-kQuasiLevelCap));
      }
    }
  } else {
    out = 0;
    in = 1;
    while (!inside(in)) {
      out = in;
      in *= 2;
      if (in > kQuasiLevelCap) {
        if (saturated) *saturated = true;
        return std::pow(qn.detA, static_cast<double>(kQuasiLevelCap));
      }
    }
  }
  while (in - out > 1) {
    const long mid = out + (in - out) / 2;
    (inside(mid) ? in : out) = mid;
  }
  return std::pow(qn.detA, static_cast<double>(in - 1));
}

struct EquivalenceReport {
  double ratio_lo = kInf;
  double ratio_hi = 0.0;
  double slope_per_decade = 0.0;  // largest-magnitude per-direction trend
  bool equivalent = false;
};

inline constexpr double kRatioSpreadThreshold = 1e3;
inline constexpr double kSlopeThreshold = 0.01;

// Samples rho_2/rho_1 on log-spaced radii along axis and random unit
// directions. Equivalent quasi-norms have a bounded ratio with no radial
// trend; differing homogeneity shows up as a log-log slope.
inline EquivalenceReport equivalence_test(const QuasiNorm& q1, const QuasiNorm& q2,
                                          double r_lo = 1e-4, double r_hi = 1e4,
                                          int radii_per_decade = 32,
                                          int random_directions = 8,
                                          std::uint64_t seed = 42) {
  require(q1.A.rows() == q2.A.rows(), "dimension mismatch");
  require(r_lo > 0.0 && r_hi > r_lo, "bad radius range");
  require(radii_per_decade >= 2, "need at least two radii per decade");
  const int d = static_cast<int>(q1.A.rows());

  std::vector<Vec> dirs;
  for (int a = 0; a < d; ++a) {
    Vec e = Vec::Zero(d);
    e(a) = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < random_directions; ++r) {
    Vec v(d);
    do {
      for (int a = 0; a < d; ++a) v(a) = gauss(rng);
    } while (v.norm() < 1e-8);
    dirs.push_back(v / v.norm());
  }

  const double decades = std::log10(r_hi / r_lo);
  const int nr = static_cast<int>(std::ceil(decades * radii_per_decade)) + 1;

  EquivalenceReport rep;
  for (const Vec& dir : dirs) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < nr; ++i) {
      const double r = r_lo * std::pow(r_hi / r_lo, double(i) / (nr - 1));
      const double v1 = evaluate(q1, Vec(r * dir));
      const double v2 = evaluate(q2, Vec(r * dir));
      const double ratio = v2 / v1;
      rep.ratio_lo = std::min(rep.ratio_lo, ratio);
      rep.ratio_hi = std::max(rep.ratio_hi, ratio);
      const double lx = std::log10(r), ly = std::log10(ratio);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double slope = (nr * sxy - sx * sy) / (nr * sxx - sx * sx);
    if (std::abs(slope) > std::abs(rep.slope_per_decade)) rep.slope_per_decade = slope;
  }
  rep.equivalent = rep.ratio_hi / rep.ratio_lo < kRatioSpreadThreshold &&
                   std::abs(rep.slope_per_decade) < kSlopeThreshold;
  return rep;
}

}  // namespace coorbit
