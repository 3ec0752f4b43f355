#pragma once

// Dilation groups H <= GL(d) presented through additive parameter charts:
// every built-in chart is a homomorphism from (R^c, +) (or Z for the cyclic
// kind) onto H, so group products are parameter sums and left-invariant
// quadrature is a uniform lattice in the chart.
//
// Chart conventions:
//   OneParameter(A)     tau        -> exp(tau A),                Haar = dtau
//   Similitude(d)       tau        -> e^tau I,                   Haar = dtau  (= dt/t in scale t)
//   Cyclic(A)           j          -> A^j,                       counting measure
//   DiagonalTwoParam    (s, t)     -> diag(e^s, e^t, e^{as+bt}), Haar = ds dt
//   ExplicitSampled     index      -> table lookup,              given weights

#include <cmath>
#include <utility>
#include <vector>

#include "coorbit/common.hpp"
#include "coorbit/frequency_set.hpp"
#include "coorbit/la.hpp"

namespace coorbit {

struct GroupSample {
  Mat h;
  Vec param;      // chart coordinate
  double weight;  // Haar quadrature mass
};

inline Vec dual_action(const Mat& h, const Vec& xi) {
  require(h.rows() == xi.size(), "dimension mismatch");
  return h.transpose() * xi;
}

class DilationGroup {
 public:
  enum class Kind { OneParameter, Cyclic, Similitude, DiagonalTwoParam, ExplicitSampled };

  static DilationGroup one_parameter(const Mat& a) {
    check_square(a);
    require(a.rows() <= 3, "dimension above 3 not supported");
    require(is_invertible(a), "generator must be invertible");
    DilationGroup g;
    g.kind_ = Kind::OneParameter;
    g.dim_ = static_cast<int>(a.rows());
    g.gen_ = a;
    return g;
  }

  static DilationGroup cyclic(const Mat& a) {
    check_square(a);
    require(a.rows() <= 3, "dimension above 3 not supported");
    require(is_invertible(a), "generator must be invertible");
    DilationGroup g;
    g.kind_ = Kind::Cyclic;
    g.dim_ = static_cast<int>(a.rows());
    g.gen_ = a;
    g.gen_inv_ = inverse(a);
    return g;
  }

  static DilationGroup similitude(int d) {
    require(d >= 1 && d <= 3, "dimension must be 1, 2, or 3");
    DilationGroup g;
    g.kind_ = Kind::Similitude;
    g.dim_ = d;
    return g;
  }

  static DilationGroup diag_two_param(double alpha, double beta) {
    DilationGroup g;
    g.kind_ = Kind::DiagonalTwoParam;
    g.dim_ = 3;
    g.alpha_ = alpha;
    g.beta_ = beta;
    return g;
  }

  static DilationGroup explicit_sampled(std::vector<std::pair<Mat, double>> samples, int d) {
    require(!samples.empty(), "explicit group needs at least one sample");
    for (const auto& [h, w] : samples) {
      check_dim(h, d);
      require(w > 0.0, "sample weights must be positive");
    }
    DilationGroup g;
    g.kind_ = Kind::ExplicitSampled;
    g.dim_ = d;
    g.table_ = std::move(samples);
    return g;
  }

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Mat& generator() const {
    require(kind_ == Kind::OneParameter || kind_ == Kind::Cyclic, "kind has no generator");
    return gen_;
  }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::vector<std::pair<Mat, double>>& table() const { return table_; }

  int chart_dim() const { return kind_ == Kind::DiagonalTwoParam ? 2 : 1; }

  // Integer-valued chart coordinates (lattice step forced to 1).
  bool discrete_chart() const { return kind_ == Kind::Cyclic || kind_ == Kind::ExplicitSampled; }

  Mat chart(const Vec& param) const {
    require(param.size() == chart_dim(), "chart coordinate dimension mismatch");
    switch (kind_) {
      case Kind::OneParameter:
        return mat_exp(param(0) * gen_);
      case Kind::Similitude:
        return std::exp(param(0)) * identity(dim_);
      case Kind::Cyclic:
        return integer_power(round_index(param(0)));
      case Kind::DiagonalTwoParam: {
        Mat h = Mat::Zero(3, 3);
        h(0, 0) = std::exp(param(0));
        h(1, 1) = std::exp(param(1));
        h(2, 2) = std::exp(alpha_ * param(0) + beta_ * param(1));
        return h;
      }
      case Kind::ExplicitSampled: {
        const long j = round_index(param(0));
        require(j >= 0 && j < static_cast<long>(table_.size()), "sample index out of range");
        return table_[static_cast<std::size_t>(j)].first;
      }
    }
    fail("unreachable");
  }

  Mat chart1(double t) const {
    Vec p(1);
    p(0) = t;
    return chart(p);
  }

  // The open dual-invariant region the group acts properly on.
  EssentialSupport essential_support() const {
    switch (kind_) {
      case Kind::DiagonalTwoParam:
        require(alpha_ == 0.0 || beta_ == 0.0, "no closed-form frequency support for this parameter pair");
        return EssentialSupport::diag2param(alpha_, beta_);
      default:
        return EssentialSupport::punctured(dim_);
    }
  }

 private:
  static long round_index(double x) {
    const long j = std::lround(x);
    require(std::abs(x - static_cast<double>(j)) < 1e-9, "chart coordinate must be an integer");
    return j;
  }

  Mat integer_power(long j) const {
    Mat acc = identity(dim_);
    const Mat& base = j >= 0 ? gen_ : gen_inv_;
    for (long k = 0; k < std::abs(j); ++k) acc = acc * base;
    return acc;
  }

  Kind kind_ = Kind::Similitude;
  int dim_ = 1;
  Mat gen_, gen_inv_;
  double alpha_ = 0.0, beta_ = 0.0;
  std::vector<std::pair<Mat, double>> table_;
};

namespace detail {

struct AxisNode {
  double t, w;
};

// Uniform lattice with trapezoid end weights; total mass = hi - lo exactly.
inline std::vector<AxisNode> trapezoid_axis(double lo, double hi, int n) {
  require(n >= 1, "need at least one sample");
  std::vector<AxisNode> nodes;
  if (n == 1) {
    require(hi >= lo, "empty extent");
    nodes.push_back({0.5 * (lo + hi), hi - lo});
    return nodes;
  }
  require(hi > lo, "extent must have positive length");
  const double step = (hi - lo) / (n - 1);
  nodes.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double w = (k == 0 || k == n - 1) ? 0.5 * step : step;
    nodes.push_back({lo + k * step, w});
  }
  return nodes;
}

}  // namespace detail

// Left-Haar quadrature over the chart window [lo, hi] (per axis), n nodes
// per axis. Cyclic kinds enumerate the integer range and ignore n; the
// explicit kind passes its table through unchanged.
inline std::vector<GroupSample> haar_samples(const DilationGroup& g, const Vec& lo, const Vec& hi,
                                             const std::vector<int>& n) {
  require(lo.size() == g.chart_dim() && hi.size() == g.chart_dim(), "extent dimension mismatch");
  std::vector<GroupSample> out;
  switch (g.kind()) {
    case DilationGroup::Kind::OneParameter:
    case DilationGroup::Kind::Similitude: {
      require(n.size() == 1, "one chart axis expected");
      for (const auto& node : detail::trapezoid_axis(lo(0), hi(0), n[0])) {
        Vec p(1);
        p(0) = node.t;
        out.push_back({g.chart(p), p, node.w});
      }
      return out;
    }
    case DilationGroup::Kind::Cyclic: {
      const long jlo = static_cast<long>(std::ceil(lo(0) - 1e-9));
      const long jhi = static_cast<long>(std::floor(hi(0) + 1e-9));
      require(jlo <= jhi, "extent contains no integers");
      for (long j = jlo; j <= jhi; ++j) {
        Vec p(1);
        p(0) = static_cast<double>(j);
        out.push_back({g.chart(p), p, 1.0});
      }
      return out;
    }
    case DilationGroup::Kind::DiagonalTwoParam: {
      require(n.size() == 2, "two chart axes expected");
      const auto ax0 = detail::trapezoid_axis(lo(0), hi(0), n[0]);
      const auto ax1 = detail::trapezoid_axis(lo(1), hi(1), n[1]);
      for (const auto& a : ax0)
        for (const auto& b : ax1) {
          Vec p(2);
          p(0) = a.t;
          p(1) = b.t;
          out.push_back({g.chart(p), p, a.w * b.w});
        }
      return out;
    }
    case DilationGroup::Kind::ExplicitSampled: {
      const auto& table = g.table();
      for (std::size_t j = 0; j < table.size(); ++j) {
        Vec p(1);
        p(0) = static_cast<double>(j);
        out.push_back({table[j].first, p, table[j].second});
      }
      return out;
    }
  }
  fail("unreachable");
}

// h(p)^{-1} h(q), computed through the chart: built-in charts are additive
// homomorphisms, so the quotient is the element at q - p.
inline Mat chart_quotient(const DilationGroup& g, const Vec& p, const Vec& q) {
  require(g.kind() != DilationGroup::Kind::ExplicitSampled, "explicit groups have no chart arithmetic");
  return g.chart(q - p);
}

inline std::vector<GroupSample> haar_samples(const DilationGroup& g, double lo, double hi, int n) {
  require(g.chart_dim() == 1, "group has a two-axis chart; pass vector extents");
  Vec l(1), h(1);
  l(0) = lo;
  h(0) = hi;
  return haar_samples(g, l, h, {n});
}

// Delta_G(x,h) = |det h|^{-1} Delta_H(h); Delta_H = 1 for every built-in
// kind (abelian charts).
inline double modular_G(const DilationGroup& g, const Mat& h) {
  check_dim(h, g.dim());
  return 1.0 / std::abs(h.determinant());
}

struct PredicateResult {
  bool value = false;
  bool borderline = false;  // decided within eps of the strict inequality
};

inline constexpr double kEigTol = 1e-10;

// All eigenvalue real parts strictly one sign: the generator produces an
// integrably admissible one-parameter group.
inline PredicateResult one_parameter_admissibility(const Mat& a) {
  PredicateResult r;
  bool all_pos = true, all_neg = true;
  for (const cplx& ev : eigenvalues(a)) {
    const double re = ev.real();
    if (std::abs(re) <= kEigTol) r.borderline = true;
    if (re <= kEigTol) all_pos = false;
    if (re >= -kEigTol) all_neg = false;
  }
  r.value = all_pos || all_neg;
  return r;
}

inline bool is_integrably_admissible_one_parameter(const Mat& a) {
  return one_parameter_admissibility(a).value;
}

// All eigenvalue moduli strictly above 1.
inline PredicateResult expansivity(const Mat& a) {
  require(is_invertible(a), "matrix must be invertible");
  PredicateResult r;
  r.value = true;
  for (const cplx& ev : eigenvalues(a)) {
    const double m = std::abs(ev);
    if (std::abs(m - 1.0) <= kEigTol) r.borderline = true;
    if (m <= 1.0 + kEigTol) r.value = false;
  }
  return r;
}

inline bool is_expansive(const Mat& a) { return expansivity(a).value; }

// The 3x3 diagonal two-parameter family: admissible iff one exponent
// vanishes and the other is positive. The mixed-sign case is unresolved
// territory, reported as not admissible without a nonexistence claim.
inline bool is_integrably_admissible_two_param(double alpha, double beta) {
  return std::abs(alpha * beta) <= 1e-12 && alpha + beta > 0.0;
}

struct TransporterReport {
  std::vector<Vec> hits;     // chart coordinates with h^T K1 meeting K2
  bool bounded = true;       // no hit in the outer 10% of the probed window
  double param_radius = 0.0; // sup-norm radius of the hit set in the chart
};

inline TransporterReport transporter_probe(const DilationGroup& g, const FrequencySet& k1,
                                           const FrequencySet& k2,
                                           const std::vector<GroupSample>& samples) {
  require(!samples.empty(), "empty sample list");
  require(k1.dim() == g.dim() && k2.dim() == g.dim(), "set dimension mismatch");

  std::vector<char> hit(samples.size(), 0);
  par::parallel_for(samples.size(), [&](std::size_t i) {
    hit[i] = intersects(k1.transformed(samples[i].h.transpose()), k2) ? 1 : 0;
  });

  const int cd = g.chart_dim();
  Vec wlo = samples[0].param, whi = samples[0].param;
  for (const auto& s : samples) {
    wlo = wlo.cwiseMin(s.param);
    whi = whi.cwiseMax(s.param);
  }

  TransporterReport r;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!hit[i]) continue;
    const Vec& p = samples[i].param;
    r.hits.push_back(p);
    r.param_radius = std::max(r.param_radius, p.cwiseAbs().maxCoeff());
    for (int a = 0; a < cd; ++a) {
      const double margin = 0.1 * (whi(a) - wlo(a));
      if (p(a) < wlo(a) + margin || p(a) > whi(a) - margin) r.bounded = false;
    }
  }
  return r;
}

struct OrbitCoverReport {
  double covered_fraction = 0.0;
  std::vector<long> witness;  // per region point: first covering sample, -1 if none
};

// Checks region points against the sampled dual orbit of C: xi is covered
// by sample h when h^{-T} xi lands in C.
inline OrbitCoverReport orbit_covers(const DilationGroup& g, const FrequencySet& c,
                                     const std::vector<Vec>& region,
                                     const std::vector<GroupSample>& samples) {
  require(c.dim() == g.dim(), "set dimension mismatch");
  OrbitCoverReport r;
  r.witness.assign(region.size(), -1);
  std::vector<Mat> pullback(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) pullback[i] = inv_transpose(samples[i].h);
  par::parallel_for(region.size(), [&](std::size_t k) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (c.contains(pullback[i] * region[k])) {
        r.witness[k] = static_cast<long>(i);
        break;
      }
    }
  });
  std::size_t covered = 0;
  for (long w : r.witness)
    if (w >= 0) ++covered;
  r.covered_fraction = region.empty() ? 0.0 : static_cast<double>(covered) / region.size();
  return r;
}

}  // namespace coorbit
