#pragma once

// Norm evaluators: weighted mixed L^{p,q} quadrature norms on the sampled
// group, coorbit norms, decomposition and sequence norms, anisotropic Besov
// norms, amalgam norms, and the control-weight closed form. Weights on the
// full group are restricted to v(x,h) = v0(h).

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <coorbit/bapu.hpp>
#include <coorbit/common.hpp>
#include <coorbit/cover.hpp>
#include <coorbit/frequency_set.hpp>
#include <coorbit/grid.hpp>
#include <coorbit/group.hpp>
#include <coorbit/la.hpp>
#include <coorbit/signal.hpp>
#include <coorbit/transform.hpp>
#include <coorbit/window.hpp>

namespace coorbit {

struct NormSpec {
  double p = 2.0;
  double q = 2.0;
  GroupWeight v0;  // defaults to the constant weight 1
};

// Every evaluator that can drop mass reports the dropped fraction of
// ||fhat||^2 here instead of truncating silently.
struct NormResult {
  double value = 0.0;
  double truncation_mass = 0.0;
  std::vector<std::string> warnings;
};

inline double conjugate_exponent(double p) {
  check_exponent(p, "exponent");
  if (p == 1.0) return kInf;
  if (is_sup(p)) return 1.0;
  return p / (p - 1.0);
}

namespace detail {

// (cell * sum |F|^p)^{1/p} over one slice; max for p = infinity. The cell
// factor makes the sum a quadrature of the continuum integral.
inline double slice_lp(const std::vector<cplx>& F, double p, double cell) {
  if (is_sup(p)) {
    double m = 0.0;
    for (const cplx& z : F) {
      const double a = std::abs(z);
      require(std::isfinite(a), "non-finite value in norm input");
      m = std::max(m, a);
    }
    return m;
  }
  double acc = 0.0;
  for (const cplx& z : F) acc += std::pow(std::abs(z), p);
  return std::pow(cell * acc, 1.0 / p);
}

// Inner L^p over the spatial slice, outer L^q over the group samples with
// left Haar mass weight/|det h|. The weight may depend on the sample, which
// serves the conjugated-weight path of norm_dilation_covariance.
inline double mixed_norm_weighted(const GTransform& t, double p, double q,
                                  const std::function<double(const Mat&)>& v0,
                                  std::vector<std::string>* warnings = nullptr) {
  check_exponent(p, "inner exponent");
  check_exponent(q, "outer exponent");
  const double cell = t.grid.spatial_cell_volume();
  std::size_t skipped = 0;
  double acc = 0.0;
  for (std::size_t s = 0; s < t.samples.size(); ++s) {
    if (!t.flagged.empty() && t.flagged[s]) {
      ++skipped;
      continue;
    }
    const GroupSample& gs = t.samples[s];
    const double w = v0(gs.h);
    require(std::isfinite(w) && w > 0.0, "weight must be positive and finite");
    const double inner = w * slice_lp(t.coeffs[s], p, cell);
    require(std::isfinite(inner), "non-finite slice norm");
    if (is_sup(q))
      acc = std::max(acc, inner);
    else
      acc += gs.weight / std::abs(gs.h.determinant()) * std::pow(inner, q);
  }
  if (skipped > 0 && warnings)
    warnings->push_back(std::to_string(skipped) +
                        " slices excluded: dilated band leaves the grid");
  return is_sup(q) ? acc : std::pow(acc, 1.0 / q);
}

}  // namespace detail

inline double mixed_norm(const GTransform& t, const NormSpec& spec,
                         std::vector<std::string>* warnings = nullptr) {
  return detail::mixed_norm_weighted(
      t, spec.p, spec.q, [&](const Mat& h) { return spec.v0(h); }, warnings);
}

inline double coorbit_norm(const Signal& f, const Window& w,
                           const std::vector<GroupSample>& samples,
                           const NormSpec& spec) {
  return mixed_norm(cwt(f, w, samples), spec);
}

// ||(||inverse FFT of phi_i * fhat||_{L^p})_i||_{l^q_u}. Signal mass at
// nodes the partition does not reach is reported, never silently dropped.
inline NormResult decomposition_norm(const Signal& f, const Bapu& b,
                                     const ModerateWeight& u, double p, double q) {
  check_exponent(p, "inner exponent");
  check_exponent(q, "outer exponent");
  require(f.grid == b.grid, "signal and partition grids differ");
  require(u.values.size() == b.phis.size(), "weight and partition sizes differ");
  const std::size_t total = f.grid.total();
  NormResult r;

  double active_mass = 0.0, lost_mass = 0.0;
  for (std::size_t n = 0; n < total; ++n) {
    const double m2 = std::norm(f.fhat[n]);
    if (m2 == 0.0) continue;
    active_mass += m2;
    double cover = 0.0;
    for (const auto& phi : b.phis) cover += phi[n];
    if (cover <= 1e-6) lost_mass += m2;
  }
  if (active_mass > 0.0) r.truncation_mass = lost_mass / active_mass;
  if (r.truncation_mass > 0.0)
    r.warnings.push_back("signal mass fraction outside the partition: " +
                         std::to_string(r.truncation_mass));

  const double cell = f.grid.spatial_cell_volume();
  std::vector<double> terms(b.phis.size(), 0.0);
  par::parallel_for(b.phis.size(), [&](std::size_t i) {
    std::vector<cplx> band(total);
    for (std::size_t n = 0; n < total; ++n) band[n] = f.fhat[n] * b.phis[i][n];
    const std::vector<cplx> sp = to_spatial(f.grid, band);
    terms[i] = u.values[i] * detail::slice_lp(sp, p, cell);
  });

  if (is_sup(q)) {
    for (double t : terms) r.value = std::max(r.value, t);
  } else {
    double acc = 0.0;
    for (double t : terms) acc += std::pow(t, q);
    r.value = std::pow(acc, 1.0 / q);
  }
  return r;
}

// One atom of a sampled coefficient family: scale index j picks the group
// component h_j, k indexes the spatial node within that scale.
struct SequenceEntry {
  long j = 0;
  long k = 0;
  Mat h;
  Vec x;
  cplx c;
};

struct SequenceData {
  std::vector<SequenceEntry> entries;
  NormSpec spec;
};

// Weighted l^{p,q} with one tile-measure factor |det h_j|^{1/p - 1/q} per
// scale (1/inf = 0): inner l^p over k scaled by v0(h_j) |det h_j|^{1/p-1/q},
// outer plain l^q over j. The factor is the L^p x L^q bookkeeping of an
// atom occupying a tile of spatial measure |det h_j|.
inline double sequence_norm(const SequenceData& sd) {
  const double p = sd.spec.p, q = sd.spec.q;
  check_exponent(p, "inner exponent");
  check_exponent(q, "outer exponent");
  const double ip = is_sup(p) ? 0.0 : 1.0 / p;
  const double iq = is_sup(q) ? 0.0 : 1.0 / q;

  struct ScaleAcc {
    double inner = 0.0;  // running sum |c|^p, or max |c| for p = inf
    double base = 1.0;   // v0(h_j) |det h_j|^{1/p - 1/q}
  };
  std::map<long, ScaleAcc> scales;
  for (const SequenceEntry& e : sd.entries) {
    const double a = std::abs(e.c);
    require(std::isfinite(a), "non-finite coefficient");
    auto [it, fresh] = scales.try_emplace(e.j);
    if (fresh) {
      const double det = std::abs(e.h.determinant());
      require(det > 0.0, "singular group component");
      it->second.base = sd.spec.v0(e.h) * std::pow(det, ip - iq);
    }
    if (is_sup(p))
      it->second.inner = std::max(it->second.inner, a);
    else
      it->second.inner += std::pow(a, p);
  }

  double acc = 0.0;
  for (const auto& [j, sc] : scales) {
    const double inner = is_sup(p) ? sc.inner : std::pow(sc.inner, 1.0 / p);
    const double term = sc.base * inner;
    if (is_sup(q))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, q);
  }
  return is_sup(q) ? acc : std::pow(acc, 1.0 / q);
}

// Anisotropic scale decomposition along powers of an expansive matrix:
// band j multiplies fhat by phihat((A^T)^{-j} xi), takes the spatial L^p,
// and weights the scale by |det A|^{j alpha}; the scales combine in l^q.
// The scale range adapts to the signal band; everything the kept scales do
// not reach is exact support arithmetic and lands in truncation_mass.
inline NormResult besov_norm(const Signal& f, const Mat& A, double alpha,
                             double p, double q, const Window& phi) {
  check_exponent(p, "inner exponent");
  check_exponent(q, "outer exponent");
  const int d = f.grid.dim;
  require(A.rows() == d && A.cols() == d, "dilation dimension mismatch");
  require(phi.grid.dim == d, "profile dimension mismatch");
  require(is_expansive(A), "dilation must be expansive");

  Vec lo(d), hi(d);
  phi.support.bbox(lo, hi);
  for (int a = 0; a < d; ++a)
    require(lo(a) >= -1.0 - 1e-9 && hi(a) <= 1.0 + 1e-9,
            "profile support must lie in the unit cube");
  require(!phi.support.contains(Vec::Zero(d)),
          "profile support must exclude the origin");

  // Active scales: those whose dilated support meets the signal band.
  const Mat Ai = inverse(A);
  constexpr long kMaxScale = 60;
  std::vector<long> active;
  std::vector<Mat> neg_pow;  // neg_pow[j] = A^{-j}, so dual_action gives (A^T)^{-j}
  {
    Mat fwd = identity(d), bwd = identity(d);
    for (long j = 0; j <= kMaxScale; ++j) {
      if (intersects(phi.support.transformed(fwd.transpose()), f.band)) active.push_back(j);
      fwd = A * fwd;
    }
    for (long j = -1; j >= -kMaxScale; --j) {
      bwd = Ai * bwd;
      if (intersects(phi.support.transformed(bwd.transpose()), f.band)) active.push_back(j);
    }
    std::sort(active.begin(), active.end());
    neg_pow.resize(active.size());
    for (std::size_t s = 0; s < active.size(); ++s) {
      Mat m = identity(d);
      const Mat& base = active[s] >= 0 ? Ai : A;
      for (long r = 0; r < std::labs(active[s]); ++r) m = base * m;
      neg_pow[s] = m;
    }
  }

  NormResult r;
  const std::size_t total = f.grid.total();

  // Mass accounting: a node carrying signal is covered when some kept scale
  // sees it. Uncovered mass is exactly the neglected part of the norm.
  double active_mass = 0.0, lost_mass = 0.0;
  for (std::size_t n = 0; n < total; ++n) {
    const double m2 = std::norm(f.fhat[n]);
    if (m2 == 0.0) continue;
    active_mass += m2;
    const Vec xi = f.grid.point(n);
    double seen = 0.0;
    for (std::size_t s = 0; s < active.size() && seen <= 1e-12; ++s)
      seen += std::norm(window_value(phi, dual_action(neg_pow[s], xi)));
    if (seen <= 1e-12) lost_mass += m2;
  }
  if (active_mass > 0.0) r.truncation_mass = lost_mass / active_mass;
  require(r.truncation_mass <= 1e-6,
          "profile scales do not cover the signal band");
  if (r.truncation_mass > 0.0)
    r.warnings.push_back("signal mass fraction outside the kept scales: " +
                         std::to_string(r.truncation_mass));
  if (active.empty() || active_mass == 0.0) return r;

  const double cell = f.grid.spatial_cell_volume();
  const double detA = std::abs(A.determinant());
  std::vector<double> terms(active.size(), 0.0);
  par::parallel_for(active.size(), [&](std::size_t s) {
    std::vector<cplx> band(total);
    for (std::size_t n = 0; n < total; ++n) {
      const Vec xi = f.grid.point(n);
      band[n] = f.fhat[n] * window_value(phi, dual_action(neg_pow[s], xi));
    }
    const std::vector<cplx> sp = to_spatial(f.grid, band);
    terms[s] = std::pow(detA, static_cast<double>(active[s]) * alpha) *
               detail::slice_lp(sp, p, cell);
  });

  if (is_sup(q)) {
    for (double t : terms) r.value = std::max(r.value, t);
  } else {
    double acc = 0.0;
    for (double t : terms) acc += std::pow(t, q);
    r.value = std::pow(acc, 1.0 / q);
  }
  return r;
}

// w0(h) = (v0(h) + v0(h^{-1})) * max(Delta_G^{-1/q}, Delta_G^{1/q - 1})
//       * (|det h|^{1/q - 1/p} + |det h|^{1/p - 1/q})
//       * (1 + |h| + |h^{-1}|)^s, with 1/inf = 0.
inline double control_weight(const GroupWeight& v0, double s, double p, double q,
                             const DilationGroup& g, const Mat& h) {
  check_exponent(p, "inner exponent");
  check_exponent(q, "outer exponent");
  const double ip = is_sup(p) ? 0.0 : 1.0 / p;
  const double iq = is_sup(q) ? 0.0 : 1.0 / q;
  const Mat hinv = inverse(h);
  const double dG = modular_G(g, h);
  const double det = std::abs(h.determinant());
  const double sym = v0(h) + v0(hinv);
  const double mod = std::max(std::pow(dG, -iq), std::pow(dG, iq - 1.0));
  const double dets = std::pow(det, iq - ip) + std::pow(det, ip - iq);
  const double growth = std::pow(1.0 + op_norm_inf(h) + op_norm_inf(hinv), s);
  return sym * mod * dets * growth;
}

inline double submultiplicativity_ratio(const GroupWeight& v0, const Mat& h1,
                                        const Mat& h2) {
  return v0(h1 * h2) / (v0(h1) * v0(h2));
}

// Local sup window: a spatial ball of fixed radius times a chart window
// around the identity, acting from the left. At (x, h_i) the window reaches
// the slices h_j = k h_i with k in the chart window, and within slice j the
// ball of radius `spatial_radius` around k x.
struct AmalgamWindow {
  double spatial_radius = 0.0;
  double chart_halfwidth = 0.0;
};

inline double amalgam_norm(const GTransform& t, const AmalgamWindow& U,
                           const NormSpec& spec) {
  require(U.spatial_radius > 0.0 && U.chart_halfwidth > 0.0,
          "window extents must be positive");
  const FreqGrid& g = t.grid;
  for (int a = 0; a < g.dim; ++a)
    require(2.0 * U.spatial_radius >= g.dx(a), "window smaller than one grid cell");

  const std::size_t S = t.samples.size();
  const std::size_t total = g.total();

  // Chart neighbors and left quotients k = h_j h_i^{-1} per pair.
  std::vector<std::vector<std::pair<std::size_t, Mat>>> reach(S);
  for (std::size_t i = 0; i < S; ++i) {
    const Mat hi_inv = inverse(t.samples[i].h);
    for (std::size_t j = 0; j < S; ++j) {
      if (!t.flagged.empty() && t.flagged[j]) continue;
      const Vec dp = t.samples[j].param - t.samples[i].param;
      if (dp.cwiseAbs().maxCoeff() > U.chart_halfwidth + 1e-12) continue;
      reach[i].emplace_back(j, Mat(t.samples[j].h * hi_inv));
    }
  }

  GTransform sharp;
  sharp.samples = t.samples;
  sharp.grid = g;
  sharp.flagged = t.flagged;
  sharp.coeffs.assign(S, std::vector<cplx>(total, cplx(0.0, 0.0)));

  par::parallel_for(S, [&](std::size_t i) {
    if (!t.flagged.empty() && t.flagged[i]) return;
    const double r = U.spatial_radius;
    for (std::size_t n = 0; n < total; ++n) {
      const Vec x = g.spatial_point(n);
      double sup = 0.0;
      for (const auto& [j, k] : reach[i]) {
        const Vec c = k * x;
        // Per-axis index window of the ball, clipped to the lattice.
        std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
        bool empty = false;
        for (int a = 0; a < g.dim; ++a) {
          const double dx = g.dx(a);
          lo[a] = std::max(0, static_cast<int>(std::ceil((c(a) - r) / dx)) + g.n[a] / 2);
          hi[a] = std::min(g.n[a] - 1,
                           static_cast<int>(std::floor((c(a) + r) / dx)) + g.n[a] / 2);
          if (lo[a] > hi[a]) empty = true;
        }
        if (empty) continue;
        std::array<int, 3> idx{lo[0], lo[1], lo[2]};
        while (true) {
          Vec y(g.dim);
          for (int a = 0; a < g.dim; ++a) y(a) = (idx[a] - g.n[a] / 2) * g.dx(a);
          if ((y - c).norm() <= r + 1e-12)
            sup = std::max(sup, std::abs(t.coeffs[j][g.flat(idx)]));
          int a = 0;
          for (; a < g.dim; ++a) {
            if (++idx[a] <= hi[a]) break;
            idx[a] = lo[a];
          }
          if (a == g.dim) break;
        }
      }
      sharp.coeffs[i][n] = cplx(sup, 0.0);
    }
  });

  return mixed_norm(sharp, spec);
}

struct DilationCovarianceReport {
  double lhs = 0.0;   // norm of the dilated signal under v0
  double rhs = 0.0;   // norm of the original signal under the conjugated weight
  double ratio = 0.0;
};

// Compares the coorbit norm of the dilated signal against the norm of the
// original signal under h -> v0(g h g^{-1}). The dilation must fix every
// sampled group element under conjugation; that is sufficient for the
// normalizer condition on all built-in (abelian) groups.
inline DilationCovarianceReport norm_dilation_covariance(
    const Signal& f, const Vec& g_diag, const Window& w,
    const std::vector<GroupSample>& samples, const NormSpec& spec) {
  const int d = f.grid.dim;
  require(static_cast<int>(g_diag.size()) == d, "dilation dimension mismatch");
  for (int a = 0; a < d; ++a) require(g_diag(a) > 0.0, "dilation entries must be positive");

  Mat g = Mat::Zero(d, d), ginv = Mat::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    g(a, a) = g_diag(a);
    ginv(a, a) = 1.0 / g_diag(a);
  }
  for (const GroupSample& s : samples) {
    const Mat conj = g * s.h * ginv;
    require(op_norm_inf(conj - s.h) <= 1e-9 * (1.0 + op_norm_inf(s.h)),
            "dilation does not normalize the sampled group");
  }

  DilationCovarianceReport rep;
  const Signal fg = dilation_unitary(f, g_diag);
  const Window wg = resample_window(w, fg.grid);
  rep.lhs = coorbit_norm(fg, wg, samples, spec);
  const GTransform t = cwt(f, w, samples);
  rep.rhs = detail::mixed_norm_weighted(
      t, spec.p, spec.q, [&](const Mat& h) { return spec.v0(g * h * ginv); });
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? kInf : 1.0);
  return rep;
}

}  // namespace coorbit
