#pragma once

// FFT-based wavelet analysis over G = R^d x| H. A transform slice at group
// sample h is computed in frequency,
//   slice_hat(xi) = |det h|^{1/2} fhat(xi) conj(psi_hat(h^T xi)),
// then carried to the spatial lattice; this is the inner product against
// every lattice translate at dilation h.

#include <string>

#include "coorbit/common.hpp"
#include "coorbit/grid.hpp"
#include "coorbit/group.hpp"
#include "coorbit/signal.hpp"
#include "coorbit/window.hpp"

namespace coorbit {

struct GTransform {
  std::vector<GroupSample> samples;
  FreqGrid grid;
  std::vector<std::vector<cplx>> coeffs;  // [sample][spatial node]
  std::vector<char> flagged;              // dilated window band escapes the grid
  std::string window_id, signal_id;
};

inline GTransform cwt(const Signal& f, const Window& w, const std::vector<GroupSample>& samples) {
  require(f.grid == w.grid, "signal and window grids differ");
  GTransform t;
  t.samples = samples;
  t.grid = f.grid;
  t.coeffs.resize(samples.size());
  t.flagged.assign(samples.size(), 0);
  const std::size_t total = f.grid.total();

  par::parallel_for(samples.size(), [&](std::size_t i) {
    const Mat& h = samples[i].h;
    const Mat ht = h.transpose();
    const double root_det = std::sqrt(std::abs(h.determinant()));

    Vec blo, bhi;
    w.support.transformed(inv_transpose(h)).bbox(blo, bhi);
    for (int a = 0; a < f.grid.dim; ++a)
      if (blo(a) < f.grid.freq_lo(a) || bhi(a) > f.grid.freq_hi(a)) t.flagged[i] = 1;

    std::vector<cplx> slice_hat(total);
    for (std::size_t n = 0; n < total; ++n) {
      if (f.fhat[n] == cplx(0.0, 0.0)) {
        slice_hat[n] = cplx(0.0, 0.0);
        continue;
      }
      slice_hat[n] = root_det * f.fhat[n] * std::conj(window_value(w, ht * f.grid.point(n)));
    }
    t.coeffs[i] = to_spatial(f.grid, slice_hat);
  });
  return t;
}

// W(x, h_i) off the spatial lattice, multilinear in x.
inline cplx gtransform_value(const GTransform& t, std::size_t sample_index, const Vec& x) {
  require(sample_index < t.coeffs.size(), "sample index out of range");
  return interp_spatial(t.grid, t.coeffs[sample_index], x);
}

struct ReproducingReport {
  double residual = 0.0;    // relative L2 discrepancy over the sampled grid
  double rhs_norm = 0.0;
  bool coverage_ok = true;  // group window contains the transporter set strictly
};

// Convolution identity check: the analysis of f by psi1, convolved over G
// against the cross-kernel W_{psi2} psi1, is compared with the direct
// analysis by psi2. Group products are taken through the chart; slice L2
// norms are evaluated in frequency, which equals the spatial quadrature
// norm exactly.
inline ReproducingReport reproducing_residual(const DilationGroup& g, const Signal& f,
                                              const Window& w1, const Window& w2,
                                              const std::vector<GroupSample>& samples) {
  require(f.grid == w1.grid && f.grid == w2.grid, "grids differ");
  require(!samples.empty(), "empty sample list");

  ReproducingReport rep;
  rep.coverage_ok = transporter_probe(g, f.band, w1.support, samples).bounded;

  std::vector<std::size_t> active;
  for (std::size_t n = 0; n < f.grid.total(); ++n)
    if (f.fhat[n] != cplx(0.0, 0.0)) active.push_back(n);
  const std::size_t na = active.size();
  const std::size_t ns = samples.size();

  // Per sample h: psi1 on the dual orbit of every active node, and the
  // frequency side of the analysis slice.
  std::vector<std::vector<cplx>> psi1_at(ns);
  std::vector<std::vector<cplx>> slice1(ns);
  par::parallel_for(ns, [&](std::size_t i) {
    const Mat ht = samples[i].h.transpose();
    const double root_det = std::sqrt(std::abs(samples[i].h.determinant()));
    psi1_at[i].resize(na);
    slice1[i].resize(na);
    for (std::size_t n = 0; n < na; ++n) {
      psi1_at[i][n] = window_value(w1, ht * f.grid.point(active[n]));
      slice1[i][n] = root_det * f.fhat[active[n]] * std::conj(psi1_at[i][n]);
    }
  });

  std::vector<double> num(ns, 0.0), den(ns, 0.0);
  par::parallel_for(ns, [&](std::size_t k) {
    const Mat& hk = samples[k].h;
    const double det_k = std::abs(hk.determinant());
    const Mat hkt = hk.transpose();

    std::vector<cplx> lhs(na, cplx(0.0, 0.0));
    Vec eta(f.grid.dim);
    for (std::size_t i = 0; i < ns; ++i) {
      // g = h^{-1} k through the chart; the cancellation h g = k happens
      // numerically, not symbolically.
      const Mat gm = chart_quotient(g, samples[i].param, samples[k].param);
      const Mat hg_t = (samples[i].h * gm).transpose();
      const double root_det_g = std::sqrt(std::abs(gm.determinant()));
      const double wh = samples[i].weight;
      for (std::size_t n = 0; n < na; ++n) {
        if (psi1_at[i][n] == cplx(0.0, 0.0)) continue;
        eta.noalias() = hg_t * f.grid.point(active[n]);
        lhs[n] += wh * slice1[i][n] * root_det_g * psi1_at[i][n] * std::conj(window_value(w2, eta));
      }
    }
    const double mu = samples[k].weight / det_k * f.grid.cell_volume();
    for (std::size_t n = 0; n < na; ++n) {
      const cplx rhs = std::sqrt(det_k) * f.fhat[active[n]] * std::conj(window_value(w2, hkt * f.grid.point(active[n])));
      num[k] += mu * std::norm(lhs[n] - rhs);
      den[k] += mu * std::norm(rhs);
    }
  });
  double nsum = 0.0, dsum = 0.0;
  for (std::size_t k = 0; k < ns; ++k) {
    nsum += num[k];
    dsum += den[k];
  }
  require(dsum > 0.0, "reference side vanishes");
  rep.rhs_norm = std::sqrt(dsum);
  rep.residual = std::sqrt(nsum / dsum);
  return rep;
}

struct DecayReport {
  double fitted_c = 0.0;       // max |W| (1+|x|)^N (1+|h|)^{-(N+1/2)} over transporter hits
  double outside_peak = 0.0;   // max |W| over samples outside the transporter set
  double peak = 0.0;           // global max |W|
  std::size_t hit_count = 0;
};

// Coefficient decay against the (1+|x|)^{-N} envelope, with the transporter
// indicator: slices at h with h^T K1 disjoint from K2 must vanish.
inline DecayReport decay_envelope(const GTransform& t, const FrequencySet& k1, const FrequencySet& k2,
                                  double n_exponent) {
  DecayReport r;
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const Mat& h = t.samples[i].h;
    const bool hit = intersects(k1.transformed(h.transpose()), k2);
    if (hit) ++r.hit_count;
    const double hfactor = std::pow(1.0 + op_norm_inf(h), n_exponent + 0.5);
    for (std::size_t x = 0; x < t.coeffs[i].size(); ++x) {
      const double m = std::abs(t.coeffs[i][x]);
      r.peak = std::max(r.peak, m);
      if (!hit) {
        r.outside_peak = std::max(r.outside_peak, m);
        continue;
      }
      const double xnorm = t.grid.spatial_point(x).norm();
      r.fitted_c = std::max(r.fitted_c, m * std::pow(1.0 + xnorm, n_exponent) / hfactor);
    }
  }
  return r;
}

}  // namespace coorbit
