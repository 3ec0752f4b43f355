#pragma once

// Discretization of the analysis transform: sampling sets over the group
// lattice and a cubic spatial lattice, analysis coefficients, atomic
// synthesis, empirical frame and Riesz bounds, and Richardson-iteration
// reconstruction from frame coefficients.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <coorbit/common.hpp>
#include <coorbit/cover.hpp>
#include <coorbit/frequency_set.hpp>
#include <coorbit/grid.hpp>
#include <coorbit/group.hpp>
#include <coorbit/norms.hpp>
#include <coorbit/signal.hpp>
#include <coorbit/transform.hpp>
#include <coorbit/window.hpp>

namespace coorbit {

struct SamplePoint {
  long j = 0;  // index into the group lattice
  long k = 0;  // flat index of the spatial lattice node
  Mat h;
  Vec x;  // h_j applied to the cubic lattice node
};

struct SamplingSet {
  WellSpreadSet lattice;
  double spacing = 1.0;
  std::vector<SamplePoint> points;
};

// X = {(h_j x_k, h_j)} with x_k on the cubic lattice of the given spacing,
// kept where the transported node lies inside the spatial box of the grid.
// Finer dilations therefore carry proportionally more spatial nodes.
inline SamplingSet make_sampling_set(const WellSpreadSet& ws, double spacing,
                                     const FreqGrid& grid) {
  require(spacing > 0.0, "lattice spacing must be positive");
  require(grid.dim == ws.group.dim(), "grid and group dimensions differ");
  const int d = grid.dim;
  SamplingSet X;
  X.lattice = ws;
  X.spacing = spacing;
  for (std::size_t j = 0; j < ws.params.size(); ++j) {
    const Mat h = ws.member(j);
    // Per-axis index bounds: |(h k a)_x| can mix axes, so bound each lattice
    // index by the box radius over the row sums of h^{-1}.
    const Mat hinv = inverse(h);
    double reach = 0.0;
    for (int a = 0; a < d; ++a) {
      double row = 0.0, box = 0.0;
      for (int b = 0; b < d; ++b) {
        row += std::abs(hinv(a, b));
        box = std::max(box, std::max(std::abs(grid.spatial_lo(b)), grid.spatial_hi(b)));
      }
      reach = std::max(reach, row * box / spacing);
    }
    const long m = static_cast<long>(std::floor(reach)) + 1;
    std::vector<long> idx(d, -m);
    while (true) {
      Vec xk(d);
      for (int a = 0; a < d; ++a) xk(a) = static_cast<double>(idx[a]) * spacing;
      const Vec x = h * xk;
      bool inside = true;
      long flat = 0;
      for (int a = 0; a < d; ++a) {
        if (x(a) < grid.spatial_lo(a) || x(a) > grid.spatial_hi(a)) inside = false;
        flat = flat * (2 * m + 1) + (idx[a] + m);
      }
      if (inside) X.points.push_back({static_cast<long>(j), flat, h, x});
      int a = 0;
      for (; a < d; ++a) {
        if (++idx[a] <= m) break;
        idx[a] = -m;
      }
      if (a == d) break;
    }
  }
  require(!X.points.empty(), "no sample point lies inside the grid");
  return X;
}

namespace detail {

inline std::vector<GroupSample> lattice_samples(const WellSpreadSet& ws) {
  std::vector<GroupSample> s(ws.params.size());
  for (std::size_t j = 0; j < ws.params.size(); ++j)
    s[j] = GroupSample{ws.member(j), ws.params[j], 1.0};
  return s;
}

}  // namespace detail

// Coefficients c_i = W_psi f(x_i, h_j), read from the transform slices by
// multilinear interpolation off the spatial lattice.
inline SequenceData analysis(const Signal& f, const Window& w, const SamplingSet& X,
                             const NormSpec& spec = {}) {
  const GTransform t = cwt(f, w, detail::lattice_samples(X.lattice));
  SequenceData sd;
  sd.spec = spec;
  sd.entries.reserve(X.points.size());
  for (const SamplePoint& pt : X.points) {
    for (int a = 0; a < t.grid.dim; ++a)
      require(pt.x(a) >= t.grid.spatial_lo(a) && pt.x(a) <= t.grid.spatial_hi(a),
              "sample point outside the computed region");
    const cplx c = gtransform_value(t, static_cast<std::size_t>(pt.j), pt.x);
    sd.entries.push_back({pt.j, pt.k, pt.h, pt.x, c});
  }
  return sd;
}

// f_hat(xi) = sum_i c_i |det h_j|^{1/2} exp(-2 pi i <x_i, xi>) psi_hat(h_j^T xi),
// the frequency image of a coefficient combination of transported windows.
inline Signal synthesis(const SequenceData& sd, const Window& w) {
  const FreqGrid& g = w.grid;
  const std::size_t total = g.total();
  Signal out;
  out.grid = g;
  out.fhat.assign(total, cplx(0.0, 0.0));

  // Group entries sharing a dilation so the window row is evaluated once.
  std::map<long, std::vector<const SequenceEntry*>> groups;
  for (const SequenceEntry& e : sd.entries) groups[e.j].push_back(&e);
  std::vector<const std::vector<const SequenceEntry*>*> rows;
  std::vector<const SequenceEntry*> rep;
  for (const auto& [j, v] : groups) {
    rows.push_back(&v);
    rep.push_back(v.front());
  }

  std::vector<std::vector<cplx>> contrib(rows.size());
  par::parallel_for(rows.size(), [&](std::size_t r) {
    const Mat& h = rep[r]->h;
    const double amp = std::sqrt(std::abs(h.determinant()));
    std::vector<cplx>& acc = contrib[r];
    acc.assign(total, cplx(0.0, 0.0));
    for (std::size_t n = 0; n < total; ++n) {
      const Vec xi = g.point(n);
      const cplx wv = window_value(w, dual_action(h, xi));
      if (wv == cplx(0.0, 0.0)) continue;
      cplx s(0.0, 0.0);
      for (const SequenceEntry* e : *rows[r]) {
        const double phase = -2.0 * kPi * e->x.dot(xi);
        s += e->c * cplx(std::cos(phase), std::sin(phase));
      }
      acc[n] = amp * wv * s;
    }
  });
  for (const auto& acc : contrib)
    for (std::size_t n = 0; n < total; ++n) out.fhat[n] += acc[n];

  std::vector<FrequencySet> bands;
  for (const SequenceEntry* e : rep)
    bands.push_back(w.support.transformed(inverse(Mat(e->h.transpose()))));
  out.band = bands.empty() ? w.support : FrequencySet::join(bands);
  return out;
}

struct FrameBounds {
  double A_hat = 0.0;
  double B_hat = 0.0;
};

// Empirical two-sided bound of sequence_norm(analysis(f)) against
// coorbit_norm(f) over a signal suite; quad carries the Haar quadrature of
// the continuum norm.
inline FrameBounds frame_bounds(const std::vector<Signal>& suite, const Window& w,
                                const SamplingSet& X,
                                const std::vector<GroupSample>& quad,
                                const NormSpec& spec) {
  require(!suite.empty(), "empty signal suite");
  FrameBounds fb{kInf, 0.0};
  for (const Signal& f : suite) {
    const double co = coorbit_norm(f, w, quad, spec);
    require(co > 0.0, "zero-norm signal in suite");
    const double sn = sequence_norm(analysis(f, w, X, spec));
    fb.A_hat = std::min(fb.A_hat, sn / co);
    fb.B_hat = std::max(fb.B_hat, sn / co);
  }
  return fb;
}

// Empirical Riesz-sequence bounds: coorbit norm of the synthesized signal
// against the sequence norm of the coefficients.
inline FrameBounds riesz_bounds(const std::vector<SequenceData>& suite, const Window& w,
                                const std::vector<GroupSample>& quad,
                                const NormSpec& spec) {
  require(!suite.empty(), "empty coefficient suite");
  FrameBounds rb{kInf, 0.0};
  for (const SequenceData& sd : suite) {
    const double sn = sequence_norm(sd);
    require(sn > 0.0, "zero sequence in suite");
    const double co = coorbit_norm(synthesis(sd, w), w, quad, spec);
    rb.A_hat = std::min(rb.A_hat, co / sn);
    rb.B_hat = std::max(rb.B_hat, co / sn);
  }
  return rb;
}

struct ReconstructionResult {
  Signal f;
  std::vector<double> residuals;  // relative L2 residual per iteration
};

// Richardson iteration on the frame operator S f = synthesis(analysis(f)):
// f_0 = relax * synthesis(sd), f_{n+1} = f_n + relax (synthesis(sd) - S f_n).
// Stops early once the residual stalls at the interpolation floor; errors
// out when the residual grows three times in a row.
inline ReconstructionResult frame_reconstruct(const SequenceData& sd, const Window& w,
                                              const SamplingSet& X, int iterations,
                                              double relax) {
  require(iterations >= 0, "iteration count must be nonnegative");
  require(relax >= 0.0 && std::isfinite(relax), "relaxation must be finite and nonnegative");
  const Signal g = synthesis(sd, w);
  const double gnorm = l2_freq(g.grid, g.fhat);

  ReconstructionResult out;
  out.f = g;
  for (auto& z : out.f.fhat) z *= relax;
  int rising = 0;
  double prev = kInf;
  for (int it = 0; it < iterations; ++it) {
    const Signal Sf = synthesis(analysis(out.f, w, X), w);
    double rr = 0.0;
    for (std::size_t n = 0; n < g.fhat.size(); ++n) {
      const cplx r = g.fhat[n] - Sf.fhat[n];
      rr += std::norm(r);
      out.f.fhat[n] += relax * r;
    }
    const double res = gnorm > 0.0 ? std::sqrt(g.grid.cell_volume() * rr) / gnorm
                                   : std::sqrt(g.grid.cell_volume() * rr);
    out.residuals.push_back(res);
    if (res > prev * (1.0 + 1e-12)) {
      require(++rising < 3, "iteration diverges: residual grew three times in a row");
    } else {
      rising = 0;
    }
    prev = res;
  }
  return out;
}

}  // namespace coorbit
