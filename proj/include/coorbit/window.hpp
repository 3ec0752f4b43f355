#pragma once

// Band-limited analyzing windows: frequency-side samples on a FreqGrid, a
// declared support set, and optionally an exact frequency-side evaluator.
// Off-grid evaluation is multilinear unless the exact evaluator is present;
// test profiles (indicators, closed-form bumps) use the exact channel so
// quadrature studies are not polluted by interpolation error.

#include <functional>
#include <optional>

#include "coorbit/common.hpp"
#include "coorbit/frequency_set.hpp"
#include "coorbit/grid.hpp"
#include "coorbit/group.hpp"

namespace coorbit {

struct Window {
  FreqGrid grid;
  std::vector<cplx> fhat;
  FrequencySet support = FrequencySet::interval(0.0, 1.0);
  std::optional<double> calderon_constant;
  std::function<cplx(const Vec&)> analytic;  // exact fhat evaluator, optional
};

inline cplx window_value(const Window& w, const Vec& xi) {
  if (w.analytic) return w.analytic(xi);
  return interp_freq(w.grid, w.fhat, xi);
}

// Samples a frequency-side profile onto the grid, zeroing it outside the
// declared support. keep_analytic retains the exact evaluator.
inline Window make_window(const FreqGrid& grid, FrequencySet support,
                          const std::function<cplx(const Vec&)>& profile, bool keep_analytic = false) {
  require(support.dim() == grid.dim, "support dimension mismatch");
  Window w;
  w.grid = grid;
  w.support = support;
  w.fhat.assign(grid.total(), cplx(0.0, 0.0));
  for (std::size_t f = 0; f < grid.total(); ++f) {
    const Vec xi = grid.point(f);
    if (w.support.contains(xi)) w.fhat[f] = profile(xi);
  }
  if (keep_analytic) {
    FrequencySet supp = support;
    w.analytic = [supp, profile](const Vec& xi) {
      return supp.contains(xi) ? profile(xi) : cplx(0.0, 0.0);
    };
  }
  return w;
}

namespace detail {

// Smooth unit step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// Plateau profile in one variable: 1 on [lo, hi], smooth ramps of width
// `margin` on both sides, 0 outside.
inline double plateau(double x, double lo, double hi, double margin) {
  if (x < lo) return smooth_step((x - (lo - margin)) / margin);
  if (x > hi) return smooth_step(((hi + margin) - x) / margin);
  return 1.0;
}

inline double bump_profile(const FrequencySet& c, double margin, const Vec& xi) {
  switch (c.kind()) {
    case FrequencySet::Kind::Box: {
      double v = 1.0;
      for (int a = 0; a < c.dim(); ++a) v *= plateau(xi(a), c.box_lo()(a), c.box_hi()(a), margin);
      return v;
    }
    case FrequencySet::Kind::Annulus:
      return plateau(xi.norm(), c.annulus_inner(), c.annulus_outer(), margin);
    case FrequencySet::Kind::Union: {
      double v = 0.0;
      for (const auto& p : c.parts()) v += bump_profile(p, margin, xi);
      return v;
    }
    case FrequencySet::Kind::Image:
      fail("bump construction needs box, annulus, or union plateaus");
  }
  return 0.0;
}

}  // namespace detail

// Smooth nonnegative window equal to 1 on C, supported in the margin-
// enlarged set, which must stay strictly inside the given region and the
// grid extent. Union parts may not collide after enlargement.
inline Window build_bump_window(const FreqGrid& grid, const FrequencySet& c, double margin,
                                const EssentialSupport& region) {
  require(margin > 0.0, "margin must be positive");
  require(c.dim() == grid.dim, "plateau set dimension mismatch");
  FrequencySet supp = c.enlarged(margin);
  require(region.margin(supp) > 0.0, "enlarged support touches the excluded frequency region");
  Vec lo, hi;
  supp.bbox(lo, hi);
  for (int a = 0; a < grid.dim; ++a)
    require(lo(a) >= grid.freq_lo(a) && hi(a) <= grid.freq_hi(a), "support exceeds the grid extent");
  if (c.kind() == FrequencySet::Kind::Union) {
    const auto& parts = supp.parts();
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (std::size_t j = i + 1; j < parts.size(); ++j)
        require(!intersects(parts[i], parts[j]), "union parts overlap after enlargement");
  }
  auto profile = [c, margin](const Vec& xi) { return cplx(detail::bump_profile(c, margin, xi), 0.0); };
  return make_window(grid, supp, profile, /*keep_analytic=*/true);
}

inline Window build_bump_window(const FreqGrid& grid, const FrequencySet& c, double margin) {
  return build_bump_window(grid, c, margin, EssentialSupport::punctured(grid.dim));
}

struct CalderonResult {
  std::vector<double> values;
  std::vector<char> reliable;  // contributing samples stay inside the window
  double min = kInf, max = -kInf, mean = 0.0;
};

// c(xi) = sum over samples of weight * |psi_hat(h^T xi)|^2. A probe point
// is unreliable when no sample contributes or a contributing sample lies
// in the outer 5% of the chart window (coverage may be truncated there).
inline CalderonResult calderon_integral(const Window& w, const DilationGroup& g,
                                        const std::vector<GroupSample>& samples,
                                        const std::vector<Vec>& probe) {
  require(!samples.empty(), "empty sample list");
  require(g.dim() == w.grid.dim, "group dimension mismatch");
  const int cd = g.chart_dim();
  Vec wlo = samples[0].param, whi = samples[0].param;
  for (const auto& s : samples) {
    wlo = wlo.cwiseMin(s.param);
    whi = whi.cwiseMax(s.param);
  }

  CalderonResult r;
  r.values.assign(probe.size(), 0.0);
  r.reliable.assign(probe.size(), 0);
  par::parallel_for(probe.size(), [&](std::size_t k) {
    double acc = 0.0;
    bool any = false, edge = false;
    for (const auto& s : samples) {
      const cplx v = window_value(w, dual_action(s.h, probe[k]));
      const double m2 = std::norm(v);
      if (m2 == 0.0) continue;
      acc += s.weight * m2;
      any = true;
      for (int a = 0; a < cd; ++a) {
        const double margin = 0.05 * (whi(a) - wlo(a));
        if (s.param(a) < wlo(a) + margin || s.param(a) > whi(a) - margin) edge = true;
      }
    }
    r.values[k] = acc;
    r.reliable[k] = (any && !edge) ? 1 : 0;
  });
  for (double v : r.values) {
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
    r.mean += v;
  }
  if (!probe.empty()) r.mean /= static_cast<double>(probe.size());
  return r;
}

// Rescales psi so the sampled Calderon integral is 1. When c is constant
// over the probe (within 1% relative spread) a global rescale preserves
// the exact evaluator; otherwise psi_hat is divided pointwise by sqrt(c)
// at every support node, the orbit-wise extension of the probe values.
inline Window normalize_calderon(const Window& w, const DilationGroup& g,
                                 const std::vector<GroupSample>& samples,
                                 const std::vector<Vec>& probe) {
  require(!probe.empty(), "empty probe list");
  CalderonResult c = calderon_integral(w, g, samples, probe);
  require(c.max > 0.0, "not admissible: Calderon integral vanishes on the probe");
  require(c.min > 1e-6 * c.max, "not admissible: Calderon integral nearly vanishes on part of the probe");

  Window out = w;
  if ((c.max - c.min) <= 1e-2 * c.mean) {
    const double scale = 1.0 / std::sqrt(c.mean);
    for (auto& v : out.fhat) v *= scale;
    if (w.analytic) {
      auto base = w.analytic;
      out.analytic = [base, scale](const Vec& xi) { return scale * base(xi); };
    }
  } else {
    if (w.analytic) {
      // Off-grid queries divide by the same quadrature as the grid nodes,
      // keeping the exact channel consistent with the stored samples.
      auto base = w.analytic;
      auto quad = samples;
      out.analytic = [base, quad](const Vec& xi) {
        double c = 0.0;
        for (const auto& s : quad) c += s.weight * std::norm(base(dual_action(s.h, xi)));
        return c > 0.0 ? base(xi) / std::sqrt(c) : cplx(0.0, 0.0);
      };
    } else {
      out.analytic = nullptr;
    }
    std::vector<Vec> nodes;
    std::vector<std::size_t> where;
    for (std::size_t f = 0; f < w.grid.total(); ++f) {
      if (std::abs(w.fhat[f]) == 0.0) continue;
      nodes.push_back(w.grid.point(f));
      where.push_back(f);
    }
    CalderonResult cn = calderon_integral(w, g, samples, nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      require(cn.values[i] > 1e-12 * c.max, "not admissible: Calderon integral vanishes at a support node");
      out.fhat[where[i]] /= std::sqrt(cn.values[i]);
    }
  }
  out.calderon_constant = 1.0;
  return out;
}

// Transfers a window onto another grid, evaluating through the exact
// channel when present. Support, evaluator, and normalization carry over;
// the Calderon integral does not depend on the sampling grid.
inline Window resample_window(const Window& w, const FreqGrid& grid) {
  require(grid.dim == w.grid.dim, "resample_window: dimension mismatch");
  Vec lo, hi;
  w.support.bbox(lo, hi);
  for (int a = 0; a < grid.dim; ++a)
    require(lo(a) >= grid.freq_lo(a) && hi(a) <= grid.freq_hi(a),
            "resample_window: support exceeds the target grid extent");
  Window out;
  out.grid = grid;
  out.support = w.support;
  out.calderon_constant = w.calderon_constant;
  out.analytic = w.analytic;
  out.fhat.assign(grid.total(), cplx(0.0, 0.0));
  for (std::size_t f = 0; f < grid.total(); ++f) {
    const Vec xi = grid.point(f);
    if (w.support.contains(xi)) out.fhat[f] = window_value(w, xi);
  }
  return out;
}

}  // namespace coorbit
