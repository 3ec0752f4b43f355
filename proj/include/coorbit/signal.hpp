#pragma once

// Band-limited test signals: frequency samples on a grid plus the declared
// band. Random suites draw smooth random spectra inside prescribed bands;
// atoms are closed-form spectra that dilate exactly, so rescaling laws can
// be tested without resampling error.

#include <cstdint>
#include <functional>
#include <random>

#include "coorbit/common.hpp"
#include "coorbit/frequency_set.hpp"
#include "coorbit/grid.hpp"
#include "coorbit/window.hpp"

namespace coorbit {

struct Signal {
  FreqGrid grid;
  std::vector<cplx> fhat;
  FrequencySet band = FrequencySet::interval(0.0, 1.0);
};

inline Signal make_signal(const FreqGrid& grid, FrequencySet band,
                          const std::function<cplx(const Vec&)>& profile) {
  require(band.dim() == grid.dim, "band dimension mismatch");
  Signal s;
  s.grid = grid;
  s.band = band;
  s.fhat.assign(grid.total(), cplx(0.0, 0.0));
  for (std::size_t f = 0; f < grid.total(); ++f) {
    const Vec xi = grid.point(f);
    if (band.contains(xi)) s.fhat[f] = profile(xi);
  }
  return s;
}

inline double l2_norm(const Signal& s) { return l2_freq(s.grid, s.fhat); }

namespace detail {

// Smooth envelope equal to 1 on the inner 60% of the band, ramping to 0 at
// its edges, so random spectra stay strictly inside the declared band.
inline double band_envelope(const FrequencySet& band, const Vec& xi) {
  switch (band.kind()) {
    case FrequencySet::Kind::Box: {
      double v = 1.0;
      for (int a = 0; a < band.dim(); ++a) {
        const double lo = band.box_lo()(a), hi = band.box_hi()(a);
        const double m = 0.2 * (hi - lo);
        v *= plateau(xi(a), lo + m, hi - m, m);
      }
      return v;
    }
    case FrequencySet::Kind::Annulus: {
      const double lo = band.annulus_inner(), hi = band.annulus_outer();
      const double m = 0.2 * (hi - lo);
      return plateau(xi.norm(), lo + m, hi - m, m);
    }
    case FrequencySet::Kind::Union: {
      double v = 0.0;
      for (const auto& p : band.parts()) v = std::max(v, band_envelope(p, xi));
      return v;
    }
    case FrequencySet::Kind::Image:
      return 1.0;
  }
  return 0.0;
}

}  // namespace detail

// Random smooth spectrum supported in the band: complex Gaussian draws
// shaped by the band envelope. Deterministic for a fixed (grid, band, seed).
inline Signal random_band_signal(const FreqGrid& grid, const FrequencySet& band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Signal s;
  s.grid = grid;
  s.band = band;
  s.fhat.assign(grid.total(), cplx(0.0, 0.0));
  for (std::size_t f = 0; f < grid.total(); ++f) {
    const Vec xi = grid.point(f);
    if (!band.contains(xi)) continue;
    const double env = detail::band_envelope(band, xi);
    s.fhat[f] = env * cplx(nd(rng), nd(rng));
  }
  return s;
}

// Random symmetric-band suite inside |xi| in [r_lo, r_hi]: band centers are
// log-uniform, widths a random fraction of the center. Used by the norm
// equivalence studies.
inline std::vector<Signal> random_signal_suite(const FreqGrid& grid, double r_lo, double r_hi,
                                               int count, std::uint64_t seed) {
  require(0.0 < r_lo && r_lo < r_hi, "band range must satisfy 0 < r_lo < r_hi");
  std::vector<Signal> suite;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uc(std::log(2.0 * r_lo), std::log(0.5 * r_hi));
  std::uniform_real_distribution<double> uw(0.3, 0.9);
  for (int i = 0; i < count; ++i) {
    const double center = std::exp(uc(rng));
    const double half_width = 0.5 * uw(rng) * center;
    const double lo = std::max(center - half_width, r_lo);
    const double hi = std::min(center + half_width, r_hi);
    FrequencySet band = grid.dim == 1 ? FrequencySet::symmetric_band(lo, hi)
                                      : FrequencySet::annulus(grid.dim, lo, hi);
    suite.push_back(random_band_signal(grid, band, seed * 1000003ULL + static_cast<std::uint64_t>(i)));
  }
  return suite;
}

// Closed-form 1D spectra: sums of smooth bumps with linear phase,
//   fhat(xi) = sum_m amp_m exp(1 - 1/(1 - u^2)) e^{-2 pi i shift_m xi},
//   u = (xi - center_m) / width_m.
// Dilation f -> f(t .) maps the family to itself, exactly.
struct AtomMode {
  double amp, center, width, shift;
};

struct Atom {
  std::vector<AtomMode> modes;
};

inline cplx atom_value(const Atom& atom, double xi) {
  cplx acc(0.0, 0.0);
  for (const auto& m : atom.modes) {
    const double u = (xi - m.center) / m.width;
    if (std::abs(u) >= 1.0) continue;
    const double bump = std::exp(1.0 - 1.0 / (1.0 - u * u));
    acc += m.amp * bump * std::polar(1.0, -2.0 * kPi * m.shift * xi);
  }
  return acc;
}

// Spectrum of x -> f(t x): amplitudes shrink by 1/t, bands dilate by t,
// phases shrink by 1/t.
inline Atom dilated(const Atom& atom, double t) {
  require(t > 0.0, "dilation factor must be positive");
  Atom out;
  out.modes.reserve(atom.modes.size());
  for (const auto& m : atom.modes)
    out.modes.push_back({m.amp / t, m.center * t, m.width * t, m.shift / t});
  return out;
}

inline FrequencySet atom_band(const Atom& atom) {
  require(!atom.modes.empty(), "atom has no modes");
  std::vector<FrequencySet> parts;
  for (const auto& m : atom.modes)
    parts.push_back(FrequencySet::interval(m.center - m.width, m.center + m.width));
  return parts.size() == 1 ? parts[0] : FrequencySet::join(std::move(parts));
}

inline Signal atom_signal(const FreqGrid& grid, const Atom& atom) {
  require(grid.dim == 1, "atoms are one-dimensional");
  return make_signal(grid, atom_band(atom), [&atom](const Vec& xi) { return atom_value(atom, xi(0)); });
}

// Exact regridding under a diagonal frequency scaling: node n of the new
// grid is diag(s) times node n of the old one, so sample values transfer
// without interpolation.
inline Signal rescale_grid(const Signal& f, const Vec& s, double amplitude) {
  require(s.size() == f.grid.dim, "scale dimension mismatch");
  Mat m = Mat::Zero(f.grid.dim, f.grid.dim);
  std::array<double, 3> dxi = f.grid.dxi;
  std::array<double, 3> off = f.grid.offset;
  for (int a = 0; a < f.grid.dim; ++a) {
    require(s(a) > 0, "scales must be positive");
    m(a, a) = s(a);
    dxi[a] *= s(a);
    off[a] *= s(a);
  }
  Signal out;
  out.grid = FreqGrid::make(f.grid.dim, f.grid.n, dxi, off);
  out.fhat.resize(f.fhat.size());
  for (std::size_t k = 0; k < f.fhat.size(); ++k) out.fhat[k] = amplitude * f.fhat[k];
  out.band = f.band.transformed(m);
  return out;
}

// pi(0,g)f for diagonal positive g: fhat -> |det g|^{1/2} fhat(g^T xi).
inline Signal dilation_unitary(const Signal& f, const Vec& g) {
  double det = 1.0;
  Vec s(g.size());
  for (int a = 0; a < g.size(); ++a) {
    det *= g(a);
    s(a) = 1.0 / g(a);
  }
  return rescale_grid(f, s, std::sqrt(std::abs(det)));
}

// f(A.) for diagonal positive A: fhat -> |det A|^{-1} fhat(A^{-T} xi).
inline Signal dilated_argument(const Signal& f, const Vec& A) {
  double det = 1.0;
  for (int a = 0; a < A.size(); ++a) det *= A(a);
  return rescale_grid(f, A, 1.0 / std::abs(det));
}

}  // namespace coorbit
