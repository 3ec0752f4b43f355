#pragma once

// Frequency grids with DFT duality, continuum-scaled transforms, and
// multilinear interpolation.
//
// Conventions, used everywhere downstream:
//   forward transform kernel  e^{-2 pi i <x, xi>}
//   frequency nodes           xi_a(i) = offset_a + (i - N_a/2) dxi_a
//   spatial nodes             x_a(k)  = (k - N_a/2) dx_a,  dx_a = 1/(N_a dxi_a)
//   to_spatial(fhat)(x_k)     = prod(dxi) * sum_n fhat(xi_n) e^{+2 pi i x_k.xi_n}
//   to_frequency(f)(xi_n)     = prod(dx)  * sum_k f(x_k)    e^{-2 pi i x_k.xi_n}
// These are Riemann sums of the continuum transforms and exact mutual
// inverses on the grid; Parseval holds exactly:
//   prod(dx) sum|f|^2 = prod(dxi) sum|fhat|^2.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <mutex>
#include <vector>

#include "coorbit/common.hpp"
#include "coorbit/la.hpp"

namespace coorbit {

struct FreqGrid {
  int dim = 1;
  std::array<int, 3> n{8, 1, 1};
  std::array<double, 3> dxi{1.0, 1.0, 1.0};
  std::array<double, 3> offset{0.0, 0.0, 0.0};

  static FreqGrid make(int dim, std::array<int, 3> n, std::array<double, 3> dxi,
                       std::array<double, 3> offset = {0.0, 0.0, 0.0}) {
    require(dim >= 1 && dim <= 3, "grid dimension must be 1, 2, or 3");
    FreqGrid g;
    g.dim = dim;
    g.n = n;
    g.dxi = dxi;
    g.offset = offset;
    for (int a = dim; a < 3; ++a) {
      g.n[a] = 1;
      g.dxi[a] = 1.0;
      g.offset[a] = 0.0;
    }
    for (int a = 0; a < dim; ++a) {
      const int na = g.n[a];
      require(na >= 8 && (na & (na - 1)) == 0, "points per axis must be a power of two, at least 8");
      require(g.dxi[a] > 0.0, "frequency spacing must be positive");
    }
    return g;
  }

  static FreqGrid make1d(int n, double dxi, double offset = 0.0) {
    return make(1, {n, 1, 1}, {dxi, 1.0, 1.0}, {offset, 0.0, 0.0});
  }

  std::size_t total() const {
    std::size_t t = 1;
    for (int a = 0; a < dim; ++a) t *= static_cast<std::size_t>(n[a]);
    return t;
  }

  double dx(int axis) const { return 1.0 / (n[axis] * dxi[axis]); }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= dxi[a];
    return v;
  }

  double spatial_cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= dx(a);
    return v;
  }

  // Row-major flattening, last axis fastest.
  std::size_t flat(const std::array<int, 3>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < dim; ++a) f = f * static_cast<std::size_t>(n[a]) + static_cast<std::size_t>(idx[a]);
    return f;
  }

  std::array<int, 3> unflat(std::size_t f) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(f % static_cast<std::size_t>(n[a]));
      f /= static_cast<std::size_t>(n[a]);
    }
    return idx;
  }

  Vec point(const std::array<int, 3>& idx) const {
    Vec xi(dim);
    for (int a = 0; a < dim; ++a) xi(a) = offset[a] + (idx[a] - n[a] / 2) * dxi[a];
    return xi;
  }

  Vec point(std::size_t f) const { return point(unflat(f)); }

  Vec spatial_point(const std::array<int, 3>& idx) const {
    Vec x(dim);
    for (int a = 0; a < dim; ++a) x(a) = (idx[a] - n[a] / 2) * dx(a);
    return x;
  }

  Vec spatial_point(std::size_t f) const { return spatial_point(unflat(f)); }

  // Frequency extent per axis as a closed interval covering all nodes.
  double freq_lo(int a) const { return offset[a] - (n[a] / 2) * dxi[a]; }
  double freq_hi(int a) const { return offset[a] + (n[a] / 2 - 1) * dxi[a]; }
  double spatial_lo(int a) const { return -(n[a] / 2) * dx(a); }
  double spatial_hi(int a) const { return (n[a] / 2 - 1) * dx(a); }

  bool contains_freq(const Vec& xi) const {
    for (int a = 0; a < dim; ++a)
      if (xi(a) < freq_lo(a) || xi(a) > freq_hi(a)) return false;
    return true;
  }

  bool operator==(const FreqGrid& o) const {
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a)
      if (n[a] != o.n[a] || dxi[a] != o.dxi[a] || offset[a] != o.offset[a]) return false;
    return true;
  }
  bool operator!=(const FreqGrid& o) const { return !(*this == o); }
};

namespace detail {

// All plans carry FFTW_UNALIGNED so one cached plan serves any buffer.
inline fftw_plan make_plan(const FreqGrid& g, int sign, cplx* in, cplx* out) {
  static std::mutex planner_mutex;
  std::lock_guard<std::mutex> lock(planner_mutex);
  int dims[3] = {g.n[0], g.n[1], g.n[2]};
  return fftw_plan_dft(g.dim, dims, reinterpret_cast<fftw_complex*>(in),
                       reinterpret_cast<fftw_complex*>(out), sign,
                       FFTW_ESTIMATE | FFTW_UNALIGNED);
}

// Unnormalized DFT, in place: sign -1 forward (e^{-2 pi i kn/N}), +1 backward.
inline void dft(const FreqGrid& g, std::vector<cplx>& data, int sign) {
  require(data.size() == g.total(), "array size does not match grid");
  fftw_plan plan = make_plan(g, sign, data.data(), data.data());
  require(plan != nullptr, "FFT planner failed");
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                   reinterpret_cast<fftw_complex*>(data.data()));
  static std::mutex planner_mutex;
  std::lock_guard<std::mutex> lock(planner_mutex);
  fftw_destroy_plan(plan);
}

inline int index_parity_sum(const FreqGrid& g, std::size_t f) {
  const auto idx = g.unflat(f);
  int s = 0;
  for (int a = 0; a < g.dim; ++a) s += idx[a];
  return s & 1;
}

}  // namespace detail

// Band-limited interpolant values on the spatial lattice. Exact inverse of
// to_frequency. The centered-index phase folding uses N divisible by 4.
inline std::vector<cplx> to_spatial(const FreqGrid& g, const std::vector<cplx>& fhat) {
  require(fhat.size() == g.total(), "array size does not match grid");
  std::vector<cplx> work(fhat);
  const std::size_t total = g.total();
  for (std::size_t f = 0; f < total; ++f)
    if (detail::index_parity_sum(g, f)) work[f] = -work[f];
  detail::dft(g, work, +1);
  const double scale = g.cell_volume();
  for (std::size_t f = 0; f < total; ++f) {
    const auto idx = g.unflat(f);
    double phase = 0.0;
    for (int a = 0; a < g.dim; ++a) phase += (idx[a] - g.n[a] / 2) * g.dx(a) * g.offset[a];
    cplx factor = std::polar(scale, 2.0 * kPi * phase);
    if (detail::index_parity_sum(g, f)) factor = -factor;
    work[f] *= factor;
  }
  return work;
}

// Riemann-sum forward transform of spatial lattice values.
inline std::vector<cplx> to_frequency(const FreqGrid& g, const std::vector<cplx>& f) {
  require(f.size() == g.total(), "array size does not match grid");
  std::vector<cplx> work(f);
  const std::size_t total = g.total();
  for (std::size_t fl = 0; fl < total; ++fl) {
    const auto idx = g.unflat(fl);
    double phase = 0.0;
    for (int a = 0; a < g.dim; ++a) phase += (idx[a] - g.n[a] / 2) * g.dx(a) * g.offset[a];
    cplx factor = std::polar(1.0, -2.0 * kPi * phase);
    if (detail::index_parity_sum(g, fl)) factor = -factor;
    work[fl] *= factor;
  }
  detail::dft(g, work, -1);
  const double scale = g.spatial_cell_volume();
  for (std::size_t fl = 0; fl < total; ++fl) {
    cplx v = work[fl] * scale;
    if (detail::index_parity_sum(g, fl)) v = -v;
    work[fl] = v;
  }
  return work;
}

namespace detail {

// Shared multilinear kernel over fractional index coordinates u_a in [0, N_a-1];
// out-of-range corners contribute zero (zero extension off the grid).
inline cplx interp_by_index(const FreqGrid& g, const std::vector<cplx>& data,
                            const std::array<double, 3>& u) {
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    const double fl = std::floor(u[a]);
    base[a] = static_cast<int>(fl);
    frac[a] = u[a] - fl;
  }
  cplx acc(0.0, 0.0);
  const int corners = 1 << g.dim;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, 3> idx{0, 0, 0};
    bool inside = true;
    for (int a = 0; a < g.dim; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
      if (idx[a] < 0 || idx[a] >= g.n[a]) inside = false;
    }
    if (inside && w != 0.0) acc += w * data[g.flat(idx)];
  }
  return acc;
}

}  // namespace detail

inline cplx interp_freq(const FreqGrid& g, const std::vector<cplx>& data, const Vec& xi) {
  require(xi.size() == g.dim, "point dimension mismatch");
  std::array<double, 3> u{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) u[a] = (xi(a) - g.offset[a]) / g.dxi[a] + g.n[a] / 2;
  return detail::interp_by_index(g, data, u);
}

inline cplx interp_spatial(const FreqGrid& g, const std::vector<cplx>& data, const Vec& x) {
  require(x.size() == g.dim, "point dimension mismatch");
  std::array<double, 3> u{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) u[a] = x(a) / g.dx(a) + g.n[a] / 2;
  return detail::interp_by_index(g, data, u);
}

// Quadrature L2 norms: sqrt(cell volume * sum |.|^2).
inline double l2_freq(const FreqGrid& g, const std::vector<cplx>& fhat) {
  double s = 0.0;
  for (const cplx& v : fhat) s += std::norm(v);
  return std::sqrt(g.cell_volume() * s);
}

inline double l2_spatial(const FreqGrid& g, const std::vector<cplx>& f) {
  double s = 0.0;
  for (const cplx& v : f) s += std::norm(v);
  return std::sqrt(g.spatial_cell_volume() * s);
}

}  // namespace coorbit
