#pragma once

// Measurable cell partition of the sampled group and the subordinate
// partition of unity phi_i(xi) = sum over cell i of w |psihat(h^T xi)|^2,
// with L1 bounds on the inverse transforms.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <coorbit/common.hpp>
#include <coorbit/cover.hpp>
#include <coorbit/grid.hpp>
#include <coorbit/group.hpp>
#include <coorbit/window.hpp>

namespace coorbit {

// Haar samples split among the windows h_i U by greedy first claim in
// enumeration order; reproduces the set-difference cells at sample
// resolution.
struct CellPartition {
  std::vector<std::vector<GroupSample>> cells;  // aligned with ws.params
  std::vector<int> enumeration;

  double cell_mass(std::size_t i) const {
    double m = 0;
    for (const auto& s : cells[i]) m += s.weight;
    return m;
  }
  double total_mass() const {
    double m = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) m += cell_mass(i);
    return m;
  }
};

inline CellPartition partition_cells(const WellSpreadSet& ws,
                                     const std::vector<GroupSample>& samples,
                                     std::vector<int> enumeration = {}) {
  const int n = static_cast<int>(ws.params.size());
  if (enumeration.empty()) {
    enumeration.resize(n);
    std::iota(enumeration.begin(), enumeration.end(), 0);
  }
  require(static_cast<int>(enumeration.size()) == n,
          "partition_cells: enumeration must list every cell once");

  CellPartition cp;
  cp.enumeration = enumeration;
  cp.cells.assign(n, {});
  for (const auto& s : samples) {
    int claimed = -1;
    for (int i : enumeration)
      if (ws.in_window(i, s.param)) {
        claimed = i;
        break;
      }
    if (claimed < 0)  // sample on the closing edge of the sampled range
      for (int i : enumeration)
        if (ws.in_window(i, s.param, /*closed_hi=*/true)) {
          claimed = i;
          break;
        }
    require(claimed >= 0,
            "partition_cells: sample outside every window (density violated)");
    cp.cells[claimed].push_back(s);
  }
  return cp;
}

namespace detail {

// L1 norm of a spatial grid array plus a truncation tail: the outer shell
// fits max |F|(1+|x|)^(d+1), and the tail integral of that envelope is added.
inline double l1_with_tail(const FreqGrid& g, const std::vector<cplx>& F) {
  double body = 0;
  double c_env = 0;
  double x_edge = kInf;
  for (int a = 0; a < g.dim; ++a)
    x_edge = std::min(x_edge, 0.5 * (g.n[a] / 2 - 1) * g.dx(a));
  for (std::size_t k = 0; k < F.size(); ++k) {
    double mag = std::abs(F[k]);
    body += mag;
    Vec x = g.spatial_point(g.unflat(k));
    double r = x.norm();
    if (r > x_edge)
      c_env = std::max(c_env, mag * std::pow(1.0 + r, g.dim + 1));
  }
  body *= g.spatial_cell_volume();
  static const double surface[3] = {2.0, 2.0 * kPi, 4.0 * kPi};
  double tail = c_env * surface[g.dim - 1] / (1.0 + x_edge);
  return body + tail;
}

}  // namespace detail

struct Bapu {
  Cover cover;
  FreqGrid grid;
  std::vector<std::vector<double>> phis;  // one grid array per member
  std::vector<double> l1_bounds;
  double C_Phi = 0;
};

// Pullback of a frequency set through the closed chart cell:
// union over u in closure(U) of u^{-T} S, realized on a per-axis node
// lattice of the cell (exact for monotone scalar charts, identity for
// counting charts).
inline FrequencySet pullback_support(const WellSpreadSet& ws,
                                     const FrequencySet& S) {
  if (ws.group.discrete_chart()) return S;
  const int m = ws.chart_dim();
  const int nodes = 5;
  std::vector<FrequencySet> parts;
  std::vector<int> idx(m, 0);
  for (;;) {
    Vec tau(m);
    for (int a = 0; a < m; ++a) tau[a] = idx[a] * ws.u_extent[a] / (nodes - 1);
    parts.push_back(S.transformed(inv_transpose(ws.group.chart(tau))));
    int a = m - 1;
    while (a >= 0 && ++idx[a] == nodes) idx[a--] = 0;
    if (a < 0) break;
  }
  return FrequencySet::join(std::move(parts));
}

inline Bapu build_bapu(const Window& w, const CellPartition& cp,
                       const Cover& c, const FreqGrid& grid) {
  require(w.calderon_constant && std::abs(*w.calderon_constant - 1.0) < 1e-9,
          "build_bapu: window is not normalized");
  require(cp.cells.size() == c.members.size(),
          "build_bapu: partition and cover index sets differ");
  require(grid.dim == w.grid.dim, "build_bapu: dimension mismatch");

  for (std::size_t i = 0; i < c.members.size(); ++i) {
    Vec lo, hi;
    c.member_set(i).bbox(lo, hi);
    for (int a = 0; a < grid.dim; ++a)
      require(hi[a] - lo[a] >= 8 * grid.dxi[a],
              "build_bapu: grid too coarse for the narrowest member");
  }

  Bapu b;
  b.cover = c;
  b.grid = grid;
  const std::size_t total = grid.total();
  b.phis.assign(c.members.size(), std::vector<double>(total, 0.0));
  b.l1_bounds.assign(c.members.size(), 0.0);

  par::parallel_for(c.members.size(), [&](std::size_t i) {
    auto& phi = b.phis[i];
    for (std::size_t k = 0; k < total; ++k) {
      Vec xi = grid.point(grid.unflat(k));
      double acc = 0;
      for (const auto& s : cp.cells[i]) {
        cplx v = window_value(w, dual_action(s.h, xi));
        acc += s.weight * std::norm(v);
      }
      phi[k] = acc;
    }
    std::vector<cplx> tmp(total);
    for (std::size_t k = 0; k < total; ++k) tmp[k] = phi[k];
    b.l1_bounds[i] = detail::l1_with_tail(grid, to_spatial(grid, tmp));
  });

  b.C_Phi = *std::max_element(b.l1_bounds.begin(), b.l1_bounds.end());
  return b;
}

struct BapuReport {
  double max_partition_defect = 0;  // max |sum_i phi_i - 1| on the probe region
  double support_leakage = 0;       // max phi_i outside its member set, over peak
  double C_Phi = 0;
  bool out_of_cover = false;  // probe region reaches outside the member union
};

inline BapuReport verify_bapu(const Bapu& b, const FrequencySet& region) {
  BapuReport rep;
  rep.C_Phi = b.C_Phi;

  std::vector<FrequencySet> sets;
  for (std::size_t i = 0; i < b.cover.members.size(); ++i)
    sets.push_back(b.cover.member_set(i));

  double peak = 0;
  for (const auto& phi : b.phis)
    for (double v : phi) peak = std::max(peak, v);
  if (peak == 0) peak = 1;

  const std::size_t total = b.grid.total();
  for (std::size_t k = 0; k < total; ++k) {
    Vec xi = b.grid.point(b.grid.unflat(k));
    double sum = 0;
    for (const auto& phi : b.phis) sum += phi[k];
    if (region.contains(xi)) {
      rep.max_partition_defect =
          std::max(rep.max_partition_defect, std::abs(sum - 1.0));
      bool inside = false;
      for (const auto& s : sets)
        if (s.contains(xi)) {
          inside = true;
          break;
        }
      if (!inside) rep.out_of_cover = true;
    }
    for (std::size_t i = 0; i < sets.size(); ++i)
      if (b.phis[i][k] > rep.support_leakage * peak && !sets[i].contains(xi))
        rep.support_leakage = b.phis[i][k] / peak;
  }
  return rep;
}

}  // namespace coorbit
