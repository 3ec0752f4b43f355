#pragma once

// Well-spread families in the dilation group, the frequency covers they
// induce, and moderate weight transplants onto the index set.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <coorbit/common.hpp>
#include <coorbit/frequency_set.hpp>
#include <coorbit/group.hpp>
#include <coorbit/la.hpp>

namespace coorbit {

// Lattice {h_i = chart(p_i)} together with the chart cell U so that the
// windows h_i*U tile (or, if u_extent > step, cover with overlap) the
// sampled chart range.
struct WellSpreadSet {
  DilationGroup group;
  std::vector<Vec> params;  // sorted chart coordinates, lattice with spacing step
  Vec step;                 // per-axis lattice spacing
  Vec u_extent;             // per-axis width of U = chart([0, u_extent)); >= step

  int chart_dim() const { return static_cast<int>(step.size()); }

  Mat member(std::size_t i) const { return group.chart(params[i]); }

  // chart window of member i: [params[i], params[i] + u_extent) per axis
  bool in_window(std::size_t i, const Vec& p, bool closed_hi = false) const {
    for (int a = 0; a < chart_dim(); ++a) {
      double rel = p[a] - params[i][a];
      double tol = 1e-9 * step[a];
      if (rel < -tol) return false;
      if (closed_hi ? (rel > u_extent[a] + tol) : (rel >= u_extent[a] - tol))
        return false;
    }
    return true;
  }
};

// Integer lattice k*step clipped to [lo, hi], one chart cell per point.
inline WellSpreadSet well_spread(const DilationGroup& g, const Vec& lo,
                                 const Vec& hi, const Vec& step) {
  int m = g.chart_dim();
  require(lo.size() == m && hi.size() == m && step.size() == m,
          "well_spread: range/step dimension must match the chart");
  Vec st = step;
  if (g.discrete_chart()) {
    for (int a = 0; a < m; ++a)
      require(std::abs(step[a] - 1.0) < 1e-12,
              "well_spread: counting chart forces step 1");
    st = Vec::Ones(m);
  }
  for (int a = 0; a < m; ++a) {
    require(st[a] > 0, "well_spread: step must be positive");
    require(hi[a] >= lo[a], "well_spread: empty chart range");
  }

  // per-axis integer multiples of step inside [lo, hi]
  std::vector<std::vector<double>> axis(m);
  for (int a = 0; a < m; ++a) {
    long k0 = static_cast<long>(std::ceil(lo[a] / st[a] - 1e-9));
    long k1 = static_cast<long>(std::floor(hi[a] / st[a] + 1e-9));
    require(k1 >= k0, "well_spread: no lattice point in range");
    for (long k = k0; k <= k1; ++k) axis[a].push_back(k * st[a]);
  }

  WellSpreadSet ws;
  ws.group = g;
  ws.step = st;
  ws.u_extent = st;
  std::vector<int> idx(m, 0);
  for (;;) {  // row-major product of the axis lattices, lexicographically sorted
    Vec p(m);
    for (int a = 0; a < m; ++a) p[a] = axis[a][idx[a]];
    ws.params.push_back(p);
    int a = m - 1;
    while (a >= 0 && ++idx[a] == static_cast<int>(axis[a].size())) idx[a--] = 0;
    if (a < 0) break;
  }
  return ws;
}

inline WellSpreadSet well_spread(const DilationGroup& g, double lo, double hi,
                                 double step) {
  Vec l(1), h(1), s(1);
  l << lo;
  h << hi;
  s << step;
  return well_spread(g, l, h, s);
}

struct CoverMember {
  int index = 0;
  Mat h;        // h_i
  Mat h_inv_t;  // h_i^{-T}, the matrix acting on the base set
  Vec param;
  bool edge = false;  // neighbors would extend past the sampled lattice
};

// Induced frequency cover (h_i^{-T} Q)_i with its overlap structure.
struct Cover {
  WellSpreadSet wellspread;
  FrequencySet Q;
  std::vector<CoverMember> members;
  std::vector<std::vector<int>> neighbors;  // i -> sorted i*, always contains i
  int N_Q = 0;                              // max_i |i*|

  FrequencySet member_set(std::size_t i) const {
    return Q.transformed(members[i].h_inv_t);
  }
};

inline Cover induced_cover(const WellSpreadSet& ws, const FrequencySet& Q) {
  const auto support = ws.group.essential_support();
  require(support.margin(Q) > 0,
          "induced_cover: closure of the base set must avoid the orbit "
          "complement");

  Cover c;
  c.wellspread = ws;
  c.Q = Q;
  const int n = static_cast<int>(ws.params.size());
  c.members.resize(n);
  for (int i = 0; i < n; ++i) {
    CoverMember& mb = c.members[i];
    mb.index = i;
    mb.param = ws.params[i];
    mb.h = ws.group.chart(mb.param);
    mb.h_inv_t = inv_transpose(mb.h);
  }

  // member sets must stay inside the orbit
  std::string escaped;
  for (int i = 0; i < n; ++i)
    if (support.margin(c.member_set(i)) <= 0)
      escaped += (escaped.empty() ? "" : ", ") + std::to_string(i);
  require(escaped.empty(),
          "induced_cover: member sets escape the orbit at indices " + escaped);

  // i ~ j  iff  (h_i^{-1} h_j)^T Q meets Q; quotient taken in the chart
  c.neighbors.assign(n, {});
  par::parallel_for(n, [&](std::size_t iu) {
    const int i = static_cast<int>(iu);
    for (int j = 0; j < n; ++j) {
      if (j == i) {
        c.neighbors[i].push_back(i);
        continue;
      }
      Mat gm = chart_quotient(ws.group, ws.params[i], ws.params[j]);
      if (intersects(Q.transformed(gm.transpose()), Q))
        c.neighbors[i].push_back(j);
    }
  });
  for (int i = 0; i < n; ++i)
    c.N_Q = std::max(c.N_Q, static_cast<int>(c.neighbors[i].size()));

  // neighbor reach per chart axis; members within reach of the lattice
  // boundary have truncated neighbor lists
  const int m = ws.chart_dim();
  Vec reach = Vec::Zero(m);
  for (int i = 0; i < n; ++i)
    for (int j : c.neighbors[i])
      for (int a = 0; a < m; ++a)
        reach[a] = std::max(reach[a],
                            std::abs(ws.params[j][a] - ws.params[i][a]));
  Vec lo = ws.params.front(), hi = ws.params.front();
  for (const Vec& p : ws.params)
    for (int a = 0; a < m; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) {
      double tol = 0.5 * ws.step[a];
      if (ws.params[i][a] - reach[a] < lo[a] - tol ||
          ws.params[i][a] + reach[a] > hi[a] + tol)
        c.members[i].edge = true;
    }
  return c;
}

struct AdmissibilityReport {
  int N_Q = 0;
  double covered_fraction = 0;  // of probe points drawn from the full lattice
  double min_member_margin = 0;
};

// Probes the full well-spread lattice: points sampled inside each h_i^{-T}Q
// for every lattice param, then tested against the cover's actual members.
// Dropping members shows up as covered_fraction < 1.
inline AdmissibilityReport admissibility_report(const Cover& c) {
  AdmissibilityReport rep;
  rep.N_Q = c.N_Q;

  const auto support = c.wellspread.group.essential_support();
  rep.min_member_margin = kInf;
  for (std::size_t i = 0; i < c.members.size(); ++i)
    rep.min_member_margin =
        std::min(rep.min_member_margin, support.margin(c.member_set(i)));

  // strictly interior subgrid of Q's bounding box, kept where it lands in Q
  Vec blo, bhi;
  c.Q.bbox(blo, bhi);
  const int d = static_cast<int>(blo.size());
  const int per_axis = (d == 1) ? 64 : 8;
  std::vector<Vec> base;
  std::vector<int> idx(d, 0);
  for (;;) {
    Vec x(d);
    for (int a = 0; a < d; ++a)
      x[a] = blo[a] + (idx[a] + 0.5) / per_axis * (bhi[a] - blo[a]);
    if (c.Q.contains(x)) base.push_back(x);
    int a = d - 1;
    while (a >= 0 && ++idx[a] == per_axis) idx[a--] = 0;
    if (a < 0) break;
  }
  require(!base.empty(), "admissibility_report: no probe points land in Q");

  std::vector<FrequencySet> sets;
  sets.reserve(c.members.size());
  for (std::size_t i = 0; i < c.members.size(); ++i)
    sets.push_back(c.member_set(i));

  long total = 0, hit = 0;
  for (const Vec& p : c.wellspread.params) {
    Mat m = inv_transpose(c.wellspread.group.chart(p));
    for (const Vec& x : base) {
      Vec xi = m * x;
      ++total;
      for (const auto& s : sets)
        if (s.contains(xi)) {
          ++hit;
          break;
        }
    }
  }
  rep.covered_fraction = static_cast<double>(hit) / static_cast<double>(total);
  return rep;
}

// Closed-form weight on H: scale * |det h|^det_exp * ||h||^op_exp *
// ||h^{-1}||^inv_op_exp, with the max-row-sum operator norm.  Closed under
// products, which keeps transplant bookkeeping exact.
struct GroupWeight {
  double scale = 1.0;
  double det_exp = 0.0;
  double op_exp = 0.0;
  double inv_op_exp = 0.0;

  double operator()(const Mat& h) const {
    double v = scale;
    if (det_exp != 0) v *= std::pow(std::abs(h.determinant()), det_exp);
    if (op_exp != 0) v *= std::pow(op_norm_inf(h), op_exp);
    if (inv_op_exp != 0) v *= std::pow(op_norm_inf(inverse(h)), inv_op_exp);
    return v;
  }

  static GroupWeight one() { return {}; }
  static GroupWeight det_power(double a) { return {1.0, a, 0.0, 0.0}; }

  friend GroupWeight operator*(const GroupWeight& a, const GroupWeight& b) {
    return {a.scale * b.scale, a.det_exp + b.det_exp, a.op_exp + b.op_exp,
            a.inv_op_exp + b.inv_op_exp};
  }
};

struct ModerateWeight {
  GroupWeight symbol;          // the v factor alone; the det transplant
  double q = 2;                // exponent is recorded separately via q
  std::vector<double> values;  // u_i = |det h_i|^{1/2 - 1/q} v(h_i)
  double moderation_constant = 1;  // max u_i/u_l over non-edge i, l in i*
};

inline ModerateWeight transplant_weight(const Cover& c, const GroupWeight& v,
                                        double q) {
  check_exponent(q, "transplant exponent");
  const double e = 0.5 - (is_sup(q) ? 0.0 : 1.0 / q);

  ModerateWeight w;
  w.symbol = v;
  w.q = q;
  w.values.resize(c.members.size());
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    double vi = v(c.members[i].h);
    require(vi > 0, "transplant_weight: weight must be positive on members");
    w.values[i] = std::pow(std::abs(c.members[i].h.determinant()), e) * vi;
  }

  for (std::size_t i = 0; i < c.members.size(); ++i) {
    if (c.members[i].edge) continue;  // truncated neighbor lists distort ratios
    for (int l : c.neighbors[i])
      w.moderation_constant =
          std::max(w.moderation_constant, w.values[i] / w.values[l]);
  }
  require(w.moderation_constant <= 1e6,
          "transplant_weight: weight is not moderate over the cover");
  return w;
}

}  // namespace coorbit
