#pragma once

// Frequency-domain set geometry: boxes, origin-centered annuli, linear
// images, finite unions. Sets carry an openness flag: open sets are used
// for coverings (touching members are not neighbors), closed sets for
// transporter probes (touching counts as a hit).
//
// Exactness hierarchy for intersection tests: 1D interval lists and
// origin-centered radial profiles are decided exactly; everything else
// falls back to membership sampling on the bounding-box overlap, which
// can miss very thin intersections.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "coorbit/common.hpp"
#include "coorbit/la.hpp"

namespace coorbit {

class FrequencySet {
 public:
  enum class Kind { Box, Annulus, Image, Union };

  static FrequencySet box(const Vec& lo, const Vec& hi, bool open = false) {
    require(lo.size() == hi.size() && lo.size() >= 1, "box bounds dimension mismatch");
    for (int a = 0; a < lo.size(); ++a) require(lo(a) < hi(a), "box bounds must satisfy lo < hi");
    FrequencySet s;
    s.kind_ = Kind::Box;
    s.dim_ = static_cast<int>(lo.size());
    s.open_ = open;
    s.lo_ = lo;
    s.hi_ = hi;
    return s;
  }

  static FrequencySet interval(double lo, double hi, bool open = false) {
    Vec l(1), h(1);
    l(0) = lo;
    h(0) = hi;
    return box(l, h, open);
  }

  // {xi : r_in <= |xi| <= r_out}; r_in = 0 gives a ball.
  static FrequencySet annulus(int dim, double r_in, double r_out, bool open = false) {
    require(dim >= 1, "annulus dimension must be positive");
    require(r_in >= 0.0 && r_in < r_out, "annulus radii must satisfy 0 <= r_in < r_out");
    FrequencySet s;
    s.kind_ = Kind::Annulus;
    s.dim_ = dim;
    s.open_ = open;
    s.r_in_ = r_in;
    s.r_out_ = r_out;
    return s;
  }

  static FrequencySet image(const Mat& m, FrequencySet base) {
    check_square(m);
    require(static_cast<int>(m.rows()) == base.dim_, "image matrix dimension mismatch");
    require(is_invertible(m), "image matrix must be invertible");
    FrequencySet s;
    s.kind_ = Kind::Image;
    s.dim_ = base.dim_;
    s.open_ = base.open_;
    s.m_ = m;
    s.m_inv_ = inverse(m);
    s.parts_.push_back(std::move(base));
    return s;
  }

  static FrequencySet join(std::vector<FrequencySet> parts) {
    require(!parts.empty(), "union of no sets");
    FrequencySet s;
    s.kind_ = Kind::Union;
    s.dim_ = parts[0].dim_;
    s.open_ = parts[0].open_;
    for (const auto& p : parts) require(p.dim_ == s.dim_, "union parts dimension mismatch");
    s.parts_ = std::move(parts);
    return s;
  }

  // Symmetric pair r_in <= |xi| <= r_out on the line, the 1D annulus.
  static FrequencySet symmetric_band(double r_in, double r_out, bool open = false) {
    return annulus(1, r_in, r_out, open);
  }

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_open() const { return open_; }
  const Vec& box_lo() const { return lo_; }
  const Vec& box_hi() const { return hi_; }
  double annulus_inner() const { return r_in_; }
  double annulus_outer() const { return r_out_; }
  const Mat& image_matrix() const { return m_; }
  const std::vector<FrequencySet>& parts() const { return parts_; }

  bool contains(const Vec& xi) const {
    require(xi.size() == dim_, "point dimension mismatch");
    switch (kind_) {
      case Kind::Box:
        for (int a = 0; a < dim_; ++a) {
          if (open_ ? (xi(a) <= lo_(a) || xi(a) >= hi_(a)) : (xi(a) < lo_(a) || xi(a) > hi_(a)))
            return false;
        }
        return true;
      case Kind::Annulus: {
        const double r = xi.norm();
        return open_ ? (r > r_in_ && r < r_out_) : (r >= r_in_ && r <= r_out_);
      }
      case Kind::Image:
        return parts_[0].contains(m_inv_ * xi);
      case Kind::Union:
        for (const auto& p : parts_)
          if (p.contains(xi)) return true;
        return false;
    }
    return false;
  }

  // Image of the set under an invertible matrix, simplified where the
  // result stays in an exact representation: diagonal matrices map boxes
  // to boxes, conformal matrices map annuli to annuli.
  FrequencySet transformed(const Mat& m) const {
    check_square(m);
    require(static_cast<int>(m.rows()) == dim_, "transform matrix dimension mismatch");
    switch (kind_) {
      case Kind::Box:
        if (is_diagonal(m)) {
          Vec lo(dim_), hi(dim_);
          for (int a = 0; a < dim_; ++a) {
            const double x = m(a, a) * lo_(a), y = m(a, a) * hi_(a);
            lo(a) = std::min(x, y);
            hi(a) = std::max(x, y);
          }
          auto s = box(lo, hi, open_);
          return s;
        }
        break;
      case Kind::Annulus: {
        double scale = 0.0;
        if (is_conformal(m, scale)) return annulus(dim_, scale * r_in_, scale * r_out_, open_);
        break;
      }
      case Kind::Image:
        return image(m * m_, parts_[0]);
      case Kind::Union: {
        std::vector<FrequencySet> out;
        out.reserve(parts_.size());
        for (const auto& p : parts_) out.push_back(p.transformed(m));
        return join(std::move(out));
      }
    }
    return image(m, *this);
  }

  // Outward margin: boxes grow per axis, annuli grow radially (the hole
  // closes if the margin swallows it). Not defined for general images.
  FrequencySet enlarged(double margin) const {
    require(margin >= 0.0, "margin must be nonnegative");
    switch (kind_) {
      case Kind::Box: {
        Vec lo = lo_, hi = hi_;
        for (int a = 0; a < dim_; ++a) {
          lo(a) -= margin;
          hi(a) += margin;
        }
        return box(lo, hi, open_);
      }
      case Kind::Annulus:
        return annulus(dim_, std::max(r_in_ - margin, 0.0), r_out_ + margin, open_);
      case Kind::Union: {
        std::vector<FrequencySet> out;
        out.reserve(parts_.size());
        for (const auto& p : parts_) out.push_back(p.enlarged(margin));
        return join(std::move(out));
      }
      case Kind::Image:
        fail("cannot enlarge a general linear image");
    }
    return *this;
  }

  // Axis-aligned bounding box (exact for Box/Annulus/Union, corner image
  // for Image nodes).
  void bbox(Vec& lo, Vec& hi) const {
    switch (kind_) {
      case Kind::Box:
        lo = lo_;
        hi = hi_;
        return;
      case Kind::Annulus:
        lo = Vec::Constant(dim_, -r_out_);
        hi = Vec::Constant(dim_, r_out_);
        return;
      case Kind::Image: {
        Vec blo, bhi;
        parts_[0].bbox(blo, bhi);
        lo = Vec::Constant(dim_, kInf);
        hi = Vec::Constant(dim_, -kInf);
        const int corners = 1 << dim_;
        for (int c = 0; c < corners; ++c) {
          Vec v(dim_);
          for (int a = 0; a < dim_; ++a) v(a) = ((c >> a) & 1) ? bhi(a) : blo(a);
          Vec w = m_ * v;
          lo = lo.cwiseMin(w);
          hi = hi.cwiseMax(w);
        }
        return;
      }
      case Kind::Union: {
        parts_[0].bbox(lo, hi);
        for (std::size_t i = 1; i < parts_.size(); ++i) {
          Vec plo, phi;
          parts_[i].bbox(plo, phi);
          lo = lo.cwiseMin(plo);
          hi = hi.cwiseMax(phi);
        }
        return;
      }
    }
  }

  // 1D sets decompose into interval lists; used for exact intersection.
  struct Interval {
    double lo, hi;
    bool open;
  };

  bool as_intervals(std::vector<Interval>& out) const {
    if (dim_ != 1) return false;
    switch (kind_) {
      case Kind::Box:
        out.push_back({lo_(0), hi_(0), open_});
        return true;
      case Kind::Annulus:
        if (r_in_ > 0.0) {
          out.push_back({-r_out_, -r_in_, open_});
          out.push_back({r_in_, r_out_, open_});
        } else {
          out.push_back({-r_out_, r_out_, open_});
        }
        return true;
      case Kind::Image: {
        std::vector<Interval> base;
        if (!parts_[0].as_intervals(base)) return false;
        const double s = m_(0, 0);
        for (const auto& iv : base) {
          const double x = s * iv.lo, y = s * iv.hi;
          out.push_back({std::min(x, y), std::max(x, y), iv.open});
        }
        return true;
      }
      case Kind::Union:
        for (const auto& p : parts_)
          if (!p.as_intervals(out)) return false;
        return true;
    }
    return false;
  }

  // Origin-centered radial profile, when the set is exactly one.
  bool as_radial(double& r_in, double& r_out, bool& open) const {
    switch (kind_) {
      case Kind::Annulus:
        r_in = r_in_;
        r_out = r_out_;
        open = open_;
        return true;
      case Kind::Image: {
        double s = 0.0;
        if (!is_conformal(m_, s)) return false;
        if (!parts_[0].as_radial(r_in, r_out, open)) return false;
        r_in *= s;
        r_out *= s;
        return true;
      }
      default:
        return false;
    }
  }

 private:
  static bool is_diagonal(const Mat& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (i != j && std::abs(m(i, j)) > 1e-14 * scale) return false;
    return true;
  }

  // m^T m = s^2 I within roundoff; such maps preserve radial structure.
  static bool is_conformal(const Mat& m, double& scale) {
    Mat g = m.transpose() * m;
    const double s2 = g.trace() / g.rows();
    if (s2 <= 0.0) return false;
    Mat dev = g - s2 * Mat::Identity(g.rows(), g.cols());
    if (dev.cwiseAbs().maxCoeff() > 1e-12 * std::max(s2, 1.0)) return false;
    scale = std::sqrt(s2);
    return true;
  }

  Kind kind_ = Kind::Box;
  int dim_ = 1;
  bool open_ = false;
  Vec lo_, hi_;
  double r_in_ = 0.0, r_out_ = 0.0;
  Mat m_, m_inv_;
  std::vector<FrequencySet> parts_;
};

namespace detail {

// Overlap predicate with a relative tolerance: numerically computed group
// elements carry O(eps) roundoff, so an open-set overlap must exceed the
// tolerance and a closed-set touch may miss by it.
inline bool overlap_within_tol(double lo, double hi, bool open, double scale) {
  const double tol = 1e-12 * std::max(scale, 1.0);
  return open ? (hi - lo > tol) : (hi - lo >= -tol);
}

inline bool intervals_intersect(const FrequencySet::Interval& a, const FrequencySet::Interval& b) {
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  const double scale = std::max(std::max(std::abs(a.lo), std::abs(a.hi)),
                                std::max(std::abs(b.lo), std::abs(b.hi)));
  return overlap_within_tol(lo, hi, a.open || b.open, scale);
}

inline double box_min_dist_to_origin(const Vec& lo, const Vec& hi) {
  double s = 0.0;
  for (int a = 0; a < lo.size(); ++a) {
    double d = 0.0;
    if (hi(a) < 0.0)
      d = -hi(a);
    else if (lo(a) > 0.0)
      d = lo(a);
    s += d * d;
  }
  return std::sqrt(s);
}

inline double box_max_dist_to_origin(const Vec& lo, const Vec& hi) {
  double s = 0.0;
  for (int a = 0; a < lo.size(); ++a) {
    const double d = std::max(std::abs(lo(a)), std::abs(hi(a)));
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

// Intersection test, exact on the 1D-interval and radial paths, sampled
// otherwise (64 points per axis over the bounding-box overlap).
inline bool intersects(const FrequencySet& a, const FrequencySet& b) {
  require(a.dim() == b.dim(), "set dimension mismatch");

  {
    std::vector<FrequencySet::Interval> ia, ib;
    if (a.as_intervals(ia) && b.as_intervals(ib)) {
      for (const auto& x : ia)
        for (const auto& y : ib)
          if (detail::intervals_intersect(x, y)) return true;
      return false;
    }
  }
  {
    double a_in, a_out, b_in, b_out;
    bool a_open, b_open;
    if (a.as_radial(a_in, a_out, a_open) && b.as_radial(b_in, b_out, b_open)) {
      const double lo = std::max(a_in, b_in);
      const double hi = std::min(a_out, b_out);
      return detail::overlap_within_tol(lo, hi, a_open || b_open,
                                        std::max(a_out, b_out));
    }
  }
  // Radial vs box: the box is connected, so the attained radii fill
  // [min dist, max dist] and the test reduces to radial overlap.
  for (int swap = 0; swap < 2; ++swap) {
    const FrequencySet& r = swap ? b : a;
    const FrequencySet& other = swap ? a : b;
    double r_in, r_out;
    bool r_open;
    if (r.as_radial(r_in, r_out, r_open) && other.kind() == FrequencySet::Kind::Box) {
      const double dmin = detail::box_min_dist_to_origin(other.box_lo(), other.box_hi());
      const double dmax = detail::box_max_dist_to_origin(other.box_lo(), other.box_hi());
      const double lo = std::max(r_in, dmin);
      const double hi = std::min(r_out, dmax);
      return detail::overlap_within_tol(lo, hi, r_open || other.is_open(),
                                        std::max(r_out, dmax));
    }
  }
  // Unions distribute before the sampled fallback.
  if (a.kind() == FrequencySet::Kind::Union) {
    for (const auto& p : a.parts())
      if (intersects(p, b)) return true;
    return false;
  }
  if (b.kind() == FrequencySet::Kind::Union) {
    for (const auto& p : b.parts())
      if (intersects(a, p)) return true;
    return false;
  }

  Vec alo, ahi, blo, bhi;
  a.bbox(alo, ahi);
  b.bbox(blo, bhi);
  Vec lo = alo.cwiseMax(blo), hi = ahi.cwiseMin(bhi);
  for (int ax = 0; ax < a.dim(); ++ax)
    if (lo(ax) > hi(ax)) return false;
  const int per_axis = 64;
  std::size_t total = 1;
  for (int ax = 0; ax < a.dim(); ++ax) total *= per_axis;
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rem = f;
    Vec p(a.dim());
    for (int ax = a.dim() - 1; ax >= 0; --ax) {
      const int k = static_cast<int>(rem % per_axis);
      rem /= per_axis;
      p(ax) = lo(ax) + (k + 0.5) * (hi(ax) - lo(ax)) / per_axis;
    }
    if (a.contains(p) && b.contains(p)) return true;
  }
  return false;
}

// Open H^T-invariant frequency-support regions and the distance of a set
// to their complements, used to certify closure containment.
class EssentialSupport {
 public:
  enum class Kind {
    FullSpace,        // all of frequency space
    PuncturedSpace,   // everything but the origin
    Diag2ParamSkewA,  // {x : x_1 != 0 and x_2^2 + x_3^2 != 0}  (alpha = 0 family)
    Diag2ParamSkewB,  // {x : x_2 != 0 and x_1^2 + x_3^2 != 0}  (beta = 0 family)
  };

  static EssentialSupport full_space(int dim) { return {Kind::FullSpace, dim}; }
  static EssentialSupport punctured(int dim) { return {Kind::PuncturedSpace, dim}; }
  static EssentialSupport diag2param(double alpha, double beta) {
    require(alpha == 0.0 || beta == 0.0, "mixed-parameter region has no closed form");
    return {alpha == 0.0 ? Kind::Diag2ParamSkewA : Kind::Diag2ParamSkewB, 3};
  }

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  bool contains(const Vec& xi) const { return complement_distance(xi) > 0.0; }

  double complement_distance(const Vec& xi) const {
    require(xi.size() == dim_, "point dimension mismatch");
    switch (kind_) {
      case Kind::FullSpace:
        return kInf;
      case Kind::PuncturedSpace:
        return xi.norm();
      case Kind::Diag2ParamSkewA:
        return std::min(std::abs(xi(0)), std::hypot(xi(1), xi(2)));
      case Kind::Diag2ParamSkewB:
        return std::min(std::abs(xi(1)), std::hypot(xi(0), xi(2)));
    }
    return 0.0;
  }

  // inf over the set of the distance above. Exact for boxes, radial sets,
  // and their unions; linear images get a sound singular-value bound in
  // the punctured case and a sampled estimate otherwise.
  double margin(const FrequencySet& s) const {
    require(s.dim() == dim_, "set dimension mismatch");
    switch (kind_) {
      case Kind::FullSpace:
        return kInf;
      case Kind::PuncturedSpace:
        return punctured_margin(s);
      case Kind::Diag2ParamSkewA:
      case Kind::Diag2ParamSkewB:
        return skew_margin(s);
    }
    return 0.0;
  }

 private:
  EssentialSupport(Kind k, int d) : kind_(k), dim_(d) {}

  static double punctured_margin(const FrequencySet& s) {
    switch (s.kind()) {
      case FrequencySet::Kind::Box:
        return detail::box_min_dist_to_origin(s.box_lo(), s.box_hi());
      case FrequencySet::Kind::Annulus:
        return s.annulus_inner();
      case FrequencySet::Kind::Image: {
        Eigen::JacobiSVD<Mat> svd(s.image_matrix());
        return svd.singularValues().minCoeff() * punctured_margin(s.parts()[0]);
      }
      case FrequencySet::Kind::Union: {
        double m = kInf;
        for (const auto& p : s.parts()) m = std::min(m, punctured_margin(p));
        return m;
      }
    }
    return 0.0;
  }

  double skew_margin(const FrequencySet& s) const {
    switch (s.kind()) {
      case FrequencySet::Kind::Box: {
        const Vec& lo = s.box_lo();
        const Vec& hi = s.box_hi();
        auto axis_dist = [&](int a) {
          if (hi(a) < 0.0) return -hi(a);
          if (lo(a) > 0.0) return lo(a);
          return 0.0;
        };
        const int line_axis = kind_ == Kind::Diag2ParamSkewA ? 0 : 1;
        const int plane_a = kind_ == Kind::Diag2ParamSkewA ? 1 : 0;
        const double plane_dist = std::hypot(axis_dist(plane_a), axis_dist(2));
        return std::min(axis_dist(line_axis), plane_dist);
      }
      case FrequencySet::Kind::Union: {
        double m = kInf;
        for (const auto& p : s.parts()) m = std::min(m, skew_margin(p));
        return m;
      }
      default:
        return sampled_margin(s);
    }
  }

  double sampled_margin(const FrequencySet& s) const {
    Vec lo, hi;
    s.bbox(lo, hi);
    const int per_axis = 24;
    double m = kInf;
    bool any = false;
    std::size_t total = 1;
    for (int a = 0; a < dim_; ++a) total *= per_axis;
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t rem = f;
      Vec p(dim_);
      for (int a = dim_ - 1; a >= 0; --a) {
        const int k = static_cast<int>(rem % per_axis);
        rem /= per_axis;
        p(a) = lo(a) + (k + 0.5) * (hi(a) - lo(a)) / per_axis;
      }
      if (!s.contains(p)) continue;
      any = true;
      m = std::min(m, complement_distance(p));
    }
    return any ? m : 0.0;
  }

  Kind kind_;
  int dim_;
};

}  // namespace coorbit
