#include <coorbit/transform.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace coorbit;

namespace {

const double ln2 = std::log(2.0);

// Spatial-side oracle for one coefficient: dense trapezoid quadrature of
// f(y) conj(|h|^{-1/2} psi((y-x)/h)) with f and psi tabulated once from
// fine frequency Riemann sums of their analytic spectra.
struct SpatialOracle {
  static constexpr double z_max = 96.0;
  static constexpr int nz = 1 << 21;
  static constexpr double y_max = 64.0;
  static constexpr int ny = 16384;
  double dz = 2.0 * z_max / nz;
  double dy = 2.0 * y_max / ny;
  std::vector<cplx> psi_tab;
  std::vector<cplx> f_tab;

  SpatialOracle(const Atom& atom, const Window& w) {
    FreqGrid fine = FreqGrid::make(1, {nz, 1, 1}, {1.0 / (nz * dz), 1.0, 1.0});
    std::vector<cplx> ph(fine.total());
    for (std::size_t n = 0; n < fine.total(); ++n) ph[n] = window_value(w, fine.point(n));
    psi_tab = to_spatial(fine, ph);

    const int nf = 16384;
    const double xi_max = 4.0;
    const double dxi = 2.0 * xi_max / nf;
    f_tab.resize(ny);
    for (int iy = 0; iy < ny; ++iy) {
      const double y = -y_max + iy * dy;
      cplx fv(0, 0);
      for (int n = 0; n < nf; ++n) {
        const double xi = -xi_max + (n + 0.5) * dxi;
        fv += atom_value(atom, xi) * std::polar(1.0, 2.0 * kPi * y * xi);
      }
      f_tab[iy] = fv * dxi;
    }
  }

  cplx psi_at(double z) const {
    const double u = (z + z_max) / dz;
    const long k = static_cast<long>(std::floor(u));
    if (k < 0 || k + 1 >= nz) return cplx(0, 0);
    const double fr = u - k;
    return (1.0 - fr) * psi_tab[k] + fr * psi_tab[k + 1];
  }

  cplx coefficient(double x, double h) const {
    cplx acc(0, 0);
    for (int iy = 0; iy < ny; ++iy) {
      const double y = -y_max + iy * dy;
      acc += f_tab[iy] * std::conj(psi_at((y - x) / h) / std::sqrt(h)) * dy;
    }
    return acc;
  }
};

struct Pair {
  FreqGrid grid = FreqGrid::make1d(512, 4.6 / 512.0);
  DilationGroup sim = DilationGroup::similitude(1);
  Window psi1;  // flat-profile indicator pair member, exact constant one
  Window psi2;  // smooth bump, numerically normalized

  Pair() {
    Window bump = build_bump_window(grid, FrequencySet::symmetric_band(1.0, 2.0), 0.25);
    std::vector<Vec> probe;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(std::log(0.9), std::log(2.2));
    for (int k = 0; k < 48; ++k) {
      Vec p(1);
      p(0) = std::exp(u(rng));
      probe.push_back(p);
      p(0) = -p(0);
      probe.push_back(p);
    }
    psi2 = normalize_calderon(bump, sim, haar_samples(sim, -1.5, 1.5, 2049), probe);

    auto sharp = [](const Vec& xi) {
      const double a = std::abs(xi(0));
      return cplx(a >= 1.0 && a < 2.0 ? 1.0 : 0.0, 0.0);
    };
    psi1 = make_window(grid, FrequencySet::symmetric_band(1.0, 2.0), sharp, true);
    for (auto& v : psi1.fhat) v /= std::sqrt(ln2);
    auto base = psi1.analytic;
    const double s = 1.0 / std::sqrt(ln2);
    psi1.analytic = [base, s](const Vec& xi) { return s * base(xi); };
    psi1.calderon_constant = 1.0;
  }
};

}  // namespace

TEST_CASE("coefficients match a dense spatial quadrature") {
  Pair kit;
  Atom atom{{{1.0, 1.45, 0.3, 0.7}, {0.6, -1.5, 0.25, -0.4}}};
  Signal f = atom_signal(kit.grid, atom);
  auto few = haar_samples(kit.sim, -0.3, 0.4, 8);
  GTransform t = cwt(f, kit.psi2, few);

  SpatialOracle oracle(atom, kit.psi2);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t si = 1 + (2 * trial) % few.size();
    const std::size_t xi = 100 + 71 * trial;
    const double x = kit.grid.spatial_point(xi)(0);
    const double h = std::exp(few[si].param(0));
    REQUIRE(std::abs(t.coeffs[si][xi] - oracle.coefficient(x, h)) < 1e-5);
  }
}

TEST_CASE("the weighted coefficient energy equals the signal energy") {
  Pair kit;
  Atom atom{{{1.0, 1.45, 0.3, 0.7}, {0.6, -1.5, 0.25, -0.4}}};
  Signal f = atom_signal(kit.grid, atom);
  auto full = haar_samples(kit.sim, -1.5, 1.5, 2049);
  GTransform t = cwt(f, kit.psi2, full);

  double acc = 0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    double sl = 0;
    for (const cplx& v : t.coeffs[i]) sl += std::norm(v);
    acc += full[i].weight / std::abs(full[i].h.determinant()) *
           kit.grid.spatial_cell_volume() * sl;
  }
  REQUIRE(std::sqrt(acc) == Catch::Approx(l2_norm(f)).epsilon(1e-9));
}

TEST_CASE("analysis with one window reproduces through the other") {
  Pair kit;
  for (int s = 0; s < 5; ++s) {
    Signal fs = random_band_signal(kit.grid, FrequencySet::symmetric_band(1.1, 1.9), 100 + s);
    auto coarse = haar_samples(kit.sim, -0.95, 0.8475, 256);
    auto fine = haar_samples(kit.sim, -0.95, 0.8475, 511);  // exactly halves the step
    auto r1 = reproducing_residual(kit.sim, fs, kit.psi1, kit.psi2, coarse);
    auto r2 = reproducing_residual(kit.sim, fs, kit.psi1, kit.psi2, fine);
    REQUIRE(r1.coverage_ok);
    REQUIRE(r2.coverage_ok);
    REQUIRE(r1.residual < 0.01);
    // trapezoid refinement: halving the step should about halve the error
    REQUIRE(r2.residual / r1.residual > 0.35);
    REQUIRE(r2.residual / r1.residual < 0.65);
  }

  // the first window itself is a valid input signal
  Signal fp;
  fp.grid = kit.grid;
  fp.fhat = kit.psi1.fhat;
  fp.band = kit.psi1.support;
  auto rp = reproducing_residual(kit.sim, fp, kit.psi1, kit.psi2,
                                 haar_samples(kit.sim, -0.95, 0.8475, 256));
  REQUIRE(rp.residual < 0.01);
}

TEST_CASE("coefficients vanish off the transporter scales") {
  Pair kit;
  Signal f = random_band_signal(kit.grid, FrequencySet::symmetric_band(1.2, 1.8), 7);
  auto wide = haar_samples(kit.sim, -2.0, 2.0, 257);
  GTransform t = cwt(f, kit.psi2, wide);
  auto dr = decay_envelope(t, f.band, kit.psi2.support, 4.0);
  REQUIRE(dr.peak > 0.0);
  REQUIRE(dr.outside_peak <= 1e-10 * dr.peak);
  REQUIRE(dr.hit_count > 0);
  REQUIRE(std::isfinite(dr.fitted_c));
  REQUIRE(dr.fitted_c > 0.0);
}
