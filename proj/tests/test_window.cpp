#include <coorbit/window.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace coorbit;

namespace {

const double ln2 = std::log(2.0);

std::vector<Vec> log_probe(unsigned seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(0.5), 1.0);
  std::vector<Vec> probe;
  for (int k = 0; k < count; ++k) {
    Vec p(1);
    p(0) = std::exp(u(rng));
    probe.push_back(p);
  }
  return probe;
}

}  // namespace

TEST_CASE("dilation-invariant integral of a half-open indicator") {
  // Lattice step ln2/256: every probe point sees exactly 256 lattice points
  // inside [1,2), so the quadrature value is exactly ln 2.
  auto sim = DilationGroup::similitude(1);
  const double delta = ln2 / 256.0;
  auto samples = haar_samples(sim, -768.0 * delta, 1280.0 * delta, 2049);

  FreqGrid grid = FreqGrid::make1d(512, 0.0125);
  auto indicator = [](const Vec& xi) { return cplx(xi(0) >= 1.0 && xi(0) < 2.0 ? 1.0 : 0.0, 0.0); };
  Window sharp = make_window(grid, FrequencySet::interval(1.0, 2.0), indicator, true);

  auto probe = log_probe(11, 64);
  auto c = calderon_integral(sharp, sim, samples, probe);
  for (std::size_t k = 0; k < probe.size(); ++k) {
    REQUIRE(std::abs(c.values[k] - ln2) < 1e-12);
    REQUIRE(c.reliable[k]);
  }

  // dropping the exact evaluator falls back to grid interpolation, which
  // smears the jump by about one frequency cell
  Window interp = sharp;
  interp.analytic = nullptr;
  auto ci = calderon_integral(interp, sim, samples, probe);
  double dev = 0;
  for (double v : ci.values) dev = std::max(dev, std::abs(v - ln2));
  REQUIRE(dev < 1e-3);
  REQUIRE(dev > 1e-6);
}

TEST_CASE("normalization flattens the scale profile to one") {
  auto sim = DilationGroup::similitude(1);
  const double delta = ln2 / 256.0;
  auto samples = haar_samples(sim, -768.0 * delta, 1280.0 * delta, 2049);
  FreqGrid grid = FreqGrid::make1d(512, 0.0125);
  Window bump = build_bump_window(grid, FrequencySet::interval(1.0, 2.0), 0.25);
  auto probe = log_probe(11, 64);

  // the raw bump already has a flat profile, just not at height one
  auto cb = calderon_integral(bump, sim, samples, probe);
  REQUIRE((cb.max - cb.min) / cb.mean < 1e-9);
  REQUIRE(cb.mean > 0.1);

  Window nb = normalize_calderon(bump, sim, samples, probe);
  auto cn = calderon_integral(nb, sim, samples, probe);
  for (double v : cn.values) REQUIRE(std::abs(v - 1.0) < 1e-9);

  // normalizing twice changes nothing
  Window nb2 = normalize_calderon(nb, sim, samples, probe);
  for (std::size_t f = 0; f < nb.fhat.size(); ++f)
    REQUIRE(std::abs(nb.fhat[f] - nb2.fhat[f]) < 1e-12);
}

TEST_CASE("the profile is quadratic in the window") {
  auto sim = DilationGroup::similitude(1);
  auto samples = haar_samples(sim, -3.0, 3.0, 2049);
  FreqGrid grid = FreqGrid::make1d(512, 0.0125);
  Window bump = build_bump_window(grid, FrequencySet::interval(1.0, 2.0), 0.25);
  bump.analytic = nullptr;
  Window scaled = bump;
  for (auto& v : scaled.fhat) v *= 3.0;

  auto probe = log_probe(3, 16);
  auto cs = calderon_integral(scaled, sim, samples, probe);
  auto cb = calderon_integral(bump, sim, samples, probe);
  for (std::size_t k = 0; k < probe.size(); ++k)
    REQUIRE(std::abs(cs.values[k] - 9.0 * cb.values[k]) < 1e-10);
}

TEST_CASE("discrete dyadic scales telescope a tent profile") {
  auto cyc = DilationGroup::cyclic(2.0 * identity(1));
  auto js = haar_samples(cyc, -3.0, 3.0, 0);
  auto tent = [](const Vec& xi) {
    if (xi(0) < 1.0 || xi(0) > 4.0) return cplx(0, 0);
    const double u = std::log2(xi(0));
    const double g = u <= 1.0 ? u : 2.0 - u;
    return cplx(std::sqrt(std::max(g, 0.0)), 0.0);
  };
  FreqGrid grid = FreqGrid::make1d(512, 0.025);
  Window tw = make_window(grid, FrequencySet::interval(1.0, 4.0), tent, true);

  std::vector<Vec> probe;
  for (int k = 0; k < 33; ++k) {
    Vec p(1);
    p(0) = 1.0 + k / 32.0;
    probe.push_back(p);
  }
  auto ct = calderon_integral(tw, cyc, js, probe);
  for (double v : ct.values) REQUIRE(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("smooth band windows decay fast in space") {
  auto sim = DilationGroup::similitude(1);
  const double delta = ln2 / 256.0;
  auto samples = haar_samples(sim, -768.0 * delta, 1280.0 * delta, 2049);
  FreqGrid grid = FreqGrid::make1d(512, 0.0125);
  auto probe = log_probe(11, 64);
  Window nb = normalize_calderon(build_bump_window(grid, FrequencySet::interval(1.0, 2.0), 0.25),
                                 sim, samples, probe);

  auto psi = to_spatial(grid, nb.fhat);
  double c4 = 0, peak = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const double x = std::abs(grid.spatial_point(k)(0));
    const double m = std::abs(psi[k]);
    peak = std::max(peak, m);
    c4 = std::max(c4, m * std::pow(1.0 + x, 4.0));
  }
  REQUIRE(peak > 1.0);
  REQUIRE(c4 < 100.0);  // fourth-power envelope stays bounded out to |x| = 40
}
