#include <coorbit/bapu.hpp>
#include <coorbit/cover.hpp>
#include <coorbit/window.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace coorbit;

namespace {

const double ln2 = std::log(2.0);

struct Kit {
  FreqGrid grid = FreqGrid::make1d(2048, 40.0 / 2048, 0.0);
  DilationGroup sim = DilationGroup::similitude(1);
  Window wn;
  WellSpreadSet ws;
  std::vector<GroupSample> haar;
  Cover cover;
  CellPartition cells;

  Kit() {
    auto w0 = build_bump_window(grid, FrequencySet::symmetric_band(0.9, 2.1), 0.15);
    auto wide = haar_samples(sim, -4.0, 4.0, 2049);
    std::vector<Vec> probe;
    for (int k = 0; k < 33; ++k) {
      double r = 0.5 * std::pow(8.0, k / 32.0);
      Vec p(1), m(1);
      p << r;
      m << -r;
      probe.push_back(p);
      probe.push_back(m);
    }
    wn = normalize_calderon(w0, sim, wide, probe);
    ws = well_spread(sim, -3 * ln2, 3 * ln2, ln2);
    haar = haar_samples(sim, -3 * ln2, 4 * ln2, 2049);
    cells = partition_cells(ws, haar);
    cover = induced_cover(ws, pullback_support(ws, wn.support));
  }
};

}  // namespace

TEST_CASE("chart partition carries the full Haar mass") {
  Kit kit;
  REQUIRE(kit.cells.cells.size() == 7u);
  REQUIRE(kit.cells.total_mass() == Catch::Approx(7 * ln2).epsilon(1e-12));

  // pulled-back support of the dilated windows
  Vec lo, hi;
  pullback_support(kit.ws, kit.wn.support).bbox(lo, hi);
  REQUIRE(lo(0) == Catch::Approx(-2.25));
  REQUIRE(hi(0) == Catch::Approx(2.25));

  REQUIRE(kit.cover.N_Q == 5);
  REQUIRE(kit.cover.members.front().edge);
  REQUIRE(kit.cover.members.back().edge);
  REQUIRE_FALSE(kit.cover.members[3].edge);
}

TEST_CASE("the partition functions sum to the scale profile") {
  Kit kit;
  auto bapu = build_bapu(kit.wn, kit.cells, kit.cover, kit.grid);
  auto rep = verify_bapu(bapu, FrequencySet::symmetric_band(0.16, 5.5));
  REQUIRE(rep.max_partition_defect < 1e-9);
  REQUIRE(rep.support_leakage < 1e-14);
  REQUIRE_FALSE(rep.out_of_cover);
  REQUIRE(rep.C_Phi == Catch::Approx(1.249142).epsilon(1e-4));

  // pointwise bookkeeping against the quadrature the functions were cut from
  std::vector<Vec> pts;
  std::vector<std::size_t> flats;
  for (std::size_t k = 400; k < kit.grid.total(); k += 357) {
    pts.push_back(kit.grid.point(k));
    flats.push_back(k);
  }
  auto cd = calderon_integral(kit.wn, kit.sim, kit.haar, pts);
  for (std::size_t t = 0; t < pts.size(); ++t) {
    double sum = 0;
    for (auto& phi : bapu.phis) sum += phi[flats[t]];
    REQUIRE(std::abs(sum - cd.values[t]) < 1e-12);
  }

  // each phi is a Haar average of dilated |psihat|^2, so its inverse
  // transform obeys mu(cell) times the base profile in L1
  std::vector<cplx> ps(kit.grid.total());
  for (std::size_t k = 0; k < kit.grid.total(); ++k) ps[k] = std::norm(kit.wn.fhat[k]);
  double base_l1 = detail::l1_with_tail(kit.grid, to_spatial(kit.grid, ps));
  REQUIRE(bapu.C_Phi <= ln2 * base_l1 + 1e-9);
  for (double b : bapu.l1_bounds) REQUIRE(b <= ln2 * base_l1 + 1e-9);
}

TEST_CASE("partition constants are stable under quadrature refinement") {
  Kit kit;
  auto bapu = build_bapu(kit.wn, kit.cells, kit.cover, kit.grid);
  auto cells2 = partition_cells(kit.ws, haar_samples(kit.sim, -3 * ln2, 4 * ln2, 4097));
  auto bapu2 = build_bapu(kit.wn, cells2, kit.cover, kit.grid);
  REQUIRE(bapu2.C_Phi / bapu.C_Phi == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("overlapping chart windows keep the total mass") {
  Kit kit;
  WellSpreadSet wsO = kit.ws;
  wsO.u_extent[0] = 1.5 * ln2;
  auto fwd = partition_cells(wsO, kit.haar);

  std::vector<int> rev(wsO.params.size());
  for (std::size_t i = 0; i < rev.size(); ++i) rev[i] = static_cast<int>(rev.size() - 1 - i);
  auto bwd = partition_cells(wsO, kit.haar, rev);

  REQUIRE(fwd.total_mass() == Catch::Approx(bwd.total_mass()).epsilon(1e-12));
  // first-claim assignment moves samples between cells but never drops them
  int moved = 0;
  for (std::size_t i = 0; i < fwd.cells.size(); ++i)
    if (fwd.cells[i].size() != bwd.cells[i].size()) ++moved;
  REQUIRE(moved > 0);
}
