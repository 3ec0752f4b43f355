#include <coorbit/group.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace coorbit;

TEST_CASE("dual action uses the inverse transpose") {
  Mat rot(2, 2);
  rot << 0, 1, -1, 0;
  Vec e1(2);
  e1 << 1, 0;
  Vec r = dual_action(rot, e1);
  REQUIRE(r(0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(r(1) == Catch::Approx(1.0));
}

TEST_CASE("chart quadrature carries trapezoid weights") {
  auto g = DilationGroup::one_parameter(identity(2));
  auto s = haar_samples(g, -1.0, 1.0, 5);
  REQUIRE(s.size() == 5u);
  REQUIRE(s[0].param(0) == Catch::Approx(-1.0));
  REQUIRE(s[2].param(0) == Catch::Approx(0.0));
  REQUIRE(s[0].weight == Catch::Approx(0.25));
  REQUIRE(s[1].weight == Catch::Approx(0.5));
  REQUIRE(s[4].weight == Catch::Approx(0.25));

  // total mass equals chart length, and splitting the range preserves it
  auto sim = DilationGroup::similitude(1);
  auto se = haar_samples(sim, 0.0, 1.0, 4001);
  double mass = 0;
  for (auto& q : se) mass += q.weight;
  REQUIRE(mass == Catch::Approx(1.0).epsilon(1e-12));

  double split = 0;
  for (auto& q : haar_samples(g, -1.0, 0.0, 3)) split += q.weight;
  for (auto& q : haar_samples(g, 0.0, 1.0, 3)) split += q.weight;
  REQUIRE(split == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("admissibility and expansivity predicates") {
  REQUIRE(is_integrably_admissible_one_parameter(identity(2)));
  Mat flip(2, 2);
  flip << 1, 0, 0, -1;
  REQUIRE_FALSE(is_integrably_admissible_one_parameter(flip));
  REQUIRE_FALSE(is_integrably_admissible_one_parameter(Mat::Zero(2, 2)));

  REQUIRE(is_expansive(2.0 * identity(2)));
  Mat mixed(2, 2);
  mixed << 2, 0, 0, 0.5;
  REQUIRE_FALSE(is_expansive(mixed));
  Mat rot(2, 2);
  rot << 0, 1, -1, 0;
  REQUIRE(is_expansive(3.0 * rot));

  REQUIRE(is_integrably_admissible_two_param(0, 1));
  REQUIRE(is_integrably_admissible_two_param(1, 0));
  REQUIRE_FALSE(is_integrably_admissible_two_param(1, 1));
  REQUIRE_FALSE(is_integrably_admissible_two_param(-1, 1));
}

TEST_CASE("transporter set of a band against itself") {
  // K1 = K2 = [1,2]: hK1 meets K2 iff the scale is within a factor 2,
  // so chart hits fill [-ln 2, ln 2]
  auto sim = DilationGroup::similitude(1);
  auto K = FrequencySet::interval(1.0, 2.0);
  auto samples = haar_samples(sim, -3.0, 3.0, 1201);
  auto tr = transporter_probe(sim, K, K, samples);
  REQUIRE(tr.bounded);
  REQUIRE_FALSE(tr.hits.empty());
  const double ln2 = std::log(2.0);
  REQUIRE(tr.hits.front()(0) == Catch::Approx(-ln2).margin(0.006));
  REQUIRE(tr.hits.back()(0) == Catch::Approx(ln2).margin(0.006));

  // discrete dyadic scales meeting an annulus in one ring either way
  auto cyc = DilationGroup::cyclic(2.0 * identity(2));
  auto js = haar_samples(cyc, -5.0, 5.0, 0);
  auto ann = FrequencySet::annulus(2, 1.0, 2.0);
  auto tr2 = transporter_probe(cyc, ann, ann, js);
  REQUIRE(tr2.hits.size() == 3u);
  REQUIRE(tr2.hits[0](0) == Catch::Approx(-1.0));
  REQUIRE(tr2.hits[1](0) == Catch::Approx(0.0));
  REQUIRE(tr2.hits[2](0) == Catch::Approx(1.0));

  // scales far apart never meet
  auto far = FrequencySet::annulus(1, 100.0, 200.0);
  auto band = FrequencySet::annulus(1, 1.0, 2.0);
  auto near_samples = haar_samples(sim, std::log(0.9), std::log(1.1), 51);
  auto tr3 = transporter_probe(sim, band, far, near_samples);
  REQUIRE(tr3.hits.empty());
  REQUIRE(tr3.bounded);
}

TEST_CASE("orbit of a band covers the positive axis") {
  auto sim = DilationGroup::similitude(1);
  std::vector<Vec> region;
  for (int k = 0; k < 200; ++k) {
    Vec p(1);
    p(0) = 0.1 + k * (9.9 / 199.0);
    region.push_back(p);
  }
  auto wide = haar_samples(sim, std::log(0.05), std::log(10.0), 4001);
  auto oc = orbit_covers(sim, FrequencySet::interval(1.0, 2.0), region, wide);
  REQUIRE(oc.covered_fraction == Catch::Approx(1.0));
}

TEST_CASE("two-parameter diagonal family") {
  auto dg = DilationGroup::diag_two_param(0.0, 1.0);
  Vec p(2);
  p << 0.3, -0.2;
  Mat h = dg.chart(p);
  REQUIRE(h.rows() == 3);
  REQUIRE(h(0, 0) == Catch::Approx(std::exp(0.3)));
  REQUIRE(h(1, 1) == Catch::Approx(std::exp(-0.2)));
  REQUIRE(h(2, 2) == Catch::Approx(std::exp(-0.2)));

  auto es = dg.essential_support();
  Vec lo(3), hi(3);
  lo << 1, 1, -1;
  hi << 2, 2, 1;
  REQUIRE(es.margin(FrequencySet::box(lo, hi)) == Catch::Approx(1.0));
  lo << -1, 3, 4;
  hi << 1, 5, 6;
  REQUIRE(es.margin(FrequencySet::box(lo, hi)) == Catch::Approx(0.0).margin(1e-12));
}
