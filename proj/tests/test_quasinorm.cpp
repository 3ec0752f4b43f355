#include <coorbit/quasinorm.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace coorbit;

TEST_CASE("the ellipsoid series has rational closed forms") {
  // sum_k (A^-k)^T A^-k = sum 4^-k = 4/3 for A = 2
  auto q = build_quasinorm(Mat::Identity(1, 1) * 2.0);
  REQUIRE(std::abs(q.P(0, 0) - 4.0 / 3.0) < 1e-12);

  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 4.0;
  auto q2 = build_quasinorm(A);
  REQUIRE(std::abs(q2.P(0, 0) - 4.0 / 3.0) < 1e-12);
  REQUIRE(std::abs(q2.P(1, 1) - 16.0 / 15.0) < 1e-12);
  REQUIRE(q2.P(0, 1) == 0.0);
  REQUIRE(q2.P(1, 0) == 0.0);

  REQUIRE_THROWS_AS(build_quasinorm(Mat::Identity(2, 2)), error);
}

TEST_CASE("step evaluation matches the dyadic closed form") {
  auto q = build_quasinorm(Mat::Identity(1, 1) * 2.0);
  // on the line, |x|_P = |x| sqrt(4/3) and the step value is 2^{j*-1} with
  // j* the first integer scale pulling x inside the unit ellipsoid
  const double R = std::sqrt(3.0) / 2.0;
  for (int i = 0; i <= 400; ++i) {
    const double r = 1e-4 * std::pow(1e8, i / 400.0);
    Vec x(1);
    x << r;
    bool sat = false;
    const double got = evaluate(q, x, &sat);
    const long jstar = static_cast<long>(std::ceil(std::log2(r / R)));
    REQUIRE(got == std::pow(2.0, double(jstar - 1)));
    REQUIRE_FALSE(sat);
  }

  REQUIRE(evaluate(q, Vec::Zero(1)) == 0.0);

  // the step stays within one dyadic factor of linear growth
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double r = std::pow(100.0, i / 1000.0);
    Vec x(1);
    x << r;
    const double ratio = evaluate(q, x) / r;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  REQUIRE(hi / lo > 1.9);
  REQUIRE(hi / lo <= 2.0 + 1e-9);
}

TEST_CASE("homogeneity under the generator is exact") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 4.0;
  auto q = build_quasinorm(A);
  Mat G(2, 2);
  const double c = 1.3 * std::cos(0.7), s = 1.3 * std::sin(0.7);
  G << c, -s, s, c;
  auto qg = build_quasinorm(G);

  for (int i = 0; i < 200; ++i) {
    Vec x(2);
    x << gauss(rng) * std::pow(10.0, (i % 9) - 4), gauss(rng) * std::pow(10.0, (i % 7) - 3);
    REQUIRE(std::abs(evaluate(q, Vec(A * x)) - q.detA * evaluate(q, x)) <=
            1e-10 * q.detA * evaluate(q, x));
    REQUIRE(std::abs(evaluate(qg, Vec(G * x)) - qg.detA * evaluate(qg, x)) <=
            1e-10 * qg.detA * evaluate(qg, x));
  }

  // even, and nondecreasing along every ray
  Vec dir(2);
  dir << 0.6, -0.8;
  double prev = 0.0;
  for (int i = 0; i <= 300; ++i) {
    const double r = 1e-3 * std::pow(1e6, i / 300.0);
    const double v = evaluate(q, Vec(r * dir));
    REQUIRE(v == evaluate(q, Vec(-r * dir)));
    REQUIRE(v >= prev);
    prev = v;
  }
}

TEST_CASE("the quasi-triangle constant never exceeds the determinant") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 4.0;
  auto q = build_quasinorm(A);
  double ct = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Vec x(2), y(2);
    x << gauss(rng), gauss(rng);
    y << gauss(rng), gauss(rng);
    x *= std::pow(10.0, (i % 11) - 5);
    y *= std::pow(10.0, ((7 * i) % 11) - 5);
    ct = std::max(ct, evaluate(q, Vec(x + y)) / (evaluate(q, x) + evaluate(q, y)));
  }
  REQUIRE(ct <= q.detA + 1e-9);
  REQUIRE(ct > 1.0);
}

TEST_CASE("slow generators saturate the scale range and say so") {
  auto q = build_quasinorm(Mat::Identity(1, 1) * 1.01);
  Vec x(1);
  x << 1e10;
  bool sat = false;
  evaluate(q, x, &sat);
  REQUIRE(sat);
  x << 1.0;
  sat = false;
  evaluate(q, x, &sat);
  REQUIRE_FALSE(sat);
}

TEST_CASE("empirical equivalence verdicts") {
  auto q1 = build_quasinorm(Mat::Identity(1, 1) * 2.0);
  auto q4 = build_quasinorm(Mat::Identity(1, 1) * 4.0);
  auto r14 = equivalence_test(q1, q4);
  REQUIRE(r14.equivalent);
  REQUIRE(r14.ratio_hi / r14.ratio_lo == Catch::Approx(4.0).epsilon(0.01));
  REQUIRE(std::abs(r14.slope_per_decade) < 0.01);

  auto r11 = equivalence_test(q1, q1);
  REQUIRE(r11.equivalent);
  REQUIRE(r11.ratio_lo == Catch::Approx(1.0));
  REQUIRE(r11.ratio_hi == Catch::Approx(1.0));

  // isotropic against anisotropic: the ratio drifts across scales
  Mat A22 = Mat::Identity(2, 2) * 2.0;
  Mat A24 = Mat::Zero(2, 2);
  A24(0, 0) = 2.0;
  A24(1, 1) = 4.0;
  auto e1 = build_quasinorm(A22);
  auto e2 = build_quasinorm(A24);
  auto r22 = equivalence_test(e1, e2);
  REQUIRE_FALSE(r22.equivalent);
  REQUIRE(std::abs(r22.slope_per_decade) > 0.5);

  // a power of the same generator is equivalent
  auto e4 = build_quasinorm(Mat(A22 * A22));
  auto rsq = equivalence_test(e1, e4);
  REQUIRE(rsq.equivalent);
  REQUIRE(std::abs(rsq.slope_per_decade) < 0.01);
}
