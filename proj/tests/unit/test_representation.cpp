#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nait/error.hpp"
#include "nait/representation.hpp"
#include "oracles.hpp"

using namespace nait;

namespace {

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

FrameStack distinct_stack(std::size_t h, std::size_t w, Rng& rng) {
  return FrameStack(oracle::random_frame(h, w, rng), oracle::random_frame(h, w, rng),
                    oracle::random_frame(h, w, rng), oracle::random_frame(h, w, rng));
}

}  // namespace

TEST_SUITE("representation") {

TEST_CASE("tile_2x2 places frames newest-first in reading order") {
  SUBCASE("1x1 frames") {
    FrameStack st(Frame(1, 1, 1.0), Frame(1, 1, 2.0), Frame(1, 1, 3.0), Frame(1, 1, 4.0));
    const Frame t = tile_2x2(st);
    REQUIRE(t.height() == 2);
    REQUIRE(t.width() == 2);
    CHECK(t.at(0, 0) == 1.0);
    CHECK(t.at(0, 1) == 2.0);
    CHECK(t.at(1, 0) == 3.0);
    CHECK(t.at(1, 1) == 4.0);
  }
  SUBCASE("2x2 frames by hand") {
    auto f = [](double base) { return Frame(2, 2, std::vector<double>{base, base + 1, base + 2, base + 3}); };
    const Frame t = tile_2x2(FrameStack(f(0), f(10), f(20), f(30)));
    const double expect[4][4] = {{0, 1, 10, 11}, {2, 3, 12, 13}, {20, 21, 30, 31}, {22, 23, 32, 33}};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) CHECK(t.at(r, c) == expect[r][c]);
  }
  SUBCASE("constant frames") {
    const Frame t = tile_2x2(FrameStack(Frame(3, 5, 0.25)));
    CHECK(t.height() == 6);
    CHECK(t.width() == 10);
    for (double p : t.pixels()) CHECK(p == 0.25);
  }
  SUBCASE("mismatched sizes") {
    CHECK_THROWS_AS(tile_2x2(FrameStack(Frame(2, 2), Frame(2, 3), Frame(2, 2), Frame(2, 2))), InvalidInput);
  }
}

TEST_CASE("frame stack warm-up repeats the first observation") {
  FrameStack st(Frame(1, 1, 5.0));
  for (std::size_t i = 0; i < FrameStack::kDepth; ++i) CHECK(st[i].at(0, 0) == 5.0);
  st.push(Frame(1, 1, 6.0));
  CHECK(st[0].at(0, 0) == 6.0);
  CHECK(st[1].at(0, 0) == 5.0);
  CHECK(st[3].at(0, 0) == 5.0);
  st.push(Frame(1, 1, 7.0));
  st.push(Frame(1, 1, 8.0));
  st.push(Frame(1, 1, 9.0));
  CHECK(st[0].at(0, 0) == 9.0);
  CHECK(st[3].at(0, 0) == 6.0);
  const auto flat = st.flatten();
  CHECK(flat == std::vector<double>{9.0, 8.0, 7.0, 6.0});
}

TEST_CASE("dct2 hand values") {
  const Frame one_zero(1, 2, std::vector<double>{1.0, 0.0});
  const Frame c = dct2(one_zero);
  CHECK(c.at(0, 0) == doctest::Approx(0.70710678118).epsilon(1e-9));
  CHECK(c.at(0, 1) == doctest::Approx(0.70710678118).epsilon(1e-9));

  const Frame constant = dct2(Frame(6, 4, 2.0));
  CHECK(constant.at(0, 0) == doctest::Approx(2.0 * std::sqrt(24.0)));
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t col = 0; col < 4; ++col)
      if (r || col) CHECK(std::abs(constant.at(r, col)) < 1e-12);
}

TEST_CASE("dct2 agrees with the naive double loop") {
  Rng rng(11);
  const std::size_t sizes[][2] = {{1, 1}, {2, 3}, {8, 8}, {7, 13}, {16, 9}, {32, 32}, {10, 20}};
  for (const auto& hw : sizes) {
    const Frame img = oracle::random_frame(hw[0], hw[1], rng);
    const Frame fast = dct2(img);
    const Frame slow = oracle::dct2(img);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(std::abs(fast.pixels()[i] - slow.pixels()[i]) < 1e-9);
    CHECK(l2(fast.pixels()) == doctest::Approx(l2(img.pixels())).epsilon(1e-12));
  }
}

TEST_CASE("idct2 inverts dct2") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t h = 1 + rng() % 24, w = 1 + rng() % 24;
    const Frame img = oracle::random_frame(h, w, rng, -5.0, 5.0);
    const Frame back = idct2(dct2(img));
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(std::abs(back.pixels()[i] - img.pixels()[i]) < 1e-9);
  }
}

TEST_CASE("dct_features takes the top-left block row-major") {
  Rng rng(13);
  const FrameStack st = distinct_stack(5, 5, rng);
  const Frame full = dct2(tile_2x2(st));
  const StateVec f = dct_features(st, 25);
  REQUIRE(f.size() == 25);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) CHECK(f[r * 5 + c] == doctest::Approx(full.at(r, c)).epsilon(1e-5));

  // Full block: energy of the tiled image.
  const StateVec all = dct_features(st, 100);
  double e = 0.0;
  for (float v : all) e += static_cast<double>(v) * v;
  CHECK(e == doctest::Approx(tile_2x2(st).energy()).epsilon(1e-5));
}

TEST_CASE("dct_features F=1 on a constant stack is 2N c") {
  const std::size_t n = 7;
  const double c = 0.3;
  const StateVec f = dct_features(FrameStack(Frame(n, n, c)), 1);
  REQUIRE(f.size() == 1);
  CHECK(f[0] == doctest::Approx(2.0 * n * c).epsilon(1e-6));
}

TEST_CASE("dct_features F=289 on 84x84 frames") {
  Rng rng(14);
  const FrameStack st = distinct_stack(84, 84, rng);
  const StateVec f = dct_features(st, 289);
  CHECK(f.size() == 289);
  const Frame full = oracle::dct2(tile_2x2(st));
  for (std::size_t r = 0; r < 17; r += 4)
    for (std::size_t c = 0; c < 17; c += 3) CHECK(f[r * 17 + c] == doctest::Approx(full.at(r, c)).epsilon(1e-5));
}

TEST_CASE("dct_features is sensitive to tile order") {
  Rng rng(15);
  const Frame a = oracle::random_frame(4, 4, rng), b = oracle::random_frame(4, 4, rng);
  const Frame c = oracle::random_frame(4, 4, rng), d = oracle::random_frame(4, 4, rng);
  CHECK(dct_features(FrameStack(a, b, c, d), 16) != dct_features(FrameStack(d, b, c, a), 16));
  CHECK(dct_features(FrameStack(a, b, c, a), 16) == dct_features(FrameStack(a, b, c, a), 16));
}

TEST_CASE("dct encoder rejects bad F") {
  CHECK_THROWS_AS(DctEncoder(FrameShape{5, 5}, 24), ConfigError);
  CHECK_THROWS_AS(DctEncoder(FrameShape{5, 5}, 121), ConfigError);  // 11 > 2*5
  CHECK_THROWS_AS(DctEncoder(FrameShape{5, 8}, 0), ConfigError);
  CHECK_NOTHROW(DctEncoder(FrameShape{5, 8}, 100));
}

TEST_CASE("projection entries follow the three-point law") {
  SUBCASE("s=1 has no zeros") {
    const auto r = make_projection(100, 50, 1.0, 3);
    std::size_t plus = 0;
    for (double v : r.entries()) {
      CHECK((v == 1.0 || v == -1.0));
      plus += v > 0;
    }
    CHECK(std::abs(static_cast<double>(plus) / r.entries().size() - 0.5) < 0.03);
  }
  SUBCASE("mean 0 and variance 1 at 1e6 entries") {
    for (double s : {1.0, 3.0, 10.0}) {
      const auto r = make_projection(1000, 1000, s, 4);
      double sum = 0.0, sq = 0.0;
      for (double v : r.entries()) {
        sum += v;
        sq += v * v;
        CHECK_MESSAGE((v == 0.0 || std::abs(std::abs(v) - std::sqrt(s)) < 1e-12), "entry " << v);
      }
      const double n = static_cast<double>(r.entries().size());
      CHECK(std::abs(sum / n) < 0.01);
      CHECK(std::abs(sq / n - 1.0) < 0.01);
    }
  }
  SUBCASE("very sparse nonzero fraction") {
    const auto r = make_projection(10000, 100, 100.0, 5);
    std::size_t nz = 0;
    for (double v : r.entries()) nz += v != 0.0;
    CHECK(std::abs(static_cast<double>(nz) / r.entries().size() - 0.01) < 0.002);
  }
  SUBCASE("chi-square goodness of fit, s=3") {
    const auto r = make_projection(1000, 1000, 3.0, 6);
    double counts[3] = {0, 0, 0};
    for (double v : r.entries()) counts[v < 0 ? 0 : (v == 0 ? 1 : 2)] += 1;
    const double n = static_cast<double>(r.entries().size());
    const double expected[3] = {n / 6.0, n * 2.0 / 3.0, n / 6.0};
    double chi2 = 0.0;
    for (int i = 0; i < 3; ++i) chi2 += (counts[i] - expected[i]) * (counts[i] - expected[i]) / expected[i];
    CHECK(chi2 < 13.82);  // chi-square(2 dof) quantile at p = 0.001
  }
  SUBCASE("deterministic under seed") {
    const auto a = make_projection(64, 16, 3.0, 9), b = make_projection(64, 16, 3.0, 9);
    const auto c = make_projection(64, 16, 3.0, 10);
    CHECK(std::equal(a.entries().begin(), a.entries().end(), b.entries().begin()));
    CHECK(!std::equal(a.entries().begin(), a.entries().end(), c.entries().begin()));
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(make_projection(10, 10, 0.5, 0), ConfigError);
    CHECK_THROWS_AS(make_projection(0, 10, 3.0, 0), ConfigError);
    CHECK_THROWS_AS(make_projection(10, 0, 3.0, 0), ConfigError);
  }
}

TEST_CASE("project is the matrix product") {
  Rng rng(21);
  const auto r = make_projection(300, 40, 3.0, 22);
  std::vector<double> x(300), y(300);
  for (auto& v : x) v = uniform01(rng) * 2 - 1;
  for (auto& v : y) v = uniform01(rng) * 2 - 1;
  const StateVec px = project(x, r);
  const auto ref = oracle::matvec(x, r);
  for (std::size_t j = 0; j < 40; ++j) CHECK(std::abs(px[j] - ref[j]) < 1e-5);

  const double a = 0.7, b = -1.3;
  std::vector<double> mix(300);
  for (std::size_t i = 0; i < 300; ++i) mix[i] = a * x[i] + b * y[i];
  const StateVec pm = project(mix, r), py = project(y, r);
  for (std::size_t j = 0; j < 40; ++j) CHECK(std::abs(pm[j] - (a * px[j] + b * py[j])) < 1e-4);

  const StateVec zero = project(std::vector<double>(300, 0.0), r);
  for (float v : zero) CHECK(v == 0.0f);

  CHECK_THROWS_AS(project(std::vector<double>(299, 0.0), r), InvalidInput);
}

TEST_CASE("single nonzero column reproduces a scaled coordinate") {
  std::vector<double> e(6 * 3, 0.0);
  e[4 * 3 + 1] = std::sqrt(3.0);
  const ProjectionMatrix r(6, 3, e);
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const StateVec p = project(x, r);
  CHECK(p[0] == 0.0f);
  CHECK(p[1] == doctest::Approx(5.0 * std::sqrt(3.0)).epsilon(1e-6));
  CHECK(p[2] == 0.0f);
}

}  // TEST_SUITE
