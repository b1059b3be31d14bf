#include <doctest.h>

#include <cmath>
#include <random>

#include "btcmine/error.hpp"
#include "btcmine/kernels.hpp"
#include "btcmine/stats.hpp"
#include "test_support.hpp"

using namespace btcmine;
using namespace btcmine::stats;
using btcmine::testing::normals;

namespace {

// Two-pass textbook Pearson in long double.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

ErrorCode code_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("backend in use") { MESSAGE("kernels: " << kernels::backend_name(kernels::active().backend)); }

TEST_CASE("mean") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK_THROWS_AS(mean(std::vector<double>{}), Error);
}

TEST_CASE("pearson on exact linear relations") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> up{3, 5, 7, 9, 11};
  const std::vector<double> down{10, 8, 6, 4, 2};
  CHECK(pearson(x, up) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, down) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pearson(x, std::vector<double>{2, 1, 4, 3, 5}) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("pearson rejects constant input") {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> c{4, 4, 4};
  CHECK(code_of([&] { pearson(x, c); }) == ErrorCode::degenerate_series);
  CHECK(code_of([&] { pearson(c, x); }) == ErrorCode::degenerate_series);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), Error);
}

TEST_CASE("cross-correlation recovers a pure shift") {
  const auto base = normals(3, 1200);
  const int shift = 30;
  std::vector<double> p(1170), h(1170);
  for (std::size_t t = 0; t < p.size(); ++t) {
    p[t] = base[t + shift];
    h[t] = base[t];
  }
  // h[t] = p[t - shift] for t >= shift.
  const auto cc = cross_correlate(p, h, 60);
  CHECK(cc.best_lag == shift);
  CHECK(cc.best_corr == doctest::Approx(1.0).epsilon(1e-12));
  const auto cc2 = cross_correlate(h, p, 60);
  CHECK(cc2.best_lag == -shift);
}

TEST_CASE("cross-correlation table layout and lag sign") {
  std::vector<double> p(500), h(500);
  const auto z = normals(9, 600);
  for (std::size_t t = 0; t < 500; ++t) {
    p[t] = z[t + 50];
    h[t] = z[t + 50 - 7];  // h[t] = p[t - 7]: price leads by 7
  }
  const auto cc = cross_correlate(p, h, 20);
  REQUIRE(cc.table.size() == 41);
  CHECK(cc.table.front().lag == -20);
  CHECK(cc.table.back().lag == 20);
  CHECK(cc.best_lag == 7);
  CHECK(cc.best_corr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cc.table[20].lag == 0);
  CHECK(cc.table[20].corr == doctest::Approx(pearson(p, h)).epsilon(1e-14));
}

TEST_CASE("cross-correlation of a series with itself") {
  const auto x = normals(4, 300);
  const auto cc = cross_correlate(x, x, 10);
  CHECK(cc.best_lag == 0);
  CHECK(cc.best_corr == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cross-correlation ties go to the smaller lag, then the positive one") {
  // Period-4 pattern against itself: |corr| = 1 at lags 0, +-2, +-4.
  std::vector<double> x;
  for (int i = 0; i < 40; ++i) x.push_back(i % 4 == 0 ? 1 : i % 4 == 2 ? -1 : 0);
  const auto cc = cross_correlate(x, x, 4);
  CHECK(cc.best_lag == 0);
  // Quarter-cycle offset: corr is exactly +1 at lag +1 and -1 at lag -1
  // (windows of 40 have zero mean), and about 0 at lag 0.
  const double cycle[4] = {1, 0, -1, 0};
  std::vector<double> a, b;
  for (int i = 0; i < 41; ++i) {
    a.push_back(cycle[i % 4]);
    b.push_back(cycle[(i + 3) % 4]);
  }
  const auto tie = cross_correlate(a, b, 1);
  REQUIRE(std::abs(tie.table[0].corr) == std::abs(tie.table[2].corr));
  CHECK(tie.best_lag == 1);
  CHECK(tie.best_corr == 1.0);
}

TEST_CASE("cross-correlation preconditions") {
  const auto x = normals(5, 10);
  CHECK(code_of([&] { cross_correlate(x, x, 4); }) == ErrorCode::series_too_short);
  CHECK_NOTHROW(cross_correlate(x, x, 3));
  const std::vector<double> c(10, 1.0);
  CHECK(code_of([&] { cross_correlate(x, c, 2); }) == ErrorCode::degenerate_series);
}

TEST_CASE("independent noise stays uncorrelated at every lag") {
  const auto x = normals(100, 5000), y = normals(200, 5000);
  const auto cc = cross_correlate(x, y, 60);
  CHECK(std::abs(cc.best_corr) < 0.1);
}

TEST_CASE("diff and log_diff") {
  const std::vector<double> x{1, 2, 4, 8};
  CHECK(diff(x) == std::vector<double>{1, 2, 4});
  const auto l = log_diff(x);
  REQUIRE(l.size() == 3);
  for (double v : l) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(diff(std::vector<double>{1}).empty());
  CHECK(code_of([] { log_diff(std::vector<double>{1, 0, 2}); }) == ErrorCode::data_error);
}

// ---------------------------------------------------------------- properties

TEST_CASE("property: pearson matches the long-double oracle") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng() % 2000;
    auto x = normals(rng(), n), y = normals(rng(), n);
    const double rho = std::uniform_real_distribution<double>(-1, 1)(rng);
    for (std::size_t i = 0; i < n; ++i) y[i] = rho * x[i] + std::sqrt(1 - rho * rho) * y[i] + 1e3;
    REQUIRE(pearson(x, y) == doctest::Approx(pearson_oracle(x, y)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("property: pearson is symmetric and invariant to positive affine maps") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> a(0.01, 100.0), b(-1e3, 1e3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 5 + rng() % 500;
    auto x = normals(rng(), n), y = normals(rng(), n);
    for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * x[i];
    const double r = pearson(x, y);
    REQUIRE(pearson(y, x) == doctest::Approx(r).epsilon(1e-13).scale(1.0));
    const double s = a(rng), c = b(rng);
    std::vector<double> xs(x), neg(x);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = s * x[i] + c;
      neg[i] = -s * x[i] + c;
    }
    REQUIRE(pearson(xs, y) == doctest::Approx(r).epsilon(1e-10).scale(1.0));
    REQUIRE(pearson(neg, y) == doctest::Approx(-r).epsilon(1e-10).scale(1.0));
    REQUIRE(std::abs(r) <= 1.0);
  }
}

TEST_CASE("property: swapping inputs mirrors the lag table") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = normals(rng(), 400), y = normals(rng(), 400);
    const auto xy = cross_correlate(x, y, 15), yx = cross_correlate(y, x, 15);
    for (std::size_t i = 0; i < xy.table.size(); ++i)
      REQUIRE(xy.table[i].corr == doctest::Approx(yx.table[xy.table.size() - 1 - i].corr).epsilon(1e-12).scale(1.0));
  }
}
