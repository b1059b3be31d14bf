#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "btcmine/error.hpp"
#include "btcmine/least_squares.hpp"
#include "test_support.hpp"

using namespace btcmine;
using namespace btcmine::stats;

namespace {

DesignMatrix random_design(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::normal_distribution<double> z;
  DesignMatrix x(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (std::size_t j = 1; j < k; ++j) x(i, j) = z(rng) * std::pow(10.0, static_cast<double>(j % 4) - 1.0);
  }
  return x;
}

Eigen::MatrixXd to_eigen(const DesignMatrix& x) {
  Eigen::MatrixXd m(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) m(i, j) = x(i, j);
  return m;
}

}  // namespace

TEST_CASE("exact fit recovers coefficients with zero residual") {
  DesignMatrix x(5, 2);
  std::vector<double> y;
  for (std::size_t i = 0; i < 5; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = static_cast<double>(i);
    y.push_back(3.0 - 2.0 * static_cast<double>(i));
  }
  const auto fit = fit_least_squares(x, y);
  CHECK(fit.coefficients[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(fit.coefficients[1] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(fit.rss < 1e-25);
}

TEST_CASE("simple regression by hand") {
  // y = 1, 3, 2, 5 on x = 0..3: slope 1.1, intercept 1.1, RSS 2.7.
  DesignMatrix x(4, 2);
  const std::vector<double> y{1, 3, 2, 5};
  for (std::size_t i = 0; i < 4; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = static_cast<double>(i);
  }
  const auto fit = fit_least_squares(x, y);
  CHECK(fit.coefficients[0] == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(fit.coefficients[1] == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(fit.rss == doctest::Approx(2.7).epsilon(1e-14));
}

TEST_CASE("collinear and degenerate designs are reported") {
  auto code_of = [](const auto& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  DesignMatrix dup(10, 3);
  std::vector<double> y(10);
  for (std::size_t i = 0; i < 10; ++i) {
    dup(i, 0) = 1.0;
    dup(i, 1) = static_cast<double>(i * i);
    dup(i, 2) = 2.0 * static_cast<double>(i * i) + 5.0;
    y[i] = static_cast<double>(i);
  }
  CHECK(code_of([&] { fit_least_squares(dup, y); }) == ErrorCode::collinear_lags);
  DesignMatrix zero(10, 2);
  for (std::size_t i = 0; i < 10; ++i) zero(i, 0) = 1.0;
  CHECK(code_of([&] { fit_least_squares(zero, y); }) == ErrorCode::collinear_lags);
  CHECK_THROWS_AS(fit_least_squares(DesignMatrix(2, 2), std::vector<double>(2)), Error);
  CHECK_THROWS_AS(fit_least_squares(DesignMatrix(5, 2), std::vector<double>(4)), Error);
}

// ---------------------------------------------------------------- properties

TEST_CASE("property: coefficients and RSS match an Eigen SVD solve") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng() % 16;
    const std::size_t n = k + 1 + rng() % 400;
    const DesignMatrix x = random_design(rng, n, k);
    const auto y = btcmine::testing::normals(rng(), n);
    const auto fit = fit_least_squares(x, y);

    const Eigen::MatrixXd a = to_eigen(x);
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd beta = a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
    const double rss = (b - a * beta).squaredNorm();
    for (std::size_t j = 0; j < k; ++j)
      REQUIRE(fit.coefficients[j] ==
              doctest::Approx(beta(static_cast<Eigen::Index>(j))).epsilon(1e-8).scale(1e-8));
    REQUIRE(fit.rss == doctest::Approx(rss).epsilon(1e-9));
  }
}

TEST_CASE("property: residuals are orthogonal to every column") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 10;
    const std::size_t n = k + 2 + rng() % 200;
    const DesignMatrix x = random_design(rng, n, k);
    const auto y = btcmine::testing::normals(rng(), n);
    const auto fit = fit_least_squares(x, y);
    std::vector<double> r(y);
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) r[i] -= x(i, j) * fit.coefficients[j];
      rss += r[i] * r[i];
    }
    REQUIRE(fit.rss == doctest::Approx(rss).epsilon(1e-9));
    for (std::size_t j = 0; j < k; ++j) {
      double dot = 0, norm = 0;
      for (std::size_t i = 0; i < n; ++i) {
        dot += x(i, j) * r[i];
        norm += x(i, j) * x(i, j);
      }
      REQUIRE(std::abs(dot) <= 1e-9 * std::sqrt(norm * (rss + 1.0)));
    }
  }
}

TEST_CASE("property: adding a column never increases RSS") {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 8;
    const std::size_t n = k + 3 + rng() % 200;
    const DesignMatrix big = random_design(rng, n, k + 1);
    DesignMatrix small(n, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) small(i, j) = big(i, j);
    const auto y = btcmine::testing::normals(rng(), n);
    REQUIRE(fit_least_squares(big, y).rss <= fit_least_squares(small, y).rss * (1 + 1e-12));
  }
}
