#include "doctest.h"

#include "sspack/dimension.hpp"
#include "sspack/errors.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace sspack;

TEST_CASE("closed forms for equal ratios") {
  const std::vector<double> cantor{1.0 / 3.0, 1.0 / 3.0};
  CHECK(std::abs(similarity_dimension(cantor).s - std::log(2.0) / std::log(3.0)) < 1e-12);
  CHECK(std::abs(similarity_dimension(std::vector<double>{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}).s - 1.0) < 1e-12);
  CHECK(std::abs(similarity_dimension(std::vector<double>{0.4, 0.4, 0.4}).s - std::log(3.0) / std::log(2.5)) < 1e-12);
  CHECK(std::abs(similarity_dimension(std::vector<double>{0.5, 0.5}).s - 1.0) < 1e-12);
}

TEST_CASE("residual is small at the root") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.6);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> r(2 + t % 5);
    for (double& x : r) x = u(rng);
    const DimensionResult d = similarity_dimension(r);
    CHECK(std::abs(moran_residual(r, d.s)) < 1e-12);
    CHECK(d.s > 0.0);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(similarity_dimension(std::vector<double>{0.5}), DomainError);
  CHECK_THROWS_AS(similarity_dimension(std::vector<double>{0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(similarity_dimension(std::vector<double>{0.5, -0.1}), DomainError);
  CHECK_THROWS_AS(similarity_dimension(std::vector<double>{0.5, 0.5}, 0.0), ParameterError);
}

TEST_CASE("gradient matches finite differences") {
  const std::vector<double> r{0.2, 0.3, 0.25};
  const double s = similarity_dimension(r).s;
  const std::vector<double> g = dimension_gradient(r, s);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double h = 1e-6;
    std::vector<double> up = r;
    std::vector<double> dn = r;
    up[i] += h;
    dn[i] -= h;
    const double fd = (similarity_dimension(up).s - similarity_dimension(dn).s) / (2 * h);
    CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5));
    CHECK(g[i] > 0.0);
  }
}
