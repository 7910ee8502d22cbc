#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "swarm/density.hpp"
#include "swarm/scalar_math.hpp"

using namespace swarm;

TEST_CASE("lambert_w0 anchor values") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  // oracle: Newton on w e^w = 1 from w = 0.5, run to machine precision
  const double w1 = oracles::newton_lambert(1.0);
  CHECK(lambert_w0(1.0) == doctest::Approx(w1).epsilon(1e-14));
  CHECK(lambert_w0(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-12));
}

TEST_CASE("lambert_w0 defining identity w e^w = x") {
  for (double m : {0.1, 0.5, 1.0, 2.0, 3.0, 5.0}) {
    const double x = m * std::exp(m);
    CHECK(lambert_w0(x) == doctest::Approx(m).epsilon(1e-13));
  }
  // residual property across 17 decades
  for (int k = -8; k <= 8; ++k) {
    const double x = std::pow(10.0, k);
    const double w = lambert_w0(x);
    CHECK(std::abs(w * std::exp(w) - x) / std::max(1.0, x) <= 1e-12);
  }
}

TEST_CASE("lambert_w0 domain error on negative input") {
  CHECK_THROWS_AS(lambert_w0(-0.1), std::domain_error);
  CHECK_THROWS_AS(lambert_w0(std::nan("")), std::domain_error);
}

TEST_CASE("lambert_w0_exp anchor values") {
  CHECK(lambert_w0_exp(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // w e^w = e^{-50} gives w ~= e^{-50}
  CHECK(lambert_w0_exp(-50.0) == doctest::Approx(std::exp(-50.0)).epsilon(1e-12));
  // oracle: fixed point w <- 100 - ln w
  const double w100 = oracles::fixed_point_w_plus_ln(100.0);
  CHECK(lambert_w0_exp(100.0) == doctest::Approx(w100).epsilon(1e-13));
}

TEST_CASE("lambert_w0_exp residual and agreement with lambert_w0") {
  for (int i = 0; i <= 140; ++i) {
    const double z = -700.0 + 10.0 * i;
    const double w = lambert_w0_exp(z);
    CHECK(w > 0.0);
    // relative residual on w + ln w = z
    const double res = std::abs(w + std::log(w) - z);
    CHECK(res <= 1e-12 * std::max(1.0, std::abs(z)));
    const double ez = std::exp(z);
    if (std::isfinite(ez) && ez > 0.0) {
      const double ref = lambert_w0(ez);
      CHECK(std::abs(w - ref) <= 1e-10 * std::max(w, ref));
    }
  }
}

TEST_CASE("lambert_w0_exp monotonicity") {
  double prev = 0.0;
  for (int i = 0; i <= 2800; ++i) {
    const double z = -700.0 + 0.5 * i;
    const double w = lambert_w0_exp(z);
    if (i > 0) CHECK(w > prev);
    prev = w;
  }
  CHECK_THROWS_AS(lambert_w0_exp(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("find_root on simple brackets") {
  BracketedFn linear{[](double x) { return x - 3.0; }, 0.0, 10.0, 1e-10};
  CHECK(find_root(linear) == doctest::Approx(3.0).epsilon(1e-9));

  BracketedFn quad{[](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12};
  CHECK(find_root(quad) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
}

TEST_CASE("find_root rejects invalid brackets") {
  BracketedFn bad{[](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-10};
  CHECK_THROWS_AS(find_root(bad), BracketError);
  BracketedFn bad_tol{[](double x) { return x; }, -1.0, 1.0, 0.0};
  CHECK_THROWS_AS(find_root(bad_tol), std::invalid_argument);
}

TEST_CASE("find_root on the normalization defect of a three-particle toy set") {
  // oracle: exhaustive scan of C on a 1e-6 grid
  const Eigen::Vector3d u(0.5, 1.25, 3.0);
  auto defect = [&](double c) {
    const DensityParams p{2.0, 1.5, c, 1};
    return (rho(p, u[0]) + rho(p, u[1]) + rho(p, u[2])) / 3.0 - 1.0;
  };
  double best_c = 0.0, best = std::abs(defect(0.0));
  for (double c = 0.0; c <= 3.0; c += 1e-6) {
    const double d = std::abs(defect(c));
    if (d < best) {
      best = d;
      best_c = c;
    }
  }
  const double root = find_root(BracketedFn{defect, 0.0, 4.0, 1e-10});
  CHECK(std::abs(root - best_c) <= 2e-6);
}

TEST_CASE("find_root_expanding doubles the upper endpoint") {
  int evals = 0;
  auto f = [&](double x) {
    ++evals;
    return x - 37.0;
  };
  CHECK(find_root_expanding(f, 0.0, 1.0, 1e-10, 60) == doctest::Approx(37.0).epsilon(1e-9));
  CHECK_THROWS_AS(find_root_expanding([](double x) { return x + 1.0; }, 0.0, 1.0, 1e-10, 5),
                  BracketError);
}
