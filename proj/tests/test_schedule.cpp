#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "swarm/schedule.hpp"
#include "swarm/warnings.hpp"

using namespace swarm;

namespace {

struct WarningCapture {
  std::vector<std::string> messages;
  WarningHandler previous;
  WarningCapture() {
    previous = set_warning_handler([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { set_warning_handler(previous); }
};

}  // namespace

TEST_CASE("quadratic schedule matches the experiment settings") {
  WarningCapture capture;
  const auto s = CoolingSchedule::quadratic(0.25, 25.0);
  CHECK(beta(s, 0.0) == doctest::Approx(0.25));
  CHECK(beta(s, 1.0) == doctest::Approx(25.25));
  CHECK(beta_prime(s, 0.1) == doctest::Approx(5.0));
}

TEST_CASE("linear schedule") {
  WarningCapture capture;
  const auto s = CoolingSchedule::linear(0.25, 25.0);
  CHECK(beta(s, 0.5) == doctest::Approx(12.75));
  CHECK(beta_prime(s, 0.3) == doctest::Approx(25.0));
}

TEST_CASE("constant schedule has zero derivative") {
  const auto s = CoolingSchedule::constant(5.0);
  for (double t : {0.0, 0.4, 2.0}) {
    CHECK(beta(s, t) == doctest::Approx(5.0));
    CHECK(beta_prime(s, t) == 0.0);
  }
}

TEST_CASE("beta_prime agrees with central differences") {
  WarningCapture capture;
  const double h = 1e-6;
  for (const auto& s : {CoolingSchedule::quadratic(0.25, 25.0), CoolingSchedule::linear(1.0, 3.0),
                        CoolingSchedule::polynomial(0.5, 2.0, 3)}) {
    for (double t : {0.1, 0.25, 0.5, 0.75, 1.0}) {
      const double fd = (beta(s, t + h) - beta(s, t - h)) / (2.0 * h);
      const double exact = beta_prime(s, t);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("beta is nondecreasing on a grid") {
  WarningCapture capture;
  const auto s = CoolingSchedule::polynomial(0.25, 10.0, 4);
  for (int i = 0; i <= 100; ++i) CHECK(beta_prime(s, i / 100.0) >= 0.0);
}

TEST_CASE("negative time is a domain error") {
  const auto s = CoolingSchedule::constant(1.0);
  CHECK_THROWS_AS(beta(s, -0.1), std::domain_error);
  CHECK_THROWS_AS(beta_prime(s, -0.1), std::domain_error);
}

TEST_CASE("beta0 below 1 warns instead of rejecting") {
  WarningCapture capture;
  warn_if_subunit_beta0(CoolingSchedule::quadratic(0.25, 25.0));
  CHECK(capture.messages.size() == 1);
  warn_if_subunit_beta0(CoolingSchedule::constant(2.0));
  CHECK(capture.messages.size() == 1);
  CHECK_THROWS_AS(CoolingSchedule::linear(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CoolingSchedule::linear(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(CoolingSchedule::polynomial(1.0, 1.0, 0), std::invalid_argument);
}
