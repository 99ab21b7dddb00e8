#include <doctest.h>

#include "qtoa/errors.hpp"
#include "qtoa/quadrature.hpp"
#include "qtoa/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace qtoa;

namespace {

double integrate_real(double (*f)(double), const MomentumGrid& g) {
  return integrate_complex([f](double x) { return cplx{f(x)}; }, g).real();
}

double cubic(double x) { return 2.0 * x * x * x - x * x + 3.0 * x - 4.0; }
double cubic_integral(double a, double b) {
  auto F = [](double x) { return 0.5 * x * x * x * x - x * x * x / 3.0 + 1.5 * x * x - 4.0 * x; };
  return F(b) - F(a);
}

} // namespace

TEST_CASE("composite rule integrates cubics exactly for any node count") {
  for (std::size_t n : {2u, 3u, 4u, 5u, 6u, 7u, 10u, 101u, 4096u}) {
    const auto g = uniform_grid(-1.5, 2.25, n);
    CHECK(integrate_real(cubic, g) == doctest::Approx(cubic_integral(-1.5, 2.25)).epsilon(1e-13));
  }
}

TEST_CASE("weights are positive and sum to the window length") {
  for (std::size_t n : {2u, 3u, 4u, 8u, 4097u}) {
    const auto g = uniform_grid(0.3, 1.1, n);
    double total = 0.0;
    for (double w : g.weights) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(total == doctest::Approx(0.8).epsilon(1e-12));
  }
}

TEST_CASE("convergence on a smooth integrand is fourth order") {
  auto err = [](std::size_t n) {
    const auto g = uniform_grid(0.0, 1.0, n);
    return std::abs(integrate_complex([](double x) { return cplx{std::exp(x)}; }, g).real() -
                    (std::exp(1.0) - 1.0));
  };
  const double e1 = err(21), e2 = err(41);
  CHECK(e1 / e2 > 12.0);
}

TEST_CASE("grid construction rejects degenerate windows") {
  CHECK_THROWS_AS(uniform_grid(1.0, 1.0, 10), InvalidInput);
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), InvalidInput);
  const GaussianPacket backwards(-50.0, -2.0, 10.0, 1.0);
  CHECK_THROWS_AS(build_momentum_grid(backwards, 8.0, 100), InvalidInput);
}

TEST_CASE("packet window is clipped at p = 0 and records the truncated mass") {
  const GaussianPacket g(-50.0, 2.0, 10.0, 1.0);
  const auto grid = build_momentum_grid(g, 8.0, 4096);
  CHECK(grid.p_min == doctest::Approx(1.2));
  CHECK(grid.p_max == doctest::Approx(2.8));
  CHECK(grid.truncation_mass == doctest::Approx(std::erfc(8.0 * std::sqrt(2.0))));

  const GaussianPacket slow(-50.0, 0.1, 1.0, 1.0);
  const auto clipped = build_momentum_grid(slow, 8.0, 64);
  CHECK(clipped.p_min == 0.0);
  CHECK(clipped.truncation_mass > 0.4);
}

TEST_CASE("compensated summation recovers small terms lost by naive addition") {
  CompensatedSum s;
  double naive = 0.0;
  s.add(1e16);
  naive += 1e16;
  for (int i = 0; i < 1000; ++i) {
    s.add(1.0);
    naive += 1.0;
  }
  s.add(-1e16);
  naive -= 1e16;
  CHECK(s.value() == 1000.0);
  CHECK(naive != 1000.0);
}

TEST_CASE("non-finite integrands are reported with their node") {
  const auto g = uniform_grid(-1.0, 1.0, 5);
  try {
    integrate_complex([](double x) { return cplx{1.0 / x}; }, g);
    FAIL("expected IntegrandError");
  } catch (const IntegrandError& e) {
    CHECK(e.node == 0.0);
  }
}

TEST_CASE("resolution check applies the pi/4 phase budget") {
  const auto g = uniform_grid(1.0, 3.0, 2001); // spacing 1e-3
  const auto ok = oscillation_resolution_check(g, 100.0, 200.0, 1.0);
  CHECK(ok.max_phase_slope == doctest::Approx(500.0));
  CHECK(ok.ok);
  const auto bad = oscillation_resolution_check(g, 1000.0, 200.0, 1.0);
  CHECK_FALSE(bad.ok);
  CHECK(bad.required_nodes > 2001);
  const auto fixed = oscillation_resolution_check(uniform_grid(1.0, 3.0, bad.required_nodes),
                                                  1000.0, 200.0, 1.0);
  CHECK(fixed.ok);
}

TEST_CASE("density integration is a trapezoid rule with input checks") {
  const std::vector<double> t{0.0, 1.0, 3.0};
  const std::vector<double> p{0.0, 1.0, 0.0};
  CHECK(integrate_density(p, t) == doctest::Approx(1.5));
  const std::vector<double> neg{0.0, -1e-3, 0.0};
  CHECK_THROWS_AS(integrate_density(neg, t), InvalidInput);
  const std::vector<double> unsorted{0.0, 2.0, 1.0};
  CHECK_THROWS_AS(integrate_density(p, unsorted), InvalidInput);
  const std::vector<double> short_t{0.0, 1.0};
  CHECK_THROWS_AS(integrate_density(p, short_t), InvalidInput);
}
