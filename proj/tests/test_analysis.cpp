#include <doctest.h>

#include "oracles/square_phase_oracle.hpp"

#include "qtoa/analysis.hpp"
#include "qtoa/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qtoa;

TEST_CASE("no barrier, no delay") {
  const auto free = PiecewiseBarrier::free(1.0);
  CHECK(wigner_delay(free, 2.0, ScatteringChannel::transmission) == 0.0);
  CHECK(phase_derivative_p(free, 2.0, ScatteringChannel::transmission) == 0.0);
  CHECK_THROWS_AS(wigner_delay(free, 2.0, ScatteringChannel::reflection), SingularPhase);
}

TEST_CASE("finite-difference delay matches the analytic phase derivative") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> V(0.05, 5.0), a(0.1, 10.0), p(0.2, 4.0);
  int checked = 0;
  while (checked < 100) {
    const double v = V(rng), w = a(rng), q = p(rng);
    // Skip the E = V neighbourhood where the closed form switches branch.
    if (std::abs(q * q / 2.0 - v) < 1e-3)
      continue;
    const auto b = PiecewiseBarrier::square(v, w, 1.0);
    const double ours = wigner_delay(b, q, ScatteringChannel::transmission);
    const double exact = oracle::square_transmission_delay(v, w, q, 1.0);
    CHECK(std::abs(ours - exact) < 1e-6 * std::max(1.0, std::abs(exact)));
    ++checked;
  }
}

TEST_CASE("momentum phase slope matches the analytic oracle in both references") {
  for (double v : {0.5, 3.125})
    for (double w : {2.0, 8.0}) {
      const auto b = PiecewiseBarrier::square(v, w, 1.0);
      CHECK(phase_derivative_p(b, 2.0, ScatteringChannel::transmission) ==
            doctest::Approx(oracle::square_transmission_phase_slope(v, w, 2.0, 1.0)).epsilon(1e-7));
      CHECK(phase_derivative_p(b, 2.0, ScatteringChannel::transmission,
                               PhaseReference::barrier_edges) ==
            doctest::Approx(oracle::square_transmission_phase_slope(v, w, 2.0, 1.0, true))
                .epsilon(1e-7));
    }
}

TEST_CASE("edge-referenced tunnelling delay saturates with width") {
  // Opaque regime kappa a in [10, 20] for V = 4.5, p = 2 (kappa = sqrt 5).
  const double kappa = std::sqrt(5.0);
  double lo = INFINITY, hi = -INFINITY;
  for (double ka = 10.0; ka <= 20.0; ka += 1.0) {
    const auto b = PiecewiseBarrier::square(4.5, ka / kappa, 1.0);
    const double d = wigner_delay(b, 2.0, ScatteringChannel::transmission,
                                  PhaseReference::barrier_edges);
    const double exact = oracle::square_transmission_delay(4.5, ka / kappa, 2.0, 1.0, true);
    CHECK(d == doctest::Approx(exact).epsilon(1e-6));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK((hi - lo) <= 0.02 * std::abs(hi));
}

TEST_CASE("delay signs: retardation above, advancement below the barrier") {
  for (double a : {2.0, 4.0, 6.0, 8.0, 10.0}) {
    CHECK(wigner_delay(PiecewiseBarrier::square(0.5, a, 1.0), 2.0,
                       ScatteringChannel::transmission) > 0.0);
    CHECK(wigner_delay(PiecewiseBarrier::square(4.5, a, 1.0), 2.0,
                       ScatteringChannel::transmission) < 0.0);
  }
}

TEST_CASE("phase-time prediction adds the delay to the free peak") {
  const GaussianPacket packet(-50.0, 2.0, 10.0, 1.0);
  const auto free_report = phase_time_prediction(packet, PiecewiseBarrier::free(1.0), 50.0,
                                                 ScatteringChannel::transmission);
  CHECK(free_report.wigner_delay == 0.0);
  CHECK(std::abs(free_report.predicted_toa - 49.9377) < 0.005);

  const auto b = PiecewiseBarrier::square(0.5, 4.0, 1.0);
  const auto r = phase_time_prediction(packet, b, 50.0, ScatteringChannel::transmission);
  CHECK(r.predicted_toa == doctest::Approx(r.reference_free_toa + r.wigner_delay));
  CHECK(r.predicted_toa > r.reference_free_toa);
  CHECK_THROWS_AS(phase_time_prediction(packet, b, 2.0, ScatteringChannel::transmission),
                  InvalidDetector);
}

TEST_CASE("two-bump condition") {
  const auto b = PiecewiseBarrier::square(1.0, 10.0, 1.0);
  const auto c = two_bump_condition(b, 2.0, 4);
  REQUIRE(c.v_star.has_value());
  const double kn = 4.0 * std::numbers::pi / 10.0;
  CHECK(*c.v_star == doctest::Approx((4.0 - kn * kn) / 2.0));
  CHECK(std::abs(*c.v_star - 1.21045) < 5e-5);

  const auto at_star = PiecewiseBarrier::square(*c.v_star, 10.0, 1.0);
  const auto s = two_bump_condition(at_star, 2.0);
  CHECK(s.n_nearest == 4);
  CHECK(std::abs(s.residual) < 1e-12);
  CHECK(std::abs(scattering_coefficients(at_star, 2.0).R) < 1e-10);

  const auto flat = two_bump_condition(PiecewiseBarrier::square(0.0, 10.0, 1.0), 2.0);
  CHECK(flat.interior_momentum == 2.0);
  CHECK(flat.residual == doctest::Approx(20.0 - 6.0 * std::numbers::pi));

  CHECK_THROWS_AS(two_bump_condition(PiecewiseBarrier::square(2.0, 10.0, 1.0), 2.0),
                  NotApplicable);
  CHECK_THROWS_AS(two_bump_condition(PiecewiseBarrier::free(1.0), 2.0), NotApplicable);
}

TEST_CASE("phase of R is singular exactly at the two-bump condition") {
  const double kn = 4.0 * std::numbers::pi / 10.0;
  const auto b = PiecewiseBarrier::square((4.0 - kn * kn) / 2.0, 10.0, 1.0);
  CHECK_THROWS_AS(wigner_delay(b, 2.0, ScatteringChannel::reflection), SingularPhase);
  // The squared-amplitude derivative stays finite through the zero.
  const double at = phase_derivative_p(b, 2.0, ScatteringChannel::reflection);
  const double near = phase_derivative_p(b, 2.0 + 1e-3, ScatteringChannel::reflection);
  CHECK(std::isfinite(at));
  CHECK(std::abs(at - near) < 0.1);
}

TEST_CASE("stationary-phase momentum in free flight") {
  const auto free = PiecewiseBarrier::free(1.0);
  CHECK(stationary_phase_momentum(50.0, 100.0, free, ScatteringChannel::transmission) ==
        doctest::Approx(2.0));
  CHECK(stationary_phase_momentum(40.0, 100.0, free, ScatteringChannel::transmission) ==
        doctest::Approx(2.5));
  CHECK(stationary_phase_time(2.0, 100.0, free, ScatteringChannel::transmission) ==
        doctest::Approx(50.0));
  CHECK_THROWS_AS(stationary_phase_momentum(0.0, 100.0, free, ScatteringChannel::transmission),
                  InvalidInput);
  CHECK_THROWS_AS(stationary_phase_momentum(10.0, -100.0, free,
                                            ScatteringChannel::transmission),
                  NoStationaryPoint);
}

TEST_CASE("stationary momentum and time are inverse maps") {
  const auto b = PiecewiseBarrier::square(1.2, 10.0, 1.0);
  for (double t : {45.0, 55.0, 65.0}) {
    const double p = stationary_phase_momentum(t, 100.0, b, ScatteringChannel::reflection);
    CHECK(stationary_phase_time(p, 100.0, b, ScatteringChannel::reflection) ==
          doctest::Approx(t).epsilon(1e-8));
  }
}

TEST_CASE("approximate reflection profile") {
  const GaussianPacket packet(-50.0, 2.0, 10.0, 1.0);
  const double kn = 4.0 * std::numbers::pi / 10.0;
  const auto b = PiecewiseBarrier::square((4.0 - kn * kn) / 2.0, 10.0, 1.0);
  const double t_dip = stationary_phase_time(2.0, 100.0, b, ScatteringChannel::reflection);
  CHECK(approx_reflection_profile(t_dip, 100.0, packet, b) < 1e-12);
  const double before = approx_reflection_profile(t_dip - 2.0, 100.0, packet, b);
  const double after = approx_reflection_profile(t_dip + 2.0, 100.0, packet, b);
  CHECK(before > 1e-3);
  CHECK(after > 1e-3);

  // With V = 0 the profile reduces to sin^2(p(t) a) times the Gaussian.
  const auto flat = PiecewiseBarrier::square(0.0, 10.0, 1.0);
  const double t = 48.0, p = 100.0 / t;
  CHECK(approx_reflection_profile(t, 100.0, packet, flat) ==
        doctest::Approx(std::pow(std::sin(p * 10.0), 2) * std::exp(-200.0 * (p - 2.0) * (p - 2.0))));

  // Late enough that the stationary momentum drops under the barrier.
  CHECK_THROWS_AS(approx_reflection_profile(500.0, 100.0, packet, b), EvanescentWindow);
  CHECK_THROWS_AS(approx_reflection_profile(50.0, 100.0, packet, PiecewiseBarrier::free(1.0)),
                  NotApplicable);
}
