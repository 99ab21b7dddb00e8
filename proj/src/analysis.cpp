#include "qtoa/analysis.hpp"

#include "qtoa/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qtoa {

namespace {

constexpr double kPi = std::numbers::pi;
// R = -M21/M22 is a cancellation and carries absolute error near 1e-16, so
// its phase is meaningless below this size. T = 1/M22 keeps full relative
// precision however small it gets, so only an exact zero is singular.
constexpr double kSmallReflection = 1e-10;

double amplitude_floor(ScatteringChannel channel) {
  return channel == ScatteringChannel::reflection
             ? kSmallReflection
             : std::numeric_limits<double>::min();
}

cplx referenced_coefficient(const PiecewiseBarrier& barrier, double p,
                            ScatteringChannel channel, PhaseReference reference) {
  const auto sc = scattering_coefficients(barrier, p);
  const cplx c = channel == ScatteringChannel::transmission ? sc.T : sc.R;
  if (reference == PhaseReference::origin || barrier.empty())
    return c;
  const double xl = barrier.support_left();
  const double xr = barrier.support_right();
  if (channel == ScatteringChannel::transmission)
    return c * std::polar(1.0, p * (xr - xl));
  return c * std::polar(1.0, -2.0 * p * xl);
}

void require_momentum(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw InvalidInput("phase derivatives need a finite momentum p > 0");
}

} // namespace

double wigner_delay(const PiecewiseBarrier& barrier, double p,
                    ScatteringChannel channel, PhaseReference reference) {
  require_momentum(p);
  const double m = barrier.mass();
  const double energy = p * p / (2.0 * m);
  const double h = 1e-5 * energy;

  const double floor = amplitude_floor(channel);
  const cplx centre = referenced_coefficient(barrier, p, channel, reference);
  if (!(std::abs(centre) >= floor))
    throw SingularPhase("scattering amplitude vanishes at p = " +
                        std::to_string(p) + "; its phase is undefined");

  auto phase_at = [&](double offset) {
    const double e = energy + offset;
    const cplx c =
        referenced_coefficient(barrier, std::sqrt(2.0 * m * e), channel, reference);
    if (!(std::abs(c) >= floor))
      throw SingularPhase("scattering amplitude vanishes inside the stencil");
    // Phase relative to the centre, so no branch cut is crossed for small h.
    const double dphi = std::arg(c / centre);
    if (std::abs(dphi) > 0.5 * kPi)
      throw SingularPhase("phase jumps across the difference stencil");
    return dphi;
  };

  const double d1 = (phase_at(h) - phase_at(-h)) / (2.0 * h);
  const double d2 = (phase_at(2.0 * h) - phase_at(-2.0 * h)) / (4.0 * h);
  return (4.0 * d1 - d2) / 3.0;
}

double phase_derivative_p(const PiecewiseBarrier& barrier, double p,
                          ScatteringChannel channel, PhaseReference reference) {
  require_momentum(p);
  auto squared = [&](double q) {
    const cplx c = referenced_coefficient(barrier, q, channel, reference);
    return c * c;
  };
  // arg(C^2(p+s) / C^2(p-s)) is continuous through a simple zero of C at p.
  auto symmetric = [&](double step) {
    const cplx lo = squared(p - step);
    const cplx hi = squared(p + step);
    const double floor = amplitude_floor(channel) * amplitude_floor(channel);
    if (!(std::abs(lo) >= floor) || !(std::abs(hi) >= floor))
      throw SingularPhase("scattering amplitude vanishes around p = " +
                          std::to_string(p));
    return 0.5 * std::arg(hi / lo) / (2.0 * step);
  };
  const double h = 1e-5 * p;
  return (4.0 * symmetric(h) - symmetric(2.0 * h)) / 3.0;
}

PhaseTimeReport phase_time_prediction(const GaussianPacket& packet,
                                      const PiecewiseBarrier& barrier,
                                      double detector_position,
                                      ScatteringChannel channel,
                                      const EngineSettings& settings) {
  const double p0 = packet.p0();
  const Channel ch = channel == ScatteringChannel::transmission
                         ? Channel::r_minus()
                         : Channel::l_minus();
  make_detector(barrier, detector_position, detector_side_for(ch));

  // Free flight over the same path length, always as a transmission.
  double free_x = detector_position;
  if (channel == ScatteringChannel::reflection) {
    const double wall = barrier.support_left();
    free_x = packet.q0() + (wall - packet.q0()) + (wall - detector_position);
  }
  const auto free_barrier = PiecewiseBarrier::free(packet.mass());
  const auto grid = default_time_grid(packet, free_barrier, free_x,
                                      Channel::r_minus());
  const auto free_dist = toa_distribution(packet, free_barrier, free_x,
                                          Channel::r_minus(), grid, settings);

  PhaseTimeReport out{};
  out.p0 = p0;
  out.wigner_delay = wigner_delay(barrier, p0, channel);
  out.reference_free_toa = free_dist.most_probable_toa;
  out.predicted_toa = out.reference_free_toa + out.wigner_delay;
  return out;
}

TwoBumpCondition two_bump_condition(const PiecewiseBarrier& barrier, double p0,
                                    std::optional<int> target_n) {
  if (!barrier.is_single_square())
    throw NotApplicable("the two-bump condition is defined for one square barrier");
  require_momentum(p0);
  const double m = barrier.mass();
  const auto& seg = barrier.segments().front();
  const double a = seg.right - seg.left;
  const double kv2 = 2.0 * m * seg.height;
  if (!(p0 * p0 > kv2))
    throw NotApplicable("E0 <= V: no oscillating interior solution");

  TwoBumpCondition out{};
  out.interior_momentum = std::sqrt(p0 * p0 - kv2);
  const double phase = out.interior_momentum * a;
  out.n_nearest = static_cast<int>(std::lround(phase / kPi));
  out.residual = phase - out.n_nearest * kPi;

  const int n = target_n.value_or(out.n_nearest);
  if (n >= 1) {
    const double kn = n * kPi / a;
    const double v = (p0 * p0 - kn * kn) / (2.0 * m);
    if (v > 0.0)
      out.v_star = v;
  }
  return out;
}

double stationary_phase_momentum(double t, double path,
                                 const PiecewiseBarrier& barrier,
                                 ScatteringChannel channel) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw InvalidInput("stationary phase momentum needs t > 0");
  const double m = barrier.mass();
  constexpr double damping = 0.5;
  constexpr int max_iterations = 200;
  double p = m * path / t;
  for (int i = 0; i < max_iterations; ++i) {
    if (!(p > 0.0))
      throw NoStationaryPoint("iteration left p > 0 at t = " + std::to_string(t));
    const double target = m * (path + phase_derivative_p(barrier, p, channel)) / t;
    const double next = (1.0 - damping) * p + damping * target;
    // The finite-difference slope is noisy near 1e-10 close to a zero of R.
    if (std::abs(next - p) <= 1e-9 * std::max(1.0, std::abs(p)))
      return next;
    p = next;
  }
  throw NoStationaryPoint("no stationary momentum after 200 iterations at t = " +
                          std::to_string(t));
}

double stationary_phase_time(double p, double path,
                             const PiecewiseBarrier& barrier,
                             ScatteringChannel channel) {
  require_momentum(p);
  return barrier.mass() * (path + phase_derivative_p(barrier, p, channel)) / p;
}

double approx_reflection_profile(double t, double path,
                                 const GaussianPacket& packet,
                                 const PiecewiseBarrier& barrier) {
  if (!barrier.is_single_square())
    throw NotApplicable("the approximate profile needs one square barrier");
  const auto& seg = barrier.segments().front();
  const double a = seg.right - seg.left;
  const double m = barrier.mass();
  const double kv2 = 2.0 * m * seg.height;
  // With V = 0 nothing reflects and arg R is undefined; use free flight.
  const double p = seg.height == 0.0
                       ? m * path / t
                       : stationary_phase_momentum(t, path, barrier,
                                                   ScatteringChannel::reflection);
  if (!(p * p > kv2))
    throw EvanescentWindow("stationary momentum " + std::to_string(p) +
                           " lies below the barrier at t = " + std::to_string(t));
  const double s = std::sin(std::sqrt(p * p - kv2) * a);
  const double d = packet.delta() * (p - packet.p0());
  return s * s * std::exp(-2.0 * d * d);
}

} // namespace qtoa
