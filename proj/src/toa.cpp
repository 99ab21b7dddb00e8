#include "qtoa/toa.hpp"

#include "qtoa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

namespace qtoa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// +1 for r, -1 for l: the sign in exp(-i s x sqrt(2mE)) of the eigenstates.
double direction_sign(Direction d) { return d == Direction::r ? 1.0 : -1.0; }

void require_same_mass(const Packet& packet, const PiecewiseBarrier& barrier) {
  if (packet.mass() != barrier.mass())
    throw InvalidInput("packet and barrier masses differ");
}

// Overlap of the packet with the channel eigenstate per unit sqrt(m/p).
std::function<cplx(double)> channel_overlap(const Packet& packet,
                                            const PiecewiseBarrier& barrier,
                                            Channel channel, bool two_term) {
  const bool minus = channel.selection == Selection::minus;
  const bool right = channel.direction == Direction::r;
  if (minus && right)
    return [&packet, &barrier](double p) {
      return scattering_coefficients(barrier, p).T * packet.momentum_amplitude(p);
    };
  if (minus)
    return [&packet, &barrier, two_term](double p) {
      cplx g = scattering_coefficients(barrier, p).R * packet.momentum_amplitude(p);
      if (two_term)
        g += packet.momentum_amplitude(-p);
      return g;
    };
  if (right)
    return [&packet, &barrier, two_term](double p) {
      cplx g = packet.momentum_amplitude(p);
      if (two_term)
        g += std::conj(scattering_coefficients(barrier, p).R) *
             packet.momentum_amplitude(-p);
      return g;
    };
  return [&packet, &barrier](double p) {
    return std::conj(scattering_coefficients(barrier, p).T) *
           packet.momentum_amplitude(-p);
  };
}

double channel_path_length(const Packet& packet, const PiecewiseBarrier& barrier,
                           double detector, Channel channel) {
  const double q0 = packet.mean_position();
  if (channel == Channel::l_minus()) {
    const double wall = barrier.empty() ? 0.0 : barrier.support_left();
    return (wall - q0) + (wall - detector);
  }
  return detector - q0;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end)
      break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i)
        fn(i);
    });
  }
}

} // namespace

DetectorSide detector_side_for(Channel channel) {
  const bool right_side = (channel.direction == Direction::r) ==
                          (channel.selection == Selection::minus);
  return right_side ? DetectorSide::right_of_barrier
                    : DetectorSide::left_of_barrier;
}

Detector make_detector(const PiecewiseBarrier& barrier, double position,
                       DetectorSide side) {
  if (!std::isfinite(position))
    throw InvalidDetector("detector position must be finite");
  if (!barrier.empty()) {
    if (side == DetectorSide::right_of_barrier &&
        !(position > barrier.support_right()))
      throw InvalidDetector("detector at " + std::to_string(position) +
                            " is not right of the barrier support (ends at " +
                            std::to_string(barrier.support_right()) + ")");
    if (side == DetectorSide::left_of_barrier &&
        !(position < barrier.support_left()))
      throw InvalidDetector("detector at " + std::to_string(position) +
                            " is not left of the barrier support (starts at " +
                            std::to_string(barrier.support_left()) + ")");
  }
  return {position, side};
}

cplx free_toa_eigenfunction(double t, double x, Direction s, double p,
                            double mass) {
  if (direction_sign(s) * p <= 0.0)
    return 0.0;
  const double modulus = std::sqrt(std::abs(p) / (kTwoPi * mass));
  return std::polar(modulus, p * p * t / (2.0 * mass) - p * x);
}

ArrivalAmplitude::ArrivalAmplitude(const Packet& packet,
                                   const PiecewiseBarrier& barrier,
                                   double detector_position, Channel channel,
                                   const EngineSettings& settings)
    : channel_(channel),
      detector_(make_detector(barrier, detector_position,
                              detector_side_for(channel))),
      grid_(build_momentum_grid(packet, settings.width_sigmas,
                                settings.momentum_nodes)),
      mass_(packet.mass()) {
  require_same_mass(packet, barrier);
  const auto g = channel_overlap(packet, barrier, channel, settings.two_term);
  const double s = direction_sign(channel.direction);
  const double x = detector_.position;

  coefficients_.resize(grid_.size());
  CompensatedSum norm;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double p = grid_.nodes[i];
    const cplx gi = g(p);
    if (!std::isfinite(gi.real()) || !std::isfinite(gi.imag()))
      throw IntegrandError("channel overlap is not finite at p = " +
                               std::to_string(p),
                           p);
    norm.add(grid_.weights[i] * std::norm(gi));
    coefficients_[i] = grid_.weights[i] * std::sqrt(p / mass_) * gi *
                       std::polar(1.0, s * p * x) / std::sqrt(kTwoPi);
  }
  normalization_sq_ = norm.value();
  path_length_ = channel_path_length(packet, barrier, x, channel);
  const double width =
      barrier.empty() ? 0.0 : barrier.support_right() - barrier.support_left();
  phase_extent_ = std::abs(x - packet.mean_position()) + std::abs(path_length_) +
                  2.0 * width;
}

cplx ArrivalAmplitude::on_channel(double t) const {
  const double c = -t / (2.0 * mass_);
  CompensatedComplexSum acc;
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    const double p = grid_.nodes[i];
    acc.add(coefficients_[i] * std::polar(1.0, c * p * p));
  }
  return acc.value();
}

SplitAmplitude ArrivalAmplitude::operator()(double t) const {
  // The detector projector only overlaps the channel's own direction; the
  // other component vanishes identically.
  const cplx a = on_channel(t);
  if (channel_.direction == Direction::r)
    return {a, 0.0};
  return {0.0, a};
}

SplitAmplitude transmission_amplitude(const Packet& packet,
                                      const PiecewiseBarrier& barrier, double x,
                                      double t, const EngineSettings& settings) {
  return ArrivalAmplitude(packet, barrier, x, Channel::r_minus(), settings)(t);
}

cplx reflection_amplitude(const Packet& packet, const PiecewiseBarrier& barrier,
                          double y, double t, bool include_direct_tail,
                          const EngineSettings& settings) {
  EngineSettings s = settings;
  s.two_term = include_direct_tail;
  return ArrivalAmplitude(packet, barrier, y, Channel::l_minus(), s).on_channel(t);
}

cplx incoming_amplitude(const Packet& packet, const PiecewiseBarrier& barrier,
                        double y, double t, Channel channel,
                        bool include_direct_tail,
                        const EngineSettings& settings) {
  if (channel.selection != Selection::plus)
    throw InvalidInput("incoming amplitudes use the r+ or l+ channel");
  EngineSettings s = settings;
  s.two_term = include_direct_tail;
  return ArrivalAmplitude(packet, barrier, y, channel, s).on_channel(t);
}

NormalizationReport normalization_sq(const Packet& packet,
                                     const PiecewiseBarrier& barrier,
                                     Channel channel,
                                     const EngineSettings& settings) {
  require_same_mass(packet, barrier);
  const auto grid = build_momentum_grid(packet, settings.width_sigmas,
                                        settings.momentum_nodes);
  const auto g = channel_overlap(packet, barrier, channel, settings.two_term);
  CompensatedSum acc;
  for (std::size_t i = 0; i < grid.size(); ++i)
    acc.add(grid.weights[i] * std::norm(g(grid.nodes[i])));

  NormalizationReport out{acc.value(), 0.0};
  const double p0 = packet.mean_momentum();
  if (p0 > 0.0) {
    const auto sc = scattering_coefficients(barrier, p0);
    if (channel == Channel::r_minus())
      out.mean_momentum_approx = std::norm(sc.T);
    else if (channel == Channel::l_minus())
      out.mean_momentum_approx = std::norm(sc.R);
    else if (channel == Channel::r_plus())
      out.mean_momentum_approx = 1.0;
    else
      out.mean_momentum_approx = std::norm(sc.T) * packet.negative_tail_weight();
  }
  return out;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(points);
  const double h = step();
  for (std::size_t i = 0; i < points; ++i)
    out[i] = (i + 1 == points) ? t_max : t_min + h * static_cast<double>(i);
  return out;
}

double TimeGrid::step() const {
  return (t_max - t_min) / static_cast<double>(points - 1);
}

TimeGrid default_time_grid(const Packet& packet, const PiecewiseBarrier& barrier,
                           double detector_position, Channel channel,
                           std::size_t points) {
  const double p0 = packet.mean_momentum();
  if (!(p0 > 0.0))
    throw InvalidInput("default time window needs a packet moving right (p0 > 0)");
  const double m = packet.mass();
  const double t_free =
      m * channel_path_length(packet, barrier, detector_position, channel) / p0;
  const double spread_q = std::hypot(packet.position_spread(),
                                     t_free * packet.momentum_spread() / m);
  const double spread_t = m * spread_q / p0;
  if (t_free > 0.0)
    return {std::min(0.25 * t_free, t_free - 6.0 * spread_t),
            std::max(2.5 * t_free, t_free + 6.0 * spread_t), points};
  return {t_free - 8.0 * spread_t, t_free + 8.0 * spread_t, points};
}

double refined_peak(const std::vector<double>& times,
                    const std::vector<double>& values) {
  if (times.empty() || times.size() != values.size())
    throw InvalidInput("peak search needs matching, non-empty samples");
  const auto it = std::max_element(values.begin(), values.end());
  const auto i = static_cast<std::size_t>(it - values.begin());
  if (i == 0 || i + 1 == values.size())
    return times[i];
  const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
  const double curvature = y0 - 2.0 * y1 + y2;
  if (curvature >= 0.0)
    return times[i];
  // Uniform spacing assumed around the maximum.
  const double h = 0.5 * (times[i + 1] - times[i - 1]);
  return times[i] + 0.5 * h * (y0 - y2) / curvature;
}

ToaDistribution toa_distribution(const Packet& packet,
                                 const PiecewiseBarrier& barrier,
                                 double detector_position, Channel channel,
                                 const TimeGrid& time_grid,
                                 const EngineSettings& settings) {
  if (time_grid.points < 3 || !(time_grid.t_max > time_grid.t_min))
    throw InvalidInput("time grid needs at least three increasing points");
  const ArrivalAmplitude amplitude(packet, barrier, detector_position, channel,
                                   settings);

  const double t_extreme =
      std::max(std::abs(time_grid.t_min), std::abs(time_grid.t_max));
  const auto check = oscillation_resolution_check(
      amplitude.grid(), t_extreme, amplitude.phase_extent(), amplitude.mass());
  if (!check.ok)
    throw ResolutionError("momentum grid too coarse for the time window: " +
                              std::to_string(check.required_nodes) +
                              " nodes required",
                          check.required_nodes);

  const double n2 = amplitude.normalization_sq();
  if (!(n2 >= settings.empty_channel_floor))
    throw EmptyChannel("channel " + to_string(channel) +
                           " carries no probability (N^2 = " +
                           std::to_string(n2) + ")",
                       n2);

  ToaDistribution out{channel, amplitude.detector(), time_grid.times(), {},
                      n2, 0.0, 0.0, 0.0, 0.0};
  const std::size_t n = out.times.size();
  out.density.assign(n, 0.0);
  std::vector<double> off(n, 0.0);
  parallel_for(n, settings.threads, [&](std::size_t i) {
    const SplitAmplitude a = amplitude(out.times[i]);
    // Both s components are summed as in the POVM density; one is zero.
    out.density[i] = (std::norm(a.r) + std::norm(a.l)) / n2;
    off[i] = std::abs(channel.direction == Direction::r ? a.l : a.r);
  });
  out.off_channel_max = *std::max_element(off.begin(), off.end());

  out.captured_mass = integrate_density(out.density, out.times);
  std::vector<double> weighted(n);
  for (std::size_t i = 0; i < n; ++i)
    weighted[i] = out.times[i] * out.density[i];
  // Trapezoid on t * P(t), which may be negative; integrate by hand.
  CompensatedSum mean;
  for (std::size_t i = 1; i < n; ++i)
    mean.add(0.5 * (out.times[i] - out.times[i - 1]) * (weighted[i] + weighted[i - 1]));
  out.mean_toa = mean.value() / out.captured_mass;
  out.most_probable_toa = refined_peak(out.times, out.density);

  if (out.captured_mass < 1.0 - settings.tail_budget)
    throw TimeWindowError("time window captures only " +
                          std::to_string(out.captured_mass) +
                          " of the conditional probability");
  return out;
}

cplx eigenstate_overlap(double t, double t_prime, Direction s,
                        Direction s_prime, double epsilon) {
  if (!(epsilon > 0.0))
    throw InvalidInput("overlap regulator epsilon must be positive");
  if (s != s_prime)
    return 0.0;
  return cplx{0.0, 1.0} / (kTwoPi * cplx{t_prime - t, epsilon});
}

cplx eigenstate_overlap_numerical(double t, double t_prime, Direction s,
                                  Direction s_prime, double epsilon,
                                  double energy_max, std::size_t nodes) {
  if (!(epsilon > 0.0))
    throw InvalidInput("overlap regulator epsilon must be positive");
  if (s != s_prime)
    return 0.0;
  const auto grid = uniform_grid(0.0, energy_max, nodes);
  const cplx z{t - t_prime, -epsilon};
  return integrate_complex(
             [&](double e) { return std::exp(cplx{0.0, -1.0} * e * z); }, grid) /
         kTwoPi;
}

} // namespace qtoa
