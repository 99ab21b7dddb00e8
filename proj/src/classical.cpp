#include "qtoa/classical.hpp"

#include "qtoa/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace qtoa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_state(double q, double p, double x) {
  if (!std::isfinite(q) || !std::isfinite(p) || !std::isfinite(x))
    throw InvalidInput("classical toa needs finite q, p and x");
  if (p == 0.0)
    throw ZeroMomentum("classical toa is undefined for p = 0");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct Piece {
  double left;
  double right;
  double height;
};

std::vector<Piece> pieces_of(const PiecewiseBarrier& b) {
  std::vector<Piece> out;
  if (b.empty()) {
    out.push_back({-kInf, kInf, 0.0});
    return out;
  }
  out.push_back({-kInf, b.support_left(), 0.0});
  for (const auto& s : b.segments())
    out.push_back({s.left, s.right, s.height});
  out.push_back({b.support_right(), kInf, 0.0});
  return out;
}

// Unsigned traversal time of [lo, hi] for a mover with kinetic energy
// p^2/2m at a point where the potential is v_start. m L / p_local per piece
// keeps V = 0 stretches bit-identical to the free formula.
double traversal_time(const PiecewiseBarrier& b, double lo, double hi, double p,
                      double v_start, double toward) {
  const double m = b.mass();
  double total = 0.0;
  for (const auto& piece : pieces_of(b)) {
    const double a = std::max(lo, piece.left);
    const double c = std::min(hi, piece.right);
    if (!(c > a))
      continue;
    double p_local;
    if (piece.height == v_start) {
      p_local = std::abs(p);
    } else {
      const double p2 = p * p + 2.0 * m * (v_start - piece.height);
      if (!(p2 > 0.0))
        throw ClassicallyForbidden(
            "V(q') >= H on the path: the equation of time has no real value",
            toward > 0.0 ? a : c);
      p_local = std::sqrt(p2);
    }
    total += m * (c - a) / p_local;
  }
  return total;
}

double smooth_max_on(const SmoothBarrier& b, double lo, double hi) {
  if (lo <= 0.0 && hi >= 0.0)
    return b.height;
  const double nearest = std::min(std::abs(lo), std::abs(hi));
  return b.potential(nearest);
}

double smooth_traversal(const SmoothBarrier& b, double lo, double hi,
                        double energy) {
  if (!(hi > lo))
    return 0.0;
  auto f = [&](double qp) { return 1.0 / std::sqrt(energy - b.potential(qp)); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, lo, hi, 20, 1e-13);
  return std::sqrt(b.mass / 2.0) * integral;
}

// sqrt(m/2) int dq'/sqrt(E - V) between `from` and a turning point, with
// q' = turn -+ u^2 so the integrand 2u / sqrt(E - V) stays finite.
double smooth_traversal_to_turning(const SmoothBarrier& b, double from,
                                   double turn, double energy) {
  const double dist = std::abs(turn - from);
  if (dist == 0.0)
    return 0.0;
  const double s = sign(turn - from);
  const double limit = 2.0 / std::sqrt(std::abs(b.potential_derivative(turn)));
  auto f = [&](double u) {
    const double qp = turn - s * u * u;
    const double gap = energy - b.potential(qp);
    if (u < 1e-7 || !(gap > 0.0))
      return limit;
    return 2.0 * u / std::sqrt(gap);
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          f, 0.0, std::sqrt(dist), 20, 1e-13);
  return std::sqrt(b.mass / 2.0) * integral;
}

} // namespace

SmoothBarrier::SmoothBarrier(double height, double width, double mass)
    : height(height), width(width), mass(mass) {
  if (!(height > 0.0) || !std::isfinite(height))
    throw InvalidInput("smooth barrier height must be positive");
  if (!(width > 0.0) || !std::isfinite(width))
    throw InvalidInput("smooth barrier width must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw InvalidInput("mass must be positive");
}

double SmoothBarrier::potential(double q) const {
  const double c = std::cosh(q / width);
  return height / (c * c);
}

double SmoothBarrier::potential_derivative(double q) const {
  const double c = std::cosh(q / width);
  return -2.0 * height * std::tanh(q / width) / (width * c * c);
}

double SmoothBarrier::turning_distance(double energy) const {
  if (!(energy > 0.0) || !(energy < height))
    throw NotApplicable("turning points exist only for 0 < E < V");
  return width * std::acosh(std::sqrt(height / energy));
}

double free_classical_toa(double q, double p, double x, double mass) {
  require_state(q, p, x);
  return mass * (x - q) / p;
}

double classical_toa(const PiecewiseBarrier& potential, double q, double p,
                     double x) {
  require_state(q, p, x);
  const double lo = std::min(q, x);
  const double hi = std::max(q, x);
  const double t =
      traversal_time(potential, lo, hi, p, potential.potential(q), sign(x - q));
  return sign(p) * sign(x - q) * t;
}

double classical_toa(const SmoothBarrier& potential, double q, double p,
                     double x) {
  require_state(q, p, x);
  const double energy = p * p / (2.0 * potential.mass) + potential.potential(q);
  const double lo = std::min(q, x);
  const double hi = std::max(q, x);
  if (!(energy > smooth_max_on(potential, lo, hi)))
    throw ClassicallyForbidden(
        "V(q') >= H on the path: the equation of time has no real value",
        (lo <= 0.0 && hi >= 0.0) ? 0.0 : (std::abs(lo) < std::abs(hi) ? lo : hi));
  return sign(p) * sign(x - q) * smooth_traversal(potential, lo, hi, energy);
}

BouncedArrival classical_reflected_toa(const PiecewiseBarrier& potential,
                                       double q, double p, double x) {
  require_state(q, p, x);
  const double m = potential.mass();
  const double v_start = potential.potential(q);
  const double energy = p * p / (2.0 * m) + v_start;

  // First piece along the direction of motion with V >= H.
  std::optional<double> turn;
  for (const auto& s : potential.segments()) {
    if (s.height < energy)
      continue;
    if (p > 0.0 && s.left >= q && (!turn || s.left < *turn))
      turn = s.left;
    if (p < 0.0 && s.right <= q && (!turn || s.right > *turn))
      turn = s.right;
  }
  if (!turn)
    throw NotApplicable("the mover never turns around: use classical_toa");
  if ((p > 0.0 && x > *turn) || (p < 0.0 && x < *turn))
    throw InvalidInput("detector lies beyond the turning point");

  const double leg1 = traversal_time(potential, std::min(q, *turn),
                                     std::max(q, *turn), p, v_start, sign(p));
  const double leg2 = traversal_time(potential, std::min(x, *turn),
                                     std::max(x, *turn), p, v_start, -sign(p));
  return {*turn, leg1 + leg2};
}

BouncedArrival classical_reflected_toa(const SmoothBarrier& potential, double q,
                                       double p, double x) {
  require_state(q, p, x);
  const double energy = p * p / (2.0 * potential.mass) + potential.potential(q);
  if (!(energy < potential.height) || sign(p) * q >= 0.0)
    throw NotApplicable("the mover never turns around: use classical_toa");
  const double turn = -sign(p) * potential.turning_distance(energy);
  if ((p > 0.0 && x > turn) || (p < 0.0 && x < turn))
    throw InvalidInput("detector lies beyond the turning point");
  const double leg1 = smooth_traversal_to_turning(potential, q, turn, energy);
  const double leg2 = smooth_traversal_to_turning(potential, x, turn, energy);
  return {turn, leg1 + leg2};
}

double separatrix(const SmoothBarrier& barrier, double q,
                  SeparatrixBranch branch) {
  const double gap = std::max(0.0, barrier.height - barrier.potential(q));
  const double pv = sign(q) * std::sqrt(2.0 * barrier.mass * gap);
  return branch == SeparatrixBranch::plus ? pv : -pv;
}

Channel classify_incoming(const SmoothBarrier& barrier, double q, double p) {
  return p > separatrix(barrier, q, SeparatrixBranch::plus) ? Channel::r_plus()
                                                            : Channel::l_plus();
}

Channel classify_outgoing(const SmoothBarrier& barrier, double q, double p) {
  return p > separatrix(barrier, q, SeparatrixBranch::minus)
             ? Channel::r_minus()
             : Channel::l_minus();
}

PhasePortrait phase_portrait(const SmoothBarrier& barrier,
                             std::span<const double> energies,
                             std::size_t samples_per_trajectory,
                             double extent_widths) {
  if (samples_per_trajectory < 3)
    throw InvalidInput("need at least three samples per trajectory");
  if (!(extent_widths > 0.0))
    throw InvalidInput("portrait extent must be positive");
  const double m = barrier.mass;
  const std::size_t n = samples_per_trajectory;

  auto momentum = [&](double energy, double q) {
    return std::sqrt(std::max(0.0, 2.0 * m * (energy - barrier.potential(q))));
  };

  PhasePortrait out;
  for (const double energy : energies) {
    if (!(energy > 0.0) || !std::isfinite(energy))
      throw InvalidInput("portrait energies must be positive");
    if (energy == barrier.height)
      throw InvalidInput("E = V is the separatrix itself, not a trajectory");

    double extent = extent_widths * barrier.width;
    if (energy > barrier.height) {
      for (const double s : {1.0, -1.0}) {
        Trajectory tr{energy, s > 0 ? Channel::r_plus() : Channel::l_plus(),
                      s > 0 ? Channel::r_minus() : Channel::l_minus(), false, {}};
        tr.samples.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
          const double q = -s * extent + s * 2.0 * extent * frac;
          tr.samples.push_back({q, s * momentum(energy, q)});
        }
        out.trajectories.push_back(std::move(tr));
      }
      continue;
    }

    const double turn = barrier.turning_distance(energy);
    extent = std::max(extent, 1.5 * turn);
    const std::size_t n_in = (n + 1) / 2;
    const std::size_t n_out = n - n_in;
    for (const double s : {1.0, -1.0}) {
      // s = +1: incident from the left, turns at -turn, leaves to the left.
      Trajectory tr{energy, s > 0 ? Channel::r_plus() : Channel::l_plus(),
                    s > 0 ? Channel::l_minus() : Channel::r_minus(), true, {}};
      tr.samples.reserve(n);
      const double far = -s * extent;
      const double near = -s * turn;
      for (std::size_t i = 0; i < n_in; ++i) {
        const double frac =
            static_cast<double>(i) / static_cast<double>(n_in - 1);
        const double q = far + (near - far) * frac;
        const double p = (i + 1 == n_in) ? 0.0 : s * momentum(energy, q);
        tr.samples.push_back({q, p});
      }
      for (std::size_t i = 1; i <= n_out; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n_out);
        const double q = near + (far - near) * frac;
        tr.samples.push_back({q, -s * momentum(energy, q)});
      }
      out.trajectories.push_back(std::move(tr));
    }
  }

  double extent = extent_widths * barrier.width;
  for (const auto& tr : out.trajectories)
    for (const auto& pt : tr.samples)
      extent = std::max(extent, std::abs(pt.q));
  out.separatrix_plus.reserve(n);
  out.separatrix_minus.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q =
        -extent + 2.0 * extent * static_cast<double>(i) / static_cast<double>(n - 1);
    out.separatrix_plus.push_back({q, separatrix(barrier, q, SeparatrixBranch::plus)});
    out.separatrix_minus.push_back(
        {q, separatrix(barrier, q, SeparatrixBranch::minus)});
  }
  return out;
}

} // namespace qtoa
