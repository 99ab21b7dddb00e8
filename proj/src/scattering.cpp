#include "qtoa/scattering.hpp"

#include "qtoa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qtoa {

namespace {

constexpr cplx I{0.0, 1.0};

void require_momentum(double p) {
  if (!std::isfinite(p))
    throw InvalidInput("momentum must be finite");
  if (p <= 0.0)
    throw InvalidInput("momentum must be positive, got " + std::to_string(p));
}

// Propagator of (psi, psi') across a constant-potential stretch of length L.
// Entries are entire functions of k^2 = 2m(E - V), so the classically allowed,
// evanescent and k = 0 (linear) cases join continuously.
struct Propagator {
  double u; // psi(L) from psi(0)
  double v; // psi(L) from psi'(0)
  double w; // psi'(L) from psi(0); psi'(L) from psi'(0) is u again
};

Propagator propagate(double k2, double L) {
  if (k2 > 0.0) {
    const double k = std::sqrt(k2);
    return {std::cos(k * L), std::sin(k * L) / k, -k * std::sin(k * L)};
  }
  if (k2 < 0.0) {
    const double kappa = std::sqrt(-k2);
    return {std::cosh(kappa * L), std::sinh(kappa * L) / kappa,
            kappa * std::sinh(kappa * L)};
  }
  return {1.0, L, 0.0};
}

struct State {
  cplx psi;
  cplx dpsi;
};

State advance(const State& s, double k2, double L) {
  const auto g = propagate(k2, L);
  return {g.u * s.psi + g.v * s.dpsi, g.w * s.psi + g.u * s.dpsi};
}

double local_k2(const PiecewiseBarrier& b, double energy, double height) {
  return 2.0 * b.mass() * (energy - height);
}

// (psi, psi') of A e^{ipq} + B e^{-ipq} at q.
State plane_state(cplx A, cplx B, double p, double q) {
  const cplx e = std::polar(1.0, p * q);
  const cplx ei = std::conj(e);
  return {A * e + B * ei, I * p * (A * e - B * ei)};
}

// Exterior coefficients of the unnormalised r(+) / l(+) solutions.
struct Exterior {
  cplx left_A, left_B, right_A, right_B;
};

Exterior plus_exterior(const ScatteringCoefficients& sc, Direction d) {
  if (d == Direction::r)
    return {1.0, sc.R, sc.T, 0.0};
  return {0.0, sc.T, sc.reflection_from_right, 1.0};
}

cplx evaluate_plus(const PiecewiseBarrier& b, double energy, Direction d,
                   double q) {
  const double p = std::sqrt(2.0 * b.mass() * energy);
  if (b.empty())
    return d == Direction::r ? std::polar(1.0, p * q) : std::polar(1.0, -p * q);
  const auto sc = scattering_coefficients(b, p);
  const auto ext = plus_exterior(sc, d);
  if (q <= b.support_left())
    return plane_state(ext.left_A, ext.left_B, p, q).psi;
  if (q >= b.support_right())
    return plane_state(ext.right_A, ext.right_B, p, q).psi;

  State s = plane_state(ext.left_A, ext.left_B, p, b.support_left());
  for (const auto& seg : b.segments()) {
    const double k2 = local_k2(b, energy, seg.height);
    if (q <= seg.right)
      return advance(s, k2, q - seg.left).psi;
    s = advance(s, k2, seg.right - seg.left);
  }
  return s.psi;
}

} // namespace

PiecewiseBarrier::PiecewiseBarrier(std::vector<Segment> segments, double mass)
    : mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw InvalidInput("mass must be positive and finite");
  std::erase_if(segments, [](const Segment& s) { return s.right == s.left; });
  for (const auto& s : segments) {
    if (!std::isfinite(s.left) || !std::isfinite(s.right) ||
        !std::isfinite(s.height))
      throw InvalidInput("segment bounds and heights must be finite");
    if (s.right < s.left)
      throw InvalidInput("segment right edge precedes its left edge");
    if (s.height < 0.0)
      throw InvalidInput("potential heights must be non-negative");
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.left < b.left; });
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i > 0) {
      const double prev = segments_.back().right;
      if (segments[i].left < prev)
        throw InvalidInput("segments overlap");
      if (segments[i].left > prev)
        segments_.push_back({prev, segments[i].left, 0.0});
    }
    segments_.push_back(segments[i]);
  }
}

PiecewiseBarrier PiecewiseBarrier::free(double mass) {
  return PiecewiseBarrier({}, mass);
}

PiecewiseBarrier PiecewiseBarrier::square(double height, double width,
                                          double mass, double offset) {
  if (width < 0.0)
    throw InvalidInput("barrier width must be non-negative");
  if (width == 0.0)
    return free(mass);
  return PiecewiseBarrier({{offset, offset + width, height}}, mass);
}

double PiecewiseBarrier::support_left() const {
  return segments_.empty() ? 0.0 : segments_.front().left;
}

double PiecewiseBarrier::support_right() const {
  return segments_.empty() ? 0.0 : segments_.back().right;
}

double PiecewiseBarrier::max_height() const {
  double v = 0.0;
  for (const auto& s : segments_)
    v = std::max(v, s.height);
  return v;
}

double PiecewiseBarrier::potential(double q) const {
  for (const auto& s : segments_)
    if (q > s.left && q < s.right)
      return s.height;
  return 0.0;
}

bool PiecewiseBarrier::is_single_square() const {
  return segments_.size() == 1;
}

std::string to_string(Channel c) {
  std::string out = c.direction == Direction::r ? "r" : "l";
  out += c.selection == Selection::plus ? "+" : "-";
  return out;
}

std::optional<Channel> parse_channel(std::string_view text) {
  if (text == "r+") return Channel::r_plus();
  if (text == "l+") return Channel::l_plus();
  if (text == "r-") return Channel::r_minus();
  if (text == "l-") return Channel::l_minus();
  return std::nullopt;
}

Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
  Matrix2 c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return c;
}

Matrix2 transfer_matrix(const PiecewiseBarrier& barrier, double p) {
  require_momentum(p);
  Matrix2 out;
  if (barrier.empty())
    return out;

  const double energy = p * p / (2.0 * barrier.mass());
  // Real 2x2 propagation of (psi, psi') through every segment.
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  for (const auto& seg : barrier.segments()) {
    const auto g =
        propagate(local_k2(barrier, energy, seg.height), seg.right - seg.left);
    const double na = g.u * a + g.v * c;
    const double nb = g.u * b + g.v * d;
    const double nc = g.w * a + g.u * c;
    const double nd = g.w * b + g.u * d;
    a = na;
    b = nb;
    c = nc;
    d = nd;
  }

  // S(x) maps (A, B) to (psi, psi') at x; result is S(xr)^-1 * P * S(xl).
  const double xl = barrier.support_left();
  const double xr = barrier.support_right();
  const cplx el = std::polar(1.0, p * xl);
  const cplx er = std::polar(1.0, p * xr);
  Matrix2 left;
  left(0, 0) = el;
  left(0, 1) = std::conj(el);
  left(1, 0) = I * p * el;
  left(1, 1) = -I * p * std::conj(el);
  Matrix2 inner;
  inner(0, 0) = a;
  inner(0, 1) = b;
  inner(1, 0) = c;
  inner(1, 1) = d;
  Matrix2 right_inv;
  right_inv(0, 0) = 0.5 * std::conj(er);
  right_inv(0, 1) = std::conj(er) / (2.0 * I * p);
  right_inv(1, 0) = 0.5 * er;
  right_inv(1, 1) = -er / (2.0 * I * p);
  return right_inv * (inner * left);
}

ScatteringCoefficients scattering_coefficients(const PiecewiseBarrier& barrier,
                                               double p) {
  const Matrix2 m = transfer_matrix(barrier, p);
  const cplx m22 = m(1, 1);
  return {p, 1.0 / m22, -m(1, 0) / m22, m(0, 1) / m22};
}

double flux_normalization(double p, double mass) {
  return std::sqrt(mass / (2.0 * std::numbers::pi * p));
}

cplx eigenstate(const PiecewiseBarrier& barrier, double energy, Channel channel,
                double q) {
  if (!(energy > 0.0) || !std::isfinite(energy))
    throw InvalidInput("eigenstate energy must be positive and finite");
  const double p = std::sqrt(2.0 * barrier.mass() * energy);
  const double norm = flux_normalization(p, barrier.mass());
  if (channel.selection == Selection::plus)
    return norm * evaluate_plus(barrier, energy, channel.direction, q);
  const Direction mirrored =
      channel.direction == Direction::r ? Direction::l : Direction::r;
  return norm * std::conj(evaluate_plus(barrier, energy, mirrored, q));
}

double wavefunction_continuity_check(const PiecewiseBarrier& barrier,
                                     double energy, Channel channel) {
  if (!(energy > 0.0))
    throw InvalidInput("eigenstate energy must be positive");
  if (barrier.empty())
    return 0.0;
  const double p = std::sqrt(2.0 * barrier.mass() * energy);
  const double norm = flux_normalization(p, barrier.mass());
  const auto sc = scattering_coefficients(barrier, p);
  // Conjugation preserves the mismatch, so the (-) states reuse the mirrored
  // (+) solution.
  const Direction d =
      channel.selection == Selection::plus
          ? channel.direction
          : (channel.direction == Direction::r ? Direction::l : Direction::r);
  const auto ext = plus_exterior(sc, d);

  double worst = 0.0;
  auto mismatch = [&](const State& a, const State& b) {
    worst = std::max(worst, norm * (std::abs(a.psi - b.psi) +
                                    std::abs(a.dpsi - b.dpsi)));
  };

  // Interior pieces are matched to each other by construction; the check that
  // carries information is the last edge, where the propagated solution must
  // reproduce the exterior form fixed by T and R.
  State s = plane_state(ext.left_A, ext.left_B, p, barrier.support_left());
  for (const auto& seg : barrier.segments())
    s = advance(s, local_k2(barrier, energy, seg.height), seg.right - seg.left);
  mismatch(s, plane_state(ext.right_A, ext.right_B, p, barrier.support_right()));
  return worst;
}

} // namespace qtoa
