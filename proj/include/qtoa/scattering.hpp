#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtoa {

using cplx = std::complex<double>;

// Natural units throughout: hbar = 1, mass configurable.

struct Segment {
  double left;
  double right;
  double height;
};

// Non-negative piecewise-constant potential with finite support.
//
// Segments are sorted on construction and gaps between them are filled with
// zero-height segments, so the support is covered contiguously. An empty
// segment list is the free particle.
class PiecewiseBarrier {
public:
  PiecewiseBarrier(std::vector<Segment> segments, double mass);

  static PiecewiseBarrier free(double mass);
  // V on (offset, offset + width); width == 0 yields the free barrier.
  static PiecewiseBarrier square(double height, double width, double mass,
                                 double offset = 0.0);
  // Midpoint staircase approximation of an arbitrary non-negative profile.
  template <class Profile>
  static PiecewiseBarrier staircase(Profile&& profile, double left,
                                    double right, int steps, double mass);

  std::span<const Segment> segments() const { return segments_; }
  double mass() const { return mass_; }
  bool empty() const { return segments_.empty(); }
  // Only meaningful when !empty().
  double support_left() const;
  double support_right() const;
  double max_height() const;
  double potential(double q) const;
  bool is_single_square() const;

private:
  std::vector<Segment> segments_;
  double mass_;
};

template <class Profile>
PiecewiseBarrier PiecewiseBarrier::staircase(Profile&& profile, double left,
                                             double right, int steps,
                                             double mass) {
  std::vector<Segment> segs;
  segs.reserve(static_cast<std::size_t>(steps));
  const double h = (right - left) / steps;
  for (int i = 0; i < steps; ++i) {
    // Both edges from the same expression so neighbours share them exactly.
    const double a = left + i * h;
    const double b = (i + 1 == steps) ? right : left + (i + 1) * h;
    segs.push_back({a, b, profile(0.5 * (a + b))});
  }
  return PiecewiseBarrier(std::move(segs), mass);
}

enum class Direction { r, l };
enum class Selection { plus, minus };

// One of r+, l+, r-, l-. (+) labels incoming asymptotics (preparation),
// (-) outgoing asymptotics (post-selection at a detector).
struct Channel {
  Direction direction;
  Selection selection;

  static constexpr Channel r_plus() { return {Direction::r, Selection::plus}; }
  static constexpr Channel l_plus() { return {Direction::l, Selection::plus}; }
  static constexpr Channel r_minus() { return {Direction::r, Selection::minus}; }
  static constexpr Channel l_minus() { return {Direction::l, Selection::minus}; }

  friend bool operator==(const Channel&, const Channel&) = default;
};

std::string to_string(Channel c);
std::optional<Channel> parse_channel(std::string_view text);

// T and R for a unit-amplitude wave incident from the left; plane waves are
// referenced to the origin, i.e. e^{ipq} + R e^{-ipq} on the left and
// T e^{ipq} on the right. reflection_from_right is the amplitude of e^{ipq}
// for a wave e^{-ipq} incident from the right. T is the same both ways.
struct ScatteringCoefficients {
  double p;
  cplx T;
  cplx R;
  cplx reflection_from_right;
};

struct Matrix2 {
  std::array<cplx, 4> m{cplx{1.0}, cplx{0.0}, cplx{0.0}, cplx{1.0}};

  cplx& operator()(int i, int j) { return m[static_cast<std::size_t>(2 * i + j)]; }
  cplx operator()(int i, int j) const { return m[static_cast<std::size_t>(2 * i + j)]; }
  cplx det() const { return m[0] * m[3] - m[1] * m[2]; }

  friend Matrix2 operator*(const Matrix2& a, const Matrix2& b);
};

// Maps plane-wave coefficients (A, B) of A e^{ipq} + B e^{-ipq} left of the
// support to those right of it. Unit determinant.
Matrix2 transfer_matrix(const PiecewiseBarrier& barrier, double p);

ScatteringCoefficients scattering_coefficients(const PiecewiseBarrier& barrier,
                                               double p);

// sqrt(m / 2 pi p): one incoming (or outgoing) particle per unit time.
double flux_normalization(double p, double mass);

// <q|E s(+-)>, flux normalised. The (-) states are the complex conjugates of
// the (+) states with opposite direction: <q|E r(-)> = conj <q|E l(+)>.
cplx eigenstate(const PiecewiseBarrier& barrier, double energy, Channel channel,
                double q);

// Largest |dpsi| + |dpsi'| across segment edges, the last edge comparing the
// propagated interior solution with the exterior plane-wave form.
double wavefunction_continuity_check(const PiecewiseBarrier& barrier,
                                     double energy, Channel channel);

} // namespace qtoa
