#include "qtoa/wavepacket.hpp"

#include "qtoa/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qtoa {

double Packet::negative_tail_weight() const {
  return momentum_mass_outside(0.0, std::numeric_limits<double>::infinity());
}

GaussianPacket::GaussianPacket(double q0, double p0, double delta, double mass)
    : q0_(q0), p0_(p0), delta_(delta), mass_(mass) {
  if (!std::isfinite(q0) || !std::isfinite(p0))
    throw InvalidInput("packet centre must be finite");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw InvalidInput("packet width delta must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw InvalidInput("mass must be positive");
}

cplx GaussianPacket::position_amplitude(double q) const {
  const double pi = std::numbers::pi;
  const double pref = std::pow(1.0 / (2.0 * pi * delta_ * delta_), 0.25);
  const cplx z{(q - q0_) / (2.0 * delta_), -delta_ * p0_};
  // Both exponentials combined before exponentiating: e^{-delta^2 p0^2}
  // alone underflows for large p0*delta while the product stays O(1).
  return pref * std::exp(-delta_ * delta_ * p0_ * p0_ - z * z);
}

cplx GaussianPacket::momentum_amplitude(double p) const {
  const double pi = std::numbers::pi;
  const double pref = std::pow(2.0 * delta_ * delta_ / pi, 0.25);
  const double dp = p - p0_;
  return pref * std::exp(-delta_ * delta_ * dp * dp) * std::polar(1.0, -p * q0_);
}

double GaussianPacket::momentum_mass_outside(double lo, double hi) const {
  // |psi~|^2 is normal with standard deviation 1/(2 delta).
  const double s = std::numbers::sqrt2 * delta_;
  double out = 0.0;
  if (std::isfinite(hi))
    out += 0.5 * std::erfc(s * (hi - p0_));
  if (std::isfinite(lo))
    out += 0.5 * std::erfc(s * (p0_ - lo));
  return out;
}

PreparationQuality preparation_quality(const GaussianPacket& packet) {
  PreparationQuality out;
  out.p0_delta = packet.p0() * packet.delta();
  if (packet.q0() != 0.0)
    out.delta_over_q0 = packet.delta() / std::abs(packet.q0());
  out.negative_tail_weight = packet.negative_tail_weight();

  if (out.p0_delta < kMinP0Delta)
    out.issues.push_back("p0*delta = " + std::to_string(out.p0_delta) +
                         " is not >> 1");
  if (!out.delta_over_q0)
    out.issues.push_back("q0 = 0: packet is not prepared away from the origin");
  else if (*out.delta_over_q0 > kMaxDeltaOverQ0)
    out.issues.push_back("delta/|q0| = " + std::to_string(*out.delta_over_q0) +
                         " is not << 1");
  out.acceptable = out.issues.empty();
  return out;
}

} // namespace qtoa
