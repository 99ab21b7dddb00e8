#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qtoa {

using cplx = std::complex<double>;

// What the arrival engine needs from an initial state: its momentum-space
// amplitude and enough shape information to size integration windows. The
// approximate channel amplitudes only require the state to sit left of the
// barrier with negligible negative-momentum weight, not a Gaussian shape.
class Packet {
public:
  virtual ~Packet() = default;

  virtual cplx momentum_amplitude(double p) const = 0;
  virtual double mass() const = 0;
  virtual double mean_position() const = 0;
  virtual double mean_momentum() const = 0;
  // Unit in which momentum windows are measured (1/delta for a Gaussian).
  virtual double momentum_scale() const = 0;
  // Standard deviations of |<q|psi>|^2 at t = 0 and of |psi~(p)|^2.
  virtual double position_spread() const = 0;
  virtual double momentum_spread() const = 0;
  // Probability carried by momenta outside [lo, hi].
  virtual double momentum_mass_outside(double lo, double hi) const = 0;
  double negative_tail_weight() const;
};

// <q|psi> = (1/2 pi delta^2)^{1/4} e^{-delta^2 p0^2} e^{-((q-q0)/2delta - i delta p0)^2}
// psi~(p) = (2 delta^2 / pi)^{1/4} e^{-delta^2 (p-p0)^2 - i p q0}
class GaussianPacket final : public Packet {
public:
  GaussianPacket(double q0, double p0, double delta, double mass);

  double q0() const { return q0_; }
  double p0() const { return p0_; }
  double delta() const { return delta_; }

  cplx position_amplitude(double q) const;
  cplx momentum_amplitude(double p) const override;

  double mass() const override { return mass_; }
  double mean_position() const override { return q0_; }
  double mean_momentum() const override { return p0_; }
  double momentum_scale() const override { return 1.0 / delta_; }
  double position_spread() const override { return delta_; }
  double momentum_spread() const override { return 0.5 / delta_; }
  double momentum_mass_outside(double lo, double hi) const override;

  GaussianPacket translated(double dq) const {
    return GaussianPacket(q0_ + dq, p0_, delta_, mass_);
  }

private:
  double q0_;
  double p0_;
  double delta_;
  double mass_;
};

struct PreparationQuality {
  double p0_delta;
  std::optional<double> delta_over_q0; // undefined for q0 == 0
  double negative_tail_weight;
  bool acceptable;
  std::vector<std::string> issues;
};

// Thresholds for treating p0*delta >> 1 and delta << |q0| as satisfied.
inline constexpr double kMinP0Delta = 5.0;
inline constexpr double kMaxDeltaOverQ0 = 0.25;

PreparationQuality preparation_quality(const GaussianPacket& packet);

} // namespace qtoa
