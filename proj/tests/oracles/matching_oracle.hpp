#pragma once

// Scattering off one square barrier V on (0, a) by solving the four
// continuity conditions directly, with no transfer matrices involved.
//
//   q < 0:      e^{ipq} + R e^{-ipq}
//   0 < q < a:  C e^{ikq} + D e^{-ikq},   k = sqrt(p^2 - 2mV) (complex if E < V)
//   q > a:      T e^{ipq}
//
// Unknowns (R, C, D, T); psi and psi' continuous at 0 and a. Solved by
// Gaussian elimination with partial pivoting.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace oracle {

using cplx = std::complex<double>;

struct MatchedAmplitudes {
  cplx R;
  cplx T;
};

inline std::array<cplx, 4> solve4(std::array<std::array<cplx, 4>, 4> a,
                                  std::array<cplx, 4> b) {
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
        pivot = r;
    if (std::abs(a[pivot][col]) == 0.0)
      throw std::runtime_error("singular matching system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < 4; ++r) {
      const cplx f = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c)
        a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<cplx, 4> x{};
  for (int r = 3; r >= 0; --r) {
    cplx s = b[r];
    for (int c = r + 1; c < 4; ++c)
      s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

inline MatchedAmplitudes square_barrier_matching(double V, double a, double p,
                                                 double m) {
  const cplx I{0.0, 1.0};
  const cplx k = std::sqrt(cplx{p * p - 2.0 * m * V, 0.0});
  const cplx eka = std::exp(I * k * a);
  const cplx emka = std::exp(-I * k * a);
  const cplx epa = std::exp(I * p * a);
  // Columns: R, C, D, T.
  std::array<std::array<cplx, 4>, 4> A{{
      {cplx{1.0}, -cplx{1.0}, -cplx{1.0}, cplx{0.0}},       // psi(0)
      {-I * p, -I * k, I * k, cplx{0.0}},                    // psi'(0)
      {cplx{0.0}, eka, emka, -epa},                          // psi(a)
      {cplx{0.0}, I * k * eka, -I * k * emka, -I * p * epa}, // psi'(a)
  }};
  std::array<cplx, 4> b{-cplx{1.0}, -I * p, cplx{0.0}, cplx{0.0}};
  const auto x = solve4(A, b);
  return {x[0], x[3]};
}

// |R|^2 for E > V with interior momentum p' = sqrt(p^2 - 2mV):
// (p^2 - p'^2)^2 sin^2(p'a) / (4 p^2 p'^2 + (p^2 - p'^2)^2 sin^2(p'a)).
inline double reflection_probability_above(double V, double a, double p,
                                           double m) {
  const double pp2 = p * p - 2.0 * m * V;
  if (!(pp2 > 0.0))
    throw std::domain_error("closed form needs E > V");
  const double pp = std::sqrt(pp2);
  const double s = std::sin(pp * a);
  const double num = (p * p - pp2) * (p * p - pp2) * s * s;
  return num / (4.0 * p * p * pp2 + num);
}

} // namespace oracle
