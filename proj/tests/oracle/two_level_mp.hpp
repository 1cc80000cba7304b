#pragma once

// Closed-form two-level dynamics at 50 significant digits. Test-only
// reference: independent of the spectral/increment code paths under test.
//
// H = [[0, omega], [omega, delta]], w = sqrt(delta^2/4 + omega^2):
//   K(t) = e^{-i delta t/2} [cos(w t) I - i sin(w t)/w (H - delta/2 I)]

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace zeno::oracle {

using Real = boost::multiprecision::cpp_bin_float_50;

struct MpComplex {
  Real re{0};
  Real im{0};

  friend MpComplex operator+(const MpComplex& a, const MpComplex& b) { return {a.re + b.re, a.im + b.im}; }
  friend MpComplex operator-(const MpComplex& a, const MpComplex& b) { return {a.re - b.re, a.im - b.im}; }
  friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  Real norm() const { return re * re + im * im; }
  Real arg() const { return atan2(im, re); }
};

inline MpComplex expi(const Real& x) { return {cos(x), sin(x)}; }

struct TwoLevelCycle {
  MpComplex k_ee;      // <e|K(tau/2)|e>
  MpComplex k_ge;      // <g|K(tau/2)|e> = <e|K(tau/2)|g>
  MpComplex delta_k2;  // K_eg K_ge
  MpComplex lambda_plus;
  MpComplex lambda_minus;

  Real deficit_plus() const { return Real(1) - lambda_plus.norm(); }
  Real deficit_minus() const { return Real(1) - lambda_minus.norm(); }
  /// Equal-weight ancilla, one cycle.
  Real deficit_equal_weight() const { return (deficit_plus() + deficit_minus()) / 2; }
  Real phi() const { return (lambda_plus.arg() - lambda_minus.arg()) / 2; }
};

inline TwoLevelCycle two_level_cycle(double omega_d, double delta_d, double tau_d, double nu_d) {
  const Real omega(omega_d), delta(delta_d), t = Real(tau_d) / 2, nu(nu_d);
  const Real w = sqrt(delta * delta / 4 + omega * omega);
  const MpComplex global = expi(-delta * t / 2);
  const Real s = w == 0 ? t : sin(w * t) / w;  // sin(wt)/w -> t as w -> 0
  TwoLevelCycle c;
  c.k_ee = global * MpComplex{cos(w * t), delta / 2 * s};
  c.k_ge = global * MpComplex{Real(0), -omega * s};
  c.delta_k2 = c.k_ge * c.k_ge;
  const MpComplex k2 = c.k_ee * c.k_ee;
  c.lambda_plus = k2 + expi(nu) * c.delta_k2;
  c.lambda_minus = k2 + expi(-nu) * c.delta_k2;
  return c;
}

}  // namespace zeno::oracle
