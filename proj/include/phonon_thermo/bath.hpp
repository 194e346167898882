#pragma once

/**
 * @brief Bath-derived scalars for a driven two-level probe in an Ohmic phonon bath.
 *
 * Units: hbar = k_B = 1, all frequencies, rates and temperatures in units of the
 * bare transition frequency omega0 (canonically 1).
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phonon_thermo/errors.hpp"

namespace phonon_thermo {

enum class DriveMode { Bare, Renormalized };

inline const char* to_string(DriveMode mode) {
  return mode == DriveMode::Bare ? "bare" : "renormalized";
}

/// Bare two-level parameters. Immutable once constructed.
class ProbeConfig {
 public:
  ProbeConfig(double omega0, double Omega, DriveMode drive_mode = DriveMode::Bare)
      : omega0_(omega0), Omega_(Omega), drive_mode_(drive_mode) {
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
      throw DomainError("omega0 must be positive, got " + std::to_string(omega0));
    // Omega = 0 pins P_e to zero and makes the QFI 0/0.
    if (!(Omega > 0.0) || !std::isfinite(Omega))
      throw DomainError("Omega must be positive, got " + std::to_string(Omega));
  }

  double omega0() const noexcept { return omega0_; }
  double Omega() const noexcept { return Omega_; }
  DriveMode drive_mode() const noexcept { return drive_mode_; }

  ProbeConfig with_Omega(double Omega) const { return {omega0_, Omega, drive_mode_}; }

 private:
  double omega0_;
  double Omega_;
  DriveMode drive_mode_;
};

/// Ohmic bath J(w) = eta * w^s * exp(-w / omega_c). Only s = 1 is supported.
class BathConfig {
 public:
  BathConfig(double eta, double omega_c, double s = 1.0) : eta_(eta), omega_c_(omega_c), s_(s) {
    if (!(eta >= 0.0) || !std::isfinite(eta))
      throw DomainError("eta must be non-negative, got " + std::to_string(eta));
    if (!(omega_c > 0.0) || !std::isfinite(omega_c))
      throw DomainError("omega_c must be positive, got " + std::to_string(omega_c));
    if (s != 1.0)
      throw DomainError("only Ohmic baths (s = 1) are supported, got s = " + std::to_string(s));
  }

  double eta() const noexcept { return eta_; }
  double omega_c() const noexcept { return omega_c_; }
  double s() const noexcept { return s_; }

  BathConfig with_eta(double eta) const { return {eta, omega_c_, s_}; }
  BathConfig with_omega_c(double omega_c) const { return {eta_, omega_c, s_}; }

 private:
  double eta_;
  double omega_c_;
  double s_;
};

/// Phonon-dressed quantities at one (eta, T) point, with their temperature derivatives.
struct RenormalizedQuantities {
  double f = 1.0;          ///< dressing factor, in (0, 1]
  double omega_eff = 0.0;  ///< omega0 * f
  double gamma = 0.0;      ///< 2 pi J(omega0) (n + 1) f
  double n = 0.0;          ///< Bose occupation at omega0
  double dn_dT = 0.0;
  double df_dT = 0.0;
  double domega_eff_dT = 0.0;
  double dgamma_dT = 0.0;
};

/// Upper integration limit for bath integrals, in units of omega_c.
inline constexpr double kQuadratureCutoffMultiple = 50.0;

/// J(omega) = eta * omega * exp(-omega / omega_c).
inline double spectral_density(double omega, const BathConfig& bath) {
  if (!(omega >= 0.0)) throw DomainError("spectral_density: omega must be >= 0");
  return bath.eta() * omega * std::exp(-omega / bath.omega_c());
}

namespace detail {

inline void require_positive_temperature(double T, const char* op) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw DomainError(std::string(op) + ": temperature must be positive, got " + std::to_string(T));
}

inline void require_positive_frequency(double omega, const char* op) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw DomainError(std::string(op) + ": frequency must be positive, got " + std::to_string(omega));
}

/// omega * coth(omega / 2T) = omega (2n + 1); tends to 2T as omega -> 0.
inline double omega_coth(double omega, double T) {
  const double x = omega / (2.0 * T);
  if (x < 1e-8) return 2.0 * T * (1.0 + x * x / 3.0);
  return omega / std::tanh(x);
}

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

inline constexpr unsigned kMaxQuadratureDepth = 10;

/// Adaptive Gauss-Kronrod over [a, b] split into `panels` equal pieces.
template <class F>
QuadratureResult integrate_panels(F&& f, double a, double b, int panels, double tol) {
  using Integrator = boost::math::quadrature::gauss_kronrod<double, 61>;
  QuadratureResult total;
  const double width = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == panels) ? b : lo + width;
    double err = 0.0;
    double l1 = 0.0;
    total.value += Integrator::integrate(f, lo, hi, kMaxQuadratureDepth, tol, &err, &l1);
    total.error += err;
    total.l1 += l1;
  }
  return total;
}

inline std::string format_tolerance(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

inline void check_converged(const QuadratureResult& r, double tol, const char* op) {
  const double scale = std::max(r.l1, std::numeric_limits<double>::min());
  const double achieved = r.error / scale;
  if (!(achieved <= tol))
    throw NumericError(std::string(op) + ": quadrature did not reach tolerance (achieved " +
                           format_tolerance(achieved) + ")",
                       achieved);
}

}  // namespace detail

/// Bose-Einstein occupation 1 / (exp(omega / T) - 1).
inline double bose_occupation(double omega, double T) {
  detail::require_positive_frequency(omega, "bose_occupation");
  detail::require_positive_temperature(T, "bose_occupation");
  return 1.0 / std::expm1(omega / T);
}

/**
 * Temperature derivative of the Bose occupation,
 * omega e^{omega/T} / (T^2 (e^{omega/T} - 1)^2), evaluated in the factored form
 * (omega / T^2) e^{-x} / (1 - e^{-x})^2 with x = omega / T so large x underflows
 * to zero instead of overflowing.
 */
inline double bose_occupation_dT(double omega, double T) {
  detail::require_positive_frequency(omega, "bose_occupation_dT");
  detail::require_positive_temperature(T, "bose_occupation_dT");
  const double x = omega / T;
  const double one_minus = -std::expm1(-x);
  return (omega / (T * T)) * std::exp(-x) / (one_minus * one_minus);
}

/// Closed-form dressing factor exp[-(eta / omega_c)(2 n(omega0, T) + 1)].
inline double dressing_factor(const BathConfig& bath, double omega0, double T) {
  const double n = bose_occupation(omega0, T);
  return std::exp(-(bath.eta() / bath.omega_c()) * (2.0 * n + 1.0));
}

/**
 * Dressing factor from its spectral integral,
 * exp[-1/2 \int_{omega_min}^{50 omega_c} J(w)/w^2 coth(w / 2T) dw].
 *
 * The integrand behaves like 2 T eta / w^2 near zero for an Ohmic bath, so the
 * infrared cutoff omega_min is mandatory and the result depends on it. This is a
 * diagnostic; all pipeline computations use dressing_factor().
 */
inline double dressing_factor_integral(const BathConfig& bath, double T, double omega_min,
                                       double quad_tol) {
  detail::require_positive_temperature(T, "dressing_factor_integral");
  if (!(omega_min > 0.0) || !(omega_min < bath.omega_c()))
    throw DomainError("dressing_factor_integral: need 0 < omega_min < omega_c");
  if (!(quad_tol > 0.0)) throw DomainError("dressing_factor_integral: quad_tol must be positive");
  if (bath.eta() == 0.0) return 1.0;

  const double eta = bath.eta();
  const double wc = bath.omega_c();
  auto integrand = [&](double w) {
    return eta * std::exp(-w / wc) * detail::omega_coth(w, T) / (w * w);
  };
  const double upper = kQuadratureCutoffMultiple * wc;
  // Geometric panels resolve the 1/w^2 growth towards omega_min.
  detail::QuadratureResult total;
  double lo = omega_min;
  while (lo < upper) {
    const double hi = std::min(upper, 2.0 * lo);
    const auto piece = detail::integrate_panels(integrand, lo, hi, 1, quad_tol);
    total.value += piece.value;
    total.error += piece.error;
    total.l1 += piece.l1;
    lo = hi;
  }
  detail::check_converged(total, quad_tol, "dressing_factor_integral");
  return std::exp(-0.5 * total.value);
}

/// All dressed quantities and their analytic T-derivatives at (eta, T).
inline RenormalizedQuantities renormalized_at(const ProbeConfig& probe, const BathConfig& bath,
                                              double T) {
  const double w0 = probe.omega0();
  const double ratio = bath.eta() / bath.omega_c();
  const double J0 = spectral_density(w0, bath);

  RenormalizedQuantities q;
  q.n = bose_occupation(w0, T);
  q.dn_dT = bose_occupation_dT(w0, T);
  q.f = std::exp(-ratio * (2.0 * q.n + 1.0));
  q.omega_eff = w0 * q.f;
  q.gamma = 2.0 * std::numbers::pi * J0 * (q.n + 1.0) * q.f;

  q.df_dT = q.f * (-ratio) * 2.0 * q.dn_dT;
  q.domega_eff_dT = w0 * q.df_dT;
  q.dgamma_dT = 2.0 * std::numbers::pi * J0 * (q.dn_dT * q.f + (q.n + 1.0) * q.df_dT);
  return q;
}

/// Drive amplitude entering the Bloch equations: Omega (Bare) or Omega * f (Renormalized).
inline double effective_drive(const ProbeConfig& probe, double f) {
  return probe.drive_mode() == DriveMode::Bare ? probe.Omega() : probe.Omega() * f;
}

/**
 * Bath correlation function
 * C(t) = \int_0^{50 omega_c} J(w) [n(w,T) e^{iwt} + (n(w,T) + 1) e^{-iwt}] dw
 *      = \int J(w) [(2n + 1) cos(wt) - i sin(wt)] dw.
 * Real and imaginary parts are integrated separately; the range is split into
 * panels of half an oscillation period so large |t| stays resolvable.
 */
inline std::complex<double> bath_correlation(double t, const BathConfig& bath, double T,
                                             double quad_tol) {
  detail::require_positive_temperature(T, "bath_correlation");
  if (!(quad_tol > 0.0)) throw DomainError("bath_correlation: quad_tol must be positive");
  if (!std::isfinite(t)) throw DomainError("bath_correlation: t must be finite");

  const double eta = bath.eta();
  const double wc = bath.omega_c();
  const double upper = kQuadratureCutoffMultiple * wc;
  const int panels =
      std::clamp(static_cast<int>(std::ceil(upper * std::abs(t) / std::numbers::pi)), 1, 100000);

  auto real_part = [&](double w) {
    return eta * std::exp(-w / wc) * detail::omega_coth(w, T) * std::cos(w * t);
  };
  auto imag_part = [&](double w) { return -eta * w * std::exp(-w / wc) * std::sin(w * t); };

  const auto re = detail::integrate_panels(real_part, 0.0, upper, panels, quad_tol);
  detail::check_converged(re, quad_tol, "bath_correlation (real part)");
  if (t == 0.0) return {re.value, 0.0};
  const auto im = detail::integrate_panels(imag_part, 0.0, upper, panels, quad_tol);
  detail::check_converged(im, quad_tol, "bath_correlation (imaginary part)");
  return {re.value, im.value};
}

}  // namespace phonon_thermo
