#pragma once

/**
 * @brief Polaron-frame optical Bloch equations: closed-form steady state, its
 * temperature derivative, and a numerical integration oracle.
 *
 * With rho_eg = x + i y the Bloch equations are the real linear system
 *   d(rho_ee)/dt = Omega y - gamma rho_ee
 *   dx/dt        = omega_eff y - (gamma/2) x
 *   dy/dt        = -omega_eff x - (Omega/2)(2 rho_ee - 1) - (gamma/2) y
 * whose unique fixed point (gamma > 0) is
 *   rho_ee = Omega^2 / (2 Omega^2 + gamma^2 + 4 omega_eff^2),
 *   y = gamma rho_ee / Omega,  x = 2 omega_eff rho_ee / Omega.
 * Variant::Rederived uses this fixed point; Variant::Paper keeps a coefficient of 1
 * on omega_eff^2 in the denominator. The two agree when omega_eff = 0.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "phonon_thermo/bath.hpp"
#include "phonon_thermo/errors.hpp"

namespace phonon_thermo {

enum class Variant { Paper, Rederived };

inline const char* to_string(Variant v) { return v == Variant::Paper ? "paper" : "rederived"; }

/// Coefficient multiplying omega_eff^2 in the steady-state denominator.
inline constexpr double omega_coefficient(Variant v) { return v == Variant::Paper ? 1.0 : 4.0; }

/// Reduced density-matrix coordinates; rho_gg = 1 - rho_ee.
struct BlochState {
  double rho_ee = 0.0;
  std::complex<double> rho_eg{0.0, 0.0};
};

enum class SolutionSource { ClosedFormPaper, ClosedFormRederived, OdeFixedPoint };

struct SteadySolution {
  double P_e = 0.0;
  std::optional<double> dPe_dT;  ///< absent for the ODE oracle
  SolutionSource source = SolutionSource::ClosedFormPaper;
  double residual = 0.0;  ///< max |bloch_rhs| at the reported state
};

namespace detail {

inline std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", r);
  return buf;
}

/// d(rho_ee)/dt as complex arithmetic; its imaginary part is identically zero.
inline std::complex<double> population_rate(const BlochState& s, double gamma, double Omega) {
  using namespace std::complex_literals;
  const std::complex<double> rho_ge = std::conj(s.rho_eg);
  return -1i * (Omega / 2.0) * (s.rho_eg - rho_ge) - gamma * s.rho_ee;
}

}  // namespace detail

/// Right-hand side of the Bloch equations, term for term.
inline BlochState bloch_rhs(const BlochState& s, double omega_eff, double gamma, double Omega_drive) {
  using namespace std::complex_literals;
  const double rho_gg = 1.0 - s.rho_ee;
  BlochState d;
  d.rho_ee = detail::population_rate(s, gamma, Omega_drive).real();
  d.rho_eg = -1i * omega_eff * s.rho_eg - 1i * (Omega_drive / 2.0) * (s.rho_ee - rho_gg) -
             (gamma / 2.0) * s.rho_eg;
  return d;
}

inline double max_norm(const BlochState& d) {
  return std::max({std::abs(d.rho_ee), std::abs(d.rho_eg.real()), std::abs(d.rho_eg.imag())});
}

/**
 * Integrates the Bloch equations with an adaptive Dormand-Prince 4(5) stepper
 * (abs/rel tolerance 1e-10) until max |rhs| < rhs_tol. Throws NonConvergenceError
 * carrying the last residual if t_max is reached first.
 */
inline SteadySolution integrate_to_steady_state(const BlochState& initial, double omega_eff,
                                                double gamma, double Omega_drive,
                                                double rhs_tol = 1e-12, double t_max = 1e7) {
  namespace odeint = boost::numeric::odeint;
  if (!(gamma > 0.0)) throw DomainError("integrate_to_steady_state: gamma must be positive");
  if (!(rhs_tol > 0.0)) throw DomainError("integrate_to_steady_state: rhs_tol must be positive");
  if (!(omega_eff >= 0.0)) throw DomainError("integrate_to_steady_state: omega_eff must be >= 0");

  using State = std::array<double, 3>;  // rho_ee, Re rho_eg, Im rho_eg
  auto to_bloch = [](const State& x) { return BlochState{x[0], {x[1], x[2]}}; };
  auto system = [&](const State& x, State& dxdt, double /*t*/) {
    const BlochState d = bloch_rhs(to_bloch(x), omega_eff, gamma, Omega_drive);
    dxdt = {d.rho_ee, d.rho_eg.real(), d.rho_eg.imag()};
  };

  auto stepper = odeint::make_controlled(1e-10, 1e-10, odeint::runge_kutta_dopri5<State>());
  State x{initial.rho_ee, initial.rho_eg.real(), initial.rho_eg.imag()};
  double t = 0.0;
  // Keep steps inside the explicit stability region so deviations keep decaying.
  const double dt_max = 1.0 / std::max({omega_eff, gamma, std::abs(Omega_drive)});
  double dt = std::min(1e-2, dt_max);
  double residual = max_norm(bloch_rhs(initial, omega_eff, gamma, Omega_drive));
  while (residual >= rhs_tol) {
    if (t >= t_max)
      throw NonConvergenceError("integrate_to_steady_state: t_max reached with residual " +
                                    detail::format_residual(residual),
                                residual);
    dt = std::min({dt, dt_max, t_max - t});
    if (stepper.try_step(system, x, t, dt) == odeint::success)
      residual = max_norm(bloch_rhs(to_bloch(x), omega_eff, gamma, Omega_drive));
  }
  return {x[0], std::nullopt, SolutionSource::OdeFixedPoint, residual};
}

/// Steady-state excited population for the given variant; in (0, 1/2].
inline double steady_population_closed(double omega_eff, double gamma, double Omega_drive,
                                       Variant variant) {
  if (!(omega_eff >= 0.0) || !(gamma >= 0.0))
    throw DomainError("steady_population_closed: omega_eff and gamma must be >= 0");
  if (!(Omega_drive > 0.0)) throw DomainError("steady_population_closed: drive must be positive");
  const double drive2 = Omega_drive * Omega_drive;
  return drive2 /
         (2.0 * drive2 + gamma * gamma + omega_coefficient(variant) * omega_eff * omega_eff);
}

/// 1/2 - P_e, computed without cancellation so it keeps full relative precision as P_e -> 1/2.
inline double steady_deficit_closed(double omega_eff, double gamma, double Omega_drive,
                                    Variant variant) {
  const double drive2 = Omega_drive * Omega_drive;
  const double loss = gamma * gamma + omega_coefficient(variant) * omega_eff * omega_eff;
  return loss / (2.0 * (2.0 * drive2 + loss));
}

/// Bloch state consistent with a steady population `P_e` (exact fixed point for Rederived).
inline BlochState reconstruct_state(double P_e, double omega_eff, double gamma, double Omega_drive) {
  return {P_e, {2.0 * omega_eff * P_e / Omega_drive, gamma * P_e / Omega_drive}};
}

/**
 * Analytic dP_e/dT via the chain through renormalized_at. In Bare drive mode this is
 * -(Omega^2 / D^2)(2 gamma dgamma + 2 c omega_eff domega_eff). In Renormalized mode the
 * drive Omega f also depends on T and the quotient rule adds 2 Omega_eff dOmega_eff (D - 2 Omega_eff^2).
 */
inline double steady_population_dT_analytic(const ProbeConfig& probe, const BathConfig& bath,
                                            double T, Variant variant) {
  const RenormalizedQuantities q = renormalized_at(probe, bath, T);
  const double c = omega_coefficient(variant);
  const double drive = effective_drive(probe, q.f);
  const double drive2 = drive * drive;
  const double loss = q.gamma * q.gamma + c * q.omega_eff * q.omega_eff;
  const double dloss = 2.0 * q.gamma * q.dgamma_dT + 2.0 * c * q.omega_eff * q.domega_eff_dT;
  const double D = 2.0 * drive2 + loss;

  if (probe.drive_mode() == DriveMode::Bare) return -(drive2 / (D * D)) * dloss;
  const double ddrive = probe.Omega() * q.df_dT;
  return (2.0 * drive * ddrive * loss - drive2 * dloss) / (D * D);
}

/// Closed-form steady state at (probe, bath, T), with analytic derivative and fixed-point residual.
inline SteadySolution steady_state_at(const ProbeConfig& probe, const BathConfig& bath, double T,
                                      Variant variant) {
  const RenormalizedQuantities q = renormalized_at(probe, bath, T);
  const double drive = effective_drive(probe, q.f);
  SteadySolution s;
  s.P_e = steady_population_closed(q.omega_eff, q.gamma, drive, variant);
  s.dPe_dT = steady_population_dT_analytic(probe, bath, T, variant);
  s.source = variant == Variant::Paper ? SolutionSource::ClosedFormPaper
                                       : SolutionSource::ClosedFormRederived;
  s.residual = max_norm(
      bloch_rhs(reconstruct_state(s.P_e, q.omega_eff, q.gamma, drive), q.omega_eff, q.gamma, drive));
  return s;
}

namespace detail {

inline double deficit_at(const ProbeConfig& probe, const BathConfig& bath, double T, Variant v) {
  const RenormalizedQuantities q = renormalized_at(probe, bath, T);
  return steady_deficit_closed(q.omega_eff, q.gamma, effective_drive(probe, q.f), v);
}

}  // namespace detail

/**
 * Central difference [P_e(T+h) - P_e(T-h)] / 2h. The difference is taken on the
 * deficit 1/2 - P_e, which is exact algebraically and survives rounding in the
 * strong-coupling regime where P_e is within 1e-15 of 1/2.
 */
inline double steady_population_dT_fd(const ProbeConfig& probe, const BathConfig& bath, double T,
                                      double h, Variant variant = Variant::Paper) {
  if (!(h > 0.0) || !(h < T / 2.0))
    throw DomainError("steady_population_dT_fd: step must satisfy 0 < h < T/2");
  return -(detail::deficit_at(probe, bath, T + h, variant) -
           detail::deficit_at(probe, bath, T - h, variant)) /
         (2.0 * h);
}

/// One Richardson level on top of steady_population_dT_fd: (4 D(h/2) - D(h)) / 3.
inline double steady_population_dT_richardson(const ProbeConfig& probe, const BathConfig& bath,
                                              double T, double h, Variant variant = Variant::Paper) {
  const double coarse = steady_population_dT_fd(probe, bath, T, h, variant);
  const double fine = steady_population_dT_fd(probe, bath, T, h / 2.0, variant);
  return (4.0 * fine - coarse) / 3.0;
}

/// Default relative step for the plain central difference.
inline constexpr double kDefaultFdRelativeStep = 1e-5;
/// Relative step used with Richardson extrapolation in the validators.
inline constexpr double kRichardsonRelativeStep = 1e-4;

}  // namespace phonon_thermo
