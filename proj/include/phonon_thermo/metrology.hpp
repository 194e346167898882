#pragma once

// Quantum Fisher information of the steady state for temperature estimation.
//
// The steady state is treated as diagonal in the energy basis: coherences are
// dropped, so the QFI reduces to the classical Fisher information of the
// populations {P_e, 1 - P_e}.

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "phonon_thermo/bath.hpp"
#include "phonon_thermo/errors.hpp"
#include "phonon_thermo/steady_state.hpp"

namespace phonon_thermo {

/// Cramer-Rao variance bound; +infinity (is_unbounded) when the Fisher information vanishes.
struct VarianceBound {
  double value = std::numeric_limits<double>::infinity();

  bool is_unbounded() const noexcept { return std::isinf(value); }
};

struct QfiPoint {
  double T = 0.0;
  double F_Q = 0.0;
  double P_e = 0.0;
  double dPe_dT = 0.0;
  VarianceBound variance_bound_single_shot;
  bool drive_renormalized = false;  ///< dPe_dT includes the d(Omega f)/dT terms
};

/// F_Q = (dP_e/dT)^2 / (P_e (1 - P_e)).
inline double qfi_from_population(double P_e, double dPe_dT) {
  if (!(P_e > 0.0 && P_e < 1.0))
    throw DomainError("qfi_from_population: P_e must lie in (0, 1), got " + std::to_string(P_e));
  return (dPe_dT * dPe_dT) / (P_e * (1.0 - P_e));
}

namespace detail {

inline void check_distribution(std::span<const double> populations, std::span<const double> derivs,
                               const char* op) {
  if (populations.size() != derivs.size() || populations.empty())
    throw DomainError(std::string(op) + ": populations and derivatives must have equal, non-zero size");
  for (double p : populations)
    if (!(p > 0.0)) throw DomainError(std::string(op) + ": populations must be positive");
  const double total = std::accumulate(populations.begin(), populations.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12)
    throw DomainError(std::string(op) + ": populations must sum to 1");
  const double dtotal = std::accumulate(derivs.begin(), derivs.end(), 0.0);
  if (std::abs(dtotal) > 1e-12) throw DomainError(std::string(op) + ": derivatives must sum to 0");
}

}  // namespace detail

/// Diagonal elements of the symmetric logarithmic derivative, dP_i/dT / P_i.
inline std::vector<double> sld_diagonal(std::span<const double> populations,
                                        std::span<const double> derivs) {
  detail::check_distribution(populations, derivs, "sld_diagonal");
  std::vector<double> sld(populations.size());
  for (std::size_t i = 0; i < sld.size(); ++i) sld[i] = derivs[i] / populations[i];
  return sld;
}

/// Sum over levels of (dP_i/dT)^2 / P_i.
inline double qfi_sum_form(std::span<const double> populations, std::span<const double> derivs) {
  detail::check_distribution(populations, derivs, "qfi_sum_form");
  double total = 0.0;
  for (std::size_t i = 0; i < populations.size(); ++i)
    total += derivs[i] * derivs[i] / populations[i];
  return total;
}

/// Tr(rho L^2) for diagonal rho and diagonal SLD L.
inline double qfi_from_sld(std::span<const double> populations, std::span<const double> sld) {
  double total = 0.0;
  for (std::size_t i = 0; i < populations.size(); ++i) total += populations[i] * sld[i] * sld[i];
  return total;
}

/// Var(T) >= 1 / (nu F_Q).
inline VarianceBound cramer_rao_bound(double F_Q, int nu = 1) {
  if (nu < 1) throw DomainError("cramer_rao_bound: nu must be >= 1");
  if (!(F_Q >= 0.0)) throw DomainError("cramer_rao_bound: F_Q must be non-negative");
  if (F_Q == 0.0) return {};
  return {1.0 / (static_cast<double>(nu) * F_Q)};
}

/// Full pipeline at one temperature: dressing, closed-form steady state, analytic derivative, QFI.
inline QfiPoint qfi_at(const ProbeConfig& probe, const BathConfig& bath, double T, Variant variant) {
  const SteadySolution s = steady_state_at(probe, bath, T, variant);
  QfiPoint p;
  p.T = T;
  p.P_e = s.P_e;
  p.dPe_dT = *s.dPe_dT;
  p.F_Q = qfi_from_population(p.P_e, p.dPe_dT);
  p.variance_bound_single_shot = cramer_rao_bound(p.F_Q, 1);
  p.drive_renormalized = probe.drive_mode() == DriveMode::Renormalized;
  return p;
}

}  // namespace phonon_thermo
