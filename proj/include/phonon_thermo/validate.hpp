#pragma once

/**
 * @brief Oracle cross-checks run by the `validate` command.
 *
 * (a) analytic dP_e/dT against Richardson-extrapolated central differences
 * (b) ODE fixed point against both closed-form variants
 * (c) compact vs. level-sum QFI, and the SLD trace reconstruction
 * (d) monotonicity of the dressing factor in coupling and temperature
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "phonon_thermo/config.hpp"
#include "phonon_thermo/metrology.hpp"
#include "phonon_thermo/steady_state.hpp"

namespace phonon_thermo {

struct DerivativeSuiteResult {
  double max_relative_deviation = 0.0;
  double worst_T = 0.0;
  double worst_eta = 0.0;
  std::size_t points = 0;
  double tolerance = 1e-6;
  bool pass() const { return max_relative_deviation < tolerance; }
};

struct OdeSuiteResult {
  double max_abs_dev_paper = 0.0;
  double max_abs_dev_rederived = 0.0;
  double max_ode_residual = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;  ///< gamma == 0 cells have no attractor
  double tolerance = 1e-8;
  bool paper_matches() const { return max_abs_dev_paper <= tolerance; }
  bool rederived_matches() const { return max_abs_dev_rederived <= tolerance; }
  bool pass() const { return paper_matches() || rederived_matches(); }
};

struct IdentitySuiteResult {
  double max_relative_deviation = 0.0;  ///< compact vs sum form
  double max_sld_deviation = 0.0;       ///< Tr(rho L^2) vs sum form
  std::size_t pairs = 0;
  double tolerance = 1e-12;
  bool pass() const { return max_relative_deviation <= tolerance && max_sld_deviation <= tolerance; }
};

struct MonotonicitySuiteResult {
  std::size_t violations = 0;
  std::size_t comparisons = 0;
  bool pass() const { return violations == 0; }
};

/// |analytic - oracle| / |analytic|; falls back to the absolute difference when analytic == 0.
inline double relative_deviation(double analytic, double oracle) {
  const double diff = std::abs(analytic - oracle);
  return analytic == 0.0 ? diff : diff / std::abs(analytic);
}

inline DerivativeSuiteResult derivative_suite(const RunConfig& cfg, const AxisSpec& T_axis,
                                              const AxisSpec& eta_axis) {
  DerivativeSuiteResult r;
  for (double T : T_axis.values())
    for (double eta : eta_axis.values()) {
      const BathConfig bath = cfg.bath.with_eta(eta);
      const double analytic = steady_population_dT_analytic(cfg.probe, bath, T, cfg.variant);
      const double oracle =
          steady_population_dT_richardson(cfg.probe, bath, T, kRichardsonRelativeStep * T, cfg.variant);
      const double dev = relative_deviation(analytic, oracle);
      ++r.points;
      if (dev > r.max_relative_deviation || r.points == 1) {
        r.max_relative_deviation = dev;
        r.worst_T = T;
        r.worst_eta = eta;
      }
    }
  return r;
}

inline DerivativeSuiteResult derivative_suite(const RunConfig& cfg) {
  return derivative_suite(cfg, cfg.grids.validate_temperature, cfg.grids.validate_coupling);
}

inline OdeSuiteResult ode_suite(const RunConfig& cfg, const AxisSpec& T_axis, const AxisSpec& eta_axis) {
  OdeSuiteResult r;
  for (double T : T_axis.values())
    for (double eta : eta_axis.values()) {
      const BathConfig bath = cfg.bath.with_eta(eta);
      const RenormalizedQuantities q = renormalized_at(cfg.probe, bath, T);
      if (!(q.gamma > 0.0)) {
        ++r.skipped;
        continue;
      }
      const double drive = effective_drive(cfg.probe, q.f);
      const SteadySolution ode = integrate_to_steady_state(BlochState{}, q.omega_eff, q.gamma, drive);
      const double paper = steady_population_closed(q.omega_eff, q.gamma, drive, Variant::Paper);
      const double rederived = steady_population_closed(q.omega_eff, q.gamma, drive, Variant::Rederived);
      r.max_abs_dev_paper = std::max(r.max_abs_dev_paper, std::abs(ode.P_e - paper));
      r.max_abs_dev_rederived = std::max(r.max_abs_dev_rederived, std::abs(ode.P_e - rederived));
      r.max_ode_residual = std::max(r.max_ode_residual, ode.residual);
      ++r.points;
    }
  return r;
}

inline OdeSuiteResult ode_suite(const RunConfig& cfg) {
  return ode_suite(cfg, cfg.grids.ode_temperature, cfg.grids.ode_coupling);
}

/**
 * Deterministic (P_e, dP_e/dT) pairs from additive recurrences with irrational
 * steps; no random number generator is involved.
 */
inline std::vector<std::array<double, 2>> identity_sample_pairs(std::size_t count) {
  std::vector<std::array<double, 2>> pairs;
  pairs.reserve(count);
  const double a = (std::sqrt(5.0) - 1.0) / 2.0;
  const double b = std::sqrt(2.0) - 1.0;
  for (std::size_t k = 1; k <= count; ++k) {
    const double u = std::fmod(static_cast<double>(k) * a, 1.0);
    const double v = std::fmod(static_cast<double>(k) * b, 1.0);
    pairs.push_back({1e-3 + (1.0 - 2e-3) * u, 4.0 * (v - 0.5)});
  }
  return pairs;
}

inline IdentitySuiteResult qfi_identity_suite(std::size_t count = 1000) {
  IdentitySuiteResult r;
  for (const auto& [P, dP] : identity_sample_pairs(count)) {
    const std::array<double, 2> pops{P, 1.0 - P};
    const std::array<double, 2> derivs{dP, -dP};
    const double compact = qfi_from_population(P, dP);
    const double sum = qfi_sum_form(pops, derivs);
    const double via_sld = qfi_from_sld(pops, sld_diagonal(pops, derivs));
    r.max_relative_deviation = std::max(r.max_relative_deviation, relative_deviation(sum, compact));
    r.max_sld_deviation = std::max(r.max_sld_deviation, relative_deviation(sum, via_sld));
    ++r.pairs;
  }
  return r;
}

inline MonotonicitySuiteResult dressing_monotonicity_suite(const RunConfig& cfg, const AxisSpec& T_axis,
                                                           const AxisSpec& eta_axis) {
  MonotonicitySuiteResult r;
  const std::vector<double> Ts = T_axis.values();
  const std::vector<double> etas = eta_axis.values();
  const double w0 = cfg.probe.omega0();
  auto f = [&](double eta, double T) { return dressing_factor(cfg.bath.with_eta(eta), w0, T); };
  for (double T : Ts)
    for (std::size_t j = 1; j < etas.size(); ++j) {
      ++r.comparisons;
      const double lo = f(etas[j - 1], T), hi = f(etas[j], T);
      // Strict decrease; once both underflow to zero there is nothing left to order.
      if (!(hi < lo) && !(hi == 0.0 && lo == 0.0)) ++r.violations;
    }
  for (double eta : etas) {
    if (eta == 0.0) continue;
    for (std::size_t i = 1; i < Ts.size(); ++i) {
      ++r.comparisons;
      const double lo = f(eta, Ts[i - 1]), hi = f(eta, Ts[i]);
      if (!(hi < lo) && !(hi == 0.0 && lo == 0.0)) ++r.violations;
    }
  }
  return r;
}

inline MonotonicitySuiteResult dressing_monotonicity_suite(const RunConfig& cfg) {
  return dressing_monotonicity_suite(cfg, cfg.grids.validate_temperature, cfg.grids.validate_coupling);
}

}  // namespace phonon_thermo
