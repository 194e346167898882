#pragma once

/**
 * @brief Parameter scans of the steady-state QFI, scalar optimization of the
 * coupling/cutoff, and the limiting-case report.
 *
 * Grid cells are independent and may be evaluated on several threads; results are
 * always stored at their axis index so the output does not depend on scheduling.
 */

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "phonon_thermo/bath.hpp"
#include "phonon_thermo/errors.hpp"
#include "phonon_thermo/metrology.hpp"
#include "phonon_thermo/steady_state.hpp"

namespace phonon_thermo {

inline constexpr const char* kVersion = "0.1.0";

enum class Parameter { Temperature, Coupling, Cutoff, Drive };
enum class Scale { Linear, Log };

inline const char* to_string(Parameter p) {
  switch (p) {
    case Parameter::Temperature: return "temperature";
    case Parameter::Coupling: return "coupling";
    case Parameter::Cutoff: return "cutoff";
    case Parameter::Drive: return "drive";
  }
  return "?";
}

inline const char* to_string(Scale s) { return s == Scale::Linear ? "linear" : "log"; }

class AxisSpec {
 public:
  AxisSpec(Parameter parameter, double start, double stop, int count, Scale scale = Scale::Linear)
      : parameter_(parameter), start_(start), stop_(stop), count_(count), scale_(scale) {
    if (!(start < stop) || !std::isfinite(start) || !std::isfinite(stop))
      throw DomainError(std::string("axis ") + to_string(parameter) + ": need start < stop");
    if (count < 2) throw DomainError(std::string("axis ") + to_string(parameter) + ": need count >= 2");
    if (scale == Scale::Log && !(start > 0.0))
      throw DomainError(std::string("axis ") + to_string(parameter) + ": log scale needs start > 0");
  }

  Parameter parameter() const noexcept { return parameter_; }
  double start() const noexcept { return start_; }
  double stop() const noexcept { return stop_; }
  int count() const noexcept { return count_; }
  Scale scale() const noexcept { return scale_; }

  /// Ascending grid values; the last value is exactly `stop`.
  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(count_));
    const double span = static_cast<double>(count_ - 1);
    for (int i = 0; i < count_; ++i) {
      const double u = i / span;
      v[static_cast<std::size_t>(i)] =
          scale_ == Scale::Linear
              ? start_ + u * (stop_ - start_)
              : std::exp(std::log(start_) + u * (std::log(stop_) - std::log(start_)));
    }
    v.front() = start_;
    v.back() = stop_;
    return v;
  }

 private:
  Parameter parameter_;
  double start_;
  double stop_;
  int count_;
  Scale scale_;
};

inline AxisSpec default_temperature_axis() { return {Parameter::Temperature, 0.05, 3.0, 200}; }
inline AxisSpec default_coupling_axis() { return {Parameter::Coupling, 0.01, 5.0, 200}; }
inline AxisSpec default_cutoff_axis() { return {Parameter::Cutoff, 0.5, 20.0, 200, Scale::Log}; }
inline AxisSpec default_drive_axis() { return {Parameter::Drive, 0.1, 1.0, 10}; }

/// Everything a single pipeline evaluation needs.
struct OperatingPoint {
  ProbeConfig probe;
  BathConfig bath;
  double T;
  Variant variant = Variant::Paper;

  /// Copy with one parameter replaced; throws DomainError for invalid values.
  OperatingPoint with(Parameter p, double value) const {
    OperatingPoint out = *this;
    switch (p) {
      case Parameter::Temperature: out.T = value; break;
      case Parameter::Coupling: out.bath = bath.with_eta(value); break;
      case Parameter::Cutoff: out.bath = bath.with_omega_c(value); break;
      case Parameter::Drive: out.probe = probe.with_Omega(value); break;
    }
    return out;
  }
};

/// One grid cell. `valid == false` marks a sentinel left by a domain error.
struct SweepCell {
  bool valid = false;
  QfiPoint qfi;
  double f = std::numeric_limits<double>::quiet_NaN();
  double omega_eff = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

struct Provenance {
  std::string version = kVersion;
  std::string timestamp;
};

struct SweepResult {
  std::vector<AxisSpec> axes;    ///< one or two; first axis is the slow (row) index
  std::vector<SweepCell> cells;  ///< row-major
  OperatingPoint fixed;
  Provenance provenance;

  std::size_t rows() const { return static_cast<std::size_t>(axes.at(0).count()); }
  std::size_t cols() const {
    return axes.size() > 1 ? static_cast<std::size_t>(axes[1].count()) : 1;
  }
  const SweepCell& at(std::size_t i, std::size_t j = 0) const { return cells.at(i * cols() + j); }
};

struct OptimumReport {
  Parameter parameter = Parameter::Coupling;
  double argmax = 0.0;
  double F_Q_max = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  bool interior = false;
};

struct LimitQuantity {
  std::string name;
  double value;
};

struct LimitBlock {
  std::string name;
  std::string check;  ///< human-readable pass condition
  std::vector<LimitQuantity> quantities;
  bool pass = false;
};

struct LimitReport {
  std::vector<LimitBlock> blocks;

  bool all_pass() const {
    return std::all_of(blocks.begin(), blocks.end(), [](const LimitBlock& b) { return b.pass; });
  }
};

/// Evaluates the full pipeline; domain errors become a sentinel cell.
inline SweepCell evaluate_cell(const OperatingPoint& base,
                               std::initializer_list<std::pair<Parameter, double>> overrides) {
  SweepCell cell;
  try {
    OperatingPoint op = base;
    for (const auto& [p, v] : overrides) op = op.with(p, v);
    const RenormalizedQuantities q = renormalized_at(op.probe, op.bath, op.T);
    cell.qfi = qfi_at(op.probe, op.bath, op.T, op.variant);
    cell.f = q.f;
    cell.omega_eff = q.omega_eff;
    cell.gamma = q.gamma;
    cell.valid = true;
  } catch (const DomainError& e) {
    cell = SweepCell{};
    cell.error = e.what();
  }
  return cell;
}

/// PHONON_THERMO_THREADS if set (must be a positive integer), otherwise hardware concurrency.
inline unsigned sweep_thread_count() {
  if (const char* env = std::getenv("PHONON_THERMO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0)
      throw ConfigError(std::string("PHONON_THERMO_THREADS must be a positive integer, got '") +
                            env + "'",
                        "PHONON_THERMO_THREADS");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Evaluates qfi_at along one axis. `threads == 0` reads PHONON_THERMO_THREADS.
inline SweepResult sweep_1d(const AxisSpec& axis, const OperatingPoint& base, unsigned threads = 0) {
  SweepResult result{{axis}, {}, base, {kVersion, detail::utc_timestamp()}};
  const std::vector<double> xs = axis.values();
  result.cells.resize(xs.size());
  if (threads == 0) threads = sweep_thread_count();
  detail::parallel_for(xs.size(), threads, [&](std::size_t i) {
    result.cells[i] = evaluate_cell(base, {{axis.parameter(), xs[i]}});
  });
  return result;
}

/// 2-D QFI map, temperature on the row axis and coupling on the column axis.
inline SweepResult heatmap_qfi(const AxisSpec& T_axis, const AxisSpec& eta_axis,
                               const OperatingPoint& base, unsigned threads = 0) {
  if (T_axis.parameter() != Parameter::Temperature || eta_axis.parameter() != Parameter::Coupling)
    throw DomainError("heatmap_qfi: expects a temperature axis and a coupling axis");
  SweepResult result{{T_axis, eta_axis}, {}, base, {kVersion, detail::utc_timestamp()}};
  const std::vector<double> Ts = T_axis.values();
  const std::vector<double> etas = eta_axis.values();
  result.cells.resize(Ts.size() * etas.size());
  if (threads == 0) threads = sweep_thread_count();
  detail::parallel_for(Ts.size(), threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < etas.size(); ++j)
      result.cells[i * etas.size() + j] =
          evaluate_cell(base, {{Parameter::Temperature, Ts[i]}, {Parameter::Coupling, etas[j]}});
  });
  return result;
}

inline constexpr int kCoarseScanPoints = 64;

/**
 * Maximizes F_Q over coupling or cutoff in [lo, hi]: a 64-point coarse scan (log-spaced
 * for the cutoff) picks the best sample, then golden-section search runs on the two
 * neighbouring scan intervals until the bracket is narrower than `tol`.
 */
inline OptimumReport optimize_scalar(Parameter parameter, double lo, double hi,
                                     const OperatingPoint& base, double tol) {
  if (parameter != Parameter::Coupling && parameter != Parameter::Cutoff)
    throw DomainError("optimize_scalar: only coupling and cutoff can be optimized");
  if (!(lo < hi)) throw DomainError("optimize_scalar: need lo < hi");
  if (!(tol > 0.0)) throw DomainError("optimize_scalar: tol must be positive");

  auto objective = [&](double x) {
    const OperatingPoint op = base.with(parameter, x);
    return qfi_at(op.probe, op.bath, op.T, op.variant).F_Q;
  };

  const Scale scale = (parameter == Parameter::Cutoff) ? Scale::Log : Scale::Linear;
  const std::vector<double> xs = AxisSpec(parameter, lo, hi, kCoarseScanPoints, scale).values();
  std::vector<double> fs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = objective(xs[i]);

  const auto [min_it, max_it] = std::minmax_element(fs.begin(), fs.end());
  if (*max_it - *min_it <=
      std::numeric_limits<double>::epsilon() * std::max(std::abs(*max_it), std::numeric_limits<double>::min()))
    throw FlatProfileError("optimize_scalar: objective is flat over the coarse scan");

  const auto k = static_cast<std::size_t>(max_it - fs.begin());
  double a = xs[k == 0 ? 0 : k - 1];
  double b = xs[std::min(k + 1, xs.size() - 1)];

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  int iterations = 0;
  constexpr int kMaxIterations = 500;
  while (b - a > tol) {
    if (++iterations > kMaxIterations)
      throw NonConvergenceError("optimize_scalar: golden-section search did not converge", b - a);
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }

  OptimumReport report{parameter, 0.5 * (a + b), 0.0, lo, hi, iterations, false};
  report.F_Q_max = objective(report.argmax);
  // Never report less than the best coarse sample (matters when the peak sits on an endpoint).
  if (*max_it > report.F_Q_max) {
    report.argmax = xs[k];
    report.F_Q_max = *max_it;
  }
  report.interior = (report.argmax - lo > tol) && (hi - report.argmax > tol);
  return report;
}

/// Weak-coupling, strong-coupling and low-temperature checks at the given operating point.
inline LimitReport limit_report(const OperatingPoint& base) {
  const double w0 = base.probe.omega0();
  const double wc = base.bath.omega_c();
  LimitReport report;

  {
    const double eta = 1e-6;
    const OperatingPoint op = base.with(Parameter::Coupling, eta);
    const RenormalizedQuantities q = renormalized_at(op.probe, op.bath, op.T);
    const QfiPoint p = qfi_at(op.probe, op.bath, op.T, op.variant);
    const double predicted_ratio = 2.0 * std::numbers::pi * w0 * std::exp(-w0 / wc) * (q.n + 1.0) * q.f;
    LimitBlock b{"weak-coupling", "|f - 1| < 1e-5 at eta = 1e-6", {}, false};
    b.quantities = {{"eta", eta},
                    {"f_minus_1", q.f - 1.0},
                    {"gamma_over_eta", q.gamma / eta},
                    {"gamma_over_eta_predicted", predicted_ratio},
                    {"P_e", p.P_e},
                    {"F_Q", p.F_Q}};
    b.pass = std::abs(q.f - 1.0) < 1e-5;
    report.blocks.push_back(std::move(b));
  }

  {
    // eta with f(eta, T) = 1e-5.
    const double n = bose_occupation(w0, base.T);
    const double eta = wc * std::log(1e5) / (2.0 * n + 1.0);
    const OperatingPoint op = base.with(Parameter::Coupling, eta);
    const RenormalizedQuantities q = renormalized_at(op.probe, op.bath, op.T);
    const QfiPoint p = qfi_at(op.probe, op.bath, op.T, op.variant);
    LimitBlock b{"strong-coupling", "f < 1e-4 and |P_e - 1/2| < 1e-3", {}, false};
    b.quantities = {{"eta", eta},
                    {"f", q.f},
                    {"P_e", p.P_e},
                    {"abs_P_e_minus_half", std::abs(p.P_e - 0.5)},
                    {"F_Q", p.F_Q}};
    b.pass = q.f < 1e-4 && std::abs(p.P_e - 0.5) < 1e-3;
    report.blocks.push_back(std::move(b));
  }

  {
    const double T = 0.05 * w0;
    const double n = bose_occupation(w0, T);
    const double dn = bose_occupation_dT(w0, T);
    const double n_asym = std::exp(-w0 / T);
    const double dn_asym = (w0 / (T * T)) * std::exp(-w0 / T);
    LimitBlock b{"low-temperature", "dn/dT / [(omega0/T^2) e^{-omega0/T}] within 1% of 1 at T = 0.05 omega0",
                 {}, false};
    b.quantities = {{"T", T},
                    {"n", n},
                    {"n_asymptotic", n_asym},
                    {"n_ratio", n / n_asym},
                    {"dn_dT", dn},
                    {"dn_dT_asymptotic", dn_asym},
                    {"dn_dT_ratio", dn / dn_asym},
                    {"dn_dT_relative_deviation", std::abs(dn / dn_asym - 1.0)}};
    b.pass = std::abs(dn / dn_asym - 1.0) < 0.01;
    report.blocks.push_back(std::move(b));
  }
  return report;
}

}  // namespace phonon_thermo
