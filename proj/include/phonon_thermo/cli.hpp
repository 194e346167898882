#pragma once

// Subcommands of the phonon-thermo tool. Each returns a process exit code:
//   0 success, 1 usage, 2 domain/config error, 3 I/O failure,
//   4 optimizer non-convergence, 5 validation tolerance breach.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "phonon_thermo/config.hpp"
#include "phonon_thermo/errors.hpp"
#include "phonon_thermo/metrology.hpp"
#include "phonon_thermo/output.hpp"
#include "phonon_thermo/sweep.hpp"
#include "phonon_thermo/validate.hpp"

namespace phonon_thermo {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDomain = 2,
  kExitIo = 3,
  kExitNonConvergence = 4,
  kExitValidation = 5,
};

struct CliOptions {
  std::string command{};
  std::optional<std::string> config_path{};
  std::optional<std::string> axis{};
  std::optional<double> eta{};
  std::optional<double> temp{};
  std::optional<double> cutoff{};
  std::optional<std::string> variant{};
  std::optional<std::string> out{};
  bool svg = false;
};

/// I/O failure while writing results.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config file (or defaults) with command-line overrides applied.
inline RunConfig load_config(const CliOptions& opt) {
  RunConfig cfg;
  if (opt.config_path) {
    std::ifstream in(*opt.config_path);
    if (!in) throw IoError("cannot read config file '" + *opt.config_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    cfg = parse_config(ss.str());
  }
  if (opt.eta) cfg.bath = cfg.bath.with_eta(*opt.eta);
  if (opt.cutoff) cfg.bath = cfg.bath.with_omega_c(*opt.cutoff);
  if (opt.temp) {
    if (!(*opt.temp > 0.0)) throw DomainError("--temp must be positive");
    cfg.T = *opt.temp;
  }
  if (opt.variant) cfg.variant = parse_variant(*opt.variant);
  if (opt.out) cfg.output_dir = *opt.out;
  if (opt.svg) cfg.emit_svg = true;
  return cfg;
}

namespace detail {

inline std::filesystem::path prepare_output_dir(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  const fs::path probe = dir / ".phonon_thermo_write_check";
  {
    std::ofstream test(probe);
    if (!test) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
  return dir;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

inline nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace detail

inline int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const RenormalizedQuantities q = renormalized_at(cfg.probe, cfg.bath, cfg.T);
  const QfiPoint p = qfi_at(cfg.probe, cfg.bath, cfg.T, cfg.variant);
  nlohmann::ordered_json rec;
  rec["T"] = p.T;
  rec["eta"] = cfg.bath.eta();
  rec["omega_c"] = cfg.bath.omega_c();
  rec["omega0"] = cfg.probe.omega0();
  rec["Omega"] = cfg.probe.Omega();
  rec["drive_mode"] = to_string(cfg.probe.drive_mode());
  rec["variant"] = to_string(cfg.variant);
  rec["P_e"] = p.P_e;
  rec["dPe_dT"] = p.dPe_dT;
  rec["F_Q"] = p.F_Q;
  rec["variance_bound_single_shot"] = detail::number_or_null(p.variance_bound_single_shot.value);
  rec["variance_unbounded"] = p.variance_bound_single_shot.is_unbounded();
  rec["f"] = q.f;
  rec["omega_eff"] = q.omega_eff;
  rec["gamma"] = q.gamma;
  rec["drive_renormalized"] = p.drive_renormalized;
  out << rec.dump() << '\n';
  return kExitOk;
}

inline int cmd_sweep(const RunConfig& cfg, Parameter parameter, std::ostream& out) {
  const auto dir = detail::prepare_output_dir(cfg);
  const AxisSpec& axis = cfg.grids.for_parameter(parameter);
  const SweepResult r = sweep_1d(axis, cfg.operating_point());
  const std::string stem = std::string("sweep_") + to_string(parameter);
  detail::write_file(dir / (stem + ".csv"), [&](std::ostream& os) { write_sweep_csv(os, r); });
  if (cfg.emit_svg) detail::write_file(dir / (stem + ".svg"), [&](std::ostream& os) { write_sweep_svg(os, r); });

  const std::vector<double> xs = axis.values();
  std::size_t best = 0, sentinels = 0;
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    if (!r.cells[i].valid) {
      ++sentinels;
      continue;
    }
    if (!r.cells[best].valid || r.cells[i].qfi.F_Q > r.cells[best].qfi.F_Q) best = i;
  }
  out << "sweep " << to_string(parameter) << ": " << xs.size() << " points, max F_Q "
      << format_number(r.cells[best].qfi.F_Q) << " at " << to_string(parameter) << " = "
      << format_number(xs[best]) << ", sentinel cells " << sentinels << " -> "
      << (dir / (stem + ".csv")).string() << " [v" << r.provenance.version << ' ' << r.provenance.timestamp
      << "]\n";
  return kExitOk;
}

inline int cmd_heatmap(const RunConfig& cfg, std::ostream& out) {
  const auto dir = detail::prepare_output_dir(cfg);
  const SweepResult r = heatmap_qfi(cfg.grids.temperature, cfg.grids.coupling, cfg.operating_point());
  detail::write_file(dir / "heatmap.csv", [&](std::ostream& os) { write_heatmap_csv(os, r); });
  if (cfg.emit_svg) detail::write_file(dir / "heatmap.svg", [&](std::ostream& os) { write_heatmap_svg(os, r); });

  std::size_t bi = 0, bj = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j)
      if (r.at(i, j).valid && r.at(i, j).qfi.F_Q > best) {
        best = r.at(i, j).qfi.F_Q;
        bi = i;
        bj = j;
      }
  const bool interior = bi > 0 && bj > 0 && bi + 1 < r.rows() && bj + 1 < r.cols();
  out << "heatmap " << r.rows() << "x" << r.cols() << ": max F_Q " << format_number(best) << " at T = "
      << format_number(cfg.grids.temperature.values()[bi]) << ", eta = "
      << format_number(cfg.grids.coupling.values()[bj]) << (interior ? " (interior)" : " (on boundary)")
      << " -> " << (dir / "heatmap.csv").string() << " [v" << r.provenance.version << ' '
      << r.provenance.timestamp << "]\n";
  return kExitOk;
}

inline constexpr double kOptimizeTolerance = 1e-6;

inline int cmd_optimize(const RunConfig& cfg, Parameter parameter, std::ostream& out) {
  const auto dir = detail::prepare_output_dir(cfg);
  const AxisSpec& axis = cfg.grids.for_parameter(parameter);
  const OptimumReport rep =
      optimize_scalar(parameter, axis.start(), axis.stop(), cfg.operating_point(), kOptimizeTolerance);
  const std::string name = std::string("optimize_") + to_string(parameter) + ".csv";
  detail::write_file(dir / name, [&](std::ostream& os) {
    os << "parameter,T,lo,hi,argmax,F_Q_max,iterations,interior\n"
       << to_string(parameter) << ',' << format_number(cfg.T) << ',' << format_number(rep.lo) << ','
       << format_number(rep.hi) << ',' << format_number(rep.argmax) << ',' << format_number(rep.F_Q_max)
       << ',' << rep.iterations << ',' << (rep.interior ? 1 : 0) << '\n';
  });
  out << "optimize " << to_string(parameter) << " at T = " << format_number(cfg.T) << ": argmax "
      << format_number(rep.argmax) << ", F_Q " << format_number(rep.F_Q_max) << ", bracket ["
      << format_number(rep.lo) << ", " << format_number(rep.hi) << "], " << rep.iterations
      << " golden-section iterations, " << (rep.interior ? "interior" : "on bracket edge") << " -> "
      << (dir / name).string() << '\n';
  return kExitOk;
}

inline int cmd_limits(const RunConfig& cfg, std::ostream& out) {
  const auto dir = detail::prepare_output_dir(cfg);
  const LimitReport rep = limit_report(cfg.operating_point());
  detail::write_file(dir / "limits.csv", [&](std::ostream& os) {
    os << "block,quantity,value\n";
    for (const auto& b : rep.blocks) {
      for (const auto& q : b.quantities) os << b.name << ',' << q.name << ',' << format_number(q.value) << '\n';
      os << b.name << ",pass," << (b.pass ? 1 : 0) << '\n';
    }
  });
  for (const auto& b : rep.blocks) {
    out << "[" << (b.pass ? "PASS" : "FAIL") << "] " << b.name << " (" << b.check << ")\n";
    for (const auto& q : b.quantities) out << "    " << q.name << " = " << format_number(q.value) << '\n';
  }
  return kExitOk;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  std::vector<std::string> failing;
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };

  const auto a = derivative_suite(cfg);
  out << "[" << verdict(a.pass()) << "] (a) derivative: max relative |analytic - richardson| = "
      << format_number(a.max_relative_deviation) << " over " << a.points << " points (tol "
      << format_number(a.tolerance) << "; worst at T = " << format_number(a.worst_T)
      << ", eta = " << format_number(a.worst_eta) << ")\n";
  if (!a.pass()) failing.emplace_back("derivative");

  const auto b = ode_suite(cfg);
  out << "[" << verdict(b.pass()) << "] (b) ode: max |dP_e| paper = " << format_number(b.max_abs_dev_paper)
      << (b.paper_matches() ? " (match)" : " (mismatch)")
      << ", rederived = " << format_number(b.max_abs_dev_rederived)
      << (b.rederived_matches() ? " (match)" : " (mismatch)") << " over " << b.points << " points";
  if (b.skipped) out << ", " << b.skipped << " skipped (gamma = 0)";
  out << " (tol " << format_number(b.tolerance) << ")\n";
  if (!b.pass()) failing.emplace_back("ode");

  const auto c = qfi_identity_suite();
  out << "[" << verdict(c.pass()) << "] (c) qfi identity: max relative deviation compact/sum = "
      << format_number(c.max_relative_deviation) << ", sld/sum = " << format_number(c.max_sld_deviation)
      << " over " << c.pairs << " pairs (tol " << format_number(c.tolerance) << ")\n";
  if (!c.pass()) failing.emplace_back("qfi-identity");

  const auto d = dressing_monotonicity_suite(cfg);
  out << "[" << verdict(d.pass()) << "] (d) dressing monotonicity: " << d.violations << " violations in "
      << d.comparisons << " comparisons\n";
  if (!d.pass()) failing.emplace_back("dressing-monotonicity");

  if (failing.empty()) return kExitOk;
  out << "failing suites:";
  for (const auto& s : failing) out << ' ' << s;
  out << '\n';
  return kExitValidation;
}

/// Dispatches one subcommand, mapping library exceptions onto exit codes.
inline int run_command(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(opt);
    if (opt.command == "eval") return cmd_eval(cfg, out);
    if (opt.command == "heatmap") return cmd_heatmap(cfg, out);
    if (opt.command == "limits") return cmd_limits(cfg, out);
    if (opt.command == "validate") return cmd_validate(cfg, out);
    if (opt.command == "sweep")
      return cmd_sweep(cfg, opt.axis ? parse_parameter(*opt.axis) : Parameter::Temperature, out);
    if (opt.command == "optimize") {
      const Parameter p = opt.axis ? parse_parameter(*opt.axis) : Parameter::Coupling;
      if (p != Parameter::Coupling && p != Parameter::Cutoff) {
        err << "error: optimize supports --axis coupling or cutoff\n";
        return kExitUsage;
      }
      return cmd_optimize(cfg, p, out);
    }
    err << "error: unknown command '" << opt.command << "'\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const FlatProfileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace phonon_thermo
