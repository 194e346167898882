// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "phonon_thermo/cli.hpp"

using namespace phonon_thermo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void check(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %7.3fs  %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) { return format_number(x); }

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t argmax_F(const SweepResult& r) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.cells.size(); ++i)
    if (r.cells[i].valid && r.cells[i].qfi.F_Q > r.cells[best].qfi.F_Q) best = i;
  return best;
}

}  // namespace

int main() {
  const RunConfig cfg;
  const OperatingPoint base = cfg.operating_point();

  check(1, "derivative oracle", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = derivative_suite(cfg, AxisSpec(Parameter::Temperature, 0.1, 5.0, 20),
                                    AxisSpec(Parameter::Coupling, 0.05, 3.0, 20));
    const double t = elapsed_since(t0);
    return Outcome{r.max_relative_deviation < 1e-6 && r.points == 400 && t < 1.0,
                   "max rel dev " + fmt(r.max_relative_deviation) + " over " + std::to_string(r.points) +
                       " nodes, " + fmt(t) + " s"};
  });

  check(2, "steady-state oracle", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = ode_suite(cfg);
    const double t = elapsed_since(t0);
    return Outcome{r.pass() && r.points == 100 && t < 10.0,
                   "max |dP_e| paper " + fmt(r.max_abs_dev_paper) + ", rederived " + fmt(r.max_abs_dev_rederived) +
                       " over " + std::to_string(r.points) + " points, " + fmt(t) + " s"};
  });

  check(3, "qfi identity", [&] {
    const auto r = qfi_identity_suite(1000);
    return Outcome{r.max_relative_deviation <= 1e-12 && r.pairs == 1000,
                   "max rel dev " + fmt(r.max_relative_deviation) + " over " + std::to_string(r.pairs) + " pairs"};
  });

  check(4, "weak-coupling limit", [&] {
    const QfiPoint p = qfi_at(cfg.probe, cfg.bath.with_eta(1e-6), 1.0, cfg.variant);
    return Outcome{p.F_Q < 1e-10, "F_Q " + fmt(p.F_Q)};
  });

  check(5, "strong-coupling limit", [&] {
    const double T = 1.0;
    const double n = bose_occupation(cfg.probe.omega0(), T);
    bool ok = true;
    std::string detail;
    for (double target : {9.9e-5, 1e-5}) {
      const double eta = cfg.bath.omega_c() * std::log(1.0 / target) / (2.0 * n + 1.0);
      const BathConfig bath = cfg.bath.with_eta(eta);
      const double f = dressing_factor(bath, cfg.probe.omega0(), T);
      const QfiPoint p = qfi_at(cfg.probe, bath, T, cfg.variant);
      ok = ok && f < 1e-4 && std::abs(p.P_e - 0.5) < 1e-3 && p.F_Q < 1e-6;
      detail += "f " + fmt(f) + ": |P_e - 1/2| " + fmt(std::abs(p.P_e - 0.5)) + ", F_Q " + fmt(p.F_Q) + "; ";
    }
    return Outcome{ok, detail};
  });

  check(6, "low-temperature asymptotics", [&] {
    const double w = cfg.probe.omega0(), T = 0.05 * w;
    const double ratio = bose_occupation_dT(w, T) / ((w / (T * T)) * std::exp(-w / T));
    return Outcome{ratio >= 0.99 && ratio <= 1.01, "ratio " + fmt(ratio)};
  });

  check(7, "non-monotonic in coupling", [&] {
    bool ok = true;
    std::string detail;
    for (double T : {0.5, 1.0, 2.0}) {
      const SweepResult r = sweep_1d(AxisSpec(Parameter::Coupling, 0.01, 5.0, 200), base.with(Parameter::Temperature, T));
      const std::size_t k = argmax_F(r);
      const double peak = r.cells[k].qfi.F_Q;
      const double lo = r.cells.front().qfi.F_Q, hi = r.cells.back().qfi.F_Q;
      const bool interior = k > 0 && k + 1 < r.cells.size();
      const double ratio = peak / std::max(lo, hi);
      ok = ok && interior && peak >= 10.0 * lo && peak >= 10.0 * hi;
      detail += "T=" + fmt(T) + ": peak/endpoint " + fmt(ratio) + (interior ? "" : " (edge)") + "; ";
    }
    return Outcome{ok, detail};
  });

  check(8, "island structure", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult r = heatmap_qfi(default_temperature_axis(), default_coupling_axis(), base, 1);
    const double t = elapsed_since(t0);
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
    return Outcome{interior && t < 5.0, "max at cell (" + std::to_string(bi) + ", " + std::to_string(bj) +
                                            ") of " + std::to_string(r.rows()) + "x" + std::to_string(r.cols()) +
                                            ", " + fmt(t) + " s single-threaded"};
  });

  check(9, "cutoff optimum shift", [&] {
    const OptimumReport cold = optimize_scalar(Parameter::Cutoff, 0.5, 20.0, base.with(Parameter::Temperature, 0.5), 1e-6);
    const OptimumReport hot = optimize_scalar(Parameter::Cutoff, 0.5, 20.0, base.with(Parameter::Temperature, 2.0), 1e-6);
    return Outcome{hot.argmax > cold.argmax && cold.interior && hot.interior,
                   "argmax(T=0.5) " + fmt(cold.argmax) + (cold.interior ? "" : " (edge)") + ", argmax(T=2) " +
                       fmt(hot.argmax) + (hot.interior ? "" : " (edge)")};
  });

  check(10, "strong-coupling T profile", [&] {
    const AxisSpec Ts = default_temperature_axis();
    const SweepResult r = sweep_1d(Ts, base.with(Parameter::Coupling, 3.0));
    const double T_star = Ts.values()[argmax_F(r)];
    const double decile = Ts.start() + 0.1 * (Ts.stop() - Ts.start());
    return Outcome{T_star <= decile, "argmax T " + fmt(T_star) + " (lowest decile ends at " + fmt(decile) + ")"};
  });

  check(11, "thread determinism", [&] {
    const fs::path root = fs::temp_directory_path() / "phonon_thermo_acceptance";
    fs::remove_all(root);
    std::ostringstream out, err;
    CliOptions one{.command = "heatmap", .out = (root / "t1").string()};
    CliOptions eight{.command = "heatmap", .out = (root / "t8").string()};
    ::setenv("PHONON_THERMO_THREADS", "1", 1);
    const int rc1 = run_command(one, out, err);
    ::setenv("PHONON_THERMO_THREADS", "8", 1);
    const int rc8 = run_command(eight, out, err);
    ::unsetenv("PHONON_THERMO_THREADS");
    const std::string a = slurp(root / "t1" / "heatmap.csv"), b = slurp(root / "t8" / "heatmap.csv");
    fs::remove_all(root);
    return Outcome{rc1 == 0 && rc8 == 0 && !a.empty() && a == b,
                   std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "DIFFERENT")};
  });

  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
