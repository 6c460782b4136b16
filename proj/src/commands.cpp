#include "detshock/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "detshock/config.hpp"
#include "detshock/errors.hpp"
#include "detshock/io.hpp"
#include "detshock/verifier.hpp"

namespace fs = std::filesystem;

namespace detshock {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig load_run_config(const CommandOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config is required");
  Config cfg = Config::load(opt.config_path);
  for (const auto& kv : opt.overrides) cfg.apply_override(kv);
  RunConfig rc = make_run_config(cfg);
  if (!opt.out_dir.empty()) rc.out_dir = opt.out_dir;
  return rc;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "'");
}

std::string state_text(const FlowState& s) {
  return "rho = " + num(s.rho) + ", u1 = " + num(s.u1) + ", u2 = " + num(s.u2);
}

std::vector<double> body_samples(const CutoffDomain& dom, int n) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = dom.p3.y() * k / (n - 1);
  return x;
}

bool is_blunt(const BluntBody& body) {
  return body.h0() > 0.0 && body.d1(0.0) == 0.0;
}

void write_run(const std::string& dir, const RunConfig& rc,
               const BluntBody& body, const FreeBoundaryResult& res) {
  ensure_dir(dir);
  const fs::path p(dir);
  write_shock_csv((p / "shock.csv").string(), res.shock, rc.hash);
  write_field_csv((p / "field.csv").string(), res.grid, res.field, rc.gas,
                  rc.hash);
  write_grid_csv((p / "grid.csv").string(), res.grid, rc.hash);
  write_body_csv((p / "body.csv").string(), body,
                 body_samples(*res.domain, rc.fb.nt), rc.hash);
  write_report((p / "report.txt").string(), res.report, rc.hash);
}

template <class Fn>
int with_errors(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BranchCollisionError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
}

template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) fn(k);
  };
  const int nt = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int w = 1; w < nt; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

struct SummaryRow {
  double key = 0.0;
  bool converged = false;
  bool verified = false;
  double min_gap = NAN, max_mach = NAN, min_fpp = NAN, rh = NAN, fprime = NAN;
  std::string error;
};

SummaryRow summarize(double key, const FreeBoundaryResult& res,
                     const GasParams& g) {
  SummaryRow row;
  row.key = key;
  row.converged = res.report.converged;
  row.verified = res.report.verified;
  row.min_gap = res.report.value("min_b_minus_f");
  row.max_mach = check_subsonic(g, res.field).max_mach;
  row.min_fpp = res.report.value("convexity_min_fpp");
  row.rh = std::max(res.report.value("rh_mass"),
                    res.report.value("rh_tangential"));
  row.fprime = res.report.value("asym_fprime");
  return row;
}

}  // namespace

int thread_budget() {
  if (const char* env = std::getenv("DETSHOCK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_polar(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  return with_errors(err, [&] {
    const RunConfig rc = load_run_config(opt);
    ensure_dir(rc.out_dir);
    const fs::path out(rc.out_dir);
    const PolarOptions& po = rc.fb.polar;
    const double theta_det = detachment_angle(rc.gas, rc.eps, po);
    {
      std::ostringstream d;
      d << "# config_hash=" << rc.hash << "\n";
      d << "theta_det = " << num(theta_det) << "\n";
      d << "theta_det_degrees = " << num(theta_det * 180.0 / std::numbers::pi)
        << "\n";
      d << "theta_w_degrees = " << num(rc.theta_w_degrees) << "\n";
      write_text((out / "detachment.txt").string(), d.str());
    }
    const PolarCurve pc = polar_curve(rc.gas, rc.eps, rc.polar_samples, po);
    write_polar_csv((out / "polar.csv").string(), pc, rc.gas, rc.eps, rc.hash);

    const BranchPair bp = solve_branches(rc.gas, rc.eps, rc.theta_w(), po);
    const FlowState up = incoming_state(rc.gas, rc.eps);
    const double kappa = std::tan(rc.theta_w());
    std::ostringstream b;
    b << "# config_hash=" << rc.hash << "\n";
    b << "upstream: " << state_text(up) << "\n";
    for (const auto* sol : {&bp.strong, &bp.weak}) {
      const EntropyMargins m = entropy_margins(rc.gas, up, kappa, *sol);
      b << to_string(sol->branch) << ": rho = " << num(sol->rho)
        << ", u = " << num(sol->u) << ", s = " << num(sol->s)
        << ", margin_density = " << num(m.density)
        << ", margin_normal_drop = " << num(m.normal_drop)
        << ", margin_normal_speed = " << num(m.normal_speed)
        << ", admissible = " << (m.ok() ? 1 : 0) << "\n";
    }
    write_text((out / "branches.txt").string(), b.str());
    log << "polar: theta_det = " << theta_det * 180.0 / std::numbers::pi
        << " deg; strong u = " << bp.strong.u << ", weak u = " << bp.weak.u
        << "\n";
    return kExitOk;
  });
}

int cmd_solve(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  return with_errors(err, [&] {
    const RunConfig rc = load_run_config(opt);
    const BluntBody body = rc.make_body();
    ensure_dir(rc.out_dir);
    const FreeBoundaryResult res = solve_free_boundary(
        body, rc.gas, rc.eps, rc.theta_w(), rc.d0, rc.L, rc.fb);
    write_run(rc.out_dir, rc, body, res);
    log << "solve: converged in " << res.report.outer_iterations
        << " outer iterations; verified = " << (res.report.verified ? 1 : 0)
        << "\n";
    if (!res.report.verified) {
      for (const auto& e : res.report.entries)
        if (e.tolerance.size() >= 4 &&
            e.tolerance.compare(e.tolerance.size() - 4, 4, "FAIL") == 0)
          err << "check failed: " << e.key << " = " << e.value << " ("
              << e.tolerance << ")\n";
      return kExitVerify;
    }
    return kExitOk;
  });
}

int cmd_verify(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  RunConfig rc;
  try {
    rc = load_run_config(opt);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const fs::path out(rc.out_dir);
  const std::string shock_path = (out / "shock.csv").string();
  const std::string field_path = (out / "field.csv").string();
  for (const auto& p : {shock_path, field_path})
    if (!fs::exists(p)) {
      err << "config error: missing input '" << p << "'\n";
      return kExitConfig;
    }

  VerificationReport vr;
  std::string failure;
  try {
    const CsvTable meta = read_csv(shock_path);
    const ShockCurve shock = read_shock_csv(shock_path);
    const FieldTable ft = read_field_csv(field_path);
    vr.lines.push_back({"config_hash_match",
                        meta.meta_value("config_hash") == rc.hash ? 0.0 : 1.0,
                        "<=", 0.0, meta.meta_value("config_hash") == rc.hash});
    const BluntBody body = rc.make_body();
    const CutoffDomain dom =
        build_cutoff_domain(body, shock.spline(), rc.d0, shock.L());
    const BodyFittedGrid grid = make_grid(dom, ft.ns, ft.nt, rc.fb.grading);
    double gdev = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      gdev = std::max({gdev, std::abs(grid.x1[k] - ft.x1[k]),
                       std::abs(grid.x2[k] - ft.x2[k])});
    const double gtol = 1e-12 * (1.0 + shock.L());
    vr.lines.push_back({"grid_consistency", gdev, "<=", gtol, gdev <= gtol});
    const double ldev = std::abs(shock.L() - rc.L);
    vr.lines.push_back({"cutoff_height_match", ldev, "<=", gtol, ldev <= gtol});

    MappedDifferences md(grid);
    const StreamField field = make_field(md, rc.gas, ft.psi);
    VerifyInput vin;
    vin.grid = &grid;
    vin.field = &field;
    vin.shock = &shock;
    vin.domain = &dom;
    vin.gas = rc.gas;
    vin.eps = rc.eps;
    vin.background = background_pair(rc.gas, rc.eps, rc.theta_w(), body.b0(), rc.d0);
    vin.blunt = is_blunt(body);
    vin.tol.tol_pde = rc.fb.inner.tol_pde;
    const VerificationReport inner = verify(vin);
    vr.lines.insert(vr.lines.end(), inner.lines.begin(), inner.lines.end());
  } catch (const std::exception& e) {
    failure = e.what();
  }

  std::string text = "# config_hash=" + rc.hash + "\n" + vr.text();
  if (!failure.empty()) text += "verification aborted: " + failure + "\nFAIL\n";
  try {
    write_text((out / "verify.txt").string(), text);
  } catch (const std::exception& e) {
    err << "cannot write verify.txt: " << e.what() << "\n";
  }
  const bool ok = failure.empty() && vr.all_pass();
  log << "verify: " << (ok ? "all checks PASS" : "FAIL") << "\n";
  if (!ok) {
    if (!failure.empty()) err << "verification aborted: " << failure << "\n";
    for (const auto& l : vr.lines)
      if (!l.pass) err << "check failed: " << l.name << " = " << l.value << "\n";
    return kExitVerify;
  }
  return kExitOk;
}

int cmd_sweep(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  return with_errors(err, [&] {
    const RunConfig rc = load_run_config(opt);
    const bool by_L = !rc.L_list.empty();
    if (!by_L && rc.eps_list.empty())
      throw ConfigError("sweep needs L_list or eps_list");
    if (by_L && !rc.eps_list.empty())
      throw ConfigError("sweep takes L_list or eps_list, not both");
    const BluntBody body = rc.make_body();
    const int threads = thread_budget();
    ensure_dir(rc.out_dir);
    const fs::path out(rc.out_dir);

    std::vector<SummaryRow> rows;
    std::vector<double> pair_diffs;
    if (by_L) {
      // Inner solves run one per thread, so the sweep owns the budget.
      const SweepResult sw = l_sweep(body, rc.gas, rc.eps, rc.theta_w(), rc.d0,
                                     rc.L_list, rc.fb, threads);
      pair_diffs = sw.pair_differences;
      for (std::size_t k = 0; k < sw.runs.size(); ++k) {
        const auto& run = sw.runs[k];
        const std::string dir = (out / ("L_" + std::to_string(k))).string();
        if (run.ok) {
          write_run(dir, rc, body, run.result);
          rows.push_back(summarize(run.L, run.result, rc.gas));
        } else {
          SummaryRow row;
          row.key = run.L;
          row.error = run.error;
          rows.push_back(row);
        }
      }
    } else {
      const int n = static_cast<int>(rc.eps_list.size());
      rows.resize(n);
      std::vector<std::optional<FreeBoundaryResult>> results(n);
      parallel_for(n, threads, [&](int k) {
        rows[k].key = rc.eps_list[k];
        try {
          results[k] = solve_free_boundary(body, rc.gas, rc.eps_list[k],
                                           rc.theta_w(), rc.d0, rc.L, rc.fb);
        } catch (const std::exception& e) {
          rows[k].error = e.what();
        }
      });
      for (int k = 0; k < n; ++k)
        if (results[k]) {
          RunConfig sub = rc;
          sub.eps = rc.eps_list[k];
          write_run((out / ("eps_" + std::to_string(k))).string(), sub, body,
                    *results[k]);
          rows[k] = summarize(rc.eps_list[k], *results[k], rc.gas);
        }
    }

    std::ostringstream s;
    s << "# detshock sweep\n# config_hash=" << rc.hash << "\n";
    for (std::size_t k = 0; k < pair_diffs.size(); ++k)
      s << "# morph_difference_" << k << "=" << num(pair_diffs[k]) << "\n";
    s << (by_L ? "L" : "eps")
      << ",converged,min_b_minus_f,max_mach,min_fpp,rh_residual,asym_fprime\n";
    bool any_ok = false;
    for (const auto& r : rows) {
      s << num(r.key) << "," << (r.converged ? 1 : 0) << "," << num(r.min_gap)
        << "," << num(r.max_mach) << "," << num(r.min_fpp) << "," << num(r.rh)
        << "," << num(r.fprime) << "\n";
      if (r.converged && r.verified) any_ok = true;
      if (!r.error.empty()) err << "run " << num(r.key) << " failed: " << r.error << "\n";
    }
    write_text((out / "summary.csv").string(), s.str());
    log << "sweep: " << rows.size() << " runs on " << threads << " threads\n";
    return any_ok ? kExitOk : kExitSolver;
  });
}

}  // namespace detshock
