// Runs the acceptance suite and prints one PASS/FAIL line per criterion.
// Usage: acceptance [output-dir]

#include "xrn/config.hpp"
#include "xrn/converge.hpp"
#include "xrn/couch_torrence.hpp"
#include "xrn/diagnostics.hpp"
#include "xrn/run.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace xrn;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct NamedRun {
  std::string name;
  RunConfig config;
  RunArtifacts artifacts;
  double wall_s = 0.0;
};

NamedRun run_named(const std::string& name, const fs::path& out) {
  NamedRun r;
  r.name = name;
  r.config = parse_config((fs::path(XRN_CONFIG_DIR) / (name + ".ini")).string());
  const auto t0 = std::chrono::steady_clock::now();
  r.artifacts = run(r.config, out / name).artifacts;
  r.wall_s = elapsed_since(t0);
  std::fprintf(stderr, "  %s: %s in %.1f s\n", name.c_str(), to_string(r.artifacts.status).c_str(), r.wall_s);
  return r;
}

std::vector<double> column(const std::vector<NormRecord>& n, double SlabNorms::*field) {
  std::vector<double> out;
  for (const auto& rec : n) out.push_back(rec.norms.*field);
  return out;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

int cli_exit_code(const std::string& config, const fs::path& out) {
  const std::string cmd = std::string("\"") + XRNLAB_PATH + "\" run --config \"" +
                          (fs::path(XRN_CONFIG_DIR) / config).string() + "\" --out \"" + out.string() + "\" > /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double max_drift(const std::vector<HorizonTrace>& traces, double t_until) {
  double drift = 0.0;
  const double h0 = traces.front().h0;
  for (const auto& h : traces) {
    if (h.t_star <= t_until + 1e-9) drift = std::max(drift, std::abs(h.h0 - h0) / std::abs(h0));
  }
  return drift;
}

struct Norm {
  const char* name;
  double SlabNorms::*field;
  double exponent_bound;
};

const Norm kNorms[] = {{"psi", &SlabNorms::psi, -0.5 + 0.1},
                       {"T psi", &SlabNorms::t_psi, -0.5 + 0.1},
                       {"ang grad psi", &SlabNorms::ang_grad, -0.5 + 0.1},
                       {"sqrt(D) Y psi", &SlabNorms::sqrt_d_y_psi, -0.25 + 0.1}};

constexpr double kHardyBound = 8.0;

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  const SpacetimeParams params{};
  int failures = 0;
  auto print = [&](int id, const std::string& name, const Verdict& v) {
    std::printf("criterion %2d %s: %s: %s\n", id, v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.str().c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  };

  // 1. manufactured-solution order
  {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    MmsOptions lin;
    MmsOptions nl = lin;
    nl.nonlinear = true;
    const OrderEstimate el = mms_convergence(params, lin, 3);
    const OrderEstimate en = mms_convergence(params, nl, 3);
    const double wall = elapsed_since(t0);
    for (const auto* e : {&el, &en}) {
      const double lo = *std::min_element(e->orders.begin(), e->orders.end());
      const double hi = *std::max_element(e->orders.begin(), e->orders.end());
      v.require(e->regime == "asymptotic" && lo >= 3.7 && hi <= 4.3,
                e->quantity + " orders " + fmt(e->orders[0], 3) + ", " + fmt(e->orders[1], 3));
    }
    v.require(wall < 120.0, "runtime " + fmt(wall, 2) + " s");
    print(1, "scheme order", v);
  }

  std::fprintf(stderr, "acceptance runs:\n");
  std::vector<NamedRun> runs;
  for (const char* name : {"spherical_nonlinear", "spherical_nonlinear_half", "spherical_linear", "angular_nonlinear"}) {
    runs.push_back(run_named(name, out));
  }
  const NamedRun& nl = runs[0];
  const NamedRun& half = runs[1];
  const NamedRun& lin = runs[2];
  const NamedRun& ang = runs[3];
  auto ok = [](const NamedRun& r) { return r.artifacts.status == ExitStatus::completed; };

  // 2. horizon conservation
  {
    Verdict v;
    for (const NamedRun* r : {&nl, &lin}) {
      if (!ok(*r)) {
        v.require(false, r->name + " did not complete");
        continue;
      }
      const double drift = max_drift(r->artifacts.horizon, 200.0);
      v.require(drift <= 1e-3, r->name + " drift to 200M " + fmt(drift, 3));
    }
    for (const char* name : {"nonlinear", "linear"}) {
      RunConfig ladder = parse_config((fs::path(XRN_CONFIG_DIR) / "h0_ladder.ini").string());
      if (std::string(name) == "linear") ladder.evolution.coupling.bound = 0.0;
      const ConvergenceReport rep = convergence_suite(ladder);
      const bool drift_ok = rep.h0_drift.regime == "roundoff" ||
                            (rep.h0_drift.regime == "asymptotic" && rep.h0_drift.min_order() >= 3.5);
      v.require(drift_ok && rep.failures.empty(),
                std::string(name) + " ladder drift " + fmt(max_of(rep.h0_drift.errors), 2) + " (" + rep.h0_drift.regime + ")");
      v.require(rep.h0_error.regime == "asymptotic" && rep.h0_error.min_order() >= 3.5,
                std::string(name) + " ladder charge error order " + fmt(rep.h0_error.min_order(), 3));
    }
    print(2, "horizon conservation", v);
  }

  // 3. non-decay of Y psi0
  {
    Verdict v;
    for (const NamedRun* r : {&nl, &half, &lin}) {
      const auto& tr = r->artifacts.horizon;
      const InstabilityReport ir = instability_report(tr, params.mass());
      auto it = std::find_if(tr.begin(), tr.end(), [](const HorizonTrace& h) { return h.v >= 200.0 - 1e-9; });
      if (!ok(*r) || it == tr.end() || !ir.hypotheses_met) {
        v.require(false, r->name + " lacks a v = 200M sample or H0 > 0 data");
        continue;
      }
      const double gap = std::abs(it->y_psi0 - ir.h0) / std::abs(ir.h0);
      v.require(gap <= 0.05, r->name + " |Y psi0 - H0|/H0 at v = " + fmt(it->v) + ": " + fmt(gap, 3));
    }
    print(3, "non-decay of Y psi0", v);
  }

  // 4. linear growth of Y^2 psi0
  {
    Verdict v;
    std::vector<double> normalised;
    for (const NamedRun* r : {&nl, &half, &lin}) {
      const auto& tr = r->artifacts.horizon;
      if (!ok(*r) || tr.empty()) {
        v.require(false, r->name + " did not complete");
        continue;
      }
      std::vector<double> vv, yy;
      for (const auto& h : tr) {
        vv.push_back(h.v);
        yy.push_back(h.yy_psi0);
      }
      const double v_end = vv.back();
      const double v_begin = tr.front().v + 0.5 * (v_end - tr.front().v);
      const LinearFit fit = linear_fit(vv, yy, v_begin, v_end);
      const double h0 = tr.front().h0;
      v.require(fit.r_squared >= 0.98 && fit.slope * h0 < 0.0,
                r->name + " slope " + fmt(fit.slope) + " R2 " + fmt(fit.r_squared, 5));
      if (r != &lin) normalised.push_back(fit.slope / h0);
    }
    if (normalised.size() == 2) {
      const double spread = std::abs(normalised[0] - normalised[1]) / std::abs(normalised[1]);
      v.require(spread <= 0.15, "slope/H0 " + fmt(normalised[0]) + " vs " + fmt(normalised[1]) + " (spread " +
                                    fmt(spread, 3) + ")");
    }
    print(4, "asymptotic blow-up", v);
  }

  // 5. decay upper bounds
  {
    Verdict v;
    for (const NamedRun* r : {&ang, &nl}) {
      const auto& n = r->artifacts.norms;
      if (!ok(*r) || n.empty()) {
        v.require(false, r->name + " did not complete");
        continue;
      }
      std::vector<double> t;
      for (const auto& rec : n) t.push_back(rec.t_star);
      const double t_end = t.back();
      const double t_begin = (1.0 + t_end) / 10.0 - 1.0;
      for (const Norm& q : kNorms) {
        const auto values = column(n, q.field);
        if (max_of(values) == 0.0) continue;  // spherical runs have no angular gradient
        const RateFit fit = decay_fit(t, values, t_begin, t_end);
        v.require(fit.exponent <= q.exponent_bound, r->name + " " + q.name + " " + fmt(fit.exponent, 3));
      }
    }
    print(5, "decay upper bounds", v);
  }

  // 6. energy hierarchy and base energy decay
  {
    Verdict v;
    for (const NamedRun& r : runs) {
      const auto& e = r.artifacts.energy;
      if (!ok(r) || e.empty()) {
        v.require(false, r.name + " did not complete");
        continue;
      }
      int violations = 0;
      std::vector<double> t, near;
      for (const auto& rec : e) {
        if (!(rec.e_t <= rec.e_p && rec.e_p <= rec.e_n)) ++violations;
        t.push_back(rec.t_star);
        near.push_back(rec.e_t_near);
      }
      const double t_end = t.back();
      const RateFit fit = decay_fit(t, near, (1.0 + t_end) / 10.0 - 1.0, t_end);
      v.require(violations == 0 && fit.exponent <= -2.0 + 0.1,
                r.name + " order violations " + std::to_string(violations) + ", near energy exponent " +
                    fmt(fit.exponent, 3));
    }
    print(6, "energy hierarchy", v);
  }

  // 7. quadratic scaling in epsilon
  {
    Verdict v;
    if (ok(nl) && ok(half)) {
      for (const Norm& q : kNorms) {
        const double a = max_of(column(nl.artifacts.norms, q.field));
        const double b = max_of(column(half.artifacts.norms, q.field));
        if (a == 0.0 && b == 0.0) continue;
        const double ratio = b > 0.0 ? a / b : INFINITY;
        v.require(std::abs(ratio - 2.0) <= 0.1, std::string(q.name) + " ratio " + fmt(ratio, 5));
      }
      const double e_ratio = half.artifacts.e0 > 0.0 ? nl.artifacts.e0 / half.artifacts.e0 : INFINITY;
      v.require(std::abs(e_ratio - 4.0) <= 0.32, "E0 ratio " + fmt(e_ratio, 5));
    } else {
      v.require(false, "scaling runs did not complete");
    }
    print(7, "amplitude scaling", v);
  }

  // 8. Couch-Torrence audit
  {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const CtAuditReport rep = ct_audit(params);
    const double wall = elapsed_since(t0);
    v.require(rep.involution_pass, "involution " + fmt(rep.involution_exact_error, 2) + " / " +
                                       fmt(rep.involution_resampled_error, 2));
    v.require(rep.weight_pass, "weight identity " + fmt(rep.weight.max_relative_error, 2));
    v.require(rep.conformal_pass, "conformal order " + fmt(rep.conformal.min_order(), 3));
    v.require(rep.nullform_pass, "null-form order " + fmt(rep.nullform.min_order(), 3));
    v.require(wall < 60.0, "runtime " + fmt(wall, 2) + " s");
    print(8, "Couch-Torrence audit", v);
  }

  // 9. breakdown monitor
  {
    Verdict v;
    for (const NamedRun& r : runs) {
      const auto& a = r.artifacts;
      const double worst = std::max({max_of(column(a.norms, &SlabNorms::t_psi)) / a.thresholds.t_psi,
                                     max_of(column(a.norms, &SlabNorms::sqrt_d_y_psi)) / a.thresholds.sqrt_d_y_psi,
                                     max_of(column(a.norms, &SlabNorms::ang_grad)) / a.thresholds.ang_grad});
      v.require(ok(r) && !a.breakdown && worst < 1.0, r.name + " " + to_string(a.status) + ", peak/threshold " + fmt(worst, 3));
    }
    const int code = cli_exit_code("spike.ini", out / "spike");
    v.require(code == 2, "spike run exit code " + std::to_string(code));
    print(9, "breakdown monitor", v);
  }

  // 10. Hardy ratio
  {
    Verdict v;
    for (const NamedRun& r : runs) {
      double worst = 0.0;
      for (const auto& rec : r.artifacts.energy) worst = std::max(worst, rec.hardy_ratio);
      v.require(ok(r) && worst <= kHardyBound, r.name + " max " + fmt(worst, 3));
    }
    GridSpec spec = ang.config.grid;
    spec.split_radius = ang.config.split_radius;
    const Discretization disc(ang.config.spacetime, spec);
    FieldState s = ang.artifacts.final_state;
    const double base = hardy_ratio(s, disc);
    double worst_rel = 0.0;
    for (double lambda : {1e-3, 37.0}) {
      FieldState scaled = s;
      scaled.psi *= lambda;
      scaled.pi *= lambda;
      scaled.phi *= lambda;
      worst_rel = std::max(worst_rel, std::abs(hardy_ratio(scaled, disc) - base) / base);
    }
    v.require(base > 0.0 && worst_rel <= 1e-12, "scaling deviation " + fmt(worst_rel, 2));
    print(10, "Hardy ratio", v);
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
