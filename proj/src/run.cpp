#include "xrn/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#ifndef XRN_VERSION
#define XRN_VERSION "0.0.0"
#endif

namespace xrn {

namespace fs = std::filesystem;

std::string code_version() { return XRN_VERSION; }

int exit_code(ExitStatus s) { return static_cast<int>(s); }

nlohmann::json to_json(const RunManifest& m) {
  using nlohmann::json;
  const auto& e = m.evolution;
  json j{
      {"config_hash", m.config_hash},
      {"code_version", m.code_version},
      {"grid",
       {{"n_r", m.grid.n_r},
        {"nodes", m.grid.node_count()},
        {"r_max_M", m.grid.r_max},
        {"n_theta", m.grid.n_theta},
        {"stretching", to_string(m.grid.stretching)},
        {"min_spacing_M", m.grid.min_spacing},
        {"growth", m.grid.growth},
        {"refinement", m.grid.refinement}}},
      {"evolution",
       {{"cfl", e.cfl},
        {"dissipation", e.dissipation},
        {"constraint_damping", e.constraint_damping},
        {"epsilon", e.epsilon},
        {"t_end_M", e.t_end},
        {"output_every_M", e.output_every},
        {"coupling", to_string(e.coupling.kind)},
        {"coupling_bound", e.coupling.bound},
        {"dt_M", m.dt},
        {"steps", m.steps}}},
      {"wall_time_s", m.wall_time_s},
      {"exit_status", to_string(m.status)},
      {"exit_code", exit_code(m.status)},
      {"message", m.message},
      {"e0", m.e0},
      {"thresholds",
       {{"T_psi", m.thresholds.t_psi}, {"sqrtD_Y_psi", m.thresholds.sqrt_d_y_psi}, {"ang_grad_psi", m.thresholds.ang_grad}}},
      {"outputs", m.outputs},
  };
  if (m.breakdown) {
    j["breakdown"] = {{"t_star_M", m.breakdown->t_star},
                      {"norm", m.breakdown->norm},
                      {"value", m.breakdown->value},
                      {"threshold", m.breakdown->threshold}};
  }
  return j;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void row(std::ostream& os, std::initializer_list<double> values) {
  char buf[32];
  bool first = true;
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << (first ? "" : ",") << buf;
    first = false;
  }
  os << '\n';
}

}  // namespace

void write_horizon_csv(const fs::path& path, const std::vector<HorizonTrace>& traces) {
  auto os = open_out(path);
  os << "t_star_M,v_M,psi0,y_psi0_per_M,yy_psi0_per_M2,h0_per_M\n";
  for (const auto& h : traces) row(os, {h.t_star, h.v, h.psi0, h.y_psi0, h.yy_psi0, h.h0});
}

void write_energy_csv(const fs::path& path, const std::vector<EnergyRecord>& records) {
  auto os = open_out(path);
  os << "t_star_M,e_t_M,e_p_M,e_n_M,e_t_near_M,e_rp1,e_rp2_M,morawetz_increment_M2,hardy_ratio\n";
  for (const auto& e : records) {
    row(os, {e.t_star, e.e_t, e.e_p, e.e_n, e.e_t_near, e.e_rp1, e.e_rp2, e.morawetz_increment, e.hardy_ratio});
  }
}

void write_norms_csv(const fs::path& path, const std::vector<NormRecord>& norms) {
  auto os = open_out(path);
  os << "t_star_M,psi_sup,t_psi_sup_per_M,sqrt_d_y_psi_sup_per_M,ang_grad_sup_per_M\n";
  for (const auto& n : norms) row(os, {n.t_star, n.norms.psi, n.norms.t_psi, n.norms.sqrt_d_y_psi, n.norms.ang_grad});
}

RunResult run(const RunConfig& config, const fs::path& out_dir) {
  if (auto errors = validate(config); !errors.empty()) throw ConfigError(std::move(errors));
  fs::create_directories(out_dir);
  RunResult res;
  RunManifest& man = res.manifest;
  man.config_hash = hash_hex(config_hash(config));
  man.code_version = code_version();
  man.grid = config.grid;
  man.evolution = config.evolution;

  {
    auto os = open_out(out_dir / "config.ini");
    os << serialize(config);
  }
  man.outputs.push_back("config.ini");

  const auto start = std::chrono::steady_clock::now();
  GridSpec spec = config.grid;
  spec.split_radius = config.split_radius;
  const Discretization disc(config.spacetime, spec);

  EvolveHooks hooks;
  hooks.fault = config.fault;
  int snapshot_index = 0;
  std::string grid_json;
  if (config.evolution.snapshot_every > 0.0) {
    fs::create_directories(out_dir / "snapshots");
    grid_json = nlohmann::json{{"stretching", to_string(spec.stretching)},
                                                 {"r_max_M", spec.r_max},
                                                 {"config_hash", man.config_hash}}
                                      .dump();
    hooks.on_snapshot = [&](const FieldState& s) {
      char name[40];
      std::snprintf(name, sizeof name, "snapshots/snapshot_%06d.csv", snapshot_index++);
      write_snapshot((out_dir / name).string(), s, disc.grid(), disc.basis(), grid_json);
      man.outputs.emplace_back(name);
    };
  }
  res.artifacts = evolve(disc, config.evolution, config.data, config.split_radius, hooks);
  const RunArtifacts& a = res.artifacts;

  write_horizon_csv(out_dir / "horizon_trace.csv", a.horizon);
  write_energy_csv(out_dir / "energy.csv", a.energy);
  write_norms_csv(out_dir / "norms.csv", a.norms);
  man.outputs.insert(man.outputs.end(), {"horizon_trace.csv", "energy.csv", "norms.csv", "manifest.json"});

  man.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  man.status = a.status;
  man.message = a.message;
  man.dt = a.dt;
  man.steps = a.steps;
  man.e0 = a.e0;
  man.breakdown = a.breakdown;
  man.thresholds = a.thresholds;
  auto os = open_out(out_dir / "manifest.json");
  os << to_json(man).dump(2) << '\n';
  return res;
}

// --- report ---------------------------------------------------------------------

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
  }
  throw std::out_of_range("csv column '" + name + "' not found");
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable t;
  std::string line, cell;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  std::istringstream head(line);
  while (std::getline(head, cell, ',')) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::vector<double> r;
    while (std::getline(rs, cell, ',')) r.push_back(std::stod(cell));
    if (r.size() != t.columns.size()) throw std::runtime_error(path.string() + ": ragged row");
    t.rows.push_back(std::move(r));
  }
  return t;
}

namespace {

std::string num(double v, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

std::string write_report(const fs::path& dir) {
  const CsvTable horizon = read_csv(dir / "horizon_trace.csv");
  const CsvTable energy = read_csv(dir / "energy.csv");
  const CsvTable norms = read_csv(dir / "norms.csv");
  std::ostringstream md;
  md << "# Run summary\n\n";
  if (fs::exists(dir / "manifest.json")) {
    std::ifstream in(dir / "manifest.json");
    const auto man = nlohmann::json::parse(in);
    md << "- config hash: `" << man.value("config_hash", "") << "`\n";
    md << "- exit status: " << man.value("exit_status", "") << " (" << man.value("exit_code", -1) << ")\n";
    if (!man.value("message", "").empty()) md << "- message: " << man.value("message", "") << "\n";
    md << "- E0: " << num(man.value("e0", 0.0)) << "\n";
  }
  const double mass = [&] {
    if (!fs::exists(dir / "config.ini")) return 1.0;
    try {
      return parse_config((dir / "config.ini").string()).spacetime.mass();
    } catch (const std::exception&) {
      return 1.0;
    }
  }();

  std::vector<HorizonTrace> traces;
  {
    const auto t = horizon.column("t_star_M"), v = horizon.column("v_M"), p = horizon.column("psi0"),
               y = horizon.column("y_psi0_per_M"), yy = horizon.column("yy_psi0_per_M2"), h = horizon.column("h0_per_M");
    for (std::size_t i = 0; i < t.size(); ++i) traces.push_back({t[i], v[i], p[i], y[i], yy[i], h[i]});
  }
  md << "\n## Horizon\n\n";
  if (traces.size() >= 4) {
    const InstabilityReport ir = instability_report(traces, mass);
    double drift = 0.0;
    for (const auto& tr : traces) {
      if (traces.front().h0 != 0.0) drift = std::max(drift, std::abs(tr.h0 - traces.front().h0) / std::abs(traces.front().h0));
    }
    md << "| H0 | max relative drift | final Y psi0 | gap to H0 | Y^2 psi0 slope | R^2 |\n|---|---|---|---|---|---|\n";
    md << "| " << num(ir.h0, 6) << " | " << num(drift, 3) << " | " << num(ir.final_y_psi0, 6) << " | "
       << num(ir.non_decay_gap, 3) << " | " << num(ir.yy_fit.slope, 4) << " | " << num(ir.yy_fit.r_squared, 4)
       << " |\n";
    if (!ir.note.empty()) md << "\n" << ir.note << "\n";
  } else {
    md << "too few samples\n";
  }

  md << "\n## Decay over the final decade\n\n";
  const auto t = norms.column("t_star_M");
  const double t_end = t.empty() ? 0.0 : t.back();
  const double t_begin = (1.0 + t_end) / 10.0 - 1.0;
  md << "| quantity | exponent | stderr | R^2 | window |\n|---|---|---|---|---|\n";
  auto fit_line = [&](const std::string& name, const std::vector<double>& tt, const std::vector<double>& values) {
    md << "| " << name << " | ";
    if (std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; })) {
      md << "0 | | | identically zero |\n";
      return;
    }
    try {
      const RateFit f = decay_fit(tt, values, t_begin, t_end);
      md << num(f.exponent) << " | " << num(f.exponent_stderr, 2) << " | " << num(f.r_squared) << " | ["
         << num(f.t_begin) << ", " << num(f.t_end) << "] |\n";
    } catch (const std::exception& e) {
      md << "n/a | | | " << e.what() << " |\n";
    }
  };
  for (const char* name : {"psi_sup", "t_psi_sup_per_M", "sqrt_d_y_psi_sup_per_M", "ang_grad_sup_per_M"}) {
    fit_line(name, t, norms.column(name));
  }
  fit_line("e_t_near_M", energy.column("t_star_M"), energy.column("e_t_near_M"));

  md << "\n## Energies\n\n";
  const auto et = energy.column("e_t_M"), ep = energy.column("e_p_M"), en = energy.column("e_n_M"),
             hardy = energy.column("hardy_ratio");
  bool ordered = true;
  for (std::size_t i = 0; i < et.size(); ++i) ordered = ordered && et[i] <= ep[i] && ep[i] <= en[i];
  double hmax = 0.0;
  for (double h : hardy) hmax = std::max(hmax, h);
  md << "- E_T <= E_P <= E_N on every slice: " << (ordered ? "yes" : "no") << "\n";
  md << "- largest Hardy ratio: " << num(hmax) << "\n";

  const std::string text = md.str();
  auto os = open_out(dir / "summary.md");
  os << text;
  return text;
}

}  // namespace xrn
