#include "xrn/config.hpp"
#include "xrn/converge.hpp"
#include "xrn/couch_torrence.hpp"
#include "xrn/run.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

void write_json(const fs::path& path, const nlohmann::json& j) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

xrn::RunConfig load(const std::string& path) {
  return path.empty() ? xrn::RunConfig{} : xrn::parse_config(path);
}

int cmd_run(const std::string& config_path, const fs::path& out) {
  const auto config = load(config_path);
  const auto res = xrn::run(config, out);
  const auto& m = res.manifest;
  std::cout << "status " << xrn::to_string(m.status) << "  steps " << m.steps << "  wall " << m.wall_time_s << " s\n";
  if (!m.message.empty()) std::cout << m.message << '\n';
  std::cout << "outputs in " << out.string() << '\n';
  return xrn::exit_code(m.status);
}

int cmd_converge(const std::string& config_path, const fs::path& out, int workers) {
  const auto config = load(config_path);
  const auto rep = xrn::convergence_suite(config, workers);
  write_json(out / "convergence.json", xrn::to_json(rep));
  for (const auto* e : {&rep.mms_linear, &rep.mms_nonlinear, &rep.h0_drift, &rep.h0_error, &rep.self_difference}) {
    std::cout << e->quantity << ": min order " << e->min_order() << " (" << e->regime << ")\n";
  }
  for (const auto& f : rep.failures) std::cerr << f << '\n';
  return rep.failures.empty() ? 0 : xrn::exit_code(xrn::ExitStatus::numerical_failure);
}

int cmd_ct_audit(const std::string& config_path, const fs::path& out) {
  const auto config = load(config_path);
  const auto rep = xrn::ct_audit(config.spacetime);
  write_json(out / "ct_audit.json", xrn::to_json(rep));
  std::cout << "involution " << (rep.involution_pass ? "pass" : "FAIL") << "  weight identity "
            << (rep.weight_pass ? "pass" : "FAIL") << "  conformal order " << rep.conformal.min_order()
            << "  null-form order " << rep.nullform.min_order() << '\n';
  return rep.pass() ? 0 : 1;
}

int cmd_report(const fs::path& out) {
  std::cout << xrn::write_report(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear waves on extremal Reissner-Nordstrom: evolution, convergence and chart audits"};
  app.set_version_flag("--version", xrn::code_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string out = "out";
  int workers = 1;
  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", config_path, "configuration file (INI)")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--workers", workers, "parallel independent runs")->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto* run = app.add_subcommand("run", "evolve one configuration and write traces");
  add_common(run, true);
  auto* converge = app.add_subcommand("converge", "convergence orders under grid refinement");
  add_common(converge, true);
  auto* audit = app.add_subcommand("ct-audit", "Couch-Torrence identity audit (JSON)");
  add_common(audit, true);
  auto* report = app.add_subcommand("report", "markdown summary of a run directory");
  add_common(report, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path, out);
    if (*converge) return cmd_converge(config_path, out, workers);
    if (*audit) return cmd_ct_audit(config_path, out);
    if (*report) return cmd_report(out);
  } catch (const xrn::ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "config: " << msg << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
