#include "xrn/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace xrn {

namespace pt = boost::property_tree;

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::invalid_argument([&] {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("'" + text + "' is not a number");
  }
  return v;
}

int to_int(const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("'" + text + "' is not an integer");
  }
  return v;
}

std::vector<double> to_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item));
  return out;
}

std::vector<std::pair<double, double>> to_table(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const auto& row : split(text, ',')) {
    const auto parts = split(row, ':');
    if (parts.size() != 2) throw std::invalid_argument("table row '" + row + "' is not psi:A");
    out.emplace_back(to_double(parts[0]), to_double(parts[1]));
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"spacetime", {{"mass", [](RunConfig& c, const std::string& v) { c.spacetime = SpacetimeParams(to_double(v)); }}}},
      {"foliation", {{"split_radius", [](RunConfig& c, const std::string& v) { c.split_radius = to_double(v); }}}},
      {"grid",
       {{"n_r", [](RunConfig& c, const std::string& v) { c.grid.n_r = to_int(v); }},
        {"r_max", [](RunConfig& c, const std::string& v) { c.grid.r_max = to_double(v); }},
        {"n_theta", [](RunConfig& c, const std::string& v) { c.grid.n_theta = to_int(v); }},
        {"stretching", [](RunConfig& c, const std::string& v) { c.grid.stretching = parse_stretching(trim(v)); }},
        {"min_spacing", [](RunConfig& c, const std::string& v) { c.grid.min_spacing = to_double(v); }},
        {"growth", [](RunConfig& c, const std::string& v) { c.grid.growth = to_double(v); }},
        {"refinement", [](RunConfig& c, const std::string& v) { c.grid.refinement = to_int(v); }}}},
      {"evolution",
       {{"cfl", [](RunConfig& c, const std::string& v) { c.evolution.cfl = to_double(v); }},
        {"dissipation", [](RunConfig& c, const std::string& v) { c.evolution.dissipation = to_double(v); }},
        {"constraint_damping", [](RunConfig& c, const std::string& v) { c.evolution.constraint_damping = to_double(v); }},
        {"epsilon", [](RunConfig& c, const std::string& v) { c.evolution.epsilon = to_double(v); }},
        {"t_end", [](RunConfig& c, const std::string& v) { c.evolution.t_end = to_double(v); }},
        {"output_every", [](RunConfig& c, const std::string& v) { c.evolution.output_every = to_double(v); }},
        {"snapshot_every", [](RunConfig& c, const std::string& v) { c.evolution.snapshot_every = to_double(v); }},
        {"threshold_factor", [](RunConfig& c, const std::string& v) { c.evolution.threshold_factor = to_double(v); }},
        {"coupling", [](RunConfig& c, const std::string& v) { c.evolution.coupling.kind = parse_coupling_kind(trim(v)); }},
        {"coupling_bound", [](RunConfig& c, const std::string& v) { c.evolution.coupling.bound = to_double(v); }},
        {"coupling_table", [](RunConfig& c, const std::string& v) { c.evolution.coupling.table = to_table(v); }}}},
      {"data",
       {{"f_center", [](RunConfig& c, const std::string& v) { c.data.f.center = to_double(v); }},
        {"f_width", [](RunConfig& c, const std::string& v) { c.data.f.width = to_double(v); }},
        {"f_modes", [](RunConfig& c, const std::string& v) { c.data.f.modes = to_list(v); }},
        {"g_center", [](RunConfig& c, const std::string& v) { c.data.g.center = to_double(v); }},
        {"g_width", [](RunConfig& c, const std::string& v) { c.data.g.width = to_double(v); }},
        {"g_modes", [](RunConfig& c, const std::string& v) { c.data.g.modes = to_list(v); }}}},
      {"fault",
       {{"spike_at", [](RunConfig& c, const std::string& v) { c.fault.spike_at = to_double(v); }},
        {"nan_at", [](RunConfig& c, const std::string& v) { c.fault.nan_at = to_double(v); }}}},
      {"converge",
       {{"levels", [](RunConfig& c, const std::string& v) { c.converge.levels = to_int(v); }},
        {"mms_amplitude", [](RunConfig& c, const std::string& v) { c.converge.mms_amplitude = to_double(v); }}}},
  };
  return s;
}

template <typename F>
void collect(std::vector<std::string>& errors, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
}

}  // namespace

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> errors;
  const double m = c.spacetime.mass();
  collect(errors, [&] { FoliationSpec(c.split_radius, c.grid.r_max, c.spacetime); });
  collect(errors, [&] {
    GridSpec g = c.grid;
    g.split_radius = c.split_radius;
    g.validate(c.spacetime);
  });
  collect(errors, [&] { c.evolution.validate(); });
  collect(errors, [&] {
    c.data.validate(m, c.grid.r_max, std::max(c.grid.n_theta, 1) - 1);
  });
  if (!std::isfinite(c.fault.spike_at) || !std::isfinite(c.fault.nan_at)) {
    errors.emplace_back("fault times must be finite");
  }
  if (c.converge.levels < 2 || (1 << (c.converge.levels - 1)) > GridSpec::kMaxRefinement) {
    errors.emplace_back("converge.levels must lie in [2, 5]");
  }
  if (!std::isfinite(c.converge.mms_amplitude)) errors.emplace_back("converge.mms_amplitude must be finite");
  return errors;
}

RunConfig parse_config_text(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"parse error at line " + std::to_string(e.line()) + ": " + e.message()});
  }

  RunConfig c;
  std::vector<std::string> errors;
  std::vector<std::pair<std::string, const pt::ptree*>> sections;
  for (const auto& [name, sub] : tree) {
    if (sub.empty()) {
      errors.push_back("key '" + name + "' outside any section");
      continue;
    }
    sections.emplace_back(name, &sub);
  }
  std::stable_sort(sections.begin(), sections.end(),
                   [](const auto& a, const auto& b) { return a.first == "spacetime" && b.first != "spacetime"; });
  for (const auto& [name, sub] : sections) {
    const auto sec = schema().find(name);
    if (sec == schema().end()) {
      errors.push_back("unknown section [" + name + "]");
      continue;
    }
    for (const auto& [key, node] : *sub) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) {
        errors.push_back("unknown key '" + key + "' in [" + name + "]");
        continue;
      }
      try {
        setter->second(c, node.data());
      } catch (const std::exception& e) {
        errors.push_back(name + "." + key + ": " + e.what());
      }
    }
  }
  c.grid.split_radius = c.split_radius;
  for (auto& e : validate(c)) errors.push_back(std::move(e));
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  const auto& e = c.evolution;
  os << "[spacetime]\nmass = " << fmt(c.spacetime.mass()) << "\n\n";
  os << "[foliation]\nsplit_radius = " << fmt(c.split_radius) << "\n\n";
  os << "[grid]\nn_r = " << c.grid.n_r << "\nr_max = " << fmt(c.grid.r_max) << "\nn_theta = " << c.grid.n_theta
     << "\nstretching = " << to_string(c.grid.stretching) << "\nmin_spacing = " << fmt(c.grid.min_spacing)
     << "\ngrowth = " << fmt(c.grid.growth) << "\nrefinement = " << c.grid.refinement << "\n\n";
  os << "[evolution]\ncfl = " << fmt(e.cfl) << "\ndissipation = " << fmt(e.dissipation)
     << "\nconstraint_damping = " << fmt(e.constraint_damping) << "\nepsilon = " << fmt(e.epsilon)
     << "\nt_end = " << fmt(e.t_end) << "\noutput_every = " << fmt(e.output_every)
     << "\nsnapshot_every = " << fmt(e.snapshot_every) << "\nthreshold_factor = " << fmt(e.threshold_factor)
     << "\ncoupling = " << to_string(e.coupling.kind) << "\ncoupling_bound = " << fmt(e.coupling.bound);
  if (!e.coupling.table.empty()) {
    os << "\ncoupling_table = ";
    for (std::size_t i = 0; i < e.coupling.table.size(); ++i) {
      os << (i ? ", " : "") << fmt(e.coupling.table[i].first) << ":" << fmt(e.coupling.table[i].second);
    }
  }
  os << "\n\n";
  os << "[data]\nf_center = " << fmt(c.data.f.center) << "\nf_width = " << fmt(c.data.f.width)
     << "\nf_modes = " << fmt_list(c.data.f.modes) << "\ng_center = " << fmt(c.data.g.center)
     << "\ng_width = " << fmt(c.data.g.width) << "\ng_modes = " << fmt_list(c.data.g.modes) << "\n\n";
  os << "[fault]\nspike_at = " << fmt(c.fault.spike_at) << "\nnan_at = " << fmt(c.fault.nan_at) << "\n\n";
  os << "[converge]\nlevels = " << c.converge.levels << "\nmms_amplitude = " << fmt(c.converge.mms_amplitude) << "\n";
  return os.str();
}

std::uint64_t config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace xrn
