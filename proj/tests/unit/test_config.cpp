#include "xrn/config.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace xrn;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(), [&](const auto& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("minimal config takes the defaults") {
  const RunConfig c = parse_config_text("[spacetime]\nmass = 1\n");
  CHECK(c == RunConfig{});
  CHECK(validate(c).empty());
  CHECK(parse_config_text("") == RunConfig{});
}

TEST_CASE("split radius inside the photon sphere is rejected") {
  const auto errors = errors_of("[foliation]\nsplit_radius = 1.5\n");
  REQUIRE_FALSE(errors.empty());
  CHECK(mentions(errors, "photon-sphere constraint violated"));
  CHECK(mentions(errors, "2M"));
}

TEST_CASE("negative amplitude is rejected") {
  CHECK(mentions(errors_of("[evolution]\nepsilon = -0.1\n"), "epsilon"));
}

TEST_CASE("unknown keys and sections are errors, and all errors are reported") {
  const auto errors = errors_of("[grid]\nn_r = 10\nbogus = 3\n[nowhere]\nx = 1\n[evolution]\ncfl = abc\n");
  CHECK(mentions(errors, "bogus"));
  CHECK(mentions(errors, "nowhere"));
  CHECK(mentions(errors, "cfl"));
  CHECK(mentions(errors, "n_r"));
  CHECK(errors.size() >= 4);
}

TEST_CASE("missing file") {
  CHECK_THROWS(parse_config("/nonexistent/config.ini"));
}

TEST_CASE("serialize round trip") {
  const std::string text = R"([spacetime]
mass = 2
[foliation]
split_radius = 9
[grid]
n_r = 321
r_max = 150.5
n_theta = 8
stretching = horizon_geometric
min_spacing = 0.003
growth = 0.04
refinement = 2
[evolution]
cfl = 0.35
epsilon = 0.0123456789012345678
t_end = 50
output_every = 0.25
coupling = table
coupling_table = -1:0.5, 0:1, 1:0.25
[data]
f_center = 3
f_width = 1.25
f_modes = 1, 0.1, 0.01
g_modes =
[fault]
spike_at = 3
[converge]
levels = 4
mms_amplitude = 0.5
)";
  const RunConfig a = parse_config_text(text);
  CHECK(a.spacetime.mass() == 2.0);
  CHECK(a.grid.refinement == 2);
  CHECK(a.evolution.coupling.table.size() == 3);
  CHECK(a.data.f.modes.size() == 3);
  const RunConfig b = parse_config_text(serialize(a));
  CHECK(a == b);
  CHECK(serialize(a) == serialize(b));
  CHECK(config_hash(a) == config_hash(b));
  RunConfig c = b;
  c.evolution.epsilon *= 1.0 + 1e-15;
  CHECK(config_hash(c) != config_hash(a));
  CHECK(hash_hex(config_hash(a)).size() == 16);
}

TEST_CASE("shipped configs are valid") {
  for (const auto& entry : std::filesystem::directory_iterator(XRN_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_config(entry.path().string()));
  }
}
