#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "dmnls/config.hpp"
#include "dmnls/io.hpp"
#include "dmnls/spectral.hpp"
#include "gen.hpp"

using namespace dmnls;

namespace {

const char* kBlowup = R"(
preset = "blowup_dichotomy"
t_final = 20.0

[model]
dimension = 1
power = 10.0
sign = "focusing"

[grid]
points = 1024
length = 256.0

[stepper]
dt = 1e-3
adaptive = true
tol = 1e-9

[initial_data]
kind = "gaussian"
amplitude = 1.0
width = 1.0

[checks]
lambda_small = 0.5
lambda_large = 4.0
)";

std::string errors_of(const std::string& text) {
  try {
    parse_config_string(text, "cfg.toml");
  } catch (const ConfigError& e) {
    std::string all;
    for (const auto& s : e.errors()) all += s + "\n";
    return all;
  }
  return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dmnls_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("parse a complete config") {
  auto cfg = parse_config_string(kBlowup);
  CHECK(cfg.preset == Preset::blowup_dichotomy);
  CHECK(cfg.power == 10.0);
  CHECK(cfg.sign == NonlinearitySign::focusing);
  CHECK(cfg.points == 1024);
  CHECK(cfg.stepper.adaptive);
  CHECK(cfg.stepper.tol == 1e-9);
  CHECK(cfg.checks.lambda_large == 4.0);
  CHECK(cfg.t_final == 20.0);
  CHECK(cfg.model().sigma.size() == 16);
  CHECK(cfg.make_grid()->box_length() == 256.0);
}

TEST_CASE("serialization round-trips") {
  auto cfg = parse_config_string(kBlowup);
  const std::string text = serialize(cfg);
  auto again = parse_config_string(text);
  CHECK(again == cfg);
  CHECK(serialize(again) == text);
  CHECK(again.hash() == cfg.hash());
  cfg.stepper.tol = 2e-9;
  CHECK(cfg.hash() != again.hash());
}

TEST_CASE("property: round trip over random configs") {
  testgen::Gen gen(99);
  for (int i = 0; i < 50; ++i) {
    auto cfg = parse_config_string(kBlowup);
    cfg.power = gen.uniform(8.01, 12.0);
    cfg.length = gen.uniform(10.0, 500.0);
    cfg.t_final = gen.uniform(0.1, 30.0);
    cfg.initial.amplitude = gen.uniform(0.01, 3.0);
    cfg.initial.width = gen.uniform(0.5, 4.0);
    cfg.initial.center[0] = gen.uniform(-5.0, 5.0);
    cfg.stepper.dt = gen.uniform(1e-4, 1e-2);
    cfg.checks.lambda_small = gen.uniform(0.1, 1.0);
    cfg.checks.bisection_steps = gen.integer(1, 10);
    cfg.rng_seed = static_cast<std::uint64_t>(gen.integer(0, 1 << 30));
    auto back = parse_config_string(serialize(cfg));
    CHECK(back == cfg);
  }
}

TEST_CASE("preset constraints are reported") {
  const auto text = replace(kBlowup, "power = 10.0", "power = 6.0");
  const auto errs = errors_of(text);
  CHECK(errs.find("requires p > 8") != std::string::npos);

  CHECK(errors_of(replace(kBlowup, "sign = \"focusing\"", "sign = \"defocusing\"")).find("focusing sign") !=
        std::string::npos);
}

TEST_CASE("every problem is collected with its line") {
  std::string text = replace(kBlowup, "points = 1024", "points = 1000");
  text = replace(text, "dt = 1e-3", "dt = \"fast\"");
  text += "\n[extra]\nfoo = 1\n";
  const auto errs = errors_of(text);
  CHECK(errs.find("cfg.toml:") != std::string::npos);
  CHECK(errs.find("power of two") != std::string::npos);
  CHECK(errs.find("dt must be a number") != std::string::npos);
  CHECK(errs.find("unknown key") != std::string::npos);
}

TEST_CASE("missing and malformed input") {
  CHECK(errors_of("t_final = 1.0\n").find("preset") != std::string::npos);
  CHECK(errors_of("preset = \"no_such\"\n").find("no_such") != std::string::npos);
  CHECK_FALSE(errors_of("preset = [\n").empty());
  CHECK(errors_of(replace(kBlowup, "t_final = 20.0", "")).find("t_final") != std::string::npos);
  CHECK(errors_of(replace(kBlowup, "lambda_small = 0.5", "window_lo = 0.5")).find("unknown key") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_config("/nonexistent/dir/x.toml"), ConfigError);
}

TEST_CASE("exponents_table needs no time horizon") {
  auto cfg = parse_config_string("preset = \"exponents_table\"\n[checks]\ndimensions = [1]\npowers = [3.0, 6.0]\n");
  CHECK(cfg.preset == Preset::exponents_table);
  CHECK(cfg.checks.powers.size() == 2);
}

TEST_CASE("checkpoint times") {
  auto cfg = parse_config_string(kBlowup);
  cfg.checkpoints.count = 5;
  auto t = cfg.checkpoint_times();
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 20.0);
  cfg.checkpoints.times = {2.0, 1.0, 2.0};
  t = cfg.checkpoint_times();
  CHECK(t == std::vector<double>{1.0, 2.0});
}

TEST_CASE("initial data kinds") {
  auto cfg = parse_config_string(kBlowup);
  cfg.initial.amplitude = 2.0;
  cfg.initial.center[0] = 1.0;
  auto u = cfg.initial_field();
  const auto& x = u.grid->coordinates();
  for (std::size_t i = 0; i < u.size(); i += 97)
    CHECK(std::abs(u[i] - 2.0 * std::exp(-(x[i] - 1.0) * (x[i] - 1.0))) < 1e-15);

  cfg.initial.kind = InitialData::Kind::sech;
  cfg.initial.center[0] = 0.0;
  u = cfg.initial_field();
  CHECK(std::abs(u[512] - 2.0) < 1e-15);

  cfg.initial.kind = InitialData::Kind::plane_wave;
  cfg.initial.mode = {3, 0};
  u = cfg.initial_field();
  for (const auto& z : u.values) CHECK(std::abs(std::abs(z) - 2.0) < 1e-14);

  auto dir = scratch_dir("initial");
  auto ref = cfg.initial_field();
  write_checkpoint((dir / "u0.bin").string(), ref, 0.0);
  cfg.initial.kind = InitialData::Kind::custom_file;
  cfg.initial.path = (dir / "u0.bin").string();
  CHECK(cfg.initial_field().values == ref.values);
}

TEST_CASE("checkpoint files round-trip bit for bit") {
  testgen::Gen gen(17);
  auto dir = scratch_dir("ckpt");
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, 32, 12.5);
    auto u = gen.rough_field(g);
    const auto path = (dir / ("f" + std::to_string(dim) + ".bin")).string();
    write_checkpoint(path, u, -3.25);
    auto back = read_checkpoint(path);
    CHECK(back.t == -3.25);
    CHECK(*back.field.grid == *g);
    CHECK(back.field.values == u.values);
    CHECK(std::filesystem::file_size(path) == 8 + 4 + 4 + 4 + 4 + 8 + 8 + 16 * g->size());
  }
  write_text((dir / "junk.bin").string(), "not a checkpoint at all");
  CHECK_THROWS(read_checkpoint((dir / "junk.bin").string()));
  auto g = make_grid(1, 16, 1.0);
  write_checkpoint((dir / "short.bin").string(), ComplexField(g), 0.0);
  std::string raw = read_text((dir / "short.bin").string());
  write_text((dir / "short.bin").string(), raw.substr(0, raw.size() - 8));
  CHECK_THROWS(read_checkpoint((dir / "short.bin").string()));
}

TEST_CASE("CSV formatting is lossless") {
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
  auto csv = csv_table({"a", "b"}, {{1.0, v}, {-2.5e-300, 3.0}});
  CHECK(csv.substr(0, 4) == "a,b\n");
  CHECK(csv.find("0.30000000000000004") != std::string::npos);
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("manifest JSON carries the run identity") {
  RunManifest m;
  m.config_hash = "00ff";
  m.preset = "free_sanity";
  m.status = "pass";
  m.files = {"diagnostics.csv"};
  auto j = m.to_json();
  CHECK(j["config_hash"] == "00ff");
  CHECK(j["files"].size() == 1);
  CHECK(utc_timestamp().size() == 20);
}
