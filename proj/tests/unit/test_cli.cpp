#include <doctest.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "ramem/error.hpp"

using namespace ramem;
using namespace ramem::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ramem_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "ramem");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int exit_status(const std::string& args) {
  const std::string cmd = std::string(RAMEM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

const char* kFlatUnitConfig = R"({
  "window": {"t0": 0, "t1": 1},
  "physical": {"g_write": 1.0, "g_read": 1.0},
  "signal": {"kind": "flat", "start": 0, "duration": 1},
  "write": {"kind": "square"},
  "read": {"kind": "square"},
  "grid": {"n_z": 256, "n_p": 256}
})";

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = parse_config("{}", Command::simulate);
  CHECK(c.command == Command::simulate);
  CHECK(c.window.t0 == -3.0);
  CHECK(c.window.t1 == 3.0);
  CHECK(c.grid.n_z == 512);
  CHECK(c.grid.n_p == 512);
  CHECK(c.mode == Mode::ideal_bright);
  CHECK(c.direction == Direction::backward);
  CHECK(c.physical.d == 400.0);
  CHECK(c.physical.delta_s == 20.0);
  CHECK(c.physical.delta_hf == 100.0);
  CHECK(c.write.kind == WaveformKind::gaussian);
  CHECK(c.write.gaussian.tau == doctest::Approx(1.0));
  CHECK(c.optimize.config.population == 24);
  CHECK(c.optimize.config.bounds.size() == 2);
  CHECK(c.output_dir == "out");
}

TEST_CASE("strict keys and value checks name the offending field") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text, Command::simulate);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ValidationError);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(R"({"gird": {}})").find("gird") != std::string::npos);
  CHECK(message(R"({"physical": {"dd": 3}})").find("physical.dd") != std::string::npos);
  CHECK(message(R"({"physical": {"d": "big"}})").find("physical.d") != std::string::npos);
  CHECK(message(R"({"grid": {"n_z": 8}})").find("grid.n_z") != std::string::npos);
  CHECK(message(R"({"mode": "quantum"})").find("mode") != std::string::npos);
  CHECK(message(R"({"physical": {"g_write": 1, "w_write": 2}})").find("g_write") !=
        std::string::npos);
  CHECK(message(R"({"physical": {"delta_s": -60}})").find("physical") != std::string::npos);
  CHECK(message(R"({"de": {"population": 2}})").find("de") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
  const std::string text = "{\n  \"grid\": {\n    \"n_z\": 64,,\n  }\n}";
  try {
    parse_config(text, Command::simulate);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).rfind("line 3, column 15:", 0) == 0);
  }
}

TEST_CASE("g keys set the stage energies") {
  const RunConfig c = parse_config(R"({"physical": {"g_write": 2.0}})", Command::simulate);
  CHECK(derive_couplings(c.physical, c.physical.w_write).g == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.physical.w_read == 1.0);
}

TEST_CASE("sweep plan") {
  const RunConfig c = parse_config(
      R"({"sweep": {"parameter": "physical.w_write", "values": [0.5, 1, 2]}})", Command::sweep);
  const auto plan = sweep_plan(c);
  REQUIRE(plan.size() == 3);
  CHECK(plan[0].physical.w_write == 0.5);
  CHECK(plan[2].physical.w_write == 2.0);
  CHECK(plan[1].physical.d == c.physical.d);

  CHECK(code_of([] { parse_config(R"({"sweep": {"values": [1]}})", Command::sweep); }) ==
        ErrorCode::ValidationError);
  CHECK(code_of([] {
          parse_config(R"({"sweep": {"parameter": "physical.nothing", "values": [1]}})",
                       Command::sweep);
        }) == ErrorCode::ValidationError);
}

TEST_CASE("command-line overrides") {
  RunConfig c = parse_config("{}", Command::simulate);
  apply_overrides(c, {std::string("elsewhere"), 9u, GridSpec{64, 128}, Mode::full_fwm});
  CHECK(c.output_dir == "elsewhere");
  CHECK(c.seed == 9u);
  CHECK(c.optimize.config.seed == 9u);
  CHECK(c.grid.n_z == 64);
  CHECK(c.grid.n_p == 128);
  CHECK(c.mode == Mode::full_fwm);
  CHECK(parse_grid("32x48").n_p == 48);
  CHECK(code_of([] { parse_grid("32by48"); }) == ErrorCode::ValidationError);
  CHECK(parse_mode("fwm") == Mode::full_fwm);
}

TEST_CASE("numbers in CSV round-trip exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(u(rng), int(u(rng) * 20));
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  const fs::path dir = scratch("csv");
  write_csv(dir / "t.csv", {"a", "b"}, {{0.1, 1.0 / 3.0}});
  CHECK(read_file(dir / "t.csv") == "a,b\n0.10000000000000001,0.33333333333333331\n");
}

TEST_CASE("simulate writes result.json and field tables") {
  const fs::path dir = scratch("simulate");
  const fs::path cfg = write_file(dir / "c.json", kFlatUnitConfig);
  const CliRun r = run({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  const auto doc = nlohmann::json::parse(read_file(dir / "out" / "result.json"));
  CHECK(doc["schema_version"] == kSchemaVersion);
  for (const char* key : {"command", "mode", "direction", "grid", "physical", "couplings", "result"}) {
    CHECK(doc.contains(key));
  }
  for (const char* key : {"eta_w", "eta_r", "eta_total", "epsilon", "n_in", "n_r", "n_a", "mu1"}) {
    CHECK(doc["result"].contains(key));
  }
  CHECK(doc["result"]["eta_w"].get<double>() == doctest::Approx(0.61726141513332786561).epsilon(1e-4));
  const std::string fields = read_file(dir / "out" / "fields.csv");
  CHECK(fields.rfind("z,p,abs_s,abs_as,abs_aa\n", 0) == 0);
  CHECK(std::count(fields.begin(), fields.end(), '\n') == 256 * 256 + 1);
}

TEST_CASE("optimize is reproducible for a fixed seed") {
  const fs::path dir = scratch("optimize");
  const fs::path cfg = write_file(dir / "c.json", R"({
    "grid": {"n_z": 48, "n_p": 48},
    "de": {"population": 8, "generations": 4}
  })");
  std::string traces[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("run" + std::to_string(i));
    const CliRun r = run({"optimize", "--config", cfg.string(), "--out", out.string(), "--seed", "7"});
    REQUIRE(r.code == 0);
    traces[i] = read_file(out / "de_trace.csv");
    const std::string wave = read_file(out / "best_waveform.csv");
    CHECK(std::count(wave.begin(), wave.end(), '\n') == 1002);
  }
  CHECK(traces[0].rfind("generation,best_eta,best_epsilon,mean_eta\n", 0) == 0);
  CHECK(traces[0] == traces[1]);
}

TEST_CASE("sweep and hankel outputs") {
  const fs::path dir = scratch("sweep");
  const fs::path cfg = write_file(dir / "c.json", R"({
    "grid": {"n_z": 48, "n_p": 48},
    "n_a0": 0.5,
    "sweep": {"parameter": "physical.w_write", "values": [0.5, 2]}
  })");
  REQUIRE(run({"sweep", "--config", cfg.string(), "--out", dir.string()}).code == 0);
  const std::string table = read_file(dir / "sweep.csv");
  CHECK(table.rfind("axis,eta,epsilon,n_a\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);

  const fs::path hcfg = write_file(dir / "h.json", R"({"grid": {"n_z": 64, "n_p": 64},
                                                        "hankel": {"g": 1.5, "k_points": 11}})");
  REQUIRE(run({"hankel", "--config", hcfg.string(), "--out", dir.string()}).code == 0);
  const auto diff = nlohmann::json::parse(read_file(dir / "oracle_diff.json"));
  CHECK(diff["hankel"]["rel_l2_s"].get<double>() < 1e-3);
  const std::string spectrum = read_file(dir / "spectrum.csv");
  CHECK(std::count(spectrum.begin(), spectrum.end(), '\n') == 12);
}

TEST_CASE("exit codes and error lines") {
  const fs::path dir = scratch("exit");
  const fs::path good = write_file(dir / "good.json", R"({"grid": {"n_z": 32, "n_p": 32}})");
  const fs::path unknown = write_file(dir / "unknown.json", R"({"gird": {}})");
  const fs::path broken = write_file(dir / "broken.json", "{\"grid\": ");
  // Far too coarse for this coupling: the marching diverges.
  const fs::path coarse = write_file(dir / "coarse.json", R"({
    "grid": {"n_z": 32, "n_p": 32},
    "physical": {"g_write": 50}
  })");

  CHECK(exit_status("simulate --config " + good.string() + " --out " + (dir / "o").string()) == 0);
  CHECK(exit_status("simulate --config " + unknown.string()) == 2);
  CHECK(exit_status("simulate --config " + broken.string()) == 2);
  CHECK(exit_status("simulate --config " + (dir / "missing.json").string()) == 2);
  CHECK(exit_status("simulate") == 2);
  CHECK(exit_status("teleport --config " + good.string()) == 2);
  CHECK(exit_status("simulate --config " + coarse.string() + " --out " + (dir / "o").string()) == 3);

  const CliRun r = run({"simulate", "--config", unknown.string()});
  CHECK(r.code == 2);
  CHECK(r.err == "error: ValidationError: gird: unknown key\n");
}
