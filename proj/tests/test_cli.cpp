#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "ridgebound/io.hpp"

namespace fs = std::filesystem;
using ridgebound::json;

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(RIDGEBOUND_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf;
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

fs::path fresh_dir(const std::string& tag) {
  const auto p = fs::temp_directory_path() / ("rb_cli_" + tag);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Long flag names advertised by --help (without the leading dashes).
std::set<std::string> help_flags(const std::string& subcommand) {
  const auto res = run_cli(subcommand + " --help");
  REQUIRE(res.exit_code == 0);
  std::set<std::string> flags;
  std::istringstream ss(res.output);
  std::string line;
  while (std::getline(ss, line)) {
    const auto pos = line.find("--");
    if (pos == std::string::npos) continue;
    std::string name;
    for (std::size_t i = pos + 2; i < line.size(); ++i) {
      const char ch = line[i];
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-') {
        name += ch;
      } else {
        break;
      }
    }
    if (!name.empty()) flags.insert(name);
  }
  return flags;
}

const std::string kTinySim1 =
    "--lambdas 1,20 --widths 40,80 --n 120 --train 60";

}  // namespace

TEST_CASE("cli: admissible prints the normalization and constant") {
  const auto res = run_cli("admissible --rho dgauss:1,1");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("C = 0.3989422804") != std::string::npos);
  CHECK(res.output.find("admissibility_constant") != std::string::npos);
}

TEST_CASE("cli: numerical failures exit 2, usage failures exit 1") {
  CHECK(run_cli("admissible --rho gauss:1").exit_code == 2);
  CHECK(run_cli("admissible --bogus-flag 1").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);  // missing subcommand
}

TEST_CASE("cli: every subcommand answers --help with exit 0") {
  for (const std::string sub :
       {"train", "spectrum", "admissible", "reconstruct", "plancherel", "bound",
        "sim1", "sim2", "sim3", "fig1", "sweep"}) {
    const auto res = run_cli(sub + " --help");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("--") != std::string::npos);
  }
}

TEST_CASE("cli: help lists defaults for experiment flags") {
  const auto res = run_cli("sim2 --help");
  CHECK(res.output.find("default") != std::string::npos);
  CHECK(res.output.find("--preset") != std::string::npos);
}

TEST_CASE("cli: flag/manifest key parity for every experiment subcommand") {
  const std::map<std::string, std::string> tiny_args{
      {"sim1", kTinySim1},
      {"sim2", "--lambdas 0.5,5 --sigmas 0.1 --L 50 --trials 2 --n 120 --train 60"},
      {"sim3", "--L_small 150 --L_large 60 --n 120 --train 60"},
      {"fig1", "--nets 1 --width 2 --steps 20 --n 40 --train 20 --resolution 11,11"},
      {"sweep", "--lambdas 0.5,2 --L 80 --n 120 --train 60"}};
  for (const auto& [name, args] : tiny_args) {
    const auto flags = help_flags(name);
    const auto dir = fresh_dir("parity_" + name);
    const auto res = run_cli(name + " " + args + " --out " + dir.string());
    REQUIRE(res.exit_code == 0);
    const json manifest = ridgebound::read_json_file(dir / "manifest.json");
    for (auto it = manifest.at("config").begin(); it != manifest.at("config").end(); ++it) {
      INFO(name << ": config key '" << it.key() << "' must have a matching flag");
      CHECK(flags.count(it.key()) == 1);
    }
    // conversely, every flag except the bookkeeping ones is a config key
    for (const auto& flag : flags) {
      if (flag == "out" || flag == "config" || flag == "jobs" || flag == "help") continue;
      INFO(name << ": flag '--" << flag << "' must be echoed in the manifest config");
      CHECK(manifest.at("config").contains(flag));
    }
  }
}

TEST_CASE("cli: config precedence preset < file < flags") {
  const auto dir1 = fresh_dir("prec1");
  const auto cfg_path = fs::temp_directory_path() / "rb_cli_cfg.json";
  {
    std::ofstream out(cfg_path);
    out << R"({"sigma": 0.1, "seed": 77})";
  }
  const auto res1 = run_cli("sim1 " + kTinySim1 + " --config " + cfg_path.string() +
                            " --out " + dir1.string());
  REQUIRE(res1.exit_code == 0);
  const json m1 = ridgebound::read_json_file(dir1 / "manifest.json");
  CHECK(m1["config"]["sigma"] == 0.1);  // file overrides default
  CHECK(m1["config"]["seed"] == 77);

  const auto dir2 = fresh_dir("prec2");
  const auto res2 = run_cli("sim1 " + kTinySim1 + " --config " + cfg_path.string() +
                            " --sigma 0.2 --out " + dir2.string());
  REQUIRE(res2.exit_code == 0);
  const json m2 = ridgebound::read_json_file(dir2 / "manifest.json");
  CHECK(m2["config"]["sigma"] == 0.2);  // flag overrides file

  // unknown keys in the config file are rejected
  {
    std::ofstream out(cfg_path);
    out << R"({"sigmah": 0.1})";
  }
  const auto res3 = run_cli("sim1 --config " + cfg_path.string() + " --out " +
                            fresh_dir("prec3").string());
  CHECK(res3.exit_code == 1);
  fs::remove(cfg_path);
}

TEST_CASE("cli: rerunning into a fresh directory reproduces CSV bytes") {
  const auto dir1 = fresh_dir("idem1");
  const auto dir2 = fresh_dir("idem2");
  REQUIRE(run_cli("sim1 " + kTinySim1 + " --out " + dir1.string()).exit_code == 0);
  REQUIRE(run_cli("sim1 " + kTinySim1 + " --out " + dir2.string()).exit_code == 0);
  int csvs = 0;
  for (const auto& entry : fs::directory_iterator(dir1)) {
    if (entry.path().extension() != ".csv") continue;
    ++csvs;
    CHECK(slurp(entry.path()) == slurp(dir2 / entry.path().filename()));
  }
  CHECK(csvs > 0);
}

TEST_CASE("cli: train writes the documented net serialization") {
  const auto dir = fresh_dir("train");
  const auto res = run_cli(
      "train --target sim:0.05 --lambda 20 --L 60 --n 120 --train 60 --out " +
      dir.string());
  REQUIRE(res.exit_code == 0);
  const json net = ridgebound::read_json_file(dir / "net.json");
  for (const std::string key : {"seed", "domain", "activation", "a", "b", "c",
                                "solver", "residuals"}) {
    CHECK(net.contains(key));
  }
  CHECK(net["a"].size() == 60);
  CHECK(fs::exists(dir / "dataset.csv"));
  CHECK(fs::exists(dir / "predictions.csv"));
}

TEST_CASE("cli: spectrum exports grid csv with metadata") {
  const auto dir = fresh_dir("spectrum");
  const auto res = run_cli(
      "spectrum --target wsine:6.2831853071795862 --a_range -8,8 --b_range -4,4 "
      "--resolution 9,9 --out " + dir.string());
  REQUIRE(res.exit_code == 0);
  CHECK(fs::exists(dir / "spectrum.csv"));
  CHECK(fs::exists(dir / "spectrum_meta.json"));
  CHECK(fs::exists(dir / "spectrum.svg"));
  std::ifstream in(dir / "spectrum.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "a,b,re,im,magnitude");
}
