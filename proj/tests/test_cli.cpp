#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin() {
  const char* b = std::getenv("PRANDTL_BIN");
  REQUIRE_MESSAGE(b != nullptr, "PRANDTL_BIN must point at the CLI binary");
  return b;
}

fs::path work_root() {
  static fs::path root = [] {
    fs::path p =
        fs::temp_directory_path() / ("prandtl_cli_" + std::to_string(getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int run(const std::string& args) {
  std::string cmd = "PRANDTL_CI_THREADS=1 " + bin() + " " + args +
                    " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  REQUIRE(st != -1);
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::path p = work_root() / name;
  std::ofstream(p) << text;
  return p;
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

// quick structural configuration: no construction step, light sampling
const char* kQuickCfg =
    "# quick run\n"
    "K = 0\n"
    "sup_n = 8\n"
    "residual_n = 4\n"
    "holder_n = 2\n"
    "weak_n = 16\n";

}  // namespace

TEST_CASE("usage and configuration errors exit with code 2") {
  CHECK(run("") == 2);                       // missing subcommand
  CHECK(run("--no-such-flag") == 2);         // unknown flag
  CHECK(run("schedule --config /no/such/file.cfg") == 2);
  auto bad = write_file("bad.cfg", "no_such_key = 1\n");
  CHECK(run("iterate --config " + bad.string()) == 2);
  auto corrupt = write_file("corrupt.cfg", "K 0 garbage without equals\n");
  CHECK(run("iterate --config " + corrupt.string()) == 2);
  auto range = write_file("range.cfg", "delta = 1.5\n");
  CHECK(run("schedule --config " + range.string()) == 2);
  // the ladder requires delta explicitly
  CHECK(run("schedule --out " + (work_root() / "s0").string()) == 2);
}

TEST_CASE("schedule writes a passing ladder and flags violations") {
  auto cfg = write_file("ledger.cfg", "mode = ledger\ndelta = 0.2\n");
  fs::path out = work_root() / "sched";
  CHECK(run("schedule --config " + cfg.string() + " --out " + out.string()) ==
        0);
  json j = load_json(out / "ladder.json");
  CHECK(j.at("all_ok").get<bool>());
  CHECK(j.at("steps").size() == 51);  // level sets 0..50
  CHECK(j.at("thresholds").at("pass").get<bool>());

  // an epsilon far above its admissible bound must fail a check
  auto viol = write_file("viol.cfg",
                         "mode = ledger\ndelta = 0.2\neps_override = 0.9\n");
  CHECK(run("schedule --config " + viol.string() + " --out " +
            (work_root() / "sched_viol").string()) == 1);
}

TEST_CASE("iterate with no steps emits diagnostics, config copy and fields") {
  auto cfg = write_file("quick.cfg", kQuickCfg);
  fs::path out = work_root() / "it0";
  CHECK(run("iterate --config " + cfg.string() + " --out " + out.string()) ==
        0);
  CHECK(fs::exists(out / "config.txt"));
  json d = load_json(out / "diagnostics.json");
  REQUIRE(d.is_array());
  REQUIRE(d.size() == 1);  // initial state only
  CHECK(d[0].contains("checks"));
  bool saw_residual = false;
  for (const auto& c : d[0]["checks"])
    if (c.at("name") == "residual_relative") {
      saw_residual = true;
      CHECK(c.at("pass").get<bool>());
    }
  CHECK(saw_residual);

  std::ifstream csv(out / "fields" / "velocity.csv");
  std::string header;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "t,x1,x2,y,u1,u2,v");
  std::string row;
  REQUIRE(std::getline(csv, row));
  CHECK(row.find(',') != std::string::npos);
}

TEST_CASE("verify replays a run byte-for-byte and detects tampering") {
  auto cfg = write_file("quick2.cfg", kQuickCfg);
  fs::path out = work_root() / "rep";
  REQUIRE(run("iterate --config " + cfg.string() + " --out " + out.string()) ==
          0);
  CHECK(run("verify " + out.string()) == 0);

  // tampered diagnostics must be reported as a mismatch
  {
    std::ofstream f(out / "diagnostics.json", std::ios::app);
    f << "\n";
  }
  CHECK(run("verify " + out.string()) == 1);

  fs::path empty = work_root() / "empty";
  fs::create_directories(empty);
  CHECK(run("verify " + empty.string()) == 2);
}

TEST_CASE("shear demo reports the non-monotonicity witnesses") {
  auto cfg = write_file("demo.cfg", kQuickCfg);
  fs::path out = work_root() / "demo";
  CHECK(run("demo-shear --config " + cfg.string() + " --out " +
            out.string()) == 0);
  json d = load_json(out / "diagnostics.json");
  bool sign = false, trans = false;
  for (const auto& entry : d)
    for (const auto& c : entry.value("checks", json::array())) {
      if (c.value("name", "") == "dyu_sign_change")
        sign = c.at("pass").get<bool>();
      if (c.value("name", "") == "transverse_component_nonzero") {
        trans = c.at("pass").get<bool>();
        CHECK(c.at("component") == "u1");  // far field is U = (0, 1)
      }
    }
  CHECK(sign);
  CHECK(trans);

  // perturbation ball too large for the domain: runtime failure, exit 1
  auto big = write_file("bigball.cfg", std::string(kQuickCfg) +
                                           "ball_eps = 2.0\n");
  CHECK(run("demo-shear --config " + big.string() + " --out " +
            (work_root() / "demo_big").string()) == 1);
}
