#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "prandtl/config.hpp"
#include "prandtl/parallel.hpp"
#include "prandtl/scheduler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prandtl;

namespace {

struct Flags {
  std::string config_path;
  std::string out;
  std::string mode;
  int steps = -1;  // overrides K (iterate/demo) or ladder length (schedule)
};

RunConfig load_config(const Flags& fl) {
  RunConfig c = fl.config_path.empty() ? RunConfig{}
                                       : parse_config_file(fl.config_path);
  if (!fl.out.empty()) c.out = fl.out;
  if (!fl.mode.empty()) {
    if (fl.mode != "ledger" && fl.mode != "structural")
      throw config_error("mode must be ledger or structural");
    c.mode = fl.mode;
  }
  if (const char* env = std::getenv("PRANDTL_CI_THREADS"))
    c.threads = (int)std::strtol(env, nullptr, 10);
  validate_config(c);
  set_threads(c.threads);
  return c;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

void write_csv(const fs::path& p, const std::string& header,
               const std::vector<Point>& pts,
               const std::vector<std::pair<std::string, Field>>& cols) {
  std::ostringstream os;
  os.precision(17);
  os << header;
  for (const auto& [name, f] : cols) os << "," << name;
  os << "\n";
  for (const Point& q : pts) {
    os << q.t << "," << q.x1 << "," << q.x2 << "," << q.y;
    for (const auto& [name, f] : cols) os << "," << eval_value(f, q);
    os << "\n";
  }
  write_text(p, os.str());
}

// ---- schedule ---------------------------------------------------------------

int cmd_schedule(const RunConfig& c) {
  Ladder ladder = build_ladder(ladder_params(c));
  ThresholdReport thr = verify_N_thresholds(ladder);
  auto [amax, bmax] = holder_bounds(ladder_params(c).delta);
  CauchyReport cau = cauchy_ratios(ladder, 0.5 * amax, 0.5 * bmax);

  json j = ladder_json(ladder);
  j["thresholds"] = {{"pass", thr.pass},
                     {"min_margin_log2", thr.min_margin_log2},
                     {"failures", thr.failures}};
  j["holder_bounds"] = {{"alpha_max", amax}, {"beta_max", bmax}};
  j["cauchy"] = {{"a_final_ratio", cau.a_final_ratio},
                 {"b_final_ratio", cau.b_final_ratio},
                 {"a_monotone", cau.a_monotone},
                 {"b_monotone", cau.b_monotone},
                 {"a_sum_log2_terms", cau.a_log2},
                 {"b_sum_log2_terms", cau.b_log2}};
  write_text(fs::path(c.out) / "ladder.json", j.dump(2) + "\n");
  write_text(fs::path(c.out) / "config.txt", config_text(c));

  if (!ladder.all_ok) {
    for (const LadderStep& s : ladder.steps)
      if (!s.levels_report.pass) {
        std::cerr << "check failed at step " << s.n << ": "
                  << s.levels_report.first_failure << "\n";
        return 1;
      }
    std::cerr << "check failed: ladder inequality chain\n";
    return 1;
  }
  if (!thr.pass) {
    std::cerr << "check failed: "
              << (thr.failures.empty() ? "frequency thresholds"
                                       : thr.failures.front())
              << "\n";
    return 1;
  }
  std::cout << "ladder of " << ladder.steps.size() << " level sets written to "
            << (fs::path(c.out) / "ladder.json").string() << "\n";
  return 0;
}

// ---- iterate / demo ---------------------------------------------------------

IterationState demo_initial(const RunConfig& c) {
  Vec2Field uC = shear_flow({c.U1, c.U2}, c.t0);
  Field vC = fconst(0.0);
  Perturbation pert = corollary_perturbation(
      c.ball_eps, Point::make(c.ball_t, c.ball_x1, c.ball_x2, c.ball_y),
      c.Ymax, c.ball_amplitude);
  Vec2Field ub{uC.c1 + pert.du.c1, uC.c2 + pert.du.c2};
  Field vb = vC + pert.dv;
  FELevels lv{c.demo_Xi, c.demo_Eu, c.demo_E1, c.demo_E2, c.demo_E3};
  SupportBox D0{c.D_tmin, c.D_tmax, c.D_ymin, c.D_ymax};
  SampleWindow w{c.w_tmin, c.w_tmax, c.w_ymin, c.w_ymax};
  BuildOptions bo;
  bo.fourier_m = c.fourier_m;
  return build_initial(uC, vC, ub, vb, lv, D0, w, bo);
}

void write_run_dir(const RunConfig& c, const RunOutput& out) {
  fs::path dir(c.out);
  write_text(dir / "config.txt", config_text(c));
  write_text(dir / "diagnostics.json", out.diagnostics.dump(2) + "\n");

  SampleWindow w{c.w_tmin, c.w_tmax, c.w_ymin, c.w_ymax};
  auto pts = SampleSet::grid(3, 4, 4, 3, w).points;
  const IterationState& fin = out.states.back();
  write_csv(dir / "fields" / "velocity.csv", "t,x1,x2,y", pts,
            {{"u1", fin.u.c1}, {"u2", fin.u.c2}, {"v", fin.v}});
  write_csv(dir / "fields" / "stress.csv", "t,x1,x2,y", pts,
            {{"S11", fin.R.S.a11},
             {"S12", fin.R.S.a12},
             {"S22", fin.R.S.a22},
             {"Y1", fin.R.Y.c1},
             {"Y2", fin.R.Y.c2}});
  if (!out.corrections.empty()) {
    const Vec3Field& wc = out.corrections.back();
    write_csv(dir / "fields" / "correction.csv", "t,x1,x2,y", pts,
              {{"w1", wc.c1}, {"w2", wc.c2}, {"wy", wc.cy}});
  }
}

RunOutput run_pipeline(const RunConfig& c) {
  IterationState st = demo_initial(c);
  SampleWindow w{c.w_tmin, c.w_tmax, c.w_ymin, c.w_ymax};
  return run_steps(st, w, run_options(c));
}

int cmd_iterate(const RunConfig& c) {
  RunOutput out = run_pipeline(c);
  write_run_dir(c, out);
  if (!out.pass) {
    std::cerr << "run failed: " << out.failure << "\n";
    return 1;
  }
  std::cout << out.states.size() - 1 << " step(s) completed; run directory: "
            << c.out << "\n";
  return 0;
}

int cmd_demo_shear(const RunConfig& c) {
  RunOutput out = run_pipeline(c);

  // Qualitative witnesses of the perturbed shear, sampled in the ball:
  // some component of dy u takes both signs, and the component transverse
  // to the far-field direction U is nonzero somewhere.
  const IterationState& fin = out.states.back();
  SampleWindow ball{c.ball_t - c.ball_eps, c.ball_t + c.ball_eps,
                    c.ball_y - c.ball_eps, c.ball_y + c.ball_eps,
                    c.ball_x1 - c.ball_eps, c.ball_x1 + c.ball_eps,
                    c.ball_x2 - c.ball_eps, c.ball_x2 + c.ball_eps};
  bool transverse_is_1 = std::abs(c.U2) >= std::abs(c.U1);
  const Field& trans = transverse_is_1 ? fin.u.c1 : fin.u.c2;
  double dy_min = 0.0, dy_max = 0.0, tr_max = 0.0;
  for (const Point& q : SampleSet::halton(512, c.seed + 7, ball).points) {
    for (const Field* f : {&fin.u.c1, &fin.u.c2}) {
      double d = eval_deriv(*f, q, {.b = 1});
      dy_min = std::min(dy_min, d);
      dy_max = std::max(dy_max, d);
    }
    tr_max = std::max(tr_max, std::abs(eval_value(trans, q)));
  }
  json witnesses = json::array();
  witnesses.push_back({{"name", "dyu_sign_change"},
                       {"pass", dy_min < 0.0 && dy_max > 0.0},
                       {"dy_min", dy_min},
                       {"dy_max", dy_max}});
  witnesses.push_back({{"name", "transverse_component_nonzero"},
                       {"component", transverse_is_1 ? "u1" : "u2"},
                       {"pass", tr_max > 0.0},
                       {"sup", tr_max}});
  out.diagnostics.push_back({{"step", "witnesses"}, {"checks", witnesses}});

  write_run_dir(c, out);
  bool wit_ok = (dy_min < 0.0 && dy_max > 0.0) && tr_max > 0.0;
  if (!out.pass || !wit_ok) {
    std::cerr << "run failed: "
              << (out.pass ? "witness check" : out.failure) << "\n";
    return 1;
  }
  std::cout << "shear demo: both witnesses hold; run directory: " << c.out
            << "\n";
  return 0;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(const std::string& run_dir) {
  fs::path dir(run_dir);
  fs::path cfgp = dir / "config.txt", diagp = dir / "diagnostics.json";
  if (!fs::exists(cfgp) || !fs::exists(diagp)) {
    std::cerr << "missing artifacts in " << run_dir
              << " (need config.txt and diagnostics.json)\n";
    return 2;
  }
  RunConfig c = parse_config_file(cfgp.string());
  if (const char* env = std::getenv("PRANDTL_CI_THREADS"))
    c.threads = (int)std::strtol(env, nullptr, 10);
  set_threads(c.threads);

  std::ifstream in(diagp);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stored = buf.str();

  RunOutput out = run_pipeline(c);
  std::string fresh = out.diagnostics.dump(2) + "\n";
  if (fresh != stored) {
    std::cerr << "diagnostics mismatch: stored diagnostics.json differs from "
                 "a replay with the stored configuration\n";
    return 1;
  }
  std::cout << "replay matches stored diagnostics byte for byte\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holder-continuous boundary-layer construction toolkit"};
  app.require_subcommand(1);

  Flags fl;
  std::string run_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", fl.config_path, "configuration file path");
    sub->add_option("--out", fl.out, "run directory (overrides config `out`)");
    sub->add_option("--mode", fl.mode, "ledger | structural");
    sub->add_option("--steps", fl.steps, "override step count");
  };
  CLI::App* sch = app.add_subcommand(
      "schedule", "build the high-precision parameter ladder");
  add_common(sch);
  CLI::App* itr = app.add_subcommand(
      "iterate", "run construction steps on the shear demo state");
  add_common(itr);
  CLI::App* dem = app.add_subcommand(
      "demo-shear", "construction steps plus non-monotonicity witnesses");
  add_common(dem);
  CLI::App* ver = app.add_subcommand(
      "verify", "replay a run directory and compare diagnostics");
  ver->add_option("run_dir", run_dir, "run directory to verify")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are exit 2
  }

  try {
    if (ver->parsed()) return cmd_verify(run_dir);
    RunConfig c = load_config(fl);
    if (fl.steps >= 0) {
      if (sch->parsed())
        c.steps = fl.steps;
      else
        c.K = fl.steps;
      validate_config(c);
    }
    if (sch->parsed()) return cmd_schedule(c);
    if (itr->parsed()) return cmd_iterate(c);
    return cmd_demo_shear(c);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
