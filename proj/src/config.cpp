#include "prandtl/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace prandtl {

namespace {

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x))
      throw config_error("");
    return x;
  } catch (...) {
    throw config_error("key '" + k + "': not a finite number: '" + v + "'");
  }
}

long to_long(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) throw config_error("");
    return x;
  } catch (...) {
    throw config_error("key '" + k + "': not an integer: '" + v + "'");
  }
}

bool to_bool(const std::string& k, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw config_error("key '" + k + "': expected true or false, got '" + v +
                     "'");
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

const std::map<std::string, Key>& key_table() {
  static const std::map<std::string, Key> table = [] {
    std::map<std::string, Key> t;
    auto D = [&](const char* k, double RunConfig::*m) {
      t[k] = {[k, m](RunConfig& c, const std::string& v) {
                c.*m = to_double(k, v);
              },
              [m](const RunConfig& c) { return num(c.*m); }};
    };
    auto I = [&](const char* k, int RunConfig::*m) {
      t[k] = {[k, m](RunConfig& c, const std::string& v) {
                c.*m = (int)to_long(k, v);
              },
              [m](const RunConfig& c) { return std::to_string(c.*m); }};
    };
    auto U = [&](const char* k, uint64_t RunConfig::*m) {
      t[k] = {[k, m](RunConfig& c, const std::string& v) {
                long x = to_long(k, v);
                if (x < 0) throw config_error(std::string("key '") + k +
                                              "': seed must be >= 0");
                c.*m = (uint64_t)x;
              },
              [m](const RunConfig& c) { return std::to_string(c.*m); }};
    };
    auto B = [&](const char* k, bool RunConfig::*m) {
      t[k] = {[k, m](RunConfig& c, const std::string& v) {
                c.*m = to_bool(k, v);
              },
              [m](const RunConfig& c) {
                return std::string(c.*m ? "true" : "false");
              }};
    };
    t["mode"] = {[](RunConfig& c, const std::string& v) {
                   if (v != "ledger" && v != "structural")
                     throw config_error("mode must be ledger or structural");
                   c.mode = v;
                 },
                 [](const RunConfig& c) { return c.mode; }};
    t["out"] = {[](RunConfig& c, const std::string& v) { c.out = v; },
                [](const RunConfig& c) { return c.out; }};
    t["delta"] = {[](RunConfig& c, const std::string& v) {
                    c.delta = to_double("delta", v);
                  },
                  [](const RunConfig& c) {
                    return c.delta ? num(*c.delta) : std::string();
                  }};
    t["prec"] = {[](RunConfig& c, const std::string& v) {
                   c.prec = to_long("prec", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.prec); }};
    I("threads", &RunConfig::threads);
    D("Ebar", &RunConfig::Ebar);
    D("rho", &RunConfig::rho);
    D("C_theta", &RunConfig::C_theta);
    D("B", &RunConfig::B);
    I("steps", &RunConfig::steps);
    D("eps_override", &RunConfig::eps_override);
    D("Xi0_override", &RunConfig::Xi0_override);
    D("step_B", &RunConfig::step_B);
    D("step_C_theta", &RunConfig::step_C_theta);
    D("N", &RunConfig::N);
    I("K", &RunConfig::K);
    D("Ymax", &RunConfig::Ymax);
    I("D_exp", &RunConfig::D_exp);
    I("fourier_m", &RunConfig::fourier_m);
    I("moll_nodes", &RunConfig::moll_nodes);
    I("flow_substeps", &RunConfig::flow_substeps);
    I("target_n", &RunConfig::target_n);
    I("cancel_n", &RunConfig::cancel_n);
    D("clearance", &RunConfig::clearance);
    D("e_clearance", &RunConfig::e_clearance);
    B("lazy", &RunConfig::lazy);
    U("step_seed", &RunConfig::step_seed);
    U("seed", &RunConfig::seed);
    I("residual_n", &RunConfig::residual_n);
    D("residual_tol", &RunConfig::residual_tol);
    I("sup_n", &RunConfig::sup_n);
    I("holder_n", &RunConfig::holder_n);
    D("alpha", &RunConfig::alpha);
    D("beta", &RunConfig::beta);
    I("weak_n", &RunConfig::weak_n);
    D("U1", &RunConfig::U1);
    D("U2", &RunConfig::U2);
    D("t0", &RunConfig::t0);
    D("ball_eps", &RunConfig::ball_eps);
    D("ball_t", &RunConfig::ball_t);
    D("ball_x1", &RunConfig::ball_x1);
    D("ball_x2", &RunConfig::ball_x2);
    D("ball_y", &RunConfig::ball_y);
    D("ball_amplitude", &RunConfig::ball_amplitude);
    D("demo_Xi", &RunConfig::demo_Xi);
    D("demo_Eu", &RunConfig::demo_Eu);
    D("demo_E1", &RunConfig::demo_E1);
    D("demo_E2", &RunConfig::demo_E2);
    D("demo_E3", &RunConfig::demo_E3);
    D("D_tmin", &RunConfig::D_tmin);
    D("D_tmax", &RunConfig::D_tmax);
    D("D_ymin", &RunConfig::D_ymin);
    D("D_ymax", &RunConfig::D_ymax);
    D("w_tmin", &RunConfig::w_tmin);
    D("w_tmax", &RunConfig::w_tmax);
    D("w_ymin", &RunConfig::w_ymin);
    D("w_ymax", &RunConfig::w_ymax);
    return t;
  }();
  return table;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) +
                         ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    auto it = key_table().find(key);
    if (it == key_table().end())
      throw config_error("line " + std::to_string(lineno) + ": unknown key '" +
                         key + "'");
    it->second.set(c, val);
  }
  validate_config(c);
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void validate_config(const RunConfig& c) {
  auto req = [](bool ok, const char* msg) {
    if (!ok) throw config_error(msg);
  };
  if (c.delta) req(*c.delta > 0.0 && *c.delta < 1.0, "delta must be in (0, 1)");
  req(c.Ebar > 0.0, "Ebar must be positive");
  req(c.rho > 0.0, "rho must be positive");
  req(c.C_theta >= 1.0, "C_theta must be >= 1");
  req(c.B >= 3.0, "B must be >= 3");
  req(c.steps >= 1, "steps must be >= 1");
  req(c.prec >= 64, "prec must be >= 64 bits");
  req(c.step_B >= 3.0, "step_B must be >= 3");
  req(c.step_C_theta >= 1.0, "step_C_theta must be >= 1");
  req(c.N >= 2.0, "N must be >= 2");
  req(c.K >= 0, "K must be >= 0");
  req(c.Ymax > 0.0, "Ymax must be positive");
  req(c.D_exp >= 1 && c.D_exp <= 3, "D_exp must be in [1, 3]");
  req(c.fourier_m >= 3 && c.fourier_m <= 10, "fourier_m must be in [3, 10]");
  req(c.moll_nodes >= 2, "moll_nodes must be >= 2");
  req(c.flow_substeps >= 1, "flow_substeps must be >= 1");
  req(c.target_n >= 1 && c.cancel_n >= 1, "sample counts must be >= 1");
  req(c.clearance > 0.0 && c.e_clearance > 0.0, "clearances must be positive");
  req(c.residual_n >= 1 && c.sup_n >= 1 && c.holder_n >= 1 && c.weak_n >= 2,
      "sample counts must be >= 1");
  req(c.residual_tol > 0.0, "residual_tol must be positive");
  req(c.alpha > 0.0 && c.alpha < 1.0 && c.beta > 0.0 && c.beta < 1.0,
      "Holder exponents must be in (0, 1)");
  req(c.threads >= 0, "threads must be >= 0 (0 = auto)");
  req(c.t0 > 0.0, "t0 must be positive");
  req(c.ball_eps > 0.0, "ball_eps must be positive");
  req(c.demo_Xi > 0.0 && c.demo_Eu > 0.0 && c.demo_E1 >= 0.0 &&
          c.demo_E2 >= 0.0 && c.demo_E3 >= 0.0,
      "demo levels must be positive");
  req(c.D_tmin < c.D_tmax && c.D_ymin < c.D_ymax, "stress region D is empty");
  req(c.w_tmin < c.w_tmax && c.w_ymin < c.w_ymax, "sample window is empty");
}

LadderParams ladder_params(const RunConfig& c) {
  if (!c.delta)
    throw config_error("the ladder requires an explicit 'delta' key");
  LadderParams p;
  p.delta = *c.delta;
  p.Ebar = c.Ebar;
  p.rho = c.rho;
  p.C_theta = c.C_theta;
  p.B = c.B;
  p.steps = c.steps;
  p.prec = c.prec;
  p.eps_override = c.eps_override;
  p.Xi0_override = c.Xi0_override;
  return p;
}

StepOptions step_options(const RunConfig& c) {
  StepOptions o;
  o.B = c.step_B;
  o.C_theta = c.step_C_theta;
  o.N = c.N;
  o.Ymax = c.Ymax;
  o.D_exp = c.D_exp;
  o.moll_nodes = c.moll_nodes;
  o.flow_substeps = c.flow_substeps;
  o.target_n = c.target_n;
  o.cancel_n = c.cancel_n;
  o.clearance = c.clearance;
  o.seed = c.step_seed;
  o.lazy = c.lazy;
  return o;
}

RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  o.step = step_options(c);
  o.K = c.K;
  o.residual_n = c.residual_n;
  o.residual_tol = c.residual_tol;
  o.sup_n = c.sup_n;
  o.holder_n = c.holder_n;
  o.alpha = c.alpha;
  o.beta = c.beta;
  o.weak_n = c.weak_n;
  o.e_clearance = c.e_clearance;
  o.seed = c.seed;
  return o;
}

std::string config_text(const RunConfig& c) {
  std::ostringstream os;
  os << "# run configuration (key = value)\n";
  for (const auto& [k, key] : key_table()) {
    std::string v = key.get(c);
    if (v.empty()) continue;  // unset optional key
    os << k << " = " << v << "\n";
  }
  return os.str();
}

}  // namespace prandtl
