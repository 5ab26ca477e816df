#include "prandtl/scheduler.hpp"

#include <cmath>

namespace prandtl {

namespace {

// a <= b with a log2 slack margin for the report.
CheckLine le(const std::string& name, const Big& a, const Big& b) {
  CheckLine c;
  c.name = name;
  c.pass = a <= b;
  c.margin_log2 = b.log2d() - a.log2d();
  return c;
}

}  // namespace

LevelReport check_levels(const Levels& L) {
  long pr = L.Xi.prec();
  Big two(2.0, pr), four(4.0, pr);
  LevelReport r;
  r.lines.push_back(le("4E3<=2E2", four * L.E3, two * L.E2));
  r.lines.push_back(le("2E2<=E1", two * L.E2, L.E1));
  r.lines.push_back(le("E1<=Eu", L.E1, L.Eu));
  r.lines.push_back(le("Eu<=Xi^2", L.Eu, L.Xi * L.Xi));
  for (auto& l : r.lines)
    if (!l.pass) {
      r.pass = false;
      if (r.first_failure.empty()) r.first_failure = l.name;
    }
  return r;
}

std::pair<Levels, Big> recursion_step(const Levels& L, const Big& delta,
                                      const Big& eps, const Big& C_theta,
                                      int n) {
  long pr = L.Xi.prec();
  Big two(2.0, pr), one(1.0, pr), th(1.5, pr);
  Big N(pr);
  if (n == 0) {
    N = pow(L.Eu * L.E1, th) * pow(eps, Big(-3.0, pr));
  } else {
    N = pow(L.Eu * L.E1, th) * pow(L.E3, Big(-3.0, pr) * (one + delta));
  }
  Levels out;
  out.Xi = C_theta * N * L.Xi;
  out.Eu = L.E1;
  out.E1 = two * L.E2;
  out.E2 = two * L.E3;
  out.E3 = (n == 0) ? eps : pow(L.E3, one + delta);
  return {out, N};
}

std::pair<double, double> holder_bounds(double d) {
  double q = d * (d * d + 4 * d + 6);
  return {1.0 / (21.0 + 6.0 * q), 1.0 / (10.0 + 3.0 * q)};
}

Big theta_of(const Big& delta) {
  long pr = delta.prec();
  Big cap = log(Big(2.0, pr)) / (Big(4.0, pr) * log(Big(10.0, pr)));
  return min(delta / Big(40.0, pr), cap);
}

Big b_of(const Big& delta) {
  long pr = delta.prec();
  return Big(3.0, pr) * delta *
         (Big(3.5, pr) + Big(6.0, pr) * delta + Big(4.0, pr) * delta * delta +
          delta * delta * delta);
}

namespace {

Ladder build_at(const LadderParams& p, long pr) {
  Ladder lad;
  lad.params = p;
  lad.prec_used = pr;
  lad.delta = Big(p.delta, pr);
  lad.theta = theta_of(lad.delta);
  lad.bconst = b_of(lad.delta);
  Big one(1.0, pr), two(2.0, pr), Eb(p.Ebar, pr), C(p.C_theta, pr),
      B(p.B, pr), rho(p.rho, pr);

  lad.Xi0 = (p.Xi0_override > 0)
                ? Big(p.Xi0_override, pr)
                : Big(1e4, pr) * (one / rho + one) * pow(Eb, Big(1.5, pr)) * C * C;

  if (p.eps_override > 0) {
    lad.eps = Big(p.eps_override, pr);
    lad.eps_clause = "override";
  } else {
    struct Clause { Big v; const char* name; };
    std::vector<Clause> cl;
    cl.push_back({pow(C, Big(-0.5, pr)), "C^{-1/2}"});
    cl.push_back({pow(Big(64.0, pr) * C,
                      Big(0.0, pr) - lad.theta / lad.delta - lad.theta),
                  "(2^6 C)^{-theta/delta-theta}"});
    cl.push_back({Big(0.25, pr) * Eb, "Ebar/4"});
    cl.push_back({one / Eb, "Ebar^{-1}"});
    cl.push_back({pow(lad.Xi0, Big(-0.25, pr)), "Xi0^{-1/4}"});
    lad.eps = cl[0].v;
    lad.eps_clause = cl[0].name;
    for (auto& c : cl)
      if (c.v < lad.eps) {
        lad.eps = c.v;
        lad.eps_clause = c.name;
      }
  }

  auto ell_of = [&](const Levels& L) {
    return pow(L.Xi, Big(-0.5, pr)) * pow(L.Eu, Big(-0.25, pr));
  };
  Big cond = pow(Big(100.0, pr) * C * Eb, Big(2.0, pr));

  LadderStep s0;
  s0.n = 0;
  s0.L = Levels{lad.Xi0, Big(25.0, pr) * Eb, Big(25.0, pr) * Eb, two * Eb, Eb};
  s0.ell = ell_of(s0.L);
  s0.dt_accum = Big(0.0, pr);
  s0.dy_accum = Big(0.0, pr);
  s0.levels_report = check_levels(s0.L);
  s0.ell_cond_ok = s0.L.Xi * sqrt(s0.L.Eu) >= cond;
  lad.steps.push_back(s0);

  double max_rel = 0.0;
  for (int n = 0; n < p.steps; ++n) {
    const LadderStep& prev = lad.steps.back();
    auto [Lnext, N] = recursion_step(prev.L, lad.delta, lad.eps, C, n);
    LadderStep s;
    s.n = n + 1;
    s.L = Lnext;
    s.N = N;
    s.lambda = B * B * B * N * prev.L.Xi;
    Big Ncbrt = pow(N, Big(1.0, pr) / Big(3.0, pr));
    s.tau = one / (B * prev.L.Xi * Ncbrt * sqrt(prev.L.Eu));
    s.ly = one / (B * sqrt(prev.L.Xi) * Ncbrt * pow(prev.L.Eu, Big(0.25, pr)));
    s.ell = ell_of(s.L);
    s.dt_accum = prev.dt_accum + Big(50.0, pr) * prev.ell * prev.ell;
    s.dy_accum = prev.dy_accum + Big(50.0, pr) * prev.ell;
    s.levels_report = check_levels(s.L);
    s.tau_chain_ok = s.tau <= s.ly && s.ly <= prev.ell && prev.ell <= one;
    s.ell_ratio_ok = Big(8.0, pr) * s.ell <= prev.ell;
    Big need = pow(prev.L.Eu * prev.L.E1 / (prev.L.E3 * prev.L.E3), Big(1.5, pr));
    s.N_ok = N >= need;
    s.NXi_ok = N >= pow(prev.L.Xi, lad.theta);
    s.ell_cond_ok = s.L.Xi * sqrt(s.L.Eu) >= cond;
    s.lambda_monotone_ok = prev.n == 0 || s.lambda > prev.lambda;
    lad.steps.push_back(s);

    // closed forms: E3 = eps^{(1+d)^{m-1}}; (Eu,E1,E2) = (4,4,2)*eps powers
    // for m >= 4; N_(m) = 2^6 eps^{-(1+d)^{m-5} b} for m >= 5.
    int m = n + 1;
    auto track = [&](const Big& got, const Big& want) {
      double e = rel_err(got, want).d();
      if (e > max_rel) max_rel = e;
    };
    Big opd = one + lad.delta;
    if (m >= 1) track(s.L.E3, pow(lad.eps, pow(opd, (long)(m - 1))));
    if (m >= 4) {
      track(s.L.Eu, Big(4.0, pr) * pow(lad.eps, pow(opd, (long)(m - 4))));
      track(s.L.E1, Big(4.0, pr) * pow(lad.eps, pow(opd, (long)(m - 3))));
      track(s.L.E2, two * pow(lad.eps, pow(opd, (long)(m - 2))));
    }
    if (m >= 5)
      track(s.N, Big(64.0, pr) *
                     pow(lad.eps, Big(0.0, pr) - pow(opd, (long)(m - 5)) * lad.bconst));
  }
  lad.closed_form_max_relerr = max_rel;

  // support containment: 50 sum ell_k^2 <= 100 ell_0^2 <= rho (and in y).
  const Big& ell0 = lad.steps[0].ell;
  Big hundred(100.0, pr);
  lad.support_ok = lad.steps.back().dt_accum <= hundred * ell0 * ell0 &&
                   hundred * ell0 * ell0 <= rho &&
                   lad.steps.back().dy_accum <= hundred * ell0 &&
                   hundred * ell0 <= sqrt(rho);

  lad.all_ok = lad.support_ok;
  for (auto& s : lad.steps)
    lad.all_ok = lad.all_ok && s.levels_report.pass && s.tau_chain_ok &&
                 s.ell_ratio_ok && s.N_ok && s.NXi_ok && s.ell_cond_ok &&
                 s.lambda_monotone_ok;
  return lad;
}

bool healthy(const Ladder& lad) {
  for (auto& s : lad.steps) {
    for (const Big* b : {&s.L.Xi, &s.L.Eu, &s.L.E1, &s.L.E2, &s.L.E3})
      if (!b->finite() || b->sign() <= 0) return false;
    if (s.n > 0 && (!s.N.finite() || s.N.sign() <= 0)) return false;
  }
  return true;
}

}  // namespace

Ladder build_ladder(const LadderParams& p) {
  long pr = p.prec;
  Ladder lad = build_at(p, pr);
  // escalate precision on overflow/underflow to zero
  while (!healthy(lad) && pr < 8192) {
    pr *= 2;
    lad = build_at(p, pr);
  }
  return lad;
}

ThresholdReport verify_N_thresholds(const Ladder& lad) {
  ThresholdReport r;
  long pr = lad.prec_used;
  Big one(1.0, pr);
  double th = lad.theta.d();
  r.min_margin_log2 = 1e300;
  for (size_t n = 1; n < lad.steps.size(); ++n) {
    double m = lad.steps[n].N.log2d() - th * lad.steps[n - 1].L.Xi.log2d();
    if (m < r.min_margin_log2) r.min_margin_log2 = m;
    if (!(lad.steps[n].N >= pow(lad.steps[n - 1].L.Xi, lad.theta))) {
      r.pass = false;
      r.failures.push_back("N_(n+1)>=Xi_(n)^theta at n=" + std::to_string(n));
    }
  }
  // bootstrap cases k = 1..5
  Big lower = Big(8.0, pr) * pow(lad.eps, Big(-3.0, pr) * lad.delta);
  Big xicap = Big(1e12, pr) * pow(lad.eps, Big(-120.0, pr));
  Big upper = Big(1e3, pr) * pow(Big(lad.params.Ebar, pr), (long)3) *
              pow(lad.eps, Big(-3.0, pr) * pow(one + lad.delta, (long)3));
  for (size_t k = 1; k <= 5 && k < lad.steps.size(); ++k) {
    if (!(lower <= lad.steps[k].N)) {
      r.bootstrap_lower_ok = false;
      r.pass = false;
      r.failures.push_back("2^3 eps^{-3 delta}<=N at k=" + std::to_string(k));
    }
    if (!(lad.steps[k].N <= upper)) r.upper_rough_bound_holds = false;
  }
  for (size_t k = 0; k <= 4 && k < lad.steps.size(); ++k) {
    if (!(lad.steps[k].L.Xi <= xicap)) {
      r.xi_chain_ok = false;
      r.pass = false;
      r.failures.push_back("Xi<=10^12 eps^{-120} at k=" + std::to_string(k));
    }
  }
  // induction step for n >= 5
  for (size_t n = 5; n + 1 < lad.steps.size(); ++n) {
    Big rhs = pow(Big(lad.params.C_theta, pr), lad.theta) *
              pow(lad.steps[n].N, one + lad.theta);
    if (!(lad.steps[n + 1].N >= rhs)) {
      r.induction_ok = false;
      r.pass = false;
      r.failures.push_back("N_{n+1}>=C^theta N_n^{1+theta} at n=" +
                           std::to_string(n));
    }
  }
  return r;
}

CauchyReport cauchy_ratios(const Ladder& lad, double alpha, double beta) {
  CauchyReport r;
  for (size_t n = 1; n < lad.steps.size(); ++n) {
    double lN = lad.steps[n].N.log2d();
    double lXi = lad.steps[n - 1].L.Xi.log2d();
    double lE1 = lad.steps[n - 1].L.E1.log2d();
    r.a_log2.push_back(alpha * (lN + lXi) + 0.5 * lE1);
    r.b_log2.push_back(beta * (0.5 * lN + 0.5 * lXi + 0.25 * lE1) + 0.5 * lE1);
  }
  for (size_t i = 0; i + 1 < r.a_log2.size(); ++i) {
    r.a_ratio.push_back(std::exp2(r.a_log2[i + 1] - r.a_log2[i]));
    r.b_ratio.push_back(std::exp2(r.b_log2[i + 1] - r.b_log2[i]));
  }
  // ratio index i covers a_{i+2}/a_{i+1}; asymptotic regime from n >= 5
  for (size_t i = 4; i + 1 < r.a_ratio.size(); ++i) {
    if (r.a_ratio[i + 1] > r.a_ratio[i]) r.a_monotone = false;
    if (r.b_ratio[i + 1] > r.b_ratio[i]) r.b_monotone = false;
  }
  if (!r.a_ratio.empty()) {
    r.a_final_ratio = r.a_ratio.back();
    r.b_final_ratio = r.b_ratio.back();
    size_t m = r.a_ratio.size();
    r.a_diverged = r.a_final_ratio > 1.0 &&
                   (m < 2 || r.a_ratio[m - 1] >= r.a_ratio[m - 2]);
    r.b_diverged = r.b_final_ratio > 1.0 &&
                   (m < 2 || r.b_ratio[m - 1] >= r.b_ratio[m - 2]);
  }
  for (double l : r.a_log2) r.a_sum += std::exp2(l);
  for (double l : r.b_log2) r.b_sum += std::exp2(l);
  return r;
}

nlohmann::json ladder_json(const Ladder& lad) {
  nlohmann::json j;
  j["params"] = {{"delta", lad.params.delta}, {"Ebar", lad.params.Ebar},
                 {"rho", lad.params.rho},     {"C_theta", lad.params.C_theta},
                 {"B", lad.params.B},         {"steps", lad.params.steps},
                 {"prec", lad.prec_used}};
  j["theta"] = lad.theta.d();
  j["b"] = lad.bconst.d();
  j["eps"] = lad.eps.str();
  j["eps_double"] = lad.eps.d();
  j["eps_clause"] = lad.eps_clause;
  j["Xi0"] = lad.Xi0.str();
  j["closed_form_max_relerr"] = lad.closed_form_max_relerr;
  j["support_ok"] = lad.support_ok;
  j["all_ok"] = lad.all_ok;
  j["steps"] = nlohmann::json::array();
  for (auto& s : lad.steps) {
    nlohmann::json js;
    js["n"] = s.n;
    js["Xi"] = s.L.Xi.str();
    js["Eu"] = s.L.Eu.str();
    js["E1"] = s.L.E1.str();
    js["E2"] = s.L.E2.str();
    js["E3"] = s.L.E3.str();
    js["log2"] = {{"Xi", s.L.Xi.log2d()}, {"Eu", s.L.Eu.log2d()},
                  {"E1", s.L.E1.log2d()}, {"E2", s.L.E2.log2d()},
                  {"E3", s.L.E3.log2d()}};
    js["ell"] = s.ell.str();
    if (s.n > 0) {
      js["N"] = s.N.str();
      js["N_log2"] = s.N.log2d();
      js["lambda"] = s.lambda.str();
      js["lambda_log2"] = s.lambda.log2d();
      js["tau"] = s.tau.str();
      js["ly"] = s.ly.str();
    }
    nlohmann::json checks;
    checks["levels"] = s.levels_report.pass;
    if (!s.levels_report.pass)
      checks["levels_failure"] = s.levels_report.first_failure;
    for (auto& l : s.levels_report.lines)
      checks["margins_log2"][l.name] = l.margin_log2;
    checks["tau_chain"] = s.tau_chain_ok;
    checks["ell_ratio"] = s.ell_ratio_ok;
    checks["N"] = s.N_ok;
    checks["N_Xi"] = s.NXi_ok;
    checks["ell_cond"] = s.ell_cond_ok;
    checks["lambda_monotone"] = s.lambda_monotone_ok;
    js["checks"] = checks;
    j["steps"].push_back(js);
  }
  return j;
}

nlohmann::json ctheta_sensitivity(LadderParams p) {
  nlohmann::json out = nlohmann::json::array();
  for (double C : {2.0, 10.0, 100.0}) {
    p.C_theta = C;
    Ladder lad = build_ladder(p);
    out.push_back({{"C_theta", C},
                   {"eps", lad.eps.d()},
                   {"eps_clause", lad.eps_clause},
                   {"all_ok", lad.all_ok}});
  }
  return out;
}

}  // namespace prandtl
