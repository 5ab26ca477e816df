#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "prandtl/profiles.hpp"
#include "prandtl/verify.hpp"

using namespace prandtl;

TEST_CASE("sample sets: determinism, window containment, grid shape") {
  SampleWindow w{0.25, 0.75, 1.5, 2.5, 0.0, 1.0, 0.0, 1.0};
  SampleSet a = SampleSet::halton(200, 7, w);
  SampleSet b = SampleSet::halton(200, 7, w);
  REQUIRE(a.points.size() == 200);
  for (size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].t == b.points[i].t);
    CHECK(a.points[i].x1 == b.points[i].x1);
    CHECK(a.points[i].x2 == b.points[i].x2);
    CHECK(a.points[i].y == b.points[i].y);
    CHECK(a.points[i].t >= 0.25);
    CHECK(a.points[i].t <= 0.75);
    CHECK(a.points[i].y >= 1.5);
    CHECK(a.points[i].y <= 2.5);
  }
  // skipping shifts the sequence
  SampleSet c = SampleSet::halton(200, 8, w);
  CHECK(c.points[0].t != a.points[0].t);

  SampleSet g = SampleSet::grid(3, 4, 5, 6, w);
  REQUIRE(g.points.size() == 3u * 4u * 5u * 6u);
  CHECK(g.points.front().t == 0.25);
  CHECK(g.points.back().t == 0.75);
  CHECK(g.points.back().y == 2.5);
}

TEST_CASE("sup norm: constants, refinement, derivative orders") {
  SampleWindow w;
  auto pts = SampleSet::grid(1, 64, 1, 1, w).points;
  CHECK(sup_norm(fconst(-3.5), pts) == 3.5);
  CHECK(sup_norm(fconst(0.0), pts) == 0.0);

  Field s = fprofile(profile_sin(2 * M_PI), fcoord(1));
  CHECK(sup_norm(s, pts) >= 0.999);
  CHECK(sup_norm(s, pts) <= 1.0);
  // refinement is monotone
  auto coarse = SampleSet::grid(1, 16, 1, 1, w).points;
  CHECK(sup_norm(s, coarse) <= sup_norm(s, pts));
  // first derivative sup = 2 pi
  CHECK(sup_norm(s, pts, {.a1 = 1}) ==
        doctest::Approx(2 * M_PI).epsilon(1e-3));
}

TEST_CASE("holder seminorm: constant, linear closed form, plane wave") {
  SampleWindow w{0.0, 1.0, 0.5, 1.5, 0.0, 1.0, 0.0, 1.0};
  auto base = SampleSet::halton(20, 1, w).points;

  CHECK(holder_seminorm(fconst(2.0), base, 0.5, 0.5) == 0.0);

  // f = y: the y-axis quotient at separation h is h^{1-beta}, maximal at the
  // largest dyadic separation h = 1/2; other axes contribute 0.
  double beta = 0.3;
  double got = holder_seminorm(fcoord(3), base, 0.9, beta, 12);
  CHECK(got == doctest::Approx(std::pow(0.5, 1.0 - beta)).epsilon(1e-12));

  // plane wave of frequency lambda: [f]_alpha within a factor 4 of lambda^alpha
  double lam = 2 * M_PI * 41;
  Field pw = fprofile(profile_sin(lam), fcoord(1));
  for (double alpha : {0.2, 0.5, 0.8}) {
    double sem = holder_seminorm(pw, base, alpha, alpha, 20);
    double ref = std::pow(lam, alpha);
    CHECK(sem >= ref / 4.0);
    CHECK(sem <= 4.0 * ref);
  }
}

TEST_CASE("system residual: exact states vanish, mismatches are flagged") {
  SampleWindow w{0.0, 1.0, 1.0, 2.0, 0.0, 1.0, 0.0, 1.0};
  auto pts = SampleSet::halton(100, 3, w).points;
  Field z = fconst(0.0);

  // constant velocity, no stress: every term is zero
  Vec2Field uc{fconst(0.3), fconst(-0.2)};
  auto rep = residual_system(uc, z, {z, z, z}, {z, z}, z, pts);
  CHECK(rep.sup == 0.0);

  // shear-free transport: u = (sin(2 pi x2), 0) is an exact steady solution
  Vec2Field us{fprofile(profile_sin(2 * M_PI), fcoord(2)), z};
  rep = residual_system(us, z, {z, z, z}, {z, z}, z, pts);
  CHECK(rep.sup <= 1e-12);

  // dropping the stress divergence shows up at full size: S11 = sin(2 pi x1)
  Sym2Field S{fprofile(profile_sin(2 * M_PI), fcoord(1)), z, z};
  rep = residual_system(us, z, S, {z, z}, z, pts);
  CHECK(rep.sup == doctest::Approx(2 * M_PI).epsilon(1e-3));
  CHECK(rep.scale == doctest::Approx(2 * M_PI).epsilon(1e-3));

  // the pressure gradient enters with the opposite sign of div S, so
  // P = S11 restores an exact state
  auto rep2 = residual_system(us, z, S, {z, z},
                              fprofile(profile_sin(2 * M_PI), fcoord(1)), pts);
  CHECK(rep2.sup <= 1e-9);

  // residual field component check at one point
  Vec2Field rf = residual_field(us, z, S, {z, z}, z);
  Point p{0.3, 0.21, 0.4, 1.5};
  CHECK(eval_value(rf.c1, p) ==
        doctest::Approx(-2 * M_PI * std::cos(2 * M_PI * 0.21)).epsilon(1e-12));
  CHECK(eval_value(rf.c2, p) == doctest::Approx(0.0));
}

TEST_CASE("support shell test: containment passes, stray mass fails") {
  SupportBox region{0.4, 0.6, 1.8, 2.2};
  Field bt = fprofile(bump_plateau(0.1), faffine(-0.5, 1, 0, 0, 0));
  Field by = fprofile(bump_plateau(0.2), faffine(-2.0, 0, 0, 0, 1));
  Field inside = with_support(bt * by, region);
  Diagnostic d = support_shell_test(inside, region, 0.2, 0.4);
  CHECK(d.pass);
  CHECK(d.value == 0.0);

  // a bump centred outside the region is caught in the collar
  Field stray = fprofile(bump_plateau(0.2), faffine(-0.5, 1, 0, 0, 0)) *
                fprofile(bump_plateau(0.3), faffine(-2.5, 0, 0, 0, 1));
  Diagnostic d2 = support_shell_test(stray, region, 0.3, 0.6);
  CHECK_FALSE(d2.pass);
  CHECK(d2.value > 0.0);
}

TEST_CASE("scaling sweep: exact power laws and json report shape") {
  std::vector<double> lam{8, 16, 32, 64};
  std::vector<double> obs;
  for (double l : lam) obs.push_back(3.7 / l);
  SweepFit fit = scaling_sweep(lam, obs);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fit.residual <= 1e-12);
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.7).epsilon(1e-12));

  std::vector<double> obs2;
  for (double l : lam) obs2.push_back(0.5 * std::pow(l, 1.5));
  CHECK(scaling_sweep(lam, obs2).slope == doctest::Approx(1.5).epsilon(1e-12));

  std::vector<Diagnostic> ds{{"alpha", 1.5, 2.0, true, true, "note"},
                             {"beta", 3.0, 0, false, true, ""}};
  auto j = diagnostics_json(ds);
  REQUIRE(j.is_array());
  CHECK(j[0]["name"] == "alpha");
  CHECK(j[0]["value"] == 1.5);
  CHECK(j[0]["tolerance"] == 2.0);
  CHECK(j[0]["pass"] == true);
  CHECK(j[1].contains("tolerance") == false);
}
