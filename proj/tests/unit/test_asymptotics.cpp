#include <gtest/gtest.h>

#include <cmath>

#include "htq/asymptotics.hpp"
#include "htq/rng.hpp"

using namespace htq;

namespace {
const double kSqrtPi = std::sqrt(M_PI);
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }
HeavyTailRV pareto_with_mean(double beta, double nu) { return HeavyTailRV::pareto(beta * (nu - 1.0) / nu, nu); }
}  // namespace

TEST(Prop1, UnitDecomposition) {
  LstDecomposition d;
  d.alpha = 0.5;
  d.kappa = 1.0;
  auto a = prop1_tail(d);
  EXPECT_DOUBLE_EQ(a.c_pref, 1.0);
  EXPECT_NEAR(a.ccdf(4.0), 0.5 / kSqrtPi, 1e-15);
  EXPECT_NEAR(a.ccdf(a.level_for(1e-3)), 1e-3, 1e-15);
}

TEST(Prop1, RejectsInvalidDecomposition) {
  LstDecomposition d;
  d.alpha = 1.5;
  EXPECT_THROW(d.validate(), ModelError);
  d.alpha = 0.5;
  d.kappa = -1.0;
  EXPECT_THROW(d.validate(), ModelError);
}

TEST(Mg1, UnitKappaWhenTailConstantEqualsMean) {
  // Pareto(9 / (4 pi), 1.5) has C = beta
  auto b = HeavyTailRV::pareto(9.0 / (4.0 * M_PI), 1.5);
  ASSERT_NEAR(tail_constant(b).C, b.mean(), 1e-12);
  auto d = mg1_decomposition({0.5 / b.mean(), b});
  EXPECT_NEAR(d.kappa, 1.0, 1e-12);
  EXPECT_NEAR(prop1_tail(d).c_pref, 1.0, 1e-12);
}

TEST(Mg1, ParetoKappa) {
  auto b = HeavyTailRV::pareto(1.0, 1.5);
  auto d = mg1_decomposition({0.5 / 3.0, b});
  EXPECT_NEAR(d.kappa, 2.0 * kSqrtPi / 3.0, 1e-13);
  EXPECT_DOUBLE_EQ(d.alpha, 0.5);
  EXPECT_LT(mg1_decomposition({1e-9, b}).kappa, 1e-8);
}

TEST(Mg1, UnstableLoadNamesBound) {
  try {
    mg1_decomposition({0.5, HeavyTailRV::pareto(1.0, 1.5)});
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda*"), std::string::npos) << e.what();
  }
}

TEST(Mg1, ExponentialServiceHeavyTrafficScaling) {
  auto b = HeavyTailRV::exponential(0.5);
  Mg1Spec s{0.25, b};
  auto plan = mg1_ht_plan(s);
  EXPECT_EQ(plan.law, LimitLaw::UnitExponential);
  EXPECT_DOUBLE_EQ(plan.alpha, 1.0);
  EXPECT_NEAR(plan.slack_scaling, (1.0 - 0.5) / b.mean(), 1e-14);
  EXPECT_NEAR(plan.slack_scaling, (1.0 - 0.5) * 2.0 * b.mean() / b.second_moment(), 1e-14);
}

TEST(Mg1, ParetoHeavyTrafficScalings) {
  auto b = HeavyTailRV::pareto(1.0, 1.5);
  for (double rho : {0.5, 0.9, 0.99}) {
    auto plan = mg1_ht_plan({rho / 3.0, b});
    double C = 2.0 * kSqrtPi;
    EXPECT_LT(rel(plan.slack_scaling, std::pow((1 - rho) * 3.0 / C, 2.0)), 1e-12);
    EXPECT_LT(rel(plan.scaling, std::pow(mg1_decomposition({rho / 3.0, b}).kappa, -2.0)), 1e-12);
    EXPECT_LT(rel(plan.scaling * std::pow(rho, 2.0), plan.slack_scaling), 1e-12);
  }
}

TEST(Mg1, RejectsIntegerIndex) { EXPECT_THROW(mg1_decomposition({0.1, HeavyTailRV::pareto(1.0, 2.0)}), std::invalid_argument); }

TEST(SpeedTail, PlugInFormula) {
  auto b = HeavyTailRV::pareto(1.0 / 3.0, 1.5);
  Mg1SpeedSpec s{1.0, 2.0, b};
  double C = tail_constant(b).C;
  EXPECT_NEAR(mg1_speed_tail(s).c_pref, C / (2.0 - 1.0), 1e-14);
  EXPECT_NEAR(mg1_speed_tail(s).ccdf(100.0), C / kSqrtPi * 0.1, 1e-14);
  EXPECT_LT(mg1_speed_tail({1e-12, 2.0, b}).c_pref, 1e-11);
}

TEST(SpeedTail, UnitSpeedRecoversMg1) {
  auto b = HeavyTailRV::pareto(0.7, 1.3);
  for (double lam : {0.05, 0.1, 0.3}) {
    EXPECT_LT(rel(mg1_speed_tail({lam, 1.0, b}).c_pref, prop1_tail(mg1_decomposition({lam, b})).c_pref), 1e-13);
  }
}

TEST(SpeedTail, SpeedScalingEquivalence) {
  // workload at speed c with service B is c times the workload at speed 1 with service B / c
  auto b = HeavyTailRV::pareto(1.0, 1.6);
  double c = 2.5, lam = 0.5;
  double alpha = 0.6;
  EXPECT_LT(rel(mg1_speed_tail({lam, c, b}).c_pref,
                std::pow(c, alpha) * mg1_speed_tail({lam, 1.0, b.scaled(1.0 / c)}).c_pref),
            1e-13);
}

TEST(Fluid, VanishesWithRareOnPeriods) {
  auto on = HeavyTailRV::pareto(1.0, 1.5);
  double prev = INFINITY;
  for (double off_mean : {9.0, 90.0, 900.0, 9e5}) {
    double c = fluid_tail({2.0, 1.0, on, HeavyTailRV::exponential(1.0 / off_mean)}).c_pref;
    EXPECT_LT(c, prev);
    prev = c;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Fluid, MatchingSpeedDefiningEquation) {
  auto on = HeavyTailRV::pareto(1.0, 1.5);
  FluidSpec f{2.0, 1.0, on, HeavyTailRV::exponential(1.0 / 9.0)};
  ASSERT_NEAR(f.p_on(), 0.25, 1e-15);
  double lh = 0.3;
  double c = matching_speed(f, lh);
  auto m = matched_mg1(f, lh);
  double lhs = (1.0 - f.p_on()) * f.rho() / (f.d - f.rho());
  double rhs = lh * m.beta() / (c - lh * m.beta());
  EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  EXPECT_LT(rel(fluid_tail(f).c_pref, mg1_speed_tail(m).c_pref), 1e-12);
}

TEST(Fluid, MatchingIdentityRandomized) {
  Stream s(42, 0);
  for (int i = 0; i < 500; ++i) {
    double nu = 1.05 + 0.9 * s.uniform();
    double d = 0.5 + s.uniform(), r = d * (1.05 + 3.0 * s.uniform());
    auto on = HeavyTailRV::pareto(0.1 + s.uniform(), nu);
    double p_on_max = d / r;
    double p_on = p_on_max * (0.02 + 0.95 * s.uniform());
    double off_mean = on.mean() * (1.0 - p_on) / p_on;
    FluidSpec f{r, d, on, HeavyTailRV::exponential(1.0 / off_mean)};
    double lh = 0.01 + 5.0 * s.uniform();
    ASSERT_LT(rel(fluid_tail(f).c_pref, mg1_speed_tail(matched_mg1(f, lh)).c_pref), 1e-12);
  }
}

TEST(Fluid, RejectsUnstableAndAlwaysOn) {
  auto on = HeavyTailRV::pareto(1.0, 1.5);
  EXPECT_THROW(fluid_tail({2.0, 1.0, on, HeavyTailRV::exponential(1.0)}), ModelError);
  EXPECT_THROW(matching_speed({2.0, 1.0, on, HeavyTailRV::exponential(1e12)}, 0.3), ModelError);
  EXPECT_THROW(fluid_tail({0.5, 1.0, on, HeavyTailRV::exponential(0.1)}), ModelError);
}

TEST(MultiClass, ReducedSystemPlugIn) {
  MultiClassSpec m;
  m.lambda = 0.8;
  m.p = {0.5, 0.5};
  m.services = {HeavyTailRV::exponential(1.0), pareto_with_mean(1.0, 1.5)};
  m.i0 = 1;
  auto k = multiclass_constants(m);
  EXPECT_NEAR(k.reduced.c, 0.6, 1e-15);
  EXPECT_NEAR(k.reduced.lambda_hat, 0.4, 1e-15);
  EXPECT_NEAR(k.zeta, 2.0, 1e-15);
  EXPECT_LT(rel(prop1_tail(k.decomposition).c_pref, mg1_speed_tail(k.reduced).c_pref), 1e-12);
}

TEST(MultiClass, SingleClassReducesToMg1) {
  MultiClassSpec m;
  m.lambda = 0.2;
  m.p = {1.0};
  m.services = {HeavyTailRV::pareto(1.0, 1.5)};
  auto k = multiclass_constants(m);
  EXPECT_NEAR(k.zeta, 1.0, 1e-15);
  auto d = mg1_decomposition({0.2, m.services[0]});
  EXPECT_LT(rel(k.decomposition.kappa, d.kappa), 1e-14);
}

TEST(MultiClass, TailIdentityRandomized) {
  Stream s(8, 0);
  for (int i = 0; i < 1000; ++i) {
    MultiClassSpec m;
    std::size_t K = 2 + static_cast<std::size_t>(3 * s.uniform());
    double nu = 1.05 + 0.9 * s.uniform();
    double tot = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      m.p.push_back(0.05 + s.uniform());
      tot += m.p.back();
      m.services.push_back(j == 0 ? HeavyTailRV::pareto(0.1 + s.uniform(), nu) : HeavyTailRV::exponential(0.2 + 3 * s.uniform()));
    }
    for (auto& w : m.p) w /= tot;
    m.lambda = (0.05 + 0.9 * s.uniform()) / m.beta();
    auto k = multiclass_constants(m);
    ASSERT_LT(rel(prop1_tail(k.decomposition).c_pref, mg1_speed_tail(k.reduced).c_pref), 1e-12);
    ASSERT_NEAR(k.reduced_ht.lambda_star(), m.lambda_star() * m.p[0], 1e-9);
  }
}

TEST(MultiClass, RejectsHeavyLightClass) {
  MultiClassSpec m;
  m.lambda = 0.1;
  m.p = {0.5, 0.5};
  m.services = {HeavyTailRV::pareto(1.0, 1.5), HeavyTailRV::pareto(1.0, 1.8)};
  EXPECT_THROW(multiclass_constants(m), ModelError);
}

namespace {
AltSpeedSpec alt_a() { return {0.5, HeavyTailRV::pareto(1.0, 1.5), 0.5, 3.0, 1.0, HeavyTailRV::exponential(1.0)}; }
AltSpeedSpec alt_b() { return {0.8, HeavyTailRV::exponential(1.0), 0.0, 2.0, 0.1, HeavyTailRV::pareto(0.7 / 1.7, 1.7)}; }
}  // namespace

TEST(AltSpeed, SpeedAverageIdentity) {
  for (auto s : {alt_a(), alt_b()}) {
    double nd = s.nu_rate * s.delta();
    EXPECT_NEAR(s.s_high - nd * (s.s_high - s.s_low) / (1.0 + nd), s.s_bar(), 1e-12);
    EXPECT_NEAR(s.p_high(), 1.0 / (1.0 + nd), 1e-15);
  }
}

TEST(AltSpeed, CaseAMatchesReferenceA) {
  auto s = alt_a();
  auto k = altspeed_constants(s, AltCase::A);
  auto refs = altspeed_refsystems(s);
  EXPECT_NEAR(refs.ref_a.c, s.s_bar(), 1e-15);
  EXPECT_LT(rel(k.asymptote.c_pref, mg1_speed_tail(refs.ref_a).c_pref), 1e-12);
}

TEST(AltSpeed, CaseAEtaIndependentOfLowSpeedNearBoundary) {
  auto s = alt_a();
  s.lambda = s.s_low / s.beta() * (1.0 + 1e-9);
  double e1 = altspeed_constants(s, AltCase::A).eta;
  s.s_low *= 0.5;
  double e2 = altspeed_constants(s, AltCase::A).eta;
  EXPECT_NEAR(e1, e2, 1e-12);
}

TEST(AltSpeed, CaseBMatchesReferenceBImage) {
  auto s = alt_b();
  auto k = altspeed_constants(s, AltCase::B);
  auto img = altspeed_refb_image(s);
  EXPECT_NEAR(img.lambda_hat, s.nu_rate / (s.s_high - s.lambda * s.beta()), 1e-15);
  EXPECT_NEAR(img.beta(), (s.lambda * s.beta() - s.s_low) * s.delta(), 1e-14);
  EXPECT_LT(rel(k.asymptote.c_pref, mg1_speed_tail(img).c_pref), 1e-12);
}

TEST(AltSpeed, CaseCSumsBothContributions) {
  AltSpeedSpec s{0.1, HeavyTailRV::pareto(1.0, 1.5), 0.2, 2.0, 0.5, HeavyTailRV::pareto(1.0, 1.5)};
  double nd = s.nu_rate * s.delta();
  double C = 2.0 * kSqrtPi;
  double eta = s.lambda * (1.0 + nd) * C + s.nu_rate * std::pow(s.lambda * s.beta() - s.s_low, 1.5) * C;
  EXPECT_NEAR(altspeed_constants(s, AltCase::C).eta, eta, 1e-13);
  EXPECT_THROW(altspeed_ht(s, AltCase::C), ModelError);
}

TEST(AltSpeed, CaseRequiresMatchingTails) {
  EXPECT_THROW(altspeed_constants(alt_a(), AltCase::B), ModelError);
  EXPECT_THROW(altspeed_constants(alt_b(), AltCase::A), ModelError);
}

TEST(AltSpeed, EqualSpeedsDegenerate) {
  AltSpeedSpec s{0.5, HeavyTailRV::pareto(1.0, 1.5), 1.5, 1.5, 1.0, HeavyTailRV::exponential(1.0)};
  EXPECT_THROW(s.validate_basic(), ModelError);
}

TEST(AltSpeed, HeavyTrafficZeta) {
  EXPECT_DOUBLE_EQ(altspeed_ht(alt_a(), AltCase::A).zeta, 1.0);
  auto s = alt_b();
  auto plan = altspeed_ht(s, AltCase::B);
  EXPECT_GT(plan.zeta, 1.0);
  // alternative form: (1 + nu delta) s_bar / eta* C_hat / beta_hat, eta* = nu (s_bar - s_L)^nu_D C_D
  double nd = s.nu_rate * s.delta();
  auto tc = tail_constant(s.low);
  double eta_star = s.nu_rate * std::pow(s.s_bar() - s.s_low, tc.nu) * tc.C;
  auto hat_b = s.low.scaled(s.s_bar() - s.s_low);
  double alt = (1.0 + nd) * s.s_bar() / eta_star * tail_constant(hat_b).C / hat_b.mean();
  EXPECT_LT(rel(plan.zeta, alt), 1e-12);
}

TEST(HtPlan, UnitKappaUnitScaling) {
  LstDecomposition d;
  d.alpha = 0.5;
  d.kappa = 1.0;
  auto plan = ht_plan(d, 1.0, {0.5, 1.0, HeavyTailRV::pareto(1.0 / 3.0, 1.5)}, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(plan.scaling, 1.0);
}

TEST(HtPlan, CouplingIdentity) {
  std::vector<HtLimitPlan> plans{mg1_ht_plan({0.2, HeavyTailRV::pareto(1.0, 1.5)}), altspeed_ht(alt_a(), AltCase::A),
                                 altspeed_ht(alt_b(), AltCase::B)};
  MultiClassSpec m;
  m.lambda = 0.3;
  m.p = {0.4, 0.6};
  m.services = {HeavyTailRV::pareto(1.0, 1.5), HeavyTailRV::exponential(1.0)};
  auto k = multiclass_constants(m);
  plans.push_back(ht_plan(k.decomposition, k.zeta, k.reduced_ht, m.lambda, m.lambda_star()));
  for (const auto& p : plans)
    for (double e : {1e-1, 1e-2, 1e-3}) {
      EXPECT_LT(std::abs(p.coupling_residual(e)), 1e-14);
      double lhs = (p.hat_lambda_star - p.hat_lambda_eps(e)) / p.hat_lambda_star;
      double rhs = p.zeta * (p.lambda_star - p.lambda_eps(e)) / p.lambda_star;
      EXPECT_LT(std::abs(lhs - rhs), 1e-14);
    }
}

namespace {
Mg2Occupancy solve_pi2(const Mg2Spec& s, double pi0, double pi1) {
  double ib = 1.0 / s.beta();
  return {pi0, pi1, ((ib + s.mu - s.lambda) - (ib + s.mu) * pi0 - ib * pi1) / s.mu};
}
}  // namespace

TEST(Mg2, CollapseToSimplifiedConstant) {
  Stream s(77, 0);
  int done = 0;
  while (done < 1000) {
    Mg2Spec q{0.0, 0.2 + 2.0 * s.uniform(), HeavyTailRV::pareto(0.1 + s.uniform(), 1.05 + 0.9 * s.uniform())};
    q.lambda = q.mu + (0.02 + 0.96 * s.uniform()) / q.beta();
    auto o = solve_pi2(q, 0.5 * s.uniform(), 0.5 * s.uniform());
    if (!(o.pi2 >= 0.0 && o.pi0 + o.pi1 + o.pi2 <= 1.0)) continue;
    ASSERT_LT(std::abs(o.identity_residual(q)), 1e-13);
    auto k = mg2_constants(q, o);
    double gl = k.decomposition.gamma + k.decomposition.kappa * k.decomposition.g0;
    ASSERT_LT(rel(gl, k.simplified_c_w), 1e-12);
    ASSERT_LT(rel(k.asymptote.c_pref, k.simplified_c_w), 1e-12);
    ++done;
  }
}

TEST(Mg2, ZetaIsOnePlusMuBeta) {
  Mg2Spec q{1.5, 1.0, pareto_with_mean(1.0, 1.5)};
  auto k = mg2_constants(q, solve_pi2(q, 0.15, 0.1));
  EXPECT_DOUBLE_EQ(k.plan.zeta, 2.0);
  EXPECT_NEAR(mg2_hat(q).lambda_star(), q.lambda_star(), 1e-14);
}

TEST(Mg2, VanishesAsLambdaApproachesMu) {
  Mg2Spec q{1.0 + 1e-10, 1.0, pareto_with_mean(1.0, 1.5)};
  auto k = mg2_constants(q, solve_pi2(q, 0.2, 0.2));
  EXPECT_LT(k.asymptote.c_pref, 1e-4);
}

TEST(Mg2, RejectsOccupancyViolatingIdentity) {
  Mg2Spec q{1.5, 1.0, pareto_with_mean(1.0, 1.5)};
  auto o = solve_pi2(q, 0.15, 0.1);
  o.pi2 += 0.01;
  EXPECT_THROW(mg2_constants(q, o), ModelError);
  EXPECT_THROW(mg2_constants({0.5, 1.0, pareto_with_mean(1.0, 1.5)}, solve_pi2(q, 0.15, 0.1)), ModelError);
}

TEST(Mg2, FluidHeuristicIsStable) {
  Mg2Spec q{1.5, 1.0, pareto_with_mean(1.0, 1.5)};
  auto k = mg2_constants(q, solve_pi2(q, 0.15, 0.1));
  EXPECT_NO_THROW(k.fluid.validate());
  EXPECT_LT(k.fluid.rho(), k.fluid.d);
}
