#include "htq/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "htq/asymptotics.hpp"
#include "htq/mlf.hpp"
#include "htq/sim.hpp"
#include "htq/stats.hpp"

namespace htq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag) { return splitmix64(seed ^ (0xA5A5ULL + tag)); }

HeavyTailRV rv_at(const KvDoc& doc, const std::string& prefix) { return HeavyTailRV::from_kv(doc.sub(prefix)); }

std::size_t count_at(const KvDoc& doc, const std::string& key) {
  long long v = doc.integer(key);
  if (v <= 0) throw ConfigError("key '" + key + "' must be a positive count");
  return static_cast<std::size_t>(v);
}

Verdict check_row(const std::string& exp, const std::string& model, double stat, double ref, double lo, double hi) {
  Verdict v;
  v.experiment = exp;
  v.model = model;
  v.empirical = stat;
  v.asymptote = ref;
  v.ci_low = lo;
  v.ci_high = hi;
  v.pass = stat >= lo && stat <= hi;
  return v;
}

Verdict tail_row(const std::string& exp, const std::string& model, const TailVerdict& t, double lo, double hi) {
  Verdict v;
  v.experiment = exp;
  v.model = model;
  v.probe_p = t.probe_p;
  v.x = t.quantile_x;
  v.empirical = t.empirical_ccdf;
  v.asymptote = t.asymptote_value;
  v.ratio = t.ratio;
  v.ci_low = t.ci_low;
  v.ci_high = t.ci_high;
  v.pass = t.ratio >= lo && t.ratio <= hi;
  return v;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

nlohmann::json tail_json(const TailVerdict& t, double lo, double hi) {
  return {{"probe_p", t.probe_p}, {"x", t.quantile_x},   {"empirical", t.empirical_ccdf}, {"ratio", t.ratio},
          {"ci_low", t.ci_low},   {"ci_high", t.ci_high}, {"band", {lo, hi}}};
}

Mg1Spec mg1_from(const KvDoc& p) {
  Mg1Spec s;
  s.service = rv_at(p, "service");
  s.lambda = p.has("lambda") ? p.num("lambda") : p.num("rho") / s.service.mean();
  s.validate();
  return s;
}

AltSpeedSpec alt_from(const KvDoc& p) {
  AltSpeedSpec s;
  s.lambda = p.num("lambda");
  s.service = rv_at(p, "service");
  s.s_low = p.num("s_low");
  s.s_high = p.num("s_high");
  s.nu_rate = p.num("nu_rate");
  s.low = rv_at(p, "low");
  s.validate();
  return s;
}

FluidSpec fluid_from(const KvDoc& p) {
  FluidSpec s;
  s.r = p.num("r");
  s.d = p.num("d");
  s.on = rv_at(p, "on");
  s.off = rv_at(p, "off");
  s.validate();
  return s;
}

void run_e1(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  Mg1Spec spec = mg1_from(p);
  auto d = mg1_decomposition(spec);
  auto asym = prop1_tail(d);
  auto pool = pk_exact_sample({spec.lambda, 1.0, spec.service}, count_at(p, "samples"), cfg.seed);
  auto probes = p.nums("probes");
  auto lo = p.nums("band_low"), hi = p.nums("band_high");
  if (lo.size() != probes.size() || hi.size() != probes.size()) throw ConfigError("E1: one band per probe required");
  auto tv = tail_ratio(pool, asym, probes);
  for (std::size_t i = 0; i < tv.size(); ++i) r.verdicts.push_back(tail_row(r.experiment, "mg1", tv[i], lo[i], hi[i]));
  r.details["decomposition"] = to_json(d);
  r.details["asymptote"] = to_json(asym);
  r.details["rho"] = spec.rho();
}

void run_e2(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  auto rhos = p.nums("rhos");
  std::size_t n = count_at(p, "samples");
  double ks_max = p.num("ks_max");
  double prev = INFINITY;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    KvDoc q = p;
    q.set("rho", format_double(rhos[i]));
    Mg1Spec spec = mg1_from(q);
    auto plan = mg1_ht_plan(spec);
    auto pool = pk_exact_sample({spec.lambda, 1.0, spec.service}, n, sub_seed(cfg.seed, i)).scaled(plan.slack_scaling);
    MittagLeffler ml(plan.alpha);
    double ks = ks_distance(pool, [&](double x) { return ml.cdf(x); });
    double bound = std::isinf(prev) ? 1.0 : prev;
    if (i + 1 == rhos.size()) bound = std::min(bound, ks_max);
    char name[64];
    std::snprintf(name, sizeof name, "mg1:ks_ml rho=%g", rhos[i]);
    auto v = check_row(r.experiment, name, ks, bound, 0.0, bound);
    v.pass = ks < bound || (std::isinf(prev) && ks <= 1.0 && i + 1 < rhos.size());
    r.verdicts.push_back(v);
    rows.push_back({{"rho", rhos[i]}, {"ks", ks}, {"slack_scaling", plan.slack_scaling}, {"scaling", plan.scaling}});
    prev = ks;
  }
  r.details["ks"] = rows;
}

void run_e3(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  Mg1Spec spec = mg1_from(p);
  auto plan = mg1_ht_plan(spec);
  if (plan.law != LimitLaw::UnitExponential) throw ConfigError("E3: service must have a finite second moment");
  auto pool = pk_exact_sample({spec.lambda, 1.0, spec.service}, count_at(p, "samples"), cfg.seed)
                  .scaled(plan.slack_scaling);
  double ks = ks_distance(pool, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
  double ks_max = p.num("ks_max");
  auto v = check_row(r.experiment, "mg1:ks_exp", ks, ks_max, 0.0, ks_max);
  v.pass = ks < ks_max;
  r.verdicts.push_back(v);
  r.details["plan"] = to_json(plan);
  r.details["ks"] = ks;
}

void run_e4(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  // (i) algebraic equality over random stable specs
  std::size_t trials = count_at(p, "trials");
  double tol = p.num("algebra_tol");
  Stream s(cfg.seed, 0x4E4);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    double nu = 1.02 + 0.96 * s.uniform();
    MultiClassSpec m;
    m.p = {0.02 + 0.96 * s.uniform(), 0.0};
    m.p[1] = 1.0 - m.p[0];
    m.services = {HeavyTailRV::pareto(0.1 + 5.0 * s.uniform(), nu), HeavyTailRV::exponential(0.1 + 5.0 * s.uniform())};
    if (s.uniform() < 0.5) std::swap(m.p[0], m.p[1]), std::swap(m.services[0], m.services[1]);
    m.i0 = m.services[0].family() == Family::Pareto ? 0 : 1;
    m.lambda = (0.01 + 0.98 * s.uniform()) / m.beta();
    auto k = multiclass_constants(m);
    worst = std::max(worst, rel_diff(prop1_tail(k.decomposition).c_pref, mg1_speed_tail(k.reduced).c_pref));
  }
  auto v = check_row(r.experiment, "multiclass:reduced_tail_identity", worst, 0.0, 0.0, tol);
  r.verdicts.push_back(v);

  // (ii) simulated full vs reduced system
  MultiClassSpec m;
  m.p = {p.num("p_heavy"), 1.0 - p.num("p_heavy")};
  m.services = {rv_at(p, "heavy"), rv_at(p, "light")};
  m.i0 = 0;
  m.lambda = p.has("lambda") ? p.num("lambda") : p.num("rho") / m.beta();
  auto k = multiclass_constants(m);
  auto asym = prop1_tail(k.decomposition);
  std::size_t n = count_at(p, "samples");
  auto full = pk_exact_sample({m.lambda, 1.0, m.aggregate_service()}, n, sub_seed(cfg.seed, 1));
  auto red = pk_exact_sample(k.reduced, n, sub_seed(cfg.seed, 2));
  double probe = p.num("probe");
  double x = asym.level_for(probe);
  auto ef = empirical_ccdf(full, x), er = empirical_ccdf(red, x);
  Verdict w;
  w.experiment = r.experiment;
  w.model = "multiclass:full_vs_reduced";
  w.probe_p = probe;
  w.x = x;
  w.empirical = ef.p;
  w.asymptote = er.p;
  w.ratio = er.p > 0.0 ? ef.p / er.p : INFINITY;
  w.ci_low = er.ci_high > 0.0 ? ef.ci_low / er.ci_high : 0.0;
  w.ci_high = er.ci_low > 0.0 ? ef.ci_high / er.ci_low : INFINITY;
  w.pass = w.ratio >= p.num("band_low") && w.ratio <= p.num("band_high");
  r.verdicts.push_back(w);
  r.details["worst_identity_residual"] = worst;
  r.details["decomposition"] = to_json(k.decomposition);
  r.details["reduced"] = to_json(k.reduced);
  r.details["zeta"] = k.zeta;
  r.details["full_vs_asymptote"] = ef.p / asym.ccdf(x);
  r.details["reduced_vs_asymptote"] = er.p / asym.ccdf(x);
}

void altspeed_tail(const ExperimentConfig& cfg, Report& r, AltCase c, AltSpeedResult& res, AltSpeedSpec& spec,
                   AltSpeedConstants& k) {
  const auto& p = cfg.params;
  spec = alt_from(p);
  k = altspeed_constants(spec, c);
  AltSpeedOptions opt;
  opt.sample_prob = p.num("sample_prob", 1.0);
  res = altspeed_des(spec, count_at(p, "events"), cfg.seed, opt);
  auto tv = tail_ratio(res.pool_high, k.asymptote, {p.num("probe")});
  r.verdicts.push_back(tail_row(r.experiment, "altspeed_" + to_string(c) + ":pool_high", tv[0], p.num("band_low"),
                                p.num("band_high")));
  r.details["constants"] = {{"eta", k.eta}, {"decomposition", to_json(k.decomposition)},
                            {"asymptote", to_json(k.asymptote)}};
  r.details["pool_high_size"] = res.pool_high.size();
  auto all = tail_ratio(res.pool_all, k.asymptote, {p.num("probe")});
  r.details["pool_all_ratio"] = all[0].ratio;
  r.details["p_high"] = {{"estimate", res.p_high}, {"se", res.p_high_se}, {"theory", spec.p_high()}};
}

void run_e5(const ExperimentConfig& cfg, Report& r) {
  AltSpeedResult res;
  AltSpeedSpec spec;
  AltSpeedConstants k;
  altspeed_tail(cfg, r, AltCase::A, res, spec, k);
  const auto& p = cfg.params;
  auto refs = altspeed_refsystems(spec);
  double res_a = rel_diff(k.asymptote.c_pref, mg1_speed_tail(refs.ref_a).c_pref);
  r.verdicts.push_back(check_row(r.experiment, "altspeed_a:refA_identity", res_a, 0.0, 0.0, p.num("algebra_tol")));
  double se_mult = p.num("se_mult");
  double dev = std::abs(res.p_high - spec.p_high());
  auto v = check_row(r.experiment, "altspeed_a:p_high", res.p_high, spec.p_high(), spec.p_high() - se_mult * res.p_high_se,
                     spec.p_high() + se_mult * res.p_high_se);
  v.ratio = res.p_high / spec.p_high();
  v.pass = dev <= se_mult * res.p_high_se;
  r.verdicts.push_back(v);
}

void run_e6(const ExperimentConfig& cfg, Report& r) {
  AltSpeedResult res;
  AltSpeedSpec spec;
  AltSpeedConstants k;
  altspeed_tail(cfg, r, AltCase::B, res, spec, k);
  const auto& p = cfg.params;
  auto image = altspeed_refb_image(spec);
  double res_b = rel_diff(k.asymptote.c_pref, mg1_speed_tail(image).c_pref);
  r.verdicts.push_back(check_row(r.experiment, "altspeed_b:refB_identity", res_b, 0.0, 0.0, p.num("algebra_tol")));

  auto refs = altspeed_refsystems(spec);
  std::size_t n = count_at(p, "refb_samples");
  // 10% of the cycles are warmup
  auto fl = fluid_sim(refs.ref_b, n + n / 9 + 1, sub_seed(cfg.seed, 1));
  auto pk = pk_exact_sample(image, n, sub_seed(cfg.seed, 2));
  double ks = ks_distance(fl.at_on_start, pk);
  double ks_max = p.num("ks_max");
  auto v = check_row(r.experiment, "altspeed_b:refB_on_start_vs_mg1", ks, ks_max, 0.0, ks_max);
  v.pass = ks < ks_max;
  r.verdicts.push_back(v);
  r.details["refB"] = to_json(refs.ref_b);
  r.details["refB_image"] = to_json(image);
  r.details["refB_ks"] = ks;
}

void run_e7(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  Mg2Spec spec;
  spec.service = rv_at(p, "service");
  spec.mu = p.has("mu_beta") ? p.num("mu_beta") / spec.service.mean() : p.num("mu");
  spec.lambda = p.has("lambda") ? p.num("lambda") : spec.mu + p.num("lambda_frac") * (spec.lambda_star() - spec.mu);
  spec.validate();
  double se_mult = p.num("se_mult");
  auto des = mg2_des(spec, count_at(p, "customers"), cfg.seed);

  // (i) identity relation from simulated occupancies
  auto v = check_row(r.experiment, "mg2:identity_residual", des.identity_residual, 0.0, -se_mult * des.identity_se,
                     se_mult * des.identity_se);
  r.verdicts.push_back(v);

  // (ii) waiting-time tail
  double tol = std::max(1e-12, se_mult * des.identity_se);
  auto k = mg2_constants(spec, des.occ, std::max(tol, std::abs(des.identity_residual)));
  auto tv = tail_ratio(des.waits, k.asymptote, {p.num("probe")});
  r.verdicts.push_back(tail_row(r.experiment, "mg2:waits", tv[0], p.num("band_low"), p.num("band_high")));

  // (iii) collapse over random occupancies satisfying the identity exactly
  std::size_t trials = count_at(p, "trials");
  double atol = p.num("algebra_tol");
  Stream s(cfg.seed, 0x4E7);
  double worst = 0.0;
  std::size_t done = 0;
  while (done < trials) {
    Mg2Spec q;
    double nu = 1.05 + 0.9 * s.uniform();
    q.service = HeavyTailRV::pareto(0.05 + 2.0 * s.uniform(), nu);
    q.mu = (0.1 + 3.0 * s.uniform()) / q.service.mean();
    q.lambda = q.mu + (0.02 + 0.96 * s.uniform()) / q.service.mean();
    double ib = 1.0 / q.service.mean();
    Mg2Occupancy o;
    o.pi0 = s.uniform() * 0.5;
    o.pi1 = s.uniform() * 0.5;
    o.pi2 = ((ib + q.mu - q.lambda) - (ib + q.mu) * o.pi0 - ib * o.pi1) / q.mu;
    if (!(o.pi2 >= 0.0 && o.pi0 + o.pi1 + o.pi2 <= 1.0)) continue;
    auto kk = mg2_constants(q, o, 1e-9);
    worst = std::max(worst, rel_diff(kk.asymptote.c_pref, kk.simplified_c_w));
    ++done;
  }
  r.verdicts.push_back(check_row(r.experiment, "mg2:collapse", worst, 0.0, 0.0, atol));

  // (iv) slack factor with B_hat = B / (1 + mu beta)
  double zeta_ref = 1.0 + spec.mu * spec.beta();
  r.verdicts.push_back(check_row(r.experiment, "mg2:zeta", rel_diff(k.plan.zeta, zeta_ref), 0.0, 0.0, atol));

  r.details["occupancy"] = {{"pi0", des.occ.pi0}, {"pi1", des.occ.pi1}, {"pi2", des.occ.pi2},
                            {"identity_residual", des.identity_residual}, {"identity_se", des.identity_se}};
  r.details["decomposition"] = to_json(k.decomposition);
  r.details["asymptote"] = to_json(k.asymptote);
  r.details["plan"] = to_json(k.plan);
  r.details["fluid_heuristic"] = to_json(k.fluid);
  r.details["fluid_heuristic_c_pref"] = fluid_tail(k.fluid).c_pref;
  r.details["lambda"] = spec.lambda;
  r.details["mu"] = spec.mu;
}

void run_e8(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  FluidSpec f = fluid_from(p);
  auto asym = fluid_tail(f);
  auto m = matched_mg1(f, p.num("lambda_hat"));
  double res = rel_diff(asym.c_pref, mg1_speed_tail(m).c_pref);
  r.verdicts.push_back(check_row(r.experiment, "fluid:matching_identity", res, 0.0, 0.0, p.num("algebra_tol")));
  FluidOptions opt;
  opt.grid_per_cycle = p.num("grid_per_cycle", 1.0);
  auto out = fluid_sim(f, count_at(p, "cycles"), cfg.seed, opt);
  auto tv = tail_ratio(out.stationary, asym, {p.num("probe")});
  r.verdicts.push_back(tail_row(r.experiment, "fluid:stationary", tv[0], p.num("band_low"), p.num("band_high")));
  r.details["fluid"] = to_json(f);
  r.details["asymptote"] = to_json(asym);
  r.details["matched"] = to_json(m);
  r.details["stationary_size"] = out.stationary.size();
}

void run_p1(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  std::size_t pts = count_at(p, "grid_points");
  double xmax = p.num("x_max");
  double worst = 0.0;
  for (std::size_t i = 0; i < pts; ++i) {
    double x = xmax * static_cast<double>(i) / static_cast<double>(pts - 1);
    double oracle = 1.0 - std::exp(x) * std::erfc(std::sqrt(x));
    worst = std::max(worst, std::abs(ml_cdf(0.5, x) - oracle));
  }
  r.verdicts.push_back(check_row(r.experiment, "mlf:cdf_vs_erfc", worst, 0.0, 0.0, p.num("cdf_tol")));
  std::size_t n = count_at(p, "samples");
  double ks_max = p.num("ks_max");
  auto alphas = p.nums("alphas");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    MittagLeffler ml(alphas[i]);
    SamplePool pool;
    pool.values.resize(n);
    std::size_t chunk = 1 << 16;
    for_each_chunk(sub_seed(cfg.seed, i), (n + chunk - 1) / chunk, 0, [&](std::size_t c, Stream& s) {
      for (std::size_t j = c * chunk; j < std::min(n, (c + 1) * chunk); ++j) pool.values[j] = ml.sample(s);
    });
    double ks = ks_distance(pool, [&](double x) { return ml.cdf(x); });
    char name[64];
    std::snprintf(name, sizeof name, "mlf:sample_ks alpha=%g", alphas[i]);
    auto v = check_row(r.experiment, name, ks, ks_max, 0.0, ks_max);
    v.pass = ks < ks_max;
    r.verdicts.push_back(v);
  }
}

void run_p2(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  HeavyTailRV b = rv_at(p, "service");
  auto tc = tail_constant(b);
  double omega = p.num("omega");
  double lst = lst_numeric(residual(b), omega);
  double ratio = (1.0 - lst) * b.mean() / (tc.C * std::pow(omega, tc.nu - 1.0));
  auto v = check_row(r.experiment, "dist:residual_lst_tauberian", ratio, 1.0, p.num("band_low"), p.num("band_high"));
  v.ratio = ratio;
  r.verdicts.push_back(v);
  r.details["lst"] = lst;
}

void run_p3(const ExperimentConfig& cfg, Report& r) {
  const auto& p = cfg.params;
  std::size_t n = count_at(p, "samples");
  double lo = p.num("band_low"), hi = p.num("band_high");
  struct Case {
    const char* name;
    double rho;
    double x;
  };
  KvDoc qa = p;
  qa.set("rho", p.str("rho_a"));
  Mg1Spec sa = mg1_from(qa);
  double alpha = mg1_decomposition(sa).alpha;
  // x where the normalised limit tail x^-alpha / Gamma(1 - alpha) equals the probe
  double xa = std::pow(1.0 / (std::tgamma(1.0 - alpha) * p.num("probe_a")), 1.0 / alpha);
  Case cases[] = {{"mg1:scaled_tail fixed_load", p.num("rho_a"), xa}, {"mg1:scaled_tail heavy_traffic", p.num("rho_b"), p.num("x_b")}};
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < 2; ++i) {
    KvDoc q = p;
    q.set("rho", format_double(cases[i].rho));
    Mg1Spec spec = mg1_from(q);
    auto plan = mg1_ht_plan(spec);
    auto pool = pk_exact_sample({spec.lambda, 1.0, spec.service}, n, sub_seed(cfg.seed, i));
    auto e = empirical_ccdf(pool, cases[i].x / plan.scaling);
    double norm = std::tgamma(1.0 - plan.alpha) * std::pow(cases[i].x, plan.alpha);
    Verdict v = check_row(r.experiment, cases[i].name, e.p * norm, 1.0, lo, hi);
    v.x = cases[i].x;
    v.ratio = e.p * norm;
    r.verdicts.push_back(v);
    rows.push_back({{"rho", cases[i].rho}, {"x", cases[i].x}, {"scaling", plan.scaling}, {"value", e.p * norm},
                    {"ci", {e.ci_low * norm, e.ci_high * norm}}});
  }
  r.details["cases"] = rows;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double parse_cell(const std::string& s) { return s.empty() ? kNaN : std::stod(s); }

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"E1", "E2", "E3", "E4", "E5", "E6", "E7", "E8", "P1", "P2", "P3"};
  return ids;
}

std::string criterion_summary(const std::string& id) {
  if (id == "E1") return "M/G/1 tail ratio vs Pareto asymptote";
  if (id == "E2") return "Mittag-Leffler heavy-traffic limit (KS)";
  if (id == "E3") return "exponential heavy-traffic limit (KS)";
  if (id == "E4") return "multi-class reduced-load equivalence";
  if (id == "E5") return "alternating speed, heavy service";
  if (id == "E6") return "alternating speed, heavy low-speed periods";
  if (id == "E7") return "heterogeneous M/G/2 waiting time";
  if (id == "E8") return "fluid queue vs matched M/G/1";
  if (id == "P1") return "Mittag-Leffler numerics and sampler";
  if (id == "P2") return "residual LST small-omega expansion";
  if (id == "P3") return "tail and heavy-traffic limits commute";
  return "";
}

KvDoc default_config(const std::string& id) {
  std::string text;
  const std::string pareto = "service.family = \"pareto\"\nservice.x_m = 1\nservice.nu = 1.5\n";
  if (id == "E1") {
    text = "rho = 0.7\nsamples = 10000000\nprobes = [0.01, 0.003, 0.001]\n"
           "band_low = [0.85, 0.8, 0.8]\nband_high = [1.15, 1.2, 1.2]\n" + pareto;
  } else if (id == "E2") {
    text = "rhos = [0.9, 0.95, 0.99]\nsamples = 1000000\nks_max = 0.03\n" + pareto;
  } else if (id == "E3") {
    text = "rho = 0.99\nsamples = 1000000\nks_max = 0.02\nservice.family = \"exponential\"\nservice.rate = 1\n";
  } else if (id == "E4") {
    text = "trials = 1000\nalgebra_tol = 1e-12\nrho = 0.7\np_heavy = 0.5\nsamples = 10000000\nprobe = 0.001\n"
           "band_low = 0.75\nband_high = 1.33\nheavy.family = \"pareto\"\nheavy.x_m = 1\nheavy.nu = 1.5\n"
           "light.family = \"exponential\"\nlight.rate = 1\n";
  } else if (id == "E5") {
    text = "lambda = 0.05\ns_low = 0\ns_high = 2\nnu_rate = 1\nevents = 10000000\nprobe = 0.001\n"
           "band_low = 0.75\nband_high = 1.25\nse_mult = 3\nalgebra_tol = 1e-12\n"
           "service.family = \"pareto\"\nservice.x_m = 1\nservice.nu = 1.9\n"
           "low.family = \"exponential\"\nlow.rate = 1\n";
  } else if (id == "E6") {
    text = "lambda = 0.8\ns_low = 0\ns_high = 2\nnu_rate = 0.1\nevents = 10000000\nprobe = 0.001\n"
           "band_low = 0.75\nband_high = 1.25\nalgebra_tol = 1e-12\nrefb_samples = 100000\nks_max = 0.02\n"
           "service.family = \"exponential\"\nservice.rate = 1\n"
           "low.family = \"pareto\"\nlow.x_m = 0.4117647058823529\nlow.nu = 1.7\n";
  } else if (id == "E7") {
    text = "mu_beta = 1\nlambda_frac = 0.5\ncustomers = 10000000\nse_mult = 3\nprobe = 0.001\n"
           "band_low = 0.75\nband_high = 1.25\ntrials = 1000\nalgebra_tol = 1e-12\n"
           "service.family = \"pareto\"\nservice.x_m = 0.3333333333333333\nservice.nu = 1.5\n";
  } else if (id == "E8") {
    text = "r = 2\nd = 1\nlambda_hat = 0.3\ncycles = 10000000\nprobe = 0.001\nband_low = 0.75\nband_high = 1.25\n"
           "algebra_tol = 1e-12\ngrid_per_cycle = 1\n"
           "on.family = \"pareto\"\non.x_m = 1\non.nu = 1.9\noff.family = \"exponential\"\noff.mean = 57\n";
  } else if (id == "P1") {
    text = "grid_points = 2000\nx_max = 20\ncdf_tol = 1e-8\nalphas = [0.3, 0.5, 0.8]\nsamples = 1000000\n"
           "ks_max = 0.005\n";
  } else if (id == "P2") {
    text = "omega = 1e-4\nband_low = 0.95\nband_high = 1.05\n" + pareto;
  } else if (id == "P3") {
    text = "rho_a = 0.7\nprobe_a = 0.001\nrho_b = 0.99\nx_b = 5\nsamples = 10000000\nband_low = 0.7\nband_high = 1.3\n" +
           pareto;
  } else {
    throw ConfigError("unknown experiment id '" + id + "'");
  }
  KvDoc d = KvDoc::parse(text);
  d.set("id", id);
  return d;
}

ExperimentConfig ExperimentConfig::from_kv(const KvDoc& doc) {
  ExperimentConfig c;
  c.id = doc.str("id");
  if (!doc.has("seed")) throw ConfigError("seed is mandatory (no wall-clock default)");
  long long s = doc.integer("seed");
  if (s < 0) throw ConfigError("seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(s);
  c.output = doc.str("output", "");
  for (const auto& [k, v] : doc.entries())
    if (k != "id" && k != "seed" && k != "output") c.params.set(k, v);
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw ConfigError("unknown experiment id '" + id + "'");
  for (const char* key : {"samples", "events", "customers", "cycles", "refb_samples", "trials", "grid_points"}) {
    if (!params.has(key)) continue;
    if (params.integer(key) < 100) throw ConfigError(std::string("key '") + key + "' is below the minimum count 100");
  }
  for (const char* key : {"band_low", "band_high", "ks_max", "algebra_tol", "cdf_tol", "se_mult"}) {
    if (!params.has(key)) continue;
    for (double v : params.nums(key))
      if (!(v > 0.0)) throw ConfigError(std::string("tolerance '") + key + "' must be positive");
  }
}

bool Report::pass() const {
  if (verdicts.empty()) return false;
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Report r;
  r.experiment = cfg.id;
  r.seed = cfg.seed;
  r.config = cfg.params;
  if (cfg.id == "E1") run_e1(cfg, r);
  else if (cfg.id == "E2") run_e2(cfg, r);
  else if (cfg.id == "E3") run_e3(cfg, r);
  else if (cfg.id == "E4") run_e4(cfg, r);
  else if (cfg.id == "E5") run_e5(cfg, r);
  else if (cfg.id == "E6") run_e6(cfg, r);
  else if (cfg.id == "E7") run_e7(cfg, r);
  else if (cfg.id == "E8") run_e8(cfg, r);
  else if (cfg.id == "P1") run_p1(cfg, r);
  else if (cfg.id == "P2") run_p2(cfg, r);
  else if (cfg.id == "P3") run_p3(cfg, r);
  if (!cfg.output.empty()) write_report_files(r, cfg.output);
  return r;
}

void write_verdicts_csv(const std::vector<Verdict>& rows, std::ostream& out) {
  out << "experiment,model,probe_p,x,empirical,asymptote,ratio,ci_low,ci_high,pass\n";
  for (const auto& v : rows)
    out << v.experiment << ',' << v.model << ',' << fmt(v.probe_p) << ',' << fmt(v.x) << ',' << fmt(v.empirical)
        << ',' << fmt(v.asymptote) << ',' << fmt(v.ratio) << ',' << fmt(v.ci_low) << ',' << fmt(v.ci_high) << ','
        << (v.pass ? "true" : "false") << '\n';
}

std::vector<Verdict> read_verdicts_csv(std::istream& in) {
  std::vector<Verdict> rows;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("experiment,", 0) != 0) throw std::runtime_error("verdict csv: missing header");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 9) cells.emplace_back();
    if (cells.size() != 10) throw std::runtime_error("verdict csv: expected 10 columns in '" + line + "'");
    Verdict v;
    v.experiment = cells[0];
    v.model = cells[1];
    v.probe_p = parse_cell(cells[2]);
    v.x = parse_cell(cells[3]);
    v.empirical = parse_cell(cells[4]);
    v.asymptote = parse_cell(cells[5]);
    v.ratio = parse_cell(cells[6]);
    v.ci_low = parse_cell(cells[7]);
    v.ci_high = parse_cell(cells[8]);
    v.pass = cells[9] == "true";
    rows.push_back(v);
  }
  return rows;
}

nlohmann::json report_json(const Report& r) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : r.config.entries()) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& v : r.verdicts) {
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    rows.push_back({{"model", v.model},
                    {"probe_p", num(v.probe_p)},
                    {"x", num(v.x)},
                    {"empirical", num(v.empirical)},
                    {"asymptote", num(v.asymptote)},
                    {"ratio", num(v.ratio)},
                    {"ci_low", num(v.ci_low)},
                    {"ci_high", num(v.ci_high)},
                    {"pass", v.pass}});
  }
  j["verdicts"] = rows;
  j["details"] = r.details;
  j["pass"] = r.pass();
  return j;
}

void write_report_files(const Report& r, const std::string& stem) {
  std::ofstream csv(stem + ".csv");
  if (!csv) throw std::runtime_error("cannot write '" + stem + ".csv'");
  write_verdicts_csv(r.verdicts, csv);
  std::ofstream js(stem + ".json");
  if (!js) throw std::runtime_error("cannot write '" + stem + ".json'");
  js << report_json(r).dump(2) << "\n";
}

std::string render_summary(const std::vector<Verdict>& rows) {
  std::ostringstream os;
  os << "| experiment | model | probe_p | x | empirical | reference | ratio | band/ci | pass |\n";
  os << "|---|---|---|---|---|---|---|---|---|\n";
  std::size_t failed = 0;
  for (const auto& v : rows) {
    os << "| " << v.experiment << " | " << v.model << " | " << fmt(v.probe_p) << " | " << fmt(v.x) << " | "
       << fmt(v.empirical) << " | " << fmt(v.asymptote) << " | " << fmt(v.ratio) << " | [" << fmt(v.ci_low) << ", "
       << fmt(v.ci_high) << "] | " << (v.pass ? "PASS" : "FAIL") << " |\n";
    failed += !v.pass;
  }
  os << "\n" << rows.size() - failed << "/" << rows.size() << " verdicts pass\n";
  os << "\n# gnuplot: probe_p x empirical asymptote ratio ci_low ci_high\n";
  for (const auto& v : rows) {
    if (std::isnan(v.probe_p)) continue;
    os << fmt(v.probe_p) << ' ' << fmt(v.x) << ' ' << fmt(v.empirical) << ' ' << fmt(v.asymptote) << ' '
       << fmt(v.ratio) << ' ' << fmt(v.ci_low) << ' ' << fmt(v.ci_high) << '\n';
  }
  return os.str();
}

}  // namespace htq
