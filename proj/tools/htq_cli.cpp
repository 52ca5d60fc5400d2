#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "htq/asymptotics.hpp"
#include "htq/experiment.hpp"
#include "htq/mlf.hpp"
#include "htq/sim.hpp"
#include "htq/stats.hpp"

using namespace htq;

namespace {

// distribution flags shared by several subcommands
struct RvArgs {
  std::vector<double> pareto;
  double exp_mean = 0.0;
  double det = 0.0;

  void add(CLI::App* app, const std::string& prefix, const std::string& what) {
    app->add_option("--" + prefix + "pareto", pareto, what + " ~ Pareto(x_m, nu)")->expected(2);
    app->add_option("--" + prefix + "exp", exp_mean, what + " ~ exponential with this mean");
    app->add_option("--" + prefix + "det", det, what + " deterministic");
  }
  bool given() const { return !pareto.empty() || exp_mean > 0.0 || det > 0.0; }
  HeavyTailRV get(const std::string& name) const {
    int n = !pareto.empty() + (exp_mean > 0.0) + (det > 0.0);
    if (n != 1) throw ConfigError("exactly one distribution required for " + name);
    if (!pareto.empty()) return HeavyTailRV::pareto(pareto[0], pareto[1]);
    if (exp_mean > 0.0) return HeavyTailRV::exponential(1.0 / exp_mean);
    return HeavyTailRV::deterministic(det);
  }
};

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

nlohmann::json asym_json(const PowerTailAsymptote& a, const std::vector<double>& xs) {
  auto j = to_json(a);
  nlohmann::json pts = nlohmann::json::array();
  for (double x : xs) pts.push_back({{"x", x}, {"ccdf", a.ccdf(x)}});
  if (!xs.empty()) j["points"] = pts;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heavy-tailed queue asymptotics, heavy-traffic limits and simulation"};
  app.require_subcommand(1);

  // dist-info
  auto* di = app.add_subcommand("dist-info", "Moments, tail constant and residual law of a distribution");
  RvArgs di_rv;
  di_rv.add(di, "", "X");
  std::vector<double> di_x;
  di->add_option("--x", di_x, "Points for ccdf evaluation");
  std::vector<double> di_w;
  di->add_option("--omega", di_w, "Points for numerical LSTs");

  // asymptote
  auto* as = app.add_subcommand("asymptote", "Tail asymptote P(V > x) ~ c / Gamma(1 - alpha) x^-alpha");
  as->require_subcommand(1);
  std::vector<double> as_x;

  auto* as_mg1 = as->add_subcommand("mg1", "M/G/1 workload");
  double lambda = 0.0, c = 1.0;
  RvArgs service;
  double rho = -1.0;
  auto* mg1_load = as_mg1->add_option_group("load");
  mg1_load->add_option("--lambda", lambda);
  mg1_load->add_option("--rho", rho, "Load; sets lambda = rho / beta");
  mg1_load->require_option(1);
  service.add(as_mg1, "", "service");

  auto* as_speed = as->add_subcommand("speed", "M/G/1 with server speed c");
  as_speed->add_option("--lambda", lambda)->required();
  as_speed->add_option("--c", c)->required();
  service.add(as_speed, "", "service");

  auto* as_fluid = as->add_subcommand("fluid", "On-off fluid queue");
  double r = 2.0, d = 1.0, lambda_hat = 0.0;
  RvArgs on, off;
  as_fluid->add_option("--r", r)->required();
  as_fluid->add_option("--d", d)->required();
  as_fluid->add_option("--match-lambda", lambda_hat, "Also print the matched M/G/1");
  on.add(as_fluid, "on-", "On period");
  off.add(as_fluid, "off-", "Off period");

  auto* as_mc = as->add_subcommand("multiclass", "Two-class M/G/1, class 0 heavy");
  double p0 = 0.5;
  RvArgs light;
  as_mc->add_option("--lambda", lambda)->required();
  as_mc->add_option("--p-heavy", p0)->required();
  service.add(as_mc, "", "heavy class");
  light.add(as_mc, "light-", "light class");

  auto* as_alt = as->add_subcommand("altspeed", "Alternating-speed M/G/1");
  double s_low = 0.0, s_high = 1.0, nu_rate = 1.0;
  std::string alt_case = "a";
  RvArgs low;
  as_alt->add_option("--lambda", lambda)->required();
  as_alt->add_option("--s-low", s_low)->required();
  as_alt->add_option("--s-high", s_high)->required();
  as_alt->add_option("--nu-rate", nu_rate)->required();
  as_alt->add_option("--case", alt_case)->check(CLI::IsMember({"a", "b", "c"}));
  service.add(as_alt, "", "service");
  low.add(as_alt, "low-", "low-speed period");

  auto* as_mg2 = as->add_subcommand("mg2", "Heterogeneous M/G/2 waiting time");
  double mu = 1.0;
  std::vector<double> occ;
  as_mg2->add_option("--lambda", lambda)->required();
  as_mg2->add_option("--mu", mu)->required();
  as_mg2->add_option("--occupancy", occ, "pi0 pi1 pi2")->expected(3)->required();
  double identity_tol = 1e-9;
  as_mg2->add_option("--identity-tol", identity_tol, "Allowed occupancy identity residual");
  service.add(as_mg2, "", "service");

  for (auto* sub : as->get_subcommands({})) sub->add_option("--x", as_x, "Evaluate the asymptote at these points");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a sample pool (CSV)");
  sim->require_subcommand(1);
  std::uint64_t seed = 0;
  std::size_t count = 100000;
  std::string out_path;
  for (auto* sub : {sim->add_subcommand("pk", "Exact M/G/1 workload"),
                    sim->add_subcommand("lindley", "M/G/1 workload seen by arrivals"),
                    sim->add_subcommand("fluid", "On-off fluid queue"),
                    sim->add_subcommand("altspeed", "Alternating-speed queue, high-speed arrivals"),
                    sim->add_subcommand("mg2", "M/G/2 waiting times")}) {
    sub->add_option("--seed", seed)->required();
    sub->add_option("-n,--count", count, "Samples, customers, cycles or events");
    sub->add_option("-o,--output", out_path, "Pool CSV (default stdout)");
  }
  auto* sim_pk = sim->get_subcommand("pk");
  auto* sim_li = sim->get_subcommand("lindley");
  auto* sim_fl = sim->get_subcommand("fluid");
  auto* sim_alt = sim->get_subcommand("altspeed");
  auto* sim_mg2 = sim->get_subcommand("mg2");
  for (auto* sub : {sim_pk, sim_li}) {
    auto* load = sub->add_option_group("load");
    load->add_option("--lambda", lambda);
    load->add_option("--rho", rho, "Load; sets lambda = c rho / beta");
    load->require_option(1);
    sub->add_option("--c", c);
    service.add(sub, "", "service");
  }
  sim_fl->add_option("--r", r)->required();
  sim_fl->add_option("--d", d)->required();
  on.add(sim_fl, "on-", "On period");
  off.add(sim_fl, "off-", "Off period");
  bool on_starts = false;
  sim_fl->add_flag("--on-starts", on_starts, "Emit the workload at On-starts instead of the time-stationary pool");
  sim_alt->add_option("--lambda", lambda)->required();
  sim_alt->add_option("--s-low", s_low)->required();
  sim_alt->add_option("--s-high", s_high)->required();
  sim_alt->add_option("--nu-rate", nu_rate)->required();
  service.add(sim_alt, "", "service");
  low.add(sim_alt, "low-", "low-speed period");
  sim_mg2->add_option("--lambda", lambda)->required();
  sim_mg2->add_option("--mu", mu)->required();
  service.add(sim_mg2, "", "service");

  // ht-plan
  auto* ht = app.add_subcommand("ht-plan", "Heavy-traffic scaling schedule for an M/G/1 or alternating-speed queue");
  std::vector<double> eps;
  std::string ht_model = "mg1";
  ht->add_option("--model", ht_model)->check(CLI::IsMember({"mg1", "altspeed"}));
  ht->add_option("--lambda", lambda)->required();
  ht->add_option("--eps", eps, "Slack values epsilon")->required();
  ht->add_option("--s-low", s_low);
  ht->add_option("--s-high", s_high);
  ht->add_option("--nu-rate", nu_rate);
  ht->add_option("--case", alt_case)->check(CLI::IsMember({"a", "b", "c"}));
  service.add(ht, "", "service");
  low.add(ht, "low-", "low-speed period");

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run an acceptance experiment");
  std::string cfg_path, id, output;
  std::vector<std::string> overrides;
  bool have_seed = false;
  ex->add_option("--config", cfg_path, "Config file (key = value)");
  ex->add_option("--id", id, "Experiment id (E1..E8, P1..P3); uses the built-in defaults");
  auto* seed_opt = ex->add_option("--seed", seed);
  ex->add_option("--set", overrides, "key=value override (repeatable)");
  ex->add_option("--output", output, "Write <stem>.csv and <stem>.json");
  bool list = false, print_config = false;
  ex->add_flag("--list", list, "List experiment ids");
  ex->add_flag("--print-config", print_config, "Print the resolved config and exit");

  // report
  auto* rep = app.add_subcommand("report", "Render verdict CSV files as a summary");
  std::vector<std::string> csvs;
  rep->add_option("files", csvs)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*di) {
      HeavyTailRV x = di_rv.get("X");
      nlohmann::json j = to_json(x);
      j["mean"] = x.mean();
      j["second_moment"] = std::isfinite(x.second_moment()) ? nlohmann::json(x.second_moment()) : nlohmann::json("inf");
      if (x.has_power_tail()) {
        try {
          auto tc = tail_constant(x);
          j["tail_constant"] = {{"C", tc.C}, {"nu", tc.nu}};
        } catch (const std::exception& e) {
          j["tail_constant"] = e.what();
        }
      }
      auto res = residual(x);
      j["residual_mean"] = std::isfinite(res.mean()) ? nlohmann::json(res.mean()) : nlohmann::json("inf");
      nlohmann::json pts = nlohmann::json::array();
      for (double v : di_x) pts.push_back({{"x", v}, {"ccdf", x.ccdf(v)}, {"residual_ccdf", res.ccdf(v)}});
      if (!pts.empty()) j["ccdf"] = pts;
      nlohmann::json ls = nlohmann::json::array();
      for (double w : di_w) ls.push_back({{"omega", w}, {"lst", lst_numeric(x, w)}, {"residual_lst", lst_numeric(res, w)}});
      if (!ls.empty()) j["lst"] = ls;
      print_json(j);
      return 0;
    }

    if (*as) {
      if (*as_mg1) {
        Mg1Spec s{lambda, service.get("service")};
        if (rho >= 0.0) s.lambda = rho / s.service.mean();
        auto dcp = mg1_decomposition(s);
        auto j = asym_json(prop1_tail(dcp), as_x);
        j["decomposition"] = to_json(dcp);
        j["rho"] = s.rho();
        print_json(j);
      } else if (*as_speed) {
        Mg1SpeedSpec s{lambda, c, service.get("service")};
        auto j = asym_json(mg1_speed_tail(s), as_x);
        j["rho"] = s.rho();
        print_json(j);
      } else if (*as_fluid) {
        FluidSpec f{r, d, on.get("On"), off.get("Off")};
        auto j = asym_json(fluid_tail(f), as_x);
        j["rho"] = f.rho();
        if (lambda_hat > 0.0) {
          auto m = matched_mg1(f, lambda_hat);
          j["matched"] = to_json(m);
          j["matched_c_pref"] = mg1_speed_tail(m).c_pref;
        }
        print_json(j);
      } else if (*as_mc) {
        MultiClassSpec m;
        m.lambda = lambda;
        m.p = {p0, 1.0 - p0};
        m.services = {service.get("heavy class"), light.get("light class")};
        auto k = multiclass_constants(m);
        auto j = asym_json(prop1_tail(k.decomposition), as_x);
        j["decomposition"] = to_json(k.decomposition);
        j["reduced"] = to_json(k.reduced);
        j["reduced_ht"] = to_json(k.reduced_ht);
        j["zeta"] = k.zeta;
        print_json(j);
      } else if (*as_alt) {
        AltSpeedSpec s{lambda, service.get("service"), s_low, s_high, nu_rate, low.get("low-speed period")};
        auto k = altspeed_constants(s, parse_alt_case(alt_case));
        auto j = asym_json(k.asymptote, as_x);
        j["eta"] = k.eta;
        j["decomposition"] = to_json(k.decomposition);
        j["p_high"] = s.p_high();
        auto refs = altspeed_refsystems(s);
        j["ref_a"] = to_json(refs.ref_a);
        j["ref_b"] = to_json(refs.ref_b);
        print_json(j);
      } else if (*as_mg2) {
        Mg2Spec s{lambda, mu, service.get("service")};
        Mg2Occupancy o{occ[0], occ[1], occ[2]};
        auto k = mg2_constants(s, o, identity_tol);
        auto j = asym_json(k.asymptote, as_x);
        j["decomposition"] = to_json(k.decomposition);
        j["simplified_c_w"] = k.simplified_c_w;
        j["plan"] = to_json(k.plan);
        j["fluid_heuristic"] = to_json(k.fluid);
        print_json(j);
      }
      return 0;
    }

    if (*sim) {
      SamplePool pool;
      if (rho >= 0.0) lambda = c * rho / service.get("service").mean();
      if (*sim_pk) pool = pk_exact_sample({lambda, c, service.get("service")}, count, seed);
      else if (*sim_li) pool = mg1_lindley_sample({lambda, c, service.get("service")}, count, seed);
      else if (*sim_fl) {
        auto res = fluid_sim({r, d, on.get("On"), off.get("Off")}, count, seed);
        pool = on_starts ? res.at_on_start : res.stationary;
      } else if (*sim_alt) {
        AltSpeedSpec s{lambda, service.get("service"), s_low, s_high, nu_rate, low.get("low-speed period")};
        s.validate_basic();
        auto res = altspeed_des(s, count, seed);
        pool = res.pool_high;
        std::cerr << "p_high " << res.p_high << " +- " << res.p_high_se << "\n";
      } else if (*sim_mg2) {
        auto res = mg2_des({lambda, mu, service.get("service")}, count, seed);
        pool = res.waits;
        std::cerr << "occupancy " << res.occ.pi0 << " " << res.occ.pi1 << " " << res.occ.pi2 << " identity residual "
                  << res.identity_residual << " +- " << res.identity_se << "\n";
      }
      if (out_path.empty()) {
        write_pool_csv(pool, std::cout);
      } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        write_pool_csv(pool, f);
      }
      return 0;
    }

    if (*ht) {
      HtLimitPlan plan;
      if (ht_model == "mg1") {
        plan = mg1_ht_plan({lambda, service.get("service")});
      } else {
        AltSpeedSpec s{lambda, service.get("service"), s_low, s_high, nu_rate, low.get("low-speed period")};
        plan = altspeed_ht(s, parse_alt_case(alt_case));
      }
      std::printf("epsilon,lambda_eps,hat_lambda_eps,scaling,slack_scaling,zeta,coupling_residual\n");
      for (double e : eps)
        std::printf("%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.3g\n", e, plan.lambda_eps(e), plan.hat_lambda_eps(e),
                    plan.scaling, plan.slack_scaling, plan.zeta, plan.coupling_residual(e));
      return 0;
    }

    if (*ex) {
      if (list) {
        for (const auto& i : experiment_ids()) std::cout << i << "  " << criterion_summary(i) << "\n";
        return 0;
      }
      KvDoc doc;
      if (!cfg_path.empty()) {
        doc = KvDoc::load(cfg_path);
        if (!id.empty()) doc.set("id", id);
        if (doc.has("id")) {
          KvDoc base = default_config(doc.str("id"));
          base.merge(doc);
          doc = base;
        }
      } else if (!id.empty()) {
        doc = default_config(id);
      } else {
        throw ConfigError("either --config or --id is required");
      }
      have_seed = seed_opt->count() > 0;
      if (have_seed) doc.set("seed", std::to_string(seed));
      for (const auto& o : overrides) doc.set_assignment(o);
      if (!output.empty()) doc.set("output", output);
      if (print_config) {
        std::cout << doc.dump();
        return 0;
      }
      auto cfg = ExperimentConfig::from_kv(doc);
      auto report = run_experiment(cfg);
      write_verdicts_csv(report.verdicts, std::cout);
      for (const auto& v : report.verdicts)
        std::cerr << (v.pass ? "PASS " : "FAIL ") << v.experiment << " " << v.model << "\n";
      return report.pass() ? 0 : 1;
    }

    if (*rep) {
      std::vector<Verdict> rows;
      for (const auto& path : csvs) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot read " + path);
        auto part = read_verdicts_csv(f);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      std::cout << render_summary(rows);
      bool ok = !rows.empty();
      for (const auto& v : rows) ok = ok && v.pass;
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
