// Runs every acceptance criterion with its default configuration and a fixed
// seed. Usage: htq_acceptance [--seed N] [--out stem] [ID ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "htq/experiment.hpp"

using namespace htq;

int main(int argc, char** argv) {
  std::uint64_t seed = 20240601;
  std::string out = "acceptance_verdicts";
  std::vector<std::string> ids;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) seed = std::strtoull(argv[++i], nullptr, 10);
    else if (a == "--out" && i + 1 < argc) out = argv[++i];
    else ids.push_back(a);
  }
  if (ids.empty()) ids = experiment_ids();

  std::vector<Verdict> all;
  int failed = 0;
  for (const auto& id : ids) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
      KvDoc d = default_config(id);
      d.set("seed", std::to_string(seed));
      auto r = run_experiment(ExperimentConfig::from_kv(d));
      ok = r.pass();
      for (const auto& v : r.verdicts) {
        all.push_back(v);
        std::printf("    %-4s %-42s stat=%-13.6g ref=%-11.6g ratio=%-10.5g %s=[%.4g, %.4g]\n", v.pass ? "ok" : "FAIL",
                    v.model.c_str(), v.empirical, v.asymptote, v.ratio, std::isnan(v.probe_p) ? "band" : "ci",
                    v.ci_low, v.ci_high);
      }
    } catch (const std::exception& e) {
      note = std::string(" error: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s  %s (%.1fs)%s\n", ok ? "PASS" : "FAIL", id.c_str(), criterion_summary(id).c_str(), secs,
                note.c_str());
    std::fflush(stdout);
    failed += !ok;
  }
  std::ofstream csv(out + ".csv");
  write_verdicts_csv(all, csv);
  std::printf("%zu/%zu criteria pass\n", ids.size() - failed, ids.size());
  return failed ? 1 : 0;
}
