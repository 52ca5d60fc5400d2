#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "htq/asymptotics.hpp"

namespace htq {

struct SamplePool {
  std::vector<double> values;
  std::vector<double> weights;  // empty means unit weights
  std::vector<std::uint8_t> tags;  // empty means tag 0
  std::string model;
  std::uint64_t seed = 0;
  std::string warmup = "none";

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  bool weighted() const { return !weights.empty(); }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
  int tag(std::size_t i) const { return tags.empty() ? 0 : tags[i]; }

  SamplePool scaled(double s) const;
  SamplePool with_tag(int tag) const;
  void validate() const;
};

void write_pool_csv(const SamplePool& pool, std::ostream& out);
SamplePool read_pool_csv(std::istream& in);

struct SimOptions {
  unsigned workers = 0;  // 0 = HTQ_WORKERS or hardware concurrency
  std::size_t chunk = 1 << 16;
};

// Exact stationary workload of the speed-c M/G/1 queue: a geometric(rho) sum
// of residual service requirements.
SamplePool pk_exact_sample(const Mg1SpeedSpec& spec, std::size_t n, std::uint64_t seed, const SimOptions& opt = {});

// Workload found by arrivals via the Lindley recursion (10% warmup).
SamplePool mg1_lindley_sample(const Mg1SpeedSpec& spec, std::size_t customers, std::uint64_t seed);

struct FluidOptions {
  double grid_dt = 0.0;  // 0 = mean cycle / grid_per_cycle
  double grid_per_cycle = 1.0;
  double warmup_fraction = 0.1;
};

struct FluidResult {
  SamplePool stationary;   // tag 1 = On
  SamplePool at_on_start;
};

FluidResult fluid_sim(const FluidSpec& spec, std::size_t cycles, std::uint64_t seed, const FluidOptions& opt = {});

struct AltSpeedOptions {
  double sample_prob = 1.0;  // Bernoulli thinning of arrival samples
  double grid_dt = 0.0;      // > 0 adds a time-grid pool
  double warmup_fraction = 0.1;
  std::size_t batches = 100;
};

struct AltSpeedResult {
  SamplePool pool_high;
  SamplePool pool_all;   // tag 1 = high speed
  SamplePool pool_grid;  // only when grid_dt > 0
  double p_high = 0.0;
  double p_high_se = 0.0;
};

AltSpeedResult altspeed_des(const AltSpeedSpec& spec, std::size_t events, std::uint64_t seed,
                            const AltSpeedOptions& opt = {});

struct Mg2Options {
  double warmup_fraction = 0.1;
  std::size_t batches = 100;
};

struct Mg2Result {
  SamplePool waits;
  Mg2Occupancy occ;
  double identity_residual = 0.0;
  double identity_se = 0.0;
};

// FCFS: the head-of-line customer takes whichever server frees first; an
// arrival that finds both servers idle goes to server 1 (the exponential one).
Mg2Result mg2_des(const Mg2Spec& spec, std::size_t customers, std::uint64_t seed, const Mg2Options& opt = {});

}  // namespace htq
