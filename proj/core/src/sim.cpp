#include "htq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "htq/stats.hpp"

namespace htq {

SamplePool SamplePool::scaled(double s) const {
  SamplePool out = *this;
  for (auto& v : out.values) v *= s;
  return out;
}

SamplePool SamplePool::with_tag(int tag) const {
  SamplePool out;
  out.model = model;
  out.seed = seed;
  out.warmup = warmup;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (this->tag(i) != tag) continue;
    out.values.push_back(values[i]);
    if (weighted()) out.weights.push_back(weights[i]);
  }
  return out;
}

void SamplePool::validate() const {
  if (!weights.empty() && weights.size() != values.size()) throw std::invalid_argument("pool: weight count mismatch");
  if (!tags.empty() && tags.size() != values.size()) throw std::invalid_argument("pool: tag count mismatch");
  for (double v : values)
    if (!(v >= 0.0)) throw std::invalid_argument("pool: values must be >= 0");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("pool: weights must be > 0");
}

void write_pool_csv(const SamplePool& pool, std::ostream& out) {
  out << "# htq-pool v1 model=" << pool.model << " seed=" << pool.seed << " warmup=" << pool.warmup
      << " count=" << pool.size() << "\n";
  out << "value,weight,tag\n";
  char buf[96];
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", pool.values[i], pool.weight(i), pool.tag(i));
    out << buf;
  }
}

SamplePool read_pool_csv(std::istream& in) {
  SamplePool pool;
  std::string line;
  bool header = false, any_weight = false, any_tag = false;
  std::vector<double> w;
  std::vector<std::uint8_t> tags;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "model") pool.model = v;
        else if (k == "seed") pool.seed = std::stoull(v);
        else if (k == "warmup") pool.warmup = v;
      }
      continue;
    }
    if (!header) {
      if (line.rfind("value", 0) != 0) throw std::runtime_error("pool csv: missing 'value,weight,tag' header");
      header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    pool.values.push_back(std::stod(a));
    double wt = b.empty() ? 1.0 : std::stod(b);
    int tg = c.empty() ? 0 : std::stoi(c);
    any_weight |= wt != 1.0;
    any_tag |= tg != 0;
    w.push_back(wt);
    tags.push_back(static_cast<std::uint8_t>(tg));
  }
  if (any_weight) pool.weights = std::move(w);
  if (any_tag) pool.tags = std::move(tags);
  pool.validate();
  return pool;
}

SamplePool pk_exact_sample(const Mg1SpeedSpec& spec, std::size_t n, std::uint64_t seed, const SimOptions& opt) {
  spec.validate();
  SamplePool pool;
  pool.model = "pk_exact";
  pool.seed = seed;
  pool.values.assign(n, 0.0);
  double rho = spec.rho();
  if (rho == 0.0 || n == 0) return pool;
  ResidualRV res(spec.service);
  double log_rho = std::log(rho);
  std::size_t chunk = std::max<std::size_t>(1, opt.chunk);
  std::size_t chunks = (n + chunk - 1) / chunk;
  for_each_chunk(seed, chunks, opt.workers, [&](std::size_t c, Stream& s) {
    std::size_t lo = c * chunk, hi = std::min(n, lo + chunk);
    for (std::size_t i = lo; i < hi; ++i) {
      // P(N >= k) = rho^k
      double count = std::floor(std::log(s.uniform()) / log_rho);
      double v = 0.0;
      for (double k = 0; k < count; k += 1.0) v += res.sample(s);
      pool.values[i] = v;
    }
  });
  return pool;
}

SamplePool mg1_lindley_sample(const Mg1SpeedSpec& spec, std::size_t customers, std::uint64_t seed) {
  spec.validate();
  if (!(spec.lambda_hat > 0.0)) throw ModelError("mg1 lindley: lambda_hat must be > 0");
  Stream arr(seed, 0), svc(seed, 1);
  std::size_t warm = customers / 10;
  SamplePool pool;
  pool.model = "mg1_lindley";
  pool.seed = seed;
  pool.warmup = "customers:10%";
  pool.values.reserve(customers - warm);
  double w = 0.0;
  for (std::size_t n = 0; n < customers; ++n) {
    if (n >= warm) pool.values.push_back(spec.c * w);
    w = std::max(0.0, w + spec.service.sample(svc) / spec.c - arr.exponential() / spec.lambda_hat);
  }
  return pool;
}

FluidResult fluid_sim(const FluidSpec& spec, std::size_t cycles, std::uint64_t seed, const FluidOptions& opt) {
  // a deterministic source at critical load is periodic, not unstable
  bool periodic = spec.on.family() == Family::Deterministic && spec.off.family() == Family::Deterministic &&
                  std::abs(spec.rho() - spec.d) <= 1e-12 * spec.d;
  if (!periodic) spec.validate();
  Stream s_on(seed, 0), s_off(seed, 1), s_grid(seed, 2);
  double mean_cycle = spec.on.mean() + spec.off.mean();
  double dt = opt.grid_dt > 0.0 ? opt.grid_dt : mean_cycle / opt.grid_per_cycle;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("fluid_sim: bad grid spacing");
  auto warm = static_cast<std::size_t>(opt.warmup_fraction * static_cast<double>(cycles));
  double up = spec.r - spec.d, down = spec.d;

  FluidResult out;
  out.stationary.model = "fluid_stationary";
  out.at_on_start.model = "fluid_on_start";
  out.stationary.seed = out.at_on_start.seed = seed;
  out.stationary.warmup = out.at_on_start.warmup = "cycles:" + std::to_string(warm);
  std::size_t expect = static_cast<std::size_t>((cycles - warm) * mean_cycle / dt * 1.05) + 16;
  out.stationary.values.reserve(expect);
  out.stationary.tags.reserve(expect);
  out.at_on_start.values.reserve(cycles - warm);

  double t = 0.0, w = 0.0;
  double offset = s_grid.uniform() * dt;
  std::uint64_t k = 0;  // next grid index; grid point = offset + k dt
  auto grid = [&] { return offset + static_cast<double>(k) * dt; };
  for (std::size_t c = 0; c < cycles; ++c) {
    bool keep = c >= warm;
    if (keep) out.at_on_start.values.push_back(w);
    double a = spec.on.sample(s_on);
    for (double g = grid(); g < t + a; ++k, g = grid())
      if (keep) {
        out.stationary.values.push_back(w + up * (g - t));
        out.stationary.tags.push_back(1);
      }
    w += up * a;
    t += a;
    double u = spec.off.sample(s_off);
    for (double g = grid(); g < t + u; ++k, g = grid())
      if (keep) {
        out.stationary.values.push_back(std::max(0.0, w - down * (g - t)));
        out.stationary.tags.push_back(0);
      }
    w = std::max(0.0, w - down * u);
    t += u;
  }
  return out;
}

AltSpeedResult altspeed_des(const AltSpeedSpec& spec, std::size_t events, std::uint64_t seed,
                            const AltSpeedOptions& opt) {
  spec.validate_basic();
  if (!(spec.lambda > 0.0)) throw ModelError("altspeed_des: lambda must be > 0");
  Stream arr(seed, 0), svc(seed, 1), spd(seed, 2), thin(seed, 3), grd(seed, 4);
  const double t_warm = opt.warmup_fraction * static_cast<double>(events) / spec.lambda;

  AltSpeedResult out;
  for (SamplePool* p : {&out.pool_high, &out.pool_all, &out.pool_grid}) {
    p->seed = seed;
    p->warmup = "time:" + format_double(t_warm);
  }
  out.pool_high.model = "altspeed_high";
  out.pool_all.model = "altspeed_all";
  out.pool_grid.model = "altspeed_grid";
  std::size_t expect = static_cast<std::size_t>(events * std::min(1.0, opt.sample_prob) * 1.02) + 16;
  out.pool_all.values.reserve(expect);
  out.pool_all.tags.reserve(expect);

  double t = 0.0, v = 0.0;
  bool high = true;
  double period_end = spd.exponential() / spec.nu_rate;
  double next_arr = arr.exponential() / spec.lambda;
  double g = opt.grid_dt > 0.0 ? t_warm + grd.uniform() * opt.grid_dt : INFINITY;

  std::size_t nb = std::max<std::size_t>(1, opt.batches);
  std::size_t per_batch = std::max<std::size_t>(1, (events - events / 10) / nb);
  double tot_time = 0.0, tot_high = 0.0, b_time = 0.0, b_high = 0.0;
  std::size_t b_count = 0;
  std::vector<double> batch_frac;

  std::size_t arrivals = 0;
  while (arrivals < events) {
    double next = std::min(next_arr, period_end);
    double s = high ? spec.s_high : spec.s_low;
    for (; g < next; g += opt.grid_dt) {
      out.pool_grid.values.push_back(std::max(0.0, v - s * (g - t)));
      out.pool_grid.tags.push_back(high ? 1 : 0);
    }
    double from = std::max(t, t_warm);
    if (next > from) {
      double len = next - from;
      tot_time += len;
      b_time += len;
      if (high) {
        tot_high += len;
        b_high += len;
      }
    }
    v = std::max(0.0, v - s * (next - t));
    t = next;
    if (period_end <= next_arr) {
      high = !high;
      period_end = t + (high ? spd.exponential() / spec.nu_rate : spec.low.sample(spd));
      continue;
    }
    ++arrivals;
    if (t >= t_warm) {
      if (opt.sample_prob >= 1.0 || thin.uniform() < opt.sample_prob) {
        out.pool_all.values.push_back(v);
        out.pool_all.tags.push_back(high ? 1 : 0);
      }
      if (++b_count == per_batch) {
        batch_frac.push_back(b_high / b_time);
        b_count = 0;
        b_time = b_high = 0.0;
      }
    }
    v += spec.service.sample(svc);
    next_arr = t + arr.exponential() / spec.lambda;
  }
  out.pool_high = out.pool_all.with_tag(1);
  out.pool_high.model = "altspeed_high";
  out.p_high = tot_time > 0.0 ? tot_high / tot_time : 0.0;
  out.p_high_se = batch_means_se(batch_frac);
  return out;
}

Mg2Result mg2_des(const Mg2Spec& spec, std::size_t customers, std::uint64_t seed, const Mg2Options& opt) {
  spec.validate();
  Stream arr(seed, 0), s1(seed, 1), s2(seed, 2);
  auto warm = static_cast<std::size_t>(opt.warmup_fraction * static_cast<double>(customers));
  Mg2Result out;
  out.waits.model = "mg2_waits";
  out.waits.seed = seed;
  out.waits.warmup = "customers:" + std::to_string(warm);
  out.waits.values.reserve(customers - warm);

  const double ib = 1.0 / spec.beta(), mu = spec.mu, lam = spec.lambda;
  auto residual_of = [&](double idle, double only1, double only2, double total) {
    return (ib + mu) * idle / total + ib * only1 / total + mu * only2 / total - (ib + mu - lam);
  };

  double t = 0.0, f1 = 0.0, f2 = 0.0;
  double a1 = 0.0, e1 = 0.0, a2 = 0.0, e2 = 0.0;  // last busy interval per server
  double clock = 0.0;
  double idle = 0.0, only1 = 0.0, only2 = 0.0, total = 0.0;
  double b_idle = 0.0, b_only1 = 0.0, b_only2 = 0.0, b_total = 0.0;
  std::size_t nb = std::max<std::size_t>(1, opt.batches);
  std::size_t per_batch = std::max<std::size_t>(1, (customers - warm) / nb);
  std::size_t b_count = 0;
  std::vector<double> batch_res;

  auto overlap = [](double a, double b, double s, double e) { return std::max(0.0, std::min(b, e) - std::max(a, s)); };
  auto account = [&](double a, double b) {
    if (!(b > a)) return;
    double len = b - a;
    double busy1 = overlap(a, b, a1, e1);
    double busy2 = overlap(a, b, a2, e2);
    double both = std::max(0.0, std::min({b, e1, e2}) - std::max({a, a1, a2}));
    double i0 = len - busy1 - busy2 + both;
    idle += i0;
    only1 += busy1 - both;
    only2 += busy2 - both;
    total += len;
    b_idle += i0;
    b_only1 += busy1 - both;
    b_only2 += busy2 - both;
    b_total += len;
  };

  for (std::size_t n = 0; n < customers; ++n) {
    t += arr.exponential() / lam;
    if (n == warm) clock = t;
    int server;
    if (f1 <= t) server = 1;
    else if (f2 <= t) server = 2;
    else server = f1 <= f2 ? 1 : 2;
    double start = std::max(t, server == 1 ? f1 : f2);
    double service = server == 1 ? s1.exponential() / mu : spec.service.sample(s2);
    if (n >= warm) {
      account(clock, start);
      clock = std::max(clock, start);
      out.waits.values.push_back(start - t);
    }
    if (server == 1) {
      a1 = start;
      e1 = f1 = start + service;
    } else {
      a2 = start;
      e2 = f2 = start + service;
    }
    if (n >= warm && ++b_count == per_batch) {
      if (b_total > 0.0) batch_res.push_back(residual_of(b_idle, b_only1, b_only2, b_total));
      b_count = 0;
      b_idle = b_only1 = b_only2 = b_total = 0.0;
    }
  }
  account(clock, std::max(clock, t));
  if (!(total > 0.0)) throw std::runtime_error("mg2_des: empty accounting window");
  out.occ = {idle / total, only1 / total, only2 / total};
  out.identity_residual = residual_of(idle, only1, only2, total);
  out.identity_se = batch_means_se(batch_res);
  return out;
}

}  // namespace htq
