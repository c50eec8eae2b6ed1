#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "bequest/errors.hpp"
#include "bequest/verify.hpp"

namespace bequest {

namespace {

constexpr std::size_t kTableIntervals = 1u << 16;
constexpr std::uint64_t kBlock = 512;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> tabulate(const std::function<double(double)>& pi, double upper) {
  std::vector<double> table(kTableIntervals + 2);
  for (std::size_t i = 0; i <= kTableIntervals; ++i) {
    table[i] = pi(upper * static_cast<double>(i) / static_cast<double>(kTableIntervals));
  }
  table[kTableIntervals + 1] = table[kTableIntervals];
  return table;
}

struct Tally {
  std::uint64_t successes = 0;
  std::uint64_t ruined = 0;
  std::uint64_t steps = 0;
};

// Simulates several independent paths in lock step. Each step of one path
// depends on the previous one through the table lookup, so interleaving
// lanes keeps the core busy. Every path owns its generator, which makes the
// outcome independent of how paths are assigned to lanes or workers.
class LaneSimulator {
 public:
  static constexpr int kLanes = 8;

  LaneSimulator(const MarketParams& p, const FeedbackStrategy& s, const McConfig& cfg,
                const std::vector<double>& table)
      : p_(p), s_(s), cfg_(cfg), table_(table.data()),
        inv_dx_(static_cast<double>(kTableIntervals) / s.absorb),
        t_cap_(60.0 / p.lambda), sq_dt_(std::sqrt(cfg.dt)) {}

  // Runs paths [first, last).
  void run(std::uint64_t first, std::uint64_t last, Tally& tally) const {
    std::array<Lane, kLanes> lanes;
    std::uint64_t next = first;
    int active = 0;
    for (auto& lane : lanes) {
      if (start_next(lane, next, last, tally)) ++active;
    }
    while (active > 0) {
      for (auto& lane : lanes) {
        if (!lane.live) continue;
        if (step(lane, tally)) continue;
        lane.live = false;
        if (!start_next(lane, next, last, tally)) --active;
      }
    }
  }

 private:
  struct Lane {
    boost::random::mt19937_64 rng;
    boost::random::normal_distribution<double> normal;
    boost::random::uniform_01<double> uniform;
    double w = 0.0;
    std::uint64_t steps_left = 0;  // full steps still to take
    double tail = 0.0;             // final partial step before death
    bool live = false;
  };

  // Seeds the lane with the next path that needs simulation; paths that are
  // decided at time 0 are tallied immediately.
  bool start_next(Lane& lane, std::uint64_t& next, std::uint64_t last, Tally& tally) const {
    while (next < last) {
      const std::uint64_t path = next++;
      const double w = cfg_.w0;
      if (w <= 0.0) {
        ++tally.ruined;
        continue;
      }
      if (w >= s_.absorb) {
        ++tally.successes;
        continue;
      }
      lane.rng.seed(splitmix64(cfg_.seed ^ splitmix64(path)));
      boost::random::exponential_distribution<double> death(p_.lambda);
      const double tau = std::min(death(lane.rng), t_cap_);
      lane.steps_left = static_cast<std::uint64_t>(tau / cfg_.dt);
      lane.tail = tau - static_cast<double>(lane.steps_left) * cfg_.dt;
      lane.w = w;
      lane.live = true;
      return true;
    }
    return false;
  }

  // One Euler step. Returns false once the path is decided.
  bool step(Lane& lane, Tally& tally) const {
    double h = cfg_.dt, sq = sq_dt_;
    if (lane.steps_left == 0) {
      if (lane.tail <= 0.0) return finish_at_death(lane, tally);
      h = lane.tail;
      sq = std::sqrt(h);
      lane.tail = 0.0;
    } else {
      --lane.steps_left;
    }
    const double w = lane.w;
    const double pi = lookup(w);
    const double benefit = insured(w) ? p_.b - w : 0.0;
    const double drift = p_.r * w + (p_.mu - p_.r) * pi - p_.c - p_.h * benefit;
    const double vol = p_.sigma * pi;
    const double z = lane.normal(lane.rng);
    const double next = w + drift * h + vol * sq * z;
    ++tally.steps;
    if (next <= 0.0) {
      ++tally.ruined;
      return false;
    }
    if (cfg_.bridge_correction && vol > 0.0) {
      const double var = vol * vol * h;
      if (2.0 * w * next < 40.0 * var && lane.uniform(lane.rng) < std::exp(-2.0 * w * next / var)) {
        ++tally.ruined;
        return false;
      }
    }
    lane.w = next;
    if (next >= s_.absorb) {
      ++tally.successes;
      return false;
    }
    return true;
  }

  bool finish_at_death(const Lane& lane, Tally& tally) const {
    if (lane.w >= p_.b || insured(lane.w)) ++tally.successes;
    return false;
  }

  bool insured(double w) const { return w >= s_.insure_lo && w <= s_.insure_hi; }

  double lookup(double w) const {
    const double pos = w * inv_dx_;
    const auto i = static_cast<std::size_t>(pos);
    const double t = pos - static_cast<double>(i);
    return table_[i] + t * (table_[i + 1] - table_[i]);
  }

  const MarketParams& p_;
  const FeedbackStrategy& s_;
  const McConfig& cfg_;
  const double* table_;
  double inv_dx_;
  double t_cap_;
  double sq_dt_;
};

void validate(const McConfig& cfg, const FeedbackStrategy& s) {
  if (cfg.n_paths < 1) throw ConfigError("mc: n_paths must be at least 1");
  if (!(cfg.dt > 0.0 && cfg.dt <= 0.01)) throw ConfigError("mc: dt must lie in (0, 0.01]");
  if (!(s.absorb > 0.0)) throw ConfigError("mc: strategy absorption level must be positive");
  if (!(cfg.w0 >= 0.0 && cfg.w0 <= s.absorb)) {
    throw ConfigError("mc: w0 must lie in [0, " + std::to_string(s.absorb) + "]");
  }
  if (!s.pi && s.pi_table.empty()) throw ConfigError("mc: strategy has no investment rule");
}

}  // namespace

FeedbackStrategy FeedbackStrategy::optimal(const Solution& solution) {
  FeedbackStrategy s;
  s.pi = [solution](double w) { return eval_clamped(solution, w).pi_star; };
  s.insure_lo = solution.w_b;
  s.insure_hi = std::min(solution.w_s(), solution.params.b);
  s.absorb = solution.w_s();
  s.pi_table = tabulate(s.pi, s.absorb);
  return s;
}

FeedbackStrategy FeedbackStrategy::never_insure(const Solution& solution) {
  FeedbackStrategy s;
  const auto& p = solution.params;
  if (p.c == 0.0) {
    s.pi = [solution](double w) { return eval_clamped(solution, w).pi_star; };
  } else {
    s.pi = [p, d = solution.derived](double w) { return pi_min(p, d, w); };
  }
  s.absorb = std::max(p.b, p.c / p.r);
  s.pi_table = tabulate(s.pi, s.absorb);
  return s;
}

unsigned default_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BEQUEST_OPT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) hw = std::min(hw, static_cast<unsigned>(v));
  }
  return hw;
}

McResult mc_estimate(const MarketParams& params, const FeedbackStrategy& strategy,
                     const McConfig& cfg) {
  params.validate();
  validate(cfg, strategy);
  const std::vector<double> built =
      strategy.pi_table.empty() ? tabulate(strategy.pi, strategy.absorb) : std::vector<double>{};
  const std::vector<double>& table = strategy.pi_table.empty() ? built : strategy.pi_table;
  if (table.size() != kTableIntervals + 2) throw ConfigError("mc: investment table has the wrong size");

  const LaneSimulator sim(params, strategy, cfg, table);
  const std::uint64_t n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(cfg.threads > 0 ? cfg.threads : default_thread_count(), n_blocks));

  std::atomic<std::uint64_t> next_block{0};
  std::mutex merge;
  Tally total;
  auto work = [&] {
    Tally local;
    for (std::uint64_t blk = next_block++; blk < n_blocks; blk = next_block++) {
      const std::uint64_t end = std::min(cfg.n_paths, (blk + 1) * kBlock);
      sim.run(blk * kBlock, end, local);
    }
    std::lock_guard lock(merge);
    total.successes += local.successes;
    total.ruined += local.ruined;
    total.steps += local.steps;
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  McResult out;
  out.n_paths = cfg.n_paths;
  out.successes = total.successes;
  out.ruined = total.ruined;
  const double n = static_cast<double>(cfg.n_paths);
  out.estimate = static_cast<double>(total.successes) / n;
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
  out.mean_steps = static_cast<double>(total.steps) / n;
  return out;
}

double mc_z_score(const McResult& result, double reference) {
  const double gap = std::abs(result.estimate - reference);
  if (result.std_error > 0.0) return gap / result.std_error;
  return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace bequest
