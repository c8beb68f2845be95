#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

#include "crankback/errors.hpp"
#include "crankback/profile.hpp"
#include "crankback/scenario.hpp"

namespace crankback {

/// Turn back when the remaining path would overrun with probability > p_tr.
/// Uses the scenario's p_tr.
struct QuantilePolicy {
  friend bool operator==(const QuantilePolicy&, const QuantilePolicy&) = default;
};

/// Legacy rule: turn back when residual time T - t_k drops below `t_tr`,
/// whatever the number of hops left.
struct RestTimePolicy {
  double t_tr = 0.0;
  friend bool operator==(const RestTimePolicy&, const RestTimePolicy&) = default;
};

using Policy = std::variant<QuantilePolicy, RestTimePolicy>;

inline constexpr std::uint64_t kDefaultTrials = 1'000'000;
inline constexpr std::uint64_t kDefaultAttemptCap = 10'000'000;

struct SimConfig {
  std::uint64_t trials = kDefaultTrials;
  std::uint64_t seed = 0;
  Policy policy = QuantilePolicy{};
  // 0 picks std::thread::hardware_concurrency(). Results do not depend on it.
  unsigned workers = 0;
  // simulate_attempts only: total attempts allowed before giving up.
  std::uint64_t attempt_cap = kDefaultAttemptCap;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct SimReport {
  // counts[k-1] = first returns at node k for k = 1..n-1; counts.back() = successes.
  std::vector<std::uint64_t> counts;
  ReturnProfile profile;
  // 99% normal-approximation half-widths, same layout as counts.
  std::vector<double> ci_halfwidth;
  // Among successes, fraction whose total delay is within the deadline.
  double on_time_fraction = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// Outcome of repeating attempts until `successes` deliveries.
struct AttemptReport {
  std::uint64_t successes = 0;
  std::uint64_t attempts = 0;
  double hop_distance = 0.0;
  double mean_attempts_per_success = 0.0;
  double waste_per_attempt = 0.0;
  double waste_per_success = 0.0;
  // Waste plus the final traversal d * n, per success.
  double total_distance_per_success = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const AttemptReport&, const AttemptReport&) = default;
};

namespace detail {

inline constexpr std::uint64_t kBlockSize = 1u << 14;
inline constexpr double kZ99 = 2.5758293035489004;

// Every block gets its own engine keyed by (seed, block index), so results do
// not depend on how blocks are spread across threads.
inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

inline std::vector<double> policy_bounds(const Scenario& s, const Policy& policy) {
  const ThresholdTable tbl = std::visit(
      [&](const auto& p) -> ThresholdTable {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, QuantilePolicy>) {
          return thresholds(s);
        } else {
          return ThresholdTable::constant(s.n, p.t_tr);
        }
      },
      policy);
  std::vector<double> bounds;
  for (int k = 1; k < s.n; ++k) bounds.push_back(tbl.bound(k, s.deadline));
  return bounds;
}

struct TrialOutcome {
  int return_node = 0;  // 0 means delivered
  double total_delay = 0.0;
};

// One traversal. Hop draws are unclipped normals.
template <class Engine>
TrialOutcome run_trial(const std::vector<double>& bounds, std::normal_distribution<double>& hop,
                       Engine& engine) {
  double elapsed = 0.0;
  const int decisions = static_cast<int>(bounds.size());
  for (int k = 1; k <= decisions; ++k) {
    elapsed += hop(engine);
    if (turns_back(elapsed, bounds[static_cast<std::size_t>(k - 1)])) return {k, elapsed};
  }
  elapsed += hop(engine);
  return {0, elapsed};
}

// Runs `job(block, first, count)` for every block, on up to `workers` threads.
// Each block writes only its own slot, so merge order stays fixed.
template <class Job>
void for_each_block(std::uint64_t items, unsigned workers, Job job) {
  const std::uint64_t blocks = (items + kBlockSize - 1) / kBlockSize;
  unsigned threads = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(blocks, 1)));
  auto work = [&](unsigned worker) {
    for (std::uint64_t b = worker; b < blocks; b += threads) {
      const std::uint64_t first = b * kBlockSize;
      job(b, first, std::min(kBlockSize, items - first));
    }
  };
  if (threads <= 1) {
    work(0);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
}

inline SimReport simulate(const Scenario& s, const SimConfig& cfg) {
  if (cfg.trials < 1) throw ValidationError("trials", "must be >= 1");
  const std::vector<double> bounds = policy_bounds(s, cfg.policy);
  const std::size_t slots = static_cast<std::size_t>(s.n);  // n-1 nodes + success

  const std::uint64_t blocks = (cfg.trials + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<std::uint64_t>> block_counts(blocks, std::vector<std::uint64_t>(slots, 0));
  std::vector<std::uint64_t> block_on_time(blocks, 0);

  for_each_block(cfg.trials, cfg.workers, [&](std::uint64_t b, std::uint64_t, std::uint64_t count) {
    auto engine = block_engine(cfg.seed, b);
    std::normal_distribution<double> hop(s.hop_mean, std::sqrt(s.hop_var));
    auto& counts = block_counts[b];
    for (std::uint64_t i = 0; i < count; ++i) {
      const TrialOutcome outcome = run_trial(bounds, hop, engine);
      if (outcome.return_node > 0) {
        ++counts[static_cast<std::size_t>(outcome.return_node - 1)];
      } else {
        ++counts.back();
        if (outcome.total_delay <= s.deadline) ++block_on_time[b];
      }
    }
  });

  SimReport report;
  report.seed = cfg.seed;
  report.trials = cfg.trials;
  report.counts.assign(slots, 0);
  std::uint64_t on_time = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    for (std::size_t i = 0; i < slots; ++i) report.counts[i] += block_counts[b][i];
    on_time += block_on_time[b];
  }

  const auto trials = static_cast<double>(cfg.trials);
  report.profile.method = Method::montecarlo;
  for (std::size_t i = 0; i < slots; ++i) {
    const double p = static_cast<double>(report.counts[i]) / trials;
    if (i + 1 < slots) {
      report.profile.p_return.push_back(p);
    } else {
      report.profile.p_success = p;
    }
    report.ci_halfwidth.push_back(kZ99 * std::sqrt(p * (1.0 - p) / trials));
  }
  const std::uint64_t successes = report.counts.back();
  report.on_time_fraction =
      successes == 0 ? 0.0 : static_cast<double>(on_time) / static_cast<double>(successes);
  return report;
}

}  // namespace detail

/// Monte Carlo first-return profile under the threshold policy.
/// A pure function of (s, cfg) regardless of cfg.workers.
inline SimReport simulate_profile(const Scenario& s, const SimConfig& cfg) {
  s.validate();
  return detail::simulate(s, cfg);
}

/// Same trial structure with the fixed rest-time rule. t_tr == 0 is accepted
/// as a degenerate case.
inline SimReport simulate_baseline(const Scenario& s, const SimConfig& cfg) {
  s.validate();
  const auto* rest = std::get_if<RestTimePolicy>(&cfg.policy);
  if (rest == nullptr) throw ValidationError("policy", "simulate_baseline requires rest_time");
  if (!(rest->t_tr >= 0.0) || !std::isfinite(rest->t_tr)) {
    throw ValidationError("t_tr", "must be finite and >= 0");
  }
  return detail::simulate(s, cfg);
}

/// Repeats independent attempts until cfg.trials deliveries. A return at node k
/// wastes 2 * d * k. Throws NoSuccessError once the attempt cap is spent.
inline AttemptReport simulate_attempts(const Scenario& s, const SimConfig& cfg) {
  s.validate();
  if (!std::holds_alternative<QuantilePolicy>(cfg.policy)) {
    throw ValidationError("policy", "simulate_attempts requires the quantile policy");
  }
  if (cfg.trials < 1) throw ValidationError("trials", "must be >= 1");
  const std::vector<double> bounds = detail::policy_bounds(s, cfg.policy);

  struct BlockTally {
    std::uint64_t attempts = 0;
    std::uint64_t hops_wasted = 0;  // sum of k over returns
    bool exhausted = false;
  };
  const std::uint64_t blocks = (cfg.trials + detail::kBlockSize - 1) / detail::kBlockSize;
  std::vector<BlockTally> tallies(blocks);

  detail::for_each_block(cfg.trials, cfg.workers,
                         [&](std::uint64_t b, std::uint64_t, std::uint64_t count) {
    // Each block gets the share of the cap matching its share of successes.
    const auto cap = static_cast<std::uint64_t>(std::ceil(
        static_cast<double>(cfg.attempt_cap) * static_cast<double>(count) /
        static_cast<double>(cfg.trials)));
    auto engine = detail::block_engine(cfg.seed, b);
    std::normal_distribution<double> hop(s.hop_mean, std::sqrt(s.hop_var));
    BlockTally& tally = tallies[b];
    std::uint64_t delivered = 0;
    while (delivered < count) {
      if (tally.attempts >= cap) {
        tally.exhausted = true;
        return;
      }
      ++tally.attempts;
      const detail::TrialOutcome outcome = detail::run_trial(bounds, hop, engine);
      if (outcome.return_node > 0) {
        tally.hops_wasted += static_cast<std::uint64_t>(outcome.return_node);
      } else {
        ++delivered;
      }
    }
  });

  AttemptReport report;
  report.seed = cfg.seed;
  report.successes = cfg.trials;
  report.hop_distance = s.hop_distance;
  std::uint64_t hops_wasted = 0;
  bool exhausted = false;
  for (const BlockTally& t : tallies) {
    report.attempts += t.attempts;
    hops_wasted += t.hops_wasted;
    exhausted = exhausted || t.exhausted;
  }
  if (exhausted) {
    throw NoSuccessError("no-success: attempt cap of " + std::to_string(cfg.attempt_cap) +
                             " reached before " + std::to_string(cfg.trials) + " deliveries",
                         report.attempts);
  }

  const double waste = 2.0 * s.hop_distance * static_cast<double>(hops_wasted);
  const auto successes = static_cast<double>(report.successes);
  report.mean_attempts_per_success = static_cast<double>(report.attempts) / successes;
  report.waste_per_attempt = waste / static_cast<double>(report.attempts);
  report.waste_per_success = waste / successes;
  report.total_distance_per_success = report.waste_per_success + s.hop_distance * s.n;
  return report;
}

}  // namespace crankback
