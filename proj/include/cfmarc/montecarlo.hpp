#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cfmarc/channel.hpp"
#include "cfmarc/strategies.hpp"

namespace cfmarc {

// Aggregated verdicts for one (strategy, SNR point). All fields are exact
// integer sums of per-trial indicators, so totals are independent of how
// trials were partitioned across workers.
struct StrategyCounters {
  std::uint64_t trial_num = 0;
  std::uint64_t outage_num = 0;
  std::uint64_t direct_outage_num = 0;
  std::uint64_t rank_fail_num = 0;
  std::uint64_t rounds_total = 0;

  void add(const TrialOutcome& out) {
    ++trial_num;
    outage_num += out.overall_outage ? 1 : 0;
    direct_outage_num += out.direct_outage ? 1 : 0;
    rank_fail_num += out.rank_deficient ? 1 : 0;
    rounds_total += static_cast<std::uint64_t>(out.rounds_used);
  }

  StrategyCounters& operator+=(const StrategyCounters& o) {
    trial_num += o.trial_num;
    outage_num += o.outage_num;
    direct_outage_num += o.direct_outage_num;
    rank_fail_num += o.rank_fail_num;
    rounds_total += o.rounds_total;
    return *this;
  }
};

// Per-trial failure indicators of the individual links and equations,
// shared by all strategies at one SNR point. These feed the analytic
// outage bounds, which must be assembled from the same sweep that
// produced the empirical curves.
struct ComponentCounters {
  std::uint64_t trial_num = 0;
  std::uint64_t dest_m_fail = 0;    // worst of the destination's M rates
  std::uint64_t dest_m1_fail = 0;   // worst of its M-1 best (0 if M = 1)
  std::uint64_t relay_1_fail = 0;   // relay's best rate
  std::uint64_t relay_m_fail = 0;   // relay's worst rate
  std::uint64_t rd_fail = 0;        // relay-destination point-to-point rate
  // Relay's best vector stacked with the destination's M-1 best is rank
  // deficient. Unconditional: counted on every trial, unlike the
  // cooperative-round counter in StrategyCounters.
  std::uint64_t def_fail = 0;

  ComponentCounters& operator+=(const ComponentCounters& o) {
    trial_num += o.trial_num;
    dest_m_fail += o.dest_m_fail;
    dest_m1_fail += o.dest_m1_fail;
    relay_1_fail += o.relay_1_fail;
    relay_m_fail += o.relay_m_fail;
    rd_fail += o.rd_fail;
    def_fail += o.def_fail;
    return *this;
  }
};

struct SweepResult {
  std::vector<Strategy> strategies;
  std::vector<double> snr_grid_db;
  // counters[strategy index][snr index]
  std::vector<std::vector<StrategyCounters>> counters;
  // filled only when SweepOptions::record_components is set
  std::vector<ComponentCounters> components;

  const StrategyCounters& at(Strategy s, std::size_t snr_idx) const;
};

struct SweepOptions {
  // Treat the relay-destination hop as error-free: isolates the rank
  // behavior of the cooperative matrix from the forwarding bottleneck.
  bool perfect_r_rd = false;
  // Also count the per-link failure indicators (forces the relay-side
  // search on every trial instead of only when a strategy needs it).
  bool record_components = false;
};

// Evaluates every requested strategy on one shared realization per
// (SNR point, trial index): common random numbers make paired strategy
// comparisons low-variance. Deterministic for a fixed config no matter
// how many workers run (override with the CFMARC_WORKERS env var).
SweepResult run_sweep(const ScenarioConfig& cfg,
                      const std::vector<Strategy>& strategies,
                      const SweepOptions& opts = {});

// Single-receiver sweep: failure counts of each of the M best equations
// at the destination, with no relay involved. Realizations consume the
// stream exactly like the full sweep, so the destination channels match
// a strategy sweep with the same seed.
struct EquationCounters {
  std::uint64_t trial_num = 0;
  std::array<std::uint64_t, kMaxSources> fail_num{};  // index m-1

  EquationCounters& operator+=(const EquationCounters& o) {
    trial_num += o.trial_num;
    for (std::size_t i = 0; i < fail_num.size(); ++i)
      fail_num[i] += o.fail_num[i];
    return *this;
  }
};

struct EquationSweep {
  int M = 0;
  std::vector<double> snr_grid_db;
  std::vector<EquationCounters> per_snr;
};

EquationSweep run_equation_sweep(const ScenarioConfig& cfg);

// Batch mode: at each SNR point, keep adding trials (in deterministic
// batches) until every tracked failure counter has at least
// target_events, or max_trials is reached. The rarest curve controls the
// stopping rule; points stopped by the cap are flagged censored.
struct AdaptiveOptions {
  std::uint64_t target_events = 100;
  std::uint64_t max_trials = 1'000'000;
  std::uint64_t batch = 65'536;
};

struct AdaptiveSweep {
  SweepResult result;
  std::vector<std::uint8_t> censored;  // per SNR point
};

AdaptiveSweep adaptive_trials(const ScenarioConfig& cfg,
                              const std::vector<Strategy>& strategies,
                              const AdaptiveOptions& aopts,
                              const SweepOptions& opts = {});

struct AdaptiveEquationSweep {
  EquationSweep result;
  std::vector<std::uint8_t> censored;
};

AdaptiveEquationSweep adaptive_equation_trials(const ScenarioConfig& cfg,
                                               const AdaptiveOptions& aopts);

// Worker count used by the sweep engine: CFMARC_WORKERS if set (clamped
// to [1, 256]), otherwise the hardware concurrency.
unsigned sweep_workers();

}  // namespace cfmarc
