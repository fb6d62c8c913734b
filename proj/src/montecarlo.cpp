#include "cfmarc/montecarlo.hpp"

#include <atomic>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace cfmarc {

namespace {

constexpr std::uint64_t kBlock = 1024;  // trials claimed per work unit

// Runs per_trial(trial index, partial) for every index in [begin, end),
// merging per-block partials by commutative integer addition; the result
// cannot depend on which worker ran which block.
template <typename Partial, typename Fn>
void parallel_trials(std::uint64_t begin, std::uint64_t end, Partial& total,
                     const Fn& per_trial) {
  const unsigned workers = sweep_workers();
  if (end <= begin) return;
  if (workers <= 1 || end - begin < 2 * kBlock) {
    for (std::uint64_t t = begin; t < end; ++t) per_trial(t, total);
    return;
  }
  std::atomic<std::uint64_t> next{begin};
  std::mutex merge_mu;
  auto work = [&] {
    Partial local{};
    for (;;) {
      const std::uint64_t lo = next.fetch_add(kBlock);
      if (lo >= end) break;
      const std::uint64_t hi = std::min(end, lo + kBlock);
      for (std::uint64_t t = lo; t < hi; ++t) per_trial(t, local);
    }
    const std::lock_guard<std::mutex> lock(merge_mu);
    total += local;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
}

// Everything one trial adds to one SNR point of a strategy sweep.
struct TrialPartial {
  std::vector<StrategyCounters> per_strategy;
  ComponentCounters components;

  TrialPartial& operator+=(const TrialPartial& o) {
    if (per_strategy.size() < o.per_strategy.size())
      per_strategy.resize(o.per_strategy.size());
    for (std::size_t i = 0; i < o.per_strategy.size(); ++i)
      per_strategy[i] += o.per_strategy[i];
    components += o.components;
    return *this;
  }
};

TrialOutcome evaluate(Strategy s, const CoefficientSet& dest,
                      RelaySearch& relay, double r_rd, double rate_target) {
  switch (s) {
    case Strategy::kBaseline:
      return baseline_outcome(dest, rate_target);
    case Strategy::kLimFb:
      return lim_fb_outcome(dest, relay, r_rd, rate_target);
    case Strategy::kSufFb:
      return suf_fb_outcome(dest, relay, r_rd, rate_target);
    case Strategy::kSoussi:
      return soussi_outcome(dest, relay, r_rd, rate_target);
    case Strategy::kInsausti:
      return insausti_outcome(dest, relay, r_rd, rate_target);
  }
  throw std::logic_error("unknown strategy");
}

// One shared realization, every strategy evaluated on it.
void run_one_trial(const ScenarioConfig& cfg, const SnrTriple& snr,
                   std::size_t snr_idx, std::uint64_t trial,
                   const std::vector<Strategy>& strategies,
                   const SweepOptions& opts, TrialPartial& out) {
  TrialStream stream(cfg.seed, snr_idx, trial);
  const ChannelRealization ch = sample_realization(stream, cfg, snr);

  const CoefficientSet dest =
      successive_minima(LinkParamsd{ch.h_sd, ch.gamma_sd, 1.0});
  RelaySearch relay(ch.h_sr, ch.gamma_sr);
  double r_rd = p2p_rate(ch.h_rd, ch.gamma_rd);
  if (opts.perfect_r_rd) r_rd = std::numeric_limits<double>::infinity();

  if (opts.record_components) {
    const CoefficientSet& rel = relay.get();
    auto& c = out.components;
    ++c.trial_num;
    c.dest_m_fail += dest.rates.back() < cfg.R ? 1 : 0;
    if (cfg.M >= 2)
      c.dest_m1_fail += dest.rates[dest.rates.size() - 2] < cfg.R ? 1 : 0;
    c.relay_1_fail += rel.rates.front() < cfg.R ? 1 : 0;
    c.relay_m_fail += rel.rates.back() < cfg.R ? 1 : 0;
    c.rd_fail += r_rd < cfg.R ? 1 : 0;
    std::vector<GaussianIntVector> coop(dest.vectors.begin(),
                                        dest.vectors.end() - 1);
    coop.insert(coop.begin(), rel.vectors.front());
    c.def_fail += is_full_rank(stack_rows(coop)) ? 0 : 1;
  }

  for (std::size_t i = 0; i < strategies.size(); ++i)
    out.per_strategy[i].add(evaluate(strategies[i], dest, relay, r_rd, cfg.R));
}

void check_invariants(const SweepResult& sr) {
  for (std::size_t si = 0; si < sr.strategies.size(); ++si) {
    for (const StrategyCounters& c : sr.counters[si]) {
      const bool ok = c.outage_num <= c.direct_outage_num &&
                      c.direct_outage_num <= c.trial_num &&
                      c.rank_fail_num <= c.direct_outage_num &&
                      c.rounds_total >= c.trial_num &&
                      c.rounds_total <= 2 * c.trial_num;
      if (!ok) throw std::logic_error("sweep counters violate invariants");
    }
  }
}

}  // namespace

unsigned sweep_workers() {
  if (const char* env = std::getenv("CFMARC_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 256)
      throw std::invalid_argument("CFMARC_WORKERS must be in [1, 256]");
    return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

const StrategyCounters& SweepResult::at(Strategy s,
                                        std::size_t snr_idx) const {
  for (std::size_t i = 0; i < strategies.size(); ++i)
    if (strategies[i] == s) return counters[i].at(snr_idx);
  throw std::out_of_range("strategy not present in sweep");
}

namespace {

SweepResult make_empty(const ScenarioConfig& cfg,
                       const std::vector<Strategy>& strategies,
                       const SweepOptions& opts) {
  validate(cfg);
  if (strategies.empty())
    throw std::invalid_argument("run_sweep: no strategies requested");
  SweepResult sr;
  sr.strategies = strategies;
  sr.snr_grid_db = cfg.snr_grid_db;
  sr.counters.assign(strategies.size(),
                     std::vector<StrategyCounters>(cfg.snr_grid_db.size()));
  if (opts.record_components)
    sr.components.resize(cfg.snr_grid_db.size());
  return sr;
}

// Adds trials [begin, end) at one SNR point into sr.
void extend_point(SweepResult& sr, const ScenarioConfig& cfg,
                  const std::vector<Strategy>& strategies,
                  const SweepOptions& opts, std::size_t snr_idx,
                  std::uint64_t begin, std::uint64_t end) {
  const SnrTriple snr = scenario_snrs(cfg, cfg.snr_grid_db[snr_idx]);
  TrialPartial total;
  total.per_strategy.resize(strategies.size());
  parallel_trials(begin, end, total,
                  [&](std::uint64_t t, TrialPartial& p) {
                    if (p.per_strategy.empty())
                      p.per_strategy.resize(strategies.size());
                    run_one_trial(cfg, snr, snr_idx, t, strategies, opts, p);
                  });
  for (std::size_t i = 0; i < strategies.size(); ++i)
    sr.counters[i][snr_idx] += total.per_strategy[i];
  if (opts.record_components) sr.components[snr_idx] += total.components;
}

}  // namespace

SweepResult run_sweep(const ScenarioConfig& cfg,
                      const std::vector<Strategy>& strategies,
                      const SweepOptions& opts) {
  SweepResult sr = make_empty(cfg, strategies, opts);
  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k)
    extend_point(sr, cfg, strategies, opts, k, 0, cfg.trials);
  check_invariants(sr);
  return sr;
}

AdaptiveSweep adaptive_trials(const ScenarioConfig& cfg,
                              const std::vector<Strategy>& strategies,
                              const AdaptiveOptions& aopts,
                              const SweepOptions& opts) {
  if (aopts.target_events < 1)
    throw std::invalid_argument("adaptive_trials: target_events < 1");
  if (aopts.batch < 1 || aopts.max_trials < 1)
    throw std::invalid_argument("adaptive_trials: empty batch or cap");

  AdaptiveSweep out;
  out.result = make_empty(cfg, strategies, opts);
  out.censored.assign(cfg.snr_grid_db.size(), 0);

  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    std::uint64_t done = 0;
    auto rarest = [&] {
      std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
      for (std::size_t i = 0; i < strategies.size(); ++i)
        lo = std::min(lo, out.result.counters[i][k].outage_num);
      return lo;
    };
    while (done < aopts.max_trials && rarest() < aopts.target_events) {
      const std::uint64_t next =
          std::min(aopts.max_trials, done + aopts.batch);
      extend_point(out.result, cfg, strategies, opts, k, done, next);
      done = next;
    }
    out.censored[k] = rarest() < aopts.target_events ? 1 : 0;
  }
  check_invariants(out.result);
  return out;
}

namespace {

void extend_equation_point(EquationSweep& es, const ScenarioConfig& cfg,
                           std::size_t snr_idx, std::uint64_t begin,
                           std::uint64_t end) {
  const SnrTriple snr = scenario_snrs(cfg, cfg.snr_grid_db[snr_idx]);
  EquationCounters total;
  parallel_trials(
      begin, end, total, [&](std::uint64_t t, EquationCounters& p) {
        TrialStream stream(cfg.seed, snr_idx, t);
        const ChannelRealization ch = sample_realization(stream, cfg, snr);
        const CoefficientSet dest =
            successive_minima(LinkParamsd{ch.h_sd, ch.gamma_sd, 1.0});
        ++p.trial_num;
        for (int m = 0; m < cfg.M; ++m)
          p.fail_num[static_cast<std::size_t>(m)] +=
              dest.rates[static_cast<std::size_t>(m)] < cfg.R ? 1 : 0;
      });
  es.per_snr[snr_idx] += total;
}

}  // namespace

EquationSweep run_equation_sweep(const ScenarioConfig& cfg) {
  validate(cfg);
  EquationSweep es;
  es.M = cfg.M;
  es.snr_grid_db = cfg.snr_grid_db;
  es.per_snr.resize(cfg.snr_grid_db.size());
  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k)
    extend_equation_point(es, cfg, k, 0, cfg.trials);
  return es;
}

AdaptiveEquationSweep adaptive_equation_trials(const ScenarioConfig& cfg,
                                               const AdaptiveOptions& aopts) {
  validate(cfg);
  if (aopts.target_events < 1)
    throw std::invalid_argument("adaptive_trials: target_events < 1");
  if (aopts.batch < 1 || aopts.max_trials < 1)
    throw std::invalid_argument("adaptive_trials: empty batch or cap");

  AdaptiveEquationSweep out;
  out.result.M = cfg.M;
  out.result.snr_grid_db = cfg.snr_grid_db;
  out.result.per_snr.resize(cfg.snr_grid_db.size());
  out.censored.assign(cfg.snr_grid_db.size(), 0);

  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    std::uint64_t done = 0;
    auto rarest = [&] {
      std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
      for (int m = 0; m < cfg.M; ++m)
        lo = std::min(
            lo, out.result.per_snr[k].fail_num[static_cast<std::size_t>(m)]);
      return lo;
    };
    while (done < aopts.max_trials && rarest() < aopts.target_events) {
      const std::uint64_t next =
          std::min(aopts.max_trials, done + aopts.batch);
      extend_equation_point(out.result, cfg, k, done, next);
      done = next;
    }
    out.censored[k] = rarest() < aopts.target_events ? 1 : 0;
  }
  return out;
}

}  // namespace cfmarc
