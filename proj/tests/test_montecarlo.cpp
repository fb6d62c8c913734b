#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "cfmarc/analysis.hpp"
#include "cfmarc/montecarlo.hpp"

using namespace cfmarc;

namespace {

ScenarioConfig small_cfg() {
  ScenarioConfig cfg;
  cfg.M = 2;
  cfg.R = 2.0;
  cfg.delta_sr = 0.5;
  cfg.delta_rd = 0.5;
  cfg.kappa = 3.52;
  cfg.snr_grid_db = {5.0, 10.0};
  cfg.trials = 5000;
  cfg.seed = 42;
  return cfg;
}

const std::vector<Strategy> kAll = {Strategy::kBaseline, Strategy::kLimFb,
                                    Strategy::kSufFb, Strategy::kSoussi,
                                    Strategy::kInsausti};

bool same_counters(const StrategyCounters& a, const StrategyCounters& b) {
  return a.trial_num == b.trial_num && a.outage_num == b.outage_num &&
         a.direct_outage_num == b.direct_outage_num &&
         a.rank_fail_num == b.rank_fail_num &&
         a.rounds_total == b.rounds_total;
}

bool same_sweep(const SweepResult& a, const SweepResult& b) {
  if (a.counters.size() != b.counters.size()) return false;
  for (std::size_t i = 0; i < a.counters.size(); ++i)
    for (std::size_t k = 0; k < a.counters[i].size(); ++k)
      if (!same_counters(a.counters[i][k], b.counters[i][k])) return false;
  return true;
}

struct WorkerEnv {
  explicit WorkerEnv(const char* v) { setenv("CFMARC_WORKERS", v, 1); }
  ~WorkerEnv() { unsetenv("CFMARC_WORKERS"); }
};

}  // namespace

TEST_CASE("repeated sweeps with one seed are identical") {
  const auto cfg = small_cfg();
  const SweepResult a = run_sweep(cfg, kAll);
  const SweepResult b = run_sweep(cfg, kAll);
  CHECK(same_sweep(a, b));
}

TEST_CASE("worker count never changes the counters") {
  const auto cfg = small_cfg();
  SweepResult one, four;
  {
    WorkerEnv env("1");
    CHECK(sweep_workers() == 1);
    one = run_sweep(cfg, kAll);
  }
  {
    WorkerEnv env("4");
    CHECK(sweep_workers() == 4);
    four = run_sweep(cfg, kAll);
  }
  CHECK(same_sweep(one, four));
  {
    WorkerEnv env("banana");
    CHECK_THROWS_AS((void)sweep_workers(), std::invalid_argument);
  }
  {
    WorkerEnv env("0");
    CHECK_THROWS_AS((void)sweep_workers(), std::invalid_argument);
  }
}

TEST_CASE("common random numbers tie the strategies together exactly") {
  const auto cfg = small_cfg();
  const SweepResult sr = run_sweep(cfg, kAll);
  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    const auto& base = sr.at(Strategy::kBaseline, k);
    const auto& lim = sr.at(Strategy::kLimFb, k);
    const auto& suf = sr.at(Strategy::kSufFb, k);
    const auto& sou = sr.at(Strategy::kSoussi, k);
    const auto& ins = sr.at(Strategy::kInsausti, k);

    // baseline's outage event is exactly the feedback strategies' e1
    CHECK(base.outage_num == base.direct_outage_num);
    CHECK(lim.direct_outage_num == base.outage_num);
    CHECK(suf.direct_outage_num == base.outage_num);
    // pointwise event inclusions, exact under shared realizations
    CHECK(suf.outage_num <= lim.outage_num);
    CHECK(lim.outage_num <= base.outage_num);
    // two-source insausti is pointwise identical to lim-FB
    CHECK(ins.outage_num == lim.outage_num);
    // round accounting identities
    CHECK(base.rounds_total == base.trial_num);
    CHECK(lim.rounds_total == lim.trial_num + lim.direct_outage_num);
    CHECK(suf.rounds_total == lim.rounds_total);
    CHECK(sou.rounds_total == 2 * sou.trial_num);
    CHECK(ins.rounds_total == 2 * ins.trial_num);
    // rank failures only occur inside lim-FB's second round
    CHECK(suf.rank_fail_num == 0);
    CHECK(lim.rank_fail_num <= lim.direct_outage_num);
  }
}

TEST_CASE("single-source sweeps match the Rayleigh closed forms") {
  ScenarioConfig cfg = small_cfg();
  cfg.M = 1;
  cfg.snr_grid_db = {10.0};
  cfg.trials = 100000;

  // baseline: outage iff log2(1 + gamma |h|^2) < R with |h|^2 ~ Exp(1)
  const SweepResult sr = run_sweep(cfg, kAll);
  const double g_sd = 10.0;
  const double thr = (std::exp2(cfg.R) - 1.0);
  const double p_base = 1.0 - std::exp(-thr / g_sd);
  const auto& base = sr.at(Strategy::kBaseline, 0);
  const double se_base = proportion_se(base.outage_num, base.trial_num);
  CHECK(std::abs(outage_prob(base) - p_base) < 4.0 * se_base + 1e-12);

  // soussi: two-hop bottleneck min(R_r, R_rd) with independent fades
  const double gain = std::pow(0.5, -3.52);
  const double p_sou = 1.0 - std::exp(-thr / (g_sd * gain)) *
                                 std::exp(-thr / (g_sd * gain));
  const auto& sou = sr.at(Strategy::kSoussi, 0);
  const double se_sou = proportion_se(sou.outage_num, sou.trial_num);
  CHECK(std::abs(outage_prob(sou) - p_sou) < 4.0 * se_sou + 1e-12);

  // lim-FB with a perfect forwarding hop: independent product of the two
  // decoding failures
  SweepOptions opts;
  opts.perfect_r_rd = true;
  const SweepResult pr = run_sweep(cfg, {Strategy::kLimFb}, opts);
  const double p_lim = p_base * (1.0 - std::exp(-thr / (g_sd * gain)));
  const auto& lim = pr.at(Strategy::kLimFb, 0);
  const double se_lim = proportion_se(lim.outage_num, lim.trial_num);
  CHECK(std::abs(outage_prob(lim) - p_lim) < 4.0 * se_lim + 1e-12);
}

TEST_CASE("very high SNR produces zero outages") {
  ScenarioConfig cfg = small_cfg();
  cfg.M = 1;
  cfg.R = 1.0;
  cfg.snr_grid_db = {90.0};
  cfg.trials = 10000;
  const SweepResult sr = run_sweep(cfg, {Strategy::kBaseline});
  CHECK(sr.at(Strategy::kBaseline, 0).outage_num == 0);
}

TEST_CASE("perfect forwarding hop can only reduce outage") {
  const auto cfg = small_cfg();
  const SweepResult normal = run_sweep(cfg, {Strategy::kLimFb});
  SweepOptions opts;
  opts.perfect_r_rd = true;
  const SweepResult perfect = run_sweep(cfg, {Strategy::kLimFb}, opts);
  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    CHECK(perfect.at(Strategy::kLimFb, k).outage_num <=
          normal.at(Strategy::kLimFb, k).outage_num);
    CHECK(perfect.at(Strategy::kLimFb, k).direct_outage_num ==
          normal.at(Strategy::kLimFb, k).direct_outage_num);
  }
}

TEST_CASE("component counters agree with the strategy events") {
  auto cfg = small_cfg();
  cfg.trials = 4000;
  SweepOptions opts;
  opts.record_components = true;
  const SweepResult sr = run_sweep(cfg, kAll, opts);
  REQUIRE(sr.components.size() == cfg.snr_grid_db.size());
  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    const ComponentCounters& c = sr.components[k];
    CHECK(c.trial_num == cfg.trials);
    // the worst-of-M destination event is the baseline outage event
    CHECK(c.dest_m_fail == sr.at(Strategy::kBaseline, k).outage_num);
    // rate ordering makes the failure events nested
    CHECK(c.dest_m1_fail <= c.dest_m_fail);
    CHECK(c.relay_1_fail <= c.relay_m_fail);

    // the cooperative-round rank failure is the same matrix test applied on
    // a subset of trials, so it can never exceed the every-trial count
    CHECK(sr.at(Strategy::kLimFb, k).rank_fail_num <= c.def_fail);
    CHECK(c.def_fail <= c.trial_num);

    // forwarding hop failure matches its closed form
    const double g_rd =
        std::pow(10.0, cfg.snr_grid_db[k] / 10.0) * std::pow(0.5, -3.52);
    const double p_rd = 1.0 - std::exp(-(std::exp2(cfg.R) - 1.0) / g_rd);
    const double se = proportion_se(c.rd_fail, c.trial_num);
    CHECK(std::abs(static_cast<double>(c.rd_fail) /
                       static_cast<double>(c.trial_num) -
                   p_rd) < 4.0 * se + 1e-3);
  }
}

TEST_CASE("adaptive mode stops early on common events and flags starvation") {
  ScenarioConfig cfg = small_cfg();
  cfg.M = 1;
  cfg.R = 2.0;
  cfg.snr_grid_db = {0.0, 10.0};
  cfg.trials = 1;  // ignored by the adaptive driver
  AdaptiveOptions aopts;
  aopts.target_events = 100;
  aopts.batch = 1000;
  aopts.max_trials = 100000;
  const AdaptiveSweep as = adaptive_trials(cfg, {Strategy::kBaseline}, aopts);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(as.censored[k] == 0);
    CHECK(as.result.at(Strategy::kBaseline, k).outage_num >= 100);
    CHECK(as.result.at(Strategy::kBaseline, k).trial_num == 1000);
  }

  // adaptive totals replay exactly as a flat sweep of the same length
  ScenarioConfig flat = cfg;
  flat.trials = as.result.at(Strategy::kBaseline, 0).trial_num;
  const SweepResult replay = run_sweep(flat, {Strategy::kBaseline});
  CHECK(replay.at(Strategy::kBaseline, 0).outage_num ==
        as.result.at(Strategy::kBaseline, 0).outage_num);

  // starved point: cap reached with zero events and a censored flag
  ScenarioConfig starved = cfg;
  starved.R = 1.0;
  starved.snr_grid_db = {80.0};
  AdaptiveOptions tight;
  tight.target_events = 10;
  tight.batch = 1000;
  tight.max_trials = 5000;
  const AdaptiveSweep cs =
      adaptive_trials(starved, {Strategy::kBaseline}, tight);
  CHECK(cs.censored[0] == 1);
  CHECK(cs.result.at(Strategy::kBaseline, 0).trial_num == 5000);
  CHECK(cs.result.at(Strategy::kBaseline, 0).outage_num == 0);
}

TEST_CASE("equation sweep shares realizations with the strategy sweep") {
  auto cfg = small_cfg();
  cfg.trials = 4000;
  const EquationSweep es = run_equation_sweep(cfg);
  const SweepResult sr = run_sweep(cfg, {Strategy::kBaseline});
  REQUIRE(es.per_snr.size() == cfg.snr_grid_db.size());
  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    const EquationCounters& c = es.per_snr[k];
    CHECK(c.trial_num == cfg.trials);
    // better equations fail less often, as nested events
    CHECK(c.fail_num[0] <= c.fail_num[1]);
    // the worst equation's failures are exactly the baseline outages
    CHECK(c.fail_num[1] == sr.at(Strategy::kBaseline, k).outage_num);
  }

  AdaptiveOptions aopts;
  aopts.target_events = 50;
  aopts.batch = 2000;
  aopts.max_trials = 8000;
  const AdaptiveEquationSweep aes = adaptive_equation_trials(cfg, aopts);
  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    const EquationCounters& c = aes.result.per_snr[k];
    const std::uint64_t rarest = std::min(c.fail_num[0], c.fail_num[1]);
    if (!aes.censored[k]) {
      CHECK(rarest >= 50);
    } else {
      CHECK(c.trial_num == 8000);
      CHECK(rarest < 50);
    }
  }
}

TEST_CASE("sweep rejects bad requests") {
  auto cfg = small_cfg();
  CHECK_THROWS_AS((void)run_sweep(cfg, {}), std::invalid_argument);
  cfg.trials = 0;
  CHECK_THROWS_AS((void)run_sweep(cfg, kAll), std::invalid_argument);
  const SweepResult sr = run_sweep(small_cfg(), {Strategy::kBaseline});
  CHECK_THROWS_AS((void)sr.at(Strategy::kSoussi, 0), std::out_of_range);
  AdaptiveOptions bad;
  bad.target_events = 0;
  CHECK_THROWS_AS(
      (void)adaptive_trials(small_cfg(), {Strategy::kBaseline}, bad),
      std::invalid_argument);
}
