#pragma once

#include <cstdint>
#include <vector>

#include "cfmarc/montecarlo.hpp"

namespace cfmarc {

// Point estimators over one (strategy, SNR) counter block. All throw
// std::invalid_argument on an empty block.
double outage_prob(const StrategyCounters& c);
double direct_outage_prob(const StrategyCounters& c);
double rank_fail_prob(const StrategyCounters& c);

// Messages per transmission round. The feedback strategies pay the second
// round only when direct decoding fails, the comparison strategies always
// pay it, the baseline never does. The closed-form denominator must agree
// with the recorded rounds_total to 1e-12 or the counters are corrupt.
double throughput(const StrategyCounters& c, Strategy s, int M);

// One point of an outage curve. events lets the default fit window drop
// starved points; synthetic curves can leave it at the (unlimited)
// default.
struct SlopePoint {
  double snr_db = 0.0;
  double p_out = 0.0;
  std::uint64_t events = ~std::uint64_t{0};
};

// Least-squares slope of -log10(p_out) versus snr_db/10: the empirical
// diversity order. The two-argument form fits every positive point whose
// snr_db lies in [lo_db, hi_db]; the default window keeps points with at
// least 30 events and takes the top 15 dB of those. Fewer than 3 usable
// points is an error.
double diversity_slope(const std::vector<SlopePoint>& curve, double lo_db,
                       double hi_db);
double diversity_slope(const std::vector<SlopePoint>& curve);

// Curve extractors.
std::vector<SlopePoint> strategy_curve(const SweepResult& sr, Strategy s);
std::vector<SlopePoint> direct_outage_curve(const SweepResult& sr,
                                            Strategy s);
std::vector<SlopePoint> rank_deficiency_curve(const SweepResult& sr);
std::vector<SlopePoint> equation_curve(const EquationSweep& es, int m);

// Per-link failure probabilities estimated from one sweep, the raw
// material of the analytic outage bounds. p_def is the unconditional
// rank-deficiency rate of the cooperative stack, counted on every trial.
struct UnionComponents {
  double dest_m1 = 0.0;
  double dest_m = 0.0;
  double relay_1 = 0.0;
  double relay_m = 0.0;
  double rd = 0.0;
  double p_def = 0.0;
};

// Requires record_components to have been set on the sweep.
UnionComponents components_at(const SweepResult& sr, std::size_t snr_idx);

double union_bound_lim_fb(const UnionComponents& c);
double union_bound_suf_fb(const UnionComponents& c);

// Hermite's constant for lattices of rank n, exact for n = 1..8.
double hermite_constant(int n);

// Analytic upper bound on the best-equation outage of an M-source
// single-receiver system: the chi-square tail obtained by bounding the
// shortest lattice vector with Hermite's constant. Its high-SNR slope is
// exactly M.
double best_equation_envelope(int M, double R, double gamma);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion (default 95%).
Interval wilson_interval(std::uint64_t events, std::uint64_t trials,
                         double z = 1.959963984540054);

// Plain standard error sqrt(p(1-p)/n) of a proportion estimate.
double proportion_se(std::uint64_t events, std::uint64_t trials);

}  // namespace cfmarc
