#include "cfmarc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cfmarc {

namespace {

void require_trials(const StrategyCounters& c) {
  if (c.trial_num == 0)
    throw std::invalid_argument("estimator needs at least one trial");
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double outage_prob(const StrategyCounters& c) {
  require_trials(c);
  return ratio(c.outage_num, c.trial_num);
}

double direct_outage_prob(const StrategyCounters& c) {
  require_trials(c);
  return ratio(c.direct_outage_num, c.trial_num);
}

double rank_fail_prob(const StrategyCounters& c) {
  require_trials(c);
  return ratio(c.rank_fail_num, c.trial_num);
}

double throughput(const StrategyCounters& c, Strategy s, int M) {
  require_trials(c);
  if (M < 1) throw std::invalid_argument("throughput: M < 1");
  double denom = 0.0;
  switch (s) {
    case Strategy::kBaseline:
      denom = 1.0;
      break;
    case Strategy::kLimFb:
    case Strategy::kSufFb:
      denom = 1.0 + direct_outage_prob(c);
      break;
    case Strategy::kSoussi:
    case Strategy::kInsausti:
      denom = 2.0;
      break;
  }
  const double recorded = ratio(c.rounds_total, c.trial_num);
  if (std::abs(denom - recorded) > 1e-12)
    throw std::logic_error("throughput: rounds_total disagrees with model");
  return static_cast<double>(M) * (1.0 - outage_prob(c)) / denom;
}

namespace {

double fit_slope(const std::vector<SlopePoint>& pts) {
  if (pts.size() < 3)
    throw std::invalid_argument("diversity_slope: need at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const SlopePoint& p : pts) {
    sx += p.snr_db / 10.0;
    sy += -std::log10(p.p_out);
  }
  const double n = static_cast<double>(pts.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const SlopePoint& p : pts) {
    const double dx = p.snr_db / 10.0 - mx;
    const double dy = -std::log10(p.p_out) - my;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("diversity_slope: degenerate SNR spread");
  return sxy / sxx;
}

}  // namespace

double diversity_slope(const std::vector<SlopePoint>& curve, double lo_db,
                       double hi_db) {
  std::vector<SlopePoint> pts;
  for (const SlopePoint& p : curve)
    if (p.p_out > 0.0 && p.snr_db >= lo_db - 1e-9 && p.snr_db <= hi_db + 1e-9)
      pts.push_back(p);
  return fit_slope(pts);
}

double diversity_slope(const std::vector<SlopePoint>& curve) {
  std::vector<SlopePoint> usable;
  for (const SlopePoint& p : curve)
    if (p.p_out > 0.0 && p.events >= 30) usable.push_back(p);
  if (usable.empty())
    throw std::invalid_argument("diversity_slope: no usable points");
  double hi = usable.front().snr_db;
  for (const SlopePoint& p : usable) hi = std::max(hi, p.snr_db);
  std::vector<SlopePoint> pts;
  for (const SlopePoint& p : usable)
    if (p.snr_db >= hi - 15.0 - 1e-9) pts.push_back(p);
  return fit_slope(pts);
}

namespace {

std::size_t strategy_index(const SweepResult& sr, Strategy s) {
  for (std::size_t i = 0; i < sr.strategies.size(); ++i)
    if (sr.strategies[i] == s) return i;
  throw std::out_of_range("strategy not present in sweep");
}

}  // namespace

std::vector<SlopePoint> strategy_curve(const SweepResult& sr, Strategy s) {
  const std::size_t si = strategy_index(sr, s);
  std::vector<SlopePoint> out;
  for (std::size_t k = 0; k < sr.snr_grid_db.size(); ++k) {
    const StrategyCounters& c = sr.counters[si][k];
    out.push_back({sr.snr_grid_db[k], outage_prob(c), c.outage_num});
  }
  return out;
}

std::vector<SlopePoint> direct_outage_curve(const SweepResult& sr,
                                            Strategy s) {
  const std::size_t si = strategy_index(sr, s);
  std::vector<SlopePoint> out;
  for (std::size_t k = 0; k < sr.snr_grid_db.size(); ++k) {
    const StrategyCounters& c = sr.counters[si][k];
    out.push_back(
        {sr.snr_grid_db[k], direct_outage_prob(c), c.direct_outage_num});
  }
  return out;
}

std::vector<SlopePoint> rank_deficiency_curve(const SweepResult& sr) {
  const std::size_t si = strategy_index(sr, Strategy::kLimFb);
  std::vector<SlopePoint> out;
  for (std::size_t k = 0; k < sr.snr_grid_db.size(); ++k) {
    const StrategyCounters& c = sr.counters[si][k];
    out.push_back({sr.snr_grid_db[k], rank_fail_prob(c), c.rank_fail_num});
  }
  return out;
}

std::vector<SlopePoint> equation_curve(const EquationSweep& es, int m) {
  if (m < 1 || m > es.M)
    throw std::invalid_argument("equation_curve: m out of range");
  std::vector<SlopePoint> out;
  for (std::size_t k = 0; k < es.snr_grid_db.size(); ++k) {
    const EquationCounters& c = es.per_snr[k];
    if (c.trial_num == 0)
      throw std::invalid_argument("equation_curve: empty SNR point");
    const std::uint64_t fails = c.fail_num[static_cast<std::size_t>(m - 1)];
    out.push_back({es.snr_grid_db[k], ratio(fails, c.trial_num), fails});
  }
  return out;
}

UnionComponents components_at(const SweepResult& sr, std::size_t snr_idx) {
  if (sr.components.size() != sr.snr_grid_db.size())
    throw std::invalid_argument("components_at: components not recorded");
  const ComponentCounters& c = sr.components.at(snr_idx);
  if (c.trial_num == 0)
    throw std::invalid_argument("components_at: empty SNR point");
  UnionComponents u;
  u.dest_m1 = ratio(c.dest_m1_fail, c.trial_num);
  u.dest_m = ratio(c.dest_m_fail, c.trial_num);
  u.relay_1 = ratio(c.relay_1_fail, c.trial_num);
  u.relay_m = ratio(c.relay_m_fail, c.trial_num);
  u.rd = ratio(c.rd_fail, c.trial_num);
  u.p_def = ratio(c.def_fail, c.trial_num);
  return u;
}

namespace {

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string("union bound: ") + what +
                                " outside [0,1]");
}

void check_components(const UnionComponents& c) {
  check_prob(c.dest_m1, "dest_m1");
  check_prob(c.dest_m, "dest_m");
  check_prob(c.relay_1, "relay_1");
  check_prob(c.relay_m, "relay_m");
  check_prob(c.rd, "rd");
  check_prob(c.p_def, "p_def");
}

}  // namespace

double union_bound_lim_fb(const UnionComponents& c) {
  check_components(c);
  return c.dest_m1 + c.dest_m * c.relay_1 + c.dest_m * c.rd +
         std::min(c.dest_m, c.p_def);
}

double union_bound_suf_fb(const UnionComponents& c) {
  check_components(c);
  return c.dest_m1 + c.dest_m * c.relay_m + c.dest_m * c.rd;
}

double hermite_constant(int n) {
  switch (n) {
    case 1:
      return 1.0;
    case 2:
      return 2.0 / std::sqrt(3.0);
    case 3:
      return std::cbrt(2.0);
    case 4:
      return std::sqrt(2.0);
    case 5:
      return std::pow(8.0, 1.0 / 5.0);
    case 6:
      return std::pow(64.0 / 3.0, 1.0 / 6.0);
    case 7:
      return std::pow(64.0, 1.0 / 7.0);
    case 8:
      return 2.0;
    default:
      throw std::invalid_argument("hermite_constant: n outside 1..8");
  }
}

namespace {

// Regularized lower incomplete gamma P(a, x) for small integer a,
// computed from whichever of the two complementary series is stable.
double reg_gamma_p(int a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < static_cast<double>(a) + 1.0) {
    // P = e^{-x} sum_{k >= a} x^k / k!
    double term = std::exp(-x + a * std::log(x) - std::lgamma(a + 1.0));
    double sum = term;
    for (int k = a + 1; k < a + 200; ++k) {
      term *= x / static_cast<double>(k);
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return sum;
  }
  // Q = e^{-x} sum_{k < a} x^k / k!
  double term = std::exp(-x);
  double q = term;
  for (int k = 1; k < a; ++k) {
    term *= x / static_cast<double>(k);
    q += term;
  }
  return 1.0 - q;
}

}  // namespace

double best_equation_envelope(int M, double R, double gamma) {
  if (M < 1 || M > kMaxSources)
    throw std::invalid_argument("envelope: M out of range");
  if (!(R > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("envelope: R and gamma must be positive");
  const double psi = hermite_constant(2 * M);
  const double t =
      (std::pow(psi * std::exp2(R), static_cast<double>(M)) - 1.0) / gamma;
  return reg_gamma_p(M, t);
}

Interval wilson_interval(std::uint64_t events, std::uint64_t trials,
                         double z) {
  if (trials == 0) throw std::invalid_argument("wilson: no trials");
  if (events > trials) throw std::invalid_argument("wilson: events > trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(events) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double proportion_se(std::uint64_t events, std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("se: no trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(events) / n;
  return std::sqrt(p * (1.0 - p) / n);
}

}  // namespace cfmarc
