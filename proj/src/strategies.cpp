#include "cfmarc/strategies.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace cfmarc {

namespace {

// R_cp,d^(M): the worst of the M best equations. rates descend, so this is
// the last entry.
bool direct_fails(const CoefficientSet& dest, double rate_target) {
  return dest.rates.back() < rate_target;
}

// Worst destination rate among the M-1 best equations; no constraint when
// M = 1 (the destination contributes nothing to the cooperative matrix).
bool dest_m1_fails(const CoefficientSet& dest, double rate_target) {
  const std::size_t m = dest.rates.size();
  return m >= 2 && dest.rates[m - 2] < rate_target;
}

std::vector<GaussianIntVector> dest_m1_vectors(const CoefficientSet& dest) {
  return {dest.vectors.begin(), dest.vectors.end() - 1};
}

}  // namespace

TrialOutcome baseline_outcome(const CoefficientSet& dest, double rate_target) {
  TrialOutcome out;
  out.direct_outage = direct_fails(dest, rate_target);
  out.overall_outage = out.direct_outage;
  out.rounds_used = 1;
  return out;
}

TrialOutcome lim_fb_outcome(const CoefficientSet& dest, RelaySearch& relay,
                            double r_rd, double rate_target) {
  TrialOutcome out;
  out.direct_outage = direct_fails(dest, rate_target);
  if (!out.direct_outage) return out;

  out.rounds_used = 2;
  const CoefficientSet& rel = relay.get();
  std::vector<GaussianIntVector> coop = dest_m1_vectors(dest);
  coop.insert(coop.begin(), rel.vectors.front());
  out.rank_deficient = !is_full_rank(stack_rows(coop));
  const bool e2 = dest_m1_fails(dest, rate_target) ||
                  rel.rates.front() < rate_target || r_rd < rate_target ||
                  out.rank_deficient;
  out.overall_outage = e2;
  return out;
}

TrialOutcome suf_fb_outcome(const CoefficientSet& dest, RelaySearch& relay,
                            double r_rd, double rate_target) {
  TrialOutcome out;
  out.direct_outage = direct_fails(dest, rate_target);
  if (!out.direct_outage) return out;

  out.rounds_used = 2;
  const CoefficientSet& rel = relay.get();
  const std::vector<GaussianIntVector> fed_back = dest_m1_vectors(dest);

  // Highest-rate relay equation that completes the rank. The relay list
  // spans and the fed-back vectors span a proper subspace, so a completing
  // element always exists.
  double selected_rate = -1.0;
  bool found = false;
  for (std::size_t i = 0; i < rel.vectors.size() && !found; ++i) {
    std::vector<GaussianIntVector> coop = fed_back;
    coop.push_back(rel.vectors[i]);
    if (is_full_rank(stack_rows(coop))) {
      selected_rate = rel.rates[i];
      found = true;
    }
  }
  if (!found)
    throw std::logic_error("suf_fb: no rank-completing relay equation");

  const bool e2 = dest_m1_fails(dest, rate_target) ||
                  selected_rate < rate_target || r_rd < rate_target;
  out.overall_outage = e2;
  return out;
}

double soussi_best_rate(const CoefficientSet& dest,
                        const CoefficientSet& relay) {
  const std::size_t m = dest.vectors.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t skip = 0; skip < m; ++skip) {
      std::vector<GaussianIntVector> coop;
      double dest_min = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < m; ++j) {
        if (j == skip) continue;
        coop.push_back(dest.vectors[j]);
        dest_min = std::min(dest_min, dest.rates[j]);
      }
      coop.push_back(relay.vectors[i]);
      if (!is_full_rank(stack_rows(coop))) continue;
      best = std::max(best, std::min(relay.rates[i], dest_min));
    }
  }
  return best;
}

TrialOutcome soussi_outcome(const CoefficientSet& dest, RelaySearch& relay,
                            double r_rd, double rate_target) {
  TrialOutcome out;
  out.rounds_used = 2;
  bool outage;
  if (r_rd < rate_target) {
    outage = true;  // hard bottleneck; the joint search cannot help
  } else {
    outage = soussi_best_rate(dest, relay.get()) < rate_target;
  }
  out.overall_outage = outage;
  out.direct_outage = outage;  // no separate direct-decoding stage exists
  return out;
}

TrialOutcome insausti_outcome(const CoefficientSet& dest, RelaySearch& relay,
                              double r_rd, double rate_target) {
  TrialOutcome out;
  out.rounds_used = 2;
  out.direct_outage = direct_fails(dest, rate_target);

  const CoefficientSet& rel = relay.get();
  const std::size_t m = dest.vectors.size();

  // Destination keeps its lowest-norm equations that stay independent of
  // the relay's forwarded one. The M own vectors span, so M-1 of them
  // always complete the rank.
  std::vector<GaussianIntVector> coop{rel.vectors.front()};
  double coop_dest_min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m && coop.size() < m; ++j) {
    std::vector<GaussianIntVector> trial = coop;
    trial.push_back(dest.vectors[j]);
    if (is_full_rank(stack_rows(trial))) {
      coop = std::move(trial);
      coop_dest_min = std::min(coop_dest_min, dest.rates[j]);
    }
  }
  if (coop.size() != m)
    throw std::logic_error("insausti: rank completion failed");

  const bool coop_ok = rel.rates.front() >= rate_target &&
                       r_rd >= rate_target && coop_dest_min >= rate_target;
  const bool direct_ok = !out.direct_outage;
  out.overall_outage = !(coop_ok || direct_ok);
  return out;
}

namespace {

TrialOutcome dispatch(const ChannelRealization& ch, const ScenarioConfig& cfg,
                      Strategy s) {
  const CoefficientSet dest =
      successive_minima(LinkParamsd{ch.h_sd, ch.gamma_sd, 1.0});
  RelaySearch relay(ch.h_sr, ch.gamma_sr);
  const double r_rd = p2p_rate<double>(ch.h_rd, ch.gamma_rd);
  switch (s) {
    case Strategy::kBaseline:
      return baseline_outcome(dest, cfg.R);
    case Strategy::kLimFb:
      return lim_fb_outcome(dest, relay, r_rd, cfg.R);
    case Strategy::kSufFb:
      return suf_fb_outcome(dest, relay, r_rd, cfg.R);
    case Strategy::kSoussi:
      return soussi_outcome(dest, relay, r_rd, cfg.R);
    case Strategy::kInsausti:
      return insausti_outcome(dest, relay, r_rd, cfg.R);
  }
  throw std::logic_error("unknown strategy");
}

}  // namespace

TrialOutcome eval_baseline(const ChannelRealization& ch,
                           const ScenarioConfig& cfg) {
  return dispatch(ch, cfg, Strategy::kBaseline);
}
TrialOutcome eval_lim_fb(const ChannelRealization& ch,
                         const ScenarioConfig& cfg) {
  return dispatch(ch, cfg, Strategy::kLimFb);
}
TrialOutcome eval_suf_fb(const ChannelRealization& ch,
                         const ScenarioConfig& cfg) {
  return dispatch(ch, cfg, Strategy::kSufFb);
}
TrialOutcome eval_soussi(const ChannelRealization& ch,
                         const ScenarioConfig& cfg) {
  return dispatch(ch, cfg, Strategy::kSoussi);
}
TrialOutcome eval_insausti(const ChannelRealization& ch,
                           const ScenarioConfig& cfg) {
  return dispatch(ch, cfg, Strategy::kInsausti);
}

}  // namespace cfmarc
