#pragma once

#include <optional>

#include "cfmarc/channel.hpp"
#include "cfmarc/lattice.hpp"
#include "cfmarc/rate.hpp"

namespace cfmarc {

// Per-realization verdict for one strategy. overall_outage implies
// direct_outage for the two feedback strategies; rank_deficient is only
// meaningful for lim-FB and stays false elsewhere.
struct TrialOutcome {
  bool direct_outage = false;
  bool overall_outage = false;
  bool rank_deficient = false;
  int rounds_used = 1;
};

enum class Strategy { kBaseline, kLimFb, kSufFb, kSoussi, kInsausti };

// Relay-side coefficient search, computed at most once per realization no
// matter how many strategies ask for it.
class RelaySearch {
 public:
  RelaySearch(const CVecd& h_sr, double gamma_sr)
      : link_{h_sr, gamma_sr, 1.0} {}

  const CoefficientSet& get() {
    if (!set_) set_ = successive_minima(link_);
    return *set_;
  }

 private:
  LinkParamsd link_;
  std::optional<CoefficientSet> set_;
};

// Core evaluators on precomputed pieces; the Monte Carlo engine shares one
// destination set and one RelaySearch across all strategies per trial
// (common random numbers). rate_target is R; r_rd is the point-to-point
// relay-destination rate of this realization.
TrialOutcome baseline_outcome(const CoefficientSet& dest, double rate_target);
TrialOutcome lim_fb_outcome(const CoefficientSet& dest, RelaySearch& relay,
                            double r_rd, double rate_target);
TrialOutcome suf_fb_outcome(const CoefficientSet& dest, RelaySearch& relay,
                            double r_rd, double rate_target);
TrialOutcome soussi_outcome(const CoefficientSet& dest, RelaySearch& relay,
                            double r_rd, double rate_target);
TrialOutcome insausti_outcome(const CoefficientSet& dest, RelaySearch& relay,
                              double r_rd, double rate_target);

// The max-min objective of the joint relay/destination selection, maximized
// over relay candidates and (M-1)-subsets of the destination list under the
// full-rank constraint. Exposed for property tests.
double soussi_best_rate(const CoefficientSet& dest,
                        const CoefficientSet& relay);

// Single-shot evaluators: recompute everything from the realization.
// Prefer the *_outcome forms inside sweeps.
TrialOutcome eval_baseline(const ChannelRealization& ch,
                           const ScenarioConfig& cfg);
TrialOutcome eval_lim_fb(const ChannelRealization& ch,
                         const ScenarioConfig& cfg);
TrialOutcome eval_suf_fb(const ChannelRealization& ch,
                         const ScenarioConfig& cfg);
TrialOutcome eval_soussi(const ChannelRealization& ch,
                         const ScenarioConfig& cfg);
TrialOutcome eval_insausti(const ChannelRealization& ch,
                           const ScenarioConfig& cfg);

}  // namespace cfmarc
