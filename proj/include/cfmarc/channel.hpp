#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cfmarc/types.hpp"

namespace cfmarc {

// One network geometry and sweep description. Distances are normalized so
// the source-destination hop is 1; delta_sr + delta_rd = 1 keeps the relay
// on the line between them. Transmit power is folded into the average SNRs
// (P = 1 everywhere), so gamma values carry the full link budget.
struct ScenarioConfig {
  int M = 0;
  double R = 0.0;
  double delta_sr = 0.0;
  double delta_rd = 0.0;
  double kappa = 0.0;
  std::vector<double> snr_grid_db;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

inline void validate(const ScenarioConfig& cfg) {
  if (cfg.M < 1 || cfg.M > kMaxSources)
    throw std::invalid_argument("config: M out of range");
  if (!(cfg.R > 0.0)) throw std::invalid_argument("config: R must be positive");
  if (!(cfg.delta_sr > 0.0) || !(cfg.delta_sr < 1.0))
    throw std::invalid_argument("config: delta_sr outside (0,1)");
  if (!(cfg.delta_rd > 0.0) || !(cfg.delta_rd < 1.0))
    throw std::invalid_argument("config: delta_rd outside (0,1)");
  if (std::abs(cfg.delta_sr + cfg.delta_rd - 1.0) > 1e-9)
    throw std::invalid_argument("config: delta_sr + delta_rd must equal 1");
  if (!(cfg.kappa > 0.0))
    throw std::invalid_argument("config: kappa must be positive");
  if (cfg.snr_grid_db.empty())
    throw std::invalid_argument("config: empty SNR grid");
  if (cfg.trials == 0)
    throw std::invalid_argument("config: trials must be positive");
}

struct SnrTriple {
  double gamma_sd = 0.0;
  double gamma_sr = 0.0;
  double gamma_rd = 0.0;
};

struct ChannelRealization {
  CVecd h_sd;
  CVecd h_sr;
  Cplx<double> h_rd;
  double gamma_sd = 0.0;
  double gamma_sr = 0.0;
  double gamma_rd = 0.0;
};

inline double geometric_gain(double delta, double kappa) {
  if (!(delta > 0.0))
    throw std::invalid_argument("geometric_gain: delta must be positive");
  return std::pow(delta, -kappa);
}

inline SnrTriple scenario_snrs(const ScenarioConfig& cfg, double gamma_sd_db) {
  SnrTriple t;
  t.gamma_sd = std::pow(10.0, gamma_sd_db / 10.0);
  t.gamma_sr = t.gamma_sd * geometric_gain(cfg.delta_sr, cfg.kappa);
  t.gamma_rd = t.gamma_sd * geometric_gain(cfg.delta_rd, cfg.kappa);
  return t;
}

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-derived random stream: the state is a pure function of
// (seed, snr index, trial index), so any worker can regenerate any trial
// independently and sweep results cannot depend on the partitioning.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t snr_index,
              std::uint64_t trial_index) {
    state_ = detail::mix64(seed + kGamma);
    state_ = detail::mix64(state_ + snr_index * kGamma);
    state_ = detail::mix64(state_ + trial_index * kGamma);
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return detail::mix64(state_);
  }

  // (0, 1]: never zero, safe under log.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Circularly symmetric complex Gaussian, zero mean, unit total variance
  // (1/2 per component), via one Box-Muller pair.
  Cplx<double> cn_unit() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));  // -2 ln u, halved variance
    const double th = 2.0 * kPi * u2;
    return {r * std::cos(th), r * std::sin(th)};
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  std::uint64_t state_ = 0;
};

// Draw order is part of the reproducibility contract: h_sd[0..M), then
// h_sr[0..M), then h_rd.
inline ChannelRealization sample_realization(TrialStream& stream,
                                             const ScenarioConfig& cfg,
                                             const SnrTriple& snr) {
  ChannelRealization ch;
  ch.h_sd = CVecd(cfg.M);
  ch.h_sr = CVecd(cfg.M);
  for (int m = 0; m < cfg.M; ++m) ch.h_sd[m] = stream.cn_unit();
  for (int m = 0; m < cfg.M; ++m) ch.h_sr[m] = stream.cn_unit();
  ch.h_rd = stream.cn_unit();
  ch.gamma_sd = snr.gamma_sd;
  ch.gamma_sr = snr.gamma_sr;
  ch.gamma_rd = snr.gamma_rd;
  return ch;
}

}  // namespace cfmarc
