#pragma once

// Reference search for the successive minima, independent of the library's
// LLL / QR / sphere-enumeration path. It walks the Gaussian-integer box
// coordinate by coordinate in the complex domain, pruning with the exact
// prefix relaxation of the quadratic form: minimizing
//   q(a) = |a|^2 - snr |h^H a|^2 / (1 + snr |h|^2)
// over the free (continuous) tail coordinates leaves the same expression
// restricted to the assigned prefix. Everything is recomputed from the
// expanded formula, so no Cholesky factor or reduced basis is shared with
// the code under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cfmarc/exact_linalg.hpp"
#include "cfmarc/gaussian_int.hpp"
#include "cfmarc/rate.hpp"

namespace testutil {

struct OracleOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class MinimaOracle {
 public:
  MinimaOracle(const cfmarc::LinkParamsd& link, double limit)
      : h_(link.h),
        snr_(link.P * link.g),
        limit_(limit),
        m_(static_cast<int>(link.h.size())),
        a_(link.h.size()) {
    for (int t = 0; t < m_; ++t) a_[t] = {0, 0};
    double pref = 0.0;
    s_level_.resize(static_cast<std::size_t>(m_));
    for (int t = 0; t < m_; ++t) {
      pref += std::norm(h_[t]);
      s_level_[static_cast<std::size_t>(t)] = snr_ / (1.0 + snr_ * pref);
    }
    // q >= |a|^2 / (1 + snr |h|^2), so every candidate coordinate lies in
    // this box; the disc ranges below only tighten it.
    box_ = static_cast<std::int64_t>(
               std::ceil(std::sqrt(limit * (1.0 + snr_ * pref)))) +
           1;
  }

  // All nonzero vectors with q(a) <= limit, sorted by (q, entries).
  std::vector<std::pair<double, cfmarc::GaussianIntVector>> run() {
    found_.clear();
    visited_ = 0;
    descend(0, 0.0, {0.0, 0.0});
    std::sort(found_.begin(), found_.end(),
              [](const auto& x, const auto& y) {
                if (x.first != y.first) return x.first < y.first;
                for (Eigen::Index i = 0; i < x.second.size(); ++i) {
                  if (x.second[i].re != y.second[i].re)
                    return x.second[i].re < y.second[i].re;
                  if (x.second[i].im != y.second[i].im)
                    return x.second[i].im < y.second[i].im;
                }
                return false;
              });
    return found_;
  }

 private:
  // prefix state: t coordinates assigned, norm2 = |prefix|^2,
  // dot = sum_{j<t} conj(h_j) a_j.
  void descend(int t, double norm2, std::complex<double> dot) {
    const double sp = s_level_[static_cast<std::size_t>(t)];
    const std::complex<double> e = std::conj(h_[t]);
    const double alpha = 1.0 - sp * std::norm(h_[t]);
    const std::complex<double> w = sp * dot * h_[t];
    const double base = norm2 - sp * std::norm(dot) - std::norm(w) / alpha;
    const double r2 = (limit_ - base) / alpha;
    if (!(r2 >= 0.0)) return;
    const double r = std::sqrt(r2 + 1e-12);
    const std::complex<double> ctr = w / alpha;
    const auto xlo = std::max(-box_, static_cast<std::int64_t>(
                                         std::ceil(ctr.real() - r - 1e-9)));
    const auto xhi = std::min(box_, static_cast<std::int64_t>(
                                        std::floor(ctr.real() + r + 1e-9)));
    for (std::int64_t x = xlo; x <= xhi; ++x) {
      const double dx = static_cast<double>(x) - ctr.real();
      const double dy2 = r2 - dx * dx;
      const double dy = std::sqrt(std::max(0.0, dy2) + 1e-12);
      const auto ylo = std::max(-box_, static_cast<std::int64_t>(
                                           std::ceil(ctr.imag() - dy - 1e-9)));
      const auto yhi = std::min(box_, static_cast<std::int64_t>(std::floor(
                                          ctr.imag() + dy + 1e-9)));
      for (std::int64_t y = ylo; y <= yhi; ++y) {
        if (++visited_ > kWorkCap)
          throw OracleOverflow("oracle work cap exceeded");
        const std::complex<double> p(static_cast<double>(x),
                                     static_cast<double>(y));
        const double n2 = norm2 + std::norm(p);
        const std::complex<double> d = dot + e * p;
        const double f = n2 - sp * std::norm(d);
        if (f > limit_) continue;
        a_[t] = {x, y};
        if (t == m_ - 1) {
          bool nonzero = false;
          for (Eigen::Index i = 0; i < a_.size() && !nonzero; ++i)
            nonzero = !a_[i].is_zero();
          if (nonzero) found_.emplace_back(f, a_);
        } else {
          descend(t + 1, n2, d);
        }
      }
    }
    a_[t] = {0, 0};
  }

  static constexpr std::uint64_t kWorkCap = 50'000'000;
  cfmarc::CVecd h_;
  double snr_;
  double limit_;
  int m_;
  cfmarc::GaussianIntVector a_;
  std::int64_t box_ = 0;
  std::vector<double> s_level_;
  std::vector<std::pair<double, cfmarc::GaussianIntVector>> found_;
  std::uint64_t visited_ = 0;
};

// Greedy selection by norm under the exact rank constraint, starting from
// the complete candidate list out to lam_max. Returns the M selected norms
// in ascending order; throws OracleOverflow when the search space is too
// large (caller redraws the channel).
inline std::vector<double> oracle_minima_norms(const cfmarc::LinkParamsd& link,
                                               double lam_max) {
  const double limit = lam_max * (1.0 + 1e-9) + 1e-12;
  MinimaOracle oracle(link, limit);
  const auto cands = oracle.run();
  std::vector<cfmarc::GaussianIntVector> chosen;
  std::vector<double> norms;
  const auto m = link.h.size();
  for (const auto& [q, vec] : cands) {
    if (static_cast<Eigen::Index>(chosen.size()) == m) break;
    std::vector<cfmarc::GaussianIntVector> trial = chosen;
    trial.push_back(vec);
    if (cfmarc::is_full_rank(cfmarc::stack_rows(trial))) {
      chosen.push_back(vec);
      norms.push_back(q);
    }
  }
  return norms;
}

}  // namespace testutil
