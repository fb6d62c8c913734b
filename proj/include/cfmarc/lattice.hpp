#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cfmarc/exact_linalg.hpp"
#include "cfmarc/gaussian_int.hpp"
#include "cfmarc/rate.hpp"
#include "cfmarc/types.hpp"

namespace cfmarc {

// Unit multiple (1, -1, i, -i) chosen so the first nonzero entry satisfies
// re > 0, im >= 0. Exactly one of the four rotations of a nonzero Gaussian
// integer lands in that quarter plane, so the representative is unique per
// unit orbit and unit multiples collapse to one vector.
inline GaussianIntVector canonicalize(const GaussianIntVector& a) {
  Eigen::Index lead = -1;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!a[i].is_zero()) {
      lead = i;
      break;
    }
  if (lead < 0) return a;
  static constexpr std::array<GaussianInt, 4> kUnits{
      GaussianInt{1, 0}, GaussianInt{-1, 0}, GaussianInt{0, 1},
      GaussianInt{0, -1}};
  for (const GaussianInt& u : kUnits) {
    const GaussianInt first = u * a[lead];
    if (first.re > 0 && first.im >= 0) {
      GaussianIntVector out(a.size());
      for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = u * a[i];
      return out;
    }
  }
  throw std::logic_error("canonicalize: no unit rotation fits");
}

inline bool same_entries(const GaussianIntVector& a,
                         const GaussianIntVector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

inline bool lex_less(const GaussianIntVector& a, const GaussianIntVector& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i].re != b[i].re) return a[i].re < b[i].re;
    if (a[i].im != b[i].im) return a[i].im < b[i].im;
  }
  return a.size() < b.size();
}

namespace detail {

using UnimodularMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                  2 * kMaxSources, 2 * kMaxSources>;

struct LLLResult {
  RMatd basis;               // reduced basis, columns
  UnimodularMatrix transform;  // basis == input * transform
};

struct GramSchmidt {
  RMatd mu;       // unit lower triangular projection coefficients
  RVecd bstar_sq;  // squared norms of the orthogonalized columns
};

inline GramSchmidt gram_schmidt(const RMatd& basis) {
  const Eigen::Index n = basis.cols();
  GramSchmidt gs{RMatd::Identity(n, n), RVecd(n)};
  RMatd bstar = basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double m = basis.col(i).dot(bstar.col(j)) / gs.bstar_sq[j];
      gs.mu(i, j) = m;
      bstar.col(i) -= m * bstar.col(j);
    }
    gs.bstar_sq[i] = bstar.col(i).squaredNorm();
    if (!(gs.bstar_sq[i] > 0.0))
      throw std::runtime_error("lll_reduce: basis not full rank");
  }
  return gs;
}

// Textbook LLL with delta = 0.99 by default. The Gram-Schmidt data is
// recomputed from scratch every round, which is cheap at these dimensions
// and avoids incremental-update drift. The integer transform tracks every
// column operation so lattice coordinates stay exact.
inline LLLResult lll_reduce(const RMatd& input, double delta = 0.99) {
  const Eigen::Index n = input.cols();
  if (input.rows() != n || n == 0)
    throw std::invalid_argument("lll_reduce: square nonempty basis required");
  LLLResult r{input, UnimodularMatrix::Identity(n, n)};
  Eigen::Index k = 1;
  int rounds = 0;
  while (k < n) {
    if (++rounds > 100000)
      throw std::runtime_error("lll_reduce: round cap exceeded");
    GramSchmidt gs = gram_schmidt(r.basis);
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const std::int64_t q =
          static_cast<std::int64_t>(std::llround(gs.mu(k, j)));
      if (q != 0) {
        r.basis.col(k) -= static_cast<double>(q) * r.basis.col(j);
        r.transform.col(k) -= q * r.transform.col(j);
        for (Eigen::Index l = 0; l < j; ++l)
          gs.mu(k, l) -= static_cast<double>(q) * gs.mu(j, l);
        gs.mu(k, j) -= static_cast<double>(q);
      }
    }
    const double lhs = gs.bstar_sq[k];
    const double rhs =
        (delta - gs.mu(k, k - 1) * gs.mu(k, k - 1)) * gs.bstar_sq[k - 1];
    if (lhs < rhs) {
      r.basis.col(k).swap(r.basis.col(k - 1));
      r.transform.col(k).swap(r.transform.col(k - 1));
      k = std::max<Eigen::Index>(1, k - 1);
    } else {
      ++k;
    }
  }
  if (r.transform.cwiseAbs().maxCoeff() > (std::int64_t{1} << 40))
    throw std::runtime_error("lll_reduce: transform entries out of range");
  return r;
}

inline constexpr std::size_t kMaxCandidates = 10'000'000;

// Depth-first enumeration of every nonzero y with |R y|^2 <= radius_sq, R
// upper triangular with positive diagonal. The radius is static: callers
// need the complete list, not just the shortest vector.
class SphereEnum {
 public:
  SphereEnum(const RMatd& R, double radius_sq, std::vector<EmbedCoords>& out)
      : R_(R), radius_sq_(radius_sq), out_(out), y_(R.rows()) {
    y_.setZero();
  }

  void run() {
    if (R_.rows() > 0) descend(R_.rows() - 1, 0.0);
  }

 private:
  void descend(Eigen::Index i, double used) {
    double t = 0.0;
    for (Eigen::Index j = i + 1; j < R_.rows(); ++j)
      t += R_(i, j) * static_cast<double>(y_[j]);
    const double rem = radius_sq_ - used;
    if (rem < 0.0) return;
    const double rii = R_(i, i);
    const double s = std::sqrt(rem);
    const auto lo =
        static_cast<std::int64_t>(std::ceil((-s - t) / rii - 1e-12));
    const auto hi =
        static_cast<std::int64_t>(std::floor((s - t) / rii + 1e-12));
    for (std::int64_t v = lo; v <= hi; ++v) {
      const double term = rii * static_cast<double>(v) + t;
      const double cost = used + term * term;
      if (cost > radius_sq_) continue;
      y_[i] = v;
      if (i == 0) {
        bool nonzero = false;
        for (Eigen::Index j = 0; j < y_.size() && !nonzero; ++j)
          nonzero = (y_[j] != 0);
        if (nonzero) {
          if (out_.size() >= kMaxCandidates)
            throw std::runtime_error("sphere enumeration candidate blow-up");
          out_.push_back(y_);
        }
      } else {
        descend(i - 1, cost);
      }
    }
    y_[i] = 0;
  }

  const RMatd& R_;
  double radius_sq_;
  std::vector<EmbedCoords>& out_;
  EmbedCoords y_;
};

// Exact test that two integer vectors lie on one complex line: every 2x2
// minor of the pair vanishes. Products are widened to 128 bits so entries
// near the reduction transform cap cannot overflow.
inline bool complex_collinear(const GaussianIntVector& a,
                              const GaussianIntVector& b) {
  if (a.size() != b.size()) return false;
  const auto minor_vanishes = [](GaussianInt ai, GaussianInt aj,
                                 GaussianInt bi, GaussianInt bj) {
    // ai*bj - aj*bi over Z[i]
    const __int128 re = static_cast<__int128>(ai.re) * bj.re -
                        static_cast<__int128>(ai.im) * bj.im -
                        (static_cast<__int128>(aj.re) * bi.re -
                         static_cast<__int128>(aj.im) * bi.im);
    const __int128 im = static_cast<__int128>(ai.re) * bj.im +
                        static_cast<__int128>(ai.im) * bj.re -
                        (static_cast<__int128>(aj.re) * bi.im +
                         static_cast<__int128>(aj.im) * bi.re);
    return re == 0 && im == 0;
  };
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = i + 1; j < a.size(); ++j)
      if (!minor_vanishes(a[i], a[j], b[i], b[j])) return false;
  return true;
}

// Integer least squares on the plane of the two leading reduced columns,
// whose triangular block is [[r00, r01], [0, r11]]. The block is Lagrange
// reduced once; per target a Babai rounding plus a two-step ring around it
// is exhaustive for the best completions, since in a reduced plane basis
// the nearest lattice points sit within two steps of the rounding.
class LinePlane {
 public:
  LinePlane(double r00, double r01, double r11)
      : r00_(r00), r01_(r01), r11_(r11) {
    double c0[2] = {r00, 0.0};
    double c1[2] = {r01, r11};
    for (int round = 0;; ++round) {
      if (round >= 64)
        throw std::runtime_error("line reduction did not settle");
      if (c0[0] * c0[0] + c0[1] * c0[1] > c1[0] * c1[0] + c1[1] * c1[1]) {
        std::swap(c0[0], c1[0]);
        std::swap(c0[1], c1[1]);
        std::swap(u0_, u1_);
      }
      const double q = std::nearbyint(
          (c0[0] * c1[0] + c0[1] * c1[1]) / (c0[0] * c0[0] + c0[1] * c0[1]));
      if (q == 0.0) break;
      if (std::abs(q) > 1e15)
        throw std::runtime_error("line reduction diverged");
      c1[0] -= q * c0[0];
      c1[1] -= q * c0[1];
      const auto qi = static_cast<std::int64_t>(q);
      u1_[0] -= qi * u0_[0];
      u1_[1] -= qi * u0_[1];
    }
    d0_[0] = c0[0];
    d0_[1] = c0[1];
    d1_[0] = c1[0];
    d1_[1] = c1[1];
  }

  // Best two integer (y0, y1) minimizing
  // (r00 y0 + r01 y1 + t0)^2 + (r11 y1 + t1)^2, kept under budget.
  template <class Emit>
  void best_two(double t0, double t1, double budget, Emit&& emit) const {
    const double det = d0_[0] * d1_[1] - d0_[1] * d1_[0];
    const double w0 = (-t0 * d1_[1] + t1 * d1_[0]) / det;
    const double w1 = (-t1 * d0_[0] + t0 * d0_[1]) / det;
    double best[2] = {budget, budget};
    std::int64_t keep[2][2] = {{0, 0}, {0, 0}};
    int found = 0;
    const auto b0 = static_cast<std::int64_t>(std::llround(w0));
    const auto b1 = static_cast<std::int64_t>(std::llround(w1));
    for (int s0 = -2; s0 <= 2; ++s0)
      for (int s1 = -2; s1 <= 2; ++s1) {
        const std::int64_t y0 = u0_[0] * (b0 + s0) + u1_[0] * (b1 + s1);
        const std::int64_t y1 = u0_[1] * (b0 + s0) + u1_[1] * (b1 + s1);
        const double c = cost(y0, y1, t0, t1);
        if (c > budget) continue;
        if (found < 1 || c < best[0]) {
          best[1] = best[0];
          keep[1][0] = keep[0][0];
          keep[1][1] = keep[0][1];
          best[0] = c;
          keep[0][0] = y0;
          keep[0][1] = y1;
          found = std::min(found + 1, 2);
        } else if (found < 2 || c < best[1]) {
          best[1] = c;
          keep[1][0] = y0;
          keep[1][1] = y1;
          found = std::min(found + 1, 2);
        }
      }
    for (int k = 0; k < found; ++k) emit(keep[k][0], keep[k][1]);
  }

  // Every nonzero plane point within three reduced steps of the origin. In
  // a reduced basis this ring covers the plane's shortest vector and its
  // unit multiples, the only plane members the rank selection can use.
  template <class Emit>
  void short_ring(double budget, Emit&& emit) const {
    for (int s0 = -3; s0 <= 3; ++s0)
      for (int s1 = -3; s1 <= 3; ++s1) {
        if (s0 == 0 && s1 == 0) continue;
        const std::int64_t y0 = u0_[0] * s0 + u1_[0] * s1;
        const std::int64_t y1 = u0_[1] * s0 + u1_[1] * s1;
        if (cost(y0, y1, 0.0, 0.0) <= budget) emit(y0, y1);
      }
  }

 private:
  double cost(std::int64_t y0, std::int64_t y1, double t0, double t1) const {
    const double a =
        r00_ * static_cast<double>(y0) + r01_ * static_cast<double>(y1) + t0;
    const double b = r11_ * static_cast<double>(y1) + t1;
    return a * a + b * b;
  }

  double r00_, r01_, r11_;
  double d0_[2]{}, d1_[2]{};            // reduced plane basis
  std::int64_t u0_[2]{1, 0}, u1_[2]{0, 1};  // original coords of d0, d1
};

// Enumeration for rate forms with one compressed complex direction: the two
// leading reduced columns span a single complex line (the caller verifies
// this exactly). A static ball then holds millions of points differing only
// by line elements, so listing it is hopeless. Points sharing the outer
// coordinates differ by line elements, which become dependent once the
// line's shortest vector is selected, so the rank-constrained selection can
// only ever use the best completion of each outer assignment. Each outer
// branch is therefore finished in closed form (best two kept, which covers
// ties against off-line first picks) and the line itself contributes its
// short ring. For every true minimum, its branch's best completion has the
// same norm and extends the same span, so the greedy selection downstream
// still returns the exact successive minima.
class CollapsedEnum {
 public:
  CollapsedEnum(const RMatd& R, double radius_sq,
                std::vector<EmbedCoords>& out)
      : R_(R),
        radius_sq_(radius_sq),
        out_(out),
        y_(R.rows()),
        plane_(R(0, 0), R(0, 1), R(1, 1)) {
    y_.setZero();
  }

  void run() {
    if (R_.rows() < 4)
      throw std::logic_error("collapsed enumeration needs two source dims");
    descend(R_.rows() - 1, 0.0);
  }

 private:
  void finish(double used) {
    double t0 = 0.0;
    double t1 = 0.0;
    bool outer_zero = true;
    for (Eigen::Index j = 2; j < R_.rows(); ++j) {
      t0 += R_(0, j) * static_cast<double>(y_[j]);
      t1 += R_(1, j) * static_cast<double>(y_[j]);
      outer_zero = outer_zero && y_[j] == 0;
    }
    const double rem = radius_sq_ - used;
    const auto emit = [&](std::int64_t y0, std::int64_t y1) {
      y_[0] = y0;
      y_[1] = y1;
      if (out_.size() >= kMaxCandidates)
        throw std::runtime_error("sphere enumeration candidate blow-up");
      out_.push_back(y_);
    };
    if (outer_zero)
      plane_.short_ring(rem, emit);
    else
      plane_.best_two(t0, t1, rem, emit);
    y_[0] = 0;
    y_[1] = 0;
  }

  void descend(Eigen::Index i, double used) {
    if (i == 1) {
      finish(used);
      return;
    }
    double t = 0.0;
    for (Eigen::Index j = i + 1; j < R_.rows(); ++j)
      t += R_(i, j) * static_cast<double>(y_[j]);
    const double rem = radius_sq_ - used;
    if (rem < 0.0) return;
    const double rii = R_(i, i);
    const double s = std::sqrt(rem);
    const auto lo =
        static_cast<std::int64_t>(std::ceil((-s - t) / rii - 1e-12));
    const auto hi =
        static_cast<std::int64_t>(std::floor((s - t) / rii + 1e-12));
    for (std::int64_t v = lo; v <= hi; ++v) {
      const double term = rii * static_cast<double>(v) + t;
      const double cost = used + term * term;
      if (cost > radius_sq_) continue;
      y_[i] = v;
      descend(i - 1, cost);
    }
    y_[i] = 0;
  }

  const RMatd& R_;
  double radius_sq_;
  std::vector<EmbedCoords>& out_;
  EmbedCoords y_;
  LinePlane plane_;
};

}  // namespace detail

// The M successive minima of the effective-noise quadratic form, with one
// canonical coefficient vector per minimum. vectors are linearly independent
// over C (verified exactly), norms_sq ascends, rates descends.
struct CoefficientSet {
  std::vector<GaussianIntVector> vectors;
  std::vector<double> norms_sq;
  std::vector<double> rates;
};

namespace detail {

inline bool extends_rank(const std::vector<GaussianIntVector>& rows,
                         const GaussianIntVector& cand) {
  std::vector<GaussianIntVector> trial = rows;
  trial.push_back(cand);
  return is_full_rank(stack_rows(trial));
}

}  // namespace detail

// Coefficient search: LLL-reduce the real embedding of B, seed the search
// radius with a greedy independent pick over the reduced columns (which
// always spans, so the radius covers all M minima), enumerate the ball,
// collapse unit multiples, then select greedily by norm under the exact
// rank constraint. When the two leading reduced columns lie on one complex
// line the form is nearly singular along it and the ball enumeration is
// swapped for the collapsed variant above. The radius doubling below is a
// safety net only; the seeding argument makes the first pass sufficient.
inline CoefficientSet successive_minima(const RateMatrixd& rm) {
  const Eigen::Index m = rm.M_mat.rows();
  if (m < 1 || m > kMaxSources)
    throw std::invalid_argument("successive_minima: unsupported source count");
  const RMatd embedded = real_embedding<double>(rm.B);
  const detail::LLLResult red = detail::lll_reduce(embedded);
  const Eigen::Index n = 2 * m;
  const bool collapsed =
      n >= 4 &&
      detail::complex_collinear(
          coords_to_vector(EmbedCoords(red.transform.col(0))),
          coords_to_vector(EmbedCoords(red.transform.col(1))));

  std::vector<std::pair<double, Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    order.emplace_back(red.basis.col(j).squaredNorm(), j);
  std::sort(order.begin(), order.end());

  std::vector<GaussianIntVector> seed;
  double radius_sq = 0.0;
  for (const auto& [norm_sq, j] : order) {
    if (static_cast<Eigen::Index>(seed.size()) == m) break;
    const GaussianIntVector cand =
        coords_to_vector(EmbedCoords(red.transform.col(j)));
    if (detail::extends_rank(seed, cand)) {
      seed.push_back(cand);
      radius_sq = std::max(radius_sq, norm_sq);
    }
  }
  if (static_cast<Eigen::Index>(seed.size()) < m)
    throw std::logic_error("successive_minima: reduced basis does not span");

  Eigen::HouseholderQR<RMatd> qr(red.basis);
  RMatd R = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i)
    if (R(i, i) < 0.0) R.row(i) = -R.row(i);

  double budget = radius_sq * (1.0 + 1e-9) + 1e-12;
  for (int attempt = 0; attempt < 40; ++attempt, budget *= 2.0) {
    std::vector<EmbedCoords> raw;
    if (collapsed)
      detail::CollapsedEnum(R, budget, raw).run();
    else
      detail::SphereEnum(R, budget, raw).run();

    std::vector<GaussianIntVector> cands;
    cands.reserve(raw.size());
    for (const EmbedCoords& y : raw)
      cands.push_back(canonicalize(coords_to_vector(EmbedCoords(
          red.transform * y))));
    std::sort(cands.begin(), cands.end(), lex_less);
    cands.erase(std::unique(cands.begin(), cands.end(), same_entries),
                cands.end());

    std::vector<std::pair<double, std::size_t>> by_norm;
    by_norm.reserve(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i)
      by_norm.emplace_back(quad_form(rm, cands[i]), i);
    std::stable_sort(by_norm.begin(), by_norm.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });

    CoefficientSet set;
    for (const auto& [q, idx] : by_norm) {
      if (static_cast<Eigen::Index>(set.vectors.size()) == m) break;
      if (detail::extends_rank(set.vectors, cands[idx])) {
        set.vectors.push_back(cands[idx]);
        set.norms_sq.push_back(q);
        set.rates.push_back(rate_from_norm_sq(q));
      }
    }
    if (static_cast<Eigen::Index>(set.vectors.size()) == m) return set;
  }
  throw std::runtime_error("successive_minima: search radius exhausted");
}

inline CoefficientSet successive_minima(const LinkParamsd& link) {
  return successive_minima(build_rate_matrix(link));
}

}  // namespace cfmarc
