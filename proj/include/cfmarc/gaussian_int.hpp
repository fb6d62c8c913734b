#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cfmarc/types.hpp"

namespace cfmarc {

namespace detail {

inline std::int64_t narrow_checked(__int128 v) {
  if (v > static_cast<__int128>(INT64_MAX) ||
      v < static_cast<__int128>(INT64_MIN))
    throw std::overflow_error("gaussian integer overflow");
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

// Exact element of Z[i]. Arithmetic widens to 128 bits internally and refuses
// to narrow silently; callers keep entries small so the checks never fire in
// normal operation.
struct GaussianInt {
  std::int64_t re{0};
  std::int64_t im{0};

  constexpr GaussianInt() = default;
  constexpr GaussianInt(std::int64_t r, std::int64_t i = 0) : re(r), im(i) {}

  bool is_zero() const { return re == 0 && im == 0; }

  GaussianInt conj() const {
    return {re, detail::narrow_checked(-static_cast<__int128>(im))};
  }

  template <class S = double>
  Cplx<S> to_complex() const {
    return {static_cast<S>(re), static_cast<S>(im)};
  }

  friend GaussianInt operator+(GaussianInt a, GaussianInt b) {
    return {detail::narrow_checked(static_cast<__int128>(a.re) + b.re),
            detail::narrow_checked(static_cast<__int128>(a.im) + b.im)};
  }
  friend GaussianInt operator-(GaussianInt a, GaussianInt b) {
    return {detail::narrow_checked(static_cast<__int128>(a.re) - b.re),
            detail::narrow_checked(static_cast<__int128>(a.im) - b.im)};
  }
  friend GaussianInt operator-(GaussianInt a) {
    return {detail::narrow_checked(-static_cast<__int128>(a.re)),
            detail::narrow_checked(-static_cast<__int128>(a.im))};
  }
  friend GaussianInt operator*(GaussianInt a, GaussianInt b) {
    __int128 re = static_cast<__int128>(a.re) * b.re -
                  static_cast<__int128>(a.im) * b.im;
    __int128 im = static_cast<__int128>(a.re) * b.im +
                  static_cast<__int128>(a.im) * b.re;
    return {detail::narrow_checked(re), detail::narrow_checked(im)};
  }
  GaussianInt& operator+=(GaussianInt b) { return *this = *this + b; }
  GaussianInt& operator-=(GaussianInt b) { return *this = *this - b; }
  GaussianInt& operator*=(GaussianInt b) { return *this = *this * b; }

  friend bool operator==(GaussianInt a, GaussianInt b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(GaussianInt a, GaussianInt b) { return !(a == b); }
};

// Exact quotient a/b; throws unless b divides a in Z[i]. Bareiss elimination
// only ever requests exact divisions, so a remainder signals a logic bug.
inline GaussianInt exact_div(GaussianInt a, GaussianInt b) {
  __int128 den = static_cast<__int128>(b.re) * b.re +
                 static_cast<__int128>(b.im) * b.im;
  if (den == 0) throw std::invalid_argument("exact_div by zero");
  __int128 num_re = static_cast<__int128>(a.re) * b.re +
                    static_cast<__int128>(a.im) * b.im;
  __int128 num_im = static_cast<__int128>(a.im) * b.re -
                    static_cast<__int128>(a.re) * b.im;
  if (num_re % den != 0 || num_im % den != 0)
    throw std::logic_error("exact_div: not divisible");
  return {detail::narrow_checked(num_re / den),
          detail::narrow_checked(num_im / den)};
}

}  // namespace cfmarc

namespace Eigen {

template <>
struct NumTraits<cfmarc::GaussianInt> {
  // Real must differ from the scalar type itself or Eigen's binary-op
  // traits become ambiguous; it is never used numerically here.
  using Real = std::int64_t;
  using NonInteger = cfmarc::GaussianInt;
  using Literal = cfmarc::GaussianInt;
  using Nested = cfmarc::GaussianInt;
  enum {
    IsComplex = 1,
    IsInteger = 1,
    IsSigned = 1,
    RequireInitialization = 0,
    ReadCost = 2,
    AddCost = 2,
    MulCost = 6
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace cfmarc {

using GaussianIntVector =
    Eigen::Matrix<GaussianInt, Eigen::Dynamic, 1, 0, kMaxSources, 1>;
using GaussianIntMatrix =
    Eigen::Matrix<GaussianInt, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor,
                  kMaxSources, kMaxSources>;

template <class S = double>
CVec<S> to_complex(const GaussianIntVector& a) {
  CVec<S> v(a.size());
  for (Eigen::Index m = 0; m < a.size(); ++m) v[m] = a[m].to_complex<S>();
  return v;
}

inline GaussianIntMatrix stack_rows(const std::vector<GaussianIntVector>& rows) {
  if (rows.empty()) throw std::invalid_argument("stack_rows: empty");
  GaussianIntMatrix A(static_cast<Eigen::Index>(rows.size()), rows[0].size());
  for (Eigen::Index l = 0; l < A.rows(); ++l) {
    if (rows[static_cast<std::size_t>(l)].size() != A.cols())
      throw std::invalid_argument("stack_rows: ragged rows");
    for (Eigen::Index m = 0; m < A.cols(); ++m)
      A(l, m) = rows[static_cast<std::size_t>(l)][m];
  }
  return A;
}

}  // namespace cfmarc
