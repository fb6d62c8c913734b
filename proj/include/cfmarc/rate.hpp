#pragma once

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "cfmarc/gaussian_int.hpp"
#include "cfmarc/types.hpp"

namespace cfmarc {

// Link coefficients and transmit power. Every rate expression below depends
// on P and g only through the average SNR P*g.
template <class S>
struct LinkParams {
  CVec<S> h;
  S g{1};
  S P{1};
};
using LinkParamsd = LinkParams<double>;

// M_mat is Hermitian positive definite by construction; B is its upper
// triangular Cholesky factor, B^H B = M_mat.
template <class S>
struct RateMatrix {
  CMat<S> M_mat;
  CMat<S> B;
};
using RateMatrixd = RateMatrix<double>;

template <class S>
RateMatrix<S> build_rate_matrix(const LinkParams<S>& link) {
  if (!link.h.allFinite())
    throw std::invalid_argument("build_rate_matrix: non-finite h");
  if (!(link.g > S(0)) || !(link.P > S(0)))
    throw std::invalid_argument("build_rate_matrix: g and P must be positive");
  const Eigen::Index M = link.h.size();
  const S snr = link.P * link.g;
  const S scale = snr / (S(1) + snr * link.h.squaredNorm());
  RateMatrix<S> rm;
  rm.M_mat = CMat<S>::Identity(M, M) - scale * (link.h * link.h.adjoint());
  Eigen::LLT<CMat<S>> llt(rm.M_mat);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("build_rate_matrix: Cholesky failed");
  rm.B = llt.matrixU();
  return rm;
}

// a^H M_mat a; real and positive for a != 0.
template <class S>
S quad_form(const RateMatrix<S>& rm, const GaussianIntVector& a) {
  CVec<S> ac = to_complex<S>(a);
  return std::real(ac.dot(rm.M_mat * ac));
}

// log2+(1/q): the rate supported by effective-noise quadratic form q.
template <class S>
S rate_from_norm_sq(S q) {
  if (!(q > S(0)))
    throw std::logic_error("rate_from_norm_sq: nonpositive quadratic form");
  S r = -std::log2(q);
  return r > S(0) ? r : S(0);
}

inline void check_coeff(const GaussianIntVector& a, Eigen::Index M) {
  if (a.size() != M)
    throw std::invalid_argument("coefficient vector length mismatch");
  for (Eigen::Index m = 0; m < M; ++m)
    if (!a[m].is_zero()) return;
  throw std::invalid_argument("zero coefficient vector carries no equation");
}

template <class S>
S computation_rate(const GaussianIntVector& a, const RateMatrix<S>& rm) {
  check_coeff(a, rm.M_mat.rows());
  return rate_from_norm_sq(quad_form(rm, a));
}

template <class S>
S computation_rate(const GaussianIntVector& a, const LinkParams<S>& link) {
  return computation_rate(a, build_rate_matrix(link));
}

// Expanded form log2+((|a|^2 - Pg|h^H a|^2/(1+Pg|h|^2))^-1); agrees with the
// quadratic form and exists mostly to cross-check it.
template <class S>
S computation_rate_expanded(const GaussianIntVector& a,
                            const LinkParams<S>& link) {
  check_coeff(a, link.h.size());
  const S snr = link.P * link.g;
  CVec<S> ac = to_complex<S>(a);
  const S q = ac.squaredNorm() -
              snr * std::norm(link.h.dot(ac)) /
                  (S(1) + snr * link.h.squaredNorm());
  return rate_from_norm_sq(q);
}

// Minimizer of the effective noise variance over the scaling factor.
template <class S>
Cplx<S> optimal_alpha(const GaussianIntVector& a, const LinkParams<S>& link) {
  check_coeff(a, link.h.size());
  const S snr = link.P * link.g;
  return link.P * std::sqrt(link.g) * link.h.dot(to_complex<S>(a)) /
         (S(1) + snr * link.h.squaredNorm());
}

// |alpha sqrt(g) h - a|^2 P + |alpha|^2; at the optimal alpha this equals
// P * a^H M_mat a.
template <class S>
S effective_noise_var(Cplx<S> alpha, const GaussianIntVector& a,
                      const LinkParams<S>& link) {
  CVec<S> ac = to_complex<S>(a);
  return (alpha * std::sqrt(link.g) * link.h - ac).squaredNorm() * link.P +
         std::norm(alpha);
}

template <class S>
S p2p_rate(Cplx<S> h_rd, S gamma_rd) {
  if (!(gamma_rd > S(0))) throw std::invalid_argument("p2p_rate: gamma <= 0");
  return std::log2(S(1) + std::norm(h_rd) * gamma_rd);
}

}  // namespace cfmarc
