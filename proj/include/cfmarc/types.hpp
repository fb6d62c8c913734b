#pragma once

#include <Eigen/Dense>
#include <complex>

namespace cfmarc {

// Source count is small by design (enumeration runs in 2M real dimensions),
// so every dense object below fits on the stack.
inline constexpr int kMaxSources = 4;

template <class S>
using Cplx = std::complex<S>;

template <class S>
using CVec = Eigen::Matrix<Cplx<S>, Eigen::Dynamic, 1, 0, kMaxSources, 1>;
template <class S>
using CMat = Eigen::Matrix<Cplx<S>, Eigen::Dynamic, Eigen::Dynamic, 0,
                           kMaxSources, kMaxSources>;
template <class S>
using RVec = Eigen::Matrix<S, Eigen::Dynamic, 1, 0, 2 * kMaxSources, 1>;
template <class S>
using RMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, 0,
                           2 * kMaxSources, 2 * kMaxSources>;

using CVecd = CVec<double>;
using CMatd = CMat<double>;
using RVecd = RVec<double>;
using RMatd = RMat<double>;

}  // namespace cfmarc
