#pragma once

#include <stdexcept>
#include <utility>

#include "cfmarc/gaussian_int.hpp"
#include "cfmarc/types.hpp"

namespace cfmarc {

// Fraction-free (Bareiss) determinant over Z[i]; every division is exact.
inline GaussianInt det_exact(const GaussianIntMatrix& A) {
  if (A.rows() != A.cols())
    throw std::invalid_argument("det_exact: matrix not square");
  const Eigen::Index n = A.rows();
  if (n == 0) return {1, 0};
  GaussianIntMatrix W = A;
  GaussianInt prev{1, 0};
  bool negate = false;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (W(k, k).is_zero()) {
      Eigen::Index r = k + 1;
      while (r < n && W(r, k).is_zero()) ++r;
      if (r == n) return {0, 0};
      for (Eigen::Index j = 0; j < n; ++j) std::swap(W(k, j), W(r, j));
      negate = !negate;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j)
        W(i, j) = exact_div(W(i, j) * W(k, k) - W(i, k) * W(k, j), prev);
    prev = W(k, k);
  }
  GaussianInt det = W(n - 1, n - 1);
  return negate ? -det : det;
}

// Rows linearly independent over C. Exact by construction: rank deficiency
// gates decodability, so no floating threshold is acceptable here.
inline bool is_full_rank(const GaussianIntMatrix& A) {
  const Eigen::Index L = A.rows();
  const Eigen::Index M = A.cols();
  if (L > M) throw std::invalid_argument("is_full_rank: more rows than columns");
  GaussianIntMatrix W = A;
  GaussianInt prev{1, 0};
  for (Eigen::Index k = 0; k < L; ++k) {
    Eigen::Index pr = -1, pc = -1;
    for (Eigen::Index r = k; r < L && pr < 0; ++r)
      for (Eigen::Index c = k; c < M; ++c)
        if (!W(r, c).is_zero()) {
          pr = r;
          pc = c;
          break;
        }
    if (pr < 0) return false;
    if (pr != k)
      for (Eigen::Index j = 0; j < M; ++j) std::swap(W(k, j), W(pr, j));
    if (pc != k)
      for (Eigen::Index i = 0; i < L; ++i) std::swap(W(i, k), W(i, pc));
    for (Eigen::Index i = k + 1; i < L; ++i)
      for (Eigen::Index j = k + 1; j < M; ++j)
        W(i, j) = exact_div(W(i, j) * W(k, k) - W(i, k) * W(k, j), prev);
    prev = W(k, k);
  }
  return true;
}

// G = [[Re B, -Im B], [Im B, Re B]]: for a in Z[i]^M with real stacking
// [Re a; Im a], the embedded norm equals |B a|.
template <class S>
RMat<S> real_embedding(const CMat<S>& B) {
  if (B.rows() != B.cols())
    throw std::invalid_argument("real_embedding: matrix not square");
  const Eigen::Index n = B.rows();
  RMat<S> G(2 * n, 2 * n);
  G.topLeftCorner(n, n) = B.real();
  G.topRightCorner(n, n) = -B.imag();
  G.bottomLeftCorner(n, n) = B.imag();
  G.bottomRightCorner(n, n) = B.real();
  return G;
}

// Integer coordinates of the real embedding, [Re a; Im a].
using EmbedCoords =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1, 0, 2 * kMaxSources, 1>;

inline EmbedCoords embed_coords(const GaussianIntVector& a) {
  const Eigen::Index M = a.size();
  EmbedCoords z(2 * M);
  for (Eigen::Index m = 0; m < M; ++m) {
    z[m] = a[m].re;
    z[M + m] = a[m].im;
  }
  return z;
}

inline GaussianIntVector coords_to_vector(const EmbedCoords& z) {
  if (z.size() % 2 != 0)
    throw std::invalid_argument("coords_to_vector: odd length");
  const Eigen::Index M = z.size() / 2;
  GaussianIntVector a(M);
  for (Eigen::Index m = 0; m < M; ++m) a[m] = {z[m], z[M + m]};
  return a;
}

}  // namespace cfmarc
