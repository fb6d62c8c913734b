#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <random>

#include "cfmarc/exact_linalg.hpp"
#include "cfmarc/gaussian_int.hpp"

using namespace cfmarc;

namespace {

// Independent oracle: recursive cofactor expansion, exact arithmetic.
GaussianInt det_cofactor(const GaussianIntMatrix& A) {
  const Eigen::Index n = A.rows();
  if (n == 1) return A(0, 0);
  GaussianInt acc{0, 0};
  for (Eigen::Index j = 0; j < n; ++j) {
    GaussianIntMatrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index cc = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = A(r, c);
      }
    }
    GaussianInt term = A(0, j) * det_cofactor(minor);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

// Independent oracle: floating singular values with a 1e-9 threshold.
bool full_rank_svd(const GaussianIntMatrix& A) {
  Eigen::MatrixXcd F(A.rows(), A.cols());
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c) F(r, c) = A(r, c).to_complex();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(F);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return A.rows() == 0;
  return sv(sv.size() - 1) > 1e-9 * sv(0);
}

GaussianIntMatrix random_matrix(std::mt19937_64& rng, Eigen::Index L,
                                Eigen::Index M, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  GaussianIntMatrix A(L, M);
  for (Eigen::Index r = 0; r < L; ++r)
    for (Eigen::Index c = 0; c < M; ++c) A(r, c) = {d(rng), d(rng)};
  return A;
}

bool same_vector(const GaussianIntVector& a, const GaussianIntVector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index m = 0; m < a.size(); ++m)
    if (a[m] != b[m]) return false;
  return true;
}

GaussianIntMatrix matmul(const GaussianIntMatrix& A,
                         const GaussianIntMatrix& B) {
  GaussianIntMatrix C(A.rows(), B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      GaussianInt s{0, 0};
      for (Eigen::Index k = 0; k < A.cols(); ++k) s += A(i, k) * B(k, j);
      C(i, j) = s;
    }
  return C;
}

}  // namespace

TEST_CASE("det_exact on fixed matrices") {
  GaussianIntMatrix I2(2, 2);
  I2(0, 0) = {1, 0};
  I2(0, 1) = {0, 0};
  I2(1, 0) = {0, 0};
  I2(1, 1) = {1, 0};
  CHECK(det_exact(I2) == GaussianInt{1, 0});

  GaussianIntMatrix D(2, 2);
  D(0, 0) = {1, 1};
  D(0, 1) = {0, 0};
  D(1, 0) = {0, 0};
  D(1, 1) = {1, -1};
  CHECK(det_exact(D) == GaussianInt{2, 0});
}

TEST_CASE("det_exact rejects non-square input") {
  GaussianIntMatrix A(2, 3);
  A.setConstant(GaussianInt{1, 0});
  CHECK_THROWS_AS(det_exact(A), std::invalid_argument);
}

TEST_CASE("det_exact matches cofactor oracle on random 3x3") {
  std::mt19937_64 rng(0x5eed0001);
  for (int t = 0; t < 50; ++t) {
    GaussianIntMatrix A = random_matrix(rng, 3, 3, -3, 3);
    CHECK(det_exact(A) == det_cofactor(A));
  }
}

TEST_CASE("det_exact is multiplicative") {
  std::mt19937_64 rng(0x5eed0002);
  for (int t = 0; t < 40; ++t) {
    for (Eigen::Index n : {2, 3}) {
      GaussianIntMatrix A = random_matrix(rng, n, n, -3, 3);
      GaussianIntMatrix B = random_matrix(rng, n, n, -3, 3);
      CHECK(det_exact(matmul(A, B)) == det_exact(A) * det_exact(B));
    }
  }
}

TEST_CASE("is_full_rank on fixed matrices") {
  GaussianIntMatrix I3(3, 3);
  I3.setConstant(GaussianInt{0, 0});
  for (int k = 0; k < 3; ++k) I3(k, k) = {1, 0};
  CHECK(is_full_rank(I3));

  GaussianIntMatrix dup(2, 2);
  dup(0, 0) = {2, 1};
  dup(0, 1) = {-1, 3};
  dup(1, 0) = {2, 1};
  dup(1, 1) = {-1, 3};
  CHECK_FALSE(is_full_rank(dup));

  GaussianIntMatrix wide(3, 2);
  wide.setConstant(GaussianInt{1, 0});
  CHECK_THROWS_AS(is_full_rank(wide), std::invalid_argument);
}

TEST_CASE("is_full_rank agrees with SVD oracle on random instances") {
  std::mt19937_64 rng(0x5eed0003);
  std::uniform_int_distribution<int> dim(1, 4);
  int made = 0;
  while (made < 200) {
    Eigen::Index M = dim(rng);
    std::uniform_int_distribution<Eigen::Index> ld(1, M);
    Eigen::Index L = ld(rng);
    GaussianIntMatrix A = random_matrix(rng, L, M, -3, 3);
    // Mix in rank-deficient cases: duplicate a row in 1/3 of draws.
    if (L >= 2 && made % 3 == 0)
      for (Eigen::Index c = 0; c < M; ++c) A(L - 1, c) = A(0, c);
    CHECK(is_full_rank(A) == full_rank_svd(A));
    ++made;
  }
}

TEST_CASE("is_full_rank invariant under row permutation and unit scaling") {
  std::mt19937_64 rng(0x5eed0004);
  const GaussianInt units[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int t = 0; t < 60; ++t) {
    Eigen::Index M = 2 + (t % 3);
    GaussianIntMatrix A = random_matrix(rng, M, M, -3, 3);
    bool base = is_full_rank(A);

    GaussianIntMatrix P = A;
    for (Eigen::Index c = 0; c < M; ++c) std::swap(P(0, c), P(M - 1, c));
    CHECK(is_full_rank(P) == base);

    GaussianIntMatrix Uc = A;
    GaussianInt u = units[t % 4];
    for (Eigen::Index c = 0; c < M; ++c) Uc(1, c) = u * Uc(1, c);
    CHECK(is_full_rank(Uc) == base);
  }
}

TEST_CASE("real_embedding fixed examples") {
  CMatd I2 = CMatd::Identity(2, 2);
  RMatd G = real_embedding(I2);
  CHECK((G - RMatd::Identity(4, 4)).norm() == 0.0);

  CMatd J(1, 1);
  J(0, 0) = {0.0, 1.0};
  RMatd GJ = real_embedding(J);
  CHECK(GJ(0, 0) == 0.0);
  CHECK(GJ(0, 1) == -1.0);
  CHECK(GJ(1, 0) == 1.0);
  CHECK(GJ(1, 1) == 0.0);
}

TEST_CASE("real_embedding preserves norms against complex oracle") {
  std::mt19937_64 rng(0x5eed0005);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> coeff(-5, 5);
  for (int t = 0; t < 100; ++t) {
    Eigen::Index M = 1 + (t % 4);
    CMatd B(M, M);
    for (Eigen::Index r = 0; r < M; ++r)
      for (Eigen::Index c = 0; c < M; ++c) B(r, c) = {g(rng), g(rng)};
    GaussianIntVector a(M);
    bool nonzero = false;
    for (Eigen::Index m = 0; m < M; ++m) {
      a[m] = {coeff(rng), coeff(rng)};
      nonzero = nonzero || !a[m].is_zero();
    }
    if (!nonzero) a[0] = {1, 0};

    RMatd G = real_embedding(B);
    EmbedCoords z = embed_coords(a);
    RVecd zr(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k)
      zr[k] = static_cast<double>(z[k]);
    double real_norm_sq = (G * zr).squaredNorm();
    double cplx_norm_sq = (B * to_complex(a)).squaredNorm();
    CHECK(std::abs(real_norm_sq - cplx_norm_sq) <=
          1e-12 * std::max(1.0, cplx_norm_sq));

    CHECK(same_vector(coords_to_vector(z), a));
  }
}

TEST_CASE("checked arithmetic refuses to overflow") {
  GaussianInt big{INT64_C(1) << 62, 0};
  CHECK_THROWS_AS((void)(big * GaussianInt{4, 0}), std::overflow_error);
  CHECK_THROWS_AS((void)(big + big), std::overflow_error);
  CHECK(exact_div({5, 5}, {1, 1}) == GaussianInt{5, 0});
  CHECK_THROWS_AS((void)exact_div({1, 0}, {2, 0}), std::logic_error);
  CHECK_THROWS_AS((void)exact_div({1, 0}, {0, 0}), std::invalid_argument);
}
