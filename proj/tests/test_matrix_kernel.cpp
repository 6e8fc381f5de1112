#include <doctest.h>

#include <array>
#include <cmath>

#include "bdg/matrix_kernel.hpp"
#include "bdg/rng.hpp"
#include "support/fixtures.hpp"

using namespace bdg;

namespace {

MatrixXd random_pd(Index p, Rng& rng) {
  MatrixXd a(p, p);
  for (Index r = 0; r < p; ++r)
    for (Index c = 0; c < p; ++c) a(r, c) = standard_normal(rng);
  return a * a.transpose() + MatrixXd::Identity(p, p) * static_cast<double>(p) * 0.1;
}

}  // namespace

TEST_CASE("symmetric storage writes both triangles") {
  SymMatrixd m(3);
  m.set(0, 2, 1.5);
  CHECK(m(2, 0) == 1.5);
  MatrixXd a(2, 2);
  a << 1, 2, 4, 1;
  CHECK(SymMatrixd(a)(0, 1) == 3.0);
  CHECK_THROWS_AS(SymMatrixd(MatrixXd(2, 3)), InvalidDimension);
}

TEST_CASE("cholesky examples") {
  CHECK(cholesky(MatrixXd::Identity(3, 3)).lower().isApprox(MatrixXd::Identity(3, 3)));
  MatrixXd m(2, 2);
  m << 4, 2, 2, 3;
  MatrixXd l(2, 2);
  l << 2, 0, 1, std::sqrt(2.0);
  CHECK((cholesky(m).lower() - l).cwiseAbs().maxCoeff() < 1e-14);
  MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky(bad), NotPositiveDefinite);
  CHECK_FALSE(is_positive_definite(bad));
}

TEST_CASE("cholesky rejects pivots under the relative floor") {
  MatrixXd m(2, 2);
  m << 1, 1, 1, 1 + 1e-14;
  CHECK_THROWS_AS(cholesky(m), NotPositiveDefinite);
}

TEST_CASE("cholesky reconstructs within 1e-10 relative Frobenius") {
  Rng rng = make_stream(11);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXd m = random_pd(8, rng);
    CHECK((cholesky(m).reconstruct() - m).norm() / m.norm() < 1e-10);
  }
}

TEST_CASE("inverse_pd examples") {
  CHECK(inverse_pd(MatrixXd::Identity(4, 4)).isApprox(MatrixXd::Identity(4, 4)));
  const MatrixXd inv = inverse_pd(MatrixXd(Eigen::Vector2d(2, 4).asDiagonal()));
  CHECK(inv(0, 0) == doctest::Approx(0.5));
  CHECK(inv(1, 1) == doctest::Approx(0.25));
  CHECK(inv(0, 1) == 0.0);
  Rng rng = make_stream(3);
  const MatrixXd m = random_pd(5, rng);
  CHECK((m * inverse_pd(m) - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("logdet examples") {
  CHECK(logdet(MatrixXd::Identity(5, 5)) == 0.0);
  CHECK(logdet(MatrixXd(MatrixXd::Identity(2, 2) * 2.0)) == doctest::Approx(1.386294361).epsilon(1e-9));
  const MatrixXd k = fixture::six_node_k();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(k);
  CHECK(std::abs(logdet(k) - es.eigenvalues().array().log().sum()) < 1e-12);
}

TEST_CASE("schur_update examples") {
  MatrixXd block = MatrixXd::Zero(4, 4);
  block.topLeftCorner(2, 2) << 2, 1, 1, 2;
  block.bottomRightCorner(2, 2) << 3, 1, 1, 3;
  const std::array<Index, 2> t{0, 1}, g{2, 3};
  CHECK(schur_update(block, t, g).isZero(0.0));

  MatrixXd m(2, 2);
  m << 2, 1, 1, 2;
  const std::array<Index, 1> t0{0}, g1{1};
  CHECK(schur_update(m, t0, g1)(0, 0) == doctest::Approx(0.5));

  const MatrixXd k = fixture::six_node_k();
  for (Index j = 0; j < 6; ++j) {
    const std::array<Index, 1> tj{j};
    const auto rest = complement(6, tj);
    // k_jj - c = 1 / (K^-1)_jj
    const double c = schur_update(k, tj, rest)(0, 0);
    CHECK(std::abs(c - (k(j, j) - 1.0 / inverse_pd(k)(j, j))) < 1e-12);
  }
  CHECK_THROWS_AS(schur_update(m, t0, t0), InvalidArgument);
}

TEST_CASE("property: inverse_pd is an involution within 1e-6") {
  Rng rng = make_stream(5);
  for (int rep = 0; rep < 50; ++rep) {
    const Index p = 1 + rep % 12;
    const MatrixXd m = random_pd(p, rng);
    CHECK((inverse_pd(inverse_pd(m)) - m).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("property: logdet equals the sum of log eigenvalues up to p=50") {
  Rng rng = make_stream(6);
  for (Index p : {1, 2, 5, 10, 25, 50}) {
    MatrixXd m = random_pd(p, rng);
    m /= m.diagonal().mean();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    CHECK(std::abs(logdet(m) - es.eigenvalues().array().log().sum()) < 1e-8);
  }
}

TEST_CASE("property: schur_update is symmetric PSD for PD input") {
  Rng rng = make_stream(7);
  for (int rep = 0; rep < 30; ++rep) {
    const MatrixXd m = random_pd(6, rng);
    const std::array<Index, 3> t{0, 2, 5};
    const auto g = complement(6, t);
    const MatrixXd s = schur_update(m, t, g);
    CHECK(s == s.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
    CHECK(es.eigenvalues().minCoeff() > -1e-10 * m.norm());
  }
}
