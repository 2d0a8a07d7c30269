#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ebi_unmix/error.hpp"
#include "ebi_unmix/linalg.hpp"
#include "oracles.hpp"

using ebi::Matrix;

TEST_CASE("matrix constructors reject empty shapes and non-finite entries") {
  CHECK_THROWS_AS(Matrix(0, 3), ebi::Error);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1.0, 2.0, NAN, 4.0}), ebi::Error);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1.0, 2.0, 3.0}), ebi::Error);
  CHECK_THROWS_AS((Matrix{{1.0, 2.0}, {3.0}}), ebi::Error);
}

TEST_CASE("center_columns") {
  SUBCASE("symmetric column") {
    auto [c, means] = ebi::center_columns(Matrix{{1.0}, {2.0}, {3.0}});
    CHECK(means[0] == doctest::Approx(2.0));
    CHECK(c(0, 0) == doctest::Approx(-1.0));
    CHECK(c(1, 0) == doctest::Approx(0.0));
    CHECK(c(2, 0) == doctest::Approx(1.0));
  }
  SUBCASE("zero-mean column is unchanged") {
    const Matrix m{{-2.0}, {0.5}, {1.5}};
    auto [c, means] = ebi::center_columns(m);
    CHECK(means[0] == 0.0);
    CHECK(c == m);
  }
  SUBCASE("frame-sized block: every column sums to zero") {
    const Matrix x = oracle::random_matrix(10000, 4, 3, 2.0);
    Matrix shifted = x;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < 4; ++c) shifted(r, c) += 10.0 * static_cast<double>(c + 1);
    }
    auto [c, means] = ebi::center_columns(shifted);
    REQUIRE(means.size() == 4);
    CHECK(c.rows() == 10000);
    for (std::size_t j = 0; j < 4; ++j) {
      const auto col = c.column(j);
      CHECK(std::abs(std::accumulate(col.begin(), col.end(), 0.0)) < 1e-9 * 10000);
      CHECK(means[j] == doctest::Approx(10.0 * static_cast<double>(j + 1)).epsilon(1e-2));
    }
  }
}

TEST_CASE("covariance") {
  SUBCASE("unit-spaced triple has variance 1") {
    const Matrix c = ebi::covariance(Matrix{{-1.0}, {0.0}, {1.0}});
    CHECK(c(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("identical columns give equal entries") {
    const Matrix c = ebi::covariance(Matrix{{-1.0, -1.0}, {0.5, 0.5}, {0.5, 0.5}});
    CHECK(c(0, 1) == doctest::Approx(c(0, 0)));
    CHECK(c(1, 0) == doctest::Approx(c(1, 1)));
  }
  SUBCASE("matches the double-loop oracle") {
    const Matrix x = ebi::center_columns(oracle::random_matrix(2000, 4, 11)).centered;
    const Matrix c = ebi::covariance(x);
    const auto ref = oracle::naive_covariance(oracle::to_dense(x));
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(std::abs(c(i, j) - ref[i][j]) < 1e-12);
        CHECK(c(i, j) == c(j, i));
      }
    }
  }
  SUBCASE("covariance of a product matches brute force") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Matrix a = oracle::random_matrix(300, 3, seed);
      const Matrix b = oracle::random_matrix(3, 4, seed + 100);
      const Matrix x = ebi::center_columns(a * b).centered;
      const Matrix c = ebi::covariance(x);
      const auto ref = oracle::naive_covariance(oracle::to_dense(x));
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(c(i, j) - ref[i][j]) < 1e-12);
    }
  }
  SUBCASE("one row is insufficient") {
    try {
      ebi::covariance(Matrix{{1.0, 2.0}});
      FAIL("expected throw");
    } catch (const ebi::Error& e) {
      CHECK(e.kind() == ebi::ErrorKind::insufficient_data);
    }
  }
}

TEST_CASE("sym_eigen basic cases") {
  SUBCASE("equal-diagonal 2x2") {
    const auto e = ebi::sym_eigen(Matrix{{2.0, 1.0}, {1.0, 2.0}});
    CHECK(e.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0));
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(std::abs(e.eigenvectors(0, 0)) - h) < 1e-12);
    CHECK(std::abs(e.eigenvectors(0, 0) - e.eigenvectors(1, 0)) < 1e-12);
    CHECK(std::abs(e.eigenvectors(0, 1) + e.eigenvectors(1, 1)) < 1e-12);
  }
  SUBCASE("identity") {
    const auto e = ebi::sym_eigen(Matrix::identity(4));
    for (double l : e.eigenvalues) CHECK(l == 1.0);
  }
  SUBCASE("asymmetric input is rejected") {
    try {
      ebi::sym_eigen(Matrix{{1.0, 2.0}, {0.0, 1.0}});
      FAIL("expected throw");
    } catch (const ebi::Error& e) {
      CHECK(e.kind() == ebi::ErrorKind::invalid_input);
    }
    CHECK_THROWS_AS(ebi::sym_eigen(Matrix(2, 3)), ebi::Error);
  }
  SUBCASE("sign convention: largest-magnitude entry positive") {
    const auto e = ebi::sym_eigen(oracle::random_symmetric(5, 9));
    for (std::size_t c = 0; c < 5; ++c) {
      auto v = e.eigenvectors.column(c);
      auto it = std::max_element(v.begin(), v.end(),
                                 [](double a, double b) { return std::abs(a) < std::abs(b); });
      CHECK(*it > 0.0);
    }
  }
}

TEST_CASE("sym_eigen matches characteristic-polynomial roots") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = oracle::random_symmetric(4, 1000 + seed);
    const auto e = ebi::sym_eigen(m);
    const auto roots = oracle::char_poly_roots(oracle::to_dense(m));
    REQUIRE(roots.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(e.eigenvalues[i] - roots[i]) < 1e-8);
  }
}

TEST_CASE("sym_eigen invariants on random inputs") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 1 + seed % 8;
    const Matrix m = oracle::random_symmetric(n, seed);
    const auto e = ebi::sym_eigen(m);
    const double norm = ebi::frobenius_norm(m);
    CHECK(ebi::orthonormality_defect(e.eigenvectors) < 1e-10);
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(e.eigenvalues[i] >= e.eigenvalues[i + 1]);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = e.eigenvectors.column(i);
      for (std::size_t r = 0; r < n; ++r) {
        double mv = 0.0;
        for (std::size_t c = 0; c < n; ++c) mv += m(r, c) * v[c];
        CHECK(std::abs(mv - e.eigenvalues[i] * v[r]) < 1e-8 * std::max(norm, 1.0));
      }
    }
    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trace += m(i, i);
      sum += e.eigenvalues[i];
    }
    CHECK(std::abs(trace - sum) < 1e-9);
  }
}

TEST_CASE("svd") {
  SUBCASE("diagonal input") {
    const auto s = ebi::svd(Matrix{{3.0, 0.0}, {0.0, 2.0}});
    CHECK(s.d[0] == doctest::Approx(3.0));
    CHECK(s.d[1] == doctest::Approx(2.0));
    CHECK(ebi::max_abs_diff(s.u, Matrix::identity(2)) < 1e-12);
    CHECK(ebi::max_abs_diff(s.v, Matrix::identity(2)) < 1e-12);
  }
  SUBCASE("zero column gets a zero singular value and a completed U column") {
    const Matrix y{{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    const auto s = ebi::svd(y);
    CHECK(s.d[0] == doctest::Approx(1.0));
    CHECK(s.d[1] == 0.0);
    for (double v : s.u.data()) CHECK(std::isfinite(v));
    CHECK(ebi::orthonormality_defect(s.u) < 1e-12);
    CHECK(s.u(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("all-zero matrix stays finite") {
    const auto s = ebi::svd(Matrix(5, 3));
    for (double d : s.d) CHECK(d == 0.0);
    CHECK(ebi::orthonormality_defect(s.u) < 1e-12);
  }
  SUBCASE("wide input is a shape error") {
    try {
      ebi::svd(Matrix(2, 3, 1.0));
      FAIL("expected throw");
    } catch (const ebi::Error& e) {
      CHECK(e.kind() == ebi::ErrorKind::dimension);
    }
  }
  SUBCASE("random tall matrices reconstruct") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const Matrix y = oracle::random_matrix(50, 4, seed);
      const auto s = ebi::svd(y);
      const Matrix back = s.u * Matrix::diagonal(s.d) * s.v.transposed();
      CHECK(ebi::frobenius_norm(y - back) / ebi::frobenius_norm(y) < 1e-10);
      CHECK(ebi::orthonormality_defect(s.u) < 1e-10);
      CHECK(ebi::orthonormality_defect(s.v) < 1e-10);
      for (std::size_t i = 0; i + 1 < s.d.size(); ++i) CHECK(s.d[i] >= s.d[i + 1]);
    }
  }
}
