#include "nre/kernels.hpp"
#include "nre/linalg.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace nre;
using test::Rng;

TEST_CASE("parallel kernels match the serial reference bit for bit") {
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng.index(40);
        const std::size_t len = 2 + rng.index(60);
        const Matrix signals = test::random_signals(rng, n, len);

        const Matrix serial = kernels::corr_abs_matrix(signals, kernels::Exec::Serial);
        const Matrix parallel = kernels::corr_abs_matrix(signals, kernels::Exec::Parallel);
        CHECK(serial == parallel);

        const Matrix f = test::random_weights(rng, n);
        const Matrix p = test::random_weights(rng, n, 0.0, 0.5);
        Vector q(n);
        for (double& v : q) v = rng.uniform(0.0, 0.1);
        CHECK(kernels::propagate_covariance(f, p, q, kernels::Exec::Serial) ==
              kernels::propagate_covariance(f, p, q, kernels::Exec::Parallel));
        CHECK(kernels::matmul(f, p, kernels::Exec::Serial) ==
              kernels::matmul(f, p, kernels::Exec::Parallel));

        Vector x(n);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        CHECK(kernels::matvec(f, x, kernels::Exec::Serial) ==
              kernels::matvec(f, x, kernels::Exec::Parallel));
    }
}

TEST_CASE("matmul and covariance propagation against the cubic oracle") {
    Rng rng(7);
    const Matrix a = test::random_signals(rng, 5, 4);
    const Matrix b = test::random_signals(rng, 4, 6);
    const Matrix c = kernels::matmul(a, b, kernels::Exec::Serial);
    CHECK(max_abs_diff(c, test::oracle_matmul(a, b)) < 1e-12);

    const Matrix f = test::random_weights(rng, 5);
    const Matrix p = test::random_weights(rng, 5, 0.0, 0.3);
    Vector q(5, 0.25);
    const Matrix prop = kernels::propagate_covariance(f, p, q, kernels::Exec::Serial);
    Matrix expected = test::oracle_matmul(test::oracle_matmul(f, p), transpose(f));
    for (std::size_t i = 0; i < 5; ++i) expected(i, i) += 0.25;
    CHECK(max_abs_diff(prop, expected) < 1e-12);
}

TEST_CASE("cholesky solves SPD systems") {
    Rng rng(11);
    const std::size_t n = 6;
    // A = M M^T + I is comfortably SPD.
    const Matrix m = test::random_signals(rng, n, n);
    Matrix a = test::oracle_matmul(m, transpose(m));
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;

    const Cholesky chol = cholesky(a);
    REQUIRE(chol.ok);
    CHECK(chol.min_pivot > 0.0);

    Vector b(n);
    for (double& v : b) v = rng.uniform(-2.0, 2.0);
    const Vector x = chol_solve(chol.lower, b);
    const Vector ax = kernels::matvec(a, x, kernels::Exec::Serial);
    for (std::size_t i = 0; i < n; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-10));
}

TEST_CASE("cholesky rejects indefinite matrices") {
    Matrix a(2, 2, 0.0);
    a(0, 0) = 1.0;
    a(1, 1) = -1.0;
    const Cholesky chol = cholesky(a);
    CHECK_FALSE(chol.ok);
    CHECK(chol.min_pivot < 0.0);
}

TEST_CASE("jacobi eigendecomposition reconstructs the matrix") {
    Rng rng(13);
    const std::size_t n = 7;
    Matrix a = test::random_weights(rng, n, -1.0, 1.0);
    symmetrize(a);

    const SymEigen eig = jacobi_eigen(a);
    REQUIRE(eig.values.size() == n);
    for (std::size_t k = 1; k < n; ++k) CHECK(eig.values[k - 1] <= eig.values[k]);

    // V diag(values) V^T == A
    Matrix rebuilt(n, n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                rebuilt(i, j) += eig.values[k] * eig.vectors(i, k) * eig.vectors(j, k);
    CHECK(max_abs_diff(rebuilt, a) < 1e-10);
}

TEST_CASE("pseudo-inverse of a singular symmetric matrix") {
    // Rank-1: a = v v^T, pinv(a) = v v^T / |v|^4.
    Matrix a(3, 3);
    const Vector v{1.0, 2.0, 2.0};  // |v|^2 = 9
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = v[i] * v[j];
    const Matrix inv = pinv_sym(a, 1e-9);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(inv(i, j) == doctest::Approx(v[i] * v[j] / 81.0).epsilon(1e-10));
}
