#include "nre/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nre::kernels {

namespace {

#ifdef _OPENMP
std::atomic<Exec> g_default{Exec::Parallel};
#else
std::atomic<Exec> g_default{Exec::Serial};
#endif

} // namespace

Exec default_exec() { return g_default.load(); }

void set_default_exec(Exec mode) { g_default.store(mode); }

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

struct RowStats {
    Vector mean;
    Vector norm;              // sqrt(sum of squared deviations)
    std::vector<char> constant; // 1 when the row has zero sample variance
};

// Means, centered-norms and exact constancy flags per row. A constant row
// is detected by max == min so the zero-variance rule does not depend on a
// floating-point tolerance.
RowStats row_stats(const Matrix& signals) {
    const std::size_t n = signals.rows();
    const std::size_t len = signals.cols();
    RowStats st;
    st.mean.resize(n);
    st.norm.resize(n);
    st.constant.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = signals.row(i);
        double sum = 0.0, lo = row[0], hi = row[0];
        for (std::size_t k = 0; k < len; ++k) {
            sum += row[k];
            lo = std::min(lo, row[k]);
            hi = std::max(hi, row[k]);
        }
        st.mean[i] = sum / static_cast<double>(len);
        st.constant[i] = (lo == hi) ? 1 : 0;
        double sq = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            const double d = row[k] - st.mean[i];
            sq += d * d;
        }
        st.norm[i] = std::sqrt(sq);
    }
    return st;
}

inline double pair_weight(const Matrix& signals, const RowStats& st, std::size_t i, std::size_t j) {
    if (st.constant[i] || st.constant[j] || st.norm[i] == 0.0 || st.norm[j] == 0.0) return 0.0;
    const double* a = signals.row(i);
    const double* b = signals.row(j);
    double s = 0.0;
    for (std::size_t k = 0; k < signals.cols(); ++k)
        s += (a[k] - st.mean[i]) * (b[k] - st.mean[j]);
    const double r = std::abs(s) / (st.norm[i] * st.norm[j]);
    return r > 1.0 ? 1.0 : r;
}

} // namespace

Matrix corr_abs_matrix(const Matrix& signals, Exec mode) {
    if (signals.cols() < 2) throw std::invalid_argument("corr_abs_matrix: need at least 2 samples");
    const std::int64_t n = static_cast<std::int64_t>(signals.rows());
    const RowStats st = row_stats(signals);
    Matrix f(signals.rows(), signals.rows(), 0.0);

    if (mode == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < n; ++i) {
            for (std::int64_t j = i + 1; j < n; ++j) {
                const double w = pair_weight(signals, st, static_cast<std::size_t>(i),
                                             static_cast<std::size_t>(j));
                f(i, j) = w;
                f(j, i) = w;
            }
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            for (std::int64_t j = i + 1; j < n; ++j) {
                const double w = pair_weight(signals, st, static_cast<std::size_t>(i),
                                             static_cast<std::size_t>(j));
                f(i, j) = w;
                f(j, i) = w;
            }
        }
    }
    for (std::int64_t i = 0; i < n; ++i) f(i, i) = 1.0;
    return f;
}

namespace {

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    const std::size_t inner = a.cols();
    const std::size_t cols = b.cols();
    double* out = c.row(i);
    for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
    for (std::size_t k = 0; k < inner; ++k) {
        const double aik = a(i, k);
        const double* brow = b.row(k);
        for (std::size_t j = 0; j < cols; ++j) out[j] += aik * brow[j];
    }
}

} // namespace

Matrix matmul(const Matrix& a, const Matrix& b, Exec mode) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    const std::int64_t n = static_cast<std::int64_t>(a.rows());
    if (mode == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) matmul_row(a, b, c, static_cast<std::size_t>(i));
    } else {
        for (std::int64_t i = 0; i < n; ++i) matmul_row(a, b, c, static_cast<std::size_t>(i));
    }
    return c;
}

namespace {

// out row i of (t * f^T): out_ij = sum_k t_ik f_jk
inline void abt_row(const Matrix& t, const Matrix& f, Matrix& out, std::size_t i) {
    const std::size_t n = f.rows();
    const std::size_t inner = t.cols();
    const double* trow = t.row(i);
    double* orow = out.row(i);
    for (std::size_t j = 0; j < n; ++j) {
        const double* frow = f.row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < inner; ++k) s += trow[k] * frow[k];
        orow[j] = s;
    }
}

} // namespace

Matrix propagate_covariance(const Matrix& f, const Matrix& p, const Vector& q_diag, Exec mode) {
    if (p.rows() != p.cols() || f.cols() != p.rows() || q_diag.size() != f.rows())
        throw std::invalid_argument("propagate_covariance: dimension mismatch");
    const Matrix t = matmul(f, p, mode);
    Matrix out(f.rows(), f.rows());
    const std::int64_t n = static_cast<std::int64_t>(f.rows());
    if (mode == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) abt_row(t, f, out, static_cast<std::size_t>(i));
    } else {
        for (std::int64_t i = 0; i < n; ++i) abt_row(t, f, out, static_cast<std::size_t>(i));
    }
    for (std::int64_t i = 0; i < n; ++i) out(i, i) += q_diag[static_cast<std::size_t>(i)];
    return out;
}

Vector matvec(const Matrix& a, const Vector& x, Exec mode) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    Vector y(a.rows(), 0.0);
    const std::int64_t n = static_cast<std::int64_t>(a.rows());
    if (mode == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const double* row = a.row(static_cast<std::size_t>(i));
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) s += row[k] * x[k];
            y[static_cast<std::size_t>(i)] = s;
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            const double* row = a.row(static_cast<std::size_t>(i));
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) s += row[k] * x[k];
            y[static_cast<std::size_t>(i)] = s;
        }
    }
    return y;
}

} // namespace nre::kernels
