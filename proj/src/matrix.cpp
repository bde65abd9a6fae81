#include "cstar/matrix.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cstar {

const char* err_name(Err e) {
    switch (e) {
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::InvalidTolerance: return "InvalidTolerance";
    case Err::NotPSD: return "NotPSD";
    case Err::Inconsistent: return "Inconsistent";
    case Err::Underdetermined: return "Underdetermined";
    case Err::NotInCommutant: return "NotInCommutant";
    case Err::NotInSpace: return "NotInSpace";
    case Err::DegenerateInput: return "DegenerateInput";
    case Err::DegenerateRep: return "DegenerateRep";
    case Err::NonFaithful: return "NonFaithful";
    case Err::NotConditionalExpectation: return "NotConditionalExpectation";
    case Err::NotCompatible: return "NotCompatible";
    case Err::CaseViolated: return "CaseViolated";
    case Err::NonCommuting: return "NonCommuting";
    case Err::PreconditionFailed: return "PreconditionFailed";
    case Err::NotBAlgebra: return "NotBAlgebra";
    case Err::NotMorphism: return "NotMorphism";
    case Err::NotCP: return "NotCP";
    case Err::NotSpatiallyImplemented: return "NotSpatiallyImplemented";
    case Err::EmptyFiber: return "EmptyFiber";
    case Err::NotClosed: return "NotClosed";
    case Err::NotStabilized: return "NotStabilized";
    case Err::Input: return "Input";
    }
    return "Unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        fail(Err::ShapeMismatch, "entry count does not match rows*cols");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j) {
    Matrix m(rows, cols);
    m(i, j) = 1.0;
    return m;
}

Matrix Matrix::diag(const std::vector<cplx>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::col_vector(const std::vector<cplx>& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) fail(Err::ShapeMismatch, "ragged row literal");
        std::size_t j = 0;
        for (const auto& x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

Matrix Matrix::kron(const Matrix& a, const Matrix& b) {
    Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx(0.0)) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    m(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return m;
}

Matrix Matrix::adjoint() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

Matrix Matrix::transpose() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

Matrix Matrix::conjugate() const {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = std::conj(data_[i]);
    return m;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(Err::ShapeMismatch, "add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(Err::ShapeMismatch, "sub");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
}

Matrix Matrix::block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
    if (i0 + r > rows_ || j0 + c > cols_) fail(Err::ShapeMismatch, "block out of range");
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
    return m;
}

void Matrix::set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
    if (i0 + b.rows() > rows_ || j0 + b.cols() > cols_) fail(Err::ShapeMismatch, "set_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

Matrix Matrix::col(std::size_t j) const { return block(0, j, rows_, 1); }

cplx Matrix::trace() const {
    cplx t = 0.0;
    const std::size_t n = std::min(rows_, cols_);
    for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
}

double Matrix::norm_f() const {
    double s = 0.0;
    for (const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
}

double Matrix::norm_max() const {
    double s = 0.0;
    for (const auto& x : data_) s = std::max(s, std::abs(x));
    return s;
}

bool Matrix::all_finite() const {
    for (const auto& x : data_)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

Matrix Matrix::hermitized() const {
    if (rows_ != cols_) fail(Err::ShapeMismatch, "hermitized needs square");
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return m;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(cplx s, Matrix a) { return a *= s; }

namespace kern {

namespace {
bool g_parallel =
#ifdef _OPENMP
    true;
#else
    false;
#endif
constexpr std::size_t kParallelCutoff = 64 * 64;
} // namespace

bool parallel_enabled() { return g_parallel; }
void set_parallel(bool on) { g_parallel = on; }

namespace ref {

void gemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
            c[i * n + j] = s;
        }
}

void gemm_AhB(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    // a is k x m, result is m x n
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += std::conj(a[p * m + i]) * b[p * n + j];
            c[i * n + j] = s;
        }
}

void gemm_ABh(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    // b is n x k, result is m x n
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * std::conj(b[j * k + p]);
            c[i * n + j] = s;
        }
}

void gram(const cplx* const* ms, std::size_t count, std::size_t len, cplx* g) {
    for (std::size_t p = 0; p < count; ++p)
        for (std::size_t q = p; q < count; ++q) {
            cplx s = 0.0;
            for (std::size_t t = 0; t < len; ++t) s += std::conj(ms[p][t]) * ms[q][t];
            g[p * count + q] = s;
            g[q * count + p] = std::conj(s);
        }
}

} // namespace ref

void gemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    if (!g_parallel || m * n < kParallelCutoff) {
        ref::gemm(a, b, c, m, k, n);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t p = 0; p < k; ++p) s += a[(std::size_t)i * k + p] * b[p * n + j];
            c[(std::size_t)i * n + j] = s;
        }
}

void gemm_AhB(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    if (!g_parallel || m * n < kParallelCutoff) {
        ref::gemm_AhB(a, b, c, m, k, n);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t p = 0; p < k; ++p)
                s += std::conj(a[p * m + (std::size_t)i]) * b[p * n + j];
            c[(std::size_t)i * n + j] = s;
        }
}

void gemm_ABh(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n) {
    if (!g_parallel || m * n < kParallelCutoff) {
        ref::gemm_ABh(a, b, c, m, k, n);
        return;
    }
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t p = 0; p < k; ++p)
                s += a[(std::size_t)i * k + p] * std::conj(b[j * k + p]);
            c[(std::size_t)i * n + j] = s;
        }
}

void gram(const cplx* const* ms, std::size_t count, std::size_t len, cplx* g) {
    if (!g_parallel || count * count * len < kParallelCutoff) {
        ref::gram(ms, count, len, g);
        return;
    }
#pragma omp parallel for schedule(dynamic)
    for (long long p = 0; p < (long long)count; ++p)
        for (std::size_t q = (std::size_t)p; q < count; ++q) {
            cplx s = 0.0;
            for (std::size_t t = 0; t < len; ++t)
                s += std::conj(ms[(std::size_t)p][t]) * ms[q][t];
            g[(std::size_t)p * count + q] = s;
            g[q * count + (std::size_t)p] = std::conj(s);
        }
}

} // namespace kern

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) fail(Err::ShapeMismatch, "matmul");
    Matrix c(a.rows(), b.cols());
    kern::gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

Matrix matmul_AhB(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) fail(Err::ShapeMismatch, "matmul_AhB");
    Matrix c(a.cols(), b.cols());
    kern::gemm_AhB(a.data(), b.data(), c.data(), a.cols(), a.rows(), b.cols());
    return c;
}

Matrix matmul_ABh(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) fail(Err::ShapeMismatch, "matmul_ABh");
    Matrix c(a.rows(), b.rows());
    kern::gemm_ABh(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.rows());
    return c;
}

cplx hs_inner(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail(Err::ShapeMismatch, "hs_inner");
    cplx s = 0.0;
    const cplx* pa = a.data();
    const cplx* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(pa[i]) * pb[i];
    return s;
}

double hs_norm(const Matrix& a) { return a.norm_f(); }

Matrix vec(const Matrix& a) {
    Matrix v(a.size(), 1);
    for (std::size_t i = 0; i < a.size(); ++i) v(i, 0) = a.data()[i];
    return v;
}

Matrix unvec(const Matrix& v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) fail(Err::ShapeMismatch, "unvec");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i) m.data()[i] = v.data()[i];
    return m;
}

Matrix hs_gram(const std::vector<Matrix>& ms) {
    const std::size_t count = ms.size();
    Matrix g(count, count);
    if (count == 0) return g;
    std::vector<const cplx*> ptrs(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (ms[i].rows() != ms[0].rows() || ms[i].cols() != ms[0].cols())
            fail(Err::ShapeMismatch, "hs_gram family shapes differ");
        ptrs[i] = ms[i].data();
    }
    kern::gram(ptrs.data(), count, ms[0].size(), g.data());
    return g;
}

} // namespace cstar
