#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "cstar/error.hpp"

namespace cstar {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. The single carrier type for operators,
/// Gram matrices, coordinate blocks and constraint systems.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static Matrix identity(std::size_t n);
    static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    /// Matrix unit E_{i,j}.
    static Matrix unit(std::size_t rows, std::size_t cols, std::size_t i, std::size_t j);
    static Matrix diag(const std::vector<cplx>& d);
    static Matrix col_vector(const std::vector<cplx>& v);
    /// Row-major literal, e.g. Matrix::from_rows({{1,0},{0,1}}).
    static Matrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);
    static Matrix kron(const Matrix& a, const Matrix& b);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }

    Matrix adjoint() const;
    Matrix transpose() const;
    Matrix conjugate() const;

    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(cplx s);

    Matrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const;
    void set_block(std::size_t i0, std::size_t j0, const Matrix& b);
    Matrix col(std::size_t j) const;

    cplx trace() const;
    double norm_f() const;   // Frobenius
    double norm_max() const; // entrywise max modulus
    bool all_finite() const;

    /// (A + A^H)/2, shape must be square.
    Matrix hermitized() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(cplx s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

/// A^H * B without forming the adjoint.
Matrix matmul_AhB(const Matrix& a, const Matrix& b);
/// A * B^H without forming the adjoint.
Matrix matmul_ABh(const Matrix& a, const Matrix& b);

/// Hilbert-Schmidt inner product trace(A^H B). Conjugate-linear in the first slot.
cplx hs_inner(const Matrix& a, const Matrix& b);
double hs_norm(const Matrix& a);

/// Largest singular value (via the Gram spectrum).
double op_norm(const Matrix& a);

/// Row-major flattening of a matrix into a column vector and back.
Matrix vec(const Matrix& a);
Matrix unvec(const Matrix& v, std::size_t rows, std::size_t cols);

/// Pairwise HS Gram matrix G[p][q] = <m_p, m_q>.
Matrix hs_gram(const std::vector<Matrix>& ms);

namespace kern {

/// Entry-parallel kernels. Each output entry is accumulated serially in a
/// fixed order, so results are identical for any thread count.
void gemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void gemm_AhB(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void gemm_ABh(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void gram(const cplx* const* ms, std::size_t count, std::size_t len, cplx* g);

/// Serial reference implementations, kept for tests and the kernel benchmark.
namespace ref {
void gemm(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void gemm_AhB(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void gemm_ABh(const cplx* a, const cplx* b, cplx* c, std::size_t m, std::size_t k, std::size_t n);
void gram(const cplx* const* ms, std::size_t count, std::size_t len, cplx* g);
} // namespace ref

/// Runtime switch; defaults to on when compiled with OpenMP.
bool parallel_enabled();
void set_parallel(bool on);

} // namespace kern

} // namespace cstar
