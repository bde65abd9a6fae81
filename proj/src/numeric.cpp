#include "cstar/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "cstar/eig.hpp"

namespace cstar {

GramCompletion gram_completion(const Matrix& gram, const Tolerance& tol) {
    tol.validate();
    if (gram.rows() != gram.cols()) fail(Err::ShapeMismatch, "gram matrix must be square");
    if ((gram - gram.adjoint()).norm_max() > tol.residual_abs)
        fail(Err::NotPSD, "gram matrix is not hermitian within residual_abs");

    const std::size_t n = gram.rows();
    GramCompletion out;
    out.input_count = n;
    if (n == 0) {
        out.coords = Matrix(0, 0);
        return out;
    }

    EigResult eg = eig_hermitian(gram);
    const double lam_max = eg.values.empty() ? 0.0 : eg.values.back();
    if (eg.values.front() < -tol.residual_abs)
        fail(Err::NotPSD, "gram matrix has an eigenvalue below -residual_abs");

    const double cutoff = tol.rank_rel * std::max(lam_max, 0.0);
    std::vector<std::size_t> keep;
    for (std::size_t i = n; i-- > 0;) // descending
        if (eg.values[i] > cutoff && eg.values[i] > 0.0) keep.push_back(i);

    out.out_dim = keep.size();
    out.coords = Matrix(n, out.out_dim);
    for (std::size_t c = 0; c < keep.size(); ++c) {
        const double s = std::sqrt(eg.values[keep[c]]);
        for (std::size_t i = 0; i < n; ++i) out.coords(i, c) = s * eg.vectors(i, keep[c]);
    }
    return out;
}

std::vector<Matrix> orthonormal_basis(const std::vector<Matrix>& vectors, const Tolerance& tol) {
    tol.validate();
    std::vector<Matrix> basis;
    if (vectors.empty()) return basis;

    const std::size_t r = vectors[0].rows(), c = vectors[0].cols();
    double max_norm = 0.0;
    for (const auto& v : vectors) {
        if (v.rows() != r || v.cols() != c) fail(Err::ShapeMismatch, "orthonormal_basis family shapes differ");
        max_norm = std::max(max_norm, hs_norm(v));
    }
    if (max_norm == 0.0) return basis;

    const double drop = tol.rank_rel * max_norm;
    for (const auto& v : vectors) {
        Matrix w = v;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) w -= hs_inner(u, w) * u;
        const double nw = hs_norm(w);
        if (nw > drop) {
            w *= cplx(1.0 / nw);
            basis.push_back(std::move(w));
        }
    }
    return basis;
}

std::vector<Matrix> commutant(const std::vector<Matrix>& generators, std::size_t n,
                              const Tolerance& tol) {
    tol.validate();
    if (generators.empty()) {
        std::vector<Matrix> units;
        units.reserve(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) units.push_back(Matrix::unit(n, n, i, j));
        return units;
    }
    ConstraintBuilder cb(n, n, false);
    for (const auto& a : generators) {
        if (a.rows() != n || a.cols() != n) fail(Err::ShapeMismatch, "commutant generators must be n x n");
        cb.commute_with(a);
    }
    return cb.nullspace(tol).basis;
}

Matrix solve_intertwiner(const std::vector<std::pair<Matrix, Matrix>>& constraints,
                         std::size_t t_rows, std::size_t t_cols, const Tolerance& tol,
                         SolveOptions opts) {
    tol.validate();
    ConstraintBuilder cb(t_rows, t_cols, false);
    for (const auto& [l, r] : constraints) cb.mult_right_equals(l, r);
    SolveResult sr = cb.solve(tol);
    if (sr.residual > tol.residual_abs)
        fail(Err::Inconsistent, "intertwiner system residual exceeds residual_abs");
    if (opts.require_unique && sr.nullity > 0)
        fail(Err::Underdetermined, "intertwiner system has solution space of dim " +
                                       std::to_string(sr.nullity));
    return sr.solution;
}

Matrix lstsq_solve(const Matrix& a, const Matrix& b, const Tolerance& tol, double* residual) {
    if (a.rows() != b.rows()) fail(Err::ShapeMismatch, "lstsq shapes");
    const Matrix g = matmul_AhB(a, a);
    const Matrix rhs = matmul_AhB(a, b);
    EigResult eg = eig_hermitian(g);
    const double lam_max = eg.values.empty() ? 0.0 : eg.values.back();
    const double cutoff = tol.rank_rel * std::max(lam_max, 0.0);

    // pinv(G) * rhs through the eigenbasis
    Matrix y = matmul_AhB(eg.vectors, rhs);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double lam = eg.values[i];
        const cplx s = (lam > cutoff && lam > 0.0) ? cplx(1.0 / lam) : cplx(0.0);
        for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) *= s;
    }
    Matrix x = eg.vectors * y;
    if (residual) *residual = (a * x - b).norm_f();
    return x;
}

// ---------------------------------------------------------------------------
// ConstraintBuilder

ConstraintBuilder::ConstraintBuilder(std::size_t t_rows, std::size_t t_cols, bool conjugating)
    : t_rows_(t_rows), t_cols_(t_cols), conjugating_(conjugating) {
    const std::size_t u = conjugating_ ? 2 * t_rows * t_cols : t_rows * t_cols;
    gram_ = Matrix(u, u);
    rhs_ = Matrix(u, 1);
}

void ConstraintBuilder::append_complex_block(const Matrix& rows, bool over_conj, const Matrix& rhs,
                                             double data_scale) {
    const std::size_t u = t_rows_ * t_cols_;
    scale_ = std::max(scale_, data_scale);
    if (rows.cols() != u || rhs.rows() != rows.rows() || rhs.cols() != 1)
        fail(Err::ShapeMismatch, "constraint block shape");
    if (over_conj && !conjugating_)
        fail(Err::Input, "conjugate-linear constraint requires a realified system");

    if (!conjugating_) {
        gram_ += matmul_AhB(rows, rows);
        rhs_ += matmul_AhB(rows, rhs);
    } else {
        // realify: unknown x = [Re vec T ; Im vec T]
        Matrix rb(2 * rows.rows(), 2 * u);
        Matrix rv(2 * rows.rows(), 1);
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            for (std::size_t j = 0; j < u; ++j) {
                const cplx cc = rows(i, j);
                if (!over_conj) {
                    rb(2 * i, j) = cc.real();
                    rb(2 * i, u + j) = -cc.imag();
                    rb(2 * i + 1, j) = cc.imag();
                    rb(2 * i + 1, u + j) = cc.real();
                } else {
                    rb(2 * i, j) = cc.real();
                    rb(2 * i, u + j) = cc.imag();
                    rb(2 * i + 1, j) = cc.imag();
                    rb(2 * i + 1, u + j) = -cc.real();
                }
            }
            rv(2 * i, 0) = rhs(i, 0).real();
            rv(2 * i + 1, 0) = rhs(i, 0).imag();
        }
        gram_ += matmul_AhB(rb, rb);
        rhs_ += matmul_AhB(rb, rv);
    }
    for (std::size_t i = 0; i < rhs.rows(); ++i) rhs_sq_ += std::norm(rhs(i, 0));
    rows_ += conjugating_ ? 2 * rows.rows() : rows.rows();
}

void ConstraintBuilder::mult_right_equals(const Matrix& l, const Matrix& r) {
    if (l.rows() != t_cols_ || r.rows() != t_rows_ || l.cols() != r.cols())
        fail(Err::ShapeMismatch, "T L = R shapes");
    const std::size_t q = l.cols();
    Matrix rows(t_rows_ * q, t_rows_ * t_cols_);
    Matrix rhs(t_rows_ * q, 1);
    for (std::size_t i = 0; i < t_rows_; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t row = i * q + j;
            for (std::size_t k = 0; k < t_cols_; ++k) rows(row, i * t_cols_ + k) = l(k, j);
            rhs(row, 0) = r(i, j);
        }
    append_complex_block(rows, false, rhs, hs_norm(l) * hs_norm(l));
    blocks_.push_back({Block::Kind::MultRightEq, l, r, {}});
}

void ConstraintBuilder::mult_left_equals(const Matrix& a, const Matrix& r) {
    if (a.cols() != t_rows_ || r.rows() != a.rows() || r.cols() != t_cols_)
        fail(Err::ShapeMismatch, "A T = R shapes");
    const std::size_t p = a.rows();
    Matrix rows(p * t_cols_, t_rows_ * t_cols_);
    Matrix rhs(p * t_cols_, 1);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < t_cols_; ++j) {
            const std::size_t row = i * t_cols_ + j;
            for (std::size_t k = 0; k < t_rows_; ++k) rows(row, k * t_cols_ + j) = a(i, k);
            rhs(row, 0) = r(i, j);
        }
    append_complex_block(rows, false, rhs, hs_norm(a) * hs_norm(a));
    blocks_.push_back({Block::Kind::MultLeftEq, a, r, {}});
}

void ConstraintBuilder::commute_with(const Matrix& a) { intertwine(a, a); }

void ConstraintBuilder::intertwine(const Matrix& a, const Matrix& b) {
    // T a - b T = 0, a: t_cols x t_cols, b: t_rows x t_rows
    if (a.rows() != t_cols_ || a.cols() != t_cols_ || b.rows() != t_rows_ || b.cols() != t_rows_)
        fail(Err::ShapeMismatch, "intertwine shapes");
    Matrix rows(t_rows_ * t_cols_, t_rows_ * t_cols_);
    for (std::size_t i = 0; i < t_rows_; ++i)
        for (std::size_t j = 0; j < t_cols_; ++j) {
            const std::size_t row = i * t_cols_ + j;
            for (std::size_t k = 0; k < t_cols_; ++k) rows(row, i * t_cols_ + k) += a(k, j);
            for (std::size_t k = 0; k < t_rows_; ++k) rows(row, k * t_cols_ + j) -= b(i, k);
        }
    append_complex_block(rows, false, Matrix(t_rows_ * t_cols_, 1),
                         hs_norm(a) * hs_norm(a) + hs_norm(b) * hs_norm(b));
    blocks_.push_back({Block::Kind::Intertwine, a, b, {}});
}

void ConstraintBuilder::mult_right_in_span(const Matrix& l, const std::vector<Matrix>& onb) {
    if (l.rows() != t_cols_) fail(Err::ShapeMismatch, "T L span constraint shapes");
    const std::size_t q = l.cols();
    for (const auto& bm : onb)
        if (bm.rows() != t_rows_ || bm.cols() != q)
            fail(Err::ShapeMismatch, "span family shape");

    // row (i,j), unknown (p,k):  [p==i] L(k,j) - sum_m B_m(i,j) conj((B_m L^H)(p,k))
    std::vector<Matrix> corr;
    corr.reserve(onb.size());
    for (const auto& bm : onb) corr.push_back(matmul_ABh(bm, l)); // t_rows x t_cols

    Matrix rows(t_rows_ * q, t_rows_ * t_cols_);
    for (std::size_t i = 0; i < t_rows_; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t row = i * q + j;
            for (std::size_t k = 0; k < t_cols_; ++k) rows(row, i * t_cols_ + k) = l(k, j);
            for (std::size_t m = 0; m < onb.size(); ++m) {
                const cplx w = onb[m](i, j);
                if (w == cplx(0.0)) continue;
                const Matrix& cm = corr[m];
                for (std::size_t p = 0; p < t_rows_; ++p)
                    for (std::size_t k = 0; k < t_cols_; ++k)
                        rows(row, p * t_cols_ + k) -= w * std::conj(cm(p, k));
            }
        }
    append_complex_block(rows, false, Matrix(t_rows_ * q, 1), hs_norm(l) * hs_norm(l));
    blocks_.push_back({Block::Kind::RightInSpan, l, Matrix(), onb});
}

void ConstraintBuilder::mult_left_in_span(const Matrix& a, const std::vector<Matrix>& onb) {
    if (a.cols() != t_rows_) fail(Err::ShapeMismatch, "A T span constraint shapes");
    const std::size_t p = a.rows();
    for (const auto& bm : onb)
        if (bm.rows() != p || bm.cols() != t_cols_) fail(Err::ShapeMismatch, "span family shape");

    // row (i,j), unknown (r,q): [q==j] A(i,r) - sum_m B_m(i,j) (B_m^H A)(j',r) at j'=q
    std::vector<Matrix> corr;
    corr.reserve(onb.size());
    for (const auto& bm : onb) corr.push_back(matmul_AhB(bm, a)); // t_cols x t_rows

    Matrix rows(p * t_cols_, t_rows_ * t_cols_);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < t_cols_; ++j) {
            const std::size_t row = i * t_cols_ + j;
            for (std::size_t r = 0; r < t_rows_; ++r) rows(row, r * t_cols_ + j) = a(i, r);
            for (std::size_t m = 0; m < onb.size(); ++m) {
                const cplx w = onb[m](i, j);
                if (w == cplx(0.0)) continue;
                const Matrix& cm = corr[m];
                for (std::size_t r = 0; r < t_rows_; ++r)
                    for (std::size_t q = 0; q < t_cols_; ++q)
                        rows(row, r * t_cols_ + q) -= w * cm(q, r);
            }
        }
    append_complex_block(rows, false, Matrix(p * t_cols_, 1), hs_norm(a) * hs_norm(a));
    blocks_.push_back({Block::Kind::LeftInSpan, a, Matrix(), onb});
}

void ConstraintBuilder::adj_mult_right_in_span(const Matrix& l, const std::vector<Matrix>& onb) {
    if (!conjugating_) fail(Err::Input, "adjoint constraint requires a realified system");
    // T: t_rows x t_cols, so T^*: t_cols x t_rows; L: t_rows x q; outputs t_cols x q
    if (l.rows() != t_rows_) fail(Err::ShapeMismatch, "T^* L span constraint shapes");
    const std::size_t q = l.cols();
    for (const auto& bm : onb)
        if (bm.rows() != t_cols_ || bm.cols() != q) fail(Err::ShapeMismatch, "span family shape");

    // Over conj(vec T): row (i,j) with i < t_cols, unknown conj(T(k,p)):
    //   [p==i] L(k,j) - sum_m B_m(i,j) (L B_m^H)(k,p)
    std::vector<Matrix> corr;
    corr.reserve(onb.size());
    for (const auto& bm : onb) corr.push_back(matmul_ABh(l, bm)); // t_rows x t_cols

    Matrix rows(t_cols_ * q, t_rows_ * t_cols_);
    for (std::size_t i = 0; i < t_cols_; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t row = i * q + j;
            for (std::size_t k = 0; k < t_rows_; ++k) rows(row, k * t_cols_ + i) = l(k, j);
            for (std::size_t m = 0; m < onb.size(); ++m) {
                const cplx w = onb[m](i, j);
                if (w == cplx(0.0)) continue;
                const Matrix& cm = corr[m];
                for (std::size_t k = 0; k < t_rows_; ++k)
                    for (std::size_t p = 0; p < t_cols_; ++p)
                        rows(row, k * t_cols_ + p) -= w * cm(k, p);
            }
        }
    append_complex_block(rows, true, Matrix(t_cols_ * q, 1), hs_norm(l) * hs_norm(l));
    blocks_.push_back({Block::Kind::AdjRightInSpan, l, Matrix(), onb});
}

namespace {

double span_residual(const Matrix& v, const std::vector<Matrix>& onb) {
    Matrix w = v;
    for (const auto& b : onb) w -= hs_inner(b, w) * b;
    return w.norm_f();
}

} // namespace

double ConstraintBuilder::residual_of(const Matrix& t) const {
    double worst = 0.0;
    for (const auto& blk : blocks_) {
        double r = 0.0;
        switch (blk.kind) {
        case Block::Kind::MultRightEq: r = (t * blk.l - blk.r).norm_f(); break;
        case Block::Kind::MultLeftEq: r = (blk.l * t - blk.r).norm_f(); break;
        case Block::Kind::Intertwine: r = (t * blk.l - blk.r * t).norm_f(); break;
        case Block::Kind::RightInSpan: r = span_residual(t * blk.l, blk.onb); break;
        case Block::Kind::LeftInSpan: r = span_residual(blk.l * t, blk.onb); break;
        case Block::Kind::AdjRightInSpan: r = span_residual(t.adjoint() * blk.l, blk.onb); break;
        }
        worst = std::max(worst, r);
    }
    return worst;
}

NullspaceResult ConstraintBuilder::nullspace(const Tolerance& tol) const {
    tol.validate();
    if (rhs_sq_ != 0.0) fail(Err::Input, "nullspace of a system with nonzero right-hand side");
    const std::size_t u = t_rows_ * t_cols_;

    EigResult eg = conjugating_ ? eig_symmetric(gram_) : eig_hermitian(gram_);
    const double lam_max = eg.values.empty() ? 0.0 : std::max(eg.values.back(), 0.0);
    const double cutoff = tol.rank_rel * std::max(lam_max, scale_);

    std::vector<Matrix> raw;
    for (std::size_t i = 0; i < eg.values.size(); ++i) {
        if (eg.values[i] > cutoff) continue;
        if (!conjugating_) {
            Matrix v(t_rows_, t_cols_);
            for (std::size_t e = 0; e < u; ++e)
                v.data()[e] = eg.vectors(e, i);
            raw.push_back(std::move(v));
        } else {
            Matrix v(t_rows_, t_cols_);
            for (std::size_t e = 0; e < u; ++e)
                v.data()[e] = cplx(eg.vectors(e, i).real(), 0.0) +
                              cplx(0.0, 1.0) * eg.vectors(u + e, i).real();
            raw.push_back(std::move(v));
        }
    }

    NullspaceResult out;
    out.basis = orthonormal_basis(raw, tol);
    for (const auto& b : out.basis) out.max_residual = std::max(out.max_residual, residual_of(b));
    return out;
}

SolveResult ConstraintBuilder::solve(const Tolerance& tol) const {
    tol.validate();
    const std::size_t u = t_rows_ * t_cols_;

    EigResult eg = conjugating_ ? eig_symmetric(gram_) : eig_hermitian(gram_);
    const double lam_max = eg.values.empty() ? 0.0 : std::max(eg.values.back(), 0.0);
    const double cutoff = tol.rank_rel * std::max(lam_max, scale_);

    Matrix y = matmul_AhB(eg.vectors, rhs_);
    std::size_t nullity = 0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        const double lam = eg.values[i];
        if (lam > cutoff && lam > 0.0) {
            y(i, 0) *= 1.0 / lam;
        } else {
            y(i, 0) = 0.0;
            ++nullity;
        }
    }
    Matrix x = eg.vectors * y;

    SolveResult out;
    if (!conjugating_) {
        out.solution = unvec(x, t_rows_, t_cols_);
    } else {
        out.solution = Matrix(t_rows_, t_cols_);
        for (std::size_t e = 0; e < u; ++e)
            out.solution.data()[e] =
                cplx(x(e, 0).real(), x(u + e, 0).real());
    }
    out.nullity = nullity; // real dimension count in a realified system
    out.residual = residual_of(out.solution);
    return out;
}

} // namespace cstar
