#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cstar/matrix.hpp"

namespace cstar {

struct Tolerance {
    double rank_rel = 1e-9;     // relative cutoff for spectral truncation
    double residual_abs = 1e-8; // absolute bound for membership/equality tests

    void validate() const {
        if (!(rank_rel > 0.0 && rank_rel < 1.0))
            fail(Err::InvalidTolerance, "rank_rel must lie in (0,1)");
        if (!(residual_abs > 0.0 && residual_abs < 1.0))
            fail(Err::InvalidTolerance, "residual_abs must lie in (0,1)");
    }
};

struct GramCompletion {
    std::size_t input_count = 0;
    std::size_t out_dim = 0;
    Matrix coords; // input_count x out_dim, coords * coords^H reproduces the Gram matrix
};

/// Separated completion of a finite family with the given Gram matrix:
/// eigendecompose, keep eigenvalues above rank_rel * lambda_max, coordinates
/// are eigvecs * sqrt(lambda). Throws NotPSD when the spectrum dips below
/// -residual_abs.
GramCompletion gram_completion(const Matrix& gram, const Tolerance& tol);

/// Modified Gram-Schmidt in input order with one re-orthogonalization pass.
/// Vectors whose residual norm is <= rank_rel * (max input norm) are dropped.
/// Orthonormal under the HS inner product.
std::vector<Matrix> orthonormal_basis(const std::vector<Matrix>& vectors, const Tolerance& tol);

/// Orthonormal basis of {T : Ta = aT for all generators}. Empty generator set
/// yields the full matrix-unit basis of L(C^n).
std::vector<Matrix> commutant(const std::vector<Matrix>& generators, std::size_t n,
                              const Tolerance& tol);

struct SolveOptions {
    bool require_unique = true;
};

/// Least-squares solution of T*L_i = R_i with certified residual. Throws
/// Inconsistent when the residual exceeds residual_abs, Underdetermined when
/// uniqueness is requested but the solution space has positive dimension.
Matrix solve_intertwiner(const std::vector<std::pair<Matrix, Matrix>>& constraints,
                         std::size_t t_rows, std::size_t t_cols, const Tolerance& tol,
                         SolveOptions opts = {});

/// Min-norm least squares A*X = B via the Gram spectrum of A.
Matrix lstsq_solve(const Matrix& a, const Matrix& b, const Tolerance& tol,
                   double* residual = nullptr);

struct NullspaceResult {
    std::vector<Matrix> basis; // HS-orthonormal
    double max_residual = 0.0; // certified directly against the constraints
};

struct SolveResult {
    Matrix solution;
    double residual = 0.0;
    std::size_t nullity = 0;
};

/// Linear constraint systems on an unknown matrix T. In conjugating mode the
/// system is realified (split into real and imaginary parts) so that
/// constraints on T^* stay linear; otherwise it is kept complex.
class ConstraintBuilder {
public:
    ConstraintBuilder(std::size_t t_rows, std::size_t t_cols, bool conjugating = false);

    void mult_right_equals(const Matrix& l, const Matrix& r); // T L = R
    void mult_left_equals(const Matrix& a, const Matrix& r);  // A T = R
    void commute_with(const Matrix& a);                       // T a = a T
    void intertwine(const Matrix& a, const Matrix& b);        // T a = b T
    /// (1 - P)(T L) = 0 where P projects onto the HS-orthonormal family.
    void mult_right_in_span(const Matrix& l, const std::vector<Matrix>& onb);
    /// (1 - P)(A T) = 0.
    void mult_left_in_span(const Matrix& a, const std::vector<Matrix>& onb);
    /// (1 - P)(T^* L) = 0; requires conjugating mode and square T.
    void adj_mult_right_in_span(const Matrix& l, const std::vector<Matrix>& onb);

    NullspaceResult nullspace(const Tolerance& tol) const;
    SolveResult solve(const Tolerance& tol) const;

    std::size_t unknowns() const { return t_rows_ * t_cols_; }
    std::size_t rows_appended() const { return rows_; }

    /// Largest violation of all appended constraints, evaluated directly on T.
    double residual_of(const Matrix& t) const;

private:
    struct Block; // descriptor for direct residual evaluation

    void append_complex_block(const Matrix& rows, bool over_conj, const Matrix& rhs,
                              double data_scale);

    std::size_t t_rows_, t_cols_;
    bool conjugating_;
    std::size_t rows_ = 0;
    Matrix gram_;   // normal-equation Gram (complex, or realified stored as real-valued)
    Matrix rhs_;    // accumulated M^H b
    double rhs_sq_ = 0.0;
    double scale_ = 0.0; // squared norm of the defining data; floors the spectral cutoff
    std::vector<Block> blocks_;
};

struct ConstraintBuilder::Block {
    enum class Kind { MultRightEq, MultLeftEq, Intertwine, RightInSpan, LeftInSpan, AdjRightInSpan };
    Kind kind;
    Matrix l, r;
    std::vector<Matrix> onb;
};

} // namespace cstar
