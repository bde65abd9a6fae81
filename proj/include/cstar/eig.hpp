#pragma once

#include <vector>

#include "cstar/matrix.hpp"

namespace cstar {

struct EigResult {
    std::vector<double> values; // ascending
    Matrix vectors;             // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. The input is hermitized first
/// so callers may pass Gram matrices with symmetric roundoff drift.
EigResult eig_hermitian(const Matrix& a);

/// Real symmetric eigendecomposition. Imaginary parts of the input are
/// ignored; the returned eigenvector matrix is real-valued.
EigResult eig_symmetric(const Matrix& a);

} // namespace cstar
