#include "cstar/eig.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace cstar {

double op_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    EigResult eg = eig_hermitian(matmul_AhB(a, a));
    return std::sqrt(std::max(0.0, eg.values.back()));
}

EigResult eig_hermitian(const Matrix& a) {
    if (a.rows() != a.cols()) fail(Err::ShapeMismatch, "eig_hermitian needs square");
    const std::size_t n = a.rows();
    EigResult out;
    out.vectors = Matrix(n, n);
    if (n == 0) return out;

    using EMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const EMat> m(a.data(), (Eigen::Index)n, (Eigen::Index)n);
    EMat h = 0.5 * (m + m.adjoint());

    Eigen::SelfAdjointEigenSolver<EMat> solver(h);
    if (solver.info() != Eigen::Success) fail(Err::Inconsistent, "eigensolver did not converge");

    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = solver.eigenvalues()((Eigen::Index)i);
    const auto& v = solver.eigenvectors();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.vectors(i, j) = v((Eigen::Index)i, (Eigen::Index)j);
    return out;
}

EigResult eig_symmetric(const Matrix& a) {
    if (a.rows() != a.cols()) fail(Err::ShapeMismatch, "eig_symmetric needs square");
    const std::size_t n = a.rows();
    EigResult out;
    out.vectors = Matrix(n, n);
    if (n == 0) return out;

    Eigen::MatrixXd m((Eigen::Index)n, (Eigen::Index)n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m((Eigen::Index)i, (Eigen::Index)j) = a(i, j).real();
    Eigen::MatrixXd h = 0.5 * (m + m.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) fail(Err::Inconsistent, "eigensolver did not converge");

    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = solver.eigenvalues()((Eigen::Index)i);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.vectors(i, j) = solver.eigenvectors()((Eigen::Index)i, (Eigen::Index)j);
    return out;
}

} // namespace cstar
