#pragma once

#include <vector>

#include "cstar/numeric.hpp"

namespace cstar {

/// A closed subspace of L(C^dom, C^cod), held as an HS-orthonormal basis.
class OperatorSpace {
public:
    OperatorSpace() = default;

    static OperatorSpace span(std::size_t dom, std::size_t cod, const std::vector<Matrix>& gens,
                              const Tolerance& tol);
    /// Pre-orthonormalized family; trusted, no re-orthonormalization.
    static OperatorSpace from_orthonormal(std::size_t dom, std::size_t cod,
                                          std::vector<Matrix> basis);
    static OperatorSpace full(std::size_t dom, std::size_t cod);
    static OperatorSpace zero(std::size_t dom, std::size_t cod);

    std::size_t dom_dim() const { return dom_; }
    std::size_t cod_dim() const { return cod_; }
    std::size_t dim() const { return basis_.size(); }
    const std::vector<Matrix>& basis() const { return basis_; }

    Matrix project(const Matrix& v) const;
    double membership_residual(const Matrix& v) const; // ||v - P v||_HS
    bool contains(const Matrix& v, const Tolerance& tol) const;

    /// Largest membership residual of other's basis in this space. Zero for
    /// an empty other.
    double containment_residual(const OperatorSpace& other) const;
    bool contains_space(const OperatorSpace& other, const Tolerance& tol) const;
    /// Mutual containment at residual_abs.
    bool equals(const OperatorSpace& other, const Tolerance& tol) const;
    /// max of both containment residuals
    double equality_residual(const OperatorSpace& other) const;

private:
    std::size_t dom_ = 0, cod_ = 0;
    std::vector<Matrix> basis_;
};

OperatorSpace space_product(const OperatorSpace& x, const OperatorSpace& y, const Tolerance& tol);
OperatorSpace space_adjoint(const OperatorSpace& x, const Tolerance& tol);
OperatorSpace space_sum(const OperatorSpace& x, const OperatorSpace& y, const Tolerance& tol);
/// Computed as the joint nullspace of both orthogonal-complement projections.
OperatorSpace space_intersection(const OperatorSpace& x, const OperatorSpace& y,
                                 const Tolerance& tol);

/// A *-closed, multiplicatively closed operator subspace of L(C^n).
class ConcreteAlgebra {
public:
    ConcreteAlgebra() = default;

    struct Closure {
        double adjoint_residual = 0.0;
        double product_residual = 0.0;
        bool ok(const Tolerance& tol) const {
            return adjoint_residual <= tol.residual_abs && product_residual <= tol.residual_abs;
        }
    };

    /// Verifies closure under adjoints and products; throws NotClosed on failure.
    static ConcreteAlgebra from_space(const OperatorSpace& space, const Tolerance& tol);
    /// Closure residuals without constructing, for checks where closedness
    /// is a consequence to verify rather than a condition to impose.
    static Closure closure_residuals(const OperatorSpace& space);

    const OperatorSpace& space() const { return space_; }
    std::size_t amb_dim() const { return space_.dom_dim(); }
    std::size_t dim() const { return space_.dim(); }
    bool nondegenerate() const { return nondegenerate_; }
    const std::vector<Matrix>& basis() const { return space_.basis(); }
    bool contains(const Matrix& v, const Tolerance& tol) const { return space_.contains(v, tol); }
    bool contains_id(const Tolerance& tol) const;

private:
    OperatorSpace space_;
    bool nondegenerate_ = false;
};

/// Checks [A C^n] = C^n.
bool space_acts_nondegenerately(const OperatorSpace& space, const Tolerance& tol);

/// Smallest closed *-subalgebra containing the generators (optionally the
/// identity). Iterates span + adjoints + pairwise products to stabilization.
ConcreteAlgebra generated_algebra(const std::vector<Matrix>& generators, bool unital,
                                  const Tolerance& tol);

/// Idealizer {T : TA + AT subset A}; equals the multiplier algebra for
/// nondegenerate finite-dimensional algebras. Throws DegenerateInput.
ConcreteAlgebra multiplier_algebra(const ConcreteAlgebra& a, const Tolerance& tol);

/// Commutant as an OperatorSpace on the same space.
OperatorSpace commutant_space(const std::vector<Matrix>& generators, std::size_t n,
                              const Tolerance& tol);

} // namespace cstar
