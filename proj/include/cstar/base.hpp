#pragma once

#include <vector>

#include "cstar/opspace.hpp"
#include "cstar/report.hpp"

namespace cstar {

/// A Hilbert space C^k_dim with two commuting nondegenerate algebras acting
/// on it. Commutants are materialized once and carried along.
struct CStarBase {
    std::size_t k_dim = 0;
    ConcreteAlgebra b;      // principal algebra
    ConcreteAlgebra b_dag;  // its commuting partner
    OperatorSpace b_comm;     // commutant of b in L(K)
    OperatorSpace b_dag_comm; // commutant of b_dag in L(K)
};

/// Verifies commutation and nondegeneracy; throws on violation.
CStarBase make_base(std::size_t k_dim, const ConcreteAlgebra& b, const ConcreteAlgebra& b_dag,
                    const Tolerance& tol);
Report check_base(const CStarBase& base, const Tolerance& tol);

CStarBase trivial_base(const Tolerance& tol);
CStarBase opposite_base(const CStarBase& base);

/// Verification of base equivalence along a user-supplied unitary:
/// Ad_V maps one pair of algebras onto the other.
Report check_base_equivalence(const CStarBase& a, const CStarBase& b, const Matrix& v,
                              const Tolerance& tol);

/// GNS data of a faithful state on a multi-matrix algebra. The antiunitary
/// parts (modular conjugation, opposite GNS map) are stored as matrices that
/// act after entrywise conjugation.
struct GNSData {
    std::size_t algebra_dim = 0;
    std::size_t gns_dim = 0;
    std::vector<Matrix> algebra_basis; // matrix units of the block algebra
    Matrix state_density;              // positive invertible, trace form
    Matrix lambda;                     // algebra basis -> GNS coordinates (gns_dim x algebra_dim)
    std::vector<Matrix> pi;            // left regular representation per basis element
    std::vector<Matrix> pi_op;         // opposite representation per basis element
    Matrix j;                          // modular conjugation, applied after conjugation

    Matrix gns_vector(const Matrix& a, const Tolerance& tol) const; // Lambda(a) coordinates
    Matrix represent(const Matrix& a, const Tolerance& tol) const;      // pi(a)
    Matrix represent_op(const Matrix& a, const Tolerance& tol) const;   // pi_op(a)
    Matrix apply_j(const Matrix& v) const; // J v  (conjugate, then multiply)
};

/// GNS base of the block algebra  ⊕ M_{n_i}  under the faithful state with
/// the given diagonal weights (one per diagonal entry, normalized to sum 1).
std::pair<CStarBase, GNSData> gns_base(const std::vector<std::size_t>& blocks,
                                       const std::vector<double>& weights, const Tolerance& tol);

struct CStarBimodule; // defined in module.hpp

/// Bimodule induced by a faithful conditional expectation onto a unital
/// subalgebra, together with the represented images of the big algebra.
struct CondExpResult {
    CStarBase base;           // GNS base of the subalgebra
    GNSData base_gns;         // GNS data of the state on the subalgebra
    GNSData big_gns;          // GNS data of the composed state on the big algebra
    Matrix zeta;              // isometry from the base GNS space into the big one
    OperatorSpace alpha;      // dagger-side module leg
    OperatorSpace beta;       // plain-side module leg
    ConcreteAlgebra rep;      // represented big algebra
    ConcreteAlgebra rep_op;   // opposite representation of the big algebra
    Report checks;
};

/// phi is given by its matrix in the HS-orthonormal basis of A's space;
/// mu by a density element of the subalgebra (trace form on the ambient space).
CondExpResult conditional_expectation_bimodule(const ConcreteAlgebra& a,
                                               const std::vector<Matrix>& b_gens,
                                               const Matrix& phi_coeffs, const Matrix& mu_density,
                                               const Tolerance& tol);

} // namespace cstar
