#pragma once

#include "cstar/rtp.hpp"

namespace cstar {

/// An algebra represented on a module: the leg's induced base action must
/// multiply the algebra into itself.
struct RepresentedAlgebra {
    CStarModule module;
    ConcreteAlgebra algebra;
};

Report check_rep_algebra(const RepresentedAlgebra& a, const Tolerance& tol);

/// Operators T on the codomain of I with T I + T^* I inside [I A].
struct IndResult {
    OperatorSpace i_space;
    OperatorSpace target; // [I A]
    ConcreteAlgebra algebra;
    Report checks;
};
IndResult ind(const OperatorSpace& i_space, const ConcreteAlgebra& a, const Tolerance& tol);

struct FiberProduct {
    RelativeTensorProduct rtp;
    OperatorSpace ket1_space, ket2_space;   // insertion operator spans
    OperatorSpace ket1_target, ket2_target; // [ket1 B], [ket2 A]
    ConcreteAlgebra algebra;
    Report checks;
};

/// a over the base, b over the opposite base.
FiberProduct fiber_product(const RepresentedAlgebra& a, const RepresentedAlgebra& b,
                           const Tolerance& tol);

/// Fiber product of bimodule-represented algebras, with absorption of the
/// outer induced actions verified on the product legs.
struct FiberBimodule {
    FiberProduct fp;
    RtpBimodule legs;
    Report checks;
};
FiberBimodule fiber_bimodule(const CStarBimodule& h, const ConcreteAlgebra& a_alg,
                             const CStarBimodule& k, const ConcreteAlgebra& b_alg,
                             const Tolerance& tol);

/// The eight structural properties of the fiber product (compressions,
/// minimal tensor inclusion, nondegeneracy transfer, identity membership,
/// commutant bounds). Items needing bimodule legs are skipped unless given.
Report check_fiber_properties(const RepresentedAlgebra& a, const RepresentedAlgebra& b,
                              const FiberProduct& fp, const Tolerance& tol);

/// Commutant-route comparison: the fiber product must equal
/// (A' x Id)' n (Id x B')' as subspaces (all closures coincide here).
Report sauvageot_crosscheck(const RepresentedAlgebra& a, const RepresentedAlgebra& b,
                            const FiberProduct& fp, const Tolerance& tol);

/// A verified (semi-)morphism of represented algebras: a *-homomorphism
/// given by images of the algebra basis, whose intertwiner space generates
/// the target leg from the source leg.
struct AlgebraMorphism {
    std::vector<Matrix> images;
    OperatorSpace intertwiners;
    MorKind kind = MorKind::Full;
    Report checks;

    Matrix apply(const ConcreteAlgebra& dom, const Matrix& x, const Tolerance& tol) const;
};
AlgebraMorphism algebra_morphism(const RepresentedAlgebra& from, const RepresentedAlgebra& to,
                                 const std::vector<Matrix>& images, MorKind kind,
                                 const Tolerance& tol);

/// Linear map between operator subspaces, stored by its coefficient matrix
/// on the orthonormal bases.
struct SpaceMap {
    OperatorSpace src, dst;
    Matrix coeff; // dst coordinates of the image of each src basis element

    Matrix apply(const Matrix& v, const Tolerance& tol) const;
};

/// The homomorphism induced on product spaces by tensoring a morphism's
/// intertwiners with the identity, together with the insertion-space map it
/// restricts to (a contraction).
struct InducedHom {
    RelativeTensorProduct src_rtp; // H x K
    RelativeTensorProduct dst_rtp; // L x K
    std::vector<Matrix> i_family;  // T_n tensor Id
    SpaceMap j_map;                // [ket2 A] -> [ket2 C]
    Report checks;

    Matrix apply(const Matrix& x, const Tolerance& tol) const; // rho_I(x)
};
InducedHom induced_hom(const RepresentedAlgebra& a, const RepresentedAlgebra& c,
                       const AlgebraMorphism& phi, const CStarModule& k_mod,
                       const Tolerance& tol);

/// (phi * psi)(x), computed through one composition order and cross-checked
/// against the other; both must agree within residual_abs.
struct FiberMorphismResult {
    Matrix value;
    double order_disagreement = 0.0;
    Report checks;
};
FiberMorphismResult fiber_morphism(const RepresentedAlgebra& a, const RepresentedAlgebra& b,
                                   const RepresentedAlgebra& c, const RepresentedAlgebra& d,
                                   const AlgebraMorphism& phi, const AlgebraMorphism& psi,
                                   const Matrix& x, const Tolerance& tol);

/// Kraus decomposition from a Choi matrix; throws NotCP below -residual_abs.
std::vector<Matrix> kraus_from_choi(const Matrix& choi, std::size_t dim_in, std::size_t dim_out,
                                    const Tolerance& tol);

/// Slice extension of a completely positive map along the right leg. The
/// result acts on the completion of (target space x right leg) under the
/// composed-action inner product.
struct SliceCp {
    std::size_t out_dim = 0;
    Matrix coords; // conjugated-row convention as in the product space
    Matrix value;
    Report checks;
};
SliceCp slice_cp(const std::vector<Matrix>& kraus, const RepresentedAlgebra& a,
                 const RelativeTensorProduct& r, const Matrix& x, std::size_t l_dim,
                 const Tolerance& tol);

/// Slice extension of a spatially implemented map phi(y) = sum S_n^* y T_n
/// with S_n, T_n morphisms from the auxiliary module into the left module.
struct SliceSpatial {
    RelativeTensorProduct dst;
    Matrix value;
    Report checks;
};
SliceSpatial slice_spatial(const std::vector<Matrix>& s_fam, const std::vector<Matrix>& t_fam,
                           const CStarModule& l_mod, const RepresentedAlgebra& a,
                           const RepresentedAlgebra& b, const FiberProduct& fp, const Matrix& x,
                           const Tolerance& tol, const ConcreteAlgebra* c_alg = nullptr);

/// Unit collapse along the right unit map: conjugating the fiber product
/// with the base's dagger algebra recovers A n L(H_beta), and the base-only
/// instance recovers the intersection of the two multiplier algebras.
Report unitality_check(const RepresentedAlgebra& a, const Tolerance& tol);

/// Associativity comparison under the canonical rebracketing unitary;
/// reports containments in both directions, asserts nothing.
Report assoc_compare(const CStarBimodule& h, const ConcreteAlgebra& a_alg,
                     const CStarBimodule& k, const ConcreteAlgebra& b_alg,
                     const CStarBimodule& l, const ConcreteAlgebra& c_alg, const Tolerance& tol);

/// Mutually inverse maps between the sum of componentwise fiber products and
/// the fiber product of the sums.
struct AlgebraSumCompat {
    std::vector<FiberProduct> components; // row-major over (i,j)
    FiberProduct big;
    std::vector<Matrix> embeddings; // component space -> big space isometries
    Report checks;
};
AlgebraSumCompat algebra_direct_sum(const std::vector<RepresentedAlgebra>& as,
                                    const std::vector<RepresentedAlgebra>& bs,
                                    const Tolerance& tol);

} // namespace cstar
