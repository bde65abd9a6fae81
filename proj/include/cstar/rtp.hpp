#pragma once

#include "cstar/module.hpp"

namespace cstar {

/// The completed span of triples (xi, zeta, eta) with
/// <xi . zeta . eta | xi' . zeta' . eta'> = <zeta | xi*xi' eta*eta' zeta'>,
/// realized through coordinates from the Gram completion. Generators are
/// indexed over fixed orthonormal bases of the two legs and the standard
/// basis of the middle space; all structure maps below are explicit matrices
/// in these coordinates.
struct RelativeTensorProduct {
    CStarModule left;  // H with leg over the base
    CStarModule right; // K with leg over the opposite base
    std::size_t dim = 0;
    std::size_t n_left = 0, mid_dim = 0, n_right = 0;
    Matrix coords; // (n_left*mid_dim*n_right) x dim
    double gram_residual = 0.0; // max entrywise defect of the reproduced Gram matrix

    std::vector<Matrix> ket1; // per left-leg basis element: K -> rtp
    std::vector<Matrix> ket2; // per right-leg basis element: H -> rtp
    std::vector<Matrix> rho_dag_left; // induced action of b_dag basis on H
    std::vector<Matrix> rho_b_right;  // induced action of b basis on K

    std::size_t gen_index(std::size_t i, std::size_t k, std::size_t j) const {
        return (i * mid_dim + k) * n_right + j;
    }
    Matrix gen_coord(std::size_t i, std::size_t k, std::size_t j) const;

    /// Insertion operators for arbitrary leg elements (membership checked).
    Matrix ketbra1(const Matrix& xi, const Tolerance& tol) const;
    Matrix ketbra2(const Matrix& eta, const Tolerance& tol) const;

    /// S acting on the left slot; S must commute with the induced b_dag action.
    Matrix left_factor(const Matrix& s, const Tolerance& tol) const;
    /// T acting on the right slot; T must commute with the induced b action.
    Matrix right_factor(const Matrix& t, const Tolerance& tol) const;

    // expansion maps (columns b_i e_k resp. g_j e_k) and their pseudoinverses
    Matrix expand_left, expand_left_pinv;
    Matrix expand_right, expand_right_pinv;
};

RelativeTensorProduct rtp_construct(const CStarModule& h_mod, const CStarModule& k_mod,
                                    const Tolerance& tol);

enum class TensorCase { SemiLeft, SemiRight, Commuting };

/// S tensor T on the product space; the requested case's precondition is
/// verified, and commutation of the two factors is asserted post hoc.
Matrix op_tensor(const RelativeTensorProduct& r, const Matrix& s, const Matrix& t, TensorCase c,
                 const Tolerance& tol);

/// S tensor T between two product spaces for leg-compatible S, T
/// (S maps the left leg into the left leg, T the right into the right).
Matrix morphism_tensor(const RelativeTensorProduct& src, const RelativeTensorProduct& dst,
                       const Matrix& s, const Matrix& t, const Tolerance& tol);

/// Product of bimodules: the product space carries legs
/// alpha <| gamma = [ket2 alpha] and beta |> delta = [ket1 delta].
struct RtpBimodule {
    CStarBimodule bimod;
    RelativeTensorProduct rtp;
    Report checks;
};
RtpBimodule rtp_bimodule(const CStarBimodule& h, const CStarBimodule& k, const Tolerance& tol);

struct AssocResult {
    RelativeTensorProduct r12, r23;
    RtpBimodule left_nested;  // (H x K) x L
    RtpBimodule right_nested; // H x (K x L)
    Matrix a;                 // unitary from left_nested to right_nested space
    Report checks;
};
AssocResult assoc_iso(const CStarBimodule& h, const CStarBimodule& k, const CStarBimodule& l,
                      const Tolerance& tol);

struct UnitIso {
    RtpBimodule prod; // H x U resp. U x K
    Matrix u;         // unitary onto H resp. K
    Report checks;
};
UnitIso unit_r(const CStarBimodule& h, const Tolerance& tol);
UnitIso unit_l(const CStarBimodule& k, const Tolerance& tol);

struct FlipResult {
    RelativeTensorProduct flipped;
    Matrix sigma; // unitary, a generator permutation in coordinates
    Report checks;
};
FlipResult flip_sigma(const RelativeTensorProduct& r, const Tolerance& tol);

/// Mutually inverse isometries between the sum of componentwise products and
/// the product of the sums.
struct SumCompat {
    std::vector<RelativeTensorProduct> components; // row-major over (i,j)
    RtpBimodule big;
    Matrix to_big;   // direct sum of components -> big product space
    Matrix to_parts; // inverse direction
    Report checks;
};
SumCompat direct_sum_compat(const std::vector<CStarBimodule>& hs,
                            const std::vector<CStarBimodule>& ks, const Tolerance& tol);

/// Checks that two bases coincide as represented triples (same space, equal
/// algebra spans).
bool same_base(const CStarBase& x, const CStarBase& y, const Tolerance& tol);

} // namespace cstar
