#pragma once

#include "cstar/base.hpp"

namespace cstar {

/// Module leg over a base: a closed subspace of L(K, H) with
/// [alpha K] = H, [alpha B] = alpha, [alpha* alpha] = B.
struct CStarModule {
    CStarBase base;
    std::size_t h_dim = 0;
    OperatorSpace alpha; // maps K -> H
};

Report check_module(const CStarModule& m, const Tolerance& tol);
/// Verifying constructor; throws PreconditionFailed if an axiom fails.
CStarModule make_module(const CStarBase& base, const OperatorSpace& alpha, const Tolerance& tol);

/// The induced representation on H of elements commuting with the base
/// algebra: the unique R with R xi = xi x for all xi in the module space.
Matrix rho(const CStarModule& m, const Matrix& x, const Tolerance& tol);
/// rho applied to every element of a family, as an OperatorSpace on H.
OperatorSpace rho_image(const CStarModule& m, const OperatorSpace& xs, const Tolerance& tol);

/// rho for a general closed span I of maps H -> K with [I H] = K:
/// the unique R on K with R S = S x for all S in I.
Matrix rho_of_space(const OperatorSpace& i_space, const Matrix& x, const Tolerance& tol);

/// Two-sided module: alpha over the opposite of base_a, beta over base_b,
/// with each leg absorbing the other side's induced representation.
struct CStarBimodule {
    CStarBase base_a;
    CStarBase base_b;
    std::size_t h_dim = 0;
    OperatorSpace alpha;
    OperatorSpace beta;

    CStarModule alpha_module() const { return {opposite_base(base_a), h_dim, alpha}; }
    CStarModule beta_module() const { return {base_b, h_dim, beta}; }
};

Report check_bimodule(const CStarBimodule& m, const Tolerance& tol);
CStarBimodule make_bimodule(const CStarBase& base_a, const CStarBase& base_b,
                            const OperatorSpace& alpha, const OperatorSpace& beta,
                            const Tolerance& tol);

/// The unit bimodule of a base: the base space with the dagger algebra as
/// left leg and the principal algebra as right leg.
CStarBimodule unit_bimodule(const CStarBase& base, const Tolerance& tol);

enum class MorKind { Semi, Full };

struct MorphismSpace {
    MorKind kind = MorKind::Semi;
    OperatorSpace space; // maps H -> K
};

/// {T : T alpha in beta} (semi) or additionally T* beta in alpha (full).
MorphismSpace morphism_space(const OperatorSpace& from_leg, const OperatorSpace& to_leg,
                             MorKind kind, const Tolerance& tol);

struct ModuleSum {
    CStarModule total;
    std::vector<Matrix> injections;  // H_j -> H
    std::vector<Matrix> projections; // H -> H_j
    Report checks;
};
ModuleSum direct_sum_modules(const std::vector<CStarModule>& parts, const Tolerance& tol);

struct BimoduleSum {
    CStarBimodule total;
    std::vector<Matrix> injections;
    std::vector<Matrix> projections;
    Report checks;
};
BimoduleSum direct_sum_bimodules(const std::vector<CStarBimodule>& parts, const Tolerance& tol);

/// {T : T a_i = b_i T} for matched action pairs (a_i on K, b_i on H).
/// Throws DegenerateRep when the b-side action is degenerate.
OperatorSpace intertwiner_space(const std::vector<std::pair<Matrix, Matrix>>& action_pairs,
                                std::size_t k_dim, std::size_t h_dim, const Tolerance& tol);

} // namespace cstar
