#pragma once

#include "cstar/fiber.hpp"

namespace cstar {

/// Finite base space with strictly positive weights. Coordinates absorb the
/// square roots of the weights, so the derived base always carries the
/// standard inner product and the diagonal algebra on both slots.
struct DiscreteBase {
    std::vector<double> weights;
    CStarBase base;

    std::size_t points() const { return weights.size(); }
};
DiscreteBase discrete_base(const std::vector<double>& weights, const Tolerance& tol);

/// Finite family of fibers over the base points.
struct Bundle {
    std::vector<std::size_t> fiber_dims; // all >= 1 for full support
    std::size_t total() const {
        std::size_t t = 0;
        for (auto d : fiber_dims) t += d;
        return t;
    }
};

/// Sections acting by pointwise multiplication: the leg is spanned by the
/// one-point sections of each fiber basis vector.
CStarModule bundle_module(const DiscreteBase& dbase, const Bundle& bundle, const Tolerance& tol);

/// Unitary from the product of two bundle modules onto the blockwise tensor
/// space (fiber-dimension blocks in base-point order).
struct FiberwiseIso {
    RelativeTensorProduct rtp;
    Matrix u;
    std::vector<std::size_t> block_dims; // per point: dh_z * dk_z
    Report checks;
};
FiberwiseIso fiberwise_rtp_iso(const DiscreteBase& dbase, const Bundle& bh, const Bundle& bk,
                               const Tolerance& tol);

/// Finite space fibered over the base points, with strictly positive fiber
/// weights (full support).
struct FiberedSpace {
    std::vector<std::vector<double>> fiber_weights; // per base point, per fiber point
    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& f : fiber_weights) t += f.size();
        return t;
    }
};

/// The multiplication embedding of functions on the fibered space, pulled
/// back along the projection; j(f) h = f (h o p), j(f)* g pushes forward.
struct FiberedModule {
    DiscreteBase dbase;
    FiberedSpace fs;
    CStarModule module;              // L2 of the fibered space over the base
    std::vector<Matrix> point_embeddings; // j(indicator of x) per point of X
    ConcreteAlgebra functions;       // multiplication algebra of all functions
};
FiberedModule fibered_module(const DiscreteBase& dbase, const FiberedSpace& fs,
                             const Tolerance& tol);

/// Unitary from the product of two fibered modules onto L2 of the fibered
/// product space, with points ordered (x, y) within each base point block.
struct FiberedUnitary {
    RelativeTensorProduct rtp;
    Matrix u;
    std::vector<std::pair<std::size_t, std::size_t>> pair_points; // (x, y) flat order
    Report checks;
};
FiberedUnitary fibered_unitary(const DiscreteBase& dbase, const FiberedModule& fx,
                               const FiberedModule& fy, const Tolerance& tol);

/// Conjugated fiber product of the two function algebras versus the full
/// function algebra of the fibered product space (the finite-case target:
/// continuity and vanishing conditions are vacuous on finite sets, which the
/// report text records).
Report fp_commutative_check(const DiscreteBase& dbase, const FiberedModule& fx,
                            const FiberedModule& fy, const Tolerance& tol);

} // namespace cstar
