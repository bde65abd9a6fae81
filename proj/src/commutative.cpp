#include "cstar/commutative.hpp"

#include <algorithm>
#include <cmath>

namespace cstar {

DiscreteBase discrete_base(const std::vector<double>& weights, const Tolerance& tol) {
    if (weights.empty()) fail(Err::Input, "base space must be nonempty");
    for (double w : weights)
        if (!(w > 0.0)) fail(Err::NonFaithful, "base weights must be strictly positive");
    const std::size_t n = weights.size();
    std::vector<Matrix> diag_units;
    for (std::size_t z = 0; z < n; ++z) diag_units.push_back(Matrix::unit(n, n, z, z));
    ConcreteAlgebra diag = ConcreteAlgebra::from_space(OperatorSpace::span(n, n, diag_units, tol), tol);
    DiscreteBase out;
    out.weights = weights;
    out.base = make_base(n, diag, diag, tol);
    return out;
}

CStarModule bundle_module(const DiscreteBase& dbase, const Bundle& bundle, const Tolerance& tol) {
    if (bundle.fiber_dims.size() != dbase.points())
        fail(Err::ShapeMismatch, "one fiber per base point");
    for (auto d : bundle.fiber_dims)
        if (d == 0) fail(Err::Input, "fibers must be nonzero for full support");

    const std::size_t nz = dbase.points();
    const std::size_t total = bundle.total();
    std::vector<std::size_t> offset(nz, 0);
    for (std::size_t z = 1; z < nz; ++z) offset[z] = offset[z - 1] + bundle.fiber_dims[z - 1];

    // weight factors cancel in normalized coordinates: the one-point section
    // of fiber vector e_i at z acts as the matrix unit E_{(z,i), z}
    std::vector<Matrix> gens;
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t i = 0; i < bundle.fiber_dims[z]; ++i)
            gens.push_back(Matrix::unit(total, nz, offset[z] + i, z));
    return make_module(dbase.base, OperatorSpace::span(nz, total, gens, tol), tol);
}

FiberwiseIso fiberwise_rtp_iso(const DiscreteBase& dbase, const Bundle& bh, const Bundle& bk,
                               const Tolerance& tol) {
    FiberwiseIso out;
    CStarModule hm = bundle_module(dbase, bh, tol);
    CStarModule km0 = bundle_module(dbase, bk, tol);
    CStarModule km = make_module(opposite_base(dbase.base), km0.alpha, tol);
    out.rtp = rtp_construct(hm, km, tol);
    const RelativeTensorProduct& r = out.rtp;

    const std::size_t nz = dbase.points();
    std::size_t target_dim = 0;
    std::vector<std::size_t> block_off(nz, 0);
    for (std::size_t z = 0; z < nz; ++z) {
        block_off[z] = target_dim;
        out.block_dims.push_back(bh.fiber_dims[z] * bk.fiber_dims[z]);
        target_dim += out.block_dims.back();
    }

    // generator (z,i) x e_w x (z',i') maps to [z==z'==w] e_i x e_i' in block z
    std::vector<std::size_t> hoff(nz, 0), koff(nz, 0);
    for (std::size_t z = 1; z < nz; ++z) {
        hoff[z] = hoff[z - 1] + bh.fiber_dims[z - 1];
        koff[z] = koff[z - 1] + bk.fiber_dims[z - 1];
    }
    const std::size_t ngen = r.n_left * r.mid_dim * r.n_right;
    Matrix lhs(r.dim, ngen), rhs(target_dim, ngen);
    std::size_t icol = 0;
    for (std::size_t zi = 0, gi = 0; zi < nz; ++zi)
        for (std::size_t i = 0; i < bh.fiber_dims[zi]; ++i, ++gi)
            for (std::size_t w = 0; w < nz; ++w)
                for (std::size_t zj = 0, gj = 0; zj < nz; ++zj)
                    for (std::size_t j = 0; j < bk.fiber_dims[zj]; ++j, ++gj) {
                        const std::size_t g = r.gen_index(gi, w, gj);
                        for (std::size_t c = 0; c < r.dim; ++c) lhs(c, g) = r.coords(g, c);
                        if (zi == zj && zj == w)
                            rhs(block_off[zi] + i * bk.fiber_dims[zi] + j, g) = 1.0;
                        (void)icol;
                    }

    double res = 0.0;
    Matrix ut = lstsq_solve(lhs.transpose(), rhs.transpose(), tol, &res);
    out.u = ut.transpose();
    Report& rep = out.checks;
    rep.add("fiberwise.solve", "commutative.fiberwise_iso", res, tol.residual_abs);
    rep.add_bool("fiberwise.dims", "commutative.fiberwise_dim", r.dim == target_dim,
                 std::to_string(r.dim) + "=" + std::to_string(target_dim));
    rep.add("fiberwise.unitary", "commutative.fiberwise_iso",
            (matmul_AhB(out.u, out.u) - Matrix::identity(r.dim)).norm_f(), tol.residual_abs);
    return out;
}

FiberedModule fibered_module(const DiscreteBase& dbase, const FiberedSpace& fs,
                             const Tolerance& tol) {
    if (fs.fiber_weights.size() != dbase.points())
        fail(Err::ShapeMismatch, "one fiber per base point");
    for (const auto& f : fs.fiber_weights) {
        if (f.empty()) fail(Err::EmptyFiber, "empty fiber violates full support");
        for (double w : f)
            if (!(w > 0.0)) fail(Err::EmptyFiber, "fiber weights must be strictly positive");
    }

    const std::size_t nz = dbase.points();
    const std::size_t nx = fs.total();
    std::vector<std::size_t> off(nz, 0);
    for (std::size_t z = 1; z < nz; ++z) off[z] = off[z - 1] + fs.fiber_weights[z - 1].size();

    FiberedModule out;
    out.dbase = dbase;
    out.fs = fs;
    // j(indicator of point x): entry (x, p(x)) = sqrt(fiber weight at x)
    std::vector<Matrix> gens;
    std::vector<Matrix> funcs;
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t p = 0; p < fs.fiber_weights[z].size(); ++p) {
            Matrix m(nx, nz);
            m(off[z] + p, z) = std::sqrt(fs.fiber_weights[z][p]);
            out.point_embeddings.push_back(m);
            gens.push_back(std::move(m));
            funcs.push_back(Matrix::unit(nx, nx, off[z] + p, off[z] + p));
        }
    out.module = make_module(dbase.base, OperatorSpace::span(nz, nx, gens, tol), tol);
    out.functions = ConcreteAlgebra::from_space(OperatorSpace::span(nx, nx, funcs, tol), tol);
    return out;
}

namespace {

std::vector<std::size_t> fiber_offsets(const FiberedSpace& fs) {
    std::vector<std::size_t> off(fs.fiber_weights.size(), 0);
    for (std::size_t z = 1; z < fs.fiber_weights.size(); ++z)
        off[z] = off[z - 1] + fs.fiber_weights[z - 1].size();
    return off;
}

} // namespace

FiberedUnitary fibered_unitary(const DiscreteBase& dbase, const FiberedModule& fx,
                               const FiberedModule& fy, const Tolerance& tol) {
    FiberedUnitary out;
    CStarModule ky = make_module(opposite_base(dbase.base), fy.module.alpha, tol);
    out.rtp = rtp_construct(fx.module, ky, tol);
    const RelativeTensorProduct& r = out.rtp;

    const std::size_t nz = dbase.points();
    const auto xoff = fiber_offsets(fx.fs);
    const auto yoff = fiber_offsets(fy.fs);

    // flat order of the fibered product: base point, then x, then y
    std::vector<double> pair_weight;
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t p = 0; p < fx.fs.fiber_weights[z].size(); ++p)
            for (std::size_t q = 0; q < fy.fs.fiber_weights[z].size(); ++q) {
                out.pair_points.emplace_back(xoff[z] + p, yoff[z] + q);
                pair_weight.push_back(fx.fs.fiber_weights[z][p] * fy.fs.fiber_weights[z][q]);
            }
    const std::size_t target_dim = out.pair_points.size();

    // The leg bases are the normalized point embeddings, so the generator
    // (x, e_w, y) maps to [p(x)=q(y)=w] e_(x,y): the weights cancel.
    const std::size_t ngen = r.n_left * r.mid_dim * r.n_right;
    Matrix lhs(r.dim, ngen), rhs(target_dim, ngen);
    std::size_t gx = 0;
    for (std::size_t zx = 0; zx < nz; ++zx)
        for (std::size_t p = 0; p < fx.fs.fiber_weights[zx].size(); ++p, ++gx) {
            std::size_t gy = 0;
            for (std::size_t zy = 0; zy < nz; ++zy)
                for (std::size_t q = 0; q < fy.fs.fiber_weights[zy].size(); ++q, ++gy)
                    for (std::size_t w = 0; w < nz; ++w) {
                        const std::size_t g = r.gen_index(gx, w, gy);
                        for (std::size_t c = 0; c < r.dim; ++c) lhs(c, g) = r.coords(g, c);
                        if (zx == zy && zy == w) {
                            // locate the flat pair index
                            std::size_t idx = 0;
                            for (std::size_t z2 = 0; z2 < zx; ++z2)
                                idx += fx.fs.fiber_weights[z2].size() *
                                       fy.fs.fiber_weights[z2].size();
                            idx += p * fy.fs.fiber_weights[zx].size() + q;
                            rhs(idx, g) = 1.0;
                        }
                    }
        }

    double res = 0.0;
    Matrix ut = lstsq_solve(lhs.transpose(), rhs.transpose(), tol, &res);
    out.u = ut.transpose();

    Report& rep = out.checks;
    rep.add("fibered.solve", "commutative.fibered_unitary", res, tol.residual_abs);
    rep.add_bool("fibered.dims", "commutative.fibered_dim", r.dim == target_dim,
                 std::to_string(r.dim) + "=" + std::to_string(target_dim));
    rep.add("fibered.unitary", "commutative.fibered_unitary",
            (matmul_AhB(out.u, out.u) - Matrix::identity(r.dim)).norm_f(), tol.residual_abs);

    // pushforward identity for the point embeddings
    double push = 0.0;
    gx = 0;
    for (std::size_t zx = 0; zx < nz; ++zx)
        for (std::size_t p = 0; p < fx.fs.fiber_weights[zx].size(); ++p, ++gx) {
            for (std::size_t gx2 = 0; gx2 < fx.point_embeddings.size(); ++gx2) {
                Matrix lhs2 = matmul_AhB(fx.point_embeddings[gx], fx.point_embeddings[gx2]);
                Matrix rhs2(nz, nz);
                if (gx == gx2) rhs2(zx, zx) = fx.fs.fiber_weights[zx][p];
                push = std::max(push, (lhs2 - rhs2).norm_f());
            }
        }
    rep.add("fibered.pushforward", "commutative.pushforward_identity", push, tol.residual_abs);

    // multiplication actions are intertwined: functions of x act as
    // multiplication by the pulled-back function on the pairs
    double intertwine = 0.0;
    const std::size_t nx = fx.fs.total();
    for (std::size_t x = 0; x < nx; ++x) {
        Matrix lf = r.left_factor(Matrix::unit(nx, nx, x, x), tol);
        Matrix target(target_dim, target_dim);
        for (std::size_t ppp = 0; ppp < target_dim; ++ppp)
            if (out.pair_points[ppp].first == x) target(ppp, ppp) = 1.0;
        intertwine = std::max(intertwine, (out.u * lf - target * out.u).norm_f());
    }
    const std::size_t ny = fy.fs.total();
    for (std::size_t y = 0; y < ny; ++y) {
        Matrix rf = r.right_factor(Matrix::unit(ny, ny, y, y), tol);
        Matrix target(target_dim, target_dim);
        for (std::size_t ppp = 0; ppp < target_dim; ++ppp)
            if (out.pair_points[ppp].second == y) target(ppp, ppp) = 1.0;
        intertwine = std::max(intertwine, (out.u * rf - target * out.u).norm_f());
    }
    rep.add("fibered.multiplication_intertwined", "commutative.multiplication_intertwined",
            intertwine, tol.residual_abs);
    (void)pair_weight;
    return out;
}

Report fp_commutative_check(const DiscreteBase& dbase, const FiberedModule& fx,
                            const FiberedModule& fy, const Tolerance& tol) {
    Report rep;
    FiberedUnitary fu = fibered_unitary(dbase, fx, fy, tol);
    rep.merge(fu.checks, "unitary");

    CStarModule ky = make_module(opposite_base(dbase.base), fy.module.alpha, tol);
    FiberProduct fp = fiber_product({fx.module, fx.functions}, {ky, fy.functions}, tol);
    rep.merge(fp.checks, "fp");

    std::vector<Matrix> conj;
    for (const auto& t : fp.algebra.basis()) conj.push_back(fu.u * t * fu.u.adjoint());
    const std::size_t n = fu.pair_points.size();
    OperatorSpace collapsed = OperatorSpace::span(n, n, conj, tol);

    std::vector<Matrix> diag;
    for (std::size_t i = 0; i < n; ++i) diag.push_back(Matrix::unit(n, n, i, i));
    OperatorSpace all_functions = OperatorSpace::span(n, n, diag, tol);

    rep.add_bool("fp_commutative.finite_reduction", "commutative.finite_vacuous_conditions", true,
                 "continuity and vanishing conditions are vacuous on finite sets");
    rep.add_bool("fp_commutative.dims", "commutative.function_algebra",
                 collapsed.dim() == all_functions.dim(),
                 std::to_string(collapsed.dim()) + "=" + std::to_string(all_functions.dim()));
    rep.add("fp_commutative.equality", "commutative.function_algebra",
            collapsed.equality_residual(all_functions), tol.residual_abs);
    return rep;
}

} // namespace cstar
