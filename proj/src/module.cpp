#include "cstar/module.hpp"

#include <algorithm>

namespace cstar {

Report check_module(const CStarModule& m, const Tolerance& tol) {
    Report rep;
    const std::size_t k = m.base.k_dim, h = m.h_dim;
    const std::string dims = "k=" + std::to_string(k) + ",h=" + std::to_string(h) +
                             ",alpha=" + std::to_string(m.alpha.dim());

    // [alpha K] = H
    std::vector<Matrix> cols;
    for (const auto& x : m.alpha.basis())
        for (std::size_t j = 0; j < k; ++j) cols.push_back(x.col(j));
    rep.add_bool("module.span", "module.alpha_K_spans_H",
                 orthonormal_basis(cols, tol).size() == h, dims);

    // [alpha B] = alpha
    OperatorSpace ab = space_product(m.alpha, m.base.b.space(), tol);
    rep.add("module.invariance", "module.alpha_B_eq_alpha", ab.equality_residual(m.alpha),
            tol.residual_abs, dims);

    // [alpha* alpha] = B
    OperatorSpace prod = space_product(space_adjoint(m.alpha, tol), m.alpha, tol);
    rep.add("module.inner", "module.alphastar_alpha_eq_B",
            prod.equality_residual(m.base.b.space()), tol.residual_abs, dims);
    return rep;
}

CStarModule make_module(const CStarBase& base, const OperatorSpace& alpha, const Tolerance& tol) {
    if (alpha.dom_dim() != base.k_dim) fail(Err::ShapeMismatch, "module leg domain mismatch");
    CStarModule m{base, alpha.cod_dim(), alpha};
    Report rep = check_module(m, tol);
    if (!rep.pass()) fail(Err::PreconditionFailed, "module axioms fail");
    return m;
}

Matrix rho_of_space(const OperatorSpace& i_space, const Matrix& x, const Tolerance& tol) {
    std::vector<std::pair<Matrix, Matrix>> eqs;
    eqs.reserve(i_space.dim());
    for (const auto& s : i_space.basis()) eqs.emplace_back(s, s * x);
    return solve_intertwiner(eqs, i_space.cod_dim(), i_space.cod_dim(), tol);
}

Matrix rho(const CStarModule& m, const Matrix& x, const Tolerance& tol) {
    if (x.rows() != m.base.k_dim || x.cols() != m.base.k_dim)
        fail(Err::ShapeMismatch, "rho argument must act on the base space");
    if (m.base.b_comm.membership_residual(x) > tol.residual_abs)
        fail(Err::NotInCommutant, "rho argument does not commute with the base algebra");
    return rho_of_space(m.alpha, x, tol);
}

OperatorSpace rho_image(const CStarModule& m, const OperatorSpace& xs, const Tolerance& tol) {
    std::vector<Matrix> img;
    img.reserve(xs.dim());
    for (const auto& x : xs.basis()) img.push_back(rho(m, x, tol));
    return OperatorSpace::span(m.h_dim, m.h_dim, img, tol);
}

Report check_bimodule(const CStarBimodule& m, const Tolerance& tol) {
    Report rep;
    rep.merge(check_module(m.alpha_module(), tol), "alpha");
    rep.merge(check_module(m.beta_module(), tol), "beta");

    OperatorSpace rho_a = rho_image(m.alpha_module(), m.base_a.b.space(), tol);
    OperatorSpace rho_b = rho_image(m.beta_module(), m.base_b.b_dag.space(), tol);

    // [rho_alpha(A) beta] = beta and [rho_beta(B_dag) alpha] = alpha
    rep.add("bimodule.alpha_absorbs",
            "bimodule.rho_alpha_A_beta_eq_beta",
            space_product(rho_a, m.beta, tol).equality_residual(m.beta), tol.residual_abs);
    rep.add("bimodule.beta_absorbs",
            "bimodule.rho_beta_Bdag_alpha_eq_alpha",
            space_product(rho_b, m.alpha, tol).equality_residual(m.alpha), tol.residual_abs);

    double comm = 0.0;
    for (const auto& x : rho_a.basis())
        for (const auto& y : rho_b.basis()) comm = std::max(comm, (x * y - y * x).norm_f());
    rep.add("bimodule.legs_commute", "bimodule.rho_images_commute", comm, tol.residual_abs);
    return rep;
}

CStarBimodule make_bimodule(const CStarBase& base_a, const CStarBase& base_b,
                            const OperatorSpace& alpha, const OperatorSpace& beta,
                            const Tolerance& tol) {
    if (alpha.cod_dim() != beta.cod_dim()) fail(Err::ShapeMismatch, "bimodule legs on one space");
    CStarBimodule m{base_a, base_b, alpha.cod_dim(), alpha, beta};
    Report rep = check_bimodule(m, tol);
    if (!rep.pass()) fail(Err::PreconditionFailed, "bimodule axioms fail");
    return m;
}

CStarBimodule unit_bimodule(const CStarBase& base, const Tolerance& tol) {
    return make_bimodule(base, base, base.b_dag.space(), base.b.space(), tol);
}

MorphismSpace morphism_space(const OperatorSpace& from_leg, const OperatorSpace& to_leg,
                             MorKind kind, const Tolerance& tol) {
    if (from_leg.dom_dim() != to_leg.dom_dim())
        fail(Err::ShapeMismatch, "morphism space legs over different base spaces");
    const std::size_t h = from_leg.cod_dim(), k = to_leg.cod_dim();

    ConstraintBuilder cb(k, h, kind == MorKind::Full);
    for (const auto& xi : from_leg.basis()) cb.mult_right_in_span(xi, to_leg.basis());
    if (kind == MorKind::Full)
        for (const auto& eta : to_leg.basis()) cb.adj_mult_right_in_span(eta, from_leg.basis());

    NullspaceResult ns = cb.nullspace(tol);
    MorphismSpace out;
    out.kind = kind;
    out.space = OperatorSpace::from_orthonormal(h, k, std::move(ns.basis));
    return out;
}

namespace {

std::vector<Matrix> block_injections(const std::vector<std::size_t>& dims) {
    std::size_t total = 0;
    for (std::size_t d : dims) total += d;
    std::vector<Matrix> inj;
    std::size_t off = 0;
    for (std::size_t d : dims) {
        Matrix m(total, d);
        for (std::size_t i = 0; i < d; ++i) m(off + i, i) = 1.0;
        inj.push_back(std::move(m));
        off += d;
    }
    return inj;
}

OperatorSpace summed_leg(const std::vector<const OperatorSpace*>& legs,
                         const std::vector<Matrix>& inj, std::size_t k_dim, std::size_t total,
                         const Tolerance& tol) {
    std::vector<Matrix> gens;
    for (std::size_t p = 0; p < legs.size(); ++p)
        for (const auto& x : legs[p]->basis()) gens.push_back(inj[p] * x);
    return OperatorSpace::span(k_dim, total, gens, tol);
}

} // namespace

ModuleSum direct_sum_modules(const std::vector<CStarModule>& parts, const Tolerance& tol) {
    if (parts.empty()) fail(Err::Input, "direct sum of an empty family");
    const std::size_t k = parts[0].base.k_dim;
    std::vector<std::size_t> dims;
    std::vector<const OperatorSpace*> legs;
    for (const auto& p : parts) {
        if (p.base.k_dim != k) fail(Err::ShapeMismatch, "summands over different bases");
        dims.push_back(p.h_dim);
        legs.push_back(&p.alpha);
    }
    std::size_t total = 0;
    for (std::size_t d : dims) total += d;

    ModuleSum out;
    out.injections = block_injections(dims);
    for (const auto& i : out.injections) out.projections.push_back(i.adjoint());
    out.total = CStarModule{parts[0].base, total,
                            summed_leg(legs, out.injections, k, total, tol)};

    Report& rep = out.checks;
    rep.merge(check_module(out.total, tol), "sum");
    double inj_res = 0.0, proj_res = 0.0, biprod = 0.0;
    Matrix resolution(total, total);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (const auto& x : parts[p].alpha.basis())
            inj_res = std::max(inj_res,
                               out.total.alpha.membership_residual(out.injections[p] * x));
        for (const auto& x : out.total.alpha.basis())
            proj_res = std::max(proj_res,
                                parts[p].alpha.membership_residual(out.projections[p] * x));
        resolution += out.injections[p] * out.projections[p];
        biprod = std::max(
            biprod,
            (out.projections[p] * out.injections[p] - Matrix::identity(dims[p])).norm_f());
    }
    rep.add("sum.injections_are_morphisms", "module.sum_morphisms", inj_res, tol.residual_abs);
    rep.add("sum.projections_are_morphisms", "module.sum_morphisms", proj_res, tol.residual_abs);
    rep.add("sum.biproduct_identity", "module.sum_biproduct",
            (resolution - Matrix::identity(total)).norm_f(), tol.residual_abs);
    rep.add("sum.proj_inj_identity", "module.sum_biproduct", biprod, tol.residual_abs);
    return out;
}

BimoduleSum direct_sum_bimodules(const std::vector<CStarBimodule>& parts, const Tolerance& tol) {
    if (parts.empty()) fail(Err::Input, "direct sum of an empty family");
    std::vector<std::size_t> dims;
    std::vector<const OperatorSpace*> alphas, betas;
    for (const auto& p : parts) {
        dims.push_back(p.h_dim);
        alphas.push_back(&p.alpha);
        betas.push_back(&p.beta);
    }
    std::size_t total = 0;
    for (std::size_t d : dims) total += d;

    BimoduleSum out;
    out.injections = block_injections(dims);
    for (const auto& i : out.injections) out.projections.push_back(i.adjoint());
    out.total = CStarBimodule{
        parts[0].base_a, parts[0].base_b, total,
        summed_leg(alphas, out.injections, parts[0].base_a.k_dim, total, tol),
        summed_leg(betas, out.injections, parts[0].base_b.k_dim, total, tol)};

    Report& rep = out.checks;
    rep.merge(check_bimodule(out.total, tol), "sum");
    double inj_res = 0.0, proj_res = 0.0, biprod = 0.0;
    Matrix resolution(total, total);
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (const auto& x : parts[p].alpha.basis())
            inj_res = std::max(inj_res,
                               out.total.alpha.membership_residual(out.injections[p] * x));
        for (const auto& x : out.total.alpha.basis())
            proj_res = std::max(proj_res,
                                parts[p].alpha.membership_residual(out.projections[p] * x));
        resolution += out.injections[p] * out.projections[p];
        biprod = std::max(biprod, (out.projections[p] * out.injections[p] -
                                   Matrix::identity(dims[p]))
                                      .norm_f());
    }
    rep.add("sum.injections_are_morphisms", "bimodule.sum_morphisms", inj_res, tol.residual_abs);
    rep.add("sum.projections_are_morphisms", "bimodule.sum_morphisms", proj_res, tol.residual_abs);
    rep.add("sum.biproduct_identity", "bimodule.sum_biproduct",
            (resolution - Matrix::identity(total)).norm_f(), tol.residual_abs);
    rep.add("sum.proj_inj_identity", "bimodule.sum_biproduct", biprod, tol.residual_abs);
    return out;
}

OperatorSpace intertwiner_space(const std::vector<std::pair<Matrix, Matrix>>& action_pairs,
                                std::size_t k_dim, std::size_t h_dim, const Tolerance& tol) {
    std::vector<Matrix> acting;
    for (const auto& [a, b] : action_pairs) {
        if (a.rows() != k_dim || a.cols() != k_dim || b.rows() != h_dim || b.cols() != h_dim)
            fail(Err::ShapeMismatch, "intertwiner action pair shapes");
        acting.push_back(b);
    }
    if (!space_acts_nondegenerately(OperatorSpace::span(h_dim, h_dim, acting, tol), tol))
        fail(Err::DegenerateRep, "target action is degenerate");

    ConstraintBuilder cb(h_dim, k_dim, false);
    for (const auto& [a, b] : action_pairs) cb.intertwine(a, b);
    NullspaceResult ns = cb.nullspace(tol);
    return OperatorSpace::from_orthonormal(k_dim, h_dim, std::move(ns.basis));
}

} // namespace cstar
