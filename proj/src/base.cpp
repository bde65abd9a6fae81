#include "cstar/base.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "cstar/eig.hpp"

namespace cstar {

CStarBase make_base(std::size_t k_dim, const ConcreteAlgebra& b, const ConcreteAlgebra& b_dag,
                    const Tolerance& tol) {
    if (b.amb_dim() != k_dim || b_dag.amb_dim() != k_dim)
        fail(Err::ShapeMismatch, "base algebras must act on C^k_dim");
    for (const auto& x : b.basis())
        for (const auto& y : b_dag.basis())
            if ((x * y - y * x).norm_f() > tol.residual_abs)
                fail(Err::PreconditionFailed, "base algebras do not commute");
    if (!b.nondegenerate() || !b_dag.nondegenerate())
        fail(Err::PreconditionFailed, "base algebras must act nondegenerately");

    CStarBase base;
    base.k_dim = k_dim;
    base.b = b;
    base.b_dag = b_dag;
    base.b_comm = commutant_space(b.basis(), k_dim, tol);
    base.b_dag_comm = commutant_space(b_dag.basis(), k_dim, tol);
    return base;
}

Report check_base(const CStarBase& base, const Tolerance& tol) {
    Report rep;
    double comm = 0.0;
    for (const auto& x : base.b.basis())
        for (const auto& y : base.b_dag.basis())
            comm = std::max(comm, (x * y - y * x).norm_f());
    rep.add("base.commutation", "base.commuting_algebras", comm, tol.residual_abs,
            "k=" + std::to_string(base.k_dim));
    rep.add_bool("base.b_nondegenerate", "base.nondegenerate", base.b.nondegenerate());
    rep.add_bool("base.b_dag_nondegenerate", "base.nondegenerate", base.b_dag.nondegenerate());

    const auto cb = ConcreteAlgebra::closure_residuals(base.b.space());
    rep.add("base.b_star_closed", "algebra.star_closed", cb.adjoint_residual, tol.residual_abs);
    rep.add("base.b_mult_closed", "algebra.mult_closed", cb.product_residual, tol.residual_abs);
    const auto cd = ConcreteAlgebra::closure_residuals(base.b_dag.space());
    rep.add("base.b_dag_star_closed", "algebra.star_closed", cd.adjoint_residual, tol.residual_abs);
    rep.add("base.b_dag_mult_closed", "algebra.mult_closed", cd.product_residual, tol.residual_abs);
    return rep;
}

CStarBase trivial_base(const Tolerance& tol) {
    ConcreteAlgebra c = generated_algebra({}, true, tol);
    return make_base(1, c, c, tol);
}

CStarBase opposite_base(const CStarBase& base) {
    CStarBase opp;
    opp.k_dim = base.k_dim;
    opp.b = base.b_dag;
    opp.b_dag = base.b;
    opp.b_comm = base.b_dag_comm;
    opp.b_dag_comm = base.b_comm;
    return opp;
}

Report check_base_equivalence(const CStarBase& a, const CStarBase& b, const Matrix& v,
                              const Tolerance& tol) {
    Report rep;
    if (v.rows() != b.k_dim || v.cols() != a.k_dim) {
        rep.add_bool("base_equiv.shape", "base.equivalent", false);
        return rep;
    }
    rep.add("base_equiv.unitary", "base.equivalent",
            (matmul_AhB(v, v) - Matrix::identity(a.k_dim)).norm_f(), tol.residual_abs);

    auto ad = [&](const OperatorSpace& s) {
        std::vector<Matrix> out;
        for (const auto& x : s.basis()) out.push_back(matmul_ABh(v * x, v));
        return OperatorSpace::span(b.k_dim, b.k_dim, out, tol);
    };
    rep.add("base_equiv.b", "base.equivalent", ad(a.b.space()).equality_residual(b.b.space()),
            tol.residual_abs);
    rep.add("base_equiv.b_dag", "base.equivalent",
            ad(a.b_dag.space()).equality_residual(b.b_dag.space()), tol.residual_abs);
    return rep;
}

// ---------------------------------------------------------------------------
// GNS construction from a faithful state

Matrix GNSData::gns_vector(const Matrix& a, const Tolerance& tol) const {
    Matrix v(gns_dim, 1);
    Matrix rem = a;
    for (std::size_t t = 0; t < algebra_basis.size(); ++t) {
        const cplx c = hs_inner(algebra_basis[t], a);
        rem -= c * algebra_basis[t];
        for (std::size_t i = 0; i < gns_dim; ++i) v(i, 0) += c * lambda(i, t);
    }
    if (rem.norm_f() > tol.residual_abs) fail(Err::NotInSpace, "element outside the algebra span");
    return v;
}

namespace {

Matrix expand_and_combine(const std::vector<Matrix>& basis, const std::vector<Matrix>& images,
                          const Matrix& a, const Tolerance& tol, const char* what) {
    Matrix out(images.empty() ? 0 : images[0].rows(), images.empty() ? 0 : images[0].cols());
    Matrix rem = a;
    for (std::size_t t = 0; t < basis.size(); ++t) {
        const cplx c = hs_inner(basis[t], a);
        rem -= c * basis[t];
        out += c * images[t];
    }
    if (rem.norm_f() > tol.residual_abs) fail(Err::NotInSpace, what);
    return out;
}

} // namespace

Matrix GNSData::represent(const Matrix& a, const Tolerance& tol) const {
    return expand_and_combine(algebra_basis, pi, a, tol, "element outside the algebra span");
}

Matrix GNSData::represent_op(const Matrix& a, const Tolerance& tol) const {
    return expand_and_combine(algebra_basis, pi_op, a, tol, "element outside the algebra span");
}

Matrix GNSData::apply_j(const Matrix& v) const { return j * v.conjugate(); }

namespace {

/// GNS data of a state on the span of an HS-orthonormal *-closed family.
GNSData gns_from_state(const std::vector<Matrix>& alg_basis, const Matrix& density,
                       const std::function<cplx(const Matrix&)>& state, const Tolerance& tol) {
    const std::size_t ad = alg_basis.size();
    GNSData g;
    g.algebra_dim = ad;
    g.algebra_basis = alg_basis;
    g.state_density = density;

    Matrix gram(ad, ad);
    for (std::size_t r = 0; r < ad; ++r)
        for (std::size_t s = 0; s < ad; ++s)
            gram(r, s) = state(matmul_AhB(alg_basis[r], alg_basis[s]));
    GramCompletion gc = gram_completion(gram.hermitized(), tol);
    if (gc.out_dim != ad) fail(Err::NonFaithful, "state is not faithful on the algebra");
    g.gns_dim = gc.out_dim;

    // Conjugated completion rows are the GNS coordinate vectors: standard
    // inner products of them reproduce mu(a* b) with the right linearity.
    const Matrix coords = gc.coords.conjugate(); // ad x gns_dim, row t = Lambda(f_t)
    g.lambda = coords.transpose();               // column t = Lambda(f_t)

    // pi(f_t): pi(f_t) Lambda(f_s) = Lambda(f_t f_s)
    for (std::size_t t = 0; t < ad; ++t) {
        Matrix prod_coords(ad, g.gns_dim);
        for (std::size_t s = 0; s < ad; ++s) {
            const Matrix p = alg_basis[t] * alg_basis[s];
            Matrix rem = p;
            for (std::size_t r = 0; r < ad; ++r) {
                const cplx c = hs_inner(alg_basis[r], p);
                rem -= c * alg_basis[r];
                for (std::size_t col = 0; col < g.gns_dim; ++col)
                    prod_coords(s, col) += c * coords(r, col);
            }
            if (rem.norm_f() > tol.residual_abs)
                fail(Err::NotClosed, "family is not multiplicatively closed");
        }
        double res = 0.0;
        Matrix pit_t = lstsq_solve(coords, prod_coords, tol, &res); // coords * pi^T = prod
        if (res > tol.residual_abs) fail(Err::Inconsistent, "representation solve");
        g.pi.push_back(pit_t.transpose());
    }

    // modular conjugation from the polar part of Lambda(a) -> Lambda(a*)
    Matrix adj_coords(ad, g.gns_dim);
    for (std::size_t s = 0; s < ad; ++s) {
        const Matrix a_star = alg_basis[s].adjoint();
        Matrix rem = a_star;
        for (std::size_t r = 0; r < ad; ++r) {
            const cplx c = hs_inner(alg_basis[r], a_star);
            rem -= c * alg_basis[r];
            for (std::size_t col = 0; col < g.gns_dim; ++col)
                adj_coords(s, col) += c * coords(r, col);
        }
        if (rem.norm_f() > tol.residual_abs) fail(Err::NotClosed, "family is not *-closed");
    }
    double sres = 0.0;
    // S_mat conj(Lambda(f_s)) = Lambda(f_s^*):  conj(coords) * S^T = adj_coords
    Matrix s_t = lstsq_solve(coords.conjugate(), adj_coords, tol, &sres);
    if (sres > tol.residual_abs) fail(Err::Inconsistent, "modular involution solve");
    const Matrix s_mat = s_t.transpose();

    const Matrix delta = (s_t * s_mat.conjugate()).hermitized(); // S^T conj(S)
    EigResult ed = eig_hermitian(delta);
    if (ed.values.front() <= 0.0) fail(Err::NonFaithful, "modular operator is singular");
    Matrix inv_sqrt(g.gns_dim, g.gns_dim);
    for (std::size_t c = 0; c < g.gns_dim; ++c) {
        const double s = 1.0 / std::sqrt(ed.values[c]);
        for (std::size_t i = 0; i < g.gns_dim; ++i) inv_sqrt(i, c) = s * ed.vectors(i, c);
    }
    const Matrix delta_inv_half = matmul_ABh(inv_sqrt, ed.vectors);
    g.j = s_mat * delta_inv_half.conjugate();

    for (const auto& p : g.pi) g.pi_op.push_back(g.j * p.transpose() * g.j.conjugate());
    return g;
}

} // namespace

std::pair<CStarBase, GNSData> gns_base(const std::vector<std::size_t>& blocks,
                                       const std::vector<double>& weights, const Tolerance& tol) {
    std::size_t amb = 0;
    for (std::size_t n : blocks) {
        if (n == 0) fail(Err::Input, "zero block size");
        amb += n;
    }
    if (weights.size() != amb) fail(Err::Input, "need one weight per diagonal entry");
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) fail(Err::NonFaithful, "state weights must be strictly positive");
        wsum += w;
    }

    std::vector<cplx> wnorm(amb);
    for (std::size_t i = 0; i < amb; ++i) wnorm[i] = weights[i] / wsum;
    const Matrix density = Matrix::diag(wnorm);

    // matrix units per block, deterministic order
    std::vector<Matrix> units;
    std::size_t off = 0;
    for (std::size_t n : blocks) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                units.push_back(Matrix::unit(amb, amb, off + i, off + j));
        off += n;
    }

    GNSData g = gns_from_state(
        units, density, [&](const Matrix& a) { return (density * a).trace(); }, tol);

    OperatorSpace b_space = OperatorSpace::span(g.gns_dim, g.gns_dim, g.pi, tol);
    OperatorSpace bd_space = OperatorSpace::span(g.gns_dim, g.gns_dim, g.pi_op, tol);
    CStarBase base = make_base(g.gns_dim, ConcreteAlgebra::from_space(b_space, tol),
                               ConcreteAlgebra::from_space(bd_space, tol), tol);
    return {std::move(base), std::move(g)};
}

// ---------------------------------------------------------------------------
// Conditional expectation bimodule

namespace {

Matrix apply_coeff_map(const Matrix& coeffs, const std::vector<Matrix>& basis, const Matrix& x,
                       const Tolerance& tol) {
    // phi(x) where coeffs acts on coordinates in the HS-orthonormal basis
    const std::size_t d = basis.size();
    Matrix cx(d, 1);
    Matrix rem = x;
    for (std::size_t r = 0; r < d; ++r) {
        const cplx c = hs_inner(basis[r], x);
        rem -= c * basis[r];
        cx(r, 0) = c;
    }
    if (rem.norm_f() > tol.residual_abs) fail(Err::NotInSpace, "map argument outside the algebra");
    Matrix cy = coeffs * cx;
    Matrix out(x.rows(), x.cols());
    for (std::size_t s = 0; s < d; ++s) out += cy(s, 0) * basis[s];
    return out;
}

Matrix riesz_density(const std::vector<Matrix>& onb,
                     const std::function<cplx(const Matrix&)>& func) {
    // unique d in span with func(x) = trace(d x) for all x in the span
    Matrix w(onb[0].rows(), onb[0].cols());
    for (const auto& e : onb) w += std::conj(func(e)) * e;
    return w.adjoint();
}

Matrix positive_inverse(const Matrix& a, const Tolerance& tol) {
    EigResult eg = eig_hermitian(a);
    if (eg.values.front() <= tol.residual_abs)
        fail(Err::NonFaithful, "density is not positive definite");
    Matrix scaled(a.rows(), a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c)
        for (std::size_t i = 0; i < a.rows(); ++i)
            scaled(i, c) = eg.vectors(i, c) / eg.values[c];
    return matmul_ABh(scaled, eg.vectors);
}

} // namespace

CondExpResult conditional_expectation_bimodule(const ConcreteAlgebra& a,
                                               const std::vector<Matrix>& b_gens,
                                               const Matrix& phi_coeffs, const Matrix& mu_density,
                                               const Tolerance& tol) {
    tol.validate();
    const std::size_t amb = a.amb_dim();
    CondExpResult out;
    Report& rep = out.checks;

    if (!a.contains_id(tol)) fail(Err::PreconditionFailed, "algebra must be unital");
    ConcreteAlgebra b_alg = generated_algebra(b_gens, true, tol);
    if (b_alg.amb_dim() != amb) fail(Err::ShapeMismatch, "subalgebra ambient space mismatch");
    if (a.space().containment_residual(b_alg.space()) > tol.residual_abs)
        fail(Err::PreconditionFailed, "generators do not lie in the algebra");

    const auto& abasis = a.basis();
    const std::size_t da = abasis.size();
    if (phi_coeffs.rows() != da || phi_coeffs.cols() != da)
        fail(Err::ShapeMismatch, "phi coefficient matrix must be dim(A) x dim(A)");

    auto phi = [&](const Matrix& x) { return apply_coeff_map(phi_coeffs, abasis, x, tol); };

    // conditional expectation onto the subalgebra
    double proj_res = (phi_coeffs * phi_coeffs - phi_coeffs).norm_max();
    rep.add("condexp.idempotent", "condexp.projection", proj_res, tol.residual_abs);
    double range_res = 0.0, fix_res = 0.0;
    for (const auto& e : abasis)
        range_res = std::max(range_res, b_alg.space().membership_residual(phi(e)));
    for (const auto& f : b_alg.basis()) fix_res = std::max(fix_res, (phi(f) - f).norm_f());
    rep.add("condexp.range_in_subalgebra", "condexp.projection", range_res, tol.residual_abs);
    rep.add("condexp.fixes_subalgebra", "condexp.projection", fix_res, tol.residual_abs);

    double bimod_res = 0.0;
    for (const auto& f : b_alg.basis())
        for (const auto& f2 : b_alg.basis())
            for (const auto& e : abasis)
                bimod_res = std::max(bimod_res, (phi(f * e * f2) - f * phi(e) * f2).norm_f());
    rep.add("condexp.bimodular", "condexp.bimodular", bimod_res, tol.residual_abs);

    double pos_res = 0.0;
    for (const auto& e : abasis) {
        EigResult eg = eig_hermitian(phi(matmul_AhB(e, e)).hermitized());
        pos_res = std::max(pos_res, std::max(0.0, -eg.values.front()));
    }
    rep.add("condexp.positive", "condexp.positive", pos_res, tol.residual_abs);
    if (proj_res > tol.residual_abs || range_res > tol.residual_abs ||
        fix_res > tol.residual_abs || bimod_res > tol.residual_abs || pos_res > tol.residual_abs)
        fail(Err::NotConditionalExpectation, "phi fails the conditional expectation checks");

    // states: mu on the subalgebra, nu = mu o phi on the algebra
    if (b_alg.space().membership_residual(mu_density) > tol.residual_abs)
        fail(Err::Input, "state density must lie in the subalgebra");
    Matrix dmu = mu_density.hermitized();
    const double dtr = dmu.trace().real();
    if (!(dtr > 0.0)) fail(Err::NonFaithful, "state density must have positive trace");
    dmu *= cplx(1.0 / dtr);
    auto mu = [&](const Matrix& x) { return (dmu * x).trace(); };
    auto nu = [&](const Matrix& x) { return mu(phi(x)); };

    // faithfulness of nu (hence of mu and phi)
    {
        Matrix gram(da, da);
        for (std::size_t r = 0; r < da; ++r)
            for (std::size_t s = 0; s < da; ++s)
                gram(r, s) = nu(matmul_AhB(abasis[r], abasis[s]));
        EigResult eg = eig_hermitian(gram.hermitized());
        if (eg.values.front() <= tol.residual_abs)
            fail(Err::NonFaithful, "composed state is not faithful");
    }

    // modular compatibility via the density similarity
    const Matrix dnu = riesz_density(abasis, nu).hermitized();
    const Matrix dnu_inv = positive_inverse(dnu, tol);
    const Matrix dmu_inv = positive_inverse(dmu, tol);
    double stab_res = 0.0;
    for (const auto& f : b_alg.basis())
        stab_res = std::max(stab_res, b_alg.space().membership_residual(dnu * f * dnu_inv));
    rep.add("condexp.modular_stability", "condexp.modular", stab_res, tol.residual_abs);
    double compat_res = 0.0;
    for (const auto& e : abasis)
        compat_res = std::max(
            compat_res, (phi(dnu * e * dnu_inv) - dmu * phi(e) * dmu_inv).norm_f());
    rep.add("condexp.modular_compatible", "condexp.modular", compat_res, tol.residual_abs);
    if (stab_res > tol.residual_abs || compat_res > tol.residual_abs)
        fail(Err::NotCompatible, "modular compatibility fails");

    // GNS spaces
    out.base_gns = gns_from_state(b_alg.basis(), dmu, mu, tol);
    out.big_gns = gns_from_state(abasis, dnu, nu, tol);

    OperatorSpace b_rep_space =
        OperatorSpace::span(out.base_gns.gns_dim, out.base_gns.gns_dim, out.base_gns.pi, tol);
    OperatorSpace b_rep_op_space =
        OperatorSpace::span(out.base_gns.gns_dim, out.base_gns.gns_dim, out.base_gns.pi_op, tol);
    out.base = make_base(out.base_gns.gns_dim, ConcreteAlgebra::from_space(b_rep_space, tol),
                         ConcreteAlgebra::from_space(b_rep_op_space, tol), tol);

    // isometry from the subalgebra GNS space
    {
        const std::size_t db = b_alg.dim();
        Matrix src(out.base_gns.gns_dim, db), dst(out.big_gns.gns_dim, db);
        for (std::size_t t = 0; t < db; ++t) {
            Matrix ls = out.base_gns.gns_vector(b_alg.basis()[t], tol);
            Matrix ld = out.big_gns.gns_vector(b_alg.basis()[t], tol);
            src.set_block(0, t, ls);
            dst.set_block(0, t, ld);
        }
        double zres = 0.0;
        // zeta * src = dst: transpose to src^T zeta^T = dst^T
        Matrix zt = lstsq_solve(src.transpose(), dst.transpose(), tol, &zres);
        if (zres > tol.residual_abs) fail(Err::Inconsistent, "embedding isometry solve");
        out.zeta = zt.transpose();
        rep.add("condexp.zeta_isometry", "condexp.embedding",
                (matmul_AhB(out.zeta, out.zeta) - Matrix::identity(out.base_gns.gns_dim)).norm_f(),
                tol.residual_abs);
    }

    // module legs and represented algebras
    std::vector<Matrix> beta_gens, alpha_gens, rep_gens, rep_op_gens;
    for (std::size_t t = 0; t < da; ++t) {
        rep_gens.push_back(out.big_gns.pi[t]);
        rep_op_gens.push_back(out.big_gns.pi_op[t]);
        beta_gens.push_back(out.big_gns.pi[t] * out.zeta);
        alpha_gens.push_back(out.big_gns.pi_op[t] * out.zeta);
    }
    const std::size_t hdim = out.big_gns.gns_dim;
    const std::size_t kdim = out.base_gns.gns_dim;
    out.beta = OperatorSpace::span(kdim, hdim, beta_gens, tol);
    out.alpha = OperatorSpace::span(kdim, hdim, alpha_gens, tol);
    out.rep = ConcreteAlgebra::from_space(OperatorSpace::span(hdim, hdim, rep_gens, tol), tol);
    out.rep_op =
        ConcreteAlgebra::from_space(OperatorSpace::span(hdim, hdim, rep_op_gens, tol), tol);

    // absorption axioms of the two legs and the induced-action identities
    auto induced = [&](const OperatorSpace& leg, const Matrix& x) {
        std::vector<std::pair<Matrix, Matrix>> eqs;
        for (const auto& xi : leg.basis()) eqs.emplace_back(xi, xi * x);
        return solve_intertwiner(eqs, hdim, hdim, tol);
    };
    double absorb_a = 0.0, absorb_b = 0.0, pair_a = 0.0, pair_b = 0.0;
    for (std::size_t t = 0; t < out.base_gns.algebra_dim; ++t) {
        const Matrix via_alpha = induced(out.alpha, out.base_gns.pi[t]);
        pair_a = std::max(
            pair_a,
            (via_alpha - out.big_gns.represent(out.base_gns.algebra_basis[t], tol)).norm_f());
        for (const auto& xi : out.beta.basis())
            absorb_a = std::max(absorb_a, out.beta.membership_residual(via_alpha * xi));

        const Matrix via_beta = induced(out.beta, out.base_gns.pi_op[t]);
        pair_b = std::max(
            pair_b,
            (via_beta - out.big_gns.represent_op(out.base_gns.algebra_basis[t], tol)).norm_f());
        for (const auto& xi : out.alpha.basis())
            absorb_b = std::max(absorb_b, out.alpha.membership_residual(via_beta * xi));
    }
    rep.add("condexp.alpha_absorbs_beta", "bimodule.rho_alpha_A_beta_eq_beta", absorb_a,
            tol.residual_abs);
    rep.add("condexp.beta_absorbs_alpha", "bimodule.rho_beta_Bdag_alpha_eq_alpha", absorb_b,
            tol.residual_abs);
    rep.add("condexp.alpha_action_is_rep", "condexp.induced_actions", pair_a, tol.residual_abs);
    rep.add("condexp.beta_action_is_opposite_rep", "condexp.induced_actions", pair_b,
            tol.residual_abs);
    return out;
}

} // namespace cstar
