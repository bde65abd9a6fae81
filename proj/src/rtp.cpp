#include "cstar/rtp.hpp"

#include <algorithm>

namespace cstar {

bool same_base(const CStarBase& x, const CStarBase& y, const Tolerance& tol) {
    return x.k_dim == y.k_dim && x.b.space().equals(y.b.space(), tol) &&
           x.b_dag.space().equals(y.b_dag.space(), tol);
}

Matrix RelativeTensorProduct::gen_coord(std::size_t i, std::size_t k, std::size_t j) const {
    Matrix v(dim, 1);
    const std::size_t g = gen_index(i, k, j);
    for (std::size_t c = 0; c < dim; ++c) v(c, 0) = coords(g, c);
    return v;
}

namespace {

// columns xi_i e_k of a leg, as a map C^(n*mid) -> C^cod
Matrix expansion_matrix(const OperatorSpace& leg) {
    const std::size_t n = leg.dim(), mid = leg.dom_dim(), cod = leg.cod_dim();
    Matrix e(cod, n * mid);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < mid; ++k)
            for (std::size_t r = 0; r < cod; ++r) e(r, i * mid + k) = leg.basis()[i](r, k);
    return e;
}

Matrix pinv(const Matrix& a, const Tolerance& tol) {
    return lstsq_solve(a, Matrix::identity(a.rows()), tol);
}

} // namespace

RelativeTensorProduct rtp_construct(const CStarModule& h_mod, const CStarModule& k_mod,
                                    const Tolerance& tol) {
    tol.validate();
    if (!same_base(opposite_base(h_mod.base), k_mod.base, tol))
        fail(Err::PreconditionFailed, "right module must live over the opposite base");
    if (!check_module(h_mod, tol).pass() || !check_module(k_mod, tol).pass())
        fail(Err::PreconditionFailed, "module axioms fail");

    RelativeTensorProduct r;
    r.left = h_mod;
    r.right = k_mod;
    r.n_left = h_mod.alpha.dim();
    r.mid_dim = h_mod.base.k_dim;
    r.n_right = k_mod.alpha.dim();

    // Gram over generator triples: block (i,j),(i',j') carries P_ii' * Q_jj'
    const auto& bb = h_mod.alpha.basis();
    const auto& gb = k_mod.alpha.basis();
    std::vector<Matrix> p(r.n_left * r.n_left), q(r.n_right * r.n_right);
    for (std::size_t i = 0; i < r.n_left; ++i)
        for (std::size_t i2 = 0; i2 < r.n_left; ++i2) p[i * r.n_left + i2] = matmul_AhB(bb[i], bb[i2]);
    for (std::size_t j = 0; j < r.n_right; ++j)
        for (std::size_t j2 = 0; j2 < r.n_right; ++j2)
            q[j * r.n_right + j2] = matmul_AhB(gb[j], gb[j2]);

    const std::size_t ngen = r.n_left * r.mid_dim * r.n_right;
    Matrix gram(ngen, ngen);
    for (std::size_t i = 0; i < r.n_left; ++i)
        for (std::size_t i2 = 0; i2 < r.n_left; ++i2)
            for (std::size_t j = 0; j < r.n_right; ++j)
                for (std::size_t j2 = 0; j2 < r.n_right; ++j2) {
                    const Matrix pq = p[i * r.n_left + i2] * q[j * r.n_right + j2];
                    for (std::size_t k = 0; k < r.mid_dim; ++k)
                        for (std::size_t k2 = 0; k2 < r.mid_dim; ++k2)
                            gram(r.gen_index(i, k, j), r.gen_index(i2, k2, j2)) = pq(k, k2);
                }

    GramCompletion gc = gram_completion(gram.hermitized(), tol);
    r.dim = gc.out_dim;
    // row g, conjugated, is the coordinate vector of generator g: standard
    // inner products of these vectors reproduce the Gram matrix (conjugate
    // linear in the first slot).
    r.coords = gc.coords.conjugate();
    r.gram_residual = (matmul_ABh(gc.coords, gc.coords) - gram).norm_max();

    // induced base actions
    for (const auto& x : h_mod.base.b_dag.basis()) r.rho_dag_left.push_back(rho(h_mod, x, tol));
    for (const auto& x : k_mod.base.b_dag.basis()) r.rho_b_right.push_back(rho(k_mod, x, tol));

    r.expand_left = expansion_matrix(h_mod.alpha);
    r.expand_left_pinv = pinv(r.expand_left, tol);
    r.expand_right = expansion_matrix(k_mod.alpha);
    r.expand_right_pinv = pinv(r.expand_right, tol);

    // insertion operators for the leg bases
    const std::size_t hd = h_mod.h_dim, kd = k_mod.h_dim;
    for (std::size_t i = 0; i < r.n_left; ++i) {
        // F: C^(n_right*mid) -> rtp, column (j,k) = coords(i,k,j)
        Matrix f(r.dim, r.n_right * r.mid_dim);
        for (std::size_t j = 0; j < r.n_right; ++j)
            for (std::size_t k = 0; k < r.mid_dim; ++k) {
                const std::size_t g = r.gen_index(i, k, j);
                for (std::size_t c = 0; c < r.dim; ++c) f(c, j * r.mid_dim + k) = r.coords(g, c);
            }
        Matrix kb = f * r.expand_right_pinv;
        if ((kb * r.expand_right - f).norm_max() > tol.residual_abs)
            fail(Err::Inconsistent, "ket1 is not well defined on the right span");
        (void)kd;
        r.ket1.push_back(std::move(kb));
    }
    for (std::size_t j = 0; j < r.n_right; ++j) {
        Matrix f(r.dim, r.n_left * r.mid_dim);
        for (std::size_t i = 0; i < r.n_left; ++i)
            for (std::size_t k = 0; k < r.mid_dim; ++k) {
                const std::size_t g = r.gen_index(i, k, j);
                for (std::size_t c = 0; c < r.dim; ++c) f(c, i * r.mid_dim + k) = r.coords(g, c);
            }
        Matrix kb = f * r.expand_left_pinv;
        if ((kb * r.expand_left - f).norm_max() > tol.residual_abs)
            fail(Err::Inconsistent, "ket2 is not well defined on the left span");
        (void)hd;
        r.ket2.push_back(std::move(kb));
    }
    return r;
}

Matrix RelativeTensorProduct::ketbra1(const Matrix& xi, const Tolerance& tol) const {
    if (left.alpha.membership_residual(xi) > tol.residual_abs)
        fail(Err::NotInSpace, "ketbra1 argument outside the left leg");
    Matrix out(dim, right.h_dim);
    for (std::size_t i = 0; i < n_left; ++i) out += hs_inner(left.alpha.basis()[i], xi) * ket1[i];
    return out;
}

Matrix RelativeTensorProduct::ketbra2(const Matrix& eta, const Tolerance& tol) const {
    if (right.alpha.membership_residual(eta) > tol.residual_abs)
        fail(Err::NotInSpace, "ketbra2 argument outside the right leg");
    Matrix out(dim, left.h_dim);
    for (std::size_t j = 0; j < n_right; ++j) out += hs_inner(right.alpha.basis()[j], eta) * ket2[j];
    return out;
}

Matrix RelativeTensorProduct::left_factor(const Matrix& s, const Tolerance& tol) const {
    for (const auto& x : rho_dag_left)
        if ((s * x - x * s).norm_f() > tol.residual_abs)
            fail(Err::CaseViolated, "left factor does not commute with the induced dagger action");
    std::vector<std::pair<Matrix, Matrix>> eqs;
    eqs.reserve(n_right);
    for (const auto& kb : ket2) eqs.emplace_back(kb, kb * s);
    return solve_intertwiner(eqs, dim, dim, tol);
}

Matrix RelativeTensorProduct::right_factor(const Matrix& t, const Tolerance& tol) const {
    for (const auto& x : rho_b_right)
        if ((t * x - x * t).norm_f() > tol.residual_abs)
            fail(Err::CaseViolated, "right factor does not commute with the induced base action");
    std::vector<std::pair<Matrix, Matrix>> eqs;
    eqs.reserve(n_left);
    for (const auto& kb : ket1) eqs.emplace_back(kb, kb * t);
    return solve_intertwiner(eqs, dim, dim, tol);
}

Matrix op_tensor(const RelativeTensorProduct& r, const Matrix& s, const Matrix& t, TensorCase c,
                 const Tolerance& tol) {
    switch (c) {
    case TensorCase::SemiLeft:
        for (const auto& xi : r.left.alpha.basis())
            if (r.left.alpha.membership_residual(s * xi) > tol.residual_abs)
                fail(Err::CaseViolated, "left operator does not preserve the left leg");
        break;
    case TensorCase::SemiRight:
        for (const auto& eta : r.right.alpha.basis())
            if (r.right.alpha.membership_residual(t * eta) > tol.residual_abs)
                fail(Err::CaseViolated, "right operator does not preserve the right leg");
        break;
    case TensorCase::Commuting: {
        const OperatorSpace bicomm =
            commutant_space(r.left.base.b_comm.basis(), r.left.base.k_dim, tol);
        if (!bicomm.equals(r.left.base.b_dag_comm, tol))
            fail(Err::CaseViolated, "commutant condition fails: (b_dag)' != b''");
        break;
    }
    }
    const Matrix lf = r.left_factor(s, tol);
    const Matrix rf = r.right_factor(t, tol);
    if ((lf * rf - rf * lf).norm_f() > tol.residual_abs)
        fail(Err::NonCommuting, "slot operators do not commute");
    return lf * rf;
}

Matrix morphism_tensor(const RelativeTensorProduct& src, const RelativeTensorProduct& dst,
                       const Matrix& s, const Matrix& t, const Tolerance& tol) {
    if (s.cols() != src.left.h_dim || s.rows() != dst.left.h_dim ||
        t.cols() != src.right.h_dim || t.rows() != dst.right.h_dim)
        fail(Err::ShapeMismatch, "morphism_tensor shapes");
    if (src.mid_dim != dst.mid_dim)
        fail(Err::ShapeMismatch, "morphism_tensor middle spaces differ");
    // leg compatibility
    std::vector<Matrix> s_img, t_img;
    for (const auto& xi : src.left.alpha.basis()) {
        const Matrix v = s * xi;
        if (dst.left.alpha.membership_residual(v) > tol.residual_abs)
            fail(Err::NotMorphism, "left operator does not map leg into leg");
        s_img.push_back(v);
    }
    for (const auto& eta : src.right.alpha.basis()) {
        const Matrix v = t * eta;
        if (dst.right.alpha.membership_residual(v) > tol.residual_abs)
            fail(Err::NotMorphism, "right operator does not map leg into leg");
        t_img.push_back(v);
    }

    // images of generators
    const std::size_t ngen = src.n_left * src.mid_dim * src.n_right;
    Matrix lhs(src.dim, ngen), rhs(dst.dim, ngen);
    for (std::size_t i = 0; i < src.n_left; ++i) {
        std::vector<cplx> ci(dst.n_left);
        for (std::size_t p = 0; p < dst.n_left; ++p)
            ci[p] = hs_inner(dst.left.alpha.basis()[p], s_img[i]);
        for (std::size_t j = 0; j < src.n_right; ++j) {
            std::vector<cplx> dj(dst.n_right);
            for (std::size_t qq = 0; qq < dst.n_right; ++qq)
                dj[qq] = hs_inner(dst.right.alpha.basis()[qq], t_img[j]);
            for (std::size_t k = 0; k < src.mid_dim; ++k) {
                const std::size_t col = src.gen_index(i, k, j);
                for (std::size_t c = 0; c < src.dim; ++c) lhs(c, col) = src.coords(src.gen_index(i, k, j), c);
                for (std::size_t p = 0; p < dst.n_left; ++p)
                    for (std::size_t qq = 0; qq < dst.n_right; ++qq) {
                        const cplx w = ci[p] * dj[qq];
                        if (w == cplx(0.0)) continue;
                        const std::size_t g = dst.gen_index(p, k, qq);
                        for (std::size_t c = 0; c < dst.dim; ++c) rhs(c, col) += w * dst.coords(g, c);
                    }
            }
        }
    }
    // solve M * lhs = rhs
    double res = 0.0;
    Matrix mt = lstsq_solve(lhs.transpose(), rhs.transpose(), tol, &res);
    if (res > tol.residual_abs) fail(Err::Inconsistent, "morphism tensor solve");
    return mt.transpose();
}

RtpBimodule rtp_bimodule(const CStarBimodule& h, const CStarBimodule& k, const Tolerance& tol) {
    // h over (a_dag, b), k over (b_dag, c): the middle base is shared
    if (!same_base(h.base_b, k.base_a, tol))
        fail(Err::PreconditionFailed, "middle bases do not match");
    RtpBimodule out;
    out.checks.merge(check_bimodule(h, tol), "left");
    out.checks.merge(check_bimodule(k, tol), "right");
    if (!out.checks.pass()) fail(Err::PreconditionFailed, "bimodule axioms fail");

    out.rtp = rtp_construct(h.beta_module(), k.alpha_module(), tol);
    const RelativeTensorProduct& r = out.rtp;

    // legs: alpha <| gamma = [ket2 alpha], beta |> delta = [ket1 delta]
    std::vector<Matrix> leg_a, leg_b;
    for (const auto& kb : r.ket2)
        for (const auto& x : h.alpha.basis()) leg_a.push_back(kb * x);
    for (const auto& kb : r.ket1)
        for (const auto& x : k.beta.basis()) leg_b.push_back(kb * x);
    OperatorSpace alpha = OperatorSpace::span(h.base_a.k_dim, r.dim, leg_a, tol);
    OperatorSpace beta = OperatorSpace::span(k.base_b.k_dim, r.dim, leg_b, tol);

    out.bimod = CStarBimodule{h.base_a, k.base_b, r.dim, alpha, beta};
    out.checks.merge(check_bimodule(out.bimod, tol), "product");

    // induced action equalities on both new legs
    double res_a = 0.0;
    for (const auto& x : h.base_a.b.basis()) {
        const Matrix via_leg = rho_of_space(alpha, x, tol);
        const Matrix via_slot = r.left_factor(rho(h.alpha_module(), x, tol), tol);
        res_a = std::max(res_a, (via_leg - via_slot).norm_f());
    }
    out.checks.add("product.rho_alpha_slotwise", "rtp.induced_action_left", res_a,
                   tol.residual_abs);
    double res_b = 0.0;
    for (const auto& y : k.base_b.b_dag.basis()) {
        const Matrix via_leg = rho_of_space(beta, y, tol);
        const Matrix via_slot = r.right_factor(rho(k.beta_module(), y, tol), tol);
        res_b = std::max(res_b, (via_leg - via_slot).norm_f());
    }
    out.checks.add("product.rho_beta_slotwise", "rtp.induced_action_right", res_b,
                   tol.residual_abs);
    return out;
}

namespace {

Matrix solve_map_on_columns(const Matrix& lhs_cols, const Matrix& rhs_cols, const Tolerance& tol,
                            const char* what) {
    double res = 0.0;
    Matrix mt = lstsq_solve(lhs_cols.transpose(), rhs_cols.transpose(), tol, &res);
    if (res > tol.residual_abs) fail(Err::Inconsistent, what);
    return mt.transpose();
}

} // namespace

AssocResult assoc_iso(const CStarBimodule& h, const CStarBimodule& k, const CStarBimodule& l,
                      const Tolerance& tol) {
    AssocResult out;
    RtpBimodule hk = rtp_bimodule(h, k, tol);
    out.r12 = hk.rtp;
    out.left_nested = rtp_bimodule(hk.bimod, l, tol);
    RtpBimodule kl = rtp_bimodule(k, l, tol);
    out.r23 = kl.rtp;
    out.right_nested = rtp_bimodule(h, kl.bimod, tol);

    const RelativeTensorProduct& rl = out.left_nested.rtp;
    const RelativeTensorProduct& rr = out.right_nested.rtp;

    // span both sides by quadruples (i over beta_H, m over delta_K, w middle-c, e over eps_L)
    const auto& beta_h = h.beta.basis();
    const auto& delta_k = k.beta.basis();
    const auto& eps_l = l.alpha.basis();
    const std::size_t cdim = k.base_b.k_dim;
    const std::size_t nq = beta_h.size() * delta_k.size() * cdim * eps_l.size();

    Matrix lhs(rl.dim, nq), rhs(rr.dim, nq);
    std::size_t col = 0;
    for (std::size_t i = 0; i < beta_h.size(); ++i)
        for (std::size_t m = 0; m < delta_k.size(); ++m) {
            const Matrix ins12 = out.r12.ket1[i] * delta_k[m]; // c-space -> r12
            for (std::size_t w = 0; w < cdim; ++w) {
                const Matrix ev = Matrix::unit(cdim, 1, w, 0);
                const Matrix v12 = ins12 * ev;              // in r12
                const Matrix vk = delta_k[m] * ev;          // in K
                for (std::size_t e = 0; e < eps_l.size(); ++e) {
                    // left: (|b_i>_1 d_m) . e_w . eps_e  via ket2 of ((H K) L)
                    Matrix lv = rl.ketbra2(eps_l[e], tol) * v12;
                    // right: b_i . ((d_m e_w) . eps_e) via ket2 of (K L), ket1 of (H (K L))
                    Matrix rv = rr.ketbra1(beta_h[i], tol) * (out.r23.ketbra2(eps_l[e], tol) * vk);
                    lhs.set_block(0, col, lv);
                    rhs.set_block(0, col, rv);
                    ++col;
                }
            }
        }

    out.a = solve_map_on_columns(lhs, rhs, tol, "associator solve");
    Report& rep = out.checks;
    rep.add_bool("assoc.dims", "rtp.assoc_dims", rl.dim == rr.dim,
                 std::to_string(rl.dim) + "=" + std::to_string(rr.dim));
    rep.add("assoc.unitary", "rtp.assoc_unitary",
            (matmul_AhB(out.a, out.a) - Matrix::identity(rl.dim)).norm_f(), tol.residual_abs);

    // leg intertwining: a maps the nested legs onto each other
    auto map_space = [&](const OperatorSpace& s) {
        std::vector<Matrix> img;
        for (const auto& x : s.basis()) img.push_back(out.a * x);
        return OperatorSpace::span(s.dom_dim(), rr.dim, img, tol);
    };
    rep.add("assoc.alpha_leg", "rtp.assoc_legs",
            map_space(out.left_nested.bimod.alpha).equality_residual(out.right_nested.bimod.alpha),
            tol.residual_abs);
    rep.add("assoc.beta_leg", "rtp.assoc_legs",
            map_space(out.left_nested.bimod.beta).equality_residual(out.right_nested.bimod.beta),
            tol.residual_abs);
    return out;
}

UnitIso unit_r(const CStarBimodule& h, const Tolerance& tol) {
    UnitIso out;
    const CStarBase& base = h.base_b;
    CStarBimodule u = unit_bimodule(base, tol);
    out.prod = rtp_bimodule(h, u, tol);
    const RelativeTensorProduct& r = out.prod.rtp;

    // r(xi . zeta . bdag) = xi bdag zeta
    const std::size_t ngen = r.n_left * r.mid_dim * r.n_right;
    Matrix lhs(r.dim, ngen), rhs(h.h_dim, ngen);
    for (std::size_t i = 0; i < r.n_left; ++i)
        for (std::size_t j = 0; j < r.n_right; ++j) {
            const Matrix m = r.left.alpha.basis()[i] * r.right.alpha.basis()[j];
            for (std::size_t k = 0; k < r.mid_dim; ++k) {
                const std::size_t g = r.gen_index(i, k, j);
                for (std::size_t c = 0; c < r.dim; ++c) lhs(c, g) = r.coords(g, c);
                for (std::size_t c = 0; c < h.h_dim; ++c) rhs(c, g) = m(c, k);
            }
        }
    out.u = solve_map_on_columns(lhs, rhs, tol, "right unit solve");

    Report& rep = out.checks;
    rep.add_bool("unit_r.dims", "rtp.unit_dims", r.dim == h.h_dim,
                 std::to_string(r.dim) + "=" + std::to_string(h.h_dim));
    rep.add("unit_r.unitary", "rtp.unit_unitary",
            (matmul_AhB(out.u, out.u) - Matrix::identity(r.dim)).norm_f(), tol.residual_abs);
    auto map_space = [&](const OperatorSpace& s) {
        std::vector<Matrix> img;
        for (const auto& x : s.basis()) img.push_back(out.u * x);
        return OperatorSpace::span(s.dom_dim(), h.h_dim, img, tol);
    };
    rep.add("unit_r.alpha_leg", "rtp.unit_legs",
            map_space(out.prod.bimod.alpha).equality_residual(h.alpha), tol.residual_abs);
    rep.add("unit_r.beta_leg", "rtp.unit_legs",
            map_space(out.prod.bimod.beta).equality_residual(h.beta), tol.residual_abs);
    return out;
}

UnitIso unit_l(const CStarBimodule& k, const Tolerance& tol) {
    UnitIso out;
    const CStarBase& base = k.base_a; // k lives over (base_dag, c)
    CStarBimodule u = unit_bimodule(base, tol);
    out.prod = rtp_bimodule(u, k, tol);
    const RelativeTensorProduct& r = out.prod.rtp;

    // l(b . zeta . eta) = eta b zeta
    const std::size_t ngen = r.n_left * r.mid_dim * r.n_right;
    Matrix lhs(r.dim, ngen), rhs(k.h_dim, ngen);
    for (std::size_t i = 0; i < r.n_left; ++i)
        for (std::size_t j = 0; j < r.n_right; ++j) {
            const Matrix m = r.right.alpha.basis()[j] * r.left.alpha.basis()[i];
            for (std::size_t kk = 0; kk < r.mid_dim; ++kk) {
                const std::size_t g = r.gen_index(i, kk, j);
                for (std::size_t c = 0; c < r.dim; ++c) lhs(c, g) = r.coords(g, c);
                for (std::size_t c = 0; c < k.h_dim; ++c) rhs(c, g) = m(c, kk);
            }
        }
    out.u = solve_map_on_columns(lhs, rhs, tol, "left unit solve");

    Report& rep = out.checks;
    rep.add_bool("unit_l.dims", "rtp.unit_dims", r.dim == k.h_dim,
                 std::to_string(r.dim) + "=" + std::to_string(k.h_dim));
    rep.add("unit_l.unitary", "rtp.unit_unitary",
            (matmul_AhB(out.u, out.u) - Matrix::identity(r.dim)).norm_f(), tol.residual_abs);
    auto map_space = [&](const OperatorSpace& s) {
        std::vector<Matrix> img;
        for (const auto& x : s.basis()) img.push_back(out.u * x);
        return OperatorSpace::span(s.dom_dim(), k.h_dim, img, tol);
    };
    rep.add("unit_l.alpha_leg", "rtp.unit_legs",
            map_space(out.prod.bimod.alpha).equality_residual(k.alpha), tol.residual_abs);
    rep.add("unit_l.beta_leg", "rtp.unit_legs",
            map_space(out.prod.bimod.beta).equality_residual(k.beta), tol.residual_abs);
    return out;
}

FlipResult flip_sigma(const RelativeTensorProduct& r, const Tolerance& tol) {
    FlipResult out;
    out.flipped = rtp_construct(r.right, r.left, tol);
    const RelativeTensorProduct& f = out.flipped;
    if (f.dim != r.dim) fail(Err::Inconsistent, "flip changed the dimension");

    const std::size_t ngen = r.n_left * r.mid_dim * r.n_right;
    Matrix lhs(r.dim, ngen), rhs(f.dim, ngen);
    for (std::size_t i = 0; i < r.n_left; ++i)
        for (std::size_t k = 0; k < r.mid_dim; ++k)
            for (std::size_t j = 0; j < r.n_right; ++j) {
                const std::size_t g = r.gen_index(i, k, j);
                const std::size_t g2 = f.gen_index(j, k, i);
                for (std::size_t c = 0; c < r.dim; ++c) lhs(c, g) = r.coords(g, c);
                for (std::size_t c = 0; c < f.dim; ++c) rhs(c, g) = f.coords(g2, c);
            }
    out.sigma = solve_map_on_columns(lhs, rhs, tol, "flip solve");
    out.checks.add("flip.unitary", "rtp.flip_unitary",
                   (matmul_AhB(out.sigma, out.sigma) - Matrix::identity(r.dim)).norm_f(),
                   tol.residual_abs);
    return out;
}

SumCompat direct_sum_compat(const std::vector<CStarBimodule>& hs,
                            const std::vector<CStarBimodule>& ks, const Tolerance& tol) {
    if (hs.empty() || ks.empty()) fail(Err::Input, "empty family");
    SumCompat out;
    BimoduleSum hsum = direct_sum_bimodules(hs, tol);
    BimoduleSum ksum = direct_sum_bimodules(ks, tol);
    out.big = rtp_bimodule(hsum.total, ksum.total, tol);

    std::size_t total = 0;
    std::vector<Matrix> embeddings;
    for (std::size_t i = 0; i < hs.size(); ++i)
        for (std::size_t j = 0; j < ks.size(); ++j) {
            RtpBimodule comp = rtp_bimodule(hs[i], ks[j], tol);
            const Matrix u = morphism_tensor(comp.rtp, out.big.rtp, hsum.injections[i],
                                             ksum.injections[j], tol);
            total += comp.rtp.dim;
            embeddings.push_back(u);
            out.components.push_back(std::move(comp.rtp));
        }

    out.to_big = Matrix(out.big.rtp.dim, total);
    std::size_t off = 0;
    for (const auto& u : embeddings) {
        out.to_big.set_block(0, off, u);
        off += u.cols();
    }
    out.to_parts = out.to_big.adjoint();

    Report& rep = out.checks;
    rep.add_bool("sum_compat.dims", "rtp.sum_dims", total == out.big.rtp.dim,
                 std::to_string(total) + "=" + std::to_string(out.big.rtp.dim));
    rep.add("sum_compat.parts_identity", "rtp.sum_inverse",
            (out.to_parts * out.to_big - Matrix::identity(total)).norm_f(), tol.residual_abs);
    rep.add("sum_compat.big_identity", "rtp.sum_inverse",
            (out.to_big * out.to_parts - Matrix::identity(out.big.rtp.dim)).norm_f(),
            tol.residual_abs);
    return out;
}

} // namespace cstar
