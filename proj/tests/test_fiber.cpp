#include <doctest.h>

#include <random>

#include "cstar/eig.hpp"
#include "cstar/fiber.hpp"

using namespace cstar;

namespace {

const Tolerance kTol;

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = cplx(dist(rng), dist(rng));
    return m;
}

ConcreteAlgebra full_algebra(std::size_t n) {
    return ConcreteAlgebra::from_space(OperatorSpace::full(n, n), kTol);
}

ConcreteAlgebra diagonal_algebra(std::size_t n) {
    std::vector<Matrix> gens;
    for (std::size_t i = 0; i < n; ++i) gens.push_back(Matrix::unit(n, n, i, i));
    return ConcreteAlgebra::from_space(OperatorSpace::span(n, n, gens, kTol), kTol);
}

RepresentedAlgebra trivial_rep(std::size_t dim, const ConcreteAlgebra& alg) {
    return {make_module(trivial_base(kTol), OperatorSpace::full(1, dim), kTol), alg};
}

// the base space together with its own algebra, over the base or its opposite
RepresentedAlgebra base_rep(const CStarBase& base, bool dagger_side) {
    if (!dagger_side)
        return {make_module(base, base.b.space(), kTol), base.b};
    return {make_module(opposite_base(base), base.b_dag.space(), kTol), base.b_dag};
}

} // namespace

TEST_CASE("induction by the scalars returns the algebra") {
    ConcreteAlgebra a = diagonal_algebra(2);
    OperatorSpace scalars = OperatorSpace::span(2, 2, {Matrix::identity(2)}, kTol);
    IndResult res = ind(scalars, a, kTol);
    CHECK(res.checks.pass());
    CHECK(res.algebra.space().equals(a.space(), kTol));
}

TEST_CASE("induction by a unitary conjugates") {
    Matrix u = Matrix::from_rows({{cplx(0, 1), 0}, {0, cplx(1, 0)}});
    Matrix h = Matrix::from_rows({{1, 1}, {1, -1}});
    u = cplx(1.0 / std::sqrt(2.0)) * (u * h);
    ConcreteAlgebra a = diagonal_algebra(2);
    OperatorSpace i_space = OperatorSpace::span(2, 2, {u}, kTol);
    IndResult res = ind(i_space, a, kTol);
    CHECK(res.checks.pass());

    // conjugation oracle
    std::vector<Matrix> conj;
    for (const auto& x : a.basis()) conj.push_back(matmul_ABh(u * x, u));
    OperatorSpace uau = OperatorSpace::span(2, 2, conj, kTol);
    CHECK(res.algebra.space().equals(uau, kTol));
}

TEST_CASE("induction collapses to the conjugated span") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    std::vector<std::pair<OperatorSpace, ConcreteAlgebra>> corpus;
    corpus.emplace_back(OperatorSpace::span(2, 2, {Matrix::identity(2)}, kTol),
                        diagonal_algebra(2));
    corpus.emplace_back(base.b.space(), base.b);
    corpus.emplace_back(OperatorSpace::full(1, 3), full_algebra(1));
    {
        Matrix u = Matrix::from_rows({{0, 1}, {1, 0}});
        corpus.emplace_back(OperatorSpace::span(2, 2, {u}, kTol), full_algebra(2));
    }

    for (const auto& [i_space, a] : corpus) {
        IndResult res = ind(i_space, a, kTol);
        std::vector<Matrix> iai;
        for (const auto& s : i_space.basis())
            for (const auto& x : a.basis())
                for (const auto& s2 : i_space.basis()) iai.push_back(matmul_ABh(s * x, s2));
        OperatorSpace span_iai =
            OperatorSpace::span(i_space.cod_dim(), i_space.cod_dim(), iai, kTol);
        CHECK(res.algebra.space().equality_residual(span_iai) <= kTol.residual_abs);
    }
}

TEST_CASE("induction transfers multipliers and nondegeneracy") {
    ConcreteAlgebra a = ConcreteAlgebra::from_space(
        OperatorSpace::span(2, 2, {Matrix::unit(2, 2, 0, 0)}, kTol), kTol);
    CHECK_FALSE(a.nondegenerate());
    OperatorSpace scalars = OperatorSpace::span(2, 2, {Matrix::identity(2)}, kTol);
    IndResult res = ind(scalars, a, kTol);
    CHECK_FALSE(res.algebra.nondegenerate());

    ConcreteAlgebra m2 = full_algebra(2);
    IndResult res2 = ind(scalars, m2, kTol);
    CHECK(res2.algebra.nondegenerate());

    ConcreteAlgebra ma = multiplier_algebra(m2, kTol);
    IndResult resm = ind(scalars, ma, kTol);
    double res_mult = 0.0;
    for (const auto& s : resm.algebra.basis())
        for (const auto& t : res2.algebra.basis()) {
            res_mult = std::max(res_mult, res2.algebra.space().membership_residual(s * t));
            res_mult = std::max(res_mult, res2.algebra.space().membership_residual(t * s));
        }
    CHECK(res_mult <= kTol.residual_abs);
}

TEST_CASE("induction lands in the commutant of the induced commutant action") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    const OperatorSpace& i_space = base.b.space();
    IndResult res = ind(i_space, base.b, kTol);
    OperatorSpace a_comm = commutant_space(base.b.basis(), 2, kTol);
    for (const auto& y : a_comm.basis()) {
        Matrix ry = rho_of_space(i_space, y, kTol);
        for (const auto& t : res.algebra.basis())
            CHECK((ry * t - t * ry).norm_f() <= kTol.residual_abs);
    }
}

TEST_CASE("induction preconditions are named") {
    ConcreteAlgebra a = diagonal_algebra(2);
    OperatorSpace bad = OperatorSpace::span(2, 2, {Matrix::unit(2, 2, 0, 0)}, kTol);
    CHECK_THROWS_AS(ind(bad, a, kTol), Error);
}

TEST_CASE("fiber product over the trivial base with full algebras is everything") {
    RepresentedAlgebra a = trivial_rep(2, full_algebra(2));
    RepresentedAlgebra b = trivial_rep(2, full_algebra(2));
    FiberProduct fp = fiber_product(a, b, kTol);
    CHECK(fp.checks.pass());
    CHECK(fp.algebra.dim() == 16);
}

TEST_CASE("fiber product of function algebras over a point is the product functions") {
    for (auto [nx, ny] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}}) {
        RepresentedAlgebra a = trivial_rep(nx, diagonal_algebra(nx));
        RepresentedAlgebra b = trivial_rep(ny, diagonal_algebra(ny));
        FiberProduct fp = fiber_product(a, b, kTol);
        CHECK(fp.checks.pass());
        CHECK(fp.algebra.dim() == nx * ny);
        for (const auto& t : fp.algebra.basis())
            for (std::size_t p = 0; p < nx * ny; ++p)
                for (std::size_t q = 0; q < nx * ny; ++q)
                    if (p != q) CHECK(std::abs(t(p, q)) < 1e-8);
    }
}

TEST_CASE("fiber product of zero algebras is zero") {
    ConcreteAlgebra zero = ConcreteAlgebra::from_space(OperatorSpace::zero(2, 2), kTol);
    RepresentedAlgebra a = trivial_rep(2, zero);
    RepresentedAlgebra b = trivial_rep(2, zero);
    FiberProduct fp = fiber_product(a, b, kTol);
    CHECK(fp.algebra.dim() == 0);
}

TEST_CASE("commutant route agrees with the constraint route") {
    {
        RepresentedAlgebra a = trivial_rep(2, full_algebra(2));
        RepresentedAlgebra b = trivial_rep(2, full_algebra(2));
        FiberProduct fp = fiber_product(a, b, kTol);
        CHECK(sauvageot_crosscheck(a, b, fp, kTol).pass());
    }
    {
        RepresentedAlgebra a = trivial_rep(2, diagonal_algebra(2));
        RepresentedAlgebra b = trivial_rep(3, diagonal_algebra(3));
        FiberProduct fp = fiber_product(a, b, kTol);
        CHECK(sauvageot_crosscheck(a, b, fp, kTol).pass());
    }
    {
        auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
        RepresentedAlgebra a = base_rep(base, false);
        RepresentedAlgebra b = base_rep(base, true);
        FiberProduct fp = fiber_product(a, b, kTol);
        CHECK(sauvageot_crosscheck(a, b, fp, kTol).pass());
    }
}

TEST_CASE("structural properties of the fiber product") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    FiberProduct fp = fiber_product(a, b, kTol);
    Report props = check_fiber_properties(a, b, fp, kTol);
    CHECK(props.pass());
}

TEST_CASE("identity membership fails exactly when an induced action escapes") {
    ConcreteAlgebra proj = ConcreteAlgebra::from_space(
        OperatorSpace::span(2, 2, {Matrix::unit(2, 2, 0, 0)}, kTol), kTol);
    RepresentedAlgebra a = trivial_rep(2, proj);
    RepresentedAlgebra b = trivial_rep(2, full_algebra(2));
    FiberProduct fp = fiber_product(a, b, kTol);
    CHECK_FALSE(fp.algebra.contains(Matrix::identity(fp.rtp.dim), kTol));
    Report props = check_fiber_properties(a, b, fp, kTol);
    CHECK(props.pass()); // the biconditional itself holds on the negative instance
}

TEST_CASE("fiber product of bimodule algebras absorbs the outer actions") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    CStarBimodule u = unit_bimodule(base, kTol);
    FiberBimodule fb = fiber_bimodule(u, base.b, u, base.b_dag, kTol);
    CHECK(fb.checks.pass());
}

TEST_CASE("algebra morphisms: identity and amplification") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);

    AlgebraMorphism ident = algebra_morphism(a, a, a.algebra.basis(), MorKind::Full, kTol);
    CHECK(ident.checks.pass());

    ModuleSum sum = direct_sum_modules({a.module, a.module}, kTol);
    std::vector<Matrix> amp_images;
    std::vector<Matrix> sum_gens;
    for (const auto& x : a.algebra.basis()) {
        Matrix big = sum.injections[0] * x * sum.projections[0] +
                     sum.injections[1] * x * sum.projections[1];
        amp_images.push_back(big);
        sum_gens.push_back(big);
    }
    RepresentedAlgebra big{sum.total,
                           ConcreteAlgebra::from_space(
                               OperatorSpace::span(4, 4, sum_gens, kTol), kTol)};
    AlgebraMorphism amp = algebra_morphism(a, big, amp_images, MorKind::Full, kTol);
    CHECK(amp.checks.pass());
    CHECK(amp.intertwiners.dim() >= 2);

    // morphisms carry the induced action of the source onto the target
    for (const auto& y : base.b_dag.basis()) {
        Matrix rx_src = rho(a.module, y, kTol);
        Matrix rx_dst = rho(big.module, y, kTol);
        for (const auto& e : a.algebra.basis()) {
            Matrix lhs = amp.apply(a.algebra, e * rx_src, kTol);
            Matrix rhs = amp.apply(a.algebra, e, kTol) * rx_dst;
            CHECK((lhs - rhs).norm_max() < 1e-8);
        }
    }
}

TEST_CASE("induced homomorphism of the identity morphism is the identity") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    AlgebraMorphism ident = algebra_morphism(a, a, a.algebra.basis(), MorKind::Full, kTol);
    InducedHom ih = induced_hom(a, a, ident, b.module, kTol);
    CHECK(ih.checks.pass());
    // the induced map is defined on the fiber product, where it must fix
    // every element
    FiberProduct fp = fiber_product(a, b, kTol);
    for (const auto& x : fp.algebra.basis()) {
        Matrix y = ih.apply(x, kTol);
        CHECK((y - x).norm_max() < 1e-8);
    }
}

TEST_CASE("induced homomorphism maps the product into the target product") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);

    Matrix u = Matrix::from_rows({{cplx(1, 0), cplx(0, 0)}, {cplx(0, 0), cplx(0, 1)}});
    std::vector<Matrix> images;
    for (const auto& x : a.algebra.basis()) images.push_back(matmul_ABh(u * x, u));
    AlgebraMorphism conj = algebra_morphism(a, a, images, MorKind::Full, kTol);
    CHECK(conj.checks.pass());

    InducedHom ih = induced_hom(a, a, conj, b.module, kTol);
    FiberProduct fp = fiber_product(a, b, kTol);
    // for a unitary conjugation the induced map is conjugation by u (x) Id
    Matrix u_tensor_id = morphism_tensor(ih.src_rtp, ih.dst_rtp, u, Matrix::identity(2), kTol);
    for (const auto& x : fp.algebra.basis()) {
        Matrix y = ih.apply(x, kTol);
        CHECK(fp.algebra.space().membership_residual(y) <= 1e-7);
        CHECK((y - u_tensor_id * x * u_tensor_id.adjoint()).norm_max() < 1e-8);

        // the induced map restricts to the insertion-space map
        for (std::size_t j = 0; j < ih.src_rtp.n_right; ++j) {
            Matrix lhs = y * ih.dst_rtp.ket2[j];
            Matrix rhs = ih.j_map.apply(x * ih.src_rtp.ket2[j], kTol);
            CHECK((lhs - rhs).norm_max() < 1e-8);
        }
    }
}

TEST_CASE("unitary pair morphisms conjugate by the Kronecker product") {
    // over the trivial base the product morphism is Ad(u (x) v)
    RepresentedAlgebra a = trivial_rep(2, full_algebra(2));
    RepresentedAlgebra b = trivial_rep(2, full_algebra(2));
    Matrix u = cplx(1.0 / std::sqrt(2.0)) * Matrix::from_rows({{1, 1}, {1, -1}});
    Matrix v = Matrix::from_rows({{cplx(0, 1), 0}, {0, 1}});
    std::vector<Matrix> phi_img, psi_img;
    for (const auto& x : a.algebra.basis()) phi_img.push_back(matmul_ABh(u * x, u));
    for (const auto& x : b.algebra.basis()) psi_img.push_back(matmul_ABh(v * x, v));
    AlgebraMorphism phi = algebra_morphism(a, a, phi_img, MorKind::Full, kTol);
    AlgebraMorphism psi = algebra_morphism(b, b, psi_img, MorKind::Full, kTol);

    FiberProduct fp = fiber_product(a, b, kTol);
    const RelativeTensorProduct& r = fp.rtp;
    // the canonical coordinates over the trivial base are already Kronecker
    Matrix uv = Matrix::kron(u, v);
    Matrix lhs(r.dim, r.dim), rhs(r.dim, r.dim);
    for (std::size_t i = 0; i < r.n_left; ++i)
        for (std::size_t j = 0; j < r.n_right; ++j) {
            Matrix col = r.gen_coord(i, 0, j);
            Matrix kr = Matrix::kron(r.left.alpha.basis()[i], r.right.alpha.basis()[j]);
            lhs.set_block(0, i * r.n_right + j, col);
            rhs.set_block(0, i * r.n_right + j, kr);
        }
    double res = 0.0;
    Matrix wt = lstsq_solve(lhs.transpose(), rhs.transpose(), kTol, &res);
    REQUIRE(res < 1e-8);
    Matrix w = wt.transpose(); // product coordinates -> Kronecker coordinates
    for (const auto& x : fp.algebra.basis()) {
        FiberMorphismResult fm = fiber_morphism(a, b, a, b, phi, psi, x, kTol);
        Matrix expected = w.adjoint() * uv * w * x * w.adjoint() * uv.adjoint() * w;
        CHECK((fm.value - expected).norm_max() < 1e-8);
    }
}

TEST_CASE("fiber product morphism orders agree and land in the target") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);

    Matrix u = Matrix::from_rows({{cplx(0, 1), 0}, {0, 1}});
    std::vector<Matrix> phi_img, psi_img;
    for (const auto& x : a.algebra.basis()) phi_img.push_back(matmul_ABh(u * x, u));
    for (const auto& x : b.algebra.basis()) psi_img.push_back(matmul_ABh(u * x, u));
    AlgebraMorphism phi = algebra_morphism(a, a, phi_img, MorKind::Full, kTol);
    AlgebraMorphism psi = algebra_morphism(b, b, psi_img, MorKind::Full, kTol);

    FiberProduct fp = fiber_product(a, b, kTol);
    for (const auto& x : fp.algebra.basis()) {
        FiberMorphismResult fm = fiber_morphism(a, b, a, b, phi, psi, x, kTol);
        CHECK(fm.checks.pass());
        CHECK(fp.algebra.space().membership_residual(fm.value) <= 1e-7);
    }
}

TEST_CASE("choi ingestion produces a kraus family") {
    Matrix choi(4, 4);
    choi(0, 0) = 1.0;
    choi(3, 3) = 1.0;
    auto kraus = kraus_from_choi(choi, 2, 2, kTol);
    CHECK(kraus.size() == 2);
    Matrix y = Matrix::from_rows({{1, 2}, {3, 4}});
    Matrix out(2, 2);
    for (const auto& v : kraus) out += matmul_AhB(v, y * v);
    CHECK((out - Matrix::diag({1.0, 4.0})).norm_max() < 1e-10);

    Matrix bad = Matrix::diag({1.0, -1.0, 0.0, 0.0});
    CHECK_THROWS_AS(kraus_from_choi(bad, 2, 2, kTol), Error);
}

TEST_CASE("cp slice of the identity map is unitarily the original operator") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    FiberProduct fp = fiber_product(a, b, kTol);
    const RelativeTensorProduct& r = fp.rtp;

    std::vector<Matrix> kraus = {Matrix::identity(a.module.h_dim)};
    for (const auto& x : fp.algebra.basis()) {
        SliceCp sc = slice_cp(kraus, a, r, x, a.module.h_dim, kTol);
        CHECK(sc.checks.pass());
        CHECK(sc.out_dim == r.dim);
        Matrix lhs(sc.out_dim, a.module.h_dim * r.n_right),
            rhs(r.dim, a.module.h_dim * r.n_right);
        for (std::size_t p = 0; p < a.module.h_dim; ++p)
            for (std::size_t j = 0; j < r.n_right; ++j) {
                for (std::size_t c = 0; c < sc.out_dim; ++c)
                    lhs(c, p * r.n_right + j) = sc.coords(p * r.n_right + j, c);
                Matrix target = r.ket2[j].col(p);
                for (std::size_t c = 0; c < r.dim; ++c)
                    rhs(c, p * r.n_right + j) = target(c, 0);
            }
        double res = 0.0;
        Matrix wt = lstsq_solve(lhs.transpose(), rhs.transpose(), kTol, &res);
        REQUIRE(res < 1e-8);
        Matrix w = wt.transpose();
        CHECK((w * sc.value - x * w).norm_max() < 1e-7);
    }
}

TEST_CASE("cp slice preserves positivity") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    FiberProduct fp = fiber_product(a, b, kTol);

    std::mt19937_64 rng(11);
    std::vector<Matrix> kraus = {random_matrix(rng, a.module.h_dim, 2)};
    for (int trial = 0; trial < 10; ++trial) {
        Matrix y(fp.rtp.dim, fp.rtp.dim);
        for (const auto& t : fp.algebra.basis()) {
            std::normal_distribution<double> dist(0.0, 1.0);
            y += cplx(dist(rng), dist(rng)) * t;
        }
        Matrix x = matmul_AhB(y, y);
        SliceCp sc = slice_cp(kraus, a, fp.rtp, x, 2, kTol);
        CHECK(sc.checks.pass());
        EigResult eg = eig_hermitian(sc.value.hermitized());
        if (!eg.values.empty()) CHECK(eg.values.front() >= -1e-8);
    }
}

TEST_CASE("cp slice preserves positivity of two-by-two amplifications") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    FiberProduct fp = fiber_product(a, b, kTol);
    const std::size_t d = fp.rtp.dim;

    std::mt19937_64 rng(13);
    std::vector<Matrix> kraus = {random_matrix(rng, a.module.h_dim, 2)};
    for (int trial = 0; trial < 5; ++trial) {
        // a positive 2x2 block matrix with product entries: X = Y^H Y
        std::normal_distribution<double> dist(0.0, 1.0);
        Matrix y11(d, d), y12(d, d), y21(d, d), y22(d, d);
        for (const auto& t : fp.algebra.basis()) {
            y11 += cplx(dist(rng), dist(rng)) * t;
            y12 += cplx(dist(rng), dist(rng)) * t;
            y21 += cplx(dist(rng), dist(rng)) * t;
            y22 += cplx(dist(rng), dist(rng)) * t;
        }
        Matrix x11 = matmul_AhB(y11, y11) + matmul_AhB(y21, y21);
        Matrix x12 = matmul_AhB(y11, y12) + matmul_AhB(y21, y22);
        Matrix x21 = x12.adjoint();
        Matrix x22 = matmul_AhB(y12, y12) + matmul_AhB(y22, y22);

        SliceCp s11 = slice_cp(kraus, a, fp.rtp, x11, 2, kTol);
        SliceCp s12 = slice_cp(kraus, a, fp.rtp, x12, 2, kTol);
        SliceCp s21 = slice_cp(kraus, a, fp.rtp, x21, 2, kTol);
        SliceCp s22 = slice_cp(kraus, a, fp.rtp, x22, 2, kTol);

        const std::size_t od = s11.out_dim;
        Matrix amplified(2 * od, 2 * od);
        amplified.set_block(0, 0, s11.value);
        amplified.set_block(0, od, s12.value);
        amplified.set_block(od, 0, s21.value);
        amplified.set_block(od, od, s22.value);
        EigResult eg = eig_hermitian(amplified.hermitized());
        if (!eg.values.empty()) CHECK(eg.values.front() >= -1e-8);
    }
}

TEST_CASE("spatial slice: identity family fixes the element") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    FiberProduct fp = fiber_product(a, b, kTol);
    for (const auto& x : fp.algebra.basis()) {
        SliceSpatial ss = slice_spatial({Matrix::identity(2)}, {Matrix::identity(2)},
                                        a.module, a, b, fp, x, kTol, &a.algebra);
        CHECK(ss.checks.pass());
        CHECK((ss.value - x).norm_max() < 1e-8);
    }
}

TEST_CASE("spatial slice with leg families reduces to the insertion slice map") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    FiberProduct fp = fiber_product(a, b, kTol);

    std::vector<Matrix> fam = a.module.alpha.basis();
    for (const auto& x : fp.algebra.basis()) {
        SliceSpatial ss = slice_spatial(fam, fam, a.module, a, b, fp, x, kTol);
        CHECK(ss.checks.pass());
        Matrix direct(b.module.h_dim, b.module.h_dim);
        for (std::size_t n = 0; n < fam.size(); ++n)
            direct += matmul_AhB(fp.rtp.ket1[n], x * fp.rtp.ket1[n]);
        UnitIso lu = unit_l(unit_bimodule(base, kTol), kTol);
        REQUIRE(lu.checks.pass());
        Matrix collapsed = lu.u * ss.value * lu.u.adjoint();
        CHECK((collapsed - direct).norm_max() < 1e-7);
    }
}

TEST_CASE("spatial slice norm bound") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    FiberProduct fp = fiber_product(a, b, kTol);
    std::vector<Matrix> fam = a.module.alpha.basis();
    Matrix ssum(2, 2);
    for (const auto& s : fam) ssum += matmul_AhB(s, s);
    const double bound = op_norm(ssum);
    for (const auto& x : fp.algebra.basis()) {
        SliceSpatial ss = slice_spatial(fam, fam, a.module, a, b, fp, x, kTol);
        CHECK(op_norm(ss.value) <= bound * op_norm(x) + 1e-8);
    }
}

TEST_CASE("unit collapse equalities") {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    Report rep = unitality_check(a, kTol);
    CHECK(rep.pass());

    RepresentedAlgebra dag = base_rep(base, true);
    FiberProduct fp = fiber_product(a, dag, kTol);
    UnitIso ru = unit_r(unit_bimodule(base, kTol), kTol);
    std::vector<Matrix> conj;
    for (const auto& t : fp.algebra.basis()) conj.push_back(ru.u * t * ru.u.adjoint());
    OperatorSpace collapsed = OperatorSpace::span(base.k_dim, base.k_dim, conj, kTol);
    ConcreteAlgebra mb = multiplier_algebra(base.b, kTol);
    ConcreteAlgebra mbd = multiplier_algebra(base.b_dag, kTol);
    OperatorSpace expect = space_intersection(mb.space(), mbd.space(), kTol);
    CHECK(collapsed.equality_residual(expect) <= kTol.residual_abs);
}

TEST_CASE("full algebras over trivial bases compare as associative") {
    CStarBase t = trivial_base(kTol);
    auto bim = [&](std::size_t n) {
        return make_bimodule(t, t, OperatorSpace::full(1, n), OperatorSpace::full(1, n), kTol);
    };
    Report rep = assoc_compare(bim(2), full_algebra(2), bim(2), full_algebra(2), bim(2),
                               full_algebra(2), kTol);
    CHECK(rep.pass());
    for (const auto& c : rep.checks)
        if (c.name.find("assoc_compare") == 0 && c.name.find("dims") == std::string::npos)
            CHECK(c.residual <= kTol.residual_abs);
}

TEST_CASE("diagonal algebras over trivial bases compare as associative") {
    CStarBase t = trivial_base(kTol);
    auto bim = [&](std::size_t n) {
        return make_bimodule(t, t, OperatorSpace::full(1, n), OperatorSpace::full(1, n), kTol);
    };
    Report rep = assoc_compare(bim(2), diagonal_algebra(2), bim(2), diagonal_algebra(2), bim(2),
                               diagonal_algebra(2), kTol);
    CHECK(rep.pass());
    for (const auto& c : rep.checks)
        if (c.name.find("assoc_compare") == 0 && c.name.find("dims") == std::string::npos)
            CHECK(c.residual <= kTol.residual_abs);
}

TEST_CASE("direct sums of represented algebras are compatible with the product") {
    RepresentedAlgebra a1 = trivial_rep(1, diagonal_algebra(1));
    RepresentedAlgebra a2 = trivial_rep(2, diagonal_algebra(2));
    AlgebraSumCompat sc = algebra_direct_sum({a1, a2}, {a1, a2}, kTol);
    CHECK(sc.checks.pass());

    AlgebraSumCompat single = algebra_direct_sum({a2}, {a2}, kTol);
    CHECK(single.checks.pass());

    // only finite nonempty families are accepted
    CHECK_THROWS_AS(algebra_direct_sum({}, {a1}, kTol), Error);
}
