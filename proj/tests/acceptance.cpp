// Acceptance suite: one check per release criterion, each printed as a
// single pass/fail line. Exit status is nonzero when any criterion fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "cstar/commutative.hpp"
#include "cstar/eig.hpp"
#include "cstar/instance.hpp"

using namespace cstar;

namespace {

const Tolerance kTol;
int g_failures = 0;

void record(int id, const std::string& label, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                detail.empty() ? "" : "  -- ", detail.c_str());
    if (!pass) ++g_failures;
}

void run(int id, const std::string& label, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
        auto [ok, detail] = fn();
        record(id, label, ok, detail);
    } catch (const std::exception& e) {
        record(id, label, false, std::string("exception: ") + e.what());
    }
}

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

RepresentedAlgebra base_rep(const CStarBase& base, bool dagger_side) {
    if (!dagger_side) return {make_module(base, base.b.space(), kTol), base.b};
    return {make_module(opposite_base(base), base.b_dag.space(), kTol), base.b_dag};
}

// block-diagonal algebra adapted to a bundle decomposition
ConcreteAlgebra bundle_block_algebra(const Bundle& b) {
    const std::size_t total = b.total();
    std::vector<Matrix> gens;
    std::size_t off = 0;
    for (std::size_t d : b.fiber_dims) {
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                gens.push_back(Matrix::unit(total, total, off + i, off + j));
        off += d;
    }
    return ConcreteAlgebra::from_space(OperatorSpace::span(total, total, gens, kTol), kTol);
}

struct CorpusEntry {
    std::string name;
    RepresentedAlgebra a, b;
};

// nondegenerate instances used by the crosscheck and property criteria
std::vector<CorpusEntry> nondegenerate_corpus() {
    std::vector<CorpusEntry> out;
    {
        auto [b2, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
        out.push_back({"state-c2-half", base_rep(b2, false), base_rep(b2, true)});
        RepresentedAlgebra full_left{make_module(b2, b2.b.space(), kTol), full_algebra(2)};
        out.push_back({"state-c2-fullleft", full_left, base_rep(b2, true)});
        RepresentedAlgebra full_right{make_module(opposite_base(b2), b2.b_dag.space(), kTol),
                                      full_algebra(2)};
        out.push_back({"state-c2-fullright", base_rep(b2, false), full_right});
    }
    {
        auto [b2, g] = gns_base({1, 1}, {0.25, 0.75}, kTol);
        out.push_back({"state-c2-quarter", base_rep(b2, false), base_rep(b2, true)});
    }
    {
        auto [b3, g] = gns_base({1, 1, 1}, {0.2, 0.3, 0.5}, kTol);
        out.push_back({"state-c3", base_rep(b3, false), base_rep(b3, true)});
    }
    {
        // over a noncommutative base the factors must absorb the induced
        // actions; the full algebra and the linking span both do
        auto [bm2, g] = gns_base({2}, {0.5, 0.5}, kTol);
        RepresentedAlgebra left{make_module(bm2, bm2.b.space(), kTol), full_algebra(4)};
        RepresentedAlgebra right{make_module(opposite_base(bm2), bm2.b_dag.space(), kTol),
                                 full_algebra(4)};
        out.push_back({"state-m2-trace", left, right});
    }
    {
        auto [bx, g] = gns_base({1, 2}, {0.2, 0.4, 0.4}, kTol);
        std::vector<Matrix> linking = bx.b.basis();
        for (const auto& x : bx.b_dag.basis()) linking.push_back(x);
        ConcreteAlgebra link = generated_algebra(linking, false, kTol);
        RepresentedAlgebra left{make_module(bx, bx.b.space(), kTol), link};
        RepresentedAlgebra right{make_module(opposite_base(bx), bx.b_dag.space(), kTol), link};
        out.push_back({"state-c1m2-linking", left, right});
    }
    out.push_back({"trivial-full-2x2", trivial_rep(2, full_algebra(2)),
                   trivial_rep(2, full_algebra(2))});
    out.push_back({"trivial-diag-2x3", trivial_rep(2, diagonal_algebra(2)),
                   trivial_rep(3, diagonal_algebra(3))});
    out.push_back({"trivial-mixed", trivial_rep(2, full_algebra(2)),
                   trivial_rep(2, diagonal_algebra(2))});
    {
        DiscreteBase db = discrete_base({1.0, 2.0}, kTol);
        Bundle bh{{1, 2}}, bk{{2, 1}};
        CStarModule hm = bundle_module(db, bh, kTol);
        CStarModule km0 = bundle_module(db, bk, kTol);
        CStarModule km = make_module(opposite_base(db.base), km0.alpha, kTol);
        out.push_back({"bundle-z2",
                       RepresentedAlgebra{hm, bundle_block_algebra(bh)},
                       RepresentedAlgebra{km, bundle_block_algebra(bk)}});
    }
    return out;
}

std::pair<bool, std::string> criterion_1() {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t h = dim(rng), k = dim(rng);
        while (h * k > 64) {
            h = dim(rng);
            k = dim(rng);
        }
        // random modules over the trivial base: random spanning generators
        std::vector<Matrix> hg, kg;
        for (std::size_t i = 0; i < h; ++i) hg.push_back(random_matrix(rng, h, 1));
        for (std::size_t i = 0; i < k; ++i) kg.push_back(random_matrix(rng, k, 1));
        CStarBase t = trivial_base(kTol);
        CStarModule hm = make_module(t, OperatorSpace::span(1, h, hg, kTol), kTol);
        CStarModule km = make_module(t, OperatorSpace::span(1, k, kg, kTol), kTol);
        RelativeTensorProduct r = rtp_construct(hm, km, kTol);
        if (r.dim != h * k) return {false, "dimension " + std::to_string(r.dim)};

        // canonical identification with the Kronecker product
        const std::size_t ngen = r.n_left * r.n_right;
        Matrix lhs(r.dim, ngen), rhs(h * k, ngen);
        for (std::size_t i = 0; i < r.n_left; ++i)
            for (std::size_t j = 0; j < r.n_right; ++j) {
                const std::size_t g = r.gen_index(i, 0, j);
                for (std::size_t c = 0; c < r.dim; ++c) lhs(c, i * r.n_right + j) = r.coords(g, c);
                Matrix kr = Matrix::kron(hm.alpha.basis()[i], km.alpha.basis()[j]);
                for (std::size_t c = 0; c < h * k; ++c) rhs(c, i * r.n_right + j) = kr(c, 0);
            }
        double res = 0.0;
        Matrix ut = lstsq_solve(lhs.transpose(), rhs.transpose(), kTol, &res);
        Matrix u = ut.transpose();
        worst = std::max(worst, res);
        worst = std::max(worst, (matmul_AhB(u, u) - Matrix::identity(r.dim)).norm_max());
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max residual %.2e over 20 pairs", worst);
    return {worst <= 1e-8, buf};
}

std::pair<bool, std::string> criterion_2() {
    std::vector<std::pair<std::vector<double>, std::pair<Bundle, Bundle>>> cases = {
        {{1.0, 2.0}, {Bundle{{1, 2}}, Bundle{{2, 1}}}},
        {{0.5, 1.0, 2.0}, {Bundle{{1, 2, 3}}, Bundle{{3, 1, 2}}}},
        {{1.0, 1.0, 1.0, 1.0}, {Bundle{{2, 2, 1, 3}}, Bundle{{1, 3, 2, 2}}}},
        {{2.0, 0.25}, {Bundle{{3, 3}}, Bundle{{3, 3}}}},
    };
    double worst = 0.0;
    for (const auto& [weights, bundles] : cases) {
        DiscreteBase db = discrete_base(weights, kTol);
        FiberwiseIso iso = fiberwise_rtp_iso(db, bundles.first, bundles.second, kTol);
        std::size_t expect = 0;
        for (std::size_t z = 0; z < weights.size(); ++z)
            expect += bundles.first.fiber_dims[z] * bundles.second.fiber_dims[z];
        if (iso.rtp.dim != expect)
            return {false, "dimension " + std::to_string(iso.rtp.dim) + " expected " +
                               std::to_string(expect)};
        worst = std::max(worst,
                         (matmul_AhB(iso.u, iso.u) - Matrix::identity(iso.rtp.dim)).norm_max());
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max unitarity defect %.2e", worst);
    return {worst <= 1e-8, buf};
}

std::pair<bool, std::string> criterion_3() {
    auto corpus = nondegenerate_corpus();
    if (corpus.size() < 10) return {false, "corpus too small"};
    double worst = 0.0;
    for (const auto& entry : corpus) {
        FiberProduct fp = fiber_product(entry.a, entry.b, kTol);
        Report rep = sauvageot_crosscheck(entry.a, entry.b, fp, kTol);
        if (!rep.pass()) return {false, "instance " + entry.name};
        worst = std::max(worst, rep.max_residual());
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu instances, max residual %.2e", corpus.size(), worst);
    return {worst <= 1e-8, buf};
}

std::pair<bool, std::string> criterion_4() {
    std::vector<std::pair<OperatorSpace, ConcreteAlgebra>> cases;
    cases.emplace_back(OperatorSpace::span(2, 2, {Matrix::identity(2)}, kTol),
                       diagonal_algebra(2));
    cases.emplace_back(OperatorSpace::span(3, 3, {Matrix::identity(3)}, kTol), full_algebra(3));
    {
        Matrix u = Matrix::from_rows({{0, 1}, {1, 0}});
        cases.emplace_back(OperatorSpace::span(2, 2, {u}, kTol), full_algebra(2));
        Matrix u3(3, 3);
        u3(0, 1) = 1.0;
        u3(1, 2) = 1.0;
        u3(2, 0) = 1.0;
        cases.emplace_back(OperatorSpace::span(3, 3, {u3}, kTol), diagonal_algebra(3));
    }
    {
        auto [b2, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
        cases.emplace_back(b2.b.space(), b2.b);
        cases.emplace_back(b2.b_dag.space(), b2.b_dag);
    }
    {
        auto [bm2, g] = gns_base({2}, {0.5, 0.5}, kTol);
        cases.emplace_back(bm2.b.space(), bm2.b);
    }
    {
        DiscreteBase db = discrete_base({1.0, 2.0}, kTol);
        Bundle bh{{1, 2}};
        CStarModule hm = bundle_module(db, bh, kTol);
        cases.emplace_back(hm.alpha, db.base.b);
        cases.emplace_back(hm.alpha, diagonal_algebra(2));
    }
    cases.emplace_back(OperatorSpace::full(1, 2), full_algebra(1));

    if (cases.size() < 10) return {false, "corpus too small"};
    double worst = 0.0;
    for (const auto& [i_space, a] : cases) {
        IndResult res = ind(i_space, a, kTol);
        std::vector<Matrix> iai;
        for (const auto& s : i_space.basis())
            for (const auto& x : a.basis())
                for (const auto& s2 : i_space.basis()) iai.push_back(matmul_ABh(s * x, s2));
        OperatorSpace span_iai =
            OperatorSpace::span(i_space.cod_dim(), i_space.cod_dim(), iai, kTol);
        worst = std::max(worst, res.algebra.space().equality_residual(span_iai));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu instances, max equality residual %.2e", cases.size(),
                  worst);
    return {worst <= 1e-8, buf};
}

std::pair<bool, std::string> criterion_5() {
    auto corpus = nondegenerate_corpus();
    double worst = 0.0;
    for (const auto& entry : corpus) {
        FiberProduct fp = fiber_product(entry.a, entry.b, kTol);
        Report rep = check_fiber_properties(entry.a, entry.b, fp, kTol);
        if (!rep.pass()) return {false, "instance " + entry.name};
        worst = std::max(worst, rep.max_residual());
    }
    // negative direction of the identity criterion: the scalars escape A
    ConcreteAlgebra proj = ConcreteAlgebra::from_space(
        OperatorSpace::span(2, 2, {Matrix::unit(2, 2, 0, 0)}, kTol), kTol);
    RepresentedAlgebra a = trivial_rep(2, proj);
    RepresentedAlgebra b = trivial_rep(2, full_algebra(2));
    FiberProduct fp = fiber_product(a, b, kTol);
    const bool id_excluded = !fp.algebra.contains(Matrix::identity(fp.rtp.dim), kTol);
    Report neg = check_fiber_properties(a, b, fp, kTol);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "max residual %.2e, negative instance %s", worst,
                  id_excluded ? "excluded" : "NOT excluded");
    return {worst <= 1e-8 && id_excluded && neg.pass(), buf};
}

std::pair<bool, std::string> criterion_6() {
    // The collapse identities need the leg to absorb the dagger algebra
    // under right composition, which pins the instances to commutative
    // bases (the noncommutative constraint spans are vacuous).
    double worst = 0.0;
    std::vector<CStarBase> bases;
    {
        auto [b2, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
        bases.push_back(b2);
    }
    {
        auto [b2q, g] = gns_base({1, 1}, {0.25, 0.75}, kTol);
        bases.push_back(b2q);
    }
    {
        auto [b3, g] = gns_base({1, 1, 1}, {0.25, 0.25, 0.5}, kTol);
        bases.push_back(b3);
    }
    bases.push_back(discrete_base({1.0, 0.5, 2.0, 1.0}, kTol).base);
    for (const auto& base : bases) {
        Report rep = unitality_check(base_rep(base, false), kTol);
        if (!rep.pass()) return {false, "collapse identities fail"};
        worst = std::max(worst, rep.max_residual());

        // a second left factor: the full algebra on the base space
        RepresentedAlgebra full_left{make_module(base, base.b.space(), kTol),
                                     full_algebra(base.k_dim)};
        Report rep2 = unitality_check(full_left, kTol);
        if (!rep2.pass()) return {false, "full-factor collapse fails"};
        worst = std::max(worst, rep2.max_residual());
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max equality residual %.2e", worst);
    return {worst <= 1e-8, buf};
}

std::pair<bool, std::string> criterion_7() {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    CStarBase t = trivial_base(kTol);
    CStarBimodule h = make_bimodule(t, base, OperatorSpace::full(1, 2), base.b.space(), kTol);
    CStarBimodule u = unit_bimodule(base, kTol);
    CStarBimodule l = make_bimodule(base, t, base.b_dag.space(), OperatorSpace::full(1, 2), kTol);

    AssocResult ar = assoc_iso(h, u, l, kTol);
    if (!ar.checks.pass()) return {false, "associator checks"};
    double worst = ar.checks.max_residual();

    // triangle with the unit in the middle
    UnitIso ru = unit_r(h, kTol);
    UnitIso lu = unit_l(l, kTol);
    RelativeTensorProduct hl = rtp_construct(h.beta_module(), l.alpha_module(), kTol);
    Matrix r_tensor_id =
        morphism_tensor(ar.left_nested.rtp, hl, ru.u, Matrix::identity(l.h_dim), kTol);
    Matrix id_tensor_l =
        morphism_tensor(ar.right_nested.rtp, hl, Matrix::identity(h.h_dim), lu.u, kTol);
    worst = std::max(worst, (r_tensor_id - id_tensor_l * ar.a).norm_max());

    char buf[64];
    std::snprintf(buf, sizeof(buf), "max residual %.2e", worst);
    return {worst <= 1e-8, buf};
}

std::pair<bool, std::string> criterion_8() {
    double worst = 0.0;
    for (auto& [blocks, weights] :
         std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>>{
             {{1, 1}, {0.5, 0.5}}, {{2}, {0.5, 0.5}}}) {
        auto [base, g] = gns_base(blocks, weights, kTol);
        if (!check_base(base, kTol).pass()) return {false, "base axioms"};
        OperatorSpace comm = commutant_space(base.b.basis(), base.k_dim, kTol);
        if (comm.dim() != base.b_dag.dim()) return {false, "commutant dimension"};
        worst = std::max(worst,
                         (matmul_AhB(g.j, g.j) - Matrix::identity(g.gns_dim)).norm_max());
        worst = std::max(worst,
                         (g.j * g.j.conjugate() - Matrix::identity(g.gns_dim)).norm_max());
        for (std::size_t r = 0; r < g.algebra_dim; ++r)
            worst = std::max(
                worst, (g.pi_op[r] - g.j * g.pi[r].transpose() * g.j.conjugate()).norm_max());
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max identity defect %.2e", worst);
    return {worst <= 1e-10, buf};
}

std::pair<bool, std::string> criterion_9() {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);

    struct Case {
        RepresentedAlgebra c, d;
        AlgebraMorphism phi, psi;
    };
    std::vector<Case> cases;
    AlgebraMorphism ida = algebra_morphism(a, a, a.algebra.basis(), MorKind::Full, kTol);
    AlgebraMorphism idb = algebra_morphism(b, b, b.algebra.basis(), MorKind::Full, kTol);
    cases.push_back({a, b, ida, idb});

    auto conj_morphism = [&](const RepresentedAlgebra& x, const Matrix& u) {
        std::vector<Matrix> img;
        for (const auto& e : x.algebra.basis()) img.push_back(matmul_ABh(u * e, u));
        return algebra_morphism(x, x, img, MorKind::Full, kTol);
    };
    Matrix u1 = Matrix::from_rows({{cplx(0, 1), 0}, {0, 1}});
    Matrix u2 = Matrix::from_rows({{1, 0}, {0, cplx(-1, 0)}});
    cases.push_back({a, b, conj_morphism(a, u1), idb});
    cases.push_back({a, b, conj_morphism(a, u1), conj_morphism(b, u2)});
    cases.push_back({a, b, conj_morphism(a, u2), conj_morphism(b, u1)});

    // amplification into the doubled module
    ModuleSum sum = direct_sum_modules({a.module, a.module}, kTol);
    std::vector<Matrix> amp_img;
    for (const auto& x : a.algebra.basis())
        amp_img.push_back(sum.injections[0] * x * sum.projections[0] +
                          sum.injections[1] * x * sum.projections[1]);
    RepresentedAlgebra big{sum.total, ConcreteAlgebra::from_space(
                                          OperatorSpace::span(4, 4, amp_img, kTol), kTol)};
    AlgebraMorphism amp = algebra_morphism(a, big, amp_img, MorKind::Full, kTol);
    cases.push_back({big, b, amp, idb});

    if (cases.size() < 5) return {false, "need five instances"};

    FiberProduct fp = fiber_product(a, b, kTol);
    double worst = 0.0;
    for (const auto& cse : cases) {
        FiberProduct target = fiber_product(cse.c, cse.d, kTol);
        for (const auto& x : fp.algebra.basis()) {
            FiberMorphismResult fm = fiber_morphism(a, b, cse.c, cse.d, cse.phi, cse.psi, x, kTol);
            worst = std::max(worst, fm.order_disagreement);
            worst = std::max(worst, target.algebra.space().membership_residual(fm.value));
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "5 morphism pairs, max residual %.2e", worst);
    return {worst <= 1e-8, buf};
}

std::pair<bool, std::string> criterion_10() {
    auto [base, g] = gns_base({1, 1}, {0.5, 0.5}, kTol);
    RepresentedAlgebra a = base_rep(base, false);
    RepresentedAlgebra b = base_rep(base, true);
    FiberProduct fp = fiber_product(a, b, kTol);

    std::mt19937_64 rng(2024);
    std::vector<Matrix> kraus = {random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)};
    double min_eig = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Matrix y(fp.rtp.dim, fp.rtp.dim);
        std::normal_distribution<double> dist(0.0, 1.0);
        for (const auto& t : fp.algebra.basis()) y += cplx(dist(rng), dist(rng)) * t;
        Matrix x = matmul_AhB(y, y);
        SliceCp sc = slice_cp(kraus, a, fp.rtp, x, 2, kTol);
        if (!sc.checks.pass()) return {false, "slice entries"};
        EigResult eg = eig_hermitian(sc.value.hermitized());
        if (!eg.values.empty()) min_eig = std::min(min_eig, eg.values.front());
    }

    // spatial slice identity
    std::vector<Matrix> fam = a.module.alpha.basis();
    double worst = 0.0;
    for (const auto& x : fp.algebra.basis()) {
        SliceSpatial ss = slice_spatial(fam, fam, a.module, a, b, fp, x, kTol);
        for (const auto& c : ss.checks.checks)
            if (c.name == "slice_spatial.slice_identity") worst = std::max(worst, c.residual);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "min slice eigenvalue %.2e, slice identity %.2e", min_eig,
                  worst);
    return {min_eig >= -1e-8 && worst <= 1e-8, buf};
}

std::pair<bool, std::string> criterion_11() {
    // module level
    CStarBase t = trivial_base(kTol);
    auto bim = [&](std::size_t n) {
        return make_bimodule(t, t, OperatorSpace::full(1, n), OperatorSpace::full(1, n), kTol);
    };
    SumCompat sc = direct_sum_compat({bim(1), bim(2)}, {bim(2), bim(1)}, kTol);
    double worst =
        (sc.to_parts * sc.to_big - Matrix::identity(sc.to_big.cols())).norm_max();
    worst = std::max(worst,
                     (sc.to_big * sc.to_parts - Matrix::identity(sc.big.rtp.dim)).norm_max());

    // algebra level
    RepresentedAlgebra a1 = trivial_rep(1, diagonal_algebra(1));
    RepresentedAlgebra a2 = trivial_rep(2, diagonal_algebra(2));
    AlgebraSumCompat asc = algebra_direct_sum({a1, a2}, {a1, a2}, kTol);
    Matrix resolution(asc.big.rtp.dim, asc.big.rtp.dim);
    for (const auto& u : asc.embeddings) resolution += matmul_ABh(u, u);
    worst = std::max(worst, (resolution - Matrix::identity(asc.big.rtp.dim)).norm_max());
    for (std::size_t idx = 0; idx < asc.components.size(); ++idx)
        for (const auto& x : asc.components[idx].algebra.basis()) {
            const Matrix& u = asc.embeddings[idx];
            worst = std::max(worst, (matmul_AhB(u, (u * x * u.adjoint()) * u) - x).norm_max());
        }
    for (const auto& y : asc.big.algebra.basis()) {
        Matrix back(asc.big.rtp.dim, asc.big.rtp.dim);
        for (const auto& u : asc.embeddings) back += u * matmul_AhB(u, y * u) * u.adjoint();
        worst = std::max(worst, (back - y).norm_max());
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "max composition defect %.2e", worst);
    return {worst <= 1e-10, buf};
}

std::pair<bool, std::string> criterion_12() {
    std::vector<ConcreteAlgebra> corpus;
    corpus.push_back(diagonal_algebra(2));
    corpus.push_back(diagonal_algebra(3));
    corpus.push_back(full_algebra(2));
    corpus.push_back(full_algebra(4));
    {
        auto [bm2, g] = gns_base({2}, {0.5, 0.5}, kTol);
        corpus.push_back(bm2.b);
        corpus.push_back(bm2.b_dag);
    }
    {
        auto [b3, g] = gns_base({1, 2}, {0.2, 0.4, 0.4}, kTol);
        corpus.push_back(b3.b);
    }
    corpus.push_back(bundle_block_algebra(Bundle{{1, 2}}));
    corpus.push_back(bundle_block_algebra(Bundle{{2, 3, 1}}));
    {
        // amplified full algebra on a 16-dimensional ambient space
        std::vector<Matrix> gens;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                gens.push_back(Matrix::kron(Matrix::unit(4, 4, i, j), Matrix::identity(4)));
        corpus.push_back(ConcreteAlgebra::from_space(
            OperatorSpace::span(16, 16, gens, kTol), kTol));
    }
    {
        std::mt19937_64 rng(55);
        Matrix h = random_matrix(rng, 4, 4);
        corpus.push_back(generated_algebra({(h + h.adjoint()).hermitized()}, true, kTol));
    }

    double worst = 0.0;
    for (const auto& alg : corpus) {
        if (!alg.contains_id(kTol)) return {false, "corpus algebra not unital"};
        const std::size_t n = alg.amb_dim();
        auto comm = commutant(alg.basis(), n, kTol);
        auto bicomm = commutant(comm, n, kTol);
        OperatorSpace bi = OperatorSpace::from_orthonormal(n, n, bicomm);
        worst = std::max(worst, bi.equality_residual(alg.space()));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu algebras, max equality residual %.2e", corpus.size(),
                  worst);
    return {worst <= 1e-8, buf};
}

} // namespace

int main() {
    run(1, "trivial-base collapse onto the Kronecker product", criterion_1);
    run(2, "discrete-bundle fiberwise identification", criterion_2);
    run(3, "commutant-route crosscheck on the nondegenerate corpus", criterion_3);
    run(4, "induction collapses to the conjugated span", criterion_4);
    run(5, "structural property suite with a negative identity instance", criterion_5);
    run(6, "unit collapse onto restricted and multiplier algebras", criterion_6);
    run(7, "associator coherence and the triangle relation", criterion_7);
    run(8, "state bases: axioms, commutant dimension, conjugation identities", criterion_8);
    run(9, "functoriality: composition orders and target membership", criterion_9);
    run(10, "slice maps: positivity and the insertion identity", criterion_10);
    run(11, "finite direct sums compose to the identity", criterion_11);
    run(12, "double commutant recovers every unital corpus algebra", criterion_12);

    std::printf("NOTE: norm-divergent counterexamples (strict non-associativity, the flip\n"
                "      exclusion, infinite sums and products) need infinite dimensions and\n"
                "      are out of scope here; the comparison commands only report.\n");
    std::printf("%s: %d of 12 criteria failed\n", g_failures ? "FAIL" : "OK", g_failures);
    return g_failures ? 1 : 0;
}
