#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "cstar/instance.hpp"

using namespace cstar;

namespace {

void print_matrix(const Matrix& m, std::ostream& os) {
    char buf[96];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%+.9e%+.9ei ", m(i, j).real(), m(i, j).imag());
            os << buf;
        }
        os << "\n";
    }
}

void dump_basis(const std::string& label, const std::vector<Matrix>& basis, std::ostream& os) {
    os << label << " dim=" << basis.size() << "\n";
    for (std::size_t i = 0; i < basis.size(); ++i) {
        os << label << "[" << i << "]\n";
        print_matrix(basis[i], os);
    }
}

int finish(const Report& rep, const std::string& json_out) {
    rep.print(std::cout);
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) {
            std::cerr << "cannot write report to '" << json_out << "'\n";
            return 3;
        }
        out << rep.to_json() << "\n";
    }
    return rep.pass() ? 0 : 2;
}

Report instance_checks(const Instance& inst) {
    Report rep;
    for (const auto& [name, base] : inst.bases) rep.merge(check_base(base, inst.tol), name);
    for (const auto& [name, db] : inst.discrete_bases)
        rep.merge(check_base(db.base, inst.tol), name);
    for (const auto& [name, m] : inst.modules) rep.merge(check_module(m, inst.tol), name);
    for (const auto& [name, m] : inst.bimodules) rep.merge(check_bimodule(m, inst.tol), name);
    for (const auto& [name, ra] : inst.rep_algebras)
        rep.merge(check_rep_algebra(ra, inst.tol), name);
    for (const auto& [name, fm] : inst.fibered)
        rep.merge(check_module(fm.module, inst.tol), name);
    return rep;
}

Report gns_checks(const std::string& name, const CStarBase& base, const GNSData& g,
                  const Tolerance& tol) {
    Report rep;
    const std::size_t n = g.gns_dim;
    rep.add(name + ".j_antiunitary", "gns.modular_conjugation",
            (matmul_AhB(g.j, g.j) - Matrix::identity(n)).norm_f(), tol.residual_abs);
    rep.add(name + ".j_involutive", "gns.modular_conjugation",
            (g.j * g.j.conjugate() - Matrix::identity(n)).norm_f(), tol.residual_abs);
    double opp = 0.0;
    for (std::size_t t = 0; t < g.algebra_dim; ++t)
        opp = std::max(opp, (g.pi_op[t] - g.j * g.pi[t].transpose() * g.j.conjugate()).norm_f());
    rep.add(name + ".opposite_rep", "gns.opposite_rep", opp, tol.residual_abs);

    OperatorSpace bcomm = commutant_space(base.b.basis(), base.k_dim, tol);
    rep.add_bool(name + ".dagger_is_commutant", "gns.standard_form",
                 bcomm.dim() == base.b_dag.dim(),
                 std::to_string(base.b_dag.dim()) + "=" + std::to_string(bcomm.dim()));
    rep.add(name + ".dagger_in_commutant", "gns.standard_form",
            bcomm.containment_residual(base.b_dag.space()), tol.residual_abs);
    return rep;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-dimensional operator modules, relative tensor products, fiber products"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand

    std::string instance_path, json_out;
    double tol_rank = -1.0, tol_residual = -1.0;
    bool dump_bases = false;
    unsigned long long seed = 20240901ULL;
    app.add_option("--tol-rank", tol_rank, "relative spectral cutoff override");
    app.add_option("--tol-residual", tol_residual, "absolute residual bound override");
    app.add_option("--json-out", json_out, "write the structured report to this path");
    app.add_flag("--dump-bases", dump_bases, "print computed bases");
    app.add_option("--seed", seed, "seed for generated spot-check vectors");

    auto* c_check = app.add_subcommand("check", "run the axiom suites of every declared object");
    c_check->add_option("instance", instance_path)->required();

    std::string left, right;
    auto* c_rtp = app.add_subcommand("rtp", "relative tensor product of two modules");
    c_rtp->add_option("instance", instance_path)->required();
    c_rtp->add_option("--left", left, "module over the base")->required();
    c_rtp->add_option("--right", right, "module over the opposite base")->required();
    bool dump_coords = false;
    c_rtp->add_flag("--dump-coords", dump_coords, "print generator coordinates");

    auto* c_fiber = app.add_subcommand("fiber", "fiber product of two represented algebras");
    c_fiber->add_option("instance", instance_path)->required();
    c_fiber->add_option("--left", left)->required();
    c_fiber->add_option("--right", right)->required();

    std::string i_name, a_name;
    auto* c_ind = app.add_subcommand("ind", "induced algebra of an operator space");
    c_ind->add_option("instance", instance_path)->required();
    c_ind->add_option("--i-space", i_name)->required();
    c_ind->add_option("--algebra", a_name)->required();

    std::string set_name;
    auto* c_comm = app.add_subcommand("commutant", "commutant of a named set");
    c_comm->add_option("instance", instance_path)->required();
    c_comm->add_option("--set", set_name)->required();

    std::string base_name;
    auto* c_gns = app.add_subcommand("gns", "dump a state-constructed base");
    c_gns->add_option("instance", instance_path)->required();
    c_gns->add_option("--name", base_name)->required();

    auto* c_suite = app.add_subcommand("suite", "run every applicable structural check");
    c_suite->add_option("instance", instance_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        Tolerance tol_override;
        Tolerance* override_ptr = nullptr;
        if (tol_rank > 0.0 || tol_residual > 0.0) {
            if (tol_rank > 0.0) tol_override.rank_rel = tol_rank;
            if (tol_residual > 0.0) tol_override.residual_abs = tol_residual;
            override_ptr = &tol_override;
        }
        Instance inst = load_instance(instance_path, override_ptr);
        const Tolerance& tol = inst.tol;

        if (c_check->parsed()) {
            return finish(instance_checks(inst), json_out);
        }

        if (c_rtp->parsed()) {
            auto li = inst.modules.find(left);
            auto ri = inst.modules.find(right);
            if (li == inst.modules.end() || ri == inst.modules.end())
                fail(Err::Input, "unknown module name");
            RelativeTensorProduct r = rtp_construct(li->second, ri->second, tol);
            Report rep;
            rep.add("rtp.gram_reproduced", "rtp.inner_product", r.gram_residual, tol.residual_abs,
                    "dim=" + std::to_string(r.dim));
            std::cout << "rtp dim=" << r.dim << "\n";
            if (dump_coords) {
                std::cout << "coords (" << r.coords.rows() << "x" << r.coords.cols() << ")\n";
                print_matrix(r.coords, std::cout);
            }
            return finish(rep, json_out);
        }

        if (c_fiber->parsed()) {
            auto li = inst.rep_algebras.find(left);
            auto ri = inst.rep_algebras.find(right);
            if (li == inst.rep_algebras.end() || ri == inst.rep_algebras.end())
                fail(Err::Input, "unknown represented algebra name");
            FiberProduct fp = fiber_product(li->second, ri->second, tol);
            Report rep = fp.checks;
            rep.merge(sauvageot_crosscheck(li->second, ri->second, fp, tol), "crosscheck");
            std::cout << "fiber product dim=" << fp.algebra.dim() << "\n";
            if (dump_bases) dump_basis("fiber_basis", fp.algebra.basis(), std::cout);
            return finish(rep, json_out);
        }

        if (c_ind->parsed()) {
            auto si = inst.spaces.find(i_name);
            auto ai = inst.algebras.find(a_name);
            if (si == inst.spaces.end()) fail(Err::Input, "unknown space '" + i_name + "'");
            if (ai == inst.algebras.end()) fail(Err::Input, "unknown algebra '" + a_name + "'");
            IndResult res = ind(si->second, ai->second, tol);
            std::cout << "ind dim=" << res.algebra.dim() << "\n";
            if (dump_bases) dump_basis("ind_basis", res.algebra.basis(), std::cout);
            return finish(res.checks, json_out);
        }

        if (c_comm->parsed()) {
            std::vector<Matrix> gens;
            std::size_t n = 0;
            if (auto si = inst.spaces.find(set_name); si != inst.spaces.end()) {
                gens = si->second.basis();
                n = si->second.dom_dim();
            } else if (auto ai = inst.algebras.find(set_name); ai != inst.algebras.end()) {
                gens = ai->second.basis();
                n = ai->second.amb_dim();
            } else {
                fail(Err::Input, "unknown set '" + set_name + "'");
            }
            auto comm = commutant(gens, n, tol);
            std::cout << "commutant dim=" << comm.size() << "\n";
            dump_basis("commutant_basis", comm, std::cout);
            Report rep;
            rep.add_bool("commutant.contains_id", "commutant.identity",
                         OperatorSpace::from_orthonormal(n, n, comm).contains(
                             Matrix::identity(n), tol));
            return finish(rep, json_out);
        }

        if (c_gns->parsed()) {
            auto bi = inst.bases.find(base_name);
            auto gi = inst.gns_data.find(base_name);
            if (bi == inst.bases.end() || gi == inst.gns_data.end())
                fail(Err::Input, "unknown state-constructed base '" + base_name + "'");
            std::cout << "k_dim=" << bi->second.k_dim << " b_dim=" << bi->second.b.dim()
                      << " b_dag_dim=" << bi->second.b_dag.dim() << "\n";
            if (dump_bases) {
                dump_basis("b", bi->second.b.basis(), std::cout);
                dump_basis("b_dag", bi->second.b_dag.basis(), std::cout);
            }
            return finish(gns_checks(base_name, bi->second, gi->second, tol), json_out);
        }

        if (c_suite->parsed()) {
            Report rep = instance_checks(inst);
            for (const auto& [name, g] : inst.gns_data)
                rep.merge(gns_checks(name, inst.bases.at(name), g, tol));

            // endomorphism spaces: both kinds computed and reported side by side
            for (const auto& [name, m] : inst.modules) {
                MorphismSpace semi = morphism_space(m.alpha, m.alpha, MorKind::Semi, tol);
                MorphismSpace full = morphism_space(m.alpha, m.alpha, MorKind::Full, tol);
                rep.add(name + ".full_inside_semi", "module.morphism_kinds",
                        semi.space.containment_residual(full.space), tol.residual_abs,
                        "semi=" + std::to_string(semi.space.dim()) +
                            ",full=" + std::to_string(full.space.dim()));
            }

            std::mt19937_64 rng(seed);
            std::normal_distribution<double> dist(0.0, 1.0);
            // products of module pairs over matching bases
            for (const auto& [ln, lm] : inst.modules)
                for (const auto& [rn, rm] : inst.modules) {
                    if (!same_base(opposite_base(lm.base), rm.base, tol)) continue;
                    RelativeTensorProduct r = rtp_construct(lm, rm, tol);
                    const std::string tag = "rtp." + ln + "." + rn;
                    rep.add(tag + ".gram", "rtp.inner_product", r.gram_residual,
                            tol.residual_abs, "dim=" + std::to_string(r.dim));
                    // insertion adjoint identity on a generated pair
                    double adjres = 0.0;
                    for (std::size_t i = 0; i < r.n_left; ++i)
                        for (std::size_t i2 = 0; i2 < r.n_left; ++i2) {
                            const Matrix lhs = matmul_AhB(r.ket1[i], r.ket1[i2]);
                            const Matrix rhs = rho(
                                rm, matmul_AhB(lm.alpha.basis()[i], lm.alpha.basis()[i2]), tol);
                            adjres = std::max(adjres, (lhs - rhs).norm_f());
                        }
                    rep.add(tag + ".insertion_adjoint", "rtp.insertion_adjoint", adjres,
                            tol.residual_abs);
                    // the flip preserves seeded random inner products
                    FlipResult fl = flip_sigma(r, tol);
                    double flres = 0.0;
                    for (int trial = 0; trial < 20; ++trial) {
                        Matrix v(r.dim, 1), w(r.dim, 1);
                        for (std::size_t c = 0; c < r.dim; ++c) {
                            v(c, 0) = cplx(dist(rng), dist(rng));
                            w(c, 0) = cplx(dist(rng), dist(rng));
                        }
                        flres = std::max(flres, std::abs(hs_inner(fl.sigma * v, fl.sigma * w) -
                                                         hs_inner(v, w)));
                    }
                    rep.add(tag + ".flip_isometry", "rtp.flip_unitary", flres, tol.residual_abs);
                }
            // fiber products of represented algebra pairs
            for (const auto& [ln, la] : inst.rep_algebras)
                for (const auto& [rn, ra] : inst.rep_algebras) {
                    if (!same_base(opposite_base(la.module.base), ra.module.base, tol)) continue;
                    const std::string tag = "fiber." + ln + "." + rn;
                    try {
                        FiberProduct fp = fiber_product(la, ra, tol);
                        rep.merge(fp.checks, tag);
                        rep.merge(sauvageot_crosscheck(la, ra, fp, tol), tag + ".crosscheck");
                        rep.merge(check_fiber_properties(la, ra, fp, tol), tag + ".props");
                    } catch (const Error& e) {
                        rep.add_bool(tag + ".constructed", "fiber.defining_constraints", false,
                                     e.what());
                    }
                }
            // unit collapse identities hold over commutative bases
            for (const auto& [an, ra] : inst.rep_algebras) {
                const CStarBase& bs = ra.module.base;
                if (!bs.b.space().equals(bs.b_dag.space(), tol)) continue;
                if (!check_rep_algebra(ra, tol).pass()) continue;
                rep.merge(unitality_check(ra, tol), "unitality." + an);
            }
            // commutative specialization
            for (const auto& [xn, fx] : inst.fibered)
                for (const auto& [yn, fy] : inst.fibered) {
                    if (fx.dbase.weights != fy.dbase.weights) continue;
                    rep.merge(fp_commutative_check(fx.dbase, fx, fy, tol),
                              "fp_commutative." + xn + "." + yn);
                }
            for (const auto& [bn, bp] : inst.bundles)
                for (const auto& [bn2, bp2] : inst.bundles) {
                    if (bp.first != bp2.first) continue;
                    const auto& db = inst.discrete_bases.at(bp.first);
                    FiberwiseIso iso = fiberwise_rtp_iso(db, bp.second, bp2.second, tol);
                    rep.merge(iso.checks, "fiberwise." + bn + "." + bn2);
                }
            return finish(rep, json_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Err::Input ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
