#include "cstar/instance.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cstar {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& j, const std::string& name) {
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        fail(Err::Input, "matrix '" + name + "' needs rows, cols, entries");
    const std::size_t rows = j.at("rows").get<std::size_t>();
    const std::size_t cols = j.at("cols").get<std::size_t>();
    const auto& entries = j.at("entries");
    if (!entries.is_array() || entries.size() != rows * cols)
        fail(Err::Input, "matrix '" + name + "' entry count mismatch");
    std::vector<cplx> data;
    data.reserve(rows * cols);
    for (const auto& e : entries) {
        if (!e.is_array() || e.size() != 2)
            fail(Err::Input, "matrix '" + name + "' entries must be [re, im] pairs");
        data.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    Matrix m(rows, cols, std::move(data));
    if (!m.all_finite()) fail(Err::Input, "matrix '" + name + "' has non-finite entries");
    return m;
}

std::vector<Matrix> lookup_matrices(const Instance& inst, const json& names,
                                    const std::string& ctx) {
    std::vector<Matrix> out;
    for (const auto& n : names) {
        const std::string name = n.get<std::string>();
        auto it = inst.matrices.find(name);
        if (it == inst.matrices.end())
            fail(Err::Input, ctx + ": unknown matrix '" + name + "'");
        out.push_back(it->second);
    }
    return out;
}

const CStarBase& lookup_base(const Instance& inst, const std::string& name,
                             const std::string& ctx) {
    auto it = inst.bases.find(name);
    if (it == inst.bases.end()) fail(Err::Input, ctx + ": unknown base '" + name + "'");
    return it->second;
}

} // namespace

Instance parse_instance(const std::string& json_text, const Tolerance* tol_override) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        fail(Err::Input, std::string("json parse: ") + e.what());
    }

    Instance inst;
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        if (t.contains("rank_rel")) inst.tol.rank_rel = t.at("rank_rel").get<double>();
        if (t.contains("residual_abs")) inst.tol.residual_abs = t.at("residual_abs").get<double>();
    }
    if (tol_override) inst.tol = *tol_override;
    inst.tol.validate();
    const Tolerance& tol = inst.tol;

    try {
        if (j.contains("matrices"))
            for (const auto& [name, jm] : j.at("matrices").items())
                inst.matrices.emplace(name, parse_matrix(jm, name));

        if (j.contains("spaces"))
            for (const auto& [name, js] : j.at("spaces").items()) {
                const std::size_t dom = js.at("dom").get<std::size_t>();
                const std::size_t cod = js.at("cod").get<std::size_t>();
                inst.spaces.emplace(name, OperatorSpace::span(
                                              dom, cod,
                                              lookup_matrices(inst, js.at("generators"),
                                                              "space '" + name + "'"),
                                              tol));
            }

        if (j.contains("algebras"))
            for (const auto& [name, ja] : j.at("algebras").items()) {
                const bool unital = ja.value("unital", false);
                auto gens = lookup_matrices(inst, ja.at("generators"), "algebra '" + name + "'");
                inst.algebras.emplace(name, generated_algebra(gens, unital, tol));
            }

        if (j.contains("discrete_bases"))
            for (const auto& [name, jd] : j.at("discrete_bases").items())
                inst.discrete_bases.emplace(
                    name, discrete_base(jd.at("weights").get<std::vector<double>>(), tol));

        if (j.contains("bases"))
            for (const auto& [name, jb] : j.at("bases").items()) {
                if (jb.contains("trivial")) {
                    inst.bases.emplace(name, trivial_base(tol));
                } else if (jb.contains("gns")) {
                    const auto& g = jb.at("gns");
                    auto [base, data] = gns_base(g.at("blocks").get<std::vector<std::size_t>>(),
                                                 g.at("weights").get<std::vector<double>>(), tol);
                    inst.bases.emplace(name, std::move(base));
                    inst.gns_data.emplace(name, std::move(data));
                } else if (jb.contains("explicit")) {
                    const auto& e = jb.at("explicit");
                    const std::string bn = e.at("b").get<std::string>();
                    const std::string dn = e.at("b_dag").get<std::string>();
                    auto bi = inst.algebras.find(bn);
                    auto di = inst.algebras.find(dn);
                    if (bi == inst.algebras.end() || di == inst.algebras.end())
                        fail(Err::Input, "base '" + name + "': unknown algebra reference");
                    inst.bases.emplace(name, make_base(bi->second.amb_dim(), bi->second,
                                                       di->second, tol));
                } else if (jb.contains("opposite_of")) {
                    inst.bases.emplace(
                        name, opposite_base(lookup_base(
                                  inst, jb.at("opposite_of").get<std::string>(), "base '" + name + "'")));
                } else if (jb.contains("discrete")) {
                    auto it = inst.discrete_bases.find(jb.at("discrete").get<std::string>());
                    if (it == inst.discrete_bases.end())
                        fail(Err::Input, "base '" + name + "': unknown discrete base");
                    inst.bases.emplace(name, it->second.base);
                } else {
                    fail(Err::Input, "base '" + name + "': unknown kind");
                }
            }

        if (j.contains("bundles"))
            for (const auto& [name, jb] : j.at("bundles").items()) {
                Bundle b;
                b.fiber_dims = jb.at("fiber_dims").get<std::vector<std::size_t>>();
                const std::string bname = jb.at("base").get<std::string>();
                if (!inst.discrete_bases.count(bname))
                    fail(Err::Input, "bundle '" + name + "': unknown discrete base");
                inst.bundles.emplace(name, std::make_pair(bname, std::move(b)));
            }

        if (j.contains("fibered_spaces"))
            for (const auto& [name, jf] : j.at("fibered_spaces").items()) {
                auto it = inst.discrete_bases.find(jf.at("base").get<std::string>());
                if (it == inst.discrete_bases.end())
                    fail(Err::Input, "fibered space '" + name + "': unknown discrete base");
                FiberedSpace fs;
                fs.fiber_weights =
                    jf.at("fiber_weights").get<std::vector<std::vector<double>>>();
                inst.fibered.emplace(name, fibered_module(it->second, fs, tol));
            }

        if (j.contains("modules"))
            for (const auto& [name, jm] : j.at("modules").items()) {
                if (jm.contains("bundle")) {
                    auto bit = inst.bundles.find(jm.at("bundle").get<std::string>());
                    if (bit == inst.bundles.end())
                        fail(Err::Input, "module '" + name + "': unknown bundle");
                    const auto& dbase = inst.discrete_bases.at(bit->second.first);
                    CStarModule m = bundle_module(dbase, bit->second.second, tol);
                    if (jm.value("opposite", false))
                        m = make_module(opposite_base(m.base), m.alpha, tol);
                    inst.modules.emplace(name, std::move(m));
                } else if (jm.contains("fibered_space")) {
                    auto fit = inst.fibered.find(jm.at("fibered_space").get<std::string>());
                    if (fit == inst.fibered.end())
                        fail(Err::Input, "module '" + name + "': unknown fibered space");
                    CStarModule m = fit->second.module;
                    if (jm.value("opposite", false))
                        m = make_module(opposite_base(m.base), m.alpha, tol);
                    inst.modules.emplace(name, std::move(m));
                } else {
                    CStarBase base =
                        lookup_base(inst, jm.at("base").get<std::string>(), "module '" + name + "'");
                    if (jm.value("opposite", false)) base = opposite_base(base);
                    const std::size_t h = jm.at("h_dim").get<std::size_t>();
                    auto gens =
                        lookup_matrices(inst, jm.at("generators"), "module '" + name + "'");
                    inst.modules.emplace(
                        name, make_module(base, OperatorSpace::span(base.k_dim, h, gens, tol), tol));
                }
            }

        if (j.contains("bimodules"))
            for (const auto& [name, jm] : j.at("bimodules").items()) {
                const CStarBase& ba =
                    lookup_base(inst, jm.at("base_a").get<std::string>(), "bimodule '" + name + "'");
                const CStarBase& bb =
                    lookup_base(inst, jm.at("base_b").get<std::string>(), "bimodule '" + name + "'");
                const std::size_t h = jm.at("h_dim").get<std::size_t>();
                auto agens = lookup_matrices(inst, jm.at("alpha"), "bimodule '" + name + "'");
                auto bgens = lookup_matrices(inst, jm.at("beta"), "bimodule '" + name + "'");
                inst.bimodules.emplace(
                    name, make_bimodule(ba, bb, OperatorSpace::span(ba.k_dim, h, agens, tol),
                                        OperatorSpace::span(bb.k_dim, h, bgens, tol), tol));
            }

        if (j.contains("represented_algebras"))
            for (const auto& [name, jr] : j.at("represented_algebras").items()) {
                if (jr.contains("functions_on")) {
                    auto fit = inst.fibered.find(jr.at("functions_on").get<std::string>());
                    if (fit == inst.fibered.end())
                        fail(Err::Input, "represented algebra '" + name + "': unknown fibered space");
                    CStarModule m = fit->second.module;
                    if (jr.value("opposite", false))
                        m = make_module(opposite_base(m.base), m.alpha, tol);
                    inst.rep_algebras.emplace(name,
                                              RepresentedAlgebra{m, fit->second.functions});
                    continue;
                }
                auto mit = inst.modules.find(jr.at("module").get<std::string>());
                if (mit == inst.modules.end())
                    fail(Err::Input, "represented algebra '" + name + "': unknown module");
                ConcreteAlgebra alg;
                if (jr.contains("full") && jr.at("full").get<bool>()) {
                    alg = ConcreteAlgebra::from_space(
                        OperatorSpace::full(mit->second.h_dim, mit->second.h_dim), tol);
                } else {
                    auto gens = lookup_matrices(inst, jr.at("generators"),
                                                "represented algebra '" + name + "'");
                    alg = generated_algebra(gens, jr.value("unital", false), tol);
                }
                if (alg.amb_dim() != mit->second.h_dim)
                    fail(Err::Input, "represented algebra '" + name + "': dimension mismatch");
                inst.rep_algebras.emplace(name, RepresentedAlgebra{mit->second, alg});
            }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(Err::Input, std::string("instance assembly: ") + e.what());
    }
    return inst;
}

Instance load_instance(const std::string& path, const Tolerance* tol_override) {
    std::ifstream in(path);
    if (!in) fail(Err::Input, "cannot open instance file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str(), tol_override);
}

} // namespace cstar
