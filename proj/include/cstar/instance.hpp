#pragma once

#include <map>
#include <string>

#include "cstar/commutative.hpp"

namespace cstar {

/// Parsed instance file: named matrices and the objects assembled from them.
/// All maps are name-ordered so every walk over an instance is deterministic.
struct Instance {
    Tolerance tol;
    std::map<std::string, Matrix> matrices;
    std::map<std::string, OperatorSpace> spaces;
    std::map<std::string, ConcreteAlgebra> algebras;
    std::map<std::string, CStarBase> bases;
    std::map<std::string, GNSData> gns_data; // for bases declared through a state
    std::map<std::string, DiscreteBase> discrete_bases;
    std::map<std::string, std::pair<std::string, Bundle>> bundles; // discrete base name, bundle
    std::map<std::string, FiberedModule> fibered;
    std::map<std::string, CStarModule> modules;
    std::map<std::string, CStarBimodule> bimodules;
    std::map<std::string, RepresentedAlgebra> rep_algebras;
};

/// Loads and assembles an instance; every reference and dimension is
/// validated here. Throws Error with code Input on any defect.
Instance load_instance(const std::string& path, const Tolerance* tol_override = nullptr);
Instance parse_instance(const std::string& json_text, const Tolerance* tol_override = nullptr);

} // namespace cstar
