#include "cstar/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <json.hpp>

namespace cstar {

void Report::add(const std::string& name, const std::string& anchor, double residual, double tol,
                 const std::string& dims) {
    checks.push_back({name, anchor, residual <= tol, residual, tol, dims});
}

void Report::add_bool(const std::string& name, const std::string& anchor, bool ok,
                      const std::string& dims) {
    checks.push_back({name, anchor, ok, ok ? 0.0 : 1.0, 0.0, dims});
}

void Report::merge(const Report& other, const std::string& prefix) {
    for (CheckRecord c : other.checks) {
        c.name = prefix.empty() ? c.name : prefix + "." + c.name;
        checks.push_back(std::move(c));
    }
}

bool Report::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

double Report::max_residual() const {
    double worst = 0.0;
    for (const auto& c : checks) worst = std::max(worst, c.residual);
    return worst;
}

void Report::print(std::ostream& os) const {
    char buf[64];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof(buf), "%.6e", c.residual);
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  anchor=" << c.anchor
           << "  residual=" << buf;
        if (!c.dims.empty()) os << "  dims=" << c.dims;
        os << "\n";
    }
    std::snprintf(buf, sizeof(buf), "%.6e", max_residual());
    os << (pass() ? "OVERALL PASS" : "OVERALL FAIL") << "  checks=" << checks.size()
       << "  max_residual=" << buf << "\n";
}

std::string Report::to_json() const {
    nlohmann::json j;
    j["overall"] = pass() ? "pass" : "fail";
    j["max_residual"] = max_residual();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json jc;
        jc["name"] = c.name;
        jc["anchor"] = c.anchor;
        jc["status"] = c.pass ? "pass" : "fail";
        jc["max_residual"] = c.residual;
        jc["tol"] = c.tol;
        jc["dims"] = c.dims;
        j["checks"].push_back(jc);
    }
    return j.dump(2);
}

} // namespace cstar
