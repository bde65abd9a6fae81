#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cstar {

struct CheckRecord {
    std::string name;   // e.g. "module.span"
    std::string anchor; // stable identifier of the verified law
    bool pass = false;
    double residual = 0.0;
    double tol = 0.0;
    std::string dims; // free-form dimension annotation
};

/// Verification outcome of a batch of checks. Carries max residuals rather
/// than booleans alone so tolerance issues stay diagnosable.
struct Report {
    std::vector<CheckRecord> checks;

    void add(const std::string& name, const std::string& anchor, double residual, double tol,
             const std::string& dims = "");
    void add_bool(const std::string& name, const std::string& anchor, bool ok,
                  const std::string& dims = "");
    void merge(const Report& other, const std::string& prefix = "");

    bool pass() const;
    double max_residual() const;
    /// One line per check plus a summary line.
    void print(std::ostream& os) const;
    std::string to_json() const;
};

} // namespace cstar
