#pragma once

#include <stdexcept>
#include <string>

namespace cstar {

enum class Err {
    ShapeMismatch,
    InvalidTolerance,
    NotPSD,
    Inconsistent,
    Underdetermined,
    NotInCommutant,
    NotInSpace,
    DegenerateInput,
    DegenerateRep,
    NonFaithful,
    NotConditionalExpectation,
    NotCompatible,
    CaseViolated,
    NonCommuting,
    PreconditionFailed,
    NotBAlgebra,
    NotMorphism,
    NotCP,
    NotSpatiallyImplemented,
    EmptyFiber,
    NotClosed,
    NotStabilized,
    Input,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
public:
    Error(Err code, const std::string& what)
        : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

} // namespace cstar
