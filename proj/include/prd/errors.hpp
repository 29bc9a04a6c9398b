#pragma once

#include <stdexcept>
#include <string>

namespace prd {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotPrime : Error {
    explicit NotPrime(const std::string& msg) : Error(msg) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& msg) : Error(msg) {}
};

struct OutsideDomain : Error {
    explicit OutsideDomain(const std::string& msg) : Error(msg) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

struct SingularPivot : Error {
    explicit SingularPivot(const std::string& msg) : Error(msg) {}
};

struct RankDeficient : Error {
    explicit RankDeficient(const std::string& msg) : Error(msg) {}
};

struct DegreeBlowup : Error {
    explicit DegreeBlowup(const std::string& msg) : Error(msg) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& msg) : Error(msg) {}
};

struct NoPoint : Error {
    explicit NoPoint(const std::string& msg) : Error(msg) {}
};

struct AllCandidatesFailed : Error {
    explicit AllCandidatesFailed(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

} // namespace prd
