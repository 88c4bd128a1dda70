#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace envar {

// How the CLI maps a failure to an exit code: input errors exit 2,
// domain errors (caps, math-domain failures) exit 3.
enum class ErrorCategory { input, domain };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& what)
        : std::runtime_error(what), cat_(cat) {}

    ErrorCategory category() const noexcept { return cat_; }

private:
    ErrorCategory cat_;
};

struct DuplicateLabel : Error {
    explicit DuplicateLabel(const std::string& w) : Error(ErrorCategory::input, w) {}
};

struct UnknownSubsystem : Error {
    explicit UnknownSubsystem(const std::string& w) : Error(ErrorCategory::input, w) {}
};

struct NotUnitary : Error {
    explicit NotUnitary(const std::string& w) : Error(ErrorCategory::input, w) {}
};

struct BadPartition : Error {
    explicit BadPartition(const std::string& w) : Error(ErrorCategory::input, w) {}
};

struct LayoutMismatch : Error {
    explicit LayoutMismatch(const std::string& w) : Error(ErrorCategory::input, w) {}
};

struct ZeroState : Error {
    explicit ZeroState(const std::string& w) : Error(ErrorCategory::domain, w) {}
};

// Raised when an equal-coefficient certificate is requested for a state whose
// Schmidt coefficients are not all equal. Carries the offending pair.
struct NotEquiprobable : Error {
    NotEquiprobable(const std::string& w, std::size_t i, std::size_t j,
                    double ci, double cj)
        : Error(ErrorCategory::domain, w),
          branch_i(i), branch_j(j), coeff_i(ci), coeff_j(cj) {}

    std::size_t branch_i;
    std::size_t branch_j;
    double coeff_i;
    double coeff_j;
};

struct ComplementTooSmall : Error {
    explicit ComplementTooSmall(const std::string& w) : Error(ErrorCategory::domain, w) {}
};

struct DimensionCap : Error {
    explicit DimensionCap(const std::string& w) : Error(ErrorCategory::domain, w) {}
};

struct SpecMismatch : Error {
    explicit SpecMismatch(const std::string& w) : Error(ErrorCategory::domain, w) {}
};

struct OutOfRange : Error {
    explicit OutOfRange(const std::string& w) : Error(ErrorCategory::input, w) {}
};

struct NotNormalized : Error {
    explicit NotNormalized(const std::string& w) : Error(ErrorCategory::input, w) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error(ErrorCategory::input, w) {}
};

}  // namespace envar
