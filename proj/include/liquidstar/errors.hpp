#pragma once

#include <stdexcept>
#include <string>

namespace liquidstar {

// Numerical failures carry a kind so the CLI can map them to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(kind) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define LIQUIDSTAR_ERROR(Name)                                              \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

LIQUIDSTAR_ERROR(DegenerateStar);
LIQUIDSTAR_ERROR(NoSurfaceFound);
LIQUIDSTAR_ERROR(StepFailure);
LIQUIDSTAR_ERROR(OutOfDomain);
LIQUIDSTAR_ERROR(BadDirection);
LIQUIDSTAR_ERROR(OriginSingular);
LIQUIDSTAR_ERROR(EqualRadii);
LIQUIDSTAR_ERROR(GridMismatch);
LIQUIDSTAR_ERROR(BcMismatch);
LIQUIDSTAR_ERROR(SingularAssembly);
LIQUIDSTAR_ERROR(NoConvergence);
LIQUIDSTAR_ERROR(ConstraintViolated);
LIQUIDSTAR_ERROR(BallOutsideStar);

#undef LIQUIDSTAR_ERROR

}  // namespace liquidstar
