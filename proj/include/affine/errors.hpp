#pragma once

#include <stdexcept>
#include <string>

namespace affine {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define AFFINE_DEFINE_ERROR(Name)            \
    class Name : public Error {              \
    public:                                  \
        explicit Name(const std::string& m)  \
            : Error(#Name ": " + m) {}       \
    };

AFFINE_DEFINE_ERROR(SingularConfiguration)
AFFINE_DEFINE_ERROR(SingularInertia)
AFFINE_DEFINE_ERROR(NonInvertibleLegendre)
AFFINE_DEFINE_ERROR(ConstraintViolation)
AFFINE_DEFINE_ERROR(UnknownGenerator)
AFFINE_DEFINE_ERROR(DegenerateReduction)
AFFINE_DEFINE_ERROR(CoincidentInvariants)
AFFINE_DEFINE_ERROR(DimensionMismatch)
AFFINE_DEFINE_ERROR(InvalidMetric)
AFFINE_DEFINE_ERROR(IntegrationFailure)

#undef AFFINE_DEFINE_ERROR

}  // namespace affine
