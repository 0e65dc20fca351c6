#pragma once

#include <stdexcept>
#include <string>

namespace bec {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define BEC_DEFINE_ERROR(name)            \
    struct name : Error {                 \
        using Error::Error;               \
    }

BEC_DEFINE_ERROR(NonSymmetricError);
BEC_DEFINE_ERROR(NotPositiveDefiniteError);
BEC_DEFINE_ERROR(DimensionMismatchError);
BEC_DEFINE_ERROR(NotHurwitzError);
BEC_DEFINE_ERROR(OverflowError);
BEC_DEFINE_ERROR(ZeroModeError);
BEC_DEFINE_ERROR(NonPositiveTemperatureError);
BEC_DEFINE_ERROR(NonPositiveInputError);
BEC_DEFINE_ERROR(FrameMismatchError);
BEC_DEFINE_ERROR(UnphysicalInputError);
BEC_DEFINE_ERROR(IndexOutOfRangeError);
BEC_DEFINE_ERROR(InvalidPartitionError);
BEC_DEFINE_ERROR(MonotonicityViolatedError);
BEC_DEFINE_ERROR(TooManyModesForExhaustiveError);
BEC_DEFINE_ERROR(CertificateInvalidError);
BEC_DEFINE_ERROR(ScenarioError);

#undef BEC_DEFINE_ERROR

}  // namespace bec
