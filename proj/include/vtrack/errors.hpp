#pragma once

#include <stdexcept>
#include <string>

namespace vtrack {

/// Base class for all pipeline errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define VTRACK_DEFINE_ERROR(Name)                 \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
        Name() : Error(#Name) {}                  \
    }

VTRACK_DEFINE_ERROR(SeedOutsideImage);
VTRACK_DEFINE_ERROR(DimensionMismatch);
VTRACK_DEFINE_ERROR(TrackingLost);
VTRACK_DEFINE_ERROR(ImageTooSmall);
VTRACK_DEFINE_ERROR(BadKernel);
VTRACK_DEFINE_ERROR(TooFewBoundaryPoints);
VTRACK_DEFINE_ERROR(TooFewPoints);
VTRACK_DEFINE_ERROR(DegenerateConfiguration);
VTRACK_DEFINE_ERROR(EllipseTooSmall);
VTRACK_DEFINE_ERROR(NumericalBlowup);
VTRACK_DEFINE_ERROR(NoZeroCrossing);
VTRACK_DEFINE_ERROR(NoRootsInRegion);
VTRACK_DEFINE_ERROR(SingularInnovation);
VTRACK_DEFINE_ERROR(SelfIntersectingContour);
VTRACK_DEFINE_ERROR(BothEmpty);
VTRACK_DEFINE_ERROR(EmptyContour);
VTRACK_DEFINE_ERROR(EmptyMask);
VTRACK_DEFINE_ERROR(VesselOutOfBounds);
VTRACK_DEFINE_ERROR(MixedDimensions);
VTRACK_DEFINE_ERROR(UnsupportedPixelFormat);
VTRACK_DEFINE_ERROR(EmptyDirectory);
VTRACK_DEFINE_ERROR(IoFailure);
VTRACK_DEFINE_ERROR(BadConfig);

#undef VTRACK_DEFINE_ERROR

} // namespace vtrack
