#ifndef QHSUB_ERRORS_HPP
#define QHSUB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qhsub {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define QHSUB_DEFINE_ERROR(Name)            \
    struct Name : Error {                   \
        using Error::Error;                 \
    }

// symbols
QHSUB_DEFINE_ERROR(MalformedInput);
QHSUB_DEFINE_ERROR(WeightViolation);
QHSUB_DEFINE_ERROR(ConstraintViolation);
QHSUB_DEFINE_ERROR(SwapImpossible);

// distgeo
QHSUB_DEFINE_ERROR(OriginProjection);

// circle
QHSUB_DEFINE_ERROR(UnresolvedZero);
QHSUB_DEFINE_ERROR(NonUniqueMinimum);
QHSUB_DEFINE_ERROR(PropertyOneFailure);
QHSUB_DEFINE_ERROR(OrderUndetectable);
QHSUB_DEFINE_ERROR(MissingPHint);

// escape
QHSUB_DEFINE_ERROR(PlanInfeasible);
QHSUB_DEFINE_ERROR(NotReached);
QHSUB_DEFINE_ERROR(BreakpointDerivative);
QHSUB_DEFINE_ERROR(DegeneratePlan);
QHSUB_DEFINE_ERROR(CurveDomain);

// certify
QHSUB_DEFINE_ERROR(GrowthViolation);
QHSUB_DEFINE_ERROR(EscapeFailure);
QHSUB_DEFINE_ERROR(JacobianMismatch);

// decay
QHSUB_DEFINE_ERROR(QuadratureUnstable);
QHSUB_DEFINE_ERROR(FitUnstable);

#undef QHSUB_DEFINE_ERROR

}  // namespace qhsub

#endif
