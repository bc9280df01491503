#ifndef ELLIPSOID_ERRORS_HPP
#define ELLIPSOID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ellipsoid {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A pivot fell at or below the positive-definiteness floor during a
// fresh factorization.
struct NotPositiveDefinite : Error {
    using Error::Error;
};

// A rank-one downdate drove a pivot below the floor; the caller must
// refuse the step or refactorize.
struct DowndateIndefinite : Error {
    using Error::Error;
};

// a_j^T B a_j is numerically zero in a direction the algorithm needs.
struct DegenerateDirection : Error {
    using Error::Error;
};

// A weight update would make some d_j negative beyond tolerance.
struct NegativeWeight : Error {
    using Error::Error;
};

// Operation requires f(d,l) > 0.
struct NonPositiveF : Error {
    using Error::Error;
};

struct InvalidInput : Error {
    using Error::Error;
};

// phi requires strictly positive weights.
struct PhiUndefined : Error {
    using Error::Error;
};

struct Unsupported : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct RetryExhausted : Error {
    using Error::Error;
};

}  // namespace ellipsoid

#endif
