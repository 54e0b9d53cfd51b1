#pragma once

#include <stdexcept>
#include <string>

namespace knnd {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

// Fewer than k+1 points available for a k-NN query or digraph build.
struct InsufficientPoints : Error {
    using Error::Error;
};

// Requested indegree exceeds the kissing-number bound kappa'(d) * k.
struct ImpossibleIndegree : Error {
    using Error::Error;
};

// No usable kissing-number bound is known for the requested dimension.
struct UnknownBound : Error {
    using Error::Error;
};

// A statistic with zero sample variance where a spread is required.
struct DegenerateStatistic : Error {
    using Error::Error;
};

// Oracle size guard tripped; oracles refuse rather than truncate.
struct SizeGuard : Error {
    using Error::Error;
};

// Malformed input file (CSV/JSON).
struct FormatError : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

}  // namespace knnd
