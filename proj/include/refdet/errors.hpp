#pragma once

#include <stdexcept>
#include <string>

namespace refdet {

struct MixedRadicandError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeRadicandError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonSquareError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotSkewSymmetricError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct OddSizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DimensionMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SpanMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotInvariantError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DependentBasisError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ZeroVectorError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ArityMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotSingleCycleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotATreeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};
struct ScaleLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateRhsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FileFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace refdet
