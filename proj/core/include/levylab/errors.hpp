#pragma once

#include <stdexcept>
#include <string>

namespace levylab {

// A requested jump band reaches below the inner cutoff of the noise model,
// where the Levy measure is not simulated (and may have infinite mass).
class CutoffViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Adaptive time stepping could not make progress.
class StiffnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An operation was called outside the parameter range where it is defined.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace levylab
