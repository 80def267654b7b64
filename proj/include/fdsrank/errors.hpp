#pragma once

#include <stdexcept>
#include <string>

namespace fdsrank {

// Malformed or out-of-contract input: bad file syntax, vertex labels out of
// range, alphabet mismatches.  The CLI maps this to exit code 2.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A resource guard tripped: state space too large, exhaustive search budget
// exhausted, retry budget exhausted.  The CLI maps this to exit code 3.
class guard_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fdsrank
