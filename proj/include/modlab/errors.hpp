#pragma once

#include <stdexcept>
#include <string>

namespace modlab {

// Input whose result is undefined, e.g. a ratio with zero denominator.
class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Refusal to run an O(N^2) reference computation on a large grid.
class CostGuard : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// (d - alpha)/2 is an integer: the extension route does not apply.
class PolyharmonicCase : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class CflViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mass leaving the truncated velocity domain beyond the permitted fraction.
class BoundaryLoss : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MassMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace modlab
