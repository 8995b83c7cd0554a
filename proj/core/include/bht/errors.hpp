#pragma once

#include <stdexcept>
#include <string>

namespace bht {

/// Bad argument values (wrong grid congruence, unequal lengths, p < 1, ...).
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// An operation was called on data that violates its contract
/// (mixed tree passed to a size, overlapping tree to a lacunary projection, ...).
class precondition_error : public std::logic_error {
public:
    explicit precondition_error(const std::string& msg) : std::logic_error(msg) {}
};

/// A dyadic scale fell outside what the sample grid can represent.
class scale_range_error : public std::out_of_range {
public:
    explicit scale_range_error(const std::string& msg) : std::out_of_range(msg) {}
};

class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace bht
