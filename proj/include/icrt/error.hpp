#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icrt {

// Invalid input; `index()` names the offending entry when one exists.
class InvalidInput : public std::invalid_argument {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit InvalidInput(const std::string& what, std::size_t index = npos)
        : std::invalid_argument(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class OutOfRange : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// Numerical or sampling failure that is not the caller's fault per se.
class SamplingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace icrt
