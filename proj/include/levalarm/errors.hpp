#pragma once

#include <stdexcept>
#include <string>

namespace levalarm {

// Bad arguments or malformed input data. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative method ran out of budget. The CLI maps this to exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool ok, const char* msg) {
    if (!ok) throw InputError(msg);
}

}  // namespace levalarm
