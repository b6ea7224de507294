#pragma once

#include <stdexcept>
#include <string>

namespace vfgl {

// Numerical failure with a diagnostic payload (residual, iteration trace).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

} // namespace vfgl
