#pragma once

#include <cmath>
#include <string>

#include "fracdiff/errors.hpp"

namespace fracdiff {

/// Fractional time order alpha, strictly inside (0,1).
class FracOrder {
public:
    explicit FracOrder(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw DomainError("fractional order must satisfy 0 < alpha < 1, got " +
                              std::to_string(alpha));
    }
    double value() const noexcept { return alpha_; }
    operator double() const noexcept { return alpha_; }

private:
    double alpha_;
};

}  // namespace fracdiff
