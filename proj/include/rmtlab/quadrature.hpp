#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace rmtlab {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive Simpson on [a,b] with absolute error target `tol`.
// Throws QuadratureError if the recursion cannot reach the target.
double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b, double tol = 1e-12,
                          int max_depth = 60);

} // namespace rmtlab
