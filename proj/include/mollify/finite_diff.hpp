#pragma once

#include <functional>

#include "mollify/matrix.hpp"

namespace mollify {

/// Central-difference gradient of a scalar loss over a matrix of inputs:
/// (L(x + h*e_i) - L(x - h*e_i)) / (2h) per coordinate. The loss must be
/// deterministic at a fixed noise realization. Throws if any perturbed
/// evaluation is non-finite, naming the offending coordinate.
Matrix finite_diff_grad(const std::function<double(const Matrix&)>& loss,
                        const Matrix& at, double h = 1e-5);

}  // namespace mollify
