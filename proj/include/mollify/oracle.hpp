#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mollify/rng.hpp"

namespace mollify {

/// Gaussian smoothing spec for Monte-Carlo mollification. The stream is
/// copied into each call, so two evaluations made with the same spec see
/// the same draws (common random numbers), which is what the
/// gradient-vs-finite-difference tests rely on.
struct SmoothingSpec {
    double sigma = 0.0;        // kernel scale; 0 = evaluate the raw objective
    std::size_t samples = 1;   // >= 1
    RngStream rng{0};
};

/// A deterministic scalar objective over a parameter vector, with an
/// optional analytic gradient.
struct ObjectiveHandle {
    std::size_t dimension = 1;
    std::function<double(std::span<const double>)> eval;
    std::function<std::vector<double>(std::span<const double>)> gradient;

    bool has_gradient() const { return static_cast<bool>(gradient); }
};

/// Named built-in objectives: quadratic, absval, double-well,
/// rosenbrock (rosenbrock needs dimension >= 2).
ObjectiveHandle builtin_objective(const std::string& name,
                                  std::size_t dimension);

struct MollifyEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Sample mean of obj(theta - xi) over xi ~ N(0, sigma^2 I), with its
/// standard error. sigma = 0 returns the raw objective with zero error.
/// Throws when a sample evaluates non-finite, naming the sample index.
MollifyEstimate mc_mollify(const ObjectiveHandle& obj,
                           std::span<const double> theta,
                           const SmoothingSpec& spec);

/// Average of per-sample gradients at the shifted points. Uses the
/// analytic gradient when present, otherwise central differences per
/// sample (h = 1e-6).
std::vector<double> mc_mollified_grad(const ObjectiveHandle& obj,
                                      std::span<const double> theta,
                                      const SmoothingSpec& spec);

/// Uniform 1-D quadrature grid on [lo, hi] with `points` nodes.
struct QuadratureGrid {
    double lo = -10.0;
    double hi = 10.0;
    std::size_t points = 10001;
};

/// Residual |  int g(x) K(x) dx  +  int L(x) K'(x) dx  | computed by
/// trapezoidal quadrature against a centered Gaussian kernel of the
/// given std. Zero (up to quadrature error) exactly when g is a weak
/// gradient of L. Errors out when the grid leaves more than 1e-6 of the
/// kernel mass outside.
double verify_weak_gradient(const std::function<double(double)>& loss,
                            const std::function<double(double)>& weak_grad,
                            double kernel_std, const QuadratureGrid& grid);

}  // namespace mollify
