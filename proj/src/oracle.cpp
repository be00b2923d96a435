#include "mollify/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace mollify {

namespace {

double gaussian_density(double x, double std) {
    const double z = x / std;
    return std::exp(-0.5 * z * z) / (std * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<double> central_diff_grad(const ObjectiveHandle& obj,
                                      std::span<const double> at, double h) {
    std::vector<double> probe(at.begin(), at.end());
    std::vector<double> grad(at.size());
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double original = probe[i];
        probe[i] = original + h;
        const double up = obj.eval(probe);
        probe[i] = original - h;
        const double down = obj.eval(probe);
        probe[i] = original;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

}  // namespace

ObjectiveHandle builtin_objective(const std::string& name,
                                  std::size_t dimension) {
    if (dimension < 1) {
        throw std::invalid_argument("builtin_objective: dimension must be >= 1");
    }
    ObjectiveHandle obj;
    obj.dimension = dimension;
    if (name == "quadratic") {
        obj.eval = [](std::span<const double> t) {
            double acc = 0.0;
            for (double v : t) acc += v * v;
            return acc;
        };
        obj.gradient = [](std::span<const double> t) {
            std::vector<double> g(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) g[i] = 2.0 * t[i];
            return g;
        };
    } else if (name == "absval") {
        obj.eval = [](std::span<const double> t) {
            double acc = 0.0;
            for (double v : t) acc += std::abs(v);
            return acc;
        };
        obj.gradient = [](std::span<const double> t) {
            std::vector<double> g(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) {
                g[i] = t[i] > 0.0 ? 1.0 : (t[i] < 0.0 ? -1.0 : 0.0);
            }
            return g;
        };
    } else if (name == "double-well") {
        obj.eval = [](std::span<const double> t) {
            double acc = 0.0;
            for (double v : t) {
                const double w = v * v - 1.0;
                acc += w * w;
            }
            return acc;
        };
        obj.gradient = [](std::span<const double> t) {
            std::vector<double> g(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) {
                g[i] = 4.0 * t[i] * (t[i] * t[i] - 1.0);
            }
            return g;
        };
    } else if (name == "rosenbrock") {
        if (dimension < 2) {
            throw std::invalid_argument("rosenbrock needs dimension >= 2");
        }
        obj.eval = [](std::span<const double> t) {
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < t.size(); ++i) {
                const double a = t[i + 1] - t[i] * t[i];
                const double b = 1.0 - t[i];
                acc += 100.0 * a * a + b * b;
            }
            return acc;
        };
        obj.gradient = [](std::span<const double> t) {
            std::vector<double> g(t.size(), 0.0);
            for (std::size_t i = 0; i + 1 < t.size(); ++i) {
                const double a = t[i + 1] - t[i] * t[i];
                g[i] += -400.0 * t[i] * a - 2.0 * (1.0 - t[i]);
                g[i + 1] += 200.0 * a;
            }
            return g;
        };
    } else {
        throw std::invalid_argument("unknown objective: " + name);
    }
    return obj;
}

MollifyEstimate mc_mollify(const ObjectiveHandle& obj,
                           std::span<const double> theta,
                           const SmoothingSpec& spec) {
    if (theta.size() != obj.dimension) {
        throw std::invalid_argument("mc_mollify: theta has " +
                                    std::to_string(theta.size()) +
                                    " entries, objective expects " +
                                    std::to_string(obj.dimension));
    }
    if (spec.samples < 1) {
        throw std::invalid_argument("mc_mollify: need at least one sample");
    }
    if (spec.sigma == 0.0) {
        return {obj.eval(theta), 0.0};
    }
    RngStream rng = spec.rng;  // copy: same spec, same draws
    std::vector<double> shifted(theta.size());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < spec.samples; ++i) {
        for (std::size_t d = 0; d < theta.size(); ++d) {
            shifted[d] = theta[d] - spec.sigma * rng.normal();
        }
        const double sample = obj.eval(shifted);
        if (!std::isfinite(sample)) {
            throw std::runtime_error("mc_mollify: non-finite objective at sample " +
                                     std::to_string(i));
        }
        // Welford running mean/variance
        const double delta = sample - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (sample - mean);
    }
    const double n = static_cast<double>(spec.samples);
    const double variance = spec.samples > 1 ? m2 / (n - 1.0) : 0.0;
    return {mean, std::sqrt(variance / n)};
}

std::vector<double> mc_mollified_grad(const ObjectiveHandle& obj,
                                      std::span<const double> theta,
                                      const SmoothingSpec& spec) {
    if (theta.size() != obj.dimension) {
        throw std::invalid_argument("mc_mollified_grad: theta size mismatch");
    }
    std::vector<double> grad(theta.size(), 0.0);
    if (spec.sigma == 0.0) {
        return obj.has_gradient()
                   ? obj.gradient(theta)
                   : central_diff_grad(obj, theta, 1e-6);
    }
    RngStream rng = spec.rng;
    std::vector<double> shifted(theta.size());
    for (std::size_t i = 0; i < spec.samples; ++i) {
        for (std::size_t d = 0; d < theta.size(); ++d) {
            shifted[d] = theta[d] - spec.sigma * rng.normal();
        }
        const std::vector<double> g =
            obj.has_gradient() ? obj.gradient(shifted)
                               : central_diff_grad(obj, shifted, 1e-6);
        for (std::size_t d = 0; d < theta.size(); ++d) {
            if (!std::isfinite(g[d])) {
                throw std::runtime_error(
                    "mc_mollified_grad: non-finite gradient at sample " +
                    std::to_string(i));
            }
            grad[d] += g[d];
        }
    }
    for (double& v : grad) v /= static_cast<double>(spec.samples);
    return grad;
}

double verify_weak_gradient(const std::function<double(double)>& loss,
                            const std::function<double(double)>& weak_grad,
                            double kernel_std, const QuadratureGrid& grid) {
    if (!(kernel_std > 0.0)) {
        throw std::invalid_argument("verify_weak_gradient: kernel_std must be > 0");
    }
    if (grid.points < 2 || grid.lo >= grid.hi) {
        throw std::invalid_argument("verify_weak_gradient: malformed grid");
    }
    const double mass_outside = normal_cdf(grid.lo / kernel_std) +
                                (1.0 - normal_cdf(grid.hi / kernel_std));
    if (mass_outside > 1e-6) {
        throw std::invalid_argument(
            "verify_weak_gradient: grid too narrow, kernel mass outside = " +
            std::to_string(mass_outside));
    }
    const double h =
        (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
    double lhs = 0.0;   // int g K
    double rhs = 0.0;   // -int L K'
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double x = grid.lo + h * static_cast<double>(i);
        const double w = (i == 0 || i + 1 == grid.points) ? 0.5 * h : h;
        const double k = gaussian_density(x, kernel_std);
        const double kprime = -x / (kernel_std * kernel_std) * k;
        lhs += w * weak_grad(x) * k;
        rhs += w * -(loss(x) * kprime);
    }
    return std::abs(lhs - rhs);
}

}  // namespace mollify
