#include "mollify/finite_diff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mollify {

Matrix finite_diff_grad(const std::function<double(const Matrix&)>& loss,
                        const Matrix& at, double h) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("finite_diff_grad: h must be > 0");
    }
    Matrix probe = at;
    Matrix grad(at.rows(), at.cols());
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double original = probe[i];
        probe[i] = original + h;
        const double up = loss(probe);
        probe[i] = original - h;
        const double down = loss(probe);
        probe[i] = original;
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw std::runtime_error(
                "finite_diff_grad: non-finite loss at coordinate " +
                std::to_string(i));
        }
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

}  // namespace mollify
