#pragma once

#include <string>
#include <vector>

#include "mollify/matrix.hpp"

namespace mollify {

enum class OptimizerKind { SgdMomentum, RmsProp };

OptimizerKind optimizer_kind_from_string(const std::string& name);
std::string to_string(OptimizerKind kind);

/// Per-parameter optimizer state. Accumulators mirror parameter shapes:
/// velocity for momentum SGD, squared-gradient average for RMSProp. An
/// accumulator is created lazily on the first step for a slot.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::SgdMomentum;
    double learning_rate = 1e-3;
    double momentum = 0.92;        // in [0, 1)
    double rms_decay = 0.9;        // in (0, 1)
    static constexpr double rms_epsilon = 1e-8;

    std::vector<Matrix> accumulators;

    /// Accumulator for parameter slot `slot`, shaped like `params`.
    Matrix& accumulator(std::size_t slot, const Matrix& params);
};

/// Classical momentum update: v <- mu*v - eta*g; p <- p + v.
/// Throws on non-finite gradient entries, naming the offending index.
Matrix sgd_momentum_step(const Matrix& params, const Matrix& grad,
                         OptimizerState& state, std::size_t slot = 0);

/// RMSProp update: s <- rho*s + (1-rho)*g^2; p <- p - eta*g/sqrt(s+eps).
Matrix rmsprop_step(const Matrix& params, const Matrix& grad,
                    OptimizerState& state, std::size_t slot = 0);

/// Dispatch on state.kind.
Matrix optimizer_step(const Matrix& params, const Matrix& grad,
                      OptimizerState& state, std::size_t slot = 0);

}  // namespace mollify
