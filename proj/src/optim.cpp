#include "mollify/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace mollify {

OptimizerKind optimizer_kind_from_string(const std::string& name) {
    if (name == "sgd-momentum") return OptimizerKind::SgdMomentum;
    if (name == "rmsprop") return OptimizerKind::RmsProp;
    throw std::invalid_argument("unknown optimizer kind: " + name);
}

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::SgdMomentum ? "sgd-momentum" : "rmsprop";
}

Matrix& OptimizerState::accumulator(std::size_t slot, const Matrix& params) {
    if (slot >= accumulators.size()) accumulators.resize(slot + 1);
    Matrix& acc = accumulators[slot];
    if (acc.size() == 0) acc = Matrix(params.rows(), params.cols());
    if (!acc.same_shape(params)) {
        throw std::invalid_argument("optimizer accumulator shape " +
                                    acc.shape_str() + " does not mirror params " +
                                    params.shape_str());
    }
    return acc;
}

namespace {

void check_grad(const Matrix& params, const Matrix& grad, const char* who) {
    if (!params.same_shape(grad)) {
        throw std::invalid_argument(std::string(who) + ": params " +
                                    params.shape_str() + " vs grad " +
                                    grad.shape_str());
    }
    const std::size_t bad = grad.first_non_finite();
    if (bad != grad.size()) {
        throw std::invalid_argument(std::string(who) +
                                    ": non-finite gradient at parameter index " +
                                    std::to_string(bad));
    }
}

}  // namespace

Matrix sgd_momentum_step(const Matrix& params, const Matrix& grad,
                         OptimizerState& state, std::size_t slot) {
    check_grad(params, grad, "sgd_momentum_step");
    Matrix& velocity = state.accumulator(slot, params);
    Matrix out = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = state.momentum * velocity[i] - state.learning_rate * grad[i];
        out[i] += velocity[i];
    }
    return out;
}

Matrix rmsprop_step(const Matrix& params, const Matrix& grad,
                    OptimizerState& state, std::size_t slot) {
    check_grad(params, grad, "rmsprop_step");
    Matrix& avg = state.accumulator(slot, params);
    Matrix out = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        avg[i] = state.rms_decay * avg[i] + (1.0 - state.rms_decay) * grad[i] * grad[i];
        out[i] -= state.learning_rate * grad[i] /
                  std::sqrt(avg[i] + OptimizerState::rms_epsilon);
    }
    return out;
}

Matrix optimizer_step(const Matrix& params, const Matrix& grad,
                      OptimizerState& state, std::size_t slot) {
    return state.kind == OptimizerKind::SgdMomentum
               ? sgd_momentum_step(params, grad, state, slot)
               : rmsprop_step(params, grad, state, slot);
}

}  // namespace mollify
