#pragma once

#include <string>

#include "mollify/activations.hpp"
#include "mollify/matrix.hpp"
#include "mollify/rng.hpp"

namespace mollify {

enum class AdapterKind { None, ZeroPad, LinearProjection };

AdapterKind adapter_kind_from_string(const std::string& name);
std::string to_string(AdapterKind kind);

/// Per-unit binary skip decisions, drawn i.i.d. Bernoulli(p) per forward
/// pass; 1 routes the unit through the identity path.
struct SkipMask {
    Matrix pi;  // batch x units, entries in {0, 1}
};

/// Elementwise Gaussian noise subtracted from the weight matrix:
/// h = f((W - xi) h_prev), xi ~ N(mu, sigma^2), fresh per forward.
struct WeightNoiseConfig {
    double mu = 0.0;
    double sigma = 0.0;  // >= 0; 0 reproduces the plain layer exactly
};

/// One feedforward layer mixing the identity path and the noisy
/// nonlinear path per unit. The projection matrix, when present, maps
/// fan-in to fan-out for the identity path and stays fixed after init.
struct MollifiedLayer {
    Matrix weights;  // fan_in x fan_out
    Matrix bias;     // 1 x fan_out
    MollifiedActivation act;
    AdapterKind adapter = AdapterKind::None;
    Matrix projection;      // fan_in x fan_out, only for LinearProjection
    bool residual = false;  // adds adapt(h_prev) onto the noisy path

    std::size_t fan_in() const { return weights.rows(); }
    std::size_t fan_out() const { return weights.cols(); }

    /// Glorot-uniform weights, zero bias, a ~ U[-2,2]. Draw order:
    /// weights row-major, projection row-major (if any), then a.
    static MollifiedLayer create(std::size_t fan_in, std::size_t fan_out,
                                 ActivationKind kind, double c, RngStream& rng,
                                 AdapterKind adapter = AdapterKind::None,
                                 bool residual = false);
};

/// Identity-path dimension adapter. ZeroPad appends zero columns (errors
/// when fan-in exceeds fan-out); LinearProjection multiplies by the
/// projection matrix; None passes through (dims must match).
Matrix adapt(const Matrix& h_prev, const MollifiedLayer& layer);

/// Routes a gradient back through the adapter (transpose action).
Matrix adapt_backward(const Matrix& upstream, const MollifiedLayer& layer);

/// Everything the backward pass and the frozen replay need.
struct LayerCache {
    Matrix input;      // h_prev
    Matrix x;          // preactivation W h + b
    Matrix adapted;    // adapt(h_prev)
    SkipMask mask;
    NoiseRealization realization;
    double p = 0.0;
};

struct LayerForward {
    Matrix h;
    LayerCache cache;
};

/// Training forward: x = h_prev W + b, psi noisy activation at level p,
/// pi ~ Bernoulli(p) per unit per example,
/// h = pi * adapt(h_prev) + (1 - pi) * psi. Draw order: xi then pi.
LayerForward layer_forward_train(const Matrix& h_prev,
                                 const MollifiedLayer& layer, double p,
                                 RngStream& rng);

/// Deterministic inference: pi is replaced by its mean p (convex blend)
/// and |xi| by the half-normal mean inside the noise magnitude.
Matrix layer_forward_infer(const Matrix& h_prev, const MollifiedLayer& layer,
                           double p);

/// Replays the forward at fixed sampled noise/mask, under possibly
/// perturbed parameters or inputs; the function backprop differentiates.
Matrix layer_forward_frozen(const Matrix& h_prev, const MollifiedLayer& layer,
                            const LayerCache& cache);

struct LayerGrads {
    Matrix dweights;
    Matrix dbias;
    Matrix da;
    Matrix dinput;
};

LayerGrads layer_backward(const MollifiedLayer& layer, const LayerCache& cache,
                          const Matrix& upstream);

/// Weight-noise mollification of a plain layer (no skip path, plain f).
Matrix weight_noise_forward(const Matrix& h_prev, const MollifiedLayer& layer,
                            const WeightNoiseConfig& cfg, RngStream& rng);

/// Glorot-uniform initializer, exposed for reuse.
Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, RngStream& rng);

}  // namespace mollify
