#pragma once

#include <span>
#include <string>
#include <vector>

#include "mollify/anneal.hpp"
#include "mollify/layer.hpp"

namespace mollify {

enum class HeadKind { SigmoidCrossEntropy, SoftmaxCrossEntropy };

HeadKind head_kind_from_string(const std::string& name);
std::string to_string(HeadKind kind);

/// Output head: a plain affine map into a cross-entropy loss. Both head
/// kinds are convex in their pre-activations, which is what makes the
/// fully skipped network (p = 1 everywhere) a convex problem in the head
/// parameters.
struct Head {
    HeadKind kind = HeadKind::SigmoidCrossEntropy;
    Matrix weights;  // in x out
    Matrix bias;     // 1 x out

    static Head create(HeadKind kind, std::size_t in, std::size_t out,
                       RngStream& rng);
};

/// Mean cross-entropy over the batch. Sigmoid heads take targets in
/// [0,1] per output (soft targets allowed); softmax heads take one-hot
/// or distribution rows.
double head_loss(const Head& head, const Matrix& logits, const Matrix& labels);

/// d(loss)/d(logits); includes the 1/batch factor of the mean.
Matrix head_loss_grad(const Head& head, const Matrix& logits,
                      const Matrix& labels);

/// Head output probabilities (sigmoid or row-softmax of the logits).
Matrix head_probabilities(const Head& head, const Matrix& logits);

struct Network {
    std::vector<MollifiedLayer> layers;
    Head head;

    std::size_t input_dim() const {
        return layers.empty() ? head.weights.rows() : layers.front().fan_in();
    }
    std::size_t depth() const { return layers.size(); }
};

/// Stack of equal-width mollified layers with a zero-pad first adapter
/// (or a linear projection when the input is wider than the hidden
/// width) and an affine cross-entropy head.
Network make_mlp(std::size_t input_dim, std::size_t num_layers,
                 std::size_t hidden, ActivationKind kind, double c,
                 HeadKind head_kind, std::size_t outputs, RngStream& rng,
                 bool residual = false);

/// One rng stream per layer, derived from the master seed so per-layer
/// noise is reproducible independent of evaluation order.
std::vector<RngStream> layer_streams(const Network& net, const RngStream& rng);

struct NetworkCache {
    std::vector<LayerCache> layers;
    Matrix head_input;
    Matrix logits;
    std::vector<double> p;  // per-layer levels the pass ran at
};

struct ForwardResult {
    double loss = 0.0;
    NetworkCache cache;
};

/// Training forward pass. p has one entry per layer. Throws when a
/// non-finite value appears, naming the layer index (1-based; 0 = head).
ForwardResult network_forward(const Network& net, const Matrix& batch,
                              const Matrix& labels, std::span<const double> p,
                              std::span<RngStream> layer_rngs);

/// Overload reading the per-layer levels from the annealing schedule.
ForwardResult network_forward(const Network& net, const Matrix& batch,
                              const Matrix& labels, const AnnealState& anneal,
                              std::span<RngStream> layer_rngs);

struct NetworkGrads {
    std::vector<LayerGrads> layers;
    Matrix head_dweights;
    Matrix head_dbias;
};

/// Gradients of the frozen realization recorded in the cache; gradients
/// flow through the noisy path only where pi = 0, and the identity path
/// passes upstream gradients unchanged.
NetworkGrads network_backward(const Network& net, const NetworkCache& cache,
                              const Matrix& labels);

/// Loss of the frozen realization under (possibly perturbed) parameters;
/// the quantity network_backward differentiates, used by the
/// finite-difference oracle.
double network_loss_frozen(const Network& net, const Matrix& batch,
                           const Matrix& labels, const NetworkCache& cache);

/// Deterministic inference pass; returns head probabilities.
Matrix network_infer(const Network& net, const Matrix& batch,
                     std::span<const double> p);

/// Inference-mode loss and (thresholded) accuracy on a labeled set.
struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};
EvalResult network_evaluate(const Network& net, const Matrix& batch,
                            const Matrix& labels, std::span<const double> p);

}  // namespace mollify
