#include "mollify/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mollify {

HeadKind head_kind_from_string(const std::string& name) {
    if (name == "sigmoid-cross-entropy") return HeadKind::SigmoidCrossEntropy;
    if (name == "softmax-cross-entropy") return HeadKind::SoftmaxCrossEntropy;
    throw std::invalid_argument("unknown head kind: " + name);
}

std::string to_string(HeadKind kind) {
    return kind == HeadKind::SigmoidCrossEntropy ? "sigmoid-cross-entropy"
                                                 : "softmax-cross-entropy";
}

Head Head::create(HeadKind kind, std::size_t in, std::size_t out,
                  RngStream& rng) {
    Head head;
    head.kind = kind;
    head.weights = glorot_uniform(in, out, rng);
    head.bias = Matrix(1, out);
    return head;
}

namespace {

void check_labels(const Matrix& logits, const Matrix& labels) {
    if (!logits.same_shape(labels)) {
        throw std::invalid_argument("head: logits " + logits.shape_str() +
                                    " vs labels " + labels.shape_str());
    }
}

}  // namespace

double head_loss(const Head& head, const Matrix& logits, const Matrix& labels) {
    check_labels(logits, labels);
    const double n = static_cast<double>(logits.rows());
    double total = 0.0;
    if (head.kind == HeadKind::SigmoidCrossEntropy) {
        for (std::size_t i = 0; i < logits.size(); ++i) {
            const double z = logits[i];
            const double y = labels[i];
            total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
        }
    } else {
        for (std::size_t r = 0; r < logits.rows(); ++r) {
            double zmax = logits.at(r, 0);
            for (std::size_t c = 1; c < logits.cols(); ++c)
                zmax = std::max(zmax, logits.at(r, c));
            double sum = 0.0;
            for (std::size_t c = 0; c < logits.cols(); ++c)
                sum += std::exp(logits.at(r, c) - zmax);
            const double lse = zmax + std::log(sum);
            for (std::size_t c = 0; c < logits.cols(); ++c)
                total += labels.at(r, c) * (lse - logits.at(r, c));
        }
    }
    return total / n;
}

Matrix head_probabilities(const Head& head, const Matrix& logits) {
    Matrix probs(logits.rows(), logits.cols());
    if (head.kind == HeadKind::SigmoidCrossEntropy) {
        for (std::size_t i = 0; i < logits.size(); ++i)
            probs[i] = 1.0 / (1.0 + std::exp(-logits[i]));
    } else {
        for (std::size_t r = 0; r < logits.rows(); ++r) {
            double zmax = logits.at(r, 0);
            for (std::size_t c = 1; c < logits.cols(); ++c)
                zmax = std::max(zmax, logits.at(r, c));
            double sum = 0.0;
            for (std::size_t c = 0; c < logits.cols(); ++c) {
                probs.at(r, c) = std::exp(logits.at(r, c) - zmax);
                sum += probs.at(r, c);
            }
            for (std::size_t c = 0; c < logits.cols(); ++c) probs.at(r, c) /= sum;
        }
    }
    return probs;
}

Matrix head_loss_grad(const Head& head, const Matrix& logits,
                      const Matrix& labels) {
    check_labels(logits, labels);
    Matrix grad = head_probabilities(head, logits);
    const double inv_n = 1.0 / static_cast<double>(logits.rows());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad[i] = (grad[i] - labels[i]) * inv_n;
    }
    return grad;
}

Network make_mlp(std::size_t input_dim, std::size_t num_layers,
                 std::size_t hidden, ActivationKind kind, double c,
                 HeadKind head_kind, std::size_t outputs, RngStream& rng,
                 bool residual) {
    Network net;
    std::size_t in = input_dim;
    for (std::size_t l = 0; l < num_layers; ++l) {
        AdapterKind adapter = AdapterKind::None;
        if (in < hidden) adapter = AdapterKind::ZeroPad;
        if (in > hidden) adapter = AdapterKind::LinearProjection;
        net.layers.push_back(
            MollifiedLayer::create(in, hidden, kind, c, rng, adapter, residual));
        in = hidden;
    }
    net.head = Head::create(head_kind, in, outputs, rng);
    return net;
}

namespace {
constexpr std::uint64_t kLayerStreamBase = 100;
}

std::vector<RngStream> layer_streams(const Network& net, const RngStream& rng) {
    std::vector<RngStream> streams;
    streams.reserve(net.depth());
    for (std::size_t i = 0; i < net.depth(); ++i) {
        streams.push_back(rng.substream(kLayerStreamBase + i));
    }
    return streams;
}

ForwardResult network_forward(const Network& net, const Matrix& batch,
                              const Matrix& labels, std::span<const double> p,
                              std::span<RngStream> layer_rngs) {
    if (p.size() != net.depth() || layer_rngs.size() != net.depth()) {
        throw std::invalid_argument(
            "network_forward: need one p level and one rng per layer");
    }
    ForwardResult result;
    result.cache.p.assign(p.begin(), p.end());
    Matrix h = batch;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        LayerForward fwd =
            layer_forward_train(h, net.layers[i], p[i], layer_rngs[i]);
        h = std::move(fwd.h);
        if (!h.all_finite()) {
            throw std::runtime_error(
                "network_forward: non-finite value in layer " +
                std::to_string(i + 1));
        }
        result.cache.layers.push_back(std::move(fwd.cache));
    }
    result.cache.head_input = h;
    result.cache.logits = matmul(h, net.head.weights);
    add_row_vector(result.cache.logits, net.head.bias);
    result.loss = head_loss(net.head, result.cache.logits, labels);
    if (!std::isfinite(result.loss)) {
        throw std::runtime_error("network_forward: non-finite loss in head");
    }
    return result;
}

ForwardResult network_forward(const Network& net, const Matrix& batch,
                              const Matrix& labels, const AnnealState& anneal,
                              std::span<RngStream> layer_rngs) {
    if (anneal.num_layers != net.depth()) {
        throw std::invalid_argument("network_forward: anneal tracks " +
                                    std::to_string(anneal.num_layers) +
                                    " layers, network has " +
                                    std::to_string(net.depth()));
    }
    std::vector<double> p(net.depth());
    for (std::size_t l = 1; l <= net.depth(); ++l) {
        p[l - 1] = schedule_p(anneal, l);
    }
    return network_forward(net, batch, labels, p, layer_rngs);
}

NetworkGrads network_backward(const Network& net, const NetworkCache& cache,
                              const Matrix& labels) {
    NetworkGrads grads;
    grads.layers.resize(net.depth());

    const Matrix dlogits = head_loss_grad(net.head, cache.logits, labels);
    grads.head_dweights = matmul_tn(cache.head_input, dlogits);
    grads.head_dbias = column_sums(dlogits);

    Matrix upstream = matmul_nt(dlogits, net.head.weights);
    for (std::size_t i = net.depth(); i-- > 0;) {
        grads.layers[i] =
            layer_backward(net.layers[i], cache.layers[i], upstream);
        upstream = grads.layers[i].dinput;
    }
    return grads;
}

double network_loss_frozen(const Network& net, const Matrix& batch,
                           const Matrix& labels, const NetworkCache& cache) {
    if (cache.layers.size() != net.depth()) {
        throw std::invalid_argument("network_loss_frozen: stale cache");
    }
    Matrix h = batch;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        h = layer_forward_frozen(h, net.layers[i], cache.layers[i]);
    }
    Matrix logits = matmul(h, net.head.weights);
    add_row_vector(logits, net.head.bias);
    return head_loss(net.head, logits, labels);
}

Matrix network_infer(const Network& net, const Matrix& batch,
                     std::span<const double> p) {
    if (p.size() != net.depth()) {
        throw std::invalid_argument(
            "network_infer: need one p level per layer");
    }
    Matrix h = batch;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        h = layer_forward_infer(h, net.layers[i], p[i]);
    }
    Matrix logits = matmul(h, net.head.weights);
    add_row_vector(logits, net.head.bias);
    return head_probabilities(net.head, logits);
}

EvalResult network_evaluate(const Network& net, const Matrix& batch,
                            const Matrix& labels, std::span<const double> p) {
    if (p.size() != net.depth()) {
        throw std::invalid_argument(
            "network_evaluate: need one p level per layer");
    }
    Matrix h = batch;
    for (std::size_t i = 0; i < net.depth(); ++i) {
        h = layer_forward_infer(h, net.layers[i], p[i]);
    }
    Matrix logits = matmul(h, net.head.weights);
    add_row_vector(logits, net.head.bias);

    EvalResult out;
    out.loss = head_loss(net.head, logits, labels);
    const Matrix probs = head_probabilities(net.head, logits);
    std::size_t correct = 0;
    std::size_t total = 0;
    if (net.head.kind == HeadKind::SigmoidCrossEntropy) {
        for (std::size_t i = 0; i < probs.size(); ++i) {
            correct += (probs[i] >= 0.5) == (labels[i] >= 0.5);
            ++total;
        }
    } else {
        for (std::size_t r = 0; r < probs.rows(); ++r) {
            std::size_t pred = 0, truth = 0;
            for (std::size_t c = 1; c < probs.cols(); ++c) {
                if (probs.at(r, c) > probs.at(r, pred)) pred = c;
                if (labels.at(r, c) > labels.at(r, truth)) truth = c;
            }
            correct += pred == truth;
            ++total;
        }
    }
    out.accuracy = total == 0 ? 0.0 : static_cast<double>(correct) /
                                          static_cast<double>(total);
    return out;
}

}  // namespace mollify
