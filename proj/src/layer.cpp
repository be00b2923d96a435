#include "mollify/layer.hpp"

#include <cmath>
#include <stdexcept>

namespace mollify {

AdapterKind adapter_kind_from_string(const std::string& name) {
    if (name == "none") return AdapterKind::None;
    if (name == "zero-pad") return AdapterKind::ZeroPad;
    if (name == "linear-projection") return AdapterKind::LinearProjection;
    throw std::invalid_argument("unknown adapter kind: " + name);
}

std::string to_string(AdapterKind kind) {
    switch (kind) {
        case AdapterKind::None: return "none";
        case AdapterKind::ZeroPad: return "zero-pad";
        case AdapterKind::LinearProjection: return "linear-projection";
    }
    return "?";
}

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, RngStream& rng) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-limit, limit);
    return w;
}

MollifiedLayer MollifiedLayer::create(std::size_t fan_in, std::size_t fan_out,
                                      ActivationKind kind, double c,
                                      RngStream& rng, AdapterKind adapter,
                                      bool residual) {
    if (adapter == AdapterKind::None && fan_in != fan_out) {
        throw std::invalid_argument(
            "MollifiedLayer: identity path needs fan_in == fan_out when the "
            "adapter is none (got " +
            std::to_string(fan_in) + " -> " + std::to_string(fan_out) + ")");
    }
    if (adapter == AdapterKind::ZeroPad && fan_in > fan_out) {
        throw std::invalid_argument("MollifiedLayer: zero-pad cannot shrink " +
                                    std::to_string(fan_in) + " -> " +
                                    std::to_string(fan_out));
    }
    MollifiedLayer layer;
    layer.weights = glorot_uniform(fan_in, fan_out, rng);
    layer.bias = Matrix(1, fan_out);
    layer.adapter = adapter;
    if (adapter == AdapterKind::LinearProjection) {
        layer.projection = glorot_uniform(fan_in, fan_out, rng);
    }
    layer.act = MollifiedActivation::create(kind, fan_out, rng, c);
    layer.residual = residual;
    return layer;
}

Matrix adapt(const Matrix& h_prev, const MollifiedLayer& layer) {
    switch (layer.adapter) {
        case AdapterKind::None:
            if (h_prev.cols() != layer.fan_out()) {
                throw std::invalid_argument(
                    "adapt: adapter missing, fan_in " +
                    std::to_string(h_prev.cols()) + " != fan_out " +
                    std::to_string(layer.fan_out()));
            }
            return h_prev;
        case AdapterKind::ZeroPad: {
            if (h_prev.cols() > layer.fan_out()) {
                throw std::invalid_argument(
                    "adapt: zero-pad cannot shrink " +
                    std::to_string(h_prev.cols()) + " -> " +
                    std::to_string(layer.fan_out()));
            }
            Matrix out(h_prev.rows(), layer.fan_out());
            for (std::size_t r = 0; r < h_prev.rows(); ++r)
                for (std::size_t c = 0; c < h_prev.cols(); ++c)
                    out.at(r, c) = h_prev.at(r, c);
            return out;
        }
        case AdapterKind::LinearProjection:
            return matmul(h_prev, layer.projection);
    }
    throw std::logic_error("adapt: bad adapter kind");
}

Matrix adapt_backward(const Matrix& upstream, const MollifiedLayer& layer) {
    switch (layer.adapter) {
        case AdapterKind::None:
            return upstream;
        case AdapterKind::ZeroPad: {
            Matrix out(upstream.rows(), layer.fan_in());
            for (std::size_t r = 0; r < out.rows(); ++r)
                for (std::size_t c = 0; c < out.cols(); ++c)
                    out.at(r, c) = upstream.at(r, c);
            return out;
        }
        case AdapterKind::LinearProjection:
            return matmul_nt(upstream, layer.projection);
    }
    throw std::logic_error("adapt_backward: bad adapter kind");
}

namespace {

void check_input(const Matrix& h_prev, const MollifiedLayer& layer,
                 const char* who) {
    if (h_prev.cols() != layer.fan_in()) {
        throw std::invalid_argument(std::string(who) + ": input " +
                                    h_prev.shape_str() + " vs weights " +
                                    layer.weights.shape_str());
    }
}

Matrix preactivation(const Matrix& h_prev, const MollifiedLayer& layer) {
    Matrix x = matmul(h_prev, layer.weights);
    add_row_vector(x, layer.bias);
    return x;
}

Matrix mix_paths(const Matrix& pi, const Matrix& adapted, const Matrix& psi,
                 bool residual) {
    Matrix out(psi.rows(), psi.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double noisy = residual ? psi[i] + adapted[i] : psi[i];
        out[i] = pi[i] * adapted[i] + (1.0 - pi[i]) * noisy;
    }
    return out;
}

}  // namespace

LayerForward layer_forward_train(const Matrix& h_prev,
                                 const MollifiedLayer& layer, double p,
                                 RngStream& rng) {
    check_input(h_prev, layer, "layer_forward_train");
    LayerForward out;
    out.cache.input = h_prev;
    out.cache.p = p;
    out.cache.x = preactivation(h_prev, layer);
    out.cache.adapted = adapt(h_prev, layer);

    NoisyForward noisy = mollified_forward(out.cache.x, p, layer.act, rng);
    out.cache.realization = std::move(noisy.realization);

    Matrix pi(h_prev.rows(), layer.fan_out());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        pi[i] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
    out.cache.mask.pi = std::move(pi);

    out.h = mix_paths(out.cache.mask.pi, out.cache.adapted, noisy.value,
                      layer.residual);
    return out;
}

Matrix layer_forward_infer(const Matrix& h_prev, const MollifiedLayer& layer,
                           double p) {
    check_input(h_prev, layer, "layer_forward_infer");
    Matrix x = preactivation(h_prev, layer);
    const Matrix psi = mollified_forward_infer(x, p, layer.act);
    const Matrix adapted = adapt(h_prev, layer);
    Matrix out(psi.rows(), psi.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double noisy = layer.residual ? psi[i] + adapted[i] : psi[i];
        out[i] = p * adapted[i] + (1.0 - p) * noisy;
    }
    return out;
}

Matrix layer_forward_frozen(const Matrix& h_prev, const MollifiedLayer& layer,
                            const LayerCache& cache) {
    check_input(h_prev, layer, "layer_forward_frozen");
    const Matrix x = preactivation(h_prev, layer);
    const Matrix psi = mollified_forward_frozen(x, layer.act,
                                                cache.realization.xi, cache.p);
    const Matrix adapted = adapt(h_prev, layer);
    return mix_paths(cache.mask.pi, adapted, psi, layer.residual);
}

LayerGrads layer_backward(const MollifiedLayer& layer, const LayerCache& cache,
                          const Matrix& upstream) {
    if (!upstream.same_shape(cache.mask.pi)) {
        throw std::invalid_argument("layer_backward: upstream " +
                                    upstream.shape_str() + " vs mask " +
                                    cache.mask.pi.shape_str());
    }
    const Matrix& pi = cache.mask.pi;

    Matrix up_noisy(upstream.rows(), upstream.cols());
    Matrix up_identity(upstream.rows(), upstream.cols());
    for (std::size_t i = 0; i < upstream.size(); ++i) {
        up_noisy[i] = upstream[i] * (1.0 - pi[i]);
        up_identity[i] = upstream[i] * pi[i];
        if (layer.residual) up_identity[i] += up_noisy[i];
    }

    const ActivationGrads act_grads =
        activation_backward(cache.realization, cache.x, up_noisy, layer.act);

    LayerGrads grads;
    grads.dweights = matmul_tn(cache.input, act_grads.dx);
    grads.dbias = column_sums(act_grads.dx);
    grads.da = act_grads.da;
    grads.dinput = matmul_nt(act_grads.dx, layer.weights);
    grads.dinput += adapt_backward(up_identity, layer);
    return grads;
}

Matrix weight_noise_forward(const Matrix& h_prev, const MollifiedLayer& layer,
                            const WeightNoiseConfig& cfg, RngStream& rng) {
    check_input(h_prev, layer, "weight_noise_forward");
    if (cfg.sigma < 0.0) {
        throw std::invalid_argument("weight_noise_forward: sigma must be >= 0");
    }
    Matrix noisy_w = layer.weights;
    for (std::size_t i = 0; i < noisy_w.size(); ++i) {
        noisy_w[i] -= cfg.mu + cfg.sigma * rng.normal();
    }
    Matrix x = matmul(h_prev, noisy_w);
    add_row_vector(x, layer.bias);
    return x.apply([&](double v) { return activate(layer.act.kind, v); });
}

}  // namespace mollify
