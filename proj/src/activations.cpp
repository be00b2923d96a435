#include "mollify/activations.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace mollify {

namespace {

using Arr = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowArr = Eigen::Array<double, 1, Eigen::Dynamic>;

Eigen::Map<const Arr> amap(const Matrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.rows()),
            static_cast<Eigen::Index>(m.cols())};
}

Eigen::Map<Arr> amap_mut(Matrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.rows()),
            static_cast<Eigen::Index>(m.cols())};
}

Eigen::Map<const RowArr> rowmap(const Matrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.cols())};
}

Arr f_of(ActivationKind kind, const Arr& x) {
    switch (kind) {
        case ActivationKind::Sigmoid:
            return 1.0 / (1.0 + (-x).exp());
        case ActivationKind::Tanh:
            return x.tanh();
        case ActivationKind::HardSigmoid:
            return (0.25 * x + 0.5).max(0.0).min(1.0);
        case ActivationKind::Relu:
            return x.max(0.0);
    }
    throw std::logic_error("f_of: bad kind");
}

Arr fprime_of(ActivationKind kind, const Arr& x, const Arr& f) {
    switch (kind) {
        case ActivationKind::Sigmoid:
            return f * (1.0 - f);
        case ActivationKind::Tanh:
            return 1.0 - f.square();
        case ActivationKind::HardSigmoid: {
            Arr pre = 0.25 * x + 0.5;
            return ((pre > 0.0) && (pre < 1.0)).cast<double>() * 0.25;
        }
        case ActivationKind::Relu:
            return (x > 0.0).cast<double>();
    }
    throw std::logic_error("fprime_of: bad kind");
}

void check_units(const Matrix& x, const MollifiedActivation& act,
                 const char* who) {
    if (act.a.cols() != x.cols()) {
        throw std::invalid_argument(std::string(who) + ": sharpness vector " +
                                    act.a.shape_str() + " does not match input " +
                                    x.shape_str());
    }
}

Matrix draw_normals(std::size_t rows, std::size_t cols, RngStream& rng) {
    Matrix out(rows, cols);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rng.normal();
    return out;
}

/// Shared intermediates of the saturating-kind noisy activation.
struct SatInter {
    Arr f, fstar, ustar, delta, sg, sigma, s, sgn_u, inner;
    double slope, offset;
};

SatInter sat_inter(const MollifiedActivation& act, const Arr& x, double p,
                   const Arr& abs_xi) {
    SatInter v;
    const Linearization lin = act.lin();
    v.slope = lin.slope;
    v.offset = lin.offset;
    v.f = f_of(act.kind, x);
    v.fstar = v.f - v.offset;
    v.ustar = v.slope * x;
    v.delta = v.ustar - v.fstar;  // u(x) - f(x)
    Arr arg = v.delta.rowwise() * rowmap(act.a);
    v.sg = 1.0 / (1.0 + (-arg).exp());
    v.sigma = (v.sg - 0.5).square();
    v.s = (p * act.c) * v.sigma * abs_xi;
    v.sgn_u = v.ustar.sign();
    v.inner = v.fstar + v.sgn_u * v.s;
    return v;
}

Arr sat_psi(const SatInter& v) {
    return v.sgn_u * v.ustar.abs().min(v.inner.abs()) + v.offset;
}

/// Shared intermediates of the ReLU noisy activation.
struct ReluInter {
    Arr f, delta, sg, sigma, raw, s;
};

ReluInter relu_inter(const MollifiedActivation& act, const Arr& x, double p,
                     const Arr& abs_xi) {
    ReluInter v;
    v.f = x.max(0.0);
    v.delta = x.min(0.0);  // u(x) - f(x) with u = identity
    Arr arg = v.delta.rowwise() * rowmap(act.a);
    v.sg = 1.0 / (1.0 + (-arg).exp());
    v.sigma = (v.sg - 0.5).square();
    v.raw = p * v.sigma * abs_xi;
    v.s = x.abs().min(v.raw);
    return v;
}

Matrix from_arr(const Arr& a) {
    Matrix out(static_cast<std::size_t>(a.rows()),
               static_cast<std::size_t>(a.cols()));
    amap_mut(out) = a;
    return out;
}

}  // namespace

ActivationKind activation_kind_from_string(const std::string& name) {
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "hard-sigmoid") return ActivationKind::HardSigmoid;
    if (name == "relu") return ActivationKind::Relu;
    throw std::invalid_argument("unknown activation kind: " + name);
}

std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::HardSigmoid: return "hard-sigmoid";
        case ActivationKind::Relu: return "relu";
    }
    return "?";
}

Linearization linearize(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Sigmoid: return {0.25, 0.5};
        case ActivationKind::Tanh: return {1.0, 0.0};
        case ActivationKind::HardSigmoid: return {0.25, 0.5};
        case ActivationKind::Relu: return {1.0, 0.0};
    }
    throw std::logic_error("linearize: bad kind");
}

double activate(ActivationKind kind, double x) {
    switch (kind) {
        case ActivationKind::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case ActivationKind::Tanh: return std::tanh(x);
        case ActivationKind::HardSigmoid:
            return std::min(1.0, std::max(0.0, 0.25 * x + 0.5));
        case ActivationKind::Relu: return x > 0.0 ? x : 0.0;
    }
    throw std::logic_error("activate: bad kind");
}

double activate_grad(ActivationKind kind, double x) {
    switch (kind) {
        case ActivationKind::Sigmoid: {
            const double f = activate(kind, x);
            return f * (1.0 - f);
        }
        case ActivationKind::Tanh: {
            const double f = std::tanh(x);
            return 1.0 - f * f;
        }
        case ActivationKind::HardSigmoid: {
            const double pre = 0.25 * x + 0.5;
            return (pre > 0.0 && pre < 1.0) ? 0.25 : 0.0;
        }
        case ActivationKind::Relu: return x > 0.0 ? 1.0 : 0.0;
    }
    throw std::logic_error("activate_grad: bad kind");
}

MollifiedActivation MollifiedActivation::create(ActivationKind kind,
                                                std::size_t units,
                                                RngStream& rng, double c) {
    MollifiedActivation act;
    act.kind = kind;
    act.c = c;
    act.a = Matrix(1, units);
    for (std::size_t i = 0; i < units; ++i) act.a[i] = rng.uniform(-2.0, 2.0);
    return act;
}

MollifiedActivation MollifiedActivation::with_sharpness(ActivationKind kind,
                                                        Matrix a, double c) {
    MollifiedActivation act;
    act.kind = kind;
    act.c = c;
    act.a = std::move(a);
    return act;
}

Matrix saturation_gap(const Matrix& x, const MollifiedActivation& act) {
    const Linearization lin = act.lin();
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = (lin.offset + lin.slope * x[i]) - activate(act.kind, x[i]);
    }
    return out;
}

Matrix noise_std(const Matrix& x, const MollifiedActivation& act) {
    check_units(x, act, "noise_std");
    const Matrix gap = saturation_gap(x, act);
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const double sg =
                1.0 / (1.0 + std::exp(-act.a[c] * gap.at(r, c)));
            out.at(r, c) = (sg - 0.5) * (sg - 0.5);
        }
    }
    return out;
}

double clamp_psi(ActivationKind kind, double x, double s) {
    const Linearization lin = linearize(kind);
    const double fstar = activate(kind, x) - lin.offset;
    const double ustar = lin.slope * x;
    const double sgn_u = ustar > 0.0 ? 1.0 : (ustar < 0.0 ? -1.0 : 0.0);
    const double inner = fstar + sgn_u * s;
    return sgn_u * std::min(std::abs(ustar), std::abs(inner)) + lin.offset;
}

double relu_psi(double x, double raw_noise) {
    const double f = x > 0.0 ? x : 0.0;
    return f - std::min(std::abs(x), raw_noise);
}

NoisyForward noisy_activation(const Matrix& x, double p,
                              const MollifiedActivation& act, RngStream& rng) {
    check_units(x, act, "noisy_activation");
    if (act.kind == ActivationKind::Relu) {
        throw std::invalid_argument("noisy_activation: use noisy_relu for relu");
    }
    NoisyForward out;
    out.realization.p = p;
    out.realization.xi = draw_normals(x.rows(), x.cols(), rng);
    const Arr abs_xi = amap(out.realization.xi).abs();
    const SatInter v = sat_inter(act, amap(x), p, abs_xi);
    out.realization.s = from_arr(v.s);
    out.value = from_arr(sat_psi(v));
    return out;
}

NoisyForward noisy_relu(const Matrix& x, double p,
                        const MollifiedActivation& act, RngStream& rng) {
    check_units(x, act, "noisy_relu");
    if (act.kind != ActivationKind::Relu) {
        throw std::invalid_argument("noisy_relu: activation kind must be relu");
    }
    NoisyForward out;
    out.realization.p = p;
    out.realization.xi = draw_normals(x.rows(), x.cols(), rng);
    const Arr abs_xi = amap(out.realization.xi).abs();
    const ReluInter v = relu_inter(act, amap(x), p, abs_xi);
    out.realization.s = from_arr(v.s);
    out.value = from_arr(v.f - v.s);
    return out;
}

NoisyForward mollified_forward(const Matrix& x, double p,
                               const MollifiedActivation& act, RngStream& rng) {
    return act.kind == ActivationKind::Relu ? noisy_relu(x, p, act, rng)
                                            : noisy_activation(x, p, act, rng);
}

Matrix mollified_forward_infer(const Matrix& x, double p,
                               const MollifiedActivation& act) {
    check_units(x, act, "mollified_forward_infer");
    const Arr abs_xi = Arr::Constant(static_cast<Eigen::Index>(x.rows()),
                                     static_cast<Eigen::Index>(x.cols()),
                                     kHalfNormalMean);
    if (act.kind == ActivationKind::Relu) {
        const ReluInter v = relu_inter(act, amap(x), p, abs_xi);
        return from_arr(v.f - v.s);
    }
    const SatInter v = sat_inter(act, amap(x), p, abs_xi);
    return from_arr(sat_psi(v));
}

Matrix mollified_forward_frozen(const Matrix& x, const MollifiedActivation& act,
                                const Matrix& xi, double p) {
    check_units(x, act, "mollified_forward_frozen");
    if (!xi.same_shape(x)) {
        throw std::invalid_argument("mollified_forward_frozen: xi " +
                                    xi.shape_str() + " vs x " + x.shape_str());
    }
    const Arr abs_xi = amap(xi).abs();
    if (act.kind == ActivationKind::Relu) {
        const ReluInter v = relu_inter(act, amap(x), p, abs_xi);
        return from_arr(v.f - v.s);
    }
    const SatInter v = sat_inter(act, amap(x), p, abs_xi);
    return from_arr(sat_psi(v));
}

ActivationGrads activation_backward(const NoiseRealization& realization,
                                    const Matrix& x, const Matrix& upstream,
                                    const MollifiedActivation& act) {
    check_units(x, act, "activation_backward");
    if (!realization.xi.same_shape(x) || !upstream.same_shape(x)) {
        throw std::invalid_argument(
            "activation_backward: stale realization, xi " +
            realization.xi.shape_str() + " upstream " + upstream.shape_str() +
            " vs x " + x.shape_str());
    }
    const double p = realization.p;
    const Arr X = amap(x);
    const Arr up = amap(upstream);
    const Arr abs_xi = amap(realization.xi).abs();
    const RowArr a_row = rowmap(act.a);

    Arr dpsi_dx, dpsi_da;
    if (act.kind == ActivationKind::Relu) {
        const ReluInter v = relu_inter(act, X, p, abs_xi);
        const Arr fprime = (X > 0.0).cast<double>();
        const Arr dsig_core = 2.0 * (v.sg - 0.5) * v.sg * (1.0 - v.sg);
        const Arr dsigma_dx =
            (dsig_core.rowwise() * a_row) * (1.0 - fprime);
        const Arr dsigma_da = dsig_core * v.delta;
        const auto cap = X.abs() <= v.raw;  // tie -> cap branch
        dpsi_dx = cap.select(fprime - X.sign(),
                             fprime - p * abs_xi * dsigma_dx);
        dpsi_da = cap.select(Arr::Zero(X.rows(), X.cols()),
                             -p * abs_xi * dsigma_da);
    } else {
        const SatInter v = sat_inter(act, X, p, abs_xi);
        const Arr fprime = fprime_of(act.kind, X, v.f);
        const Arr dsig_core = 2.0 * (v.sg - 0.5) * v.sg * (1.0 - v.sg);
        const Arr dsigma_dx =
            (dsig_core.rowwise() * a_row) * (v.slope - fprime);
        const Arr dsigma_da = dsig_core * v.delta;
        const Arr ds_dx = (p * act.c) * abs_xi * dsigma_dx;
        const Arr ds_da = (p * act.c) * abs_xi * dsigma_da;
        const auto env = v.ustar.abs() <= v.inner.abs();  // tie -> envelope
        const Arr tau = v.sgn_u * v.inner.sign();
        dpsi_dx = env.select(v.sgn_u.square() * v.slope,
                             tau * (fprime + v.sgn_u * ds_dx));
        dpsi_da = env.select(Arr::Zero(X.rows(), X.cols()),
                             tau * v.sgn_u * ds_da);
    }

    ActivationGrads grads;
    grads.dx = from_arr(up * dpsi_dx);
    Matrix da(1, x.cols());
    Eigen::Map<RowArr>(da.data(), static_cast<Eigen::Index>(da.cols())) =
        (up * dpsi_da).colwise().sum();
    grads.da = da;
    return grads;
}

}  // namespace mollify
