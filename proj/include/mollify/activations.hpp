#pragma once

#include <string>

#include "mollify/matrix.hpp"
#include "mollify/rng.hpp"

namespace mollify {

enum class ActivationKind { Sigmoid, Tanh, HardSigmoid, Relu };

ActivationKind activation_kind_from_string(const std::string& name);
std::string to_string(ActivationKind kind);

/// First-order expansion of f at the origin: u(x) = offset + slope * x.
struct Linearization {
    double slope;
    double offset;
};

Linearization linearize(ActivationKind kind);

/// f(x). hard-sigmoid is clamp(0.25x + 0.5, 0, 1).
double activate(ActivationKind kind, double x);
/// f'(x); at clamp corners the saturated branch (derivative 0) is taken.
double activate_grad(ActivationKind kind, double x);

/// Mean of |xi| for xi ~ N(0,1), i.e. sqrt(2/pi).
inline constexpr double kHalfNormalMean = 0.7978845608028654;

/// Per-unit activation state: the base nonlinearity f, its linearization
/// u, a learnable per-unit sharpness a_i driving the adaptive noise std,
/// and the global noise magnitude constant c.
struct MollifiedActivation {
    ActivationKind kind = ActivationKind::Sigmoid;
    Matrix a;        // 1 x units, trainable
    double c = 1.0;  // > 0

    static MollifiedActivation create(ActivationKind kind, std::size_t units,
                                      RngStream& rng, double c = 1.0);
    static MollifiedActivation with_sharpness(ActivationKind kind, Matrix a,
                                              double c = 1.0);

    std::size_t units() const { return a.cols(); }
    Linearization lin() const { return linearize(kind); }
};

/// Sampled noise attached to one forward pass; the backward pass reuses
/// it so the realized function stays frozen. s = p*c*sigma(x)*|xi| is
/// non-negative elementwise and identically zero when p = 0.
struct NoiseRealization {
    Matrix xi;  // standard-normal draws, batch x units
    Matrix s;   // realized noise magnitudes, batch x units
    double p = 0.0;
};

/// Saturation gap Delta = u(x) - f(x), elementwise. x is batch x units.
Matrix saturation_gap(const Matrix& x, const MollifiedActivation& act);

/// Adaptive noise std sigma(x) = (sigmoid(a * Delta) - 0.5)^2, in [0, 0.25).
Matrix noise_std(const Matrix& x, const MollifiedActivation& act);

/// The clamp at the heart of the noisy activation, with the noise
/// magnitude s >= 0 supplied directly:
///   psi = sgn(u*(x)) * min(|u*(x)|, |f*(x) + sgn(u*(x))*s|) + u(0)
/// where f*(x) = f(x) - f(0) and u*(x) = f'(0)*x. sgn(0) := 0.
double clamp_psi(ActivationKind kind, double x, double s);

/// ReLU counterpart: psi = relu(x) - min(|x|, raw_noise).
double relu_psi(double x, double raw_noise);

/// Noisy activation for the saturating kinds. Draws xi ~ N(0,1) per
/// element, sets s = p*c*sigma(x)*|xi| and applies clamp_psi. Returns
/// the values and the realization for the backward pass.
struct NoisyForward {
    Matrix value;
    NoiseRealization realization;
};
NoisyForward noisy_activation(const Matrix& x, double p,
                              const MollifiedActivation& act, RngStream& rng);

/// ReLU variant: s = min(|x|, p*sigma(x)*|xi|), psi = relu(x) - s.
/// The noise is capped by |x|, so even huge draws only pull the output
/// down to min(x, 0) rather than onto the linear map x.
NoisyForward noisy_relu(const Matrix& x, double p,
                        const MollifiedActivation& act, RngStream& rng);

/// Dispatches to noisy_activation or noisy_relu on act.kind.
NoisyForward mollified_forward(const Matrix& x, double p,
                               const MollifiedActivation& act, RngStream& rng);

/// Deterministic expectation-mode forward: |xi| is replaced by its mean
/// sqrt(2/pi); no sampling.
Matrix mollified_forward_infer(const Matrix& x, double p,
                               const MollifiedActivation& act);

/// Re-evaluates the noisy forward holding the sampled draws fixed; this
/// is the realized function the backward pass differentiates, so finite
/// differences of it must match activation_backward.
Matrix mollified_forward_frozen(const Matrix& x, const MollifiedActivation& act,
                                const Matrix& xi, double p);
inline Matrix mollified_forward_frozen(const Matrix& x,
                                       const MollifiedActivation& act,
                                       const NoiseRealization& realization) {
    return mollified_forward_frozen(x, act, realization.xi, realization.p);
}

struct ActivationGrads {
    Matrix dx;  // batch x units
    Matrix da;  // 1 x units, summed over the batch
};

/// Exact derivative of the frozen forward expression: xi is held fixed,
/// min picks the branch recorded at the realization (ties go to the
/// linear envelope), sgn factors are frozen constants. sigma(x) is
/// differentiated through, both in x and in a.
ActivationGrads activation_backward(const NoiseRealization& realization,
                                    const Matrix& x, const Matrix& upstream,
                                    const MollifiedActivation& act);

}  // namespace mollify
