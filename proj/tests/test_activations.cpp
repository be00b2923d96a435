#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mollify/activations.hpp"
#include "mollify/finite_diff.hpp"
#include "mollify/rng.hpp"

using namespace mollify;

namespace {

const std::vector<ActivationKind> kSaturating = {
    ActivationKind::Sigmoid, ActivationKind::Tanh, ActivationKind::HardSigmoid};

MollifiedActivation unit_act(ActivationKind kind, double a = 1.0,
                             double c = 1.0) {
    return MollifiedActivation::with_sharpness(kind, Matrix{{a}}, c);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("linearize returns (f'(0), f(0))") {
    CHECK(linearize(ActivationKind::Sigmoid).slope == doctest::Approx(0.25));
    CHECK(linearize(ActivationKind::Sigmoid).offset == doctest::Approx(0.5));
    CHECK(linearize(ActivationKind::Tanh).slope == doctest::Approx(1.0));
    CHECK(linearize(ActivationKind::Tanh).offset == doctest::Approx(0.0));
    CHECK(linearize(ActivationKind::HardSigmoid).slope == doctest::Approx(0.25));
    CHECK(linearize(ActivationKind::HardSigmoid).offset == doctest::Approx(0.5));
    CHECK(linearize(ActivationKind::Relu).slope == doctest::Approx(1.0));
}

TEST_CASE("hard-sigmoid matches clamp(0.25x + 0.5, 0, 1)") {
    CHECK(activate(ActivationKind::HardSigmoid, 0.0) == doctest::Approx(0.5));
    CHECK(activate(ActivationKind::HardSigmoid, 2.0) == doctest::Approx(1.0));
    CHECK(activate(ActivationKind::HardSigmoid, -3.0) == doctest::Approx(0.0));
    CHECK(activate(ActivationKind::HardSigmoid, 1.0) == doctest::Approx(0.75));
    // Inverse on the linear region: 4*(f(x) - 0.5) == x.
    for (double x : {-1.5, -0.2, 0.0, 0.7, 1.9}) {
        CHECK(4.0 * (activate(ActivationKind::HardSigmoid, x) - 0.5) ==
              doctest::Approx(x).epsilon(1e-12));
    }
}

TEST_CASE("saturation gap is zero at the origin for every kind") {
    for (ActivationKind kind :
         {ActivationKind::Sigmoid, ActivationKind::Tanh,
          ActivationKind::HardSigmoid, ActivationKind::Relu}) {
        const Matrix gap = saturation_gap(Matrix{{0.0}}, unit_act(kind));
        CHECK(gap[0] == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("saturation gap: direct evaluation of both branches") {
    // sigmoid at x = 4: (0.25*4 + 0.5) - sigmoid(4)
    const Matrix gap_s =
        saturation_gap(Matrix{{4.0}}, unit_act(ActivationKind::Sigmoid));
    CHECK(gap_s[0] == doctest::Approx(1.5 - sigmoid(4.0)).epsilon(1e-14));
    CHECK(gap_s[0] == doctest::Approx(0.51799).epsilon(1e-4));

    // tanh at x = -3: -3 - tanh(-3)
    const Matrix gap_t =
        saturation_gap(Matrix{{-3.0}}, unit_act(ActivationKind::Tanh));
    CHECK(gap_t[0] == doctest::Approx(-3.0 - std::tanh(-3.0)).epsilon(1e-14));
    CHECK(gap_t[0] == doctest::Approx(-2.00495).epsilon(1e-4));
}

TEST_CASE("noise std: zero where the linearization is exact") {
    const Matrix s =
        noise_std(Matrix{{0.0}}, unit_act(ActivationKind::Sigmoid));
    CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-15));
    // hard-sigmoid is exactly linear on [-2, 2], so no noise anywhere there
    const Matrix hs = noise_std(Matrix{{-1.5, 0.0, 1.5}},
                                MollifiedActivation::with_sharpness(
                                    ActivationKind::HardSigmoid,
                                    Matrix{{1.0, 1.0, 1.0}}));
    for (std::size_t i = 0; i < hs.size(); ++i) CHECK(hs[i] == 0.0);
}

TEST_CASE("noise std saturates toward 0.25") {
    const Matrix s =
        noise_std(Matrix{{30.0}}, unit_act(ActivationKind::Sigmoid, 1000.0));
    CHECK(s[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(s[0] <= 0.25);  // the open bound is only reachable by rounding
}

TEST_CASE("noise std: direct evaluation at a = 1, sigmoid x = 4") {
    const Matrix s = noise_std(Matrix{{4.0}}, unit_act(ActivationKind::Sigmoid));
    const double delta = 1.5 - sigmoid(4.0);
    const double expect = std::pow(sigmoid(delta) - 0.5, 2);
    CHECK(s[0] == doctest::Approx(expect).epsilon(1e-14));
    CHECK(std::abs(s[0] - 0.016045) <= 1e-5);
}

TEST_CASE("zero-noise identity: p = 0 recovers f on a grid") {
    RngStream rng(11);
    for (ActivationKind kind : kSaturating) {
        auto act = unit_act(kind, 0.7);
        for (double x = -6.0; x <= 6.0; x += 0.0625) {
            const auto fwd = noisy_activation(Matrix{{x}}, 0.0, act, rng);
            CHECK(std::abs(fwd.value[0] - activate(kind, x)) <= 1e-15);
            CHECK(fwd.realization.s[0] == 0.0);
        }
    }
}

TEST_CASE("saturated noise collapses onto the linear envelope") {
    // sigmoid, x = 2, forced s = 10: min(|0.5|, |0.38079 + 10|) -> 0.5,
    // psi = 0.5 + 0.5 = u(2) = 1.0
    CHECK(clamp_psi(ActivationKind::Sigmoid, 2.0, 10.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // and from below
    CHECK(clamp_psi(ActivationKind::Sigmoid, -2.0, 10.0) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(clamp_psi(ActivationKind::Tanh, 1.5, 100.0) ==
          doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("origin is a fixed point regardless of noise") {
    RngStream rng(13);
    for (ActivationKind kind : kSaturating) {
        for (double s : {0.0, 0.3, 5.0, 1e9}) {
            CHECK(clamp_psi(kind, 0.0, s) ==
                  doctest::Approx(activate(kind, 0.0)).epsilon(1e-15));
        }
        for (double p : {0.0, 0.4, 1.0}) {
            auto fwd = noisy_activation(Matrix{{0.0}}, p, unit_act(kind), rng);
            CHECK(fwd.value[0] ==
                  doctest::Approx(activate(kind, 0.0)).epsilon(1e-15));
        }
    }
}

TEST_CASE("noisy relu: p = 0 recovers relu") {
    RngStream rng(17);
    auto act = unit_act(ActivationKind::Relu);
    for (double x = -4.0; x <= 4.0; x += 0.25) {
        const auto fwd = noisy_relu(Matrix{{x}}, 0.0, act, rng);
        CHECK(fwd.value[0] == activate(ActivationKind::Relu, x));
    }
}

TEST_CASE("noisy relu: huge noise is capped at |x|") {
    // x = -1: s caps at 1, psi = 0 - 1 = -1 = x
    CHECK(relu_psi(-1.0, 1e12) == doctest::Approx(-1.0));
    // x = 2: s caps at 2, psi = 2 - 2 = 0 (the large-noise limit is
    // min(x, 0), not the identity map)
    CHECK(relu_psi(2.0, 1e12) == doctest::Approx(0.0));
}

TEST_CASE("boundedness: psi stays inside the linear envelope") {
    RngStream rng(19);
    for (ActivationKind kind : kSaturating) {
        const Linearization lin = linearize(kind);
        auto act = unit_act(kind, 1.3, 2.0);
        for (int trial = 0; trial < 200; ++trial) {
            const double x = rng.uniform(-8.0, 8.0);
            const double p = rng.uniform();
            const auto fwd = noisy_activation(Matrix{{x}}, p, act, rng);
            const double ustar = std::abs(lin.slope * x);
            CHECK(fwd.value[0] >= lin.offset - ustar - 1e-12);
            CHECK(fwd.value[0] <= lin.offset + ustar + 1e-12);
        }
    }
}

TEST_CASE("with fixed noise, increasing p pulls psi toward u(x)") {
    RngStream rng(23);
    auto act = unit_act(ActivationKind::Sigmoid, 1.5);
    const Linearization lin = linearize(ActivationKind::Sigmoid);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = rng.uniform(-6.0, 6.0);
        Matrix xi{{rng.normal()}};
        const double u = lin.offset + lin.slope * x;
        double prev_gap = -1.0;
        bool first = true;
        for (double p = 0.0; p <= 1.0; p += 0.1) {
            const Matrix v =
                mollified_forward_frozen(Matrix{{x}}, act, xi, p);
            const double gap = std::abs(v[0] - u);
            if (!first) CHECK(gap <= prev_gap + 1e-12);
            prev_gap = gap;
            first = false;
        }
    }
}

TEST_CASE("backward: p = 0 reduces to the plain activation derivative") {
    RngStream rng(29);
    auto act = unit_act(ActivationKind::Sigmoid);
    const Matrix x{{1.3, -0.4, 2.8}};
    act.a = Matrix{{0.9, 1.1, -0.5}};
    const auto fwd = noisy_activation(x, 0.0, act, rng);
    const Matrix upstream{{1.0, 2.0, -1.5}};
    const auto grads = activation_backward(fwd.realization, x, upstream, act);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double want =
            activate_grad(ActivationKind::Sigmoid, x[i]) * upstream[i];
        CHECK(grads.dx[i] == doctest::Approx(want).epsilon(1e-12));
        CHECK(grads.da[i] == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("backward: clamped branch propagates the envelope slope") {
    auto act = unit_act(ActivationKind::Sigmoid);
    const Matrix x{{2.0}};
    NoiseRealization real;
    real.p = 1.0;
    real.xi = Matrix{{1e9}};  // forces the envelope branch
    real.s = Matrix{{0.0}};   // recomputed internally
    const Matrix upstream{{2.0}};
    const auto grads = activation_backward(real, x, upstream, act);
    CHECK(grads.dx[0] == doctest::Approx(0.25 * 2.0).epsilon(1e-12));
    CHECK(grads.da[0] == doctest::Approx(0.0));
}

TEST_CASE("backward matches finite differences of the frozen forward") {
    RngStream rng(31);
    const std::vector<ActivationKind> kinds = {
        ActivationKind::Sigmoid, ActivationKind::Tanh,
        ActivationKind::HardSigmoid, ActivationKind::Relu};
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const ActivationKind kind = kinds[trial % kinds.size()];
        const std::size_t n = 4;
        Matrix x(1, n), a(1, n), w(1, n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform(-4.0, 4.0);
            a[i] = rng.uniform(-2.0, 2.0);
            w[i] = rng.uniform(-1.0, 1.0);
        }
        const double p = rng.uniform();
        auto act = MollifiedActivation::with_sharpness(kind, a,
                                                       rng.uniform(0.5, 2.0));
        const auto fwd = mollified_forward(x, p, act, rng);
        const auto grads = activation_backward(fwd.realization, x, w, act);

        const auto weighted = [&](const Matrix& value) {
            double acc = 0.0;
            for (std::size_t i = 0; i < value.size(); ++i)
                acc += w[i] * value[i];
            return acc;
        };
        const Matrix fd_x = finite_diff_grad(
            [&](const Matrix& xp) {
                return weighted(
                    mollified_forward_frozen(xp, act, fwd.realization));
            },
            x, 1e-5);
        const Matrix fd_a = finite_diff_grad(
            [&](const Matrix& ap) {
                auto probe = MollifiedActivation::with_sharpness(kind, ap, act.c);
                return weighted(
                    mollified_forward_frozen(x, probe, fwd.realization));
            },
            act.a, 1e-5);
        for (std::size_t i = 0; i < n; ++i) {
            const double sx =
                std::max({1.0, std::abs(grads.dx[i]), std::abs(fd_x[i])});
            CHECK(std::abs(grads.dx[i] - fd_x[i]) / sx <= 1e-6);
            const double sa =
                std::max({1.0, std::abs(grads.da[i]), std::abs(fd_a[i])});
            CHECK(std::abs(grads.da[i] - fd_a[i]) / sa <= 1e-6);
            ++checked;
        }
    }
    CHECK(checked == 400);
}

TEST_CASE("backward rejects a stale realization") {
    RngStream rng(37);
    auto act = unit_act(ActivationKind::Tanh);
    const auto fwd = noisy_activation(Matrix{{0.5}}, 0.5, act, rng);
    const Matrix wrong_x{{0.5, 0.6}};
    auto act2 = MollifiedActivation::with_sharpness(ActivationKind::Tanh,
                                                    Matrix{{1.0, 1.0}});
    CHECK_THROWS_AS(
        activation_backward(fwd.realization, wrong_x, wrong_x, act2),
        std::invalid_argument);
}

TEST_CASE("infer mode uses the half-normal mean and is deterministic") {
    auto act = unit_act(ActivationKind::Sigmoid, 1.2, 1.5);
    const Matrix x{{3.0, -2.0, 0.4}};
    act.a = Matrix{{1.2, 0.3, -0.8}};
    const Matrix a1 = mollified_forward_infer(x, 0.7, act);
    const Matrix a2 = mollified_forward_infer(x, 0.7, act);
    CHECK(a1 == a2);
    // matches the frozen forward with |xi| pinned to sqrt(2/pi)
    Matrix xi(1, 3, kHalfNormalMean);
    const Matrix frozen = mollified_forward_frozen(x, act, xi, 0.7);
    CHECK(max_abs_diff(a1, frozen) == 0.0);
}
