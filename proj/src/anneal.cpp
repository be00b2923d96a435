#include "mollify/anneal.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mollify {

AnnealAverage anneal_average_from_string(const std::string& name) {
    if (name == "ema") return AnnealAverage::Ema;
    if (name == "window") return AnnealAverage::Window;
    throw std::invalid_argument("unknown anneal average kind: " + name);
}

std::string to_string(AnnealAverage avg) {
    return avg == AnnealAverage::Ema ? "ema" : "window";
}

double schedule_p(const AnnealState& state, std::size_t layer) {
    if (layer < 1 || layer > state.num_layers) {
        throw std::invalid_argument("schedule_p: layer index " +
                                    std::to_string(layer) + " outside 1.." +
                                    std::to_string(state.num_layers));
    }
    if (state.frozen) return 0.0;
    const double exponent = -state.k * state.v *
                            static_cast<double>(layer) /
                            (static_cast<double>(state.t) *
                             static_cast<double>(state.num_layers));
    return 1.0 - std::exp(exponent);
}

void update_loss_average(AnnealState& state, double loss) {
    if (!std::isfinite(loss)) {
        throw std::invalid_argument("update_loss_average: non-finite loss");
    }
    if (loss < 0.0) {
        throw std::invalid_argument("update_loss_average: negative loss");
    }
    if (state.average == AnnealAverage::Window) {
        state.window_buf.push_back(loss);
        while (state.window_buf.size() > state.window) {
            state.window_buf.pop_front();
        }
        state.v = std::accumulate(state.window_buf.begin(),
                                  state.window_buf.end(), 0.0) /
                  static_cast<double>(state.window_buf.size());
    } else if (!state.v_initialized) {
        state.v = loss;
    } else {
        state.v = state.beta * state.v + (1.0 - state.beta) * loss;
    }
    state.v_initialized = true;
    state.t += 1;
}

double expected_skip(AnnealState& state) {
    if (state.frozen) return 0.0;
    double sum = 0.0;
    for (std::size_t l = 1; l <= state.num_layers; ++l) {
        sum += schedule_p(state, l);
    }
    if (sum <= state.delta) state.frozen = true;
    return sum;
}

double sum_skip(const double* p, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += p[i];
    return sum;
}

}  // namespace mollify
