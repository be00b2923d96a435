#pragma once

#include <cstddef>
#include <deque>
#include <string>

namespace mollify {

enum class AnnealAverage { Ema, Window };

AnnealAverage anneal_average_from_string(const std::string& name);
std::string to_string(AnnealAverage avg);

/// Per-layer noise/skip schedule coupled to a moving average of the
/// loss: p_l = 1 - exp(-k*v*l / (t*L)). Lower layers get smaller
/// exponents, so their noise anneals away faster; the whole schedule
/// decays as the update counter t grows and rises with the loss average
/// v. Once the summed schedule drops to the stop threshold delta the
/// state freezes and every p is pinned at 0 for good.
struct AnnealState {
    double k = 1.0;               // schedule sharpness, >= 0
    std::size_t num_layers = 1;   // L
    std::size_t t = 1;            // update counter, >= 1
    double v = 0.0;               // loss moving average
    bool v_initialized = false;
    double beta = 0.9;            // EMA decay, in (0,1)
    double delta = 0.0;           // stop threshold on sum of p
    bool frozen = false;

    AnnealAverage average = AnnealAverage::Ema;
    std::size_t window = 50;          // used when average == Window
    std::deque<double> window_buf;
};

/// Schedule value for 1-based layer index in [1, L]; 0 when frozen.
double schedule_p(const AnnealState& state, std::size_t layer);

/// Advance the moving average with a new loss observation and bump t.
/// The first call initializes the average to the loss itself.
/// Throws on non-finite or negative loss.
void update_loss_average(AnnealState& state, double loss);

/// Sum of schedule_p over layers 1..L. When the sum falls to <= delta
/// the state freezes permanently (subsequent calls return 0).
double expected_skip(AnnealState& state);

/// Plain sum helper used by expected_skip; exposed for testing.
double sum_skip(const double* p, std::size_t n);

}  // namespace mollify
