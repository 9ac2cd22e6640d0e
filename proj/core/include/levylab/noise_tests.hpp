#pragma once

#include <cstddef>
#include <vector>

#include "levylab/levy_noise.hpp"
#include "levylab/report.hpp"

namespace levylab {

struct NoiseTestParams {
    // Lower edge of the band whose arrivals and counts are tested.
    double band_lo = 1.0;
    std::size_t interarrival_events = 10000;
    std::size_t symmetry_samples = 10000;
    std::size_t tail_samples = 100000;
    double tail_fraction = 0.1;
    double tail_tolerance = 0.15;
    std::size_t count_replicates = 10000;
    double count_horizon = 10.0;
};

// Statistical checks of the sampler, one report each:
//   noise-interarrival  KS of inter-arrival times on (band_lo, inf) against Exp(rate), p > 0.01
//   noise-symmetry      sign-flip KS of projected jumps, p > 0.01 on every probe
//   noise-tail          log-log tail exponent of jump norms within tail_tolerance of alpha
//   noise-count         event-count mean within 3 SE of T * rate, variance within 5 T rate / sqrt(R)
std::vector<VerifierReport> run_noise_tests(const LevyNoiseModel& noise, const NoiseTestParams& params,
                                            const RngStream& rng);

// Rows (band_lo, band_hi, rate, small_jump_variance, tail_moment_order, tail_moment_value).
// small_jump_variance is evaluated at band_hi when band_hi <= 1 and left empty otherwise.
Table noise_band_table(const LevyNoiseModel& noise, const std::vector<NoiseBand>& bands,
                       const std::vector<double>& tail_orders);

}  // namespace levylab
