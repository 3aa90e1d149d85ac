#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "thz/core.hpp"
#include "thz/forward.hpp"

namespace thz {

/// Settings of the path-parameter estimator.
struct EstimatorConfig {
    std::size_t max_paths = 50;
    double threshold_offset_db = -30.0;  // relative to the strongest path
    std::size_t delay_oversampling = 8;
    std::size_t angle_refine_steps = 24;  // objective evaluations per coordinate
    double convergence_eps = 1e-4;
    std::size_t max_em_iterations = 20;

    void validate() const;
};

/// One extracted path: the de-embedded Mpc plus the per-direction complex
/// amplitudes it was reconstructed with and the fraction of the input
/// energy that reconstruction explains.
struct MpcEstimate {
    Mpc mpc;
    double explained_fraction = 0.0;  // in [0, 1]
    std::vector<std::complex<double>> direction_amplitudes;
};

/// Detection threshold in dB: 20 log10(alpha1) + offset (offset < 0).
double power_threshold(double alpha1, double offset_db);

/// Per-direction oversampled delay power map. Bin m covers delay
/// m / (n_bins * f_step); rows preserve the energy of the CTF rows.
struct DelayAngleMap {
    std::size_t n_dir = 0;
    std::size_t n_bins = 0;
    double bin_spacing_s = 0.0;
    std::vector<double> power;  // row-major n_dir x n_bins

    double at(std::size_t dir, std::size_t bin) const { return power[dir * n_bins + bin]; }
};

/// Zero-padded inverse DFT of every steering row, squared magnitude,
/// normalized so each row's total map energy equals the row energy of H.
DelayAngleMap delay_angle_map(const Ctf& ctf, std::size_t oversampling);

/// Successive-cancellation seeding: repeatedly take the strongest peak of
/// the delay-angle map, localize it in delay and angle, solve per-direction
/// amplitudes by least squares and subtract. Stops at the relative power
/// threshold, at an absolute noise gate, or at max_paths. Result is ordered
/// by descending power.
std::vector<MpcEstimate> sic_initialize(const Ctf& ctf, const AntennaPattern& pattern,
                                        const EstimatorConfig& cfg);

/// Expectation-maximization refinement: per path, re-derive the residual
/// with all other paths cancelled, then coordinate-ascend delay (golden
/// section), arrival angles (pattern-weighted correlation) and per-direction
/// amplitudes (closed form). The reconstruction residual never increases.
std::vector<MpcEstimate> sage_refine(const Ctf& ctf, std::vector<MpcEstimate> estimates,
                                     const AntennaPattern& pattern,
                                     const EstimatorConfig& cfg);

/// Full extraction: sic_initialize, sage_refine, then prune paths whose
/// refined power fell below the threshold of the refined strongest path.
std::vector<MpcEstimate> estimate_mpcs(const Ctf& ctf, const AntennaPattern& pattern,
                                       const EstimatorConfig& cfg);

}  // namespace thz
