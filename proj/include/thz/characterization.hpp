#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "thz/clustering.hpp"
#include "thz/core.hpp"

namespace thz {

/// Close-in free-space-reference path-loss fit.
struct CiFit {
    double n = 0.0;             // path-loss exponent
    double sigma_sf_db = 0.0;   // shadow-fading standard deviation
    double fspl_d0_db = 0.0;    // anchor at the reference distance
    std::vector<double> residuals_db;
};

enum class SpreadMethod {
    Circular,  // resultant-vector spread, wrap safe (default)
    Rms        // power-weighted RMS around the (circular) mean
};

struct CharacterizationConfig {
    SpreadMethod spread_method = SpreadMethod::Circular;
    /// Frequency anchoring the CI fit; 0 selects the sweep's band center.
    double ci_frequency_hz = 0.0;
    double ci_d0_m = 1.0;
};

struct AngularSpreads {
    double asa_rad = 0.0;
    double esa_rad = 0.0;
};

/// Per-cluster spreads; means cover clusters with at least two members and
/// are absent when no such cluster exists.
struct ClusterSpreadStats {
    std::size_t n_clusters = 0;
    std::vector<double> cds_s;
    std::vector<double> casa_rad;
    std::vector<double> cesa_rad;
    std::optional<double> mean_cds_s;
    std::optional<double> mean_casa_rad;
    std::optional<double> mean_cesa_rad;
};

/// Everything reported for one receiver position. pl_best_db is the raw
/// strongest-direction value; pl_best_comp_db has the boresight receive
/// gain added back so it compares against free-space loss.
struct PositionStats {
    std::string id;
    double distance_m = 0.0;
    double pl_best_db = 0.0;
    double pl_best_comp_db = 0.0;
    double pl_omni_db = 0.0;
    std::optional<double> k_factor_db;  // absent when only one cluster exists
    double ds_s = 0.0;
    double asa_rad = 0.0;
    double esa_rad = 0.0;
    std::size_t n_paths = 0;
    ClusterSpreadStats clusters;
};

/// Free-space path loss by Friis' law: -20 log10(c / (4 pi f d)), dB.
double fspl_db(double distance_m, double frequency_hz);

/// Best-direction path loss: -10 log10(max_r mean_k |H[r][k]|^2).
double pl_best_db(const Ctf& ctf);

/// Omnidirectional path loss from de-embedded path gains:
/// -10 log10(sum alpha^2).
double pl_omni_db(const std::vector<Mpc>& mpcs);

struct PlPoint {
    double distance_m = 0.0;
    double pl_db = 0.0;
};

/// One-parameter least squares of pl = FSPL(d0) + 10 n log10(d/d0) + chi.
/// sigma_sf is the population standard deviation of the residuals.
CiFit fit_ci(const std::vector<PlPoint>& points, double frequency_hz, double d0_m = 1.0);

/// Ratio of the strongest cluster's power to the power of all others, dB.
/// Exactly one cluster -> nullopt (the ratio is undefined, not zero).
std::optional<double> k_factor_db(const std::vector<Cluster>& clusters);

/// Power-weighted RMS delay spread, p = alpha^2.
double rms_delay_spread_s(const std::vector<Mpc>& mpcs);
double rms_delay_spread_s(const std::vector<Mpc>& mpcs,
                          const std::vector<std::size_t>& subset);

/// Azimuth and elevation spreads of arrival, p = alpha^2.
AngularSpreads angular_spreads(const std::vector<Mpc>& mpcs,
                               SpreadMethod method = SpreadMethod::Circular);
AngularSpreads angular_spreads(const std::vector<Mpc>& mpcs,
                               const std::vector<std::size_t>& subset,
                               SpreadMethod method = SpreadMethod::Circular);

/// Intra-cluster delay/angular spreads for every cluster.
ClusterSpreadStats cluster_stats(const std::vector<Cluster>& clusters,
                                 const std::vector<Mpc>& mpcs,
                                 SpreadMethod method = SpreadMethod::Circular);

}  // namespace thz
