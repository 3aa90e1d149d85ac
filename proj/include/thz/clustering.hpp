#pragma once

#include <cstddef>
#include <vector>

#include "thz/core.hpp"

namespace thz {

/// What to do with density-noise points: keep each as its own cluster
/// (power conserving, the default) or drop them.
enum class NoisePolicy { Singleton, Discard };

struct ClusteringConfig {
    double xi = 3.0;    // delay-term weight of the component distance
    double eps = 0.35;  // neighborhood radius
    std::size_t min_pts = 2;
    NoisePolicy noise_policy = NoisePolicy::Singleton;

    void validate() const;
};

/// Labeled group of paths. Representative delay/angles are those of the
/// strongest member; power is the sum of member powers.
struct Cluster {
    std::vector<std::size_t> members;  // indices into the source path list
    double tau_s = 0.0;
    double aoa_rad = 0.0;
    double eoa_rad = 0.0;
    double power = 0.0;  // sum of member alpha^2
};

/// Multipath component distance:
///   sqrt( xi (tau_a - tau_b)^2 / tau_m^2 + |Omega_a - Omega_b|^2 )
/// with Omega the unit arrival vectors. tau_m = 0 is only allowed when the
/// delays are equal (the delay term is then zero).
double mcd(const Mpc& a, const Mpc& b, double tau_m, double xi);

/// Dense symmetric pairwise-distance matrix.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> d;  // row-major n x n

    double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

/// All pairwise component distances; tau_m is the maximum pairwise delay
/// difference of the list (zero delay term when all delays coincide).
DistanceMatrix mcd_matrix(const std::vector<Mpc>& mpcs, double xi);

/// Density-based labeling on a precomputed distance matrix. Core points
/// have >= min_pts neighbors within eps (self included). Noise points get
/// fresh singleton labels (Singleton policy) or -1 (Discard policy).
/// Deterministic for a given input order; ties expand lowest index first.
std::vector<int> dbscan(const DistanceMatrix& dist, const ClusteringConfig& cfg);

/// Groups paths by label and derives cluster representatives; output sorted
/// by descending power. Labels of -1 (discarded noise) are skipped.
std::vector<Cluster> form_clusters(const std::vector<Mpc>& mpcs,
                                   const std::vector<int>& labels);

/// mcd_matrix + dbscan + form_clusters in one call.
std::vector<Cluster> cluster_mpcs(const std::vector<Mpc>& mpcs,
                                  const ClusteringConfig& cfg);

}  // namespace thz
