#include "thz/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace thz {

namespace {

double direction_distance_sq(const Mpc& a, const Mpc& b) {
    const auto u = a.direction();
    const auto v = b.direction();
    const double dx = u[0] - v[0], dy = u[1] - v[1], dz = u[2] - v[2];
    return dx * dx + dy * dy + dz * dz;
}

double mcd_with_delay_scale(const Mpc& a, const Mpc& b, double tau_m, double xi) {
    const double dtau = a.tau_s - b.tau_s;
    double delay_term = 0.0;
    if (dtau != 0.0) {
        if (!(tau_m > 0.0))
            throw InputError("mcd: tau_m must be positive when delays differ");
        delay_term = xi * dtau * dtau / (tau_m * tau_m);
    }
    return std::sqrt(delay_term + direction_distance_sq(a, b));
}

}  // namespace

void ClusteringConfig::validate() const {
    if (!(xi > 0.0)) throw InputError("clustering: xi must be positive");
    if (!(eps > 0.0)) throw InputError("clustering: eps must be positive");
    if (min_pts < 1) throw InputError("clustering: min_pts must be >= 1");
}

double mcd(const Mpc& a, const Mpc& b, double tau_m, double xi) {
    return mcd_with_delay_scale(a, b, tau_m, xi);
}

DistanceMatrix mcd_matrix(const std::vector<Mpc>& mpcs, double xi) {
    const std::size_t n = mpcs.size();
    if (n == 0) throw InputError("mcd_matrix: need at least one path");

    double tau_m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            tau_m = std::max(tau_m, std::abs(mpcs[i].tau_s - mpcs[j].tau_s));

    DistanceMatrix dist;
    dist.n = n;
    dist.d.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = mcd_with_delay_scale(mpcs[i], mpcs[j], tau_m, xi);
            dist.d[i * n + j] = d;
            dist.d[j * n + i] = d;
        }
    }
    return dist;
}

std::vector<int> dbscan(const DistanceMatrix& dist, const ClusteringConfig& cfg) {
    cfg.validate();
    const std::size_t n = dist.n;
    if (dist.d.size() != n * n) throw ContractViolation("dbscan: matrix is not square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(dist.at(i, j) - dist.at(j, i)) > 1e-12)
                throw ContractViolation("dbscan: matrix is not symmetric");

    auto neighbors = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j)
            if (dist.at(i, j) <= cfg.eps) out.push_back(j);  // self included
        return out;
    };

    constexpr int kUnvisited = -2;
    constexpr int kNoise = -1;
    std::vector<int> labels(n, kUnvisited);
    int next_label = 0;

    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        auto nbrs = neighbors(i);
        if (nbrs.size() < cfg.min_pts) {
            labels[i] = kNoise;
            continue;
        }
        const int label = next_label++;
        labels[i] = label;
        std::deque<std::size_t> queue(nbrs.begin(), nbrs.end());
        while (!queue.empty()) {
            const std::size_t j = queue.front();
            queue.pop_front();
            if (labels[j] == kNoise) labels[j] = label;  // border point
            if (labels[j] != kUnvisited) continue;
            labels[j] = label;
            auto jn = neighbors(j);
            if (jn.size() >= cfg.min_pts) queue.insert(queue.end(), jn.begin(), jn.end());
        }
    }

    if (cfg.noise_policy == NoisePolicy::Singleton) {
        for (std::size_t i = 0; i < n; ++i)
            if (labels[i] == kNoise) labels[i] = next_label++;
    }
    return labels;
}

std::vector<Cluster> form_clusters(const std::vector<Mpc>& mpcs, const std::vector<int>& labels) {
    if (labels.size() != mpcs.size())
        throw ContractViolation("form_clusters: labels do not cover the path list");

    int max_label = -1;
    for (int l : labels) max_label = std::max(max_label, l);

    std::vector<Cluster> clusters;
    if (max_label < 0) return clusters;
    clusters.resize(std::size_t(max_label) + 1);
    for (std::size_t i = 0; i < mpcs.size(); ++i) {
        if (labels[i] < 0) continue;  // discarded noise
        clusters[std::size_t(labels[i])].members.push_back(i);
    }
    std::erase_if(clusters, [](const Cluster& c) { return c.members.empty(); });

    for (Cluster& c : clusters) {
        std::size_t strongest = c.members.front();
        double power = 0.0;
        for (std::size_t i : c.members) {
            power += mpcs[i].power();
            if (mpcs[i].alpha > mpcs[strongest].alpha) strongest = i;
        }
        c.power = power;
        c.tau_s = mpcs[strongest].tau_s;
        c.aoa_rad = mpcs[strongest].aoa_rad;
        c.eoa_rad = mpcs[strongest].eoa_rad;
    }

    std::stable_sort(clusters.begin(), clusters.end(),
                     [](const Cluster& a, const Cluster& b) { return a.power > b.power; });
    return clusters;
}

std::vector<Cluster> cluster_mpcs(const std::vector<Mpc>& mpcs, const ClusteringConfig& cfg) {
    if (mpcs.empty()) return {};
    return form_clusters(mpcs, dbscan(mcd_matrix(mpcs, cfg.xi), cfg));
}

}  // namespace thz
