#include "thz/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace thz {

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

/// Circular (resultant-vector) spread of angles under weights p:
/// sigma = sqrt(-2 ln |sum p e^{i theta}| / sum p).
double circular_spread(const std::vector<Mpc>& mpcs, const std::vector<std::size_t>& subset,
                       bool elevation) {
    if (subset.size() == 1) return 0.0;
    double cx = 0.0, cy = 0.0, psum = 0.0;
    for (std::size_t i : subset) {
        const double th = elevation ? mpcs[i].eoa_rad : mpcs[i].aoa_rad;
        const double p = mpcs[i].power();
        cx += p * std::cos(th);
        cy += p * std::sin(th);
        psum += p;
    }
    double r = std::sqrt(cx * cx + cy * cy) / psum;
    // A vanishing resultant means full dispersion; floor it so the spread
    // stays finite.
    r = std::clamp(r, 1e-12, 1.0);
    return std::sqrt(std::max(0.0, -2.0 * std::log(r)));
}

/// Power-weighted RMS spread around the circular mean, deviations wrapped
/// to [-pi, pi].
double rms_angle_spread(const std::vector<Mpc>& mpcs, const std::vector<std::size_t>& subset,
                        bool elevation) {
    if (subset.size() == 1) return 0.0;
    double cx = 0.0, cy = 0.0, psum = 0.0;
    for (std::size_t i : subset) {
        const double th = elevation ? mpcs[i].eoa_rad : mpcs[i].aoa_rad;
        const double p = mpcs[i].power();
        cx += p * std::cos(th);
        cy += p * std::sin(th);
        psum += p;
    }
    const double mean = std::atan2(cy, cx);
    double acc = 0.0;
    for (std::size_t i : subset) {
        const double th = elevation ? mpcs[i].eoa_rad : mpcs[i].aoa_rad;
        double d = std::remainder(th - mean, 2.0 * std::numbers::pi);
        acc += mpcs[i].power() * d * d;
    }
    return std::sqrt(acc / psum);
}

double spread_of(const std::vector<Mpc>& mpcs, const std::vector<std::size_t>& subset,
                 bool elevation, SpreadMethod method) {
    return method == SpreadMethod::Circular ? circular_spread(mpcs, subset, elevation)
                                            : rms_angle_spread(mpcs, subset, elevation);
}

}  // namespace

double fspl_db(double distance_m, double frequency_hz) {
    if (!(distance_m > 0.0) || !(frequency_hz > 0.0))
        throw InputError("fspl: distance and frequency must be positive");
    return -20.0 *
           std::log10(kSpeedOfLight / (4.0 * std::numbers::pi * frequency_hz * distance_m));
}

double pl_best_db(const Ctf& ctf) {
    double best = 0.0;
    for (std::size_t r = 0; r < ctf.n_dir(); ++r)
        best = std::max(best, ctf.row_energy(r) / double(ctf.n_freq()));
    if (!(best > 0.0)) throw NumericalError("pl_best: all-zero CTF has no received power");
    return -10.0 * std::log10(best);
}

double pl_omni_db(const std::vector<Mpc>& mpcs) {
    if (mpcs.empty()) throw InputError("pl_omni: empty path list");
    double p = 0.0;
    for (const Mpc& m : mpcs) p += m.power();
    return -10.0 * std::log10(p);
}

CiFit fit_ci(const std::vector<PlPoint>& points, double frequency_hz, double d0_m) {
    if (points.size() < 2) throw InputError("fit_ci: need at least 2 points");
    for (const PlPoint& p : points)
        if (!(p.distance_m >= d0_m))
            throw InputError("fit_ci: all distances must be at least the reference distance");

    bool distinct = false;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].distance_m != points[0].distance_m) distinct = true;
    if (!distinct) throw NumericalError("fit_ci: all distances equal, fit is singular");

    CiFit fit;
    fit.fspl_d0_db = fspl_db(d0_m, frequency_hz);

    // Single-parameter least squares through the fixed anchor:
    // n = sum(x y) / sum(x^2), x = 10 log10(d/d0), y = pl - FSPL(d0).
    double sxx = 0.0, sxy = 0.0;
    for (const PlPoint& p : points) {
        const double x = 10.0 * std::log10(p.distance_m / d0_m);
        const double y = p.pl_db - fit.fspl_d0_db;
        sxx += x * x;
        sxy += x * y;
    }
    fit.n = sxy / sxx;

    fit.residuals_db.reserve(points.size());
    double rsum = 0.0, rsq = 0.0;
    for (const PlPoint& p : points) {
        const double x = 10.0 * std::log10(p.distance_m / d0_m);
        const double r = p.pl_db - fit.fspl_d0_db - fit.n * x;
        fit.residuals_db.push_back(r);
        rsum += r;
        rsq += r * r;
    }
    const double mean = rsum / double(points.size());
    fit.sigma_sf_db = std::sqrt(std::max(0.0, rsq / double(points.size()) - mean * mean));
    return fit;
}

std::optional<double> k_factor_db(const std::vector<Cluster>& clusters) {
    if (clusters.empty()) throw InputError("k_factor: empty cluster list");
    if (clusters.size() == 1) return std::nullopt;
    double strongest = 0.0, total = 0.0;
    for (const Cluster& c : clusters) {
        strongest = std::max(strongest, c.power);
        total += c.power;
    }
    return 10.0 * std::log10(strongest / (total - strongest));
}

double rms_delay_spread_s(const std::vector<Mpc>& mpcs) {
    return rms_delay_spread_s(mpcs, all_indices(mpcs.size()));
}

double rms_delay_spread_s(const std::vector<Mpc>& mpcs,
                          const std::vector<std::size_t>& subset) {
    if (subset.empty()) throw InputError("rms_delay_spread: empty path set");
    if (subset.size() == 1) return 0.0;
    double psum = 0.0, tmean = 0.0;
    for (std::size_t i : subset) {
        psum += mpcs[i].power();
        tmean += mpcs[i].power() * mpcs[i].tau_s;
    }
    tmean /= psum;
    double acc = 0.0;
    for (std::size_t i : subset) {
        const double d = mpcs[i].tau_s - tmean;
        acc += mpcs[i].power() * d * d;
    }
    return std::sqrt(acc / psum);
}

AngularSpreads angular_spreads(const std::vector<Mpc>& mpcs, SpreadMethod method) {
    return angular_spreads(mpcs, all_indices(mpcs.size()), method);
}

AngularSpreads angular_spreads(const std::vector<Mpc>& mpcs,
                               const std::vector<std::size_t>& subset, SpreadMethod method) {
    if (subset.empty()) throw InputError("angular_spreads: empty path set");
    AngularSpreads s;
    s.asa_rad = spread_of(mpcs, subset, /*elevation=*/false, method);
    s.esa_rad = spread_of(mpcs, subset, /*elevation=*/true, method);
    return s;
}

ClusterSpreadStats cluster_stats(const std::vector<Cluster>& clusters,
                                 const std::vector<Mpc>& mpcs, SpreadMethod method) {
    ClusterSpreadStats stats;
    stats.n_clusters = clusters.size();
    double cds = 0.0, casa = 0.0, cesa = 0.0;
    std::size_t multi = 0;
    for (const Cluster& c : clusters) {
        if (c.members.size() < 2) {
            stats.cds_s.push_back(0.0);
            stats.casa_rad.push_back(0.0);
            stats.cesa_rad.push_back(0.0);
            continue;
        }
        const double ds = rms_delay_spread_s(mpcs, c.members);
        const AngularSpreads as = angular_spreads(mpcs, c.members, method);
        stats.cds_s.push_back(ds);
        stats.casa_rad.push_back(as.asa_rad);
        stats.cesa_rad.push_back(as.esa_rad);
        cds += ds;
        casa += as.asa_rad;
        cesa += as.esa_rad;
        ++multi;
    }
    if (multi > 0) {
        stats.mean_cds_s = cds / double(multi);
        stats.mean_casa_rad = casa / double(multi);
        stats.mean_cesa_rad = cesa / double(multi);
    }
    return stats;
}

}  // namespace thz
