#include "thz/sage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "thz/fft.hpp"

namespace thz {

namespace {

using cd = std::complex<double>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Phasor recurrence refresh interval (see forward.cpp).
constexpr std::size_t kPhasorRefresh = 256;

// Rows participating in a path's delay refinement: within this many dB of
// the path's strongest direction amplitude, capped in count.
constexpr double kRefineWindowDb = 25.0;
constexpr std::size_t kMaxRefineRows = 32;

// Neighborhood radius of the angle centroid around a map peak (covers the
// adjacent 10 deg steering steps of the standard grid).
constexpr double kCentroidRadiusRad = deg_to_rad(15.001);

// Half-width of the angle refinement bracket.
constexpr double kAngleBracketRad = deg_to_rad(6.0);

// Absolute detection gate: a map peak must exceed the robust noise mean by
// ln(#independent cells) + margin, in natural-log units of the exponential
// tail. Keeps pure-noise inputs from seeding path after path.
constexpr double kNoiseGateMargin = 3.0;

/// Golden-section maximization of a unimodal objective on [lo, hi].
template <typename F>
double golden_max(double lo, double hi, double tol, std::size_t max_evals, F&& f) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    std::size_t evals = 2;
    while (b - a > tol && evals < max_evals) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        ++evals;
    }
    return f1 > f2 ? x1 : x2;
}

struct PathState {
    double tau_s = 0.0;
    double aoa_rad = 0.0;
    double eoa_rad = 0.0;
    double alpha = 0.0;  // de-embedded (pattern model divided out)
    std::vector<cd> amp; // per-direction complex amplitudes
};

class Workspace {
  public:
    Workspace(const Ctf& ctf, const AntennaPattern& pattern, const EstimatorConfig& cfg,
              bool build_map)
        : ctf_(ctf),
          pattern_(pattern),
          cfg_(cfg),
          n_dir_(ctf.n_dir()),
          n_freq_(ctf.n_freq()),
          n_bins_(ctf.n_freq() * cfg.delay_oversampling),
          resid_(ctf.h) {
        bin_s_ = 1.0 / (double(n_bins_) * ctf.grid.f_step_hz);
        base_bin_s_ = ctf.grid.delay_resolution_s();
        inv_sqrt_bins_ = 1.0 / std::sqrt(double(n_bins_));
        total_energy_ = ctf.total_energy();
        steer_vec_.resize(n_dir_);
        for (std::size_t r = 0; r < n_dir_; ++r) steer_vec_[r] = ctf.steering[r].unit_vector();
        if (build_map) build_delay_rows();
    }

    const Ctf& ctf() const { return ctf_; }
    std::size_t n_dir() const { return n_dir_; }
    std::size_t n_bins() const { return n_bins_; }
    double bin_spacing() const { return bin_s_; }
    double base_bin() const { return base_bin_s_; }
    double total_energy() const { return total_energy_; }
    const std::vector<cd>& residual() const { return resid_; }

    void drop_delay_rows() {
        delay_rows_.clear();
        delay_rows_.shrink_to_fit();
    }

    /// (1/K) sum_k resid[r][k] exp(+i 2 pi f_k tau)
    cd correlate_row(std::size_t r, double tau_s) const {
        const double w_start = kTwoPi * ctf_.grid.f_start_hz * tau_s;
        const double w_step = kTwoPi * ctf_.grid.f_step_hz * tau_s;
        const cd step = {std::cos(w_step), std::sin(w_step)};
        const cd* row = resid_.data() + r * n_freq_;
        cd acc = {0.0, 0.0};
        cd ph = {1.0, 0.0};
        for (std::size_t k = 0; k < n_freq_; ++k) {
            if (k % kPhasorRefresh == 0) {
                const double w = w_step * double(k);
                ph = {std::cos(w), std::sin(w)};
            }
            acc += row[k] * ph;
            ph *= step;
        }
        const cd rot = {std::cos(w_start), std::sin(w_start)};
        return acc * rot / double(n_freq_);
    }

    double corr_energy(const std::vector<std::size_t>& rows, double tau_s) const {
        double e = 0.0;
        for (std::size_t r : rows) e += std::norm(correlate_row(r, tau_s));
        return e;
    }

    std::vector<cd> solve_amplitudes(double tau_s) const {
        std::vector<cd> amp(n_dir_);
        for (std::size_t r = 0; r < n_dir_; ++r) amp[r] = correlate_row(r, tau_s);
        return amp;
    }

    /// Removes (sign=+1) or restores (sign=-1) a path reconstruction in the
    /// residual, and mirrors the change into the delay-domain rows when
    /// they are being tracked.
    void apply_path(const PathState& p, double sign) {
        const double w_start = -kTwoPi * ctf_.grid.f_start_hz * p.tau_s;
        const double w_step = -kTwoPi * ctf_.grid.f_step_hz * p.tau_s;
        const cd step = {std::cos(w_step), std::sin(w_step)};
        for (std::size_t r = 0; r < n_dir_; ++r) {
            const cd a0 = sign * p.amp[r] * cd{std::cos(w_start), std::sin(w_start)};
            cd* row = resid_.data() + r * n_freq_;
            cd ph = {1.0, 0.0};
            for (std::size_t k = 0; k < n_freq_; ++k) {
                if (k % kPhasorRefresh == 0) {
                    const double w = w_step * double(k);
                    ph = {std::cos(w), std::sin(w)};
                }
                row[k] -= a0 * ph;
                ph *= step;
            }
        }
        if (!delay_rows_.empty()) update_delay_rows(p, sign);
    }

    /// Strongest |X|^2 cell; ties resolve to the lowest delay bin, then the
    /// lowest steering index.
    void peak(std::size_t& r_out, std::size_t& m_out, double& p_out) const {
        double best = -1.0;
        std::size_t br = 0, bm = 0;
        for (std::size_t r = 0; r < n_dir_; ++r) {
            const cd* row = delay_rows_.data() + r * n_bins_;
            for (std::size_t m = 0; m < n_bins_; ++m) {
                const double p = std::norm(row[m]);
                if (p > best || (p == best && (m < bm || (m == bm && r < br)))) {
                    best = p;
                    br = r;
                    bm = m;
                }
            }
        }
        r_out = br;
        m_out = bm;
        p_out = best;
    }

    /// Robust mean of the map's noise floor (median of |X|^2 / ln 2).
    double noise_level() const {
        const std::size_t total = delay_rows_.size();
        const std::size_t stride = std::max<std::size_t>(1, total >> 21);
        std::vector<double> sample;
        sample.reserve(total / stride + 1);
        for (std::size_t i = 0; i < total; i += stride) sample.push_back(std::norm(delay_rows_[i]));
        auto mid = sample.begin() + sample.size() / 2;
        std::nth_element(sample.begin(), mid, sample.end());
        return *mid / std::numbers::ln2;
    }

    std::vector<std::size_t> rows_near(std::size_t r_star, double radius_rad) const {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < n_dir_; ++r)
            if (angle_between(steer_vec_[r], steer_vec_[r_star]) <= radius_rad) rows.push_back(r);
        return rows;
    }

    std::vector<std::size_t> refine_rows(const std::vector<cd>& amp) const {
        std::vector<std::size_t> idx(n_dir_);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::norm(amp[a]) > std::norm(amp[b]);
        });
        const double cut = std::abs(amp[idx[0]]) * std::pow(10.0, -kRefineWindowDb / 20.0);
        std::vector<std::size_t> rows;
        for (std::size_t r : idx) {
            if (rows.size() >= kMaxRefineRows) break;
            if (std::abs(amp[r]) < cut && !rows.empty()) break;
            rows.push_back(r);
        }
        return rows;
    }

    /// Amplitude-weighted centroid of the peak's angular neighborhood.
    void peak_centroid(std::size_t r_star, std::size_t m_bin, double& aoa_out,
                       double& eoa_out) const {
        const auto rows = rows_near(r_star, kCentroidRadiusRad);
        double wx = 0.0, wy = 0.0, wel = 0.0, wsum = 0.0;
        for (std::size_t r : rows) {
            const double w = std::abs(delay_rows_[r * n_bins_ + m_bin]);
            const double az = ctf_.steering[r].azimuth_rad();
            wx += w * std::cos(az);
            wy += w * std::sin(az);
            wel += w * ctf_.steering[r].elevation_rad();
            wsum += w;
        }
        if (wsum <= 0.0) {
            aoa_out = ctf_.steering[r_star].azimuth_rad();
            eoa_out = ctf_.steering[r_star].elevation_rad();
            return;
        }
        aoa_out = normalize_azimuth_rad(std::atan2(wy, wx));
        eoa_out = std::clamp(wel / wsum, -std::numbers::pi / 2, std::numbers::pi / 2);
    }

    /// Pattern-match quality of an amplitude-magnitude profile at (aoa, eoa):
    /// sum |a_r| p_r / sqrt(sum p_r^2).
    double pattern_correlation(const std::vector<double>& mag, double aoa, double eoa) const {
        const auto omega = direction_vector(aoa, eoa);
        double num = 0.0, den = 0.0;
        for (std::size_t r = 0; r < n_dir_; ++r) {
            const double p = antenna_gain(pattern_, angle_between(steer_vec_[r], omega));
            num += mag[r] * p;
            den += p * p;
        }
        return num / std::sqrt(den);
    }

    /// Least-squares scale of the pattern model against the profile; this is
    /// the de-embedded path gain because the model carries the full pattern.
    double fit_alpha(const std::vector<cd>& amp, double aoa, double eoa) const {
        const auto omega = direction_vector(aoa, eoa);
        double num = 0.0, den = 0.0;
        for (std::size_t r = 0; r < n_dir_; ++r) {
            const double p = antenna_gain(pattern_, angle_between(steer_vec_[r], omega));
            num += std::abs(amp[r]) * p;
            den += p * p;
        }
        return den > 0.0 ? num / den : 0.0;
    }

    void refine_angles(const std::vector<cd>& amp, double& aoa, double& eoa) const {
        std::vector<double> mag(n_dir_);
        for (std::size_t r = 0; r < n_dir_; ++r) mag[r] = std::abs(amp[r]);
        const double tol = deg_to_rad(1e-4);
        const std::size_t evals = std::max<std::size_t>(8, cfg_.angle_refine_steps);
        double best_c = pattern_correlation(mag, aoa, eoa);
        for (int round = 0; round < 2; ++round) {
            {
                const double center = aoa;
                const double cand = golden_max(
                    -kAngleBracketRad, kAngleBracketRad, tol, evals,
                    [&](double d) { return pattern_correlation(mag, center + d, eoa); });
                const double c = pattern_correlation(mag, center + cand, eoa);
                if (c > best_c) {
                    aoa = normalize_azimuth_rad(center + cand);
                    best_c = c;
                }
            }
            {
                const double lo = std::max(-std::numbers::pi / 2, eoa - kAngleBracketRad);
                const double hi = std::min(std::numbers::pi / 2, eoa + kAngleBracketRad);
                const double cand = golden_max(lo, hi, tol, evals, [&](double e) {
                    return pattern_correlation(mag, aoa, e);
                });
                const double c = pattern_correlation(mag, aoa, cand);
                if (c > best_c) {
                    eoa = cand;
                    best_c = c;
                }
            }
        }
    }

    double refine_tau(const std::vector<std::size_t>& rows, double tau, double half_width) const {
        const double lo = std::max(0.0, tau - half_width);
        const double hi = std::min(ctf_.grid.max_delay_s(), tau + half_width);
        const double tol = base_bin_s_ * 1e-6;
        return golden_max(lo, hi, tol, 40,
                          [&](double t) { return corr_energy(rows, t); });
    }

  private:
    void build_delay_rows() {
        BluesteinPlan plan(n_freq_, n_bins_);
        delay_rows_.assign(n_dir_ * n_bins_, cd{0.0, 0.0});
        for (std::size_t r = 0; r < n_dir_; ++r) {
            std::span<const cd> in(resid_.data() + r * n_freq_, n_freq_);
            std::span<cd> out(delay_rows_.data() + r * n_bins_, n_bins_);
            plan.run(in, out);
            for (auto& v : out) v *= inv_sqrt_bins_;
        }
    }

    /// Closed-form zero-padded transform of a delay phasor:
    /// D[m] = sum_k exp(i 2 pi k (m/M - f_step tau)),
    /// so X[r][m] -= sign amp[r] exp(-i 2 pi f_start tau) D[m] / sqrt(M).
    void update_delay_rows(const PathState& p, double sign) {
        const std::size_t k_len = n_freq_;
        const double ft = ctf_.grid.f_step_hz * p.tau_s;
        std::vector<cd> kernel(n_bins_);
        for (std::size_t m = 0; m < n_bins_; ++m) {
            const double u = double(m) / double(n_bins_) - ft;
            const double den = std::sin(std::numbers::pi * u);
            if (std::abs(den) < 1e-7) {
                cd acc = {0.0, 0.0};
                const double w = kTwoPi * u;
                for (std::size_t k = 0; k < k_len; ++k)
                    acc += cd{std::cos(w * double(k)), std::sin(w * double(k))};
                kernel[m] = acc;
            } else {
                const double ratio = std::sin(std::numbers::pi * double(k_len) * u) / den;
                const double ang = std::numbers::pi * double(k_len - 1) * u;
                kernel[m] = ratio * cd{std::cos(ang), std::sin(ang)};
            }
        }
        const double w_start = -kTwoPi * ctf_.grid.f_start_hz * p.tau_s;
        const cd rot = cd{std::cos(w_start), std::sin(w_start)} * (sign * inv_sqrt_bins_);
        for (std::size_t r = 0; r < n_dir_; ++r) {
            const cd c = p.amp[r] * rot;
            cd* row = delay_rows_.data() + r * n_bins_;
            for (std::size_t m = 0; m < n_bins_; ++m) row[m] -= c * kernel[m];
        }
    }

    const Ctf& ctf_;
    const AntennaPattern& pattern_;
    const EstimatorConfig& cfg_;
    std::size_t n_dir_, n_freq_, n_bins_;
    double bin_s_ = 0.0, base_bin_s_ = 0.0, inv_sqrt_bins_ = 0.0, total_energy_ = 0.0;
    std::vector<std::array<double, 3>> steer_vec_;
    std::vector<cd> resid_;
    std::vector<cd> delay_rows_;
};

std::vector<PathState> run_sic(Workspace& ws, const EstimatorConfig& cfg) {
    std::vector<PathState> paths;
    if (ws.total_energy() <= 0.0) return paths;

    const double gate =
        ws.noise_level() *
        (std::log(double(ws.n_dir() * ws.ctf().n_freq())) + kNoiseGateMargin);
    double alpha1 = 0.0;

    while (paths.size() < cfg.max_paths) {
        std::size_t r_star = 0, m_star = 0;
        double p_star = 0.0;
        ws.peak(r_star, m_star, p_star);
        if (p_star <= gate) break;

        PathState p;
        p.tau_s = double(m_star) * ws.bin_spacing();
        {
            const auto rows = ws.rows_near(r_star, kCentroidRadiusRad);
            p.tau_s = ws.refine_tau(rows, p.tau_s, 1.5 * ws.bin_spacing());
        }
        ws.peak_centroid(r_star, m_star, p.aoa_rad, p.eoa_rad);
        p.amp = ws.solve_amplitudes(p.tau_s);
        p.alpha = ws.fit_alpha(p.amp, p.aoa_rad, p.eoa_rad);
        if (p.alpha <= 0.0) break;

        if (!paths.empty() &&
            20.0 * std::log10(p.alpha) <= power_threshold(alpha1, cfg.threshold_offset_db))
            break;
        if (paths.empty()) alpha1 = p.alpha;

        ws.apply_path(p, +1.0);
        paths.push_back(std::move(p));
    }

    std::stable_sort(paths.begin(), paths.end(),
                     [](const PathState& a, const PathState& b) { return a.alpha > b.alpha; });
    return paths;
}

/// One full EM pass over all paths; returns the largest relative parameter
/// change. Delay changes are measured against the delay resolution, angles
/// in radians, gains relative to the refined gain.
double em_sweep(Workspace& ws, std::vector<PathState>& paths) {
    double max_change = 0.0;
    for (PathState& p : paths) {
        ws.apply_path(p, -1.0);  // add the path back into the residual

        const std::vector<std::size_t> rows = ws.refine_rows(p.amp);
        const double tau_old = p.tau_s;
        std::vector<cd> amp_old = ws.solve_amplitudes(tau_old);
        double gain_old = 0.0;
        for (const cd& a : amp_old) gain_old += std::norm(a);

        const double tau_cand = ws.refine_tau(rows, tau_old, 0.5 * ws.base_bin());
        std::vector<cd> amp_cand = ws.solve_amplitudes(tau_cand);
        double gain_cand = 0.0;
        for (const cd& a : amp_cand) gain_cand += std::norm(a);

        // Accept the delay move only if it strictly gains explained energy
        // over the full row set; keeps the EM objective monotone and exact
        // fixed points untouched.
        if (gain_cand > gain_old) {
            p.tau_s = tau_cand;
            p.amp = std::move(amp_cand);
        } else {
            p.amp = std::move(amp_old);
        }

        const double aoa_old = p.aoa_rad, eoa_old = p.eoa_rad, alpha_old = p.alpha;
        ws.refine_angles(p.amp, p.aoa_rad, p.eoa_rad);
        p.alpha = ws.fit_alpha(p.amp, p.aoa_rad, p.eoa_rad);

        ws.apply_path(p, +1.0);

        double daz = std::abs(p.aoa_rad - aoa_old);
        daz = std::min(daz, kTwoPi - daz);
        max_change = std::max(max_change, std::abs(p.tau_s - tau_old) / ws.base_bin());
        max_change = std::max(max_change, daz);
        max_change = std::max(max_change, std::abs(p.eoa_rad - eoa_old));
        if (p.alpha > 0.0)
            max_change = std::max(max_change, std::abs(p.alpha - alpha_old) / p.alpha);
    }
    return max_change;
}

void run_refine(Workspace& ws, std::vector<PathState>& paths, const EstimatorConfig& cfg) {
    for (std::size_t it = 0; it < cfg.max_em_iterations; ++it) {
        const double change = em_sweep(ws, paths);
        if (change < cfg.convergence_eps) break;
    }
}

std::vector<MpcEstimate> to_estimates(const std::vector<PathState>& paths, const Workspace& ws) {
    std::vector<MpcEstimate> out;
    out.reserve(paths.size());
    const double total = ws.total_energy();
    for (const PathState& p : paths) {
        MpcEstimate est;
        est.mpc = Mpc::make(p.alpha, std::max(0.0, p.tau_s), p.aoa_rad, p.eoa_rad);
        std::vector<double> phases(p.amp.size());
        for (std::size_t r = 0; r < p.amp.size(); ++r) phases[r] = std::arg(p.amp[r]);
        est.mpc.phases_rad = std::move(phases);
        est.direction_amplitudes = p.amp;
        double recon = 0.0;
        for (const cd& a : p.amp) recon += std::norm(a);
        recon *= double(ws.ctf().n_freq());
        est.explained_fraction = total > 0.0 ? std::clamp(recon / total, 0.0, 1.0) : 0.0;
        out.push_back(std::move(est));
    }
    return out;
}

std::vector<PathState> from_estimates(Workspace& ws, const std::vector<MpcEstimate>& estimates) {
    std::vector<PathState> paths;
    paths.reserve(estimates.size());
    for (const MpcEstimate& est : estimates) {
        PathState p;
        p.tau_s = est.mpc.tau_s;
        p.aoa_rad = est.mpc.aoa_rad;
        p.eoa_rad = est.mpc.eoa_rad;
        p.alpha = est.mpc.alpha;
        if (est.direction_amplitudes.size() == ws.n_dir())
            p.amp = est.direction_amplitudes;
        else
            p.amp = ws.solve_amplitudes(p.tau_s);
        ws.apply_path(p, +1.0);
        paths.push_back(std::move(p));
    }
    return paths;
}

std::vector<MpcEstimate> prune_and_sort(std::vector<PathState> paths, const Workspace& ws,
                                        const EstimatorConfig& cfg) {
    std::erase_if(paths, [](const PathState& p) { return !(p.alpha > 0.0); });
    if (!paths.empty()) {
        double alpha_max = 0.0;
        for (const PathState& p : paths) alpha_max = std::max(alpha_max, p.alpha);
        const double thr = power_threshold(alpha_max, cfg.threshold_offset_db);
        std::erase_if(paths,
                      [&](const PathState& p) { return 20.0 * std::log10(p.alpha) <= thr; });
    }
    std::stable_sort(paths.begin(), paths.end(),
                     [](const PathState& a, const PathState& b) { return a.alpha > b.alpha; });
    return to_estimates(paths, ws);
}

}  // namespace

void EstimatorConfig::validate() const {
    if (max_paths == 0) throw InputError("estimator: max_paths must be positive");
    if (!(threshold_offset_db < 0.0))
        throw InputError("estimator: threshold offset must be negative");
    if (delay_oversampling < 1) throw InputError("estimator: delay_oversampling must be >= 1");
    if (angle_refine_steps == 0) throw InputError("estimator: angle_refine_steps must be positive");
    if (!(convergence_eps > 0.0)) throw InputError("estimator: convergence_eps must be positive");
    if (max_em_iterations == 0) throw InputError("estimator: max_em_iterations must be positive");
}

double power_threshold(double alpha1, double offset_db) {
    if (!(alpha1 > 0.0)) throw InputError("power_threshold: path gain must be positive");
    return 20.0 * std::log10(alpha1) + offset_db;
}

DelayAngleMap delay_angle_map(const Ctf& ctf, std::size_t oversampling) {
    if (oversampling < 1) throw InputError("delay_angle_map: oversampling must be >= 1");
    const std::size_t n_freq = ctf.n_freq();
    const std::size_t n_bins = n_freq * oversampling;
    DelayAngleMap map;
    map.n_dir = ctf.n_dir();
    map.n_bins = n_bins;
    map.bin_spacing_s = 1.0 / (double(n_bins) * ctf.grid.f_step_hz);
    map.power.assign(map.n_dir * n_bins, 0.0);

    BluesteinPlan plan(n_freq, n_bins);
    std::vector<cd> out(n_bins);
    const double inv_bins = 1.0 / double(n_bins);
    for (std::size_t r = 0; r < map.n_dir; ++r) {
        plan.run(ctf.row(r), out);
        double* dst = map.power.data() + r * n_bins;
        for (std::size_t m = 0; m < n_bins; ++m) dst[m] = std::norm(out[m]) * inv_bins;
    }
    return map;
}

std::vector<MpcEstimate> sic_initialize(const Ctf& ctf, const AntennaPattern& pattern,
                                        const EstimatorConfig& cfg) {
    cfg.validate();
    Workspace ws(ctf, pattern, cfg, /*build_map=*/true);
    std::vector<PathState> paths = run_sic(ws, cfg);
    return to_estimates(paths, ws);
}

std::vector<MpcEstimate> sage_refine(const Ctf& ctf, std::vector<MpcEstimate> estimates,
                                     const AntennaPattern& pattern, const EstimatorConfig& cfg) {
    cfg.validate();
    if (estimates.empty()) return estimates;
    Workspace ws(ctf, pattern, cfg, /*build_map=*/false);
    std::vector<PathState> paths = from_estimates(ws, estimates);
    run_refine(ws, paths, cfg);
    std::erase_if(paths, [](const PathState& p) { return !(p.alpha > 0.0); });
    return to_estimates(paths, ws);
}

std::vector<MpcEstimate> estimate_mpcs(const Ctf& ctf, const AntennaPattern& pattern,
                                       const EstimatorConfig& cfg) {
    cfg.validate();
    Workspace ws(ctf, pattern, cfg, /*build_map=*/true);
    std::vector<PathState> paths = run_sic(ws, cfg);
    ws.drop_delay_rows();
    if (!paths.empty()) run_refine(ws, paths, cfg);
    return prune_and_sort(std::move(paths), ws, cfg);
}

}  // namespace thz
