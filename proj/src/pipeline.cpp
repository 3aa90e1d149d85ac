#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "thz/calibration.hpp"
#include "thz/pipeline.hpp"

#include "json_util.hpp"

namespace thz {

namespace {

enum class MpcSource { Estimate, Persisted };

struct PipelineContext {
    const CampaignManifest& manifest;
    std::filesystem::path out_dir;
    MpcSource source = MpcSource::Estimate;
    std::filesystem::path mpc_read_dir;  // Persisted mode: where .mpc files live
    double ci_frequency_hz = 0.0;
};

PositionResult process_position(const PipelineContext& ctx, const PositionEntry& entry,
                                const SystemResponse* sys) {
    const CampaignManifest& m = ctx.manifest;
    PositionResult result;
    result.stats.id = entry.id;
    result.stats.distance_m = entry.distance_m;

    Ctf ctf = (entry.raw_path && sys) ? calibrate(read_ctf(m.resolve(*entry.raw_path)), *sys)
                                      : read_ctf(m.resolve(entry.ctf_path));
    if (!(ctf.grid == m.grid) || !(ctf.steering == m.steering))
        throw InputError("position " + entry.id + ": CTF dimensions do not match the manifest");

    std::vector<MpcRecord> records;
    if (ctx.source == MpcSource::Estimate) {
        const auto estimates = estimate_mpcs(ctf, m.rx_pattern, m.estimator);
        records.reserve(estimates.size());
        for (const MpcEstimate& e : estimates) records.push_back(MpcRecord::from_mpc(e.mpc));
        // The persisted file is the stage boundary: everything downstream
        // works from the decoded rows so a later re-run from the same file
        // reproduces the statistics exactly.
        write_mpc_records(ctx.out_dir / "mpc" / (entry.id + ".mpc"), records);
        records = read_mpc_records(ctx.out_dir / "mpc" / (entry.id + ".mpc"));
    } else {
        records = read_mpc_records(ctx.mpc_read_dir / (entry.id + ".mpc"));
    }
    if (records.empty())
        throw NumericalError("position " + entry.id + ": no paths above the detection threshold");

    std::vector<Mpc> mpcs;
    mpcs.reserve(records.size());
    for (const MpcRecord& r : records) mpcs.push_back(r.to_mpc());

    const std::vector<int> labels = dbscan(mcd_matrix(mpcs, m.clustering.xi), m.clustering);
    write_cluster_labels(ctx.out_dir / "clusters" / (entry.id + ".labels"), labels);
    const std::vector<Cluster> clusters = form_clusters(mpcs, labels);

    PositionStats& st = result.stats;
    st.pl_best_db = pl_best_db(ctf);
    st.pl_best_comp_db = st.pl_best_db + m.rx_pattern.boresight_gain_dbi;
    st.pl_omni_db = pl_omni_db(mpcs);
    st.k_factor_db = k_factor_db(clusters);
    st.ds_s = rms_delay_spread_s(mpcs);
    const AngularSpreads as = angular_spreads(mpcs, m.characterization.spread_method);
    st.asa_rad = as.asa_rad;
    st.esa_rad = as.esa_rad;
    st.n_paths = mpcs.size();
    st.clusters = cluster_stats(clusters, mpcs, m.characterization.spread_method);

    // plot-ready data: total power-delay profile and azimuth power spectrum
    const DelayAngleMap map = delay_angle_map(ctf, m.estimator.delay_oversampling);
    result.pdp_delay_s.resize(map.n_bins);
    result.pdp_power.assign(map.n_bins, 0.0);
    for (std::size_t b = 0; b < map.n_bins; ++b)
        result.pdp_delay_s[b] = double(b) * map.bin_spacing_s;
    for (std::size_t r = 0; r < map.n_dir; ++r)
        for (std::size_t b = 0; b < map.n_bins; ++b) result.pdp_power[b] += map.at(r, b);

    for (std::size_t r = 0; r < ctf.n_dir(); ++r) {
        const double az = ctf.steering[r].azimuth_deg;
        const double e = ctf.row_energy(r) / double(ctf.n_freq());
        auto it = std::find_if(result.aps_azimuth_deg.begin(), result.aps_azimuth_deg.end(),
                               [&](double a) { return std::abs(a - az) < 1e-9; });
        if (it == result.aps_azimuth_deg.end()) {
            result.aps_azimuth_deg.push_back(az);
            result.aps_power.push_back(e);
        } else {
            result.aps_power[std::size_t(it - result.aps_azimuth_deg.begin())] += e;
        }
    }

    result.ok = true;
    return result;
}

CiFitResult fit_or_reason(const std::vector<PlPoint>& points, double f_hz, double d0_m) {
    CiFitResult out;
    try {
        out.fit = fit_ci(points, f_hz, d0_m);
    } catch (const std::exception& e) {
        out.reason = e.what();
    }
    return out;
}

template <typename Get>
std::optional<double> mean_over(const std::vector<PositionResult>& results, Get&& get) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const PositionResult& r : results) {
        if (!r.ok) continue;
        const std::optional<double> v = get(r);
        if (!v) continue;
        sum += *v;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / double(n);
}

CampaignReport run_impl(const CampaignManifest& manifest, const std::filesystem::path& out_dir,
                        unsigned jobs, MpcSource source,
                        const std::filesystem::path& mpc_read_dir) {
    if (manifest.positions.empty()) throw InputError("campaign has no positions");
    std::filesystem::create_directories(out_dir);

    PipelineContext ctx{manifest, out_dir, source, mpc_read_dir, 0.0};
    ctx.ci_frequency_hz = manifest.characterization.ci_frequency_hz > 0.0
                              ? manifest.characterization.ci_frequency_hz
                              : manifest.grid.center_frequency_hz();

    SystemResponse sys;
    const bool have_sys = manifest.system_response_path.has_value();
    if (have_sys) sys = read_system_response(manifest.resolve(*manifest.system_response_path));

    const std::size_t n = manifest.positions.size();
    std::vector<PositionResult> results(n);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) break;
            const PositionEntry& entry = manifest.positions[i];
            try {
                results[i] = process_position(ctx, entry, have_sys ? &sys : nullptr);
            } catch (const std::exception& e) {
                results[i] = PositionResult{};
                results[i].ok = false;
                results[i].error = e.what();
                results[i].stats.id = entry.id;
                results[i].stats.distance_m = entry.distance_m;
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
        worker();
        for (std::thread& t : pool) t.join();
    }

    CampaignReport report;
    report.seed = manifest.seed;
    report.rx_boresight_gain_db = manifest.rx_pattern.boresight_gain_dbi;
    report.ci_frequency_hz = ctx.ci_frequency_hz;
    report.positions = std::move(results);

    std::vector<PlPoint> omni_points, best_points;
    std::vector<double> k_values;
    for (const PositionResult& r : report.positions) {
        if (!r.ok) continue;
        omni_points.push_back({r.stats.distance_m, r.stats.pl_omni_db});
        best_points.push_back({r.stats.distance_m, r.stats.pl_best_comp_db});
        if (r.stats.k_factor_db) k_values.push_back(*r.stats.k_factor_db);
    }
    report.ci_omni = fit_or_reason(omni_points, ctx.ci_frequency_hz,
                                   manifest.characterization.ci_d0_m);
    report.ci_best = fit_or_reason(best_points, ctx.ci_frequency_hz,
                                   manifest.characterization.ci_d0_m);

    if (!k_values.empty()) {
        double mean = 0.0;
        for (double k : k_values) mean += k;
        mean /= double(k_values.size());
        double var = 0.0;
        for (double k : k_values) var += (k - mean) * (k - mean);
        var /= double(k_values.size());
        report.k_factor_fit = LogNormalFit{mean, std::sqrt(var), k_values.size()};
    }

    report.means.ds_s = mean_over(report.positions,
                                  [](const PositionResult& r) { return std::optional(r.stats.ds_s); });
    report.means.asa_rad = mean_over(
        report.positions, [](const PositionResult& r) { return std::optional(r.stats.asa_rad); });
    report.means.esa_rad = mean_over(
        report.positions, [](const PositionResult& r) { return std::optional(r.stats.esa_rad); });
    report.means.n_clusters =
        mean_over(report.positions, [](const PositionResult& r) {
            return std::optional(double(r.stats.clusters.n_clusters));
        });
    report.means.cds_s = mean_over(report.positions, [](const PositionResult& r) {
        return r.stats.clusters.mean_cds_s;
    });
    report.means.casa_rad = mean_over(report.positions, [](const PositionResult& r) {
        return r.stats.clusters.mean_casa_rad;
    });
    report.means.cesa_rad = mean_over(report.positions, [](const PositionResult& r) {
        return r.stats.clusters.mean_cesa_rad;
    });

    nlohmann::json cfg;
    cfg["frequency_grid"] = detail::grid_to_json(manifest.grid);
    cfg["n_steering_directions"] = manifest.steering.size();
    cfg["rx_pattern"] = detail::pattern_to_json(manifest.rx_pattern);
    cfg["tx_pattern"] = detail::pattern_to_json(manifest.tx_pattern);
    cfg["estimator"] = detail::estimator_to_json(manifest.estimator);
    cfg["clustering"] = detail::clustering_to_json(manifest.clustering);
    cfg["characterization"] = detail::characterization_to_json(manifest.characterization);
    cfg["noise_snr_db"] = manifest.snr_db ? nlohmann::json(*manifest.snr_db) : nlohmann::json(nullptr);
    cfg["seed"] = manifest.seed;
    cfg["ci_frequency_hz"] = ctx.ci_frequency_hz;
    cfg["pl_best_compensation_db"] = manifest.rx_pattern.boresight_gain_dbi;
    report.config_echo_json = cfg.dump();

    return report;
}

}  // namespace

CampaignReport run_pipeline(const CampaignManifest& manifest,
                            const std::filesystem::path& out_dir, unsigned jobs) {
    return run_impl(manifest, out_dir, jobs, MpcSource::Estimate, {});
}

CampaignReport characterize_from_files(const CampaignManifest& manifest,
                                       const std::filesystem::path& mpc_dir,
                                       const std::filesystem::path& out_dir, unsigned jobs) {
    return run_impl(manifest, out_dir, jobs, MpcSource::Persisted, mpc_dir);
}

}  // namespace thz
