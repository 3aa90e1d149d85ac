#include <cmath>
#include <cstdio>

#include "thz/pipeline.hpp"
#include "thz/rng.hpp"

namespace thz {

namespace {

constexpr double kTxHeightM = 2.2;
constexpr double kRxHeightM = 1.5;

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return Rng::derive(master, stream).next_u64();
}

}  // namespace

std::vector<RxPosition> make_atrium_scene(const ScenarioConfig& cfg) {
    const double f_center = cfg.grid.center_frequency_hz();
    const double dh = kTxHeightM - kRxHeightM;
    const double max_tau = cfg.grid.max_delay_s();

    std::vector<RxPosition> scene;
    scene.reserve(21);
    std::size_t index = 0;
    // Three columns of seven positions, 2 m spacing along each column.
    for (double y : {-2.0, 0.0, 2.0}) {
        for (int row = 0; row < 7; ++row) {
            const double x = 6.0 + 2.0 * row;
            Rng rng = Rng::derive(cfg.seed, index);

            const double d2d = std::hypot(x, y);
            const double d3d = std::sqrt(d2d * d2d + dh * dh);
            const double tau_los = d3d / kSpeedOfLight;
            const double alpha_los = kSpeedOfLight / (4.0 * std::numbers::pi * f_center * d3d);

            RxPosition pos;
            char id[16];
            std::snprintf(id, sizeof id, "rx%02zu", index + 1);
            pos.id = id;
            pos.tx_rx_distance_m = d3d;

            // Direct path: arrival direction points back at the transmitter,
            // slightly above the horizon (the transmitter sits higher).
            Mpc los = Mpc::make(alpha_los, tau_los, std::atan2(-y, -x), std::atan2(dh, d2d),
                                rng.uniform(0.0, 2.0 * std::numbers::pi), max_tau);
            pos.ground_truth.push_back(std::move(los));

            if (!cfg.los_only) {
                const std::size_t span = cfg.n_reflectors_max - cfg.n_reflectors_min + 1;
                const std::size_t n_refl = cfg.n_reflectors_min + rng.uniform_index(span);
                for (std::size_t i = 0; i < n_refl; ++i) {
                    double extra =
                        rng.uniform(cfg.refl_extra_path_m_min, cfg.refl_extra_path_m_max);
                    const double atten_db =
                        rng.uniform(cfg.refl_atten_db_min, cfg.refl_atten_db_max);
                    const double aoa = rng.uniform(0.0, 2.0 * std::numbers::pi);
                    const double eoa = deg_to_rad(
                        rng.uniform(-cfg.refl_eoa_max_deg, cfg.refl_eoa_max_deg));
                    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
                    // keep every reflector within the representable delay range
                    const double max_extra = (0.95 * max_tau - tau_los) * kSpeedOfLight;
                    extra = std::min(extra, max_extra);
                    const double tau = tau_los + extra / kSpeedOfLight;
                    const double alpha = alpha_los * std::pow(10.0, -atten_db / 20.0);
                    pos.ground_truth.push_back(Mpc::make(alpha, tau, aoa, eoa, phase, max_tau));
                }
            }

            if (cfg.random_phase_per_direction) {
                const std::size_t n_dir = standard_steering_grid().size();
                for (Mpc& m : pos.ground_truth) {
                    std::vector<double> phases(n_dir);
                    for (double& p : phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
                    m.phases_rad = std::move(phases);
                }
            }
            scene.push_back(std::move(pos));
            ++index;
        }
    }
    return scene;
}

CampaignManifest scenario_synthetic_atrium(const ScenarioConfig& cfg,
                                           const std::filesystem::path& out_dir) {
    const std::vector<RxPosition> scene = make_atrium_scene(cfg);
    std::filesystem::create_directories(out_dir);

    CampaignManifest manifest;
    manifest.grid = cfg.grid;
    manifest.steering = standard_steering_grid();
    manifest.rx_pattern = default_rx_pattern();
    manifest.tx_pattern = default_tx_pattern();
    manifest.seed = cfg.seed;
    if (std::isfinite(cfg.snr_db)) manifest.snr_db = cfg.snr_db;
    manifest.base_dir = out_dir;

    for (std::size_t i = 0; i < scene.size(); ++i) {
        const RxPosition& pos = scene[i];
        std::optional<NoiseSpec> noise;
        if (std::isfinite(cfg.snr_db))
            noise = NoiseSpec{cfg.snr_db, derive_seed(cfg.seed, 1000 + i)};
        const Ctf ctf = synth_ctf(pos.ground_truth, manifest.grid, manifest.steering,
                                  manifest.rx_pattern, noise);

        PositionEntry entry;
        entry.id = pos.id;
        entry.distance_m = pos.tx_rx_distance_m;
        entry.ctf_path = "ctf/" + pos.id;
        entry.ground_truth_path = "gt/" + pos.id + ".mpc";
        write_ctf(out_dir / entry.ctf_path, ctf);

        std::vector<MpcRecord> gt;
        gt.reserve(pos.ground_truth.size());
        for (const Mpc& m : pos.ground_truth) gt.push_back(MpcRecord::from_mpc(m));
        write_mpc_records(out_dir / *entry.ground_truth_path, gt);

        manifest.positions.push_back(std::move(entry));
    }

    save_manifest(out_dir / "manifest.json", manifest);
    return manifest;
}

}  // namespace thz
