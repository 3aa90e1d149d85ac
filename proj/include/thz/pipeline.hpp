#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thz/characterization.hpp"
#include "thz/clustering.hpp"
#include "thz/core.hpp"
#include "thz/forward.hpp"
#include "thz/sage.hpp"

namespace thz {

inline constexpr const char* kToolVersion = "thzchan 0.1.0";

/// File-layer image of one path row: exactly the numbers stored on disk
/// (angles in degrees). Round-trips bitwise; conversion to radians happens
/// only when an Mpc is built for computation.
struct MpcRecord {
    double alpha = 0.0;
    double tau_s = 0.0;
    double aoa_deg = 0.0;
    double eoa_deg = 0.0;
    double power_db = 0.0;

    static MpcRecord from_mpc(const Mpc& mpc);
    Mpc to_mpc() const;
};

// ---- on-disk formats -------------------------------------------------------

/// Writes <prefix>.json (grid + ordered steering list) and <prefix>.csv
/// (rows "dir_index, freq_index, real, imag", 17 significant digits).
void write_ctf(const std::filesystem::path& prefix, const Ctf& ctf);

/// Reads a CTF pair written by write_ctf. Dimension mismatches and
/// malformed/missing rows raise InputError naming the offending location.
Ctf read_ctf(const std::filesystem::path& prefix);

void write_mpc_records(const std::filesystem::path& path,
                       const std::vector<MpcRecord>& records);
std::vector<MpcRecord> read_mpc_records(const std::filesystem::path& path);

void write_system_response(const std::filesystem::path& path, const SystemResponse& sys);
SystemResponse read_system_response(const std::filesystem::path& path);

void write_cluster_labels(const std::filesystem::path& path, const std::vector<int>& labels);
std::vector<int> read_cluster_labels(const std::filesystem::path& path);

// ---- campaign description --------------------------------------------------

struct PositionEntry {
    std::string id;
    double distance_m = 0.0;
    std::string ctf_path;                       // relative to the manifest
    std::optional<std::string> raw_path;        // uncalibrated sweep, if any
    std::optional<std::string> ground_truth_path;
};

struct CampaignManifest {
    FrequencyGrid grid;
    SteeringGrid steering;
    AntennaPattern rx_pattern;
    AntennaPattern tx_pattern;
    std::vector<PositionEntry> positions;
    std::optional<std::string> system_response_path;
    EstimatorConfig estimator;
    ClusteringConfig clustering;
    CharacterizationConfig characterization;
    std::optional<double> snr_db;  // noise used at synthesis time, if any
    std::uint64_t seed = 0;
    std::filesystem::path base_dir;  // set on load; not serialized

    std::filesystem::path resolve(const std::string& rel) const { return base_dir / rel; }
};

void save_manifest(const std::filesystem::path& path, const CampaignManifest& manifest);
CampaignManifest load_manifest(const std::filesystem::path& path);

/// Applies the "estimator"/"clustering"/"characterization" sections of a
/// JSON config file on top of the manifest's settings.
void apply_config_file(CampaignManifest& manifest, const std::filesystem::path& config);

// ---- synthetic campaign ----------------------------------------------------

struct ScenarioConfig {
    std::uint64_t seed = 1;
    FrequencyGrid grid = standard_frequency_grid();
    bool los_only = false;
    std::size_t n_reflectors_min = 2;
    std::size_t n_reflectors_max = 4;
    double refl_atten_db_min = 10.0;  // below the direct path
    double refl_atten_db_max = 25.0;
    double refl_extra_path_m_min = 1.5;
    double refl_extra_path_m_max = 25.0;
    double refl_eoa_max_deg = 15.0;
    /// Per-direction i.i.d. phases instead of one constant phase per path.
    bool random_phase_per_direction = false;
    double snr_db = 40.0;  // +inf disables noise
};

/// 21 receiver positions in three columns (2 m spacing along each column,
/// separation roughly 6-18 m), every position with a direct path and,
/// unless los_only, a few weaker reflectors. Deterministic in the seed.
std::vector<RxPosition> make_atrium_scene(const ScenarioConfig& cfg);

/// Synthesizes and writes a full campaign (manifest, CTFs, ground truth)
/// under out_dir; returns the manifest ready for run_pipeline.
CampaignManifest scenario_synthetic_atrium(const ScenarioConfig& cfg,
                                           const std::filesystem::path& out_dir);

// ---- reporting -------------------------------------------------------------

struct PositionResult {
    bool ok = false;
    std::string error;  // set when ok is false
    PositionStats stats;
    // plot-ready data, emitted as files but not serialized into the report
    std::vector<double> pdp_delay_s;
    std::vector<double> pdp_power;
    std::vector<double> aps_azimuth_deg;
    std::vector<double> aps_power;
};

struct CiFitResult {
    std::optional<CiFit> fit;
    std::string reason;  // set when the fit is undefined
};

struct LogNormalFit {
    double mean_db = 0.0;
    double std_db = 0.0;
    std::size_t n_samples = 0;
};

struct CampaignMeans {
    std::optional<double> ds_s;
    std::optional<double> asa_rad;
    std::optional<double> esa_rad;
    std::optional<double> n_clusters;
    std::optional<double> cds_s;
    std::optional<double> casa_rad;
    std::optional<double> cesa_rad;
};

struct CampaignReport {
    std::string tool_version = kToolVersion;
    std::uint64_t seed = 0;
    double rx_boresight_gain_db = 0.0;  // compensation applied to pl_best_comp
    double ci_frequency_hz = 0.0;
    std::vector<PositionResult> positions;
    CiFitResult ci_omni;
    CiFitResult ci_best;
    std::optional<LogNormalFit> k_factor_fit;
    CampaignMeans means;
    std::string config_echo_json;  // effective settings, serialized
};

/// Full chain: (calibrate) -> estimate -> persist paths -> cluster ->
/// characterize, position by position; then the campaign-level fits.
/// Per-position failures are recorded in the report, not thrown. Positions
/// run on `jobs` worker threads; the result does not depend on scheduling.
CampaignReport run_pipeline(const CampaignManifest& manifest,
                            const std::filesystem::path& out_dir, unsigned jobs = 1);

/// Same statistics computed from previously persisted per-position path
/// files (<mpc_dir>/<id>.mpc) instead of re-running the estimator.
CampaignReport characterize_from_files(const CampaignManifest& manifest,
                                       const std::filesystem::path& mpc_dir,
                                       const std::filesystem::path& out_dir,
                                       unsigned jobs = 1);

std::string report_to_json(const CampaignReport& report);
CampaignReport report_from_json(const std::string& text);
std::string report_table_text(const CampaignReport& report);

/// Writes report.json, report_table.txt and, when plot data is present,
/// plots/pdp_<id>.txt and plots/aps_<id>.txt under out_dir.
void emit_report(const CampaignReport& report, const std::filesystem::path& out_dir);

}  // namespace thz
