#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thz/calibration.hpp"
#include "thz/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
    std::string config;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::string out = ".";
};

void print_position_failures(const thz::CampaignReport& report) {
    for (const thz::PositionResult& r : report.positions)
        if (!r.ok) std::fprintf(stderr, "position %s: %s\n", r.stats.id.c_str(), r.error.c_str());
}

int run(int argc, char** argv) {
    CLI::App app{"THz channel-sounding post-processing toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalArgs g;
    app.add_option("--config", g.config, "JSON config overriding estimator/clustering settings");
    app.add_option("--seed", g.seed, "master seed for synthetic data");
    app.add_option("--jobs", g.jobs, "worker threads for per-position processing");
    app.add_option("--out", g.out, "output directory (or file, where noted)");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic atrium campaign");
    double snr_db = 40.0;
    bool los_only = false;
    std::size_t n_points = 6001;
    double f_step_hz = 2.5e6;
    synth->add_option("--snr-db", snr_db, "synthesis SNR in dB ('inf' disables noise)");
    synth->add_flag("--los-only", los_only, "direct path only, no reflectors");
    synth->add_option("--n-points", n_points, "frequency points per sweep");
    synth->add_option("--f-step-hz", f_step_hz, "frequency step in Hz");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "remove the system response from a raw sweep");
    std::string raw_prefix, system_path, ctf_out;
    calibrate->add_option("--raw", raw_prefix, "raw sweep file prefix")->required();
    calibrate->add_option("--system", system_path, "system response file")->required();
    calibrate->add_option("--ctf-out", ctf_out, "output CTF prefix")->required();

    // estimate
    auto* estimate = app.add_subcommand("estimate", "extract path parameters from a CTF");
    std::string ctf_prefix, mpc_out, manifest_path;
    estimate->add_option("--ctf", ctf_prefix, "CTF file prefix")->required();
    estimate->add_option("--mpc-out", mpc_out, "output path list file")->required();
    estimate->add_option("--manifest", manifest_path, "campaign manifest supplying settings");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "group a path list into clusters");
    std::string mpc_in, labels_out;
    cluster->add_option("--mpc", mpc_in, "path list file")->required();
    cluster->add_option("--labels-out", labels_out, "output labels file")->required();

    // characterize
    auto* characterize =
        app.add_subcommand("characterize", "recompute the report from persisted path lists");
    std::string chr_manifest, mpc_dir;
    characterize->add_option("--manifest", chr_manifest, "campaign manifest")->required();
    characterize->add_option("--mpc-dir", mpc_dir, "directory of per-position .mpc files")
        ->required();

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "run the full processing chain");
    std::string pip_manifest;
    pipeline->add_option("--manifest", pip_manifest, "campaign manifest")->required();

    // report
    auto* report_cmd = app.add_subcommand("report", "re-render a report from its JSON form");
    std::string report_in;
    report_cmd->add_option("--report", report_in, "report.json file")->required();

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        thz::ScenarioConfig cfg;
        cfg.seed = g.seed;
        cfg.snr_db = snr_db;
        cfg.los_only = los_only;
        cfg.grid = thz::FrequencyGrid::make(306e9, f_step_hz, n_points);
        thz::CampaignManifest manifest = thz::scenario_synthetic_atrium(cfg, g.out);
        std::printf("wrote campaign with %zu positions under %s\n", manifest.positions.size(),
                    g.out.c_str());
        return 0;
    }
    if (calibrate->parsed()) {
        const thz::Ctf raw = thz::read_ctf(raw_prefix);
        const thz::SystemResponse sys = thz::read_system_response(system_path);
        thz::write_ctf(ctf_out, thz::calibrate(raw, sys));
        std::printf("wrote calibrated CTF to %s.{json,csv}\n", ctf_out.c_str());
        return 0;
    }
    if (estimate->parsed()) {
        thz::AntennaPattern pattern = thz::default_rx_pattern();
        thz::EstimatorConfig cfg;
        if (!manifest_path.empty()) {
            const thz::CampaignManifest m = thz::load_manifest(manifest_path);
            pattern = m.rx_pattern;
            cfg = m.estimator;
        }
        if (!g.config.empty()) {
            thz::CampaignManifest tmp;
            tmp.estimator = cfg;
            thz::apply_config_file(tmp, g.config);
            cfg = tmp.estimator;
        }
        const thz::Ctf ctf = thz::read_ctf(ctf_prefix);
        const auto estimates = thz::estimate_mpcs(ctf, pattern, cfg);
        std::vector<thz::MpcRecord> records;
        records.reserve(estimates.size());
        for (const auto& e : estimates) records.push_back(thz::MpcRecord::from_mpc(e.mpc));
        thz::write_mpc_records(mpc_out, records);
        std::printf("estimated %zu paths -> %s\n", records.size(), mpc_out.c_str());
        return 0;
    }
    if (cluster->parsed()) {
        thz::ClusteringConfig cfg;
        if (!g.config.empty()) {
            thz::CampaignManifest tmp;
            thz::apply_config_file(tmp, g.config);
            cfg = tmp.clustering;
        }
        const auto records = thz::read_mpc_records(mpc_in);
        if (records.empty()) throw thz::InputError("cluster: empty path list " + mpc_in);
        std::vector<thz::Mpc> mpcs;
        mpcs.reserve(records.size());
        for (const auto& r : records) mpcs.push_back(r.to_mpc());
        const auto labels = thz::dbscan(thz::mcd_matrix(mpcs, cfg.xi), cfg);
        thz::write_cluster_labels(labels_out, labels);
        const auto clusters = thz::form_clusters(mpcs, labels);
        std::printf("%zu paths -> %zu clusters, labels in %s\n", mpcs.size(), clusters.size(),
                    labels_out.c_str());
        return 0;
    }
    if (characterize->parsed()) {
        thz::CampaignManifest manifest = thz::load_manifest(chr_manifest);
        if (!g.config.empty()) thz::apply_config_file(manifest, g.config);
        const thz::CampaignReport report =
            thz::characterize_from_files(manifest, mpc_dir, g.out, g.jobs);
        thz::emit_report(report, g.out);
        print_position_failures(report);
        std::printf("report written under %s\n", g.out.c_str());
        return 0;
    }
    if (pipeline->parsed()) {
        thz::CampaignManifest manifest = thz::load_manifest(pip_manifest);
        if (!g.config.empty()) thz::apply_config_file(manifest, g.config);
        const thz::CampaignReport report = thz::run_pipeline(manifest, g.out, g.jobs);
        thz::emit_report(report, g.out);
        print_position_failures(report);
        std::printf("report written under %s\n", g.out.c_str());
        return 0;
    }
    if (report_cmd->parsed()) {
        std::ifstream in(report_in, std::ios::binary);
        if (!in) throw thz::InputError("cannot open " + report_in);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const thz::CampaignReport report = thz::report_from_json(text);
        thz::emit_report(report, g.out);
        std::printf("report re-rendered under %s\n", g.out.c_str());
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const thz::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 1;
    } catch (const thz::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
