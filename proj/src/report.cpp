#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "thz/pipeline.hpp"

#include "json_util.hpp"

namespace thz {

namespace {

using nlohmann::json;

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

json fit_to_json(const CiFitResult& r) {
    if (!r.fit) return json{{"undefined_reason", r.reason}};
    return json{{"n", r.fit->n},
                {"sigma_sf_db", r.fit->sigma_sf_db},
                {"fspl_d0_db", r.fit->fspl_d0_db},
                {"residuals_db", r.fit->residuals_db}};
}

CiFitResult fit_from_json(const json& j) {
    CiFitResult r;
    if (j.contains("undefined_reason")) {
        r.reason = j.at("undefined_reason").get<std::string>();
        return r;
    }
    CiFit fit;
    fit.n = j.at("n").get<double>();
    fit.sigma_sf_db = j.at("sigma_sf_db").get<double>();
    fit.fspl_d0_db = j.at("fspl_d0_db").get<double>();
    if (j.contains("residuals_db"))
        fit.residuals_db = j.at("residuals_db").get<std::vector<double>>();
    r.fit = fit;
    return r;
}

std::string cell(const std::optional<double>& v, const char* fmt, int width) {
    char buf[48];
    if (v)
        std::snprintf(buf, sizeof buf, fmt, *v);
    else
        std::snprintf(buf, sizeof buf, "%*s", width, "-");
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

void write_two_column(const std::filesystem::path& path, const std::string& header,
                      const std::vector<double>& x, const std::vector<double>& y) {
    std::string data = header;
    char buf[80];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g, %.17g\n", x[i], y[i]);
        data += buf;
    }
    write_file(path, data);
}

}  // namespace

std::string report_to_json(const CampaignReport& report) {
    json j;
    j["format"] = "thzchan-report-v1";
    j["tool_version"] = report.tool_version;
    j["seed"] = report.seed;
    j["rx_boresight_gain_db"] = report.rx_boresight_gain_db;
    j["ci_frequency_hz"] = report.ci_frequency_hz;

    json positions = json::array();
    for (const PositionResult& r : report.positions) {
        json e;
        e["id"] = r.stats.id;
        e["ok"] = r.ok;
        e["distance_m"] = r.stats.distance_m;
        if (!r.ok) {
            e["error"] = r.error;
        } else {
            e["error"] = nullptr;
            e["pl_best_db"] = r.stats.pl_best_db;
            e["pl_best_comp_db"] = r.stats.pl_best_comp_db;
            e["pl_omni_db"] = r.stats.pl_omni_db;
            e["k_factor_db"] = opt_json(r.stats.k_factor_db);
            e["ds_ns"] = r.stats.ds_s * 1e9;
            e["asa_deg"] = rad_to_deg(r.stats.asa_rad);
            e["esa_deg"] = rad_to_deg(r.stats.esa_rad);
            e["n_paths"] = r.stats.n_paths;
            e["n_clusters"] = r.stats.clusters.n_clusters;
            std::optional<double> cds, casa, cesa;
            if (r.stats.clusters.mean_cds_s) cds = *r.stats.clusters.mean_cds_s * 1e9;
            if (r.stats.clusters.mean_casa_rad)
                casa = rad_to_deg(*r.stats.clusters.mean_casa_rad);
            if (r.stats.clusters.mean_cesa_rad)
                cesa = rad_to_deg(*r.stats.clusters.mean_cesa_rad);
            e["cds_ns"] = opt_json(cds);
            e["casa_deg"] = opt_json(casa);
            e["cesa_deg"] = opt_json(cesa);
        }
        positions.push_back(std::move(e));
    }
    j["positions"] = std::move(positions);

    j["ci_omni"] = fit_to_json(report.ci_omni);
    j["ci_best"] = fit_to_json(report.ci_best);
    j["k_factor_fit"] =
        report.k_factor_fit
            ? json{{"mean_db", report.k_factor_fit->mean_db},
                   {"std_db", report.k_factor_fit->std_db},
                   {"n_samples", report.k_factor_fit->n_samples}}
            : json(nullptr);

    json means;
    means["ds_ns"] = opt_json(report.means.ds_s ? std::optional(*report.means.ds_s * 1e9)
                                                : std::nullopt);
    means["asa_deg"] = opt_json(
        report.means.asa_rad ? std::optional(rad_to_deg(*report.means.asa_rad)) : std::nullopt);
    means["esa_deg"] = opt_json(
        report.means.esa_rad ? std::optional(rad_to_deg(*report.means.esa_rad)) : std::nullopt);
    means["n_clusters"] = opt_json(report.means.n_clusters);
    means["cds_ns"] = opt_json(report.means.cds_s ? std::optional(*report.means.cds_s * 1e9)
                                                  : std::nullopt);
    means["casa_deg"] = opt_json(
        report.means.casa_rad ? std::optional(rad_to_deg(*report.means.casa_rad)) : std::nullopt);
    means["cesa_deg"] = opt_json(
        report.means.cesa_rad ? std::optional(rad_to_deg(*report.means.cesa_rad)) : std::nullopt);
    j["means"] = std::move(means);

    j["config"] = report.config_echo_json.empty() ? json(nullptr)
                                                  : json::parse(report.config_echo_json);
    return j.dump(1) + "\n";
}

CampaignReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("report: ") + e.what());
    }
    if (j.value("format", "") != "thzchan-report-v1")
        throw InputError("report: not a thzchan report file");

    CampaignReport report;
    report.tool_version = j.value("tool_version", std::string(kToolVersion));
    report.seed = j.value("seed", std::uint64_t(0));
    report.rx_boresight_gain_db = j.value("rx_boresight_gain_db", 0.0);
    report.ci_frequency_hz = j.value("ci_frequency_hz", 0.0);

    for (const auto& e : j.at("positions")) {
        PositionResult r;
        r.stats.id = e.at("id").get<std::string>();
        r.ok = e.at("ok").get<bool>();
        r.stats.distance_m = e.at("distance_m").get<double>();
        if (!r.ok) {
            r.error = e.value("error", std::string("unknown"));
        } else {
            r.stats.pl_best_db = e.at("pl_best_db").get<double>();
            r.stats.pl_best_comp_db = e.at("pl_best_comp_db").get<double>();
            r.stats.pl_omni_db = e.at("pl_omni_db").get<double>();
            r.stats.k_factor_db = opt_from(e, "k_factor_db");
            r.stats.ds_s = e.at("ds_ns").get<double>() * 1e-9;
            r.stats.asa_rad = deg_to_rad(e.at("asa_deg").get<double>());
            r.stats.esa_rad = deg_to_rad(e.at("esa_deg").get<double>());
            r.stats.n_paths = e.at("n_paths").get<std::size_t>();
            r.stats.clusters.n_clusters = e.at("n_clusters").get<std::size_t>();
            if (auto v = opt_from(e, "cds_ns")) r.stats.clusters.mean_cds_s = *v * 1e-9;
            if (auto v = opt_from(e, "casa_deg")) r.stats.clusters.mean_casa_rad = deg_to_rad(*v);
            if (auto v = opt_from(e, "cesa_deg")) r.stats.clusters.mean_cesa_rad = deg_to_rad(*v);
        }
        report.positions.push_back(std::move(r));
    }

    report.ci_omni = fit_from_json(j.at("ci_omni"));
    report.ci_best = fit_from_json(j.at("ci_best"));
    if (j.contains("k_factor_fit") && !j.at("k_factor_fit").is_null()) {
        const auto& k = j.at("k_factor_fit");
        report.k_factor_fit = LogNormalFit{k.at("mean_db").get<double>(),
                                           k.at("std_db").get<double>(),
                                           k.at("n_samples").get<std::size_t>()};
    }
    const auto& means = j.at("means");
    if (auto v = opt_from(means, "ds_ns")) report.means.ds_s = *v * 1e-9;
    if (auto v = opt_from(means, "asa_deg")) report.means.asa_rad = deg_to_rad(*v);
    if (auto v = opt_from(means, "esa_deg")) report.means.esa_rad = deg_to_rad(*v);
    report.means.n_clusters = opt_from(means, "n_clusters");
    if (auto v = opt_from(means, "cds_ns")) report.means.cds_s = *v * 1e-9;
    if (auto v = opt_from(means, "casa_deg")) report.means.casa_rad = deg_to_rad(*v);
    if (auto v = opt_from(means, "cesa_deg")) report.means.cesa_rad = deg_to_rad(*v);
    if (j.contains("config") && !j.at("config").is_null())
        report.config_echo_json = j.at("config").dump();
    return report;
}

std::string report_table_text(const CampaignReport& report) {
    std::string text;
    char buf[256];
    text += "# Campaign characterization (";
    text += report.tool_version;
    text += ")\n";
    std::snprintf(buf, sizeof buf,
                  "# PL_best compensated by the Rx boresight gain (+%.2f dB); angles in deg, "
                  "delays in ns; '-' marks undefined values.\n",
                  report.rx_boresight_gain_db);
    text += buf;
    std::snprintf(buf, sizeof buf,
                  "%-8s %7s %11s %11s %8s %8s %8s %8s %5s %8s %9s %9s\n", "position", "d_m",
                  "PL_best_dB", "PL_omni_dB", "K_dB", "DS_ns", "ASA_deg", "ESA_deg", "N_cl",
                  "CDS_ns", "CASA_deg", "CESA_deg");
    text += buf;

    for (const PositionResult& r : report.positions) {
        if (!r.ok) {
            std::snprintf(buf, sizeof buf, "%-8s %7.2f  FAILED: %s\n", r.stats.id.c_str(),
                          r.stats.distance_m, r.error.c_str());
            text += buf;
            continue;
        }
        std::optional<double> cds, casa, cesa;
        if (r.stats.clusters.mean_cds_s) cds = *r.stats.clusters.mean_cds_s * 1e9;
        if (r.stats.clusters.mean_casa_rad) casa = rad_to_deg(*r.stats.clusters.mean_casa_rad);
        if (r.stats.clusters.mean_cesa_rad) cesa = rad_to_deg(*r.stats.clusters.mean_cesa_rad);
        std::snprintf(buf, sizeof buf, "%-8s %7.2f %11.2f %11.2f %s %8.2f %8.2f %8.2f %5zu %s %s %s\n",
                      r.stats.id.c_str(), r.stats.distance_m, r.stats.pl_best_comp_db,
                      r.stats.pl_omni_db, cell(r.stats.k_factor_db, "%8.2f", 8).c_str(),
                      r.stats.ds_s * 1e9, rad_to_deg(r.stats.asa_rad), rad_to_deg(r.stats.esa_rad),
                      r.stats.clusters.n_clusters, cell(cds, "%8.2f", 8).c_str(),
                      cell(casa, "%9.2f", 9).c_str(), cell(cesa, "%9.2f", 9).c_str());
        text += buf;
    }

    std::optional<double> k_mean, ds_ns, asa, esa, ncl, cds, casa, cesa;
    if (report.k_factor_fit) k_mean = report.k_factor_fit->mean_db;
    if (report.means.ds_s) ds_ns = *report.means.ds_s * 1e9;
    if (report.means.asa_rad) asa = rad_to_deg(*report.means.asa_rad);
    if (report.means.esa_rad) esa = rad_to_deg(*report.means.esa_rad);
    ncl = report.means.n_clusters;
    if (report.means.cds_s) cds = *report.means.cds_s * 1e9;
    if (report.means.casa_rad) casa = rad_to_deg(*report.means.casa_rad);
    if (report.means.cesa_rad) cesa = rad_to_deg(*report.means.cesa_rad);
    std::snprintf(buf, sizeof buf, "%-8s %7s %11s %11s %s %s %s %s %s %s %s %s\n", "mean", "-",
                  "-", "-", cell(k_mean, "%8.2f", 8).c_str(), cell(ds_ns, "%8.2f", 8).c_str(),
                  cell(asa, "%8.2f", 8).c_str(), cell(esa, "%8.2f", 8).c_str(),
                  cell(ncl, "%5.2f", 5).c_str(), cell(cds, "%8.2f", 8).c_str(),
                  cell(casa, "%9.2f", 9).c_str(), cell(cesa, "%9.2f", 9).c_str());
    text += buf;

    auto fit_line = [&](const char* name, const CiFitResult& f) {
        if (f.fit) {
            std::snprintf(buf, sizeof buf,
                          "CI fit (%s): n = %.3f, sigma_SF = %.2f dB, FSPL(d0) = %.2f dB (f = "
                          "%.2f GHz)\n",
                          name, f.fit->n, f.fit->sigma_sf_db, f.fit->fspl_d0_db,
                          report.ci_frequency_hz / 1e9);
        } else {
            std::snprintf(buf, sizeof buf, "CI fit (%s): undefined (%s)\n", name,
                          f.reason.c_str());
        }
        text += buf;
    };
    fit_line("omni", report.ci_omni);
    fit_line("best", report.ci_best);
    if (report.k_factor_fit) {
        std::snprintf(buf, sizeof buf,
                      "K-factor log-normal fit: mean = %.2f dB, std = %.2f dB (%zu positions)\n",
                      report.k_factor_fit->mean_db, report.k_factor_fit->std_db,
                      report.k_factor_fit->n_samples);
        text += buf;
    } else {
        text += "K-factor log-normal fit: undefined (no position with more than one cluster)\n";
    }
    return text;
}

void emit_report(const CampaignReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "report.json", report_to_json(report));
    write_file(out_dir / "report_table.txt", report_table_text(report));
    for (const PositionResult& r : report.positions) {
        if (!r.ok || r.pdp_delay_s.empty()) continue;
        write_two_column(out_dir / "plots" / ("pdp_" + r.stats.id + ".txt"),
                         "# thzchan power-delay profile\n# columns: delay_s (s), power (linear)\n",
                         r.pdp_delay_s, r.pdp_power);
        write_two_column(
            out_dir / "plots" / ("aps_" + r.stats.id + ".txt"),
            "# thzchan azimuth power spectrum\n# columns: azimuth_deg (deg), power (linear)\n",
            r.aps_azimuth_deg, r.aps_power);
    }
}

}  // namespace thz
