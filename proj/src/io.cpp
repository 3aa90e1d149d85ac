#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "thz/pipeline.hpp"

#include "json_util.hpp"

namespace thz {

namespace {

using nlohmann::json;

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("write failed for " + path.string());
}

/// Walks comma/space separated numeric fields line by line.
class FieldReader {
  public:
    FieldReader(const std::string& text, std::string origin)
        : text_(text), origin_(std::move(origin)) {}

    /// Moves to the next non-comment, non-empty line. False at end of file.
    bool next_line() {
        while (pos_ < text_.size()) {
            const std::size_t eol = text_.find('\n', pos_);
            line_start_ = pos_;
            line_end_ = eol == std::string::npos ? text_.size() : eol;
            pos_ = line_end_ + 1;
            ++line_no_;
            std::size_t s = line_start_;
            while (s < line_end_ && std::isspace(static_cast<unsigned char>(text_[s]))) ++s;
            if (s == line_end_ || text_[s] == '#') continue;
            cursor_ = s;
            return true;
        }
        return false;
    }

    double field() {
        skip_separators();
        if (cursor_ >= line_end_) fail("missing field");
        const char* begin = text_.data() + cursor_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        cursor_ += std::size_t(end - begin);
        if (cursor_ > line_end_) fail("malformed number");
        return v;
    }

    long integer_field() {
        skip_separators();
        if (cursor_ >= line_end_) fail("missing field");
        const char* begin = text_.data() + cursor_;
        char* end = nullptr;
        const long v = std::strtol(begin, &end, 10);
        if (end == begin) fail("malformed integer");
        cursor_ += std::size_t(end - begin);
        return v;
    }

    void end_of_line() {
        skip_separators();
        if (cursor_ < line_end_) fail("unexpected trailing data");
    }

    std::size_t line_number() const { return line_no_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw InputError(origin_ + ":" + std::to_string(line_no_) + ": " + what);
    }

  private:
    void skip_separators() {
        while (cursor_ < line_end_ &&
               (text_[cursor_] == ',' ||
                std::isspace(static_cast<unsigned char>(text_[cursor_]))))
            ++cursor_;
    }

    const std::string& text_;
    std::string origin_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0, line_end_ = 0, cursor_ = 0;
    std::size_t line_no_ = 0;
};

}  // namespace

namespace detail {

json grid_to_json(const FrequencyGrid& g) {
    return json{{"f_start_hz", g.f_start_hz}, {"f_step_hz", g.f_step_hz}, {"n_points", g.n_points}};
}

FrequencyGrid grid_from_json(const json& j) {
    return FrequencyGrid::make(j.at("f_start_hz").get<double>(), j.at("f_step_hz").get<double>(),
                               j.at("n_points").get<std::size_t>());
}

json steering_to_json(const SteeringGrid& s) {
    json arr = json::array();
    for (const auto& d : s.directions) arr.push_back({d.azimuth_deg, d.elevation_deg});
    return arr;
}

SteeringGrid steering_from_json(const json& arr) {
    std::vector<SteeringDirection> dirs;
    dirs.reserve(arr.size());
    for (const auto& e : arr)
        dirs.push_back(SteeringDirection::from_degrees(e.at(0).get<double>(), e.at(1).get<double>()));
    return SteeringGrid::make(std::move(dirs));
}

json pattern_to_json(const AntennaPattern& p) {
    return json{{"boresight_gain_dbi", p.boresight_gain_dbi},
                {"hpbw_deg", p.hpbw_deg},
                {"sidelobe_floor_db", p.sidelobe_floor_db}};
}

AntennaPattern pattern_from_json(const json& j) {
    return AntennaPattern::make(j.at("boresight_gain_dbi").get<double>(),
                                j.at("hpbw_deg").get<double>(),
                                j.at("sidelobe_floor_db").get<double>());
}

json estimator_to_json(const EstimatorConfig& c) {
    return json{{"max_paths", c.max_paths},
                {"threshold_offset_db", c.threshold_offset_db},
                {"delay_oversampling", c.delay_oversampling},
                {"angle_refine_steps", c.angle_refine_steps},
                {"convergence_eps", c.convergence_eps},
                {"max_em_iterations", c.max_em_iterations}};
}

void estimator_from_json(const json& j, EstimatorConfig& c) {
    if (j.contains("max_paths")) c.max_paths = j.at("max_paths").get<std::size_t>();
    if (j.contains("threshold_offset_db"))
        c.threshold_offset_db = j.at("threshold_offset_db").get<double>();
    if (j.contains("delay_oversampling"))
        c.delay_oversampling = j.at("delay_oversampling").get<std::size_t>();
    if (j.contains("angle_refine_steps"))
        c.angle_refine_steps = j.at("angle_refine_steps").get<std::size_t>();
    if (j.contains("convergence_eps")) c.convergence_eps = j.at("convergence_eps").get<double>();
    if (j.contains("max_em_iterations"))
        c.max_em_iterations = j.at("max_em_iterations").get<std::size_t>();
    c.validate();
}

json clustering_to_json(const ClusteringConfig& c) {
    return json{{"xi", c.xi},
                {"eps", c.eps},
                {"min_pts", c.min_pts},
                {"noise_policy", c.noise_policy == NoisePolicy::Singleton ? "singleton" : "discard"}};
}

void clustering_from_json(const json& j, ClusteringConfig& c) {
    if (j.contains("xi")) c.xi = j.at("xi").get<double>();
    if (j.contains("eps")) c.eps = j.at("eps").get<double>();
    if (j.contains("min_pts")) c.min_pts = j.at("min_pts").get<std::size_t>();
    if (j.contains("noise_policy")) {
        const std::string p = j.at("noise_policy").get<std::string>();
        if (p == "singleton")
            c.noise_policy = NoisePolicy::Singleton;
        else if (p == "discard")
            c.noise_policy = NoisePolicy::Discard;
        else
            throw InputError("unknown noise_policy '" + p + "'");
    }
    c.validate();
}

json characterization_to_json(const CharacterizationConfig& c) {
    return json{{"spread_method", c.spread_method == SpreadMethod::Circular ? "circular" : "rms"},
                {"ci_frequency_hz", c.ci_frequency_hz},
                {"ci_d0_m", c.ci_d0_m}};
}

void characterization_from_json(const json& j, CharacterizationConfig& c) {
    if (j.contains("spread_method")) {
        const std::string m = j.at("spread_method").get<std::string>();
        if (m == "circular")
            c.spread_method = SpreadMethod::Circular;
        else if (m == "rms")
            c.spread_method = SpreadMethod::Rms;
        else
            throw InputError("unknown spread_method '" + m + "'");
    }
    if (j.contains("ci_frequency_hz")) c.ci_frequency_hz = j.at("ci_frequency_hz").get<double>();
    if (j.contains("ci_d0_m")) c.ci_d0_m = j.at("ci_d0_m").get<double>();
}

json parse_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

}  // namespace detail

using namespace detail;

MpcRecord MpcRecord::from_mpc(const Mpc& mpc) {
    MpcRecord rec;
    rec.alpha = mpc.alpha;
    rec.tau_s = mpc.tau_s;
    rec.aoa_deg = rad_to_deg(mpc.aoa_rad);
    rec.eoa_deg = rad_to_deg(mpc.eoa_rad);
    rec.power_db = 20.0 * std::log10(mpc.alpha);
    return rec;
}

Mpc MpcRecord::to_mpc() const {
    return Mpc::make(alpha, tau_s, deg_to_rad(aoa_deg), deg_to_rad(eoa_deg));
}

void write_ctf(const std::filesystem::path& prefix, const Ctf& ctf) {
    json meta;
    meta["format"] = "thzchan-ctf-v1";
    meta["frequency_grid"] = grid_to_json(ctf.grid);
    meta["steering_deg"] = steering_to_json(ctf.steering);
    meta["units"] = {{"frequency", "Hz"}, {"steering", "deg"}, {"h", "linear"}};
    write_text(std::filesystem::path(prefix).concat(".json"), meta.dump(1) + "\n");

    std::string data;
    data.reserve(ctf.h.size() * 52 + 128);
    data += "# thzchan ctf data v1\n";
    data += "# columns: dir_index, freq_index, real, imag (linear, dimensionless)\n";
    char buf[96];
    for (std::size_t r = 0; r < ctf.n_dir(); ++r) {
        for (std::size_t k = 0; k < ctf.n_freq(); ++k) {
            const std::complex<double>& v = ctf.at(r, k);
            std::snprintf(buf, sizeof buf, "%zu, %zu, %.17g, %.17g\n", r, k, v.real(), v.imag());
            data += buf;
        }
    }
    write_text(std::filesystem::path(prefix).concat(".csv"), data);
}

Ctf read_ctf(const std::filesystem::path& prefix) {
    const auto meta_path = std::filesystem::path(prefix).concat(".json");
    const auto data_path = std::filesystem::path(prefix).concat(".csv");
    const json meta = parse_json_file(meta_path);
    if (meta.value("format", "") != "thzchan-ctf-v1")
        throw InputError(meta_path.string() + ": not a thzchan CTF manifest");

    Ctf ctf = Ctf::zeros(grid_from_json(meta.at("frequency_grid")),
                         steering_from_json(meta.at("steering_deg")));

    const std::string text = slurp(data_path);
    FieldReader rd(text, data_path.string());
    for (std::size_t r = 0; r < ctf.n_dir(); ++r) {
        for (std::size_t k = 0; k < ctf.n_freq(); ++k) {
            if (!rd.next_line())
                throw InputError(data_path.string() + ": truncated, missing row (dir " +
                                 std::to_string(r) + ", freq " + std::to_string(k) + ")");
            const long rr = rd.integer_field();
            const long kk = rd.integer_field();
            if (rr != long(r) || kk != long(k))
                rd.fail("expected row (dir " + std::to_string(r) + ", freq " + std::to_string(k) +
                        "), found (dir " + std::to_string(rr) + ", freq " + std::to_string(kk) + ")");
            const double re = rd.field();
            const double im = rd.field();
            rd.end_of_line();
            if (!std::isfinite(re) || !std::isfinite(im)) rd.fail("non-finite entry");
            ctf.at(r, k) = {re, im};
        }
    }
    if (rd.next_line())
        throw InputError(data_path.string() + ":" + std::to_string(rd.line_number()) +
                         ": more rows than the manifest dimensions allow");
    return ctf;
}

void write_mpc_records(const std::filesystem::path& path, const std::vector<MpcRecord>& records) {
    std::string data;
    data += "# thzchan mpc list v1\n";
    data += "# columns: alpha (linear), tau_s (s), aoa_deg (deg), eoa_deg (deg), power_db (dB)\n";
    char buf[160];
    for (const MpcRecord& m : records) {
        std::snprintf(buf, sizeof buf, "%.17g, %.17g, %.17g, %.17g, %.17g\n", m.alpha, m.tau_s,
                      m.aoa_deg, m.eoa_deg, m.power_db);
        data += buf;
    }
    write_text(path, data);
}

std::vector<MpcRecord> read_mpc_records(const std::filesystem::path& path) {
    const std::string text = slurp(path);
    FieldReader rd(text, path.string());
    std::vector<MpcRecord> records;
    while (rd.next_line()) {
        MpcRecord m;
        m.alpha = rd.field();
        m.tau_s = rd.field();
        m.aoa_deg = rd.field();
        m.eoa_deg = rd.field();
        m.power_db = rd.field();
        rd.end_of_line();
        records.push_back(m);
    }
    return records;
}

void write_system_response(const std::filesystem::path& path, const SystemResponse& sys) {
    std::string data;
    data += "# thzchan system response v1\n";
    data += "# columns: freq_index, connect_re, connect_im, extra_re, extra_im (linear)\n";
    char buf[160];
    for (std::size_t k = 0; k < sys.s_connect.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu, %.17g, %.17g, %.17g, %.17g\n", k,
                      sys.s_connect[k].real(), sys.s_connect[k].imag(), sys.s_extra[k].real(),
                      sys.s_extra[k].imag());
        data += buf;
    }
    write_text(path, data);
}

SystemResponse read_system_response(const std::filesystem::path& path) {
    const std::string text = slurp(path);
    FieldReader rd(text, path.string());
    SystemResponse sys;
    std::size_t expected = 0;
    while (rd.next_line()) {
        const long k = rd.integer_field();
        if (k != long(expected)) rd.fail("expected frequency index " + std::to_string(expected));
        const double cr = rd.field(), ci = rd.field(), er = rd.field(), ei = rd.field();
        rd.end_of_line();
        sys.s_connect.emplace_back(cr, ci);
        sys.s_extra.emplace_back(er, ei);
        ++expected;
    }
    if (sys.s_connect.empty()) throw InputError(path.string() + ": empty system response");
    return sys;
}

void write_cluster_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
    std::string data;
    data += "# thzchan cluster labels v1\n";
    data += "# columns: mpc_index, cluster_label\n";
    char buf[64];
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu, %d\n", i, labels[i]);
        data += buf;
    }
    write_text(path, data);
}

std::vector<int> read_cluster_labels(const std::filesystem::path& path) {
    const std::string text = slurp(path);
    FieldReader rd(text, path.string());
    std::vector<int> labels;
    while (rd.next_line()) {
        const long i = rd.integer_field();
        if (i != long(labels.size())) rd.fail("expected mpc index " + std::to_string(labels.size()));
        labels.push_back(int(rd.integer_field()));
        rd.end_of_line();
    }
    return labels;
}

void save_manifest(const std::filesystem::path& path, const CampaignManifest& manifest) {
    json j;
    j["format"] = "thzchan-campaign-v1";
    j["frequency_grid"] = grid_to_json(manifest.grid);
    j["steering_deg"] = steering_to_json(manifest.steering);
    j["rx_pattern"] = pattern_to_json(manifest.rx_pattern);
    j["tx_pattern"] = pattern_to_json(manifest.tx_pattern);
    json positions = json::array();
    for (const PositionEntry& p : manifest.positions) {
        json e;
        e["id"] = p.id;
        e["distance_m"] = p.distance_m;
        e["ctf"] = p.ctf_path;
        e["raw"] = p.raw_path ? json(*p.raw_path) : json(nullptr);
        e["ground_truth"] = p.ground_truth_path ? json(*p.ground_truth_path) : json(nullptr);
        positions.push_back(std::move(e));
    }
    j["positions"] = std::move(positions);
    j["system_response"] =
        manifest.system_response_path ? json(*manifest.system_response_path) : json(nullptr);
    j["estimator"] = estimator_to_json(manifest.estimator);
    j["clustering"] = clustering_to_json(manifest.clustering);
    j["characterization"] = characterization_to_json(manifest.characterization);
    j["noise_snr_db"] = manifest.snr_db ? json(*manifest.snr_db) : json(nullptr);
    j["seed"] = manifest.seed;
    write_text(path, j.dump(1) + "\n");
}

CampaignManifest load_manifest(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    if (j.value("format", "") != "thzchan-campaign-v1")
        throw InputError(path.string() + ": not a thzchan campaign manifest");

    CampaignManifest m;
    m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    m.grid = grid_from_json(j.at("frequency_grid"));
    m.steering = steering_from_json(j.at("steering_deg"));
    m.rx_pattern = pattern_from_json(j.at("rx_pattern"));
    m.tx_pattern = pattern_from_json(j.at("tx_pattern"));
    for (const auto& e : j.at("positions")) {
        PositionEntry p;
        p.id = e.at("id").get<std::string>();
        p.distance_m = e.at("distance_m").get<double>();
        p.ctf_path = e.at("ctf").get<std::string>();
        if (e.contains("raw") && !e.at("raw").is_null())
            p.raw_path = e.at("raw").get<std::string>();
        if (e.contains("ground_truth") && !e.at("ground_truth").is_null())
            p.ground_truth_path = e.at("ground_truth").get<std::string>();
        m.positions.push_back(std::move(p));
    }
    if (j.contains("system_response") && !j.at("system_response").is_null())
        m.system_response_path = j.at("system_response").get<std::string>();
    if (j.contains("estimator")) estimator_from_json(j.at("estimator"), m.estimator);
    if (j.contains("clustering")) clustering_from_json(j.at("clustering"), m.clustering);
    if (j.contains("characterization"))
        characterization_from_json(j.at("characterization"), m.characterization);
    if (j.contains("noise_snr_db") && !j.at("noise_snr_db").is_null())
        m.snr_db = j.at("noise_snr_db").get<double>();
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();

    for (const PositionEntry& p : m.positions) {
        const auto ctf_meta = m.resolve(p.ctf_path).concat(".json");
        if (!std::filesystem::exists(ctf_meta))
            throw InputError("manifest references missing CTF " + ctf_meta.string());
        if (p.raw_path && !std::filesystem::exists(m.resolve(*p.raw_path).concat(".csv")))
            throw InputError("manifest references missing raw sweep " + *p.raw_path);
    }
    if (m.system_response_path && !std::filesystem::exists(m.resolve(*m.system_response_path)))
        throw InputError("manifest references missing system response " +
                         *m.system_response_path);
    return m;
}

void apply_config_file(CampaignManifest& manifest, const std::filesystem::path& config) {
    const json j = parse_json_file(config);
    if (j.contains("estimator")) estimator_from_json(j.at("estimator"), manifest.estimator);
    if (j.contains("clustering")) clustering_from_json(j.at("clustering"), manifest.clustering);
    if (j.contains("characterization"))
        characterization_from_json(j.at("characterization"), manifest.characterization);
}

}  // namespace thz
