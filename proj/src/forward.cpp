#include "thz/forward.hpp"

#include <cmath>

#include "thz/rng.hpp"

namespace thz {

namespace {

// Refresh interval of the incremental phasor recurrence; keeps the
// accumulated rounding of exp(-i 2 pi f_k tau) below ~1e-13 rad.
constexpr std::size_t kPhasorRefresh = 256;

}  // namespace

SystemResponse SystemResponse::with_unity_extra(std::vector<std::complex<double>> s_connect) {
    SystemResponse sys;
    sys.s_extra.assign(s_connect.size(), {1.0, 0.0});
    sys.s_connect = std::move(s_connect);
    return sys;
}

double antenna_gain_db(const AntennaPattern& pattern, double off_boresight_rad) {
    const double psi_deg = rad_to_deg(off_boresight_rad);
    const double ratio = psi_deg / pattern.hpbw_deg;
    const double rolloff_db = -12.0 * ratio * ratio;
    return pattern.boresight_gain_dbi + std::max(rolloff_db, pattern.sidelobe_floor_db);
}

double antenna_gain(const AntennaPattern& pattern, double off_boresight_rad) {
    return std::pow(10.0, antenna_gain_db(pattern, off_boresight_rad) / 20.0);
}

Ctf synth_ctf(const std::vector<Mpc>& mpcs, const FrequencyGrid& grid,
              const SteeringGrid& steering, const AntennaPattern& rx_pattern,
              const std::optional<NoiseSpec>& noise) {
    const std::size_t n_dir = steering.size();
    const std::size_t n_freq = grid.n_points;
    const double max_delay = grid.max_delay_s();
    for (std::size_t l = 0; l < mpcs.size(); ++l) {
        if (!(mpcs[l].tau_s >= 0.0) || mpcs[l].tau_s > max_delay)
            throw InputError("synth_ctf: path " + std::to_string(l) +
                             " delay outside [0, 1/f_step]");
        if (mpcs[l].phases_rad && mpcs[l].phases_rad->size() != n_dir)
            throw InputError("synth_ctf: path " + std::to_string(l) +
                             " per-direction phase list does not match the steering grid");
    }

    Ctf ctf = Ctf::zeros(grid, steering);
    std::vector<std::array<double, 3>> steer_vec(n_dir);
    for (std::size_t r = 0; r < n_dir; ++r) steer_vec[r] = steering[r].unit_vector();

    for (const Mpc& path : mpcs) {
        const std::array<double, 3> omega = path.direction();
        const double w_start = -2.0 * std::numbers::pi * grid.f_start_hz * path.tau_s;
        const double w_step = -2.0 * std::numbers::pi * grid.f_step_hz * path.tau_s;
        const std::complex<double> step_phasor = {std::cos(w_step), std::sin(w_step)};
        for (std::size_t r = 0; r < n_dir; ++r) {
            const double psi = angle_between(steer_vec[r], omega);
            const double g = antenna_gain(rx_pattern, psi);
            const double phi = path.phases_rad ? (*path.phases_rad)[r] : path.phase_rad;
            const std::complex<double> a0 =
                path.alpha * g *
                std::complex<double>{std::cos(w_start + phi), std::sin(w_start + phi)};
            auto row = ctf.row(r);
            std::complex<double> ph = {1.0, 0.0};
            for (std::size_t k = 0; k < n_freq; ++k) {
                if (k % kPhasorRefresh == 0) {
                    const double w = w_step * double(k);
                    ph = {std::cos(w), std::sin(w)};
                }
                row[k] += a0 * ph;
                ph *= step_phasor;
            }
        }
    }

    if (noise && noise->enabled()) return add_awgn(ctf, *noise);
    return ctf;
}

Ctf apply_system_response(const Ctf& ctf, const SystemResponse& sys) {
    const std::size_t n_freq = ctf.n_freq();
    if (sys.s_connect.size() != n_freq || sys.s_extra.size() != n_freq)
        throw InputError("apply_system_response: response length does not match the sweep");
    Ctf raw = ctf;
    for (std::size_t r = 0; r < raw.n_dir(); ++r) {
        auto row = raw.row(r);
        for (std::size_t k = 0; k < n_freq; ++k) row[k] *= sys.s_extra[k] * sys.s_connect[k];
    }
    return raw;
}

Ctf add_awgn(const Ctf& ctf, const NoiseSpec& noise) {
    if (!noise.enabled()) return ctf;
    const std::size_t n_freq = ctf.n_freq();

    double p_ref = 0.0;
    for (std::size_t r = 0; r < ctf.n_dir(); ++r)
        p_ref = std::max(p_ref, ctf.row_energy(r) / double(n_freq));
    if (p_ref <= 0.0)
        throw InputError("add_awgn: all-zero CTF has no power reference for a finite SNR");

    const double variance = p_ref * std::pow(10.0, -noise.snr_db / 10.0);
    Ctf out = ctf;
    for (std::size_t r = 0; r < out.n_dir(); ++r) {
        Rng rng = Rng::derive(noise.seed, r);
        auto row = out.row(r);
        for (std::size_t k = 0; k < n_freq; ++k) row[k] += rng.next_cgaussian(variance);
    }
    return out;
}

}  // namespace thz
