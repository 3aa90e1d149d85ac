#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "thz/core.hpp"

namespace thz {

/// Frequency responses of everything that is not the channel: the
/// back-to-back connection sweep and the extra components present only in
/// the real measurement (horns etc.). Both vectors have one entry per
/// frequency point and must stay invertible (|.| >= 1e-12).
struct SystemResponse {
    std::vector<std::complex<double>> s_connect;
    std::vector<std::complex<double>> s_extra;

    /// All-ones s_extra with the given connect sweep.
    static SystemResponse with_unity_extra(std::vector<std::complex<double>> s_connect);
};

/// Additive white Gaussian noise request. snr_db is measured against the
/// mean power of the strongest steering direction; +inf disables noise.
struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;

    bool enabled() const { return std::isfinite(snr_db); }
};

/// Gain of the pattern at off_boresight radians, in dB:
/// G(psi) = G0 - 12 (psi / HPBW)^2, floored at G0 + sidelobe_floor.
double antenna_gain_db(const AntennaPattern& pattern, double off_boresight_rad);

/// Same as antenna_gain_db but returned as a linear amplitude factor,
/// 10^(dB/20).
double antenna_gain(const AntennaPattern& pattern, double off_boresight_rad);

/// Synthesizes the direction-scanned CTF of an explicit path list:
///   H[r][k] = sum_l alpha_l g(psi_{r,l}) exp(i phi_{l,r}) exp(-i 2 pi f_k tau_l) + W
/// with g the receive-pattern amplitude at the angle between steering
/// direction r and the path's arrival direction. Any transmit-side gain is
/// assumed folded into alpha by the caller (the transmitter never rotates).
Ctf synth_ctf(const std::vector<Mpc>& mpcs, const FrequencyGrid& grid,
              const SteeringGrid& steering, const AntennaPattern& rx_pattern,
              const std::optional<NoiseSpec>& noise = std::nullopt);

/// Re-applies a system response to a clean CTF, producing the raw sweep the
/// instrument would record: raw[r][k] = H[r][k] * s_extra[k] * s_connect[k].
Ctf apply_system_response(const Ctf& ctf, const SystemResponse& sys);

/// Adds circular complex Gaussian noise scaled so that the mean noise power
/// equals (strongest direction's mean |H|^2) * 10^(-snr_db/10). Deterministic
/// under a fixed seed; rows use independently derived streams.
Ctf add_awgn(const Ctf& ctf, const NoiseSpec& noise);

}  // namespace thz
