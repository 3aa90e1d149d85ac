#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace thz {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Malformed files, inconsistent dimensions, invalid configuration.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure during processing (singular fit, degenerate data).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Precondition breach at an internal interface.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps an azimuth in degrees into [0, 360).
double normalize_azimuth_deg(double az_deg);

/// Wraps an azimuth in radians into [0, 2*pi).
double normalize_azimuth_rad(double az_rad);

/// Uniform frequency sweep f_k = f_start + k * f_step, k = 0 .. n_points-1.
struct FrequencyGrid {
    double f_start_hz = 306e9;
    double f_step_hz = 2.5e6;
    std::size_t n_points = 6001;

    /// Validates f_step > 0, n_points >= 2 and positive frequencies.
    static FrequencyGrid make(double f_start_hz, double f_step_hz, std::size_t n_points);

    double frequency_hz(std::size_t k) const { return f_start_hz + double(k) * f_step_hz; }
    double center_frequency_hz() const {
        return f_start_hz + 0.5 * double(n_points - 1) * f_step_hz;
    }
    double span_hz() const { return double(n_points - 1) * f_step_hz; }
    /// Largest unambiguous delay of the sweep.
    double max_delay_s() const { return 1.0 / f_step_hz; }
    /// Delay bin width of the length-n inverse transform (1 / (n * f_step)).
    double delay_resolution_s() const { return 1.0 / (double(n_points) * f_step_hz); }

    bool operator==(const FrequencyGrid&) const = default;
};

/// 306-321 GHz sweep: 6001 points at 2.5 MHz spacing.
FrequencyGrid standard_frequency_grid();

/// One pointing of the steered receive antenna. Angles are kept in degrees
/// here because steering grids are definition/IO data; use the *_rad()
/// accessors for computation.
struct SteeringDirection {
    double azimuth_deg = 0.0;    // normalized to [0, 360)
    double elevation_deg = 0.0;  // [-90, 90]

    static SteeringDirection from_degrees(double az_deg, double el_deg);

    double azimuth_rad() const { return deg_to_rad(azimuth_deg); }
    double elevation_rad() const { return deg_to_rad(elevation_deg); }
    std::array<double, 3> unit_vector() const;

    bool operator==(const SteeringDirection&) const = default;
};

/// Ordered list of unique steering directions; row order of every CTF.
struct SteeringGrid {
    std::vector<SteeringDirection> directions;

    /// Validates uniqueness (1e-9 deg tolerance after normalization).
    static SteeringGrid make(std::vector<SteeringDirection> directions);

    std::size_t size() const { return directions.size(); }
    const SteeringDirection& operator[](std::size_t i) const { return directions[i]; }

    bool operator==(const SteeringGrid&) const = default;
};

/// Azimuth 0:10:350 crossed with elevation -20:10:20, azimuth-major:
/// 36 x 5 = 180 directions. The 360 deg endpoint collapses onto 0 deg.
SteeringGrid standard_steering_grid();

/// Gaussian main lobe in dB with a constant sidelobe floor.
struct AntennaPattern {
    double boresight_gain_dbi = 25.0;
    double hpbw_deg = 8.0;
    double sidelobe_floor_db = -30.0;  // relative to boresight

    static AntennaPattern make(double boresight_gain_dbi, double hpbw_deg,
                               double sidelobe_floor_db);

    bool operator==(const AntennaPattern&) const = default;
};

AntennaPattern default_rx_pattern();  // 25 dBi, 8 deg HPBW
AntennaPattern default_tx_pattern();  // 7 dBi, 30 deg HPBW

/// One propagation path. alpha is the antenna-de-embedded linear path gain.
struct Mpc {
    double alpha = 0.0;    // linear amplitude, > 0
    double tau_s = 0.0;    // time of arrival, seconds
    double aoa_rad = 0.0;  // azimuth of arrival, [0, 2*pi)
    double eoa_rad = 0.0;  // elevation of arrival, [-pi/2, pi/2]
    /// Constant phase term applied to every steering direction.
    double phase_rad = 0.0;
    /// Optional per-steering-direction phases (synthesis side); overrides
    /// phase_rad when present and must match the steering grid length.
    std::optional<std::vector<double>> phases_rad;

    /// Validates alpha > 0, tau >= 0, |eoa| <= pi/2; normalizes the azimuth.
    /// When max_delay_s is given, also enforces tau <= max_delay_s.
    static Mpc make(double alpha, double tau_s, double aoa_rad, double eoa_rad,
                    double phase_rad = 0.0,
                    std::optional<double> max_delay_s = std::nullopt);

    std::array<double, 3> direction() const;
    double power() const { return alpha * alpha; }
};

/// Direction-scanned channel transfer function: one complex row per
/// steering direction, one column per frequency point.
struct Ctf {
    FrequencyGrid grid;
    SteeringGrid steering;
    std::vector<std::complex<double>> h;  // row-major, n_dir() x n_freq()

    static Ctf zeros(FrequencyGrid grid, SteeringGrid steering);

    std::size_t n_dir() const { return steering.size(); }
    std::size_t n_freq() const { return grid.n_points; }

    std::complex<double>& at(std::size_t dir, std::size_t k) {
        return h[dir * grid.n_points + k];
    }
    const std::complex<double>& at(std::size_t dir, std::size_t k) const {
        return h[dir * grid.n_points + k];
    }
    std::span<std::complex<double>> row(std::size_t dir) {
        return {h.data() + dir * grid.n_points, grid.n_points};
    }
    std::span<const std::complex<double>> row(std::size_t dir) const {
        return {h.data() + dir * grid.n_points, grid.n_points};
    }

    double row_energy(std::size_t dir) const;
    double total_energy() const;
};

/// One measured/synthesized receiver location.
struct RxPosition {
    std::string id;
    double tx_rx_distance_m = 0.0;
    std::vector<Mpc> ground_truth;  // synthetic campaigns only
};

/// Unit arrival vector [cos(aoa)cos(eoa), sin(aoa)cos(eoa), sin(eoa)].
std::array<double, 3> direction_vector(double aoa_rad, double eoa_rad);

/// Angle between two unit vectors, in [0, pi]. Inputs must be unit norm
/// within 1e-9 or a ContractViolation is thrown.
double angle_between(const std::array<double, 3>& u, const std::array<double, 3>& v);

}  // namespace thz
