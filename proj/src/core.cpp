#include "thz/core.hpp"

#include <algorithm>
#include <cmath>

namespace thz {

double normalize_azimuth_deg(double az_deg) {
    double a = std::fmod(az_deg, 360.0);
    if (a < 0.0) a += 360.0;
    if (a == 360.0) a = 0.0;  // fmod can round up for tiny negatives
    return a;
}

double normalize_azimuth_rad(double az_rad) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(az_rad, two_pi);
    if (a < 0.0) a += two_pi;
    if (a == two_pi) a = 0.0;
    return a;
}

FrequencyGrid FrequencyGrid::make(double f_start_hz, double f_step_hz, std::size_t n_points) {
    if (!(f_step_hz > 0.0)) throw InputError("frequency grid: f_step must be positive");
    if (n_points < 2) throw InputError("frequency grid: need at least 2 points");
    if (!(f_start_hz > 0.0)) throw InputError("frequency grid: frequencies must be positive");
    return {f_start_hz, f_step_hz, n_points};
}

FrequencyGrid standard_frequency_grid() { return FrequencyGrid::make(306e9, 2.5e6, 6001); }

SteeringDirection SteeringDirection::from_degrees(double az_deg, double el_deg) {
    if (!(el_deg >= -90.0 && el_deg <= 90.0))
        throw InputError("steering direction: elevation outside [-90, 90] deg");
    return {normalize_azimuth_deg(az_deg), el_deg};
}

std::array<double, 3> SteeringDirection::unit_vector() const {
    return direction_vector(azimuth_rad(), elevation_rad());
}

SteeringGrid SteeringGrid::make(std::vector<SteeringDirection> directions) {
    for (std::size_t i = 0; i < directions.size(); ++i) {
        for (std::size_t j = i + 1; j < directions.size(); ++j) {
            if (std::abs(directions[i].azimuth_deg - directions[j].azimuth_deg) < 1e-9 &&
                std::abs(directions[i].elevation_deg - directions[j].elevation_deg) < 1e-9)
                throw InputError("steering grid: duplicate direction at indices " +
                                 std::to_string(i) + " and " + std::to_string(j));
        }
    }
    return {std::move(directions)};
}

SteeringGrid standard_steering_grid() {
    std::vector<SteeringDirection> dirs;
    dirs.reserve(36 * 5);
    for (int az = 0; az < 360; az += 10)
        for (int el = -20; el <= 20; el += 10)
            dirs.push_back(SteeringDirection::from_degrees(double(az), double(el)));
    return SteeringGrid{std::move(dirs)};
}

AntennaPattern AntennaPattern::make(double boresight_gain_dbi, double hpbw_deg,
                                    double sidelobe_floor_db) {
    if (!(hpbw_deg > 0.0)) throw InputError("antenna pattern: HPBW must be positive");
    if (!(sidelobe_floor_db < 0.0))
        throw InputError("antenna pattern: sidelobe floor must be below boresight");
    return {boresight_gain_dbi, hpbw_deg, sidelobe_floor_db};
}

AntennaPattern default_rx_pattern() { return AntennaPattern::make(25.0, 8.0, -30.0); }
AntennaPattern default_tx_pattern() { return AntennaPattern::make(7.0, 30.0, -30.0); }

Mpc Mpc::make(double alpha, double tau_s, double aoa_rad, double eoa_rad, double phase_rad,
              std::optional<double> max_delay_s) {
    if (!(alpha > 0.0)) throw InputError("mpc: path gain must be positive");
    if (!(tau_s >= 0.0)) throw InputError("mpc: delay must be non-negative");
    if (max_delay_s && tau_s > *max_delay_s)
        throw InputError("mpc: delay exceeds the grid's maximum representable delay");
    if (!(eoa_rad >= -std::numbers::pi / 2 && eoa_rad <= std::numbers::pi / 2))
        throw InputError("mpc: elevation of arrival outside [-pi/2, pi/2]");
    Mpc m;
    m.alpha = alpha;
    m.tau_s = tau_s;
    m.aoa_rad = normalize_azimuth_rad(aoa_rad);
    m.eoa_rad = eoa_rad;
    m.phase_rad = phase_rad;
    return m;
}

std::array<double, 3> Mpc::direction() const { return direction_vector(aoa_rad, eoa_rad); }

Ctf Ctf::zeros(FrequencyGrid grid, SteeringGrid steering) {
    Ctf ctf;
    ctf.grid = grid;
    ctf.steering = std::move(steering);
    ctf.h.assign(ctf.steering.size() * grid.n_points, {0.0, 0.0});
    return ctf;
}

double Ctf::row_energy(std::size_t dir) const {
    double e = 0.0;
    for (const auto& v : row(dir)) e += std::norm(v);
    return e;
}

double Ctf::total_energy() const {
    double e = 0.0;
    for (const auto& v : h) e += std::norm(v);
    return e;
}

std::array<double, 3> direction_vector(double aoa_rad, double eoa_rad) {
    const double ca = std::cos(aoa_rad), sa = std::sin(aoa_rad);
    const double ce = std::cos(eoa_rad), se = std::sin(eoa_rad);
    return {ca * ce, sa * ce, se};
}

double angle_between(const std::array<double, 3>& u, const std::array<double, 3>& v) {
    auto sqnorm = [](const std::array<double, 3>& x) {
        return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    };
    if (std::abs(sqnorm(u) - 1.0) > 2e-9 || std::abs(sqnorm(v) - 1.0) > 2e-9)
        throw ContractViolation("angle_between: inputs must be unit vectors");
    double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    dot = std::clamp(dot, -1.0, 1.0);
    return std::acos(dot);
}

}  // namespace thz
