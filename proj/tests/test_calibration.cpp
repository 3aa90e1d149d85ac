#include <cmath>
#include <complex>

#include <doctest.h>

#include "thz/calibration.hpp"
#include "thz/forward.hpp"
#include "thz/rng.hpp"

using namespace thz;
using cd = std::complex<double>;

namespace {

Ctf random_ctf(std::size_t n_dir, std::size_t n_freq, std::uint64_t seed) {
    std::vector<SteeringDirection> dirs;
    for (std::size_t i = 0; i < n_dir; ++i)
        dirs.push_back(SteeringDirection::from_degrees(double(i) * 360.0 / double(n_dir), 0.0));
    Ctf ctf = Ctf::zeros(FrequencyGrid::make(306e9, 25e6, n_freq),
                         SteeringGrid::make(std::move(dirs)));
    Rng rng(seed);
    for (auto& v : ctf.h) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return ctf;
}

SystemResponse random_response(std::size_t n_freq, std::uint64_t seed) {
    Rng rng(seed);
    SystemResponse sys;
    sys.s_connect.resize(n_freq);
    sys.s_extra.resize(n_freq);
    for (std::size_t k = 0; k < n_freq; ++k) {
        const double m1 = rng.uniform(0.5, 2.0), p1 = rng.uniform(0.0, 2 * std::numbers::pi);
        const double m2 = rng.uniform(0.5, 2.0), p2 = rng.uniform(0.0, 2 * std::numbers::pi);
        sys.s_connect[k] = {m1 * std::cos(p1), m1 * std::sin(p1)};
        sys.s_extra[k] = {m2 * std::cos(p2), m2 * std::sin(p2)};
    }
    return sys;
}

}  // namespace

TEST_SUITE_BEGIN("calibration");

TEST_CASE("all-ones response is the identity") {
    const Ctf raw = random_ctf(4, 32, 5);
    SystemResponse ones;
    ones.s_connect.assign(32, {1.0, 0.0});
    ones.s_extra.assign(32, {1.0, 0.0});
    const Ctf ctf = calibrate(raw, ones);
    for (std::size_t i = 0; i < raw.h.size(); ++i) CHECK(ctf.h[i] == raw.h[i]);
}

TEST_CASE("calibrate inverts apply_system_response") {
    const Ctf ctf = random_ctf(6, 48, 17);
    const SystemResponse sys = random_response(48, 18);
    const Ctf round = calibrate(apply_system_response(ctf, sys), sys);
    for (std::size_t i = 0; i < ctf.h.size(); ++i)
        CHECK(std::abs(round.h[i] - ctf.h[i]) <= 1e-12 * std::abs(ctf.h[i]) + 1e-15);
}

TEST_CASE("near-zero response names the offending bin") {
    const Ctf raw = random_ctf(2, 16, 3);
    SystemResponse sys = random_response(16, 4);
    sys.s_connect[7] = {0.0, 0.0};
    try {
        calibrate(raw, sys);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
}

TEST_CASE("calibration is linear in the measured sweep") {
    const Ctf x = random_ctf(3, 24, 21);
    Ctf y = random_ctf(3, 24, 22);
    const SystemResponse sys = random_response(24, 23);
    Ctf mix = x;
    for (std::size_t i = 0; i < mix.h.size(); ++i) mix.h[i] = 0.75 * x.h[i] + 2.5 * y.h[i];
    const Ctf cal_mix = calibrate(mix, sys);
    const Ctf cal_x = calibrate(x, sys);
    const Ctf cal_y = calibrate(y, sys);
    for (std::size_t i = 0; i < mix.h.size(); ++i)
        CHECK(std::abs(cal_mix.h[i] - (0.75 * cal_x.h[i] + 2.5 * cal_y.h[i])) < 1e-12);
}

TEST_CASE("length mismatch is rejected") {
    const Ctf raw = random_ctf(2, 16, 3);
    CHECK_THROWS_AS(calibrate(raw, random_response(15, 4)), InputError);
}

TEST_SUITE_END();
