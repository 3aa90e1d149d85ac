#include "thz/calibration.hpp"

#include <cmath>
#include <string>

namespace thz {

Ctf calibrate(const Ctf& raw, const SystemResponse& sys) {
    const std::size_t n_freq = raw.n_freq();
    if (sys.s_connect.size() != n_freq || sys.s_extra.size() != n_freq)
        throw InputError("calibrate: response length does not match the sweep");

    std::vector<std::complex<double>> denom(n_freq);
    for (std::size_t k = 0; k < n_freq; ++k) {
        denom[k] = sys.s_extra[k] * sys.s_connect[k];
        if (std::abs(denom[k]) < 1e-12)
            throw NumericalError("calibrate: system response is not invertible at frequency index " +
                                 std::to_string(k));
    }

    Ctf ctf = raw;
    for (std::size_t r = 0; r < ctf.n_dir(); ++r) {
        auto row = ctf.row(r);
        for (std::size_t k = 0; k < n_freq; ++k) row[k] /= denom[k];
    }
    return ctf;
}

}  // namespace thz
