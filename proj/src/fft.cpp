#include "thz/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thz {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<std::complex<double>> make_twiddles(std::size_t n) {
    std::vector<std::complex<double>> tw(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        double a = -2.0 * std::numbers::pi * double(j) / double(n);
        tw[j] = {std::cos(a), std::sin(a)};
    }
    return tw;
}

void fft_core(std::span<std::complex<double>> a,
              const std::vector<std::complex<double>>& twiddle, bool inverse) {
    const std::size_t n = a.size();
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < half; ++j) {
                std::complex<double> w = twiddle[j * step];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = a[i + j];
                const std::complex<double> t = a[i + j + half] * w;
                a[i + j] = u + t;
                a[i + j + half] = u - t;
            }
        }
    }
}

}  // namespace

void fft_pow2(std::span<std::complex<double>> a, bool inverse) {
    if (!is_pow2(a.size())) throw std::invalid_argument("fft_pow2: size must be a power of two");
    fft_core(a, make_twiddles(a.size()), inverse);
}

BluesteinPlan::BluesteinPlan(std::size_t input_size, std::size_t output_size)
    : k_(input_size), m_(output_size) {
    if (k_ == 0 || m_ == 0 || k_ > m_)
        throw std::invalid_argument("BluesteinPlan: need 0 < input_size <= output_size");
    n_ = next_pow2(k_ + m_ - 1);
    twiddle_ = make_twiddles(n_);

    // chirp_[j] = exp(+i pi j^2 / M); the quadratic phase is reduced
    // mod 2M in integer arithmetic to keep full precision at large j.
    const std::size_t chirp_len = std::max(k_, m_);
    chirp_.resize(chirp_len);
    const std::uint64_t two_m = 2 * std::uint64_t(m_);
    for (std::size_t j = 0; j < chirp_len; ++j) {
        std::uint64_t q = (std::uint64_t(j) * std::uint64_t(j)) % two_m;
        double a = std::numbers::pi * double(q) / double(m_);
        chirp_[j] = {std::cos(a), std::sin(a)};
    }

    // Wrapped conjugate-chirp kernel: g[n] = conj(chirp[n]) for n < M,
    // mirrored into the tail for the negative lags of the convolution.
    kernel_fft_.assign(n_, {0.0, 0.0});
    for (std::size_t j = 0; j < m_; ++j) kernel_fft_[j] = std::conj(chirp_[j]);
    for (std::size_t j = 1; j < k_; ++j) kernel_fft_[n_ - j] = std::conj(chirp_[j]);
    fft_core(kernel_fft_, twiddle_, false);
}

void BluesteinPlan::run(std::span<const std::complex<double>> x,
                        std::span<std::complex<double>> y) const {
    if (x.size() != k_ || y.size() != m_)
        throw std::invalid_argument("BluesteinPlan::run: size mismatch");
    std::vector<std::complex<double>> buf(n_, {0.0, 0.0});
    for (std::size_t j = 0; j < k_; ++j) buf[j] = x[j] * chirp_[j];
    fft_core(buf, twiddle_, false);
    for (std::size_t j = 0; j < n_; ++j) buf[j] *= kernel_fft_[j];
    fft_core(buf, twiddle_, true);
    const double inv_n = 1.0 / double(n_);
    for (std::size_t j = 0; j < m_; ++j) y[j] = buf[j] * chirp_[j] * inv_n;
}

}  // namespace thz
