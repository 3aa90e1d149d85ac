#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace thz {

/// In-place radix-2 FFT; size must be a power of two. Unscaled on both
/// directions: forward computes X[j] = sum_k x[k] exp(-i 2 pi j k / N),
/// inverse computes x[k] = sum_j X[j] exp(+i 2 pi j k / N) (no 1/N).
void fft_pow2(std::span<std::complex<double>> a, bool inverse);

/// Chirp-z (Bluestein) plan evaluating, for arbitrary K <= M,
///   y[m] = sum_{k<K} x[k] exp(+i 2 pi k m / M),   m = 0 .. M-1,
/// i.e. a zero-padded length-M inverse DFT without the 1/M factor.
/// Internally runs power-of-two FFTs of length >= K + M - 1; the chirp
/// kernel spectrum and twiddle tables are precomputed once per plan, so a
/// plan can be reused across many rows. run() is const and thread-safe.
class BluesteinPlan {
  public:
    BluesteinPlan(std::size_t input_size, std::size_t output_size);

    std::size_t input_size() const { return k_; }
    std::size_t output_size() const { return m_; }

    void run(std::span<const std::complex<double>> x,
             std::span<std::complex<double>> y) const;

  private:
    std::size_t k_ = 0;
    std::size_t m_ = 0;
    std::size_t n_ = 0;  // internal FFT length, power of two
    std::vector<std::complex<double>> chirp_;       // exp(+i pi n^2 / M)
    std::vector<std::complex<double>> kernel_fft_;  // FFT of wrapped conj chirp
    std::vector<std::complex<double>> twiddle_;     // exp(-i 2 pi j / N), j < N/2
};

}  // namespace thz
