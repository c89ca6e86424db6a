#pragma once

// Sample-level signal model: Gaussian noise frames, Gaussian signals of a
// given power, and per-trial Rayleigh-fading SNR draws. Both the noise and
// the signal are real-valued zero-mean Gaussians, which makes the energy
// statistic exactly chi-square distributed — theory-vs-simulation checks are
// sharp rather than asymptotic.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "specsense/rng.hpp"

namespace specsense {

using SampleFrame = std::vector<double>;

enum class Hypothesis { H0, H1 };  // channel idle / primary user present

enum class Fading { Awgn, Rayleigh };

// One secondary user's sensing channel. Under Rayleigh fading, snr_db is the
// mean SNR of the per-trial exponential draw.
struct ChannelSpec {
    double snr_db = 0.0;
    double noise_power = 4.0;
    Fading fading = Fading::Awgn;

    double snr_linear() const { return std::pow(10.0, snr_db / 10.0); }
    double signal_power() const { return noise_power * snr_linear(); }

    void validate() const {
        if (!(noise_power > 0.0))
            throw std::domain_error("ChannelSpec: noise_power must be positive");
        if (!std::isfinite(snr_db))
            throw std::domain_error("ChannelSpec: snr_db must be finite");
    }
};

// n i.i.d. samples of zero-mean Gaussian noise with the given power.
inline SampleFrame generate_noise(std::size_t n, double noise_power, SeededRng& rng) {
    if (n < 1) throw std::domain_error("generate_noise: n must be at least 1");
    if (!(noise_power > 0.0))
        throw std::domain_error("generate_noise: noise_power must be positive");
    const double sigma = std::sqrt(noise_power);
    SampleFrame frame(n);
    for (double& s : frame) s = sigma * rng.gaussian();
    return frame;
}

// n i.i.d. samples of signal-plus-noise: the sum of two independent zero-mean
// Gaussians is drawn directly as one Gaussian of power P + sigma^2.
inline SampleFrame generate_signal_plus_noise(std::size_t n, double signal_power,
                                              double noise_power, SeededRng& rng) {
    if (n < 1) throw std::domain_error("generate_signal_plus_noise: n must be at least 1");
    if (!(signal_power > 0.0))
        throw std::domain_error("generate_signal_plus_noise: signal_power must be positive");
    if (!(noise_power > 0.0))
        throw std::domain_error("generate_signal_plus_noise: noise_power must be positive");
    const double sigma = std::sqrt(signal_power + noise_power);
    SampleFrame frame(n);
    for (double& s : frame) s = sigma * rng.gaussian();
    return frame;
}

// One Rayleigh-fading SNR draw: exponential with the given mean, via the
// inverse CDF gamma = -mean * ln(1 - u).
inline double sample_rayleigh_snr(double mean_snr, SeededRng& rng) {
    if (!(mean_snr > 0.0))
        throw std::domain_error("sample_rayleigh_snr: mean_snr must be positive");
    return -mean_snr * std::log1p(-rng.uniform());
}

}  // namespace specsense
