#pragma once

// Single-user energy detection: the energy statistic, the threshold decision,
// and the closed-form false-alarm / detection probabilities.
//
// Threshold conventions. The Gaussian-approximation forms (pf_gaussian,
// pd_gaussian, required_samples) work on the per-sample (normalized) energy
// E/N, whose mean under H0 is sigma^2 and under H1 is P + sigma^2. The
// Marcum-Q / incomplete-gamma forms (pd_marcum, pf_gamma, pd_rayleigh) work
// on the raw summed energy in unit-noise chi-square units with 2u degrees of
// freedom. DetectorConfig carries a `normalized` flag saying which units its
// threshold is expressed in; each closed form converts as needed.

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "specsense/signal_model.hpp"
#include "specsense/special_functions.hpp"

namespace specsense {

// A user's 1-bit sensing report: 1 = channel occupied.
using LocalReport = int;

struct DetectorConfig {
    int n_samples = 100;
    double threshold = 0.0;
    bool normalized = false;  // threshold given per sample instead of summed

    double raw_threshold() const {
        return normalized ? threshold * n_samples : threshold;
    }
    double normalized_threshold() const {
        return normalized ? threshold : threshold / n_samples;
    }

    void validate() const {
        if (n_samples < 1)
            throw std::domain_error("DetectorConfig: n_samples must be at least 1");
        if (!(threshold > 0.0))
            throw std::domain_error("DetectorConfig: threshold must be positive");
    }
};

// Energy of one frame under the configured convention: sum of squares, or
// the per-sample average when normalized.
inline double energy_statistic(const SampleFrame& frame, const DetectorConfig& config) {
    if (frame.empty()) throw std::domain_error("energy_statistic: frame is empty");
    if (frame.size() != static_cast<std::size_t>(config.n_samples))
        throw std::domain_error("energy_statistic: frame length does not match n_samples");
    double sum = 0.0;
    for (double s : frame) sum += s * s;
    return config.normalized ? sum / static_cast<double>(config.n_samples) : sum;
}

// Threshold rule: occupied iff energy strictly exceeds the threshold.
// A tie decides 0 (idle) — a zero-measure event under continuous noise,
// fixed so tests are deterministic.
inline LocalReport decide(double energy, double threshold) {
    return energy > threshold ? 1 : 0;
}

// False-alarm probability of the Gaussian-approximation detector:
// Pf = Q((E - sigma^2) / sqrt((2/N) sigma^4)) with E the normalized threshold.
inline Probability pf_gaussian(const DetectorConfig& config, double noise_power) {
    config.validate();
    if (!(noise_power > 0.0))
        throw std::domain_error("pf_gaussian: noise_power must be positive");
    const double n = static_cast<double>(config.n_samples);
    const double e = config.normalized_threshold();
    return gaussian_q((e - noise_power) / (noise_power * std::sqrt(2.0 / n)));
}

// Detection probability of the Gaussian-approximation detector:
// Pd = Q((E - (P + sigma^2)) / sqrt((2/N)(P + sigma^2)^2)).
inline Probability pd_gaussian(const DetectorConfig& config, double noise_power,
                               double signal_power) {
    config.validate();
    if (!(noise_power > 0.0))
        throw std::domain_error("pd_gaussian: noise_power must be positive");
    if (!(signal_power > 0.0))
        throw std::domain_error("pd_gaussian: signal_power must be positive");
    const double n = static_cast<double>(config.n_samples);
    const double e = config.normalized_threshold();
    const double mean = signal_power + noise_power;
    return gaussian_q((e - mean) / (mean * std::sqrt(2.0 / n)));
}

// Smallest sample count meeting both a false-alarm and a detection target at
// a given linear SNR: N = ceil( 2 * (Q^-1(Pf) - Q^-1(Pd) (1 + snr))^2 / snr^2 ),
// floored at one sample.
inline int required_samples(Probability target_pf, Probability target_pd, double snr) {
    if (!(target_pf > 0.0 && target_pf < 1.0))
        throw std::domain_error("required_samples: target_pf must lie inside (0, 1)");
    if (!(target_pd > 0.0 && target_pd < 1.0))
        throw std::domain_error("required_samples: target_pd must lie inside (0, 1)");
    if (!(snr > 0.0)) throw std::domain_error("required_samples: snr must be positive");
    const double qf = gaussian_q_inv(target_pf);
    const double qd = gaussian_q_inv(target_pd);
    const double root = qf - qd * (1.0 + snr);
    const double n = 2.0 * root * root / (snr * snr);
    const double ceiled = std::ceil(n);
    return ceiled < 1.0 ? 1 : static_cast<int>(ceiled);
}

// Exact detection probability at linear SNR gamma in the unit-noise
// chi-square convention: Pd = Q_N(sqrt(2 gamma), sqrt(E_raw)).
inline Probability pd_marcum(const DetectorConfig& config, double snr) {
    config.validate();
    if (!(snr >= 0.0)) throw std::domain_error("pd_marcum: snr must be non-negative");
    const double b = std::sqrt(config.raw_threshold());
    const double a = std::sqrt(2.0 * snr);
    return marcum_q(config.n_samples, a, b);
}

// Exact false-alarm probability in the same convention, with u degrees of
// freedom (time-bandwidth product): Pf = Gamma(u, E_raw/2) / Gamma(u).
inline Probability pf_gamma(const DetectorConfig& config, double u) {
    config.validate();
    if (!(u > 0.0)) throw std::domain_error("pf_gamma: u must be positive");
    return reg_upper_gamma(u, 0.5 * config.raw_threshold());
}

// Detection probability averaged over a Rayleigh-fading SNR with mean
// mean_snr (exponential density). Closed form; the N = 1 case degenerates to
// exp(-E / (2 (1 + mean_snr))) because both partial sums are empty.
inline Probability pd_rayleigh(const DetectorConfig& config, double mean_snr) {
    config.validate();
    if (!(mean_snr > 0.0))
        throw std::domain_error("pd_rayleigh: mean_snr must be positive");
    const int n = config.n_samples;
    const double e = config.raw_threshold();
    const double g = mean_snr;

    // sum_{k=0}^{n-2} x^k / k! for x = E/2 and x = E g / (2 (1 + g)).
    double sum_half = 0.0, sum_scaled = 0.0;
    {
        const double x1 = 0.5 * e;
        const double x2 = 0.5 * e * g / (1.0 + g);
        double t1 = 1.0, t2 = 1.0;
        for (int k = 0; k <= n - 2; ++k) {
            sum_half += t1;
            sum_scaled += t2;
            t1 *= x1 / static_cast<double>(k + 1);
            t2 *= x2 / static_cast<double>(k + 1);
        }
    }
    const double ratio = std::pow((1.0 + g) / g, n - 1);
    const double pd = std::exp(-0.5 * e) * sum_half +
                      ratio * (std::exp(-0.5 * e / (1.0 + g)) -
                               std::exp(-0.5 * e) * sum_scaled);
    return clamp01(pd);
}

}  // namespace specsense
