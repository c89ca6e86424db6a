#pragma once

// Monte Carlo harness: per-channel threshold sweeps with both counting
// procedures, single-user ROC curves, cooperative (fused) curves with
// optional attackers, theory companions for every curve, and a
// simulation-vs-theory deviation report.
//
// Determinism: every random quantity of a trial comes from a counter-based
// stream keyed by (seed, trial, channel, purpose), so results are
// bit-identical for a given spec no matter how trials are ordered or
// batched. Energies are computed once per (trial, channel) and compared
// against every threshold in the sweep; this equals re-running the trial per
// threshold (same streams) and makes the counted rates exactly monotone in
// the threshold.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "specsense/energy_detector.hpp"
#include "specsense/fusion.hpp"
#include "specsense/rng.hpp"
#include "specsense/signal_model.hpp"

namespace specsense {

// How counts are taken over the trials of one threshold.
//   Standard:    false alarm when the noise energy exceeds the threshold;
//                detection when the signal-plus-noise energy exceeds it.
//                The textbook definition; closed forms predict these rates.
//   Conditional: false alarm as above, but a detection is only counted when
//                the false-alarm event did NOT fire and the signal-plus-noise
//                energy exceeds the threshold. The two counts are disjoint by
//                construction, so pd <= 1 - pf holds exactly. Applied at the
//                fused level the same way: fused detection requires fused
//                false-alarm bit 0 and fused detection bit 1.
enum class CountingMode { Standard, Conditional };

struct ThresholdSweep {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    void validate() const {
        if (!(step > 0.0)) throw std::domain_error("ThresholdSweep: threshold_step must be positive");
        if (!(start < stop))
            throw std::domain_error("ThresholdSweep: threshold_start must be below threshold_stop");
        if (!(start > 0.0))
            throw std::domain_error("ThresholdSweep: threshold_start must be positive");
    }

    // start, start+step, ... up to stop (inclusive, with rounding slack).
    std::vector<double> points() const {
        validate();
        const auto count =
            static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i)
            out[i] = start + static_cast<double>(i) * step;
        return out;
    }

    bool operator==(const ThresholdSweep&) const = default;
};

// A full sweep definition: channels, detector template, per-channel
// threshold grids, trial count, seed, optional fusion rule, counting mode,
// and optional per-user behavior profiles.
struct ExperimentSpec {
    std::vector<ChannelSpec> channels;
    std::vector<ThresholdSweep> sweeps;  // one per channel
    int n_samples = 100;
    bool normalized = false;
    long n_trials = 5000;
    std::uint64_t seed = 1;
    std::optional<FusionRule> rule;
    CountingMode counting = CountingMode::Standard;
    std::vector<UserProfile> profiles;  // empty means all honest

    void validate() const {
        if (channels.empty()) throw std::domain_error("ExperimentSpec: channels must be non-empty");
        if (!sweeps.empty() && sweeps.size() != channels.size())
            throw std::domain_error("ExperimentSpec: one threshold sweep per channel required");
        if (n_samples < 1) throw std::domain_error("ExperimentSpec: n_samples must be at least 1");
        if (n_trials < 1) throw std::domain_error("ExperimentSpec: n_trials must be at least 1");
        if (!profiles.empty() && profiles.size() != channels.size())
            throw std::domain_error("ExperimentSpec: one profile per channel required");
        for (const ChannelSpec& c : channels) c.validate();
        for (const ThresholdSweep& s : sweeps) s.validate();
        for (const UserProfile& p : profiles) p.validate();
    }

    UserProfile profile_of(std::size_t channel) const {
        return profiles.empty() ? UserProfile::Honest() : profiles[channel];
    }

    bool has_attackers() const {
        for (const UserProfile& p : profiles)
            if (p.kind != UserProfile::Kind::Honest) return true;
        return false;
    }
};

// One (threshold, rates) row of a ROC curve, with closed-form companions.
struct CurvePoint {
    double threshold = 0.0;
    Probability pf_sim = 0.0;
    Probability pd_sim = 0.0;
    Probability pf_theory = 0.0;
    Probability pd_theory = 0.0;
};

// Theory-only row (no simulation columns).
struct TheoryPoint {
    double threshold = 0.0;
    Probability pf = 0.0;
    Probability pd = 0.0;
};

namespace detail {

// Both energies of one (trial, channel): the noise-only energy and the
// signal-plus-noise energy sharing the same noise frame.
inline std::pair<double, double> trial_channel_energies(const ExperimentSpec& spec,
                                                        std::size_t channel,
                                                        long trial) {
    const ChannelSpec& ch = spec.channels[channel];
    const auto t = static_cast<std::uint64_t>(trial);

    double signal_power = ch.signal_power();
    if (ch.fading == Fading::Rayleigh) {
        SeededRng fading_rng(spec.seed, make_stream(t, channel, StreamPurpose::FadingSnr));
        signal_power = ch.noise_power * sample_rayleigh_snr(ch.snr_linear(), fading_rng);
    }

    SeededRng noise_rng(spec.seed, make_stream(t, channel, StreamPurpose::NoiseFrame));
    SeededRng signal_rng(spec.seed, make_stream(t, channel, StreamPurpose::SignalFrame));
    const SampleFrame noise = generate_noise(spec.n_samples, ch.noise_power, noise_rng);
    const SampleFrame signal = generate_noise(spec.n_samples, signal_power, signal_rng);

    DetectorConfig cfg;
    cfg.n_samples = spec.n_samples;
    cfg.normalized = spec.normalized;

    SampleFrame total(noise.size());
    for (std::size_t i = 0; i < noise.size(); ++i) total[i] = noise[i] + signal[i];
    return {energy_statistic(noise, cfg), energy_statistic(total, cfg)};
}

// All energies of an experiment, indexed [channel][trial].
struct ChannelEnergies {
    std::vector<double> noise;
    std::vector<double> total;
};

inline std::vector<ChannelEnergies> simulate_energies(const ExperimentSpec& spec) {
    std::vector<ChannelEnergies> out(spec.channels.size());
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        out[c].noise.resize(spec.n_trials);
        out[c].total.resize(spec.n_trials);
    }
    for (long trial = 0; trial < spec.n_trials; ++trial)
        for (std::size_t c = 0; c < spec.channels.size(); ++c) {
            const auto [e0, e1] = trial_channel_energies(spec, c, trial);
            out[c].noise[trial] = e0;
            out[c].total[trial] = e1;
        }
    return out;
}

// integral_0^inf f(gamma) exp(-gamma/mean)/mean dgamma by composite 20-point
// Gauss-Legendre over one-mean-wide panels; the truncated tail beyond
// 40 means is below 1e-17 of the total for any f bounded by 1.
template <typename F>
double exponential_average(double mean, F&& f) {
    static constexpr double nodes[10] = {
        0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
        0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
        0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
        0.9931285991850949};
    static constexpr double weights[10] = {
        0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
        0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
        0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
        0.0176140071391521};
    double acc = 0.0;
    for (int panel = 0; panel < 40; ++panel) {
        const double mid = panel + 0.5;  // in units of the mean
        for (int j = 0; j < 10; ++j) {
            for (double sign : {-1.0, 1.0}) {
                const double t = mid + sign * 0.5 * nodes[j];
                acc += 0.5 * weights[j] * std::exp(-t) * f(mean * t);
            }
        }
    }
    return acc;
}

// Closed-form detection companion for one channel at one threshold.
inline Probability channel_pd_theory(const ExperimentSpec& spec, std::size_t channel,
                                     double threshold) {
    const ChannelSpec& ch = spec.channels[channel];
    DetectorConfig cfg;
    cfg.n_samples = spec.n_samples;
    cfg.normalized = spec.normalized;
    cfg.threshold = threshold;
    if (ch.fading == Fading::Rayleigh) {
        // Average the fixed-SNR form over the exponential SNR density.
        return clamp01(exponential_average(ch.snr_linear(), [&](double gamma) {
            return pd_gaussian(cfg, ch.noise_power, ch.noise_power * gamma);
        }));
    }
    return pd_gaussian(cfg, ch.noise_power, ch.signal_power());
}

inline Probability channel_pf_theory(const ExperimentSpec& spec, std::size_t channel,
                                     double threshold) {
    DetectorConfig cfg;
    cfg.n_samples = spec.n_samples;
    cfg.normalized = spec.normalized;
    cfg.threshold = threshold;
    return pf_gaussian(cfg, spec.channels[channel].noise_power);
}

inline const ThresholdSweep& shared_sweep(const ExperimentSpec& spec) {
    if (spec.sweeps.empty())
        throw std::invalid_argument("cooperative run: threshold sweeps are required");
    for (const ThresholdSweep& s : spec.sweeps)
        if (!(s == spec.sweeps.front()))
            throw std::invalid_argument("cooperative run: all channels must share one threshold grid");
    return spec.sweeps.front();
}

}  // namespace detail

// Per-channel outcome of one trial at given thresholds.
struct TrialChannelOutcome {
    double noise_energy = 0.0;
    double total_energy = 0.0;
    LocalReport report = 0;  // signal-present world: total energy vs threshold
};

// One simulated trial: per channel, both energies plus the sensing report
// (the comparison of the signal-plus-noise energy against that channel's
// threshold). Deterministic in (spec, trial_index).
inline std::vector<TrialChannelOutcome> run_trial(const ExperimentSpec& spec,
                                                  const std::vector<double>& threshold_per_channel,
                                                  long trial_index) {
    spec.validate();
    if (threshold_per_channel.size() != spec.channels.size())
        throw std::domain_error("run_trial: one threshold per channel required");
    std::vector<TrialChannelOutcome> out(spec.channels.size());
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        const auto [e0, e1] = detail::trial_channel_energies(spec, c, trial_index);
        out[c] = {e0, e1, decide(e1, threshold_per_channel[c])};
    }
    return out;
}

// Single-user ROC sweep: one curve per channel over that channel's grid,
// with Gaussian-approximation theory companions.
inline std::vector<std::vector<CurvePoint>> run_single_user(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.rule.has_value())
        throw std::invalid_argument("run_single_user: fusion rule must be absent");
    if (spec.sweeps.empty())
        throw std::invalid_argument("run_single_user: threshold sweeps are required");

    const auto energies = detail::simulate_energies(spec);
    std::vector<std::vector<CurvePoint>> curves(spec.channels.size());

    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        for (double t : spec.sweeps[c].points()) {
            long fa = 0, det = 0;
            for (long trial = 0; trial < spec.n_trials; ++trial) {
                const int fa_bit = decide(energies[c].noise[trial], t);
                const int det_bit = decide(energies[c].total[trial], t);
                fa += fa_bit;
                det += (spec.counting == CountingMode::Standard)
                           ? det_bit
                           : (fa_bit == 0 && det_bit == 1);
            }
            CurvePoint p;
            p.threshold = t;
            p.pf_sim = static_cast<double>(fa) / static_cast<double>(spec.n_trials);
            p.pd_sim = static_cast<double>(det) / static_cast<double>(spec.n_trials);
            p.pf_theory = detail::channel_pf_theory(spec, c, t);
            p.pd_theory = detail::channel_pd_theory(spec, c, t);
            curves[c].push_back(p);
        }
    }
    return curves;
}

// Cooperative ROC sweep: all channels share one grid; per trial the
// channels' reports (after any attacker transformation) are fused, and the
// fused false-alarm / detection events are counted per the counting mode.
// Theory companions fuse the per-channel closed-form probabilities, after
// the same attacker transformation applied to the probabilities.
inline std::vector<CurvePoint> run_cooperative(const ExperimentSpec& spec) {
    spec.validate();
    if (!spec.rule.has_value())
        throw std::invalid_argument("run_cooperative: fusion rule is required");
    const FusionRule rule = *spec.rule;
    const ThresholdSweep& sweep = detail::shared_sweep(spec);
    rule.quorum(spec.channels.size());  // validate k against the user count

    const auto energies = detail::simulate_energies(spec);
    const std::size_t n_ch = spec.channels.size();
    std::vector<CurvePoint> curve;

    std::vector<LocalReport> h0_reports(n_ch), h1_reports(n_ch);
    for (double t : sweep.points()) {
        long fa = 0, det = 0;
        for (long trial = 0; trial < spec.n_trials; ++trial) {
            for (std::size_t c = 0; c < n_ch; ++c) {
                const int h0 = decide(energies[c].noise[trial], t);
                const int h1 = decide(energies[c].total[trial], t);
                const UserProfile prof = spec.profile_of(c);
                if (prof.kind == UserProfile::Kind::Honest) {
                    h0_reports[c] = h0;
                    h1_reports[c] = h1;
                } else {
                    // Recreated per threshold, so the lie draws of a trial are
                    // identical across the sweep: the attacker decides per
                    // sensing round, not per threshold. Idle world first.
                    SeededRng attacker_rng(
                        spec.seed, make_stream(static_cast<std::uint64_t>(trial), c,
                                               StreamPurpose::AttackerLies));
                    h0_reports[c] = apply_attacker(h0, prof, attacker_rng);
                    h1_reports[c] = apply_attacker(h1, prof, attacker_rng);
                }
            }
            const int fa_bit = fuse_reports(h0_reports, rule);
            const int det_bit = fuse_reports(h1_reports, rule);
            fa += fa_bit;
            det += (spec.counting == CountingMode::Standard)
                       ? det_bit
                       : (fa_bit == 0 && det_bit == 1);
        }

        std::vector<Probability> pf_users(n_ch), pd_users(n_ch);
        for (std::size_t c = 0; c < n_ch; ++c) {
            pf_users[c] = attacked_report_probability(detail::channel_pf_theory(spec, c, t),
                                                      spec.profile_of(c));
            pd_users[c] = attacked_report_probability(detail::channel_pd_theory(spec, c, t),
                                                      spec.profile_of(c));
        }

        CurvePoint p;
        p.threshold = t;
        p.pf_sim = static_cast<double>(fa) / static_cast<double>(spec.n_trials);
        p.pd_sim = static_cast<double>(det) / static_cast<double>(spec.n_trials);
        p.pf_theory = fused_probability(pf_users, rule);
        p.pd_theory = fused_probability(pd_users, rule);
        curve.push_back(p);
    }
    return curve;
}

// Closed-form curves only (no simulation): per channel for single-user
// specs, fused when a rule is present.
inline std::vector<std::vector<TheoryPoint>> theory_single_user(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.sweeps.empty())
        throw std::invalid_argument("theory curves: threshold sweeps are required");
    std::vector<std::vector<TheoryPoint>> curves(spec.channels.size());
    for (std::size_t c = 0; c < spec.channels.size(); ++c)
        for (double t : spec.sweeps[c].points())
            curves[c].push_back({t, detail::channel_pf_theory(spec, c, t),
                                 detail::channel_pd_theory(spec, c, t)});
    return curves;
}

inline std::vector<TheoryPoint> theory_cooperative(const ExperimentSpec& spec) {
    spec.validate();
    if (!spec.rule.has_value())
        throw std::invalid_argument("theory_cooperative: fusion rule is required");
    const ThresholdSweep& sweep = detail::shared_sweep(spec);
    std::vector<TheoryPoint> curve;
    for (double t : sweep.points()) {
        std::vector<Probability> pf_users(spec.channels.size()), pd_users(spec.channels.size());
        for (std::size_t c = 0; c < spec.channels.size(); ++c) {
            pf_users[c] = attacked_report_probability(detail::channel_pf_theory(spec, c, t),
                                                      spec.profile_of(c));
            pd_users[c] = attacked_report_probability(detail::channel_pd_theory(spec, c, t),
                                                      spec.profile_of(c));
        }
        curve.push_back({t, fused_probability(pf_users, *spec.rule),
                         fused_probability(pd_users, *spec.rule)});
    }
    return curve;
}

// Simulation-vs-theory deviation report. The error band is the worst-case
// binomial standard error sqrt(0.25 / n_trials) — the standard error of a
// rate estimated from n_trials Bernoulli trials, maximized over the rate —
// a conservative band that does not depend on the estimated value. Points
// whose |sim - theory| gap exceeds three bands are flagged.
struct DeviationReport {
    struct Row {
        double threshold = 0.0;
        double pf_gap = 0.0;
        double pd_gap = 0.0;
        double standard_error = 0.0;
        bool flagged = false;
    };
    std::vector<Row> rows;
    int flagged_count = 0;
};

inline DeviationReport compare_theory(const std::vector<CurvePoint>& points, long n_trials) {
    if (n_trials < 1) throw std::domain_error("compare_theory: n_trials must be at least 1");
    const double se = std::sqrt(0.25 / static_cast<double>(n_trials));
    DeviationReport report;
    for (const CurvePoint& p : points) {
        DeviationReport::Row row;
        row.threshold = p.threshold;
        row.pf_gap = std::fabs(p.pf_sim - p.pf_theory);
        row.pd_gap = std::fabs(p.pd_sim - p.pd_theory);
        row.standard_error = se;
        row.flagged = row.pf_gap > 3.0 * se || row.pd_gap > 3.0 * se;
        if (row.flagged) ++report.flagged_count;
        report.rows.push_back(row);
    }
    return report;
}

// Sequential-test experiment: per hypothesis, n_trials sequential tests are
// run at the fusion center over a round-robin stream of user reports (honest
// users report 1 with probability p_h1 / p_h0 per the true hypothesis;
// attacker profiles transform the stream), and the outcome rates and mean
// consumed report count are summarized.
struct SprtAttackSummary {
    struct Row {
        Hypothesis hypothesis = Hypothesis::H0;
        double accept_h1_rate = 0.0;
        double accept_h0_rate = 0.0;
        double undecided_rate = 0.0;
        double mean_reports = 0.0;
    };
    Row under_h0;
    Row under_h1;
};

inline SprtAttackSummary run_sprt_attack(const ExperimentSpec& spec, const SprtConfig& sprt) {
    spec.validate();
    sprt.validate();
    const std::size_t n_ch = spec.channels.size();

    auto run_world = [&](Hypothesis hyp) {
        const double p_true = hyp == Hypothesis::H1 ? sprt.p_h1 : sprt.p_h0;
        const StreamPurpose purpose =
            hyp == Hypothesis::H1 ? StreamPurpose::SignalFrame : StreamPurpose::NoiseFrame;
        SprtAttackSummary::Row row;
        row.hypothesis = hyp;
        long accept_h1 = 0, accept_h0 = 0, undecided = 0, consumed = 0;
        std::vector<LocalReport> stream(sprt.max_reports);
        for (long trial = 0; trial < spec.n_trials; ++trial) {
            const auto t = static_cast<std::uint64_t>(trial);
            std::vector<SeededRng> honest_rngs, attacker_rngs;
            for (std::size_t c = 0; c < n_ch; ++c) {
                honest_rngs.emplace_back(spec.seed, make_stream(t, c, purpose));
                attacker_rngs.emplace_back(spec.seed,
                                           make_stream(t, c, StreamPurpose::AttackerLies));
            }
            for (int r = 0; r < sprt.max_reports; ++r) {
                const std::size_t c = static_cast<std::size_t>(r) % n_ch;
                const LocalReport honest = honest_rngs[c].uniform() < p_true ? 1 : 0;
                stream[r] = apply_attacker(honest, spec.profile_of(c), attacker_rngs[c]);
            }
            const SprtOutcome outcome = sprt_run(stream, sprt);
            switch (outcome.kind) {
                case SprtOutcome::Kind::AcceptH1: ++accept_h1; break;
                case SprtOutcome::Kind::AcceptH0: ++accept_h0; break;
                case SprtOutcome::Kind::Undecided: ++undecided; break;
            }
            consumed += outcome.at;
        }
        const auto n = static_cast<double>(spec.n_trials);
        row.accept_h1_rate = accept_h1 / n;
        row.accept_h0_rate = accept_h0 / n;
        row.undecided_rate = undecided / n;
        row.mean_reports = consumed / n;
        return row;
    };

    SprtAttackSummary summary;
    summary.under_h0 = run_world(Hypothesis::H0);
    summary.under_h1 = run_world(Hypothesis::H1);
    return summary;
}

}  // namespace specsense
