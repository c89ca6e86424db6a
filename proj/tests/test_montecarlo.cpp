#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "specsense/montecarlo.hpp"

using Catch::Matchers::WithinAbs;
using namespace specsense;

namespace {

ExperimentSpec one_channel_spec() {
    ExperimentSpec spec;
    ChannelSpec ch;
    ch.snr_db = -8.0;
    spec.channels.push_back(ch);
    spec.sweeps.push_back({500.0, 900.0, 100.0});
    spec.n_trials = 300;
    spec.seed = 9;
    return spec;
}

}  // namespace

TEST_CASE("ThresholdSweep enumerates an inclusive grid") {
    const ThresholdSweep sweep{500.0, 900.0, 20.0};
    const std::vector<double> points = sweep.points();
    REQUIRE(points.size() == 21);
    REQUIRE(points.front() == 500.0);
    REQUIRE(points.back() == 900.0);

    REQUIRE_THROWS_AS((ThresholdSweep{500.0, 900.0, 0.0}.validate()), std::domain_error);
    REQUIRE_THROWS_AS((ThresholdSweep{900.0, 500.0, 20.0}.validate()), std::domain_error);
    REQUIRE_THROWS_AS((ThresholdSweep{0.0, 900.0, 20.0}.validate()), std::domain_error);
}

TEST_CASE("ExperimentSpec validation catches shape mismatches") {
    ExperimentSpec spec = one_channel_spec();
    REQUIRE_NOTHROW(spec.validate());

    spec.sweeps.push_back({1.0, 2.0, 1.0});
    REQUIRE_THROWS_AS(spec.validate(), std::domain_error);
    spec = one_channel_spec();
    spec.profiles = {UserProfile::Honest(), UserProfile::Honest()};
    REQUIRE_THROWS_AS(spec.validate(), std::domain_error);
    spec = one_channel_spec();
    spec.channels.clear();
    REQUIRE_THROWS_AS(spec.validate(), std::domain_error);
    spec = one_channel_spec();
    spec.n_trials = 0;
    REQUIRE_THROWS_AS(spec.validate(), std::domain_error);
}

TEST_CASE("run_trial is deterministic and respects thresholds") {
    const ExperimentSpec spec = one_channel_spec();
    const auto a = run_trial(spec, {700.0}, 17);
    const auto b = run_trial(spec, {700.0}, 17);
    REQUIRE(a.size() == 1);
    REQUIRE(a[0].noise_energy == b[0].noise_energy);
    REQUIRE(a[0].total_energy == b[0].total_energy);
    REQUIRE(a[0].report == b[0].report);
    REQUIRE(a[0].report == decide(a[0].total_energy, 700.0));
    // The signal frame only adds energy on top of the shared noise frame.
    REQUIRE(a[0].total_energy >= 0.0);
    REQUIRE(a[0].noise_energy >= 0.0);

    REQUIRE_THROWS_AS(run_trial(spec, {700.0, 800.0}, 17), std::domain_error);
}

TEST_CASE("run_single_user equals an explicit trial loop") {
    const ExperimentSpec spec = one_channel_spec();
    const auto curves = run_single_user(spec);
    REQUIRE(curves.size() == 1);
    REQUIRE(curves[0].size() == 5);

    for (const CurvePoint& point : curves[0]) {
        long fa = 0, det = 0;
        for (long trial = 0; trial < spec.n_trials; ++trial) {
            const auto outcome = run_trial(spec, {point.threshold}, trial);
            fa += decide(outcome[0].noise_energy, point.threshold);
            det += outcome[0].report;
        }
        REQUIRE(point.pf_sim == static_cast<double>(fa) / spec.n_trials);
        REQUIRE(point.pd_sim == static_cast<double>(det) / spec.n_trials);
    }
}

TEST_CASE("run_single_user rejects misshapen specs") {
    ExperimentSpec spec = one_channel_spec();
    spec.rule = FusionRule::Or();
    REQUIRE_THROWS_AS(run_single_user(spec), std::invalid_argument);
    spec = one_channel_spec();
    spec.sweeps.clear();
    REQUIRE_THROWS_AS(run_single_user(spec), std::invalid_argument);
}

TEST_CASE("conditional counting never exceeds standard counting") {
    ExperimentSpec spec = one_channel_spec();
    spec.n_trials = 500;
    const auto standard = run_single_user(spec);
    spec.counting = CountingMode::Conditional;
    const auto conditional = run_single_user(spec);

    for (std::size_t i = 0; i < standard[0].size(); ++i) {
        REQUIRE(conditional[0][i].pf_sim == standard[0][i].pf_sim);
        REQUIRE(conditional[0][i].pd_sim <= standard[0][i].pd_sim);
        // Detections and false alarms are disjoint events per trial here.
        REQUIRE(conditional[0][i].pd_sim <= 1.0 - conditional[0][i].pf_sim + 1e-15);
    }
}

TEST_CASE("fused curve with one user equals its single-user curve") {
    ExperimentSpec spec = one_channel_spec();
    spec.n_trials = 400;
    const auto single = run_single_user(spec);
    spec.rule = FusionRule::Or();
    const auto fused = run_cooperative(spec);

    REQUIRE(fused.size() == single[0].size());
    for (std::size_t i = 0; i < fused.size(); ++i) {
        REQUIRE(fused[i].pf_sim == single[0][i].pf_sim);
        REQUIRE(fused[i].pd_sim == single[0][i].pd_sim);
        REQUIRE_THAT(fused[i].pf_theory, WithinAbs(single[0][i].pf_theory, 1e-15));
        REQUIRE_THAT(fused[i].pd_theory, WithinAbs(single[0][i].pd_theory, 1e-15));
    }
}

TEST_CASE("run_cooperative validates its spec") {
    ExperimentSpec spec = one_channel_spec();
    REQUIRE_THROWS_AS(run_cooperative(spec), std::invalid_argument);  // no rule

    spec.rule = FusionRule::Or();
    spec.channels.push_back(spec.channels[0]);
    spec.sweeps.push_back({100.0, 200.0, 50.0});  // mismatched grid
    REQUIRE_THROWS_AS(run_cooperative(spec), std::invalid_argument);

    spec.sweeps[1] = spec.sweeps[0];
    spec.rule = FusionRule::KRank(3);  // quorum above the user count
    REQUIRE_THROWS_AS(run_cooperative(spec), std::domain_error);
}

TEST_CASE("cooperative theory companions fuse the per-user closed forms") {
    ExperimentSpec spec = one_channel_spec();
    spec.channels.push_back(spec.channels[0]);
    spec.channels.push_back(spec.channels[0]);
    spec.sweeps = {spec.sweeps[0], spec.sweeps[0], spec.sweeps[0]};
    spec.n_trials = 50;
    spec.rule = FusionRule::KRank(2);

    DetectorConfig cfg;
    cfg.n_samples = spec.n_samples;

    const auto curve = run_cooperative(spec);
    for (const CurvePoint& point : curve) {
        cfg.threshold = point.threshold;
        const double pf1 = pf_gaussian(cfg, spec.channels[0].noise_power);
        const double pd1 = pd_gaussian(cfg, spec.channels[0].noise_power,
                                       spec.channels[0].signal_power());
        const std::vector<Probability> pf{pf1, pf1, pf1};
        const std::vector<Probability> pd{pd1, pd1, pd1};
        REQUIRE_THAT(point.pf_theory,
                     WithinAbs(fused_probability(pf, *spec.rule), 1e-15));
        REQUIRE_THAT(point.pd_theory,
                     WithinAbs(fused_probability(pd, *spec.rule), 1e-15));
    }
}

TEST_CASE("attacker profiles shift both simulation and theory") {
    ExperimentSpec spec = one_channel_spec();
    spec.channels.push_back(spec.channels[0]);
    spec.channels.push_back(spec.channels[0]);
    spec.sweeps = {spec.sweeps[0], spec.sweeps[0], spec.sweeps[0]};
    spec.n_trials = 400;
    spec.rule = FusionRule::Or();
    const auto honest = run_cooperative(spec);

    spec.profiles = {UserProfile::Honest(), UserProfile::Honest(), UserProfile::AlwaysBusy()};
    const auto attacked = run_cooperative(spec);

    for (std::size_t i = 0; i < honest.size(); ++i) {
        // A stuck-busy user forces the Or decision to 1 in every world.
        REQUIRE(attacked[i].pf_sim == 1.0);
        REQUIRE(attacked[i].pd_sim == 1.0);
        REQUIRE(attacked[i].pf_theory == 1.0);
        REQUIRE(attacked[i].pd_theory == 1.0);
        REQUIRE(honest[i].pf_theory < 1.0);
    }
}

TEST_CASE("rayleigh channels average the fixed-SNR detection form") {
    // The quadrature identity: integrating against the exponential density
    // reproduces simple closed forms.
    REQUIRE_THAT(detail::exponential_average(0.7, [](double) { return 1.0; }),
                 WithinAbs(1.0, 1e-13));
    REQUIRE_THAT(detail::exponential_average(0.7, [](double g) { return g; }),
                 WithinAbs(0.7, 1e-13));
    // E[exp(-g)] = 1 / (1 + mean) for an exponential.
    REQUIRE_THAT(detail::exponential_average(0.7, [](double g) { return std::exp(-g); }),
                 WithinAbs(1.0 / 1.7, 1e-13));

    ExperimentSpec spec = one_channel_spec();
    spec.channels[0].fading = Fading::Rayleigh;
    spec.n_trials = 2000;
    const auto curves = run_single_user(spec);
    const double band = 3.0 * std::sqrt(0.25 / 2000.0);
    for (const CurvePoint& point : curves[0]) {
        // Fading leaves the noise-only world untouched.
        DetectorConfig cfg;
        cfg.n_samples = spec.n_samples;
        cfg.threshold = point.threshold;
        REQUIRE_THAT(point.pf_theory, WithinAbs(pf_gaussian(cfg, 4.0), 1e-15));
        // Simulated detection tracks the averaged closed form.
        REQUIRE_THAT(point.pd_sim, WithinAbs(point.pd_theory, band));
    }
}

TEST_CASE("compare_theory flags only gaps beyond three worst-case errors") {
    std::vector<CurvePoint> points;
    points.push_back({500.0, 0.52, 0.9, 0.5, 0.9});   // gap 0.02
    points.push_back({520.0, 0.5, 0.58, 0.5, 0.9});   // gap 0.32
    points.push_back({540.0, 0.5, 0.9, 0.5, 0.9});    // gap 0
    const DeviationReport report = compare_theory(points, 100);
    // Band is 3 * sqrt(0.25 / 100) = 0.15.
    REQUIRE(report.rows.size() == 3);
    REQUIRE_THAT(report.rows[0].standard_error, WithinAbs(0.05, 1e-15));
    REQUIRE(!report.rows[0].flagged);
    REQUIRE(report.rows[1].flagged);
    REQUIRE(!report.rows[2].flagged);
    REQUIRE(report.flagged_count == 1);

    REQUIRE_THROWS_AS(compare_theory(points, 0), std::domain_error);
}

TEST_CASE("sequential attack experiment summarizes both hypotheses") {
    ExperimentSpec spec;
    for (int i = 0; i < 5; ++i) {
        ChannelSpec ch;
        ch.snr_db = -8.0;
        spec.channels.push_back(ch);
    }
    spec.n_trials = 2000;
    spec.seed = 3;

    SprtConfig sprt;
    sprt.alpha = 0.1;
    sprt.beta = 0.1;
    sprt.p_h1 = 2.0 / 3.0;
    sprt.p_h0 = 1.0 / 3.0;

    const SprtAttackSummary honest = run_sprt_attack(spec, sprt);
    for (const auto& row : {honest.under_h0, honest.under_h1}) {
        REQUIRE_THAT(row.accept_h1_rate + row.accept_h0_rate + row.undecided_rate,
                     WithinAbs(1.0, 1e-12));
        REQUIRE(row.mean_reports >= 1.0);
        REQUIRE(row.mean_reports <= sprt.max_reports);
    }
    // Errors should be in the neighborhood of the design point or below.
    REQUIRE(honest.under_h0.accept_h1_rate <= 0.12);  // false alarm
    REQUIRE(honest.under_h1.accept_h0_rate <= 0.12);  // miss

    // A stuck-free user starves the statistic of ones: more H0 acceptances
    // under H1 than with honest users.
    spec.profiles = std::vector<UserProfile>(5, UserProfile::Honest());
    spec.profiles[4] = UserProfile::AlwaysFree();
    const SprtAttackSummary attacked = run_sprt_attack(spec, sprt);
    REQUIRE(attacked.under_h1.accept_h0_rate > honest.under_h1.accept_h0_rate);
}
