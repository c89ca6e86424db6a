#pragma once

// Multi-user decision fusion at the fusion center: hard-decision rules
// (AND / OR / K-rank voting) over 1-bit reports and over per-user
// probabilities, sequential probability ratio soft fusion, spectrum-sensing
// data-falsification attacker models, and feedback-based reputation scores.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "specsense/energy_detector.hpp"
#include "specsense/rng.hpp"

namespace specsense {

enum class FusionRuleKind { And, Or, KRank };

// Fusion rule: And = every user, Or = any user, KRank(k) = at least k users.
struct FusionRule {
    FusionRuleKind kind = FusionRuleKind::Or;
    int k = 0;  // quorum, KRank only

    static FusionRule And() { return {FusionRuleKind::And, 0}; }
    static FusionRule Or() { return {FusionRuleKind::Or, 0}; }
    static FusionRule KRank(int k) { return {FusionRuleKind::KRank, k}; }

    // Effective quorum for n users; validates KRank's 1 <= k <= n.
    int quorum(std::size_t n_users) const {
        if (n_users == 0) throw std::domain_error("FusionRule: no users to fuse");
        switch (kind) {
            case FusionRuleKind::And: return static_cast<int>(n_users);
            case FusionRuleKind::Or: return 1;
            case FusionRuleKind::KRank:
                if (k < 1 || static_cast<std::size_t>(k) > n_users)
                    throw std::domain_error("FusionRule: KRank k must satisfy 1 <= k <= n_users");
                return k;
        }
        throw std::domain_error("FusionRule: unknown rule kind");
    }
};

// A user's reporting behavior: honest, or one of the data-falsification
// attacks (report stuck busy, stuck free, or flipped with a lie probability).
struct UserProfile {
    enum class Kind { Honest, AlwaysBusy, AlwaysFree, Intermittent };
    Kind kind = Kind::Honest;
    double lie_probability = 0.0;  // Intermittent only

    static UserProfile Honest() { return {Kind::Honest, 0.0}; }
    static UserProfile AlwaysBusy() { return {Kind::AlwaysBusy, 0.0}; }
    static UserProfile AlwaysFree() { return {Kind::AlwaysFree, 0.0}; }
    static UserProfile Intermittent(double lie_probability) {
        return {Kind::Intermittent, lie_probability};
    }

    void validate() const {
        if (!(lie_probability >= 0.0 && lie_probability <= 1.0))
            throw std::domain_error("UserProfile: lie_probability must lie in [0, 1]");
    }
};

// Sequential test parameters: target error rates and the two Bernoulli
// report models P(report = 1 | H1) = p_h1, P(report = 1 | H0) = p_h0.
struct SprtConfig {
    double alpha = 0.1;
    double beta = 0.1;
    double p_h1 = 0.0;
    double p_h0 = 0.0;
    int max_reports = 100;

    double upper_boundary() const { return (1.0 - beta) / alpha; }
    double lower_boundary() const { return beta / (1.0 - alpha); }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 0.5))
            throw std::domain_error("SprtConfig: alpha must lie inside (0, 0.5)");
        if (!(beta > 0.0 && beta < 0.5))
            throw std::domain_error("SprtConfig: beta must lie inside (0, 0.5)");
        if (!(p_h0 > 0.0 && p_h1 < 1.0 && p_h0 < p_h1))
            throw std::domain_error("SprtConfig: need 0 < p_h0 < p_h1 < 1");
        if (max_reports < 1)
            throw std::domain_error("SprtConfig: max_reports must be at least 1");
    }
};

// Affirmation/complaint counters with a Laplace-smoothed trust score:
// trust = (affirmations + 1) / (affirmations + complaints + 2), so a fresh
// user scores 0.5 and trust stays strictly inside (0, 1).
struct Reputation {
    std::int64_t affirmations = 0;
    std::int64_t complaints = 0;

    double trust() const {
        return static_cast<double>(affirmations + 1) /
               static_cast<double>(affirmations + complaints + 2);
    }
};

namespace detail {
inline void check_report_bits(const std::vector<LocalReport>& reports) {
    if (reports.empty()) throw std::domain_error("fusion: report sequence is empty");
    for (LocalReport r : reports)
        if (r != 0 && r != 1)
            throw std::domain_error("fusion: reports must be 0 or 1");
}

inline void check_probabilities(const std::vector<Probability>& probs) {
    if (probs.empty()) throw std::domain_error("fusion: probability sequence is empty");
    for (Probability p : probs)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("fusion: probabilities must lie in [0, 1]");
}
}  // namespace detail

// Hard-decision fusion of 1-bit reports: 1 iff at least `quorum` users say 1.
inline int fuse_reports(const std::vector<LocalReport>& reports, const FusionRule& rule) {
    detail::check_report_bits(reports);
    const int quorum = rule.quorum(reports.size());
    int votes = 0;
    for (LocalReport r : reports) votes += r;
    return votes >= quorum ? 1 : 0;
}

// Probability that the fused decision is 1 when user i reports 1
// independently with probability per_user_probs[i].
//   And:   product of p_i
//   Or:    1 - product of (1 - p_i)
//   KRank: tail of the Poisson-binomial count, P(sum >= k)
// KRank(1) and KRank(n) evaluate the Or/And products directly so the
// boundary equivalences hold exactly, not merely within rounding.
inline Probability fused_probability(const std::vector<Probability>& per_user_probs,
                                     const FusionRule& rule) {
    detail::check_probabilities(per_user_probs);
    const std::size_t n = per_user_probs.size();
    const int quorum = rule.quorum(n);

    if (quorum == static_cast<int>(n)) {
        double prod = 1.0;
        for (Probability p : per_user_probs) prod *= p;
        return clamp01(prod);
    }
    if (quorum == 1) {
        double prod = 1.0;
        for (Probability p : per_user_probs) prod *= 1.0 - p;
        return clamp01(1.0 - prod);
    }

    // dp[j] = P(exactly j of the users processed so far report 1).
    std::vector<double> dp(n + 1, 0.0);
    dp[0] = 1.0;
    std::size_t seen = 0;
    for (Probability p : per_user_probs) {
        ++seen;
        for (std::size_t j = seen; j > 0; --j)
            dp[j] = dp[j] * (1.0 - p) + dp[j - 1] * p;
        dp[0] *= 1.0 - p;
    }
    double tail = 0.0;
    for (std::size_t j = static_cast<std::size_t>(quorum); j <= n; ++j) tail += dp[j];
    return clamp01(tail);
}

// Reference implementation of fused_probability by exhaustive enumeration of
// all 2^n report vectors through fuse_reports. Exponential; refuses n > 20.
inline Probability brute_force_fused_probability(
    const std::vector<Probability>& per_user_probs, const FusionRule& rule) {
    detail::check_probabilities(per_user_probs);
    const std::size_t n = per_user_probs.size();
    if (n > 20)
        throw std::length_error(
            "brute_force_fused_probability: enumeration capped at 20 users");
    rule.quorum(n);  // validate k before the loop

    double total = 0.0;
    std::vector<LocalReport> bits(n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        double weight = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool one = (mask >> i) & 1u;
            bits[i] = one ? 1 : 0;
            weight *= one ? per_user_probs[i] : 1.0 - per_user_probs[i];
        }
        if (fuse_reports(bits, rule) == 1) total += weight;
    }
    return clamp01(total);
}

// Outcome of a sequential probability ratio test. `at` is the number of
// reports consumed when the boundary was crossed (Undecided: all consumed).
struct SprtOutcome {
    enum class Kind { AcceptH1, AcceptH0, Undecided };
    Kind kind = Kind::Undecided;
    int at = 0;
    double statistic = 1.0;  // final likelihood-ratio product
};

// Wald sequential test over 1-bit reports. The running statistic is the
// likelihood-ratio product S_n = prod_i P(d_i|H1)/P(d_i|H0); accept H1 when
// S_n >= (1-beta)/alpha, accept H0 when S_n <= beta/(1-alpha), and report
// Undecided if neither boundary is hit within max_reports (or the input).
inline SprtOutcome sprt_run(const std::vector<LocalReport>& reports,
                            const SprtConfig& config) {
    config.validate();
    detail::check_report_bits(reports);
    const double up = config.upper_boundary();
    const double low = config.lower_boundary();
    const double ratio_one = config.p_h1 / config.p_h0;
    const double ratio_zero = (1.0 - config.p_h1) / (1.0 - config.p_h0);

    const std::size_t limit =
        std::min(reports.size(), static_cast<std::size_t>(config.max_reports));
    double s = 1.0;
    for (std::size_t i = 0; i < limit; ++i) {
        s *= reports[i] ? ratio_one : ratio_zero;
        const int consumed = static_cast<int>(i) + 1;
        if (s >= up) return {SprtOutcome::Kind::AcceptH1, consumed, s};
        if (s <= low) return {SprtOutcome::Kind::AcceptH0, consumed, s};
    }
    return {SprtOutcome::Kind::Undecided, static_cast<int>(limit), s};
}

// What the fusion center actually receives from a user with the given
// profile. Intermittent consumes exactly one uniform per call whatever the
// lie probability, so draw streams stay aligned across parameter changes.
inline LocalReport apply_attacker(LocalReport true_report, const UserProfile& profile,
                                  SeededRng& rng) {
    if (true_report != 0 && true_report != 1)
        throw std::domain_error("apply_attacker: report must be 0 or 1");
    profile.validate();
    switch (profile.kind) {
        case UserProfile::Kind::Honest: return true_report;
        case UserProfile::Kind::AlwaysBusy: return 1;
        case UserProfile::Kind::AlwaysFree: return 0;
        case UserProfile::Kind::Intermittent: {
            const bool lie = rng.uniform() < profile.lie_probability;
            return lie ? 1 - true_report : true_report;
        }
    }
    throw std::domain_error("apply_attacker: unknown profile kind");
}

// Per-user probability of reporting 1 after the profile's transformation,
// given the honest report rate p. Used for theory companions under attack.
inline Probability attacked_report_probability(Probability p, const UserProfile& profile) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("attacked_report_probability: p must lie in [0, 1]");
    profile.validate();
    switch (profile.kind) {
        case UserProfile::Kind::Honest: return p;
        case UserProfile::Kind::AlwaysBusy: return 1.0;
        case UserProfile::Kind::AlwaysFree: return 0.0;
        case UserProfile::Kind::Intermittent: {
            const double q = profile.lie_probability;
            return clamp01(p * (1.0 - q) + (1.0 - p) * q);
        }
    }
    throw std::domain_error("attacked_report_probability: unknown profile kind");
}

// Feedback update: a report matching the fused decision earns an
// affirmation, a mismatch earns a complaint. Returns the new value.
inline Reputation update_reputation(Reputation rep, LocalReport report, int fused_decision) {
    if (report != 0 && report != 1)
        throw std::domain_error("update_reputation: report must be 0 or 1");
    if (fused_decision != 0 && fused_decision != 1)
        throw std::domain_error("update_reputation: fused decision must be 0 or 1");
    if (report == fused_decision)
        ++rep.affirmations;
    else
        ++rep.complaints;
    return rep;
}

// Fusion that ignores users whose trust is below the floor. A KRank quorum
// larger than the surviving user count is clipped down to it; excluding
// every user is a degenerate quorum and an error.
inline int fuse_with_trust(const std::vector<LocalReport>& reports,
                           const std::vector<Reputation>& reputations,
                           const FusionRule& rule, Probability trust_floor) {
    detail::check_report_bits(reports);
    if (reports.size() != reputations.size())
        throw std::domain_error("fuse_with_trust: reports and reputations differ in length");
    if (!(trust_floor >= 0.0 && trust_floor <= 1.0))
        throw std::domain_error("fuse_with_trust: trust_floor must lie in [0, 1]");

    std::vector<LocalReport> trusted;
    trusted.reserve(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i)
        if (reputations[i].trust() >= trust_floor) trusted.push_back(reports[i]);
    if (trusted.empty())
        throw std::runtime_error("fuse_with_trust: trust floor excludes every user (degenerate quorum)");

    FusionRule effective = rule;
    if (rule.kind == FusionRuleKind::KRank && static_cast<std::size_t>(rule.k) > trusted.size())
        effective.k = static_cast<int>(trusted.size());
    return fuse_reports(trusted, effective);
}

}  // namespace specsense
