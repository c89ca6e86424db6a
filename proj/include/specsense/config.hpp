#pragma once

// Experiment configuration: a strict, flat INI-style text format.
//
//   # comment
//   [experiment]
//   mode = single_user            # single_user | cooperative | sprt_attack | theory_only
//   output_path = roc.csv
//   n_trials = 5000
//   n_samples = 100
//   seed = 1
//   counting = standard           # standard | conditional
//   normalized = false
//   noise_power = 4               # default for channels that do not override
//   rule = krank                  # and | or | krank   (cooperative modes)
//   k = 2                         # krank quorum
//   threshold_start = 500         # shared sweep, channels may override
//   threshold_stop = 900
//   threshold_step = 20
//
//   [channel.1]                   # numbered 1..N, contiguous
//   snr_db = -8
//   noise_power = 4               # optional override
//   fading = awgn                 # awgn | rayleigh (snr_db is then the mean)
//   profile = honest              # honest | always_busy | always_free | intermittent
//   lie_probability = 0.3         # intermittent only
//   threshold_start = 500         # optional per-channel sweep
//   threshold_stop = 900
//   threshold_step = 20
//
//   [sprt]                        # sprt_attack mode
//   alpha = 0.1
//   beta = 0.1
//   p_h1 = 0.6667
//   p_h0 = 0.3333
//   max_reports = 100
//
// Unknown keys and sections are rejected by name, duplicate keys are errors,
// and every value must parse completely (no trailing junk). Parse errors
// carry the line number; validation errors name the offending field.

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "specsense/montecarlo.hpp"

namespace specsense {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { SingleUser, Cooperative, SprtAttack, TheoryOnly };

struct RunConfig {
    RunMode mode = RunMode::SingleUser;
    ExperimentSpec experiment;
    std::string output_path;
    std::optional<SprtConfig> sprt;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view value, const std::string& field) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw config_error("validation error: field '" + field + "' has a malformed number '" +
                           std::string(value) + "'");
    return out;
}

inline bool parse_bool(std::string_view value, const std::string& field) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw config_error("validation error: field '" + field + "' must be 'true' or 'false'");
}

// Raw key/value storage for one section, remembering line numbers.
struct Section {
    std::map<std::string, std::string, std::less<>> values;
    std::map<std::string, int, std::less<>> lines;
};

struct RawConfig {
    Section experiment;
    std::map<int, Section> channels;
    std::optional<Section> sprt;
};

inline RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    Section* current = nullptr;
    std::string current_name;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;

        if (body.front() == '[') {
            if (body.back() != ']')
                throw config_error("parse error: line " + std::to_string(line_no) +
                                   ": unterminated section header");
            const std::string name(trim(body.substr(1, body.size() - 2)));
            if (name == "experiment") {
                current = &raw.experiment;
            } else if (name == "sprt") {
                if (raw.sprt.has_value())
                    throw config_error("parse error: line " + std::to_string(line_no) +
                                       ": duplicate section [sprt]");
                raw.sprt.emplace();
                current = &*raw.sprt;
            } else if (name.starts_with("channel.")) {
                const std::string index_text = name.substr(8);
                int index = 0;
                const auto [ptr, ec] =
                    std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
                if (ec != std::errc{} || ptr != index_text.data() + index_text.size() || index < 1)
                    throw config_error("parse error: line " + std::to_string(line_no) +
                                       ": bad channel number in [" + name + "]");
                if (raw.channels.count(index))
                    throw config_error("parse error: line " + std::to_string(line_no) +
                                       ": duplicate section [" + name + "]");
                current = &raw.channels[index];
            } else {
                throw config_error("parse error: line " + std::to_string(line_no) +
                                   ": unknown section [" + name + "]");
            }
            current_name = name;
            continue;
        }

        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw config_error("parse error: line " + std::to_string(line_no) +
                               ": expected 'key = value'");
        if (current == nullptr)
            throw config_error("parse error: line " + std::to_string(line_no) +
                               ": key outside any section");
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (key.empty())
            throw config_error("parse error: line " + std::to_string(line_no) + ": empty key");
        if (current->values.count(key))
            throw config_error("parse error: line " + std::to_string(line_no) +
                               ": duplicate key '" + key + "' in [" + current_name + "]");
        current->values[key] = value;
        current->lines[key] = line_no;
    }
    return raw;
}

// Typed accessor over one section that tracks which keys were consumed, so
// leftovers can be rejected by name.
class SectionReader {
  public:
    SectionReader(const Section& section, std::string name)
        : section_(section), name_(std::move(name)) {}

    std::optional<std::string> take(const std::string& key) {
        const auto it = section_.values.find(key);
        if (it == section_.values.end()) return std::nullopt;
        consumed_.push_back(key);
        return it->second;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : section_.values) {
            bool used = false;
            for (const std::string& k : consumed_)
                if (k == key) used = true;
            if (!used)
                throw config_error("parse error: line " +
                                   std::to_string(section_.lines.at(key)) + ": unknown key '" +
                                   key + "' in [" + name_ + "]");
        }
    }

  private:
    const Section& section_;
    std::string name_;
    std::vector<std::string> consumed_;
};

inline void require(bool ok, const std::string& message) {
    if (!ok) throw config_error("validation error: " + message);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    using detail::parse_bool;
    using detail::parse_number;

    const detail::RawConfig raw = detail::tokenize(text);
    RunConfig config;

    // --- [experiment] ---
    detail::SectionReader exp(raw.experiment, "experiment");

    const auto mode_text = exp.take("mode");
    detail::require(mode_text.has_value(), "field 'mode' is required in [experiment]");
    if (*mode_text == "single_user") config.mode = RunMode::SingleUser;
    else if (*mode_text == "cooperative") config.mode = RunMode::Cooperative;
    else if (*mode_text == "sprt_attack") config.mode = RunMode::SprtAttack;
    else if (*mode_text == "theory_only") config.mode = RunMode::TheoryOnly;
    else throw config_error("validation error: field 'mode' has unknown value '" + *mode_text + "'");

    const auto output_text = exp.take("output_path");
    detail::require(output_text.has_value(), "field 'output_path' is required in [experiment]");
    config.output_path = *output_text;

    ExperimentSpec& spec = config.experiment;
    if (const auto v = exp.take("n_trials")) spec.n_trials = parse_number<long>(*v, "n_trials");
    if (const auto v = exp.take("n_samples")) spec.n_samples = parse_number<int>(*v, "n_samples");
    if (const auto v = exp.take("seed")) spec.seed = parse_number<std::uint64_t>(*v, "seed");
    if (const auto v = exp.take("normalized")) spec.normalized = parse_bool(*v, "normalized");

    double default_noise_power = 4.0;
    if (const auto v = exp.take("noise_power"))
        default_noise_power = parse_number<double>(*v, "noise_power");

    if (const auto v = exp.take("counting")) {
        if (*v == "standard") spec.counting = CountingMode::Standard;
        else if (*v == "conditional") spec.counting = CountingMode::Conditional;
        else throw config_error("validation error: field 'counting' has unknown value '" + *v + "'");
    }

    const auto rule_text = exp.take("rule");
    const auto k_text = exp.take("k");
    if (rule_text.has_value()) {
        if (*rule_text == "and") spec.rule = FusionRule::And();
        else if (*rule_text == "or") spec.rule = FusionRule::Or();
        else if (*rule_text == "krank") {
            detail::require(k_text.has_value(), "field 'k' is required when rule = krank");
            spec.rule = FusionRule::KRank(parse_number<int>(*k_text, "k"));
        } else {
            throw config_error("validation error: field 'rule' has unknown value '" + *rule_text + "'");
        }
        detail::require(*rule_text == "krank" || !k_text.has_value(),
                        "field 'k' is only valid when rule = krank");
    } else {
        detail::require(!k_text.has_value(), "field 'k' is only valid when rule = krank");
    }

    std::optional<ThresholdSweep> shared_sweep;
    {
        const auto start = exp.take("threshold_start");
        const auto stop = exp.take("threshold_stop");
        const auto step = exp.take("threshold_step");
        if (start || stop || step) {
            detail::require(start.has_value(), "field 'threshold_start' missing in [experiment]");
            detail::require(stop.has_value(), "field 'threshold_stop' missing in [experiment]");
            detail::require(step.has_value(), "field 'threshold_step' missing in [experiment]");
            shared_sweep = ThresholdSweep{parse_number<double>(*start, "threshold_start"),
                                          parse_number<double>(*stop, "threshold_stop"),
                                          parse_number<double>(*step, "threshold_step")};
        }
    }
    exp.reject_unknown();

    // --- [channel.N] ---
    detail::require(!raw.channels.empty(), "at least one [channel.N] section is required");
    int expected = 1;
    for (const auto& [index, section] : raw.channels) {
        detail::require(index == expected,
                        "channel sections must be numbered contiguously from 1; missing [channel." +
                            std::to_string(expected) + "]");
        ++expected;

        detail::SectionReader ch(section, "channel." + std::to_string(index));
        ChannelSpec channel;
        channel.noise_power = default_noise_power;

        const auto snr = ch.take("snr_db");
        detail::require(snr.has_value(),
                        "field 'snr_db' is required in [channel." + std::to_string(index) + "]");
        channel.snr_db = parse_number<double>(*snr, "snr_db");
        if (const auto v = ch.take("noise_power"))
            channel.noise_power = parse_number<double>(*v, "noise_power");
        if (const auto v = ch.take("fading")) {
            if (*v == "awgn") channel.fading = Fading::Awgn;
            else if (*v == "rayleigh") channel.fading = Fading::Rayleigh;
            else throw config_error("validation error: field 'fading' has unknown value '" + *v + "'");
        }

        UserProfile profile = UserProfile::Honest();
        const auto profile_text = ch.take("profile");
        const auto lie_text = ch.take("lie_probability");
        if (profile_text.has_value()) {
            if (*profile_text == "honest") profile = UserProfile::Honest();
            else if (*profile_text == "always_busy") profile = UserProfile::AlwaysBusy();
            else if (*profile_text == "always_free") profile = UserProfile::AlwaysFree();
            else if (*profile_text == "intermittent") {
                detail::require(lie_text.has_value(),
                                "field 'lie_probability' is required when profile = intermittent");
                profile = UserProfile::Intermittent(
                    parse_number<double>(*lie_text, "lie_probability"));
            } else {
                throw config_error("validation error: field 'profile' has unknown value '" +
                                   *profile_text + "'");
            }
        }
        detail::require(profile.kind == UserProfile::Kind::Intermittent || !lie_text.has_value(),
                        "field 'lie_probability' is only valid when profile = intermittent");

        std::optional<ThresholdSweep> sweep = shared_sweep;
        {
            const auto start = ch.take("threshold_start");
            const auto stop = ch.take("threshold_stop");
            const auto step = ch.take("threshold_step");
            if (start || stop || step) {
                detail::require(start.has_value(), "field 'threshold_start' missing in [channel." +
                                                       std::to_string(index) + "]");
                detail::require(stop.has_value(), "field 'threshold_stop' missing in [channel." +
                                                      std::to_string(index) + "]");
                detail::require(step.has_value(), "field 'threshold_step' missing in [channel." +
                                                      std::to_string(index) + "]");
                sweep = ThresholdSweep{parse_number<double>(*start, "threshold_start"),
                                       parse_number<double>(*stop, "threshold_stop"),
                                       parse_number<double>(*step, "threshold_step")};
            }
        }
        ch.reject_unknown();

        if (config.mode != RunMode::SprtAttack) {
            detail::require(sweep.has_value(),
                            "field 'threshold_start/stop/step' missing for [channel." +
                                std::to_string(index) + "] (no shared sweep in [experiment])");
            spec.sweeps.push_back(*sweep);
        } else if (sweep.has_value()) {
            spec.sweeps.push_back(*sweep);
        }
        spec.channels.push_back(channel);
        spec.profiles.push_back(profile);
    }

    // Drop the all-honest profile vector so specs compare equal to handwritten ones.
    if (!spec.has_attackers()) spec.profiles.clear();

    // --- [sprt] ---
    if (raw.sprt.has_value()) {
        detail::SectionReader sp(*raw.sprt, "sprt");
        SprtConfig sprt;
        const auto alpha = sp.take("alpha");
        const auto beta = sp.take("beta");
        const auto p1 = sp.take("p_h1");
        const auto p0 = sp.take("p_h0");
        detail::require(alpha.has_value(), "field 'alpha' is required in [sprt]");
        detail::require(beta.has_value(), "field 'beta' is required in [sprt]");
        detail::require(p1.has_value(), "field 'p_h1' is required in [sprt]");
        detail::require(p0.has_value(), "field 'p_h0' is required in [sprt]");
        sprt.alpha = parse_number<double>(*alpha, "alpha");
        sprt.beta = parse_number<double>(*beta, "beta");
        sprt.p_h1 = parse_number<double>(*p1, "p_h1");
        sprt.p_h0 = parse_number<double>(*p0, "p_h0");
        if (const auto v = sp.take("max_reports"))
            sprt.max_reports = parse_number<int>(*v, "max_reports");
        sp.reject_unknown();
        config.sprt = sprt;
    }

    // --- cross-field validation (names the field, no line numbers) ---
    try {
        config.experiment.validate();
        if (config.sprt) config.sprt->validate();
    } catch (const std::domain_error& e) {
        throw config_error(std::string("validation error: ") + e.what());
    }
    switch (config.mode) {
        case RunMode::SingleUser:
            detail::require(!spec.rule.has_value(),
                            "field 'rule' must be absent when mode = single_user");
            break;
        case RunMode::Cooperative:
            detail::require(spec.rule.has_value(),
                            "field 'rule' is required when mode = cooperative");
            for (const ThresholdSweep& sweep : spec.sweeps)
                detail::require(sweep == spec.sweeps.front(),
                                "field 'threshold_start/stop/step' must be identical across "
                                "channels when mode = cooperative");
            if (spec.rule->kind == FusionRuleKind::KRank) {
                try {
                    spec.rule->quorum(spec.channels.size());
                } catch (const std::domain_error& e) {
                    throw config_error(std::string("validation error: field 'k': ") + e.what());
                }
            }
            break;
        case RunMode::SprtAttack:
            detail::require(config.sprt.has_value(),
                            "section [sprt] is required when mode = sprt_attack");
            break;
        case RunMode::TheoryOnly:
            break;
    }
    return config;
}

namespace detail {

// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

}  // namespace detail

// Canonical text form with every default filled in; parse(serialize(c))
// reproduces c field for field.
inline std::string serialize_config(const RunConfig& config) {
    using detail::format_double;
    std::ostringstream out;
    out.imbue(std::locale::classic());
    const ExperimentSpec& spec = config.experiment;

    const char* mode = "single_user";
    switch (config.mode) {
        case RunMode::SingleUser: mode = "single_user"; break;
        case RunMode::Cooperative: mode = "cooperative"; break;
        case RunMode::SprtAttack: mode = "sprt_attack"; break;
        case RunMode::TheoryOnly: mode = "theory_only"; break;
    }
    out << "[experiment]\n";
    out << "mode = " << mode << "\n";
    out << "output_path = " << config.output_path << "\n";
    out << "n_trials = " << spec.n_trials << "\n";
    out << "n_samples = " << spec.n_samples << "\n";
    out << "seed = " << spec.seed << "\n";
    out << "counting = "
        << (spec.counting == CountingMode::Standard ? "standard" : "conditional") << "\n";
    out << "normalized = " << (spec.normalized ? "true" : "false") << "\n";
    if (spec.rule.has_value()) {
        switch (spec.rule->kind) {
            case FusionRuleKind::And: out << "rule = and\n"; break;
            case FusionRuleKind::Or: out << "rule = or\n"; break;
            case FusionRuleKind::KRank:
                out << "rule = krank\n";
                out << "k = " << spec.rule->k << "\n";
                break;
        }
    }

    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
        const ChannelSpec& ch = spec.channels[c];
        out << "\n[channel." << c + 1 << "]\n";
        out << "snr_db = " << format_double(ch.snr_db) << "\n";
        out << "noise_power = " << format_double(ch.noise_power) << "\n";
        out << "fading = " << (ch.fading == Fading::Rayleigh ? "rayleigh" : "awgn") << "\n";
        const UserProfile prof = spec.profiles.empty() ? UserProfile::Honest() : spec.profiles[c];
        switch (prof.kind) {
            case UserProfile::Kind::Honest: out << "profile = honest\n"; break;
            case UserProfile::Kind::AlwaysBusy: out << "profile = always_busy\n"; break;
            case UserProfile::Kind::AlwaysFree: out << "profile = always_free\n"; break;
            case UserProfile::Kind::Intermittent:
                out << "profile = intermittent\n";
                out << "lie_probability = " << format_double(prof.lie_probability) << "\n";
                break;
        }
        if (c < spec.sweeps.size()) {
            const ThresholdSweep& sweep = spec.sweeps[c];
            out << "threshold_start = " << format_double(sweep.start) << "\n";
            out << "threshold_stop = " << format_double(sweep.stop) << "\n";
            out << "threshold_step = " << format_double(sweep.step) << "\n";
        }
    }

    if (config.sprt.has_value()) {
        const SprtConfig& sprt = *config.sprt;
        out << "\n[sprt]\n";
        out << "alpha = " << format_double(sprt.alpha) << "\n";
        out << "beta = " << format_double(sprt.beta) << "\n";
        out << "p_h1 = " << format_double(sprt.p_h1) << "\n";
        out << "p_h0 = " << format_double(sprt.p_h0) << "\n";
        out << "max_reports = " << sprt.max_reports << "\n";
    }
    return out.str();
}

}  // namespace specsense
