// Command-line front end: runs config-driven sensing experiments and writes
// ROC / sequential-test CSV files. Progress and summaries go to stderr; the
// configured output files receive data only. Exit codes: 0 success,
// 1 validation (bad usage, unreadable config, invariant violation),
// 2 runtime failure (simulation or I/O error after validation).

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "specsense/specsense.hpp"

namespace {

constexpr const char* kSeedEnvVar = "SPECSENSE_SEED";

struct OutputFile {
    std::filesystem::path path;
    std::string content;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw specsense::config_error("validation error: cannot read config file '" +
                                      path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// roc.csv -> roc_ch3.csv
std::filesystem::path channel_path(const std::filesystem::path& base, std::size_t channel) {
    std::filesystem::path named = base;
    const std::string suffix = "_ch" + std::to_string(channel);
    named.replace_filename(base.stem().string() + suffix + base.extension().string());
    return named;
}

// Environment override for the experiment seed; returns true if applied.
bool apply_seed_override(specsense::ExperimentSpec& spec) {
    const char* text = std::getenv(kSeedEnvVar);
    if (text == nullptr || *text == '\0') return false;
    try {
        spec.seed = specsense::detail::parse_number<std::uint64_t>(text, kSeedEnvVar);
    } catch (const specsense::config_error&) {
        throw specsense::config_error(std::string("validation error: environment variable ") +
                                      kSeedEnvVar + " has a malformed number '" + text + "'");
    }
    return true;
}

void report_deviations(const std::string& label, const std::vector<specsense::CurvePoint>& curve,
                       long n_trials) {
    const specsense::DeviationReport report = specsense::compare_theory(curve, n_trials);
    std::cerr << label << ": " << report.rows.size() << " thresholds, " << report.flagged_count
              << " outside the 3-sigma band\n";
}

// Compute every output file in memory; nothing touches the filesystem here.
std::vector<OutputFile> plan_run(const specsense::RunConfig& config) {
    using namespace specsense;
    std::vector<OutputFile> files;
    const std::filesystem::path base = config.output_path;

    switch (config.mode) {
        case RunMode::SingleUser: {
            const std::vector<std::vector<CurvePoint>> curves = run_single_user(config.experiment);
            for (std::size_t c = 0; c < curves.size(); ++c) {
                report_deviations("channel " + std::to_string(c + 1), curves[c],
                                  config.experiment.n_trials);
                files.push_back({channel_path(base, c + 1), format_curve_csv(curves[c])});
            }
            break;
        }
        case RunMode::Cooperative: {
            const std::vector<CurvePoint> curve = run_cooperative(config.experiment);
            report_deviations("fused", curve, config.experiment.n_trials);
            files.push_back({base, format_curve_csv(curve)});
            break;
        }
        case RunMode::SprtAttack: {
            const SprtAttackSummary summary = run_sprt_attack(config.experiment, *config.sprt);
            std::cerr << "sequential test: mean reports " << summary.under_h1.mean_reports
                      << " under occupied, " << summary.under_h0.mean_reports << " under idle\n";
            files.push_back({base, format_sprt_csv(summary)});
            break;
        }
        case RunMode::TheoryOnly: {
            files = [] (const RunConfig& cfg) {
                std::vector<OutputFile> planned;
                const std::filesystem::path out = cfg.output_path;
                if (cfg.experiment.rule.has_value()) {
                    planned.push_back({out, format_theory_csv(theory_cooperative(cfg.experiment))});
                } else {
                    const auto curves = theory_single_user(cfg.experiment);
                    for (std::size_t c = 0; c < curves.size(); ++c)
                        planned.push_back({channel_path(out, c + 1), format_theory_csv(curves[c])});
                }
                return planned;
            }(config);
            break;
        }
    }
    return files;
}

// Closed-form curves for any config that carries threshold sweeps.
std::vector<OutputFile> plan_theory(const specsense::RunConfig& config) {
    using namespace specsense;
    if (config.experiment.sweeps.empty())
        throw config_error(
            "validation error: field 'threshold_start/stop/step' is required for theory curves");
    std::vector<OutputFile> files;
    const std::filesystem::path base = config.output_path;
    if (config.experiment.rule.has_value()) {
        files.push_back({base, format_theory_csv(theory_cooperative(config.experiment))});
    } else {
        const auto curves = theory_single_user(config.experiment);
        for (std::size_t c = 0; c < curves.size(); ++c)
            files.push_back({channel_path(base, c + 1), format_theory_csv(curves[c])});
    }
    return files;
}

// All-or-nothing commit: on any write failure, remove everything written.
void write_outputs(const std::vector<OutputFile>& files) {
    std::vector<std::filesystem::path> written;
    for (const OutputFile& file : files) {
        bool ok = false;
        {
            std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
            if (out) {
                out.write(file.content.data(),
                          static_cast<std::streamsize>(file.content.size()));
                out.flush();
                ok = out.good();
            }
        }
        if (!ok) {
            std::error_code ec;
            std::filesystem::remove(file.path, ec);
            for (const std::filesystem::path& path : written) std::filesystem::remove(path, ec);
            throw std::runtime_error("cannot write output file '" + file.path.string() + "'");
        }
        written.push_back(file.path);
    }
    for (const std::filesystem::path& path : written)
        std::cerr << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative spectrum-sensing simulator"};
    app.require_subcommand(1);

    std::string run_path;
    std::string theory_path;
    std::string validate_path;
    CLI::App* run = app.add_subcommand("run", "Simulate the configured experiment and write CSV");
    run->add_option("config", run_path, "experiment config file")->required();
    CLI::App* theory =
        app.add_subcommand("theory", "Write closed-form curves only, no simulation");
    theory->add_option("config", theory_path, "experiment config file")->required();
    CLI::App* validate = app.add_subcommand("validate", "Parse and check a config, write nothing");
    validate->add_option("config", validate_path, "experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) {
            specsense::parse_config(read_file(validate_path));
            std::cerr << "config ok: " << validate_path << "\n";
            return 0;
        }

        specsense::RunConfig config;
        const bool is_run = run->parsed();
        config = specsense::parse_config(read_file(is_run ? run_path : theory_path));
        if (is_run && apply_seed_override(config.experiment))
            std::cerr << "seed overridden by " << kSeedEnvVar << " = " << config.experiment.seed
                      << "\n";

        std::vector<OutputFile> files;
        try {
            files = is_run ? plan_run(config) : plan_theory(config);
            write_outputs(files);
        } catch (const specsense::config_error&) {
            throw;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        return 0;
    } catch (const specsense::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
