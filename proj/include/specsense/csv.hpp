#pragma once

// CSV emission for ROC curves and sequential-test summaries. Formatting is
// locale-independent: thresholds use the shortest round-trip decimal form,
// probabilities and averages use fixed six decimal places.

#include <charconv>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "specsense/montecarlo.hpp"

namespace specsense {
namespace detail {

inline void append_shortest(std::string& out, double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    out.append(buffer, ptr);
}

inline void append_fixed6(std::string& out, double value) {
    char buffer[64];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, 6);
    out.append(buffer, ptr);
}

}  // namespace detail

// Header: threshold,pf_sim,pd_sim,pf_theory,pd_theory
inline std::string format_curve_csv(const std::vector<CurvePoint>& points) {
    std::string out = "threshold,pf_sim,pd_sim,pf_theory,pd_theory\n";
    for (const CurvePoint& p : points) {
        detail::append_shortest(out, p.threshold);
        out.push_back(',');
        detail::append_fixed6(out, p.pf_sim);
        out.push_back(',');
        detail::append_fixed6(out, p.pd_sim);
        out.push_back(',');
        detail::append_fixed6(out, p.pf_theory);
        out.push_back(',');
        detail::append_fixed6(out, p.pd_theory);
        out.push_back('\n');
    }
    return out;
}

// Header: threshold,pf_theory,pd_theory
inline std::string format_theory_csv(const std::vector<TheoryPoint>& points) {
    std::string out = "threshold,pf_theory,pd_theory\n";
    for (const TheoryPoint& p : points) {
        detail::append_shortest(out, p.threshold);
        out.push_back(',');
        detail::append_fixed6(out, p.pf);
        out.push_back(',');
        detail::append_fixed6(out, p.pd);
        out.push_back('\n');
    }
    return out;
}

// Header: hypothesis,accept_h1_rate,accept_h0_rate,undecided_rate,mean_reports
inline std::string format_sprt_csv(const SprtAttackSummary& summary) {
    std::string out = "hypothesis,accept_h1_rate,accept_h0_rate,undecided_rate,mean_reports\n";
    const auto emit = [&out](const char* label, const SprtAttackSummary::Row& row) {
        out += label;
        out.push_back(',');
        detail::append_fixed6(out, row.accept_h1_rate);
        out.push_back(',');
        detail::append_fixed6(out, row.accept_h0_rate);
        out.push_back(',');
        detail::append_fixed6(out, row.undecided_rate);
        out.push_back(',');
        detail::append_fixed6(out, row.mean_reports);
        out.push_back('\n');
    };
    emit("h0", summary.under_h0);
    emit("h1", summary.under_h1);
    return out;
}

// Writes one curve to a stream; returns the number of bytes written.
inline std::size_t emit_csv(const std::vector<CurvePoint>& points, std::ostream& out) {
    const std::string text = format_curve_csv(points);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    return text.size();
}

}  // namespace specsense
