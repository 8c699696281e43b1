#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qfilter/dataset.hpp"

namespace qfilter {

// Precision over answered questions, recall over all questions.
// precision is absent when nothing was answered; f1 is 0 unless both
// precision is present and P+R > 0.
struct PrReF1 {
    std::optional<double> precision;
    double recall = 0.0;
    double f1 = 0.0;
    long long answered = 0;
    long long correct_answered = 0;
    long long total = 0;
};

struct CurvePoint {
    double tau = 0.0;
    PrReF1 metrics;
    std::optional<double> filtered_fraction;
};

using Curve = std::vector<CurvePoint>;

// Side-by-side evaluation of the raw system and the filtered system at
// (tau1, tau2). Deltas are filtered minus base; delta_pr is absent when
// either side answered nothing.
struct FilterReport {
    double tau1 = 0.0;
    double tau2_star = 0.0;
    double pct_filter = 0.0;  // percentage of questions the filter discards
    std::optional<double> delta_pr;
    double delta_re = 0.0;
    double delta_f1 = 0.0;
    PrReF1 base;
    PrReF1 filtered;
};

// Counts answered / correct-answered over labeled decisions. Errors when
// the list is empty or an answered decision lacks a correctness label.
PrReF1 evaluate(const std::vector<Decision>& decisions);

// One curve point per tau: answered = (sigma > tau).
Curve sweep(const std::vector<double>& sigma, const std::vector<bool>& correct,
            const std::vector<double>& taus);

// Filter and system share the threshold: answered = (f > tau && sigma > tau);
// filtered_fraction = fraction with f <= tau.
Curve joint_sweep(const std::vector<double>& f_scores,
                  const std::vector<double>& sigma,
                  const std::vector<bool>& correct,
                  const std::vector<double>& taus);

// Builds the filtered system's decisions from the base decisions and the
// filter scores (answered additionally requires f > tau2), evaluates both
// sides, and reports the deltas.
FilterReport compare(const std::vector<Decision>& base_decisions,
                     const std::vector<double>& f_scores, double tau1,
                     double tau2);

// n evenly spaced thresholds covering [0,1]; n >= 2.
std::vector<double> uniform_grid(long long n);

// CSV with header "tau,precision,recall,f1,filtered_fraction", six decimal
// places, absent values as empty fields.
void write_curve_csv(const Curve& curve, const std::string& path);

}  // namespace qfilter
