#pragma once

#include <vector>

#include "qfilter/dataset.hpp"
#include "qfilter/model.hpp"

namespace qfilter {

struct CalibrationResult {
    double tau1 = 0.0;             // NaN when produced by optimal_tau2 directly
    double tau2_star = 0.0;
    double dev_agreement_f1 = 0.0;
    long long candidates_examined = 0;
};

// Midpoints between consecutive distinct sorted scores, plus 0 and 1;
// sorted ascending and deduplicated. The agreement F1 as a function of
// the threshold is piecewise constant with breakpoints only at the
// scores, so this set attains its supremum over [0,1].
std::vector<double> candidate_thresholds(const std::vector<double>& f_scores);

// Picks the threshold whose answer/abstain prediction (f > tau2) best
// agrees with the given flags, measured by F1 with "answer" as the
// positive class. Ties go to the smallest threshold. F1 is 0 whenever
// precision or recall is undefined or zero.
CalibrationResult optimal_tau2(const std::vector<double>& f_scores,
                               const std::vector<bool>& answer_flags);

// Scores the dev set with the filter, derives answer flags from the
// decisions' sigma at tau1, and delegates to optimal_tau2.
CalibrationResult calibrate_filter(const FilterModel& model, const Dataset& dev,
                                   const std::vector<Decision>& dev_decisions,
                                   double tau1);

}  // namespace qfilter
