#include "qfilter/calibration.hpp"

#include <algorithm>
#include <limits>

#include "qfilter/errors.hpp"
#include "qfilter/filter.hpp"

namespace qfilter {

std::vector<double> candidate_thresholds(const std::vector<double>& f_scores) {
    if (f_scores.empty())
        throw domain_error("candidate_thresholds needs at least one score");

    std::vector<double> sorted = f_scores;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<double> out;
    out.reserve(sorted.size() + 1);
    out.push_back(0.0);
    for (std::size_t i = 1; i < sorted.size(); ++i)
        out.push_back(0.5 * (sorted[i - 1] + sorted[i]));
    out.push_back(1.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

double agreement_f1(const std::vector<double>& f_scores,
                    const std::vector<bool>& answer_flags, double tau2) {
    long long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < f_scores.size(); ++i) {
        const bool predicted = f_scores[i] > tau2;
        if (predicted && answer_flags[i]) ++tp;
        else if (predicted && !answer_flags[i]) ++fp;
        else if (!predicted && answer_flags[i]) ++fn;
    }
    if (tp == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) /
           static_cast<double>(2 * tp + fp + fn);
}

}  // namespace

CalibrationResult optimal_tau2(const std::vector<double>& f_scores,
                               const std::vector<bool>& answer_flags) {
    if (f_scores.empty())
        throw domain_error("optimal_tau2 needs at least one score");
    if (f_scores.size() != answer_flags.size())
        throw domain_error("f_scores and answer_flags differ in length");

    CalibrationResult r;
    r.tau1 = std::numeric_limits<double>::quiet_NaN();
    r.tau2_star = 0.0;
    r.dev_agreement_f1 = -1.0;

    const std::vector<double> candidates = candidate_thresholds(f_scores);
    r.candidates_examined = static_cast<long long>(candidates.size());
    for (double tau2 : candidates) {
        // strict > keeps the smallest threshold among ties
        const double f1 = agreement_f1(f_scores, answer_flags, tau2);
        if (f1 > r.dev_agreement_f1) {
            r.dev_agreement_f1 = f1;
            r.tau2_star = tau2;
        }
    }
    return r;
}

CalibrationResult calibrate_filter(const FilterModel& model, const Dataset& dev,
                                   const std::vector<Decision>& dev_decisions,
                                   double tau1) {
    if (!(tau1 >= 0.0 && tau1 <= 1.0)) throw domain_error("tau1 out of [0,1]");
    if (dev.records.size() != dev_decisions.size())
        throw domain_error("dev dataset and decisions differ in length");

    std::vector<double> f_scores;
    std::vector<bool> flags;
    f_scores.reserve(dev.records.size());
    flags.reserve(dev.records.size());
    for (std::size_t i = 0; i < dev.records.size(); ++i) {
        if (dev.records[i].id != dev_decisions[i].question_id)
            throw domain_error("dev dataset and decisions disagree at \"" +
                               dev.records[i].id + "\"");
        f_scores.push_back(predict(model, dev.records[i].text));
        flags.push_back(dev_decisions[i].sigma > tau1);
    }

    CalibrationResult r = optimal_tau2(f_scores, flags);
    r.tau1 = tau1;
    return r;
}

}  // namespace qfilter
