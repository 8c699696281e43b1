#include "qfilter/cost_model.hpp"

#include <cmath>

#include "qfilter/errors.hpp"

namespace qfilter {

void CostScenario::validate() const {
    if (n_questions < 1) throw domain_error("n_questions must be positive");
    if (candidates_per_question < 1)
        throw domain_error("candidates_per_question must be positive");
    if (batch_size < 1) throw domain_error("batch_size must be positive");
    if (seq_len_m < 1) throw domain_error("seq_len_m must be positive");
    if (seq_len_f < 1) throw domain_error("seq_len_f must be positive");
    if (!(filter_fraction >= 0.0 && filter_fraction <= 1.0))
        throw domain_error("filter_fraction out of [0,1]");
}

double cost_ratio(long long seq_len_m, long long seq_len_f) {
    if (seq_len_m < 1 || seq_len_f < 1)
        throw domain_error("sequence lengths must be positive");
    const double r = static_cast<double>(seq_len_m) /
                     static_cast<double>(seq_len_f);
    return r * r;
}

namespace {

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

// ceil after float multiplication; the slack keeps an exact product that
// lands a hair above an integer (e.g. 1000*0.8*400/100) from rounding up
long long ceil_real(double x) {
    return static_cast<long long>(std::ceil(x - 1e-9));
}

}  // namespace

PipelineCost pipeline_cost(const CostScenario& s) {
    s.validate();

    PipelineCost c;
    c.baseline_m_batches =
        ceil_div(s.n_questions * s.candidates_per_question, s.batch_size);
    const double kept = static_cast<double>(s.n_questions) *
                        (1.0 - s.filter_fraction) *
                        static_cast<double>(s.candidates_per_question);
    c.filtered_m_batches = ceil_real(kept / static_cast<double>(s.batch_size));
    c.f_batches = ceil_div(s.n_questions, s.batch_size);

    const double ratio = cost_ratio(s.seq_len_m, s.seq_len_f);
    c.baseline_cost = static_cast<double>(c.baseline_m_batches);
    c.filtered_cost = static_cast<double>(c.filtered_m_batches) +
                      static_cast<double>(c.f_batches) / ratio;
    return c;
}

double savings_pct(const CostScenario& s) {
    const PipelineCost c = pipeline_cost(s);
    return 100.0 * (c.baseline_cost - c.filtered_cost) / c.baseline_cost;
}

}  // namespace qfilter
