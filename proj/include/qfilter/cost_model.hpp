#pragma once

namespace qfilter {

// Serving-cost scenario: n questions with c candidates each, batched b at
// a time through the answer model M; the filter F sees shorter inputs and
// discards filter_fraction of the questions before M runs.
struct CostScenario {
    long long n_questions = 0;
    long long candidates_per_question = 0;
    long long batch_size = 0;
    long long seq_len_m = 0;
    long long seq_len_f = 0;
    double filter_fraction = 0.0;  // in [0,1]

    void validate() const;
};

// Transformer batch cost grows roughly quadratically with sequence
// length, so one F batch costs 1/ratio of an M batch.
double cost_ratio(long long seq_len_m, long long seq_len_f);

struct PipelineCost {
    double baseline_cost = 0.0;   // in M-batch units
    double filtered_cost = 0.0;   // M batches plus F batches / cost_ratio
    long long baseline_m_batches = 0;
    long long filtered_m_batches = 0;
    long long f_batches = 0;
};

// Baseline: ceil(n*c/b) M batches. Filtered: ceil(n*(1-phi)*c/b) M batches
// plus ceil(n/b) F batches (the filter scores every question).
PipelineCost pipeline_cost(const CostScenario& s);

// 100 * (baseline - filtered) / baseline. Negative when the filter
// discards too little to pay for itself.
double savings_pct(const CostScenario& s);

}  // namespace qfilter
