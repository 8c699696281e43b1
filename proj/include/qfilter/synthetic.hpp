#pragma once

#include <utility>

#include "qfilter/dataset.hpp"
#include "qfilter/model.hpp"

namespace qfilter {

// Controls the synthetic question generator and its hidden teacher.
//
// Questions are token sequences drawn uniformly from a small vocabulary.
// The hidden teacher is a linear model over unigram features: a small
// vocabulary with high token reuse keeps the target function inside the
// part of feature space a short SGD run can actually reach, and a fixed
// question length keeps it exactly representable by a student that also
// hashes bigrams.
struct SynthConfig {
    int vocab_size = 12;
    int min_tokens = 4;
    int max_tokens = 4;
    double noise = 0.0;        // stddev of Gaussian perturbation of the score
    double teacher_bias = 0.0; // center of the teacher's logit distribution
    FeatureConfig features{1u << 18, false};

    void validate() const;
};

// Generates n questions, draws a hidden teacher (standard-normal weights;
// bias set so the mean logit over the generated questions equals
// teacher_bias), stores teacher_score = sigmoid(w . x + b) perturbed by
// noise and clamped to [0,1], and samples correct ~ Bernoulli(teacher_score).
// Returns the dataset and the teacher as a regression-head model so it can
// score unseen questions later.
std::pair<Dataset, FilterModel> generate_synthetic(long long n,
                                                   const SynthConfig& config,
                                                   unsigned long long seed);

// Same generator with a fixed, already-known teacher: fresh questions and
// labels, no recentering. Used for held-out sets and teacher-shift
// experiments.
Dataset generate_with_teacher(long long n, const SynthConfig& config,
                              const FilterModel& teacher,
                              unsigned long long seed);

}  // namespace qfilter
