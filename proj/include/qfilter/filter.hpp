#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qfilter/dataset.hpp"
#include "qfilter/model.hpp"

namespace qfilter {

// Lowercased tokens, split on Unicode whitespace, with leading and
// trailing ASCII punctuation stripped from each piece.
std::vector<std::string> tokenize(const std::string& text);

// Hashed bag of unigrams (and bigrams joined by "_"), L2-normalized.
// Entries are sorted by index; an empty token list yields no entries.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;
};

SparseVector featurize(const std::string& text, const FeatureConfig& cfg);

// FNV-1a 64-bit over the UTF-8 bytes of a feature string.
std::uint64_t fnv1a64(const std::string& s);

// F(q) = sigmoid(w . x(q) + b), always strictly inside (0,1) for finite
// inputs of moderate magnitude.
double predict(const FilterModel& model, const std::string& question_text);

// Per-example losses, each returning (loss, dloss/dpred).
std::pair<double, double> loss_regression(double pred, double target);
// pred is clamped to [eps, 1-eps] with eps = 1e-12 before the logs.
std::pair<double, double> loss_classification(double pred, double label);

// What the filter is trained to imitate.
struct TargetStrategy {
    enum class Kind {
        distill_regression,      // target = sigma
        distill_classification,  // target = 1 if sigma > tau1 else 0
        correctness,             // target = 1 if the teacher answered correctly
        wellformed               // target = stored well-formedness score
    };
    Kind kind = Kind::distill_regression;
    double tau1 = 0.0;  // used by distill_classification only

    static TargetStrategy distill_regression();
    static TargetStrategy distill_classification(double tau1);
    static TargetStrategy correctness();
    static TargetStrategy wellformed();
};

// One (question id, target) pair per dataset record, in dataset order.
std::vector<std::pair<std::string, double>> make_targets(
    const Dataset& ds, const std::vector<Decision>& decisions,
    const TargetStrategy& strategy);

struct TrainConfig {
    double learning_rate = 5.0;
    long long epochs = 3;
    long long batch_size = 128;
    double warmup_fraction = 0.05;  // in [0,1)

    void validate() const;
};

// Mean training loss per epoch, for convergence reporting.
struct TrainStats {
    std::vector<double> epoch_mean_loss;
};

// Mini-batch SGD from zero initialization. Batches average their
// gradients; each epoch reshuffles with a generator seeded by
// (seed, epoch); the learning rate ramps linearly over the first
// ceil(warmup_fraction * total_steps) steps. Deterministic: identical
// inputs and seed give bit-identical weights. Classification-head models
// must be given the threshold their targets were derived from
// (tau1_trained); regression models leave it unset.
FilterModel train(const Dataset& ds,
                  const std::vector<std::pair<std::string, double>>& targets,
                  Head head, const TrainConfig& cfg, const FeatureConfig& feat,
                  unsigned long long seed, TrainStats* stats = nullptr,
                  std::optional<double> tau1_trained = std::nullopt);

// Two-stage training: fit on dataset A, then continue from those weights
// on dataset B with its own config (conventionally a smaller learning
// rate). Stage B shuffles are seeded independently of stage A's.
FilterModel train_sequential(
    const Dataset& ds_a,
    const std::vector<std::pair<std::string, double>>& targets_a,
    const Dataset& ds_b,
    const std::vector<std::pair<std::string, double>>& targets_b, Head head,
    const TrainConfig& cfg_a, const TrainConfig& cfg_b,
    const FeatureConfig& feat, unsigned long long seed,
    TrainStats* stats = nullptr,
    std::optional<double> tau1_trained = std::nullopt);

// Compares the analytic gradient of the per-example loss against central
// finite differences (h = 1e-5) for every touched weight and the bias.
// Returns max over coordinates of |analytic - numeric| / max(1e-8, |numeric|).
double gradient_check(Head head, const SparseVector& x, double target,
                      const std::vector<double>& weights, double bias);

}  // namespace qfilter
