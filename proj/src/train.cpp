#include "qfilter/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "qfilter/errors.hpp"
#include "rng.hpp"
#include "scalar.hpp"

namespace qfilter {

namespace {
constexpr double kClampEps = 1e-12;
}

double predict(const FilterModel& model, const std::string& question_text) {
    if (model.weights.size() != model.feature_config.dimension)
        throw domain_error("model weights length does not match dimension");
    SparseVector x = featurize(question_text, model.feature_config);
    double z = model.bias;
    for (const auto& [idx, v] : x.entries) z += model.weights[idx] * v;
    return detail::sigmoid(z);
}

std::pair<double, double> loss_regression(double pred, double target) {
    double d = pred - target;
    return {d * d, 2.0 * d};
}

std::pair<double, double> loss_classification(double pred, double label) {
    double p = std::clamp(pred, kClampEps, 1.0 - kClampEps);
    double loss = -(label * std::log(p) + (1.0 - label) * std::log1p(-p));
    double grad = (p - label) / (p * (1.0 - p));
    return {loss, grad};
}

TargetStrategy TargetStrategy::distill_regression() {
    return {Kind::distill_regression, 0.0};
}
TargetStrategy TargetStrategy::distill_classification(double tau1) {
    if (!(tau1 >= 0.0 && tau1 <= 1.0))
        throw domain_error("distill_classification tau1 out of [0,1]");
    return {Kind::distill_classification, tau1};
}
TargetStrategy TargetStrategy::correctness() {
    return {Kind::correctness, 0.0};
}
TargetStrategy TargetStrategy::wellformed() {
    return {Kind::wellformed, 0.0};
}

std::vector<std::pair<std::string, double>> make_targets(
    const Dataset& ds, const std::vector<Decision>& decisions,
    const TargetStrategy& strategy) {
    using Kind = TargetStrategy::Kind;
    const bool uses_decisions = strategy.kind != Kind::wellformed;
    if (uses_decisions) {
        if (decisions.size() != ds.records.size())
            throw domain_error("decisions are not aligned with the dataset");
        for (std::size_t i = 0; i < decisions.size(); ++i)
            if (decisions[i].question_id != ds.records[i].id)
                throw domain_error("decisions are not aligned with the dataset "
                                   "at question \"" + ds.records[i].id + "\"");
    }

    std::vector<std::pair<std::string, double>> out;
    out.reserve(ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const Question& q = ds.records[i];
        double target = 0.0;
        switch (strategy.kind) {
            case Kind::distill_regression:
                target = decisions[i].sigma;
                break;
            case Kind::distill_classification:
                target = decisions[i].sigma > strategy.tau1 ? 1.0 : 0.0;
                break;
            case Kind::correctness: {
                std::optional<bool> correct = decisions[i].correct;
                if (!correct) correct = q.correct;
                if (!correct)
                    throw domain_error(
                        "correctness strategy: missing \"correct\" for "
                        "question \"" + q.id + "\"");
                target = *correct ? 1.0 : 0.0;
                break;
            }
            case Kind::wellformed:
                if (!q.wellformed)
                    throw domain_error(
                        "wellformed strategy: missing \"wellformed\" for "
                        "question \"" + q.id + "\"");
                target = *q.wellformed;
                break;
        }
        out.emplace_back(q.id, target);
    }
    return out;
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw domain_error("learning_rate must be a nonnegative real");
    if (epochs < 1) throw domain_error("epochs must be >= 1");
    if (batch_size < 1) throw domain_error("batch_size must be >= 1");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
        throw domain_error("warmup_fraction must be in [0,1)");
}

namespace {

// dLoss/dz for one example. The classification loss is flat where the
// prediction is clamped, so its gradient vanishes there.
double grad_z(Head head, double p, double target) {
    if (head == Head::regression)
        return 2.0 * (p - target) * p * (1.0 - p);
    if (p <= kClampEps || p >= 1.0 - kClampEps) return 0.0;
    return p - target;
}

double loss_of(Head head, double p, double target) {
    return head == Head::regression ? loss_regression(p, target).first
                                    : loss_classification(p, target).first;
}

struct Example {
    SparseVector x;
    double target = 0.0;
};

std::vector<Example> prepare_examples(
    const Dataset& ds,
    const std::vector<std::pair<std::string, double>>& targets, Head head,
    const FeatureConfig& feat) {
    if (ds.records.empty()) throw domain_error("cannot train on an empty dataset");

    std::unordered_map<std::string, double> by_id;
    by_id.reserve(targets.size());
    for (const auto& [id, t] : targets) by_id[id] = t;

    std::vector<Example> out;
    out.reserve(ds.records.size());
    for (const Question& q : ds.records) {
        auto it = by_id.find(q.id);
        if (it == by_id.end())
            throw domain_error("no target for question \"" + q.id + "\"");
        double t = it->second;
        if (head == Head::classification && t != 0.0 && t != 1.0)
            throw domain_error(
                "classification head requires binary targets; question \"" +
                q.id + "\" has target " + std::to_string(t));
        out.push_back({featurize(q.text, feat), t});
    }
    return out;
}

// One SGD pass over the examples, updating weights and bias in place.
void run_sgd(std::vector<Example>& examples, Head head, const TrainConfig& cfg,
             std::vector<double>& weights, double& bias,
             unsigned long long seed, TrainStats* stats) {
    const std::size_t n = examples.size();
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    const long long steps_per_epoch =
        static_cast<long long>((n + batch - 1) / batch);
    const long long total_steps = cfg.epochs * steps_per_epoch;
    const long long warmup_steps = static_cast<long long>(
        std::ceil(cfg.warmup_fraction * static_cast<double>(total_steps)));

    std::vector<std::size_t> order(n);
    std::unordered_map<std::uint32_t, double> grad;
    long long step = 0;

    for (long long epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        detail::Rng rng(detail::mix_seed(seed, static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            ++step;
            double lr = cfg.learning_rate;
            if (warmup_steps > 0 && step < warmup_steps)
                lr *= static_cast<double>(step) / static_cast<double>(warmup_steps);

            const std::size_t end = std::min(start + batch, n);
            grad.clear();
            double grad_bias = 0.0;
            for (std::size_t b = start; b < end; ++b) {
                const Example& ex = examples[order[b]];
                double z = bias;
                for (const auto& [idx, v] : ex.x.entries)
                    z += weights[idx] * v;
                double p = detail::sigmoid(z);
                epoch_loss += loss_of(head, p, ex.target);
                double gz = grad_z(head, p, ex.target);
                for (const auto& [idx, v] : ex.x.entries) grad[idx] += gz * v;
                grad_bias += gz;
            }
            const double scale = lr / static_cast<double>(end - start);
            for (const auto& [idx, g] : grad) weights[idx] -= scale * g;
            bias -= scale * grad_bias;
        }
        if (stats)
            stats->epoch_mean_loss.push_back(epoch_loss / static_cast<double>(n));
    }
}

}  // namespace

FilterModel train(const Dataset& ds,
                  const std::vector<std::pair<std::string, double>>& targets,
                  Head head, const TrainConfig& cfg, const FeatureConfig& feat,
                  unsigned long long seed, TrainStats* stats,
                  std::optional<double> tau1_trained) {
    cfg.validate();
    feat.validate();
    if (head == Head::classification && !tau1_trained)
        throw domain_error("classification head requires tau1_trained");

    std::vector<Example> examples = prepare_examples(ds, targets, head, feat);

    FilterModel model;
    model.head = head;
    model.tau1_trained = head == Head::classification ? tau1_trained : std::nullopt;
    model.feature_config = feat;
    model.weights.assign(feat.dimension, 0.0);
    model.bias = 0.0;
    model.seed = seed;
    model.epochs_trained = cfg.epochs;

    run_sgd(examples, head, cfg, model.weights, model.bias, seed, stats);
    return model;
}

FilterModel train_sequential(
    const Dataset& ds_a,
    const std::vector<std::pair<std::string, double>>& targets_a,
    const Dataset& ds_b,
    const std::vector<std::pair<std::string, double>>& targets_b, Head head,
    const TrainConfig& cfg_a, const TrainConfig& cfg_b,
    const FeatureConfig& feat, unsigned long long seed, TrainStats* stats,
    std::optional<double> tau1_trained) {
    cfg_b.validate();

    FilterModel model = train(ds_a, targets_a, head, cfg_a, feat, seed, stats,
                              tau1_trained);
    std::vector<Example> examples_b =
        prepare_examples(ds_b, targets_b, head, feat);
    run_sgd(examples_b, head, cfg_b, model.weights, model.bias,
            detail::mix_seed(seed, 0x57a6eULL), stats);
    model.epochs_trained = cfg_a.epochs + cfg_b.epochs;
    return model;
}

double gradient_check(Head head, const SparseVector& x, double target,
                      const std::vector<double>& weights, double bias) {
    for (const auto& [idx, v] : x.entries)
        if (idx >= weights.size())
            throw domain_error("feature index exceeds weight vector length");

    auto loss_at = [&](double bias_shift, std::size_t shifted_idx,
                       double weight_shift) {
        double z = bias + bias_shift;
        for (std::size_t k = 0; k < x.entries.size(); ++k) {
            const auto& [idx, v] = x.entries[k];
            double w = weights[idx] + (k == shifted_idx ? weight_shift : 0.0);
            z += w * v;
        }
        return loss_of(head, detail::sigmoid(z), target);
    };

    constexpr double h = 1e-5;
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    double z = bias;
    for (const auto& [idx, v] : x.entries) z += weights[idx] * v;
    const double gz = grad_z(head, detail::sigmoid(z), target);

    auto rel_err = [](double analytic, double numeric) {
        return std::fabs(analytic - numeric) /
               std::max(1e-8, std::fabs(numeric));
    };

    double worst = 0.0;
    for (std::size_t k = 0; k < x.entries.size(); ++k) {
        double numeric =
            (loss_at(0.0, k, h) - loss_at(0.0, k, -h)) / (2.0 * h);
        worst = std::max(worst, rel_err(gz * x.entries[k].second, numeric));
    }
    double numeric_bias = (loss_at(h, kNone, 0.0) - loss_at(-h, kNone, 0.0)) / (2.0 * h);
    worst = std::max(worst, rel_err(gz, numeric_bias));
    return worst;
}

}  // namespace qfilter
