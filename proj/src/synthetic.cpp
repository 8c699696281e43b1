#include "qfilter/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qfilter/errors.hpp"
#include "qfilter/filter.hpp"
#include "rng.hpp"

namespace qfilter {

void SynthConfig::validate() const {
    features.validate();
    if (vocab_size < 2) throw domain_error("vocab_size must be at least 2");
    if (min_tokens < 1) throw domain_error("min_tokens must be at least 1");
    if (max_tokens < min_tokens)
        throw domain_error("max_tokens must be >= min_tokens");
    if (!(noise >= 0.0) || !std::isfinite(noise))
        throw domain_error("noise must be a nonnegative real");
    if (!std::isfinite(teacher_bias))
        throw domain_error("teacher_bias must be finite");
}

namespace {

std::string make_question(detail::Rng& rng, const SynthConfig& cfg) {
    const std::uint64_t span =
        static_cast<std::uint64_t>(cfg.max_tokens - cfg.min_tokens) + 1;
    const std::uint64_t len =
        static_cast<std::uint64_t>(cfg.min_tokens) + rng.below(span);
    std::string text;
    for (std::uint64_t i = 0; i < len; ++i) {
        if (i) text += ' ';
        text += 't';
        text += std::to_string(
            rng.below(static_cast<std::uint64_t>(cfg.vocab_size)));
    }
    return text;
}

Dataset label_questions(std::vector<std::string> texts, const SynthConfig& cfg,
                        const FilterModel& teacher, std::uint64_t seed) {
    // separate streams so scores and label draws stay stable if the
    // question stream changes length
    detail::Rng noise_rng(detail::mix_seed(seed, 2));
    detail::Rng label_rng(detail::mix_seed(seed, 3));

    Dataset ds;
    ds.records.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        Question q;
        q.id = "q" + std::to_string(i + 1);
        q.text = std::move(texts[i]);

        double score = predict(teacher, q.text);
        if (cfg.noise > 0.0) {
            score += cfg.noise * noise_rng.normal();
            if (score < 0.0) score = 0.0;
            if (score > 1.0) score = 1.0;
        }
        q.teacher_score = score;
        q.correct = label_rng.uniform01() < score;
        ds.records.push_back(std::move(q));
    }
    return ds;
}

std::vector<std::string> draw_questions(long long n, const SynthConfig& cfg,
                                        std::uint64_t seed) {
    detail::Rng question_rng(detail::mix_seed(seed, 1));
    std::vector<std::string> texts;
    texts.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i)
        texts.push_back(make_question(question_rng, cfg));
    return texts;
}

}  // namespace

std::pair<Dataset, FilterModel> generate_synthetic(long long n,
                                                   const SynthConfig& config,
                                                   unsigned long long seed) {
    config.validate();
    if (n < 0) throw domain_error("n must be nonnegative");

    FilterModel teacher;
    teacher.head = Head::regression;
    teacher.feature_config = config.features;
    teacher.weights.assign(config.features.dimension, 0.0);
    teacher.bias = 0.0;
    teacher.seed = seed;
    teacher.epochs_trained = 0;

    // weight only the hash slots the vocabulary can reach; everything else
    // stays zero so the teacher is a function of the tokens alone
    detail::Rng weight_rng(detail::mix_seed(seed, 0));
    for (int v = 0; v < config.vocab_size; ++v) {
        const std::string tok = "t" + std::to_string(v);
        const std::uint32_t idx = static_cast<std::uint32_t>(
            fnv1a64(tok) & (config.features.dimension - 1));
        teacher.weights[idx] = weight_rng.normal();
    }

    std::vector<std::string> texts = draw_questions(n, config, seed);

    // center the bias so the mean logit over this sample equals teacher_bias
    double mean_z = 0.0;
    for (const std::string& t : texts) {
        double z = 0.0;
        for (const auto& [idx, value] : featurize(t, config.features).entries)
            z += teacher.weights[idx] * value;
        mean_z += z;
    }
    if (n > 0) mean_z /= static_cast<double>(n);
    teacher.bias = config.teacher_bias - mean_z;

    return {label_questions(std::move(texts), config, teacher, seed), teacher};
}

Dataset generate_with_teacher(long long n, const SynthConfig& config,
                              const FilterModel& teacher,
                              unsigned long long seed) {
    config.validate();
    if (n < 0) throw domain_error("n must be nonnegative");
    if (teacher.weights.size() != teacher.feature_config.dimension)
        throw domain_error("teacher weights do not match its dimension");

    return label_questions(draw_questions(n, config, seed), config, teacher,
                           seed);
}

}  // namespace qfilter
