#include "qfilter/qfilter_c.h"

#include <exception>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qfilter/answer_system.hpp"
#include "qfilter/calibration.hpp"
#include "qfilter/cost_model.hpp"
#include "qfilter/dataset.hpp"
#include "qfilter/errors.hpp"
#include "qfilter/filter.hpp"
#include "qfilter/metrics.hpp"
#include "qfilter/model.hpp"
#include "qfilter/synthetic.hpp"

struct qf_dataset {
    qfilter::Dataset ds;
};

struct qf_corpus {
    qfilter::Corpus corpus;
};

struct qf_model {
    qfilter::FilterModel model;
};

namespace {

thread_local std::string t_last_error;

qf_status fail(qf_status code, const std::string& message) {
    t_last_error = message;
    return code;
}

// every entry point funnels through here so exceptions never cross the
// C boundary
template <typename Fn>
qf_status guarded(Fn&& fn) {
    try {
        fn();
        return QF_OK;
    } catch (const qfilter::io_error& e) {
        return fail(QF_ERR_IO, e.what());
    } catch (const qfilter::domain_error& e) {
        return fail(QF_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(QF_ERR_ARG, e.what());
    } catch (const std::exception& e) {
        return fail(QF_ERR_DOMAIN, e.what());
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

std::vector<qfilter::Decision> replay_decisions(const qfilter::Dataset& ds) {
    return run_pipeline(ds, qfilter::TeacherKind::replay(), 0.0);
}

qfilter::TargetStrategy to_strategy(qf_strategy strategy, double tau1) {
    switch (strategy) {
        case QF_STRAT_DISTILL_REGRESSION:
            return qfilter::TargetStrategy::distill_regression();
        case QF_STRAT_DISTILL_CLASSIFICATION:
            return qfilter::TargetStrategy::distill_classification(tau1);
        case QF_STRAT_CORRECTNESS:
            return qfilter::TargetStrategy::correctness();
        case QF_STRAT_WELLFORMED:
            return qfilter::TargetStrategy::wellformed();
    }
    throw std::invalid_argument("unknown strategy");
}

qfilter::Head to_head(qf_head head) {
    switch (head) {
        case QF_HEAD_REGRESSION:
            return qfilter::Head::regression;
        case QF_HEAD_CLASSIFICATION:
            return qfilter::Head::classification;
    }
    throw std::invalid_argument("unknown head");
}

// distillation reads sigma from the stored scores; correctness and
// wellformed need no teacher at all
std::vector<qfilter::Decision> decisions_for(const qfilter::Dataset& ds,
                                             const qfilter::TargetStrategy& s) {
    using Kind = qfilter::TargetStrategy::Kind;
    std::vector<qfilter::Decision> decisions;
    if (s.kind == Kind::wellformed) return decisions;

    decisions.reserve(ds.records.size());
    for (const qfilter::Question& q : ds.records) {
        qfilter::Decision d;
        d.question_id = q.id;
        if (s.kind != Kind::correctness) {
            if (!q.teacher_score)
                throw qfilter::domain_error(
                    "distillation needs \"teacher_score\": missing on "
                    "question \"" + q.id + "\"");
            d.sigma = *q.teacher_score;
        }
        decisions.push_back(std::move(d));
    }
    return decisions;
}

qfilter::TrainConfig to_train_config(const qf_train_params& p) {
    qfilter::TrainConfig cfg;
    cfg.learning_rate = p.learning_rate;
    cfg.epochs = p.epochs;
    cfg.batch_size = p.batch_size;
    cfg.warmup_fraction = p.warmup_fraction;
    return cfg;
}

qfilter::FeatureConfig to_feature_config(const qf_train_params& p) {
    require(p.dimension > 0 && p.dimension <= (1ll << 31),
            "dimension out of range");
    qfilter::FeatureConfig feat;
    feat.dimension = static_cast<std::uint32_t>(p.dimension);
    feat.use_bigrams = p.use_bigrams != 0;
    return feat;
}

qf_prref1 to_c(const qfilter::PrReF1& m) {
    qf_prref1 out;
    out.has_precision = m.precision.has_value() ? 1 : 0;
    out.precision = m.precision.value_or(0.0);
    out.recall = m.recall;
    out.f1 = m.f1;
    out.answered = m.answered;
    out.correct_answered = m.correct_answered;
    out.total = m.total;
    return out;
}

}  // namespace

extern "C" {

const char* qf_last_error(void) { return t_last_error.c_str(); }

qf_status qf_dataset_load(const char* path, qf_dataset** out) {
    return guarded([&] {
        require(path && out, "path and out must be non-NULL");
        auto handle = new qf_dataset{qfilter::load_dataset(path)};
        *out = handle;
    });
}

qf_status qf_dataset_save(const qf_dataset* ds, const char* path) {
    return guarded([&] {
        require(ds && path, "dataset and path must be non-NULL");
        qfilter::write_dataset(ds->ds, path);
    });
}

long long qf_dataset_size(const qf_dataset* ds) {
    return ds ? static_cast<long long>(ds->ds.records.size()) : 0;
}

void qf_dataset_free(qf_dataset* ds) { delete ds; }

qf_status qf_dataset_split(const qf_dataset* ds, double f_train, double f_dev,
                           double f_test, unsigned long long seed,
                           qf_dataset** train, qf_dataset** dev,
                           qf_dataset** test) {
    return guarded([&] {
        require(ds && train && dev && test, "outputs must be non-NULL");
        qfilter::SplitFractions fr{f_train, f_dev, f_test};
        qfilter::SplitResult r = qfilter::split_dataset(ds->ds, fr, seed);
        *train = new qf_dataset{std::move(r.train)};
        *dev = new qf_dataset{std::move(r.dev)};
        *test = new qf_dataset{std::move(r.test)};
    });
}

qf_status qf_generate(long long n, int vocab_size, int min_tokens,
                      int max_tokens, double noise, unsigned long long seed,
                      qf_dataset** ds, qf_model** teacher) {
    return guarded([&] {
        require(ds, "ds must be non-NULL");
        qfilter::SynthConfig cfg;
        cfg.vocab_size = vocab_size;
        cfg.min_tokens = min_tokens;
        cfg.max_tokens = max_tokens;
        cfg.noise = noise;
        auto [data, hidden] = qfilter::generate_synthetic(n, cfg, seed);
        *ds = new qf_dataset{std::move(data)};
        if (teacher) *teacher = new qf_model{std::move(hidden)};
    });
}

qf_status qf_corpus_load(const char* path, qf_corpus** out) {
    return guarded([&] {
        require(path && out, "path and out must be non-NULL");
        *out = new qf_corpus{qfilter::load_corpus(path)};
    });
}

void qf_corpus_free(qf_corpus* c) { delete c; }

qf_status qf_score_lexical(qf_dataset* ds, const qf_corpus* corpus, int k) {
    return guarded([&] {
        require(ds && corpus, "dataset and corpus must be non-NULL");
        const auto kind = qfilter::TeacherKind::lexical(corpus->corpus, k);
        for (qfilter::Question& q : ds->ds.records)
            q.teacher_score = qfilter::teacher_score(kind, q);
    });
}

qf_status qf_score_synthetic(qf_dataset* ds, const qf_model* teacher) {
    return guarded([&] {
        require(ds && teacher, "dataset and teacher must be non-NULL");
        const auto kind = qfilter::TeacherKind::synthetic(teacher->model);
        for (qfilter::Question& q : ds->ds.records)
            q.teacher_score = qfilter::teacher_score(kind, q);
    });
}

qf_status qf_model_load(const char* path, qf_model** out) {
    return guarded([&] {
        require(path && out, "path and out must be non-NULL");
        *out = new qf_model{qfilter::load_model(path)};
    });
}

qf_status qf_model_save(const qf_model* m, const char* path) {
    return guarded([&] {
        require(m && path, "model and path must be non-NULL");
        qfilter::save_model(m->model, path);
    });
}

void qf_model_free(qf_model* m) { delete m; }

qf_status qf_model_predict(const qf_model* m, const char* question_text,
                           double* score) {
    return guarded([&] {
        require(m && question_text && score, "arguments must be non-NULL");
        *score = qfilter::predict(m->model, question_text);
    });
}

void qf_train_params_init(qf_train_params* p) {
    if (!p) return;
    const qfilter::TrainConfig cfg;
    const qfilter::FeatureConfig feat;
    p->learning_rate = cfg.learning_rate;
    p->epochs = cfg.epochs;
    p->batch_size = cfg.batch_size;
    p->warmup_fraction = cfg.warmup_fraction;
    p->dimension = feat.dimension;
    p->use_bigrams = feat.use_bigrams ? 1 : 0;
    p->seed = 42;
}

qf_status qf_train(const qf_dataset* ds, qf_strategy strategy, double tau1,
                   qf_head head, const qf_train_params* params, qf_model** out,
                   double* final_loss) {
    return guarded([&] {
        require(ds && params && out, "dataset, params and out must be non-NULL");
        const auto strat = to_strategy(strategy, tau1);
        const auto decisions = decisions_for(ds->ds, strat);
        const auto targets = qfilter::make_targets(ds->ds, decisions, strat);
        const auto cfg = to_train_config(*params);
        const auto feat = to_feature_config(*params);
        const auto h = to_head(head);

        std::optional<double> tau1_trained;
        if (h == qfilter::Head::classification) tau1_trained = tau1;

        qfilter::TrainStats stats;
        qfilter::FilterModel model = qfilter::train(
            ds->ds, targets, h, cfg, feat, params->seed, &stats, tau1_trained);
        if (final_loss && !stats.epoch_mean_loss.empty())
            *final_loss = stats.epoch_mean_loss.back();
        *out = new qf_model{std::move(model)};
    });
}

qf_status qf_train_sequential(const qf_dataset* ds_a, const qf_dataset* ds_b,
                              qf_strategy strategy, double tau1, qf_head head,
                              const qf_train_params* params_a,
                              const qf_train_params* params_b, qf_model** out,
                              double* final_loss) {
    return guarded([&] {
        require(ds_a && ds_b && params_a && params_b && out,
                "datasets, params and out must be non-NULL");
        require(params_a->dimension == params_b->dimension &&
                    params_a->use_bigrams == params_b->use_bigrams,
                "both stages must share one feature space");
        const auto strat = to_strategy(strategy, tau1);
        const auto targets_a =
            qfilter::make_targets(ds_a->ds, decisions_for(ds_a->ds, strat), strat);
        const auto targets_b =
            qfilter::make_targets(ds_b->ds, decisions_for(ds_b->ds, strat), strat);
        const auto h = to_head(head);

        std::optional<double> tau1_trained;
        if (h == qfilter::Head::classification) tau1_trained = tau1;

        qfilter::TrainStats stats;
        qfilter::FilterModel model = qfilter::train_sequential(
            ds_a->ds, targets_a, ds_b->ds, targets_b, h,
            to_train_config(*params_a), to_train_config(*params_b),
            to_feature_config(*params_a), params_a->seed, &stats, tau1_trained);
        if (final_loss && !stats.epoch_mean_loss.empty())
            *final_loss = stats.epoch_mean_loss.back();
        *out = new qf_model{std::move(model)};
    });
}

qf_status qf_calibrate(const qf_model* m, const qf_dataset* dev, double tau1,
                       qf_calibration* out) {
    return guarded([&] {
        require(m && dev && out, "model, dev and out must be non-NULL");
        const auto decisions = replay_decisions(dev->ds);
        const qfilter::CalibrationResult r =
            qfilter::calibrate_filter(m->model, dev->ds, decisions, tau1);
        out->tau1 = r.tau1;
        out->tau2_star = r.tau2_star;
        out->dev_agreement_f1 = r.dev_agreement_f1;
        out->candidates_examined = r.candidates_examined;
    });
}

qf_status qf_evaluate(const qf_model* m, const qf_dataset* test, double tau1,
                      double tau2, qf_report* out) {
    return guarded([&] {
        require(m && test && out, "model, test and out must be non-NULL");
        require(tau1 >= 0.0 && tau1 <= 1.0, "tau1 out of [0,1]");
        const auto base =
            run_pipeline(test->ds, qfilter::TeacherKind::replay(), tau1);
        std::vector<double> f_scores;
        f_scores.reserve(test->ds.records.size());
        for (const qfilter::Question& q : test->ds.records)
            f_scores.push_back(qfilter::predict(m->model, q.text));

        const qfilter::FilterReport r =
            qfilter::compare(base, f_scores, tau1, tau2);
        out->tau1 = r.tau1;
        out->tau2_star = r.tau2_star;
        out->pct_filter = r.pct_filter;
        out->has_delta_pr = r.delta_pr.has_value() ? 1 : 0;
        out->delta_pr = r.delta_pr.value_or(0.0);
        out->delta_re = r.delta_re;
        out->delta_f1 = r.delta_f1;
        out->base = to_c(r.base);
        out->filtered = to_c(r.filtered);
    });
}

qf_status qf_sweep_csv(const qf_dataset* ds, const qf_model* m,
                       qf_sweep_mode mode, long long grid_points,
                       const char* out_path) {
    return guarded([&] {
        require(ds && out_path, "dataset and out_path must be non-NULL");
        require(mode == QF_SWEEP_MODEL_ONLY || m,
                "filter sweeps need a model");

        std::vector<double> sigma;
        std::vector<bool> correct;
        std::vector<double> f_scores;
        for (const qfilter::Question& q : ds->ds.records) {
            if (mode != QF_SWEEP_FILTER_ONLY) {
                if (!q.teacher_score)
                    throw qfilter::domain_error(
                        "sweep needs \"teacher_score\": missing on question "
                        "\"" + q.id + "\"");
                sigma.push_back(*q.teacher_score);
            }
            if (!q.correct)
                throw qfilter::domain_error(
                    "sweep needs \"correct\": missing on question \"" + q.id +
                    "\"");
            correct.push_back(*q.correct);
            if (mode != QF_SWEEP_MODEL_ONLY)
                f_scores.push_back(qfilter::predict(m->model, q.text));
        }

        const auto grid = qfilter::uniform_grid(grid_points);
        qfilter::Curve curve;
        switch (mode) {
            case QF_SWEEP_MODEL_ONLY:
                curve = qfilter::sweep(sigma, correct, grid);
                break;
            case QF_SWEEP_FILTER_ONLY:
                curve = qfilter::sweep(f_scores, correct, grid);
                break;
            case QF_SWEEP_JOINT:
                curve = qfilter::joint_sweep(f_scores, sigma, correct, grid);
                break;
            default:
                throw std::invalid_argument("unknown sweep mode");
        }
        qfilter::write_curve_csv(curve, out_path);
    });
}

qf_status qf_cost(long long n_questions, long long candidates_per_question,
                  long long batch_size, long long seq_len_m,
                  long long seq_len_f, double filter_fraction,
                  qf_cost_result* out) {
    return guarded([&] {
        require(out, "out must be non-NULL");
        qfilter::CostScenario s;
        s.n_questions = n_questions;
        s.candidates_per_question = candidates_per_question;
        s.batch_size = batch_size;
        s.seq_len_m = seq_len_m;
        s.seq_len_f = seq_len_f;
        s.filter_fraction = filter_fraction;
        const qfilter::PipelineCost c = qfilter::pipeline_cost(s);
        out->baseline_cost = c.baseline_cost;
        out->filtered_cost = c.filtered_cost;
        out->cost_ratio = qfilter::cost_ratio(seq_len_m, seq_len_f);
        out->savings_pct = qfilter::savings_pct(s);
        out->baseline_m_batches = c.baseline_m_batches;
        out->filtered_m_batches = c.filtered_m_batches;
        out->f_batches = c.f_batches;
    });
}

}  // extern "C"
