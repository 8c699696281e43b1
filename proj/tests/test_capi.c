/* Exercises the shared-library interface from plain C: every handle type,
 * the happy path end to end, and the error-code mapping. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "qfilter/qfilter_c.h"

static int checks = 0;
static int failures = 0;

#define CHECK(cond)                                                     \
    do {                                                                \
        ++checks;                                                       \
        if (!(cond)) {                                                  \
            ++failures;                                                 \
            fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__,     \
                    #cond);                                             \
        }                                                               \
    } while (0)

static const char* kDatasetPath = "capi_ds.jsonl";
static const char* kModelPath = "capi_model.json";
static const char* kCurvePath = "capi_curve.csv";
static const char* kCorpusPath = "capi_corpus.jsonl";

static void cleanup(void) {
    remove(kDatasetPath);
    remove(kModelPath);
    remove(kCurvePath);
    remove(kCorpusPath);
}

static long file_size(const char* path) {
    FILE* f = fopen(path, "rb");
    long n = -1;
    if (f) {
        fseek(f, 0, SEEK_END);
        n = ftell(f);
        fclose(f);
    }
    return n;
}

int main(void) {
    qf_train_params params;
    qf_train_params_init(&params);
    CHECK(params.learning_rate == 5.0);
    CHECK(params.epochs == 3);
    CHECK(params.batch_size == 128);
    CHECK(params.warmup_fraction == 0.05);
    CHECK(params.dimension == (1LL << 18));
    CHECK(params.use_bigrams == 1);
    CHECK(params.seed == 42ULL);

    /* generation */
    qf_dataset* ds = NULL;
    qf_model* teacher = NULL;
    CHECK(qf_generate(200, 12, 4, 4, 0.0, 7, &ds, &teacher) == QF_OK);
    CHECK(ds != NULL);
    CHECK(teacher != NULL);
    CHECK(qf_dataset_size(ds) == 200);

    CHECK(qf_generate(10, 1, 4, 4, 0.0, 7, NULL, NULL) == QF_ERR_ARG);
    qf_dataset* bad = NULL;
    CHECK(qf_generate(10, 1, 4, 4, 0.0, 7, &bad, NULL) == QF_ERR_DOMAIN);
    CHECK(bad == NULL);
    CHECK(strlen(qf_last_error()) > 0);

    /* re-scoring with the returned teacher is a no-op on a noiseless set */
    CHECK(qf_score_synthetic(ds, teacher) == QF_OK);

    /* dataset round trip */
    CHECK(qf_dataset_save(ds, kDatasetPath) == QF_OK);
    qf_dataset* reloaded = NULL;
    CHECK(qf_dataset_load(kDatasetPath, &reloaded) == QF_OK);
    CHECK(qf_dataset_size(reloaded) == 200);

    CHECK(qf_dataset_load("no_such_file.jsonl", &bad) == QF_ERR_IO);
    CHECK(strlen(qf_last_error()) > 0);
    CHECK(qf_dataset_load(NULL, &bad) == QF_ERR_ARG);

    /* split */
    qf_dataset* train = NULL;
    qf_dataset* dev = NULL;
    qf_dataset* test = NULL;
    CHECK(qf_dataset_split(ds, 0.7, 0.15, 0.15, 11, &train, &dev, &test) ==
          QF_OK);
    CHECK(qf_dataset_size(train) == 140);
    CHECK(qf_dataset_size(dev) == 30);
    CHECK(qf_dataset_size(test) == 30);
    CHECK(qf_dataset_split(ds, 0.7, 0.7, 0.1, 11, &train, &dev, &test) ==
          QF_ERR_DOMAIN);

    /* training */
    params.dimension = 1LL << 12;
    params.epochs = 2;
    qf_model* model = NULL;
    double final_loss = -1.0;
    CHECK(qf_train(train, QF_STRAT_DISTILL_REGRESSION, 0.0, QF_HEAD_REGRESSION,
                   &params, &model, &final_loss) == QF_OK);
    CHECK(model != NULL);
    CHECK(final_loss >= 0.0);
    CHECK(final_loss < 1.0);

    double score = -1.0;
    CHECK(qf_model_predict(model, "t0 t1 t2 t3", &score) == QF_OK);
    CHECK(score > 0.0);
    CHECK(score < 1.0);
    CHECK(qf_model_predict(model, NULL, &score) == QF_ERR_ARG);
    CHECK(qf_train(NULL, QF_STRAT_DISTILL_REGRESSION, 0.0, QF_HEAD_REGRESSION,
                   &params, &model, NULL) == QF_ERR_ARG);

    /* model round trip preserves predictions bit for bit */
    CHECK(qf_model_save(model, kModelPath) == QF_OK);
    qf_model* model2 = NULL;
    CHECK(qf_model_load(kModelPath, &model2) == QF_OK);
    double score2 = -1.0;
    CHECK(qf_model_predict(model2, "t0 t1 t2 t3", &score2) == QF_OK);
    CHECK(score2 == score);

    /* sequential training */
    qf_model* seq = NULL;
    qf_train_params params_b = params;
    params_b.learning_rate = 0.75;
    CHECK(qf_train_sequential(train, dev, QF_STRAT_DISTILL_REGRESSION, 0.0,
                              QF_HEAD_REGRESSION, &params, &params_b, &seq,
                              NULL) == QF_OK);
    CHECK(seq != NULL);

    /* calibration and evaluation */
    qf_calibration cal;
    CHECK(qf_calibrate(model, dev, 0.5, &cal) == QF_OK);
    CHECK(cal.tau1 == 0.5);
    CHECK(cal.tau2_star >= 0.0);
    CHECK(cal.tau2_star <= 1.0);
    CHECK(cal.dev_agreement_f1 >= 0.0);
    CHECK(cal.dev_agreement_f1 <= 1.0);
    CHECK(cal.candidates_examined >= 2);
    CHECK(qf_calibrate(model, dev, 1.5, &cal) == QF_ERR_DOMAIN);

    qf_report report;
    CHECK(qf_evaluate(model, test, 0.5, cal.tau2_star, &report) == QF_OK);
    CHECK(report.base.total == 30);
    CHECK(report.filtered.total == 30);
    CHECK(report.pct_filter >= 0.0);
    CHECK(report.pct_filter <= 100.0);
    CHECK(report.tau1 == 0.5);
    CHECK(report.tau2_star == cal.tau2_star);
    CHECK(report.filtered.answered <= report.base.answered);

    /* sweep CSV */
    CHECK(qf_sweep_csv(test, model, QF_SWEEP_JOINT, 11, kCurvePath) == QF_OK);
    CHECK(file_size(kCurvePath) > 40);
    CHECK(qf_sweep_csv(test, NULL, QF_SWEEP_JOINT, 11, kCurvePath) ==
          QF_ERR_ARG);
    CHECK(qf_sweep_csv(test, NULL, QF_SWEEP_MODEL_ONLY, 11, kCurvePath) ==
          QF_OK);

    /* lexical teacher */
    FILE* f = fopen(kCorpusPath, "wb");
    CHECK(f != NULL);
    if (f) {
        fputs("{\"doc_id\": \"d1\", \"text\": \"t0 t1 t2 t3. t4 t5 t6.\"}\n", f);
        fputs("{\"doc_id\": \"d2\", \"text\": \"t7 t8. t9 t10 t11.\"}\n", f);
        fclose(f);
    }
    qf_corpus* corpus = NULL;
    CHECK(qf_corpus_load(kCorpusPath, &corpus) == QF_OK);
    CHECK(qf_score_lexical(reloaded, corpus, 2) == QF_OK);
    CHECK(qf_score_lexical(reloaded, corpus, 0) == QF_ERR_DOMAIN);
    CHECK(qf_corpus_load("missing_corpus.jsonl", &corpus) == QF_ERR_IO);

    /* cost model */
    qf_cost_result cost;
    CHECK(qf_cost(1000, 400, 100, 128, 32, 0.2, &cost) == QF_OK);
    CHECK(cost.baseline_m_batches == 4000);
    CHECK(cost.filtered_m_batches == 3200);
    CHECK(cost.f_batches == 10);
    CHECK(cost.cost_ratio == 16.0);
    CHECK(cost.baseline_cost == 4000.0);
    CHECK(fabs(cost.filtered_cost - 3200.625) < 1e-9);
    CHECK(fabs(cost.savings_pct - 19.984375) < 1e-9);
    CHECK(qf_cost(0, 400, 100, 128, 32, 0.2, &cost) == QF_ERR_DOMAIN);

    qf_model_free(seq);
    qf_model_free(model2);
    qf_model_free(model);
    qf_model_free(teacher);
    qf_corpus_free(corpus);
    qf_dataset_free(test);
    qf_dataset_free(dev);
    qf_dataset_free(train);
    qf_dataset_free(reloaded);
    qf_dataset_free(ds);
    cleanup();

    printf("%d checks, %d failures\n", checks, failures);
    return failures == 0 ? 0 : 1;
}
