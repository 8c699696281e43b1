/* C interface to the question-filter toolkit.
 *
 * All functions return qf_status; on any non-QF_OK result the thread-local
 * message from qf_last_error() describes what went wrong. Handles are
 * opaque and owned by the caller via the matching _free function. NULL is
 * never a valid handle argument unless stated otherwise.
 */
#ifndef QFILTER_C_H
#define QFILTER_C_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qf_status {
    QF_OK = 0,
    QF_ERR_DOMAIN = 1, /* bad data or violated invariant */
    QF_ERR_IO = 2,     /* file missing, unreadable, or unwritable */
    QF_ERR_ARG = 3     /* invalid argument to an API call */
} qf_status;

typedef struct qf_dataset qf_dataset;
typedef struct qf_corpus qf_corpus;
typedef struct qf_model qf_model;

/* Message for the most recent failure on this thread. Never NULL. */
const char* qf_last_error(void);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */

qf_status qf_dataset_load(const char* path, qf_dataset** out);
qf_status qf_dataset_save(const qf_dataset* ds, const char* path);
long long qf_dataset_size(const qf_dataset* ds);
void qf_dataset_free(qf_dataset* ds);

/* Seeded permutation split; sizes floor(N*f_train), floor(N*f_dev),
 * remainder to test. Fractions must be non-negative and sum to 1. */
qf_status qf_dataset_split(const qf_dataset* ds, double f_train, double f_dev,
                           double f_test, unsigned long long seed,
                           qf_dataset** train, qf_dataset** dev,
                           qf_dataset** test);

/* Synthetic data: n random-token questions plus a hidden linear teacher
 * whose score and Bernoulli correctness label are stored on each record.
 * teacher may be NULL when the caller only wants the dataset. */
qf_status qf_generate(long long n, int vocab_size, int min_tokens,
                      int max_tokens, double noise, unsigned long long seed,
                      qf_dataset** ds, qf_model** teacher);

/* ------------------------------------------------------------------ */
/* Teachers                                                            */

qf_status qf_corpus_load(const char* path, qf_corpus** out);
void qf_corpus_free(qf_corpus* c);

/* Fill teacher_score on every record in place. */
qf_status qf_score_lexical(qf_dataset* ds, const qf_corpus* corpus, int k);
qf_status qf_score_synthetic(qf_dataset* ds, const qf_model* teacher);

/* ------------------------------------------------------------------ */
/* Models                                                              */

qf_status qf_model_load(const char* path, qf_model** out);
qf_status qf_model_save(const qf_model* m, const char* path);
void qf_model_free(qf_model* m);

/* Filter score for a question text, in (0,1). */
qf_status qf_model_predict(const qf_model* m, const char* question_text,
                           double* score);

typedef enum qf_strategy {
    QF_STRAT_DISTILL_REGRESSION = 0,
    QF_STRAT_DISTILL_CLASSIFICATION = 1,
    QF_STRAT_CORRECTNESS = 2,
    QF_STRAT_WELLFORMED = 3
} qf_strategy;

typedef enum qf_head {
    QF_HEAD_REGRESSION = 0,
    QF_HEAD_CLASSIFICATION = 1
} qf_head;

typedef struct qf_train_params {
    double learning_rate;
    long long epochs;
    long long batch_size;
    double warmup_fraction;
    long long dimension;   /* power of two */
    int use_bigrams;       /* 0 or 1 */
    unsigned long long seed;
} qf_train_params;

/* Fills the toolkit defaults. */
void qf_train_params_init(qf_train_params* p);

/* Trains a filter on a scored dataset. tau1 parameterizes the
 * classification target (and is stored on classification-head models).
 * final_loss may be NULL; otherwise receives the last epoch's mean
 * training loss. */
qf_status qf_train(const qf_dataset* ds, qf_strategy strategy, double tau1,
                   qf_head head, const qf_train_params* params, qf_model** out,
                   double* final_loss);

/* Stage-wise training: dataset A with params_a, then dataset B continuing
 * from the stage-A weights with params_b (seed taken from params_a). */
qf_status qf_train_sequential(const qf_dataset* ds_a, const qf_dataset* ds_b,
                              qf_strategy strategy, double tau1, qf_head head,
                              const qf_train_params* params_a,
                              const qf_train_params* params_b, qf_model** out,
                              double* final_loss);

/* ------------------------------------------------------------------ */
/* Evaluation                                                          */

typedef struct qf_prref1 {
    int has_precision; /* 0 when nothing was answered */
    double precision;
    double recall;
    double f1;
    long long answered;
    long long correct_answered;
    long long total;
} qf_prref1;

typedef struct qf_calibration {
    double tau1;
    double tau2_star;
    double dev_agreement_f1;
    long long candidates_examined;
} qf_calibration;

/* Picks the filter threshold that best agrees with the answer/abstain
 * decision implied by the stored teacher scores at tau1. */
qf_status qf_calibrate(const qf_model* m, const qf_dataset* dev, double tau1,
                       qf_calibration* out);

typedef struct qf_report {
    double tau1;
    double tau2_star;
    double pct_filter;
    int has_delta_pr;
    double delta_pr;
    double delta_re;
    double delta_f1;
    qf_prref1 base;
    qf_prref1 filtered;
} qf_report;

/* Evaluates the answer system (replayed from stored teacher scores) with
 * and without the filter in front, on a labeled dataset. */
qf_status qf_evaluate(const qf_model* m, const qf_dataset* test, double tau1,
                      double tau2, qf_report* out);

typedef enum qf_sweep_mode {
    QF_SWEEP_MODEL_ONLY = 0,  /* threshold the teacher score */
    QF_SWEEP_FILTER_ONLY = 1, /* threshold the filter score */
    QF_SWEEP_JOINT = 2        /* one shared threshold for both */
} qf_sweep_mode;

/* Writes a threshold-sweep curve as CSV. model may be NULL for
 * QF_SWEEP_MODEL_ONLY and is required otherwise. */
qf_status qf_sweep_csv(const qf_dataset* ds, const qf_model* m,
                       qf_sweep_mode mode, long long grid_points,
                       const char* out_path);

/* ------------------------------------------------------------------ */
/* Cost model                                                          */

typedef struct qf_cost_result {
    double baseline_cost;  /* in M-batch units */
    double filtered_cost;
    double cost_ratio;
    double savings_pct;
    long long baseline_m_batches;
    long long filtered_m_batches;
    long long f_batches;
} qf_cost_result;

qf_status qf_cost(long long n_questions, long long candidates_per_question,
                  long long batch_size, long long seq_len_m,
                  long long seq_len_f, double filter_fraction,
                  qf_cost_result* out);

#ifdef __cplusplus
}
#endif

#endif /* QFILTER_C_H */
