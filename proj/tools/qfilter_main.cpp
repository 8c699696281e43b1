#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "qfilter/qfilter_c.h"

namespace {

int from_status(qf_status s) {
    switch (s) {
        case QF_OK:
            return 0;
        case QF_ERR_DOMAIN:
            return 1;
        case QF_ERR_IO:
        case QF_ERR_ARG:
            return 2;
    }
    return 1;
}

int report_failure(qf_status s) {
    std::fprintf(stderr, "error: %s\n", qf_last_error());
    return from_status(s);
}

// RAII wrappers so early returns cannot leak handles
using dataset_ptr = std::unique_ptr<qf_dataset, decltype(&qf_dataset_free)>;
using corpus_ptr = std::unique_ptr<qf_corpus, decltype(&qf_corpus_free)>;
using model_ptr = std::unique_ptr<qf_model, decltype(&qf_model_free)>;

dataset_ptr wrap(qf_dataset* p) { return {p, &qf_dataset_free}; }
corpus_ptr wrap(qf_corpus* p) { return {p, &qf_corpus_free}; }
model_ptr wrap(qf_model* p) { return {p, &qf_model_free}; }

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int usage_error(const std::string& message) {
    std::fprintf(stderr, "error: %s\n", message.c_str());
    return 2;
}

struct ScoreArgs {
    std::string input;
    std::string teacher;
    std::string corpus;
    std::string model;
    int k = 3;
    std::string out;
};

int cmd_score(const ScoreArgs& a) {
    if (a.teacher == "replay")
        return usage_error(
            "the replay teacher reads scores already stored on the input; "
            "there is nothing to score");

    qf_dataset* raw_ds = nullptr;
    if (qf_status s = qf_dataset_load(a.input.c_str(), &raw_ds); s != QF_OK)
        return report_failure(s);
    dataset_ptr ds = wrap(raw_ds);

    if (a.teacher == "lexical") {
        if (a.corpus.empty())
            return usage_error("--teacher lexical requires --corpus");
        qf_corpus* raw_corpus = nullptr;
        if (qf_status s = qf_corpus_load(a.corpus.c_str(), &raw_corpus);
            s != QF_OK)
            return report_failure(s);
        corpus_ptr corpus = wrap(raw_corpus);
        if (qf_status s = qf_score_lexical(ds.get(), corpus.get(), a.k);
            s != QF_OK)
            return report_failure(s);
    } else {
        if (a.model.empty())
            return usage_error("--teacher synthetic requires --model");
        qf_model* raw_teacher = nullptr;
        if (qf_status s = qf_model_load(a.model.c_str(), &raw_teacher);
            s != QF_OK)
            return report_failure(s);
        model_ptr teacher = wrap(raw_teacher);
        if (qf_status s = qf_score_synthetic(ds.get(), teacher.get());
            s != QF_OK)
            return report_failure(s);
    }

    if (qf_status s = qf_dataset_save(ds.get(), a.out.c_str()); s != QF_OK)
        return report_failure(s);
    std::printf("scored %lld questions -> %s\n", qf_dataset_size(ds.get()),
                a.out.c_str());
    return 0;
}

struct TrainArgs {
    std::string input;
    std::string strategy;
    std::string head;  // empty = pick by strategy
    double tau1 = 0.5;
    qf_train_params params{};
    std::string out;
};

int cmd_train(const TrainArgs& a) {
    qf_strategy strategy = QF_STRAT_DISTILL_REGRESSION;
    qf_head default_head = QF_HEAD_REGRESSION;
    if (a.strategy == "distill-regression") {
        strategy = QF_STRAT_DISTILL_REGRESSION;
        default_head = QF_HEAD_REGRESSION;
    } else if (a.strategy == "distill-classification") {
        strategy = QF_STRAT_DISTILL_CLASSIFICATION;
        default_head = QF_HEAD_CLASSIFICATION;
    } else if (a.strategy == "correctness") {
        strategy = QF_STRAT_CORRECTNESS;
        default_head = QF_HEAD_CLASSIFICATION;
    } else {
        strategy = QF_STRAT_WELLFORMED;
        default_head = QF_HEAD_REGRESSION;
    }
    qf_head head = default_head;
    if (a.head == "regression") head = QF_HEAD_REGRESSION;
    else if (a.head == "classification") head = QF_HEAD_CLASSIFICATION;

    qf_dataset* raw_ds = nullptr;
    if (qf_status s = qf_dataset_load(a.input.c_str(), &raw_ds); s != QF_OK)
        return report_failure(s);
    dataset_ptr ds = wrap(raw_ds);

    qf_model* raw_model = nullptr;
    double final_loss = 0.0;
    if (qf_status s = qf_train(ds.get(), strategy, a.tau1, head, &a.params,
                               &raw_model, &final_loss);
        s != QF_OK)
        return report_failure(s);
    model_ptr model = wrap(raw_model);

    if (qf_status s = qf_model_save(model.get(), a.out.c_str()); s != QF_OK)
        return report_failure(s);
    std::printf("final training loss: %.6f\n", final_loss);
    std::printf("model written to %s\n", a.out.c_str());
    return 0;
}

struct CalibrateArgs {
    std::string model;
    std::string input;
    double tau1 = 0.5;
    std::string out;
};

int cmd_calibrate(const CalibrateArgs& a) {
    qf_model* raw_model = nullptr;
    if (qf_status s = qf_model_load(a.model.c_str(), &raw_model); s != QF_OK)
        return report_failure(s);
    model_ptr model = wrap(raw_model);

    qf_dataset* raw_dev = nullptr;
    if (qf_status s = qf_dataset_load(a.input.c_str(), &raw_dev); s != QF_OK)
        return report_failure(s);
    dataset_ptr dev = wrap(raw_dev);

    qf_calibration cal{};
    if (qf_status s = qf_calibrate(model.get(), dev.get(), a.tau1, &cal);
        s != QF_OK)
        return report_failure(s);

    std::printf("tau1              %.6f\n", cal.tau1);
    std::printf("tau2*             %.6f\n", cal.tau2_star);
    std::printf("dev agreement F1  %.6f\n", cal.dev_agreement_f1);
    std::printf("candidates tried  %lld\n", cal.candidates_examined);

    if (!a.out.empty()) {
        std::ofstream json(a.out, std::ios::binary);
        if (!json) return usage_error("cannot open output file: " + a.out);
        json << "{\"tau1\": " << fmt17(cal.tau1)
             << ", \"tau2_star\": " << fmt17(cal.tau2_star)
             << ", \"dev_agreement_f1\": " << fmt17(cal.dev_agreement_f1)
             << "}\n";
    }
    return 0;
}

struct EvaluateArgs {
    std::string model;
    std::string input;
    double tau1 = 0.5;
    double tau2 = 0.0;
    std::string out;
};

void append_prref1(std::string& s, const qf_prref1& m) {
    s += "{\"precision\": ";
    s += m.has_precision ? fmt17(m.precision) : "null";
    s += ", \"recall\": " + fmt17(m.recall);
    s += ", \"f1\": " + fmt17(m.f1);
    s += ", \"answered\": " + std::to_string(m.answered);
    s += ", \"correct_answered\": " + std::to_string(m.correct_answered);
    s += ", \"total\": " + std::to_string(m.total);
    s += "}";
}

int cmd_evaluate(const EvaluateArgs& a) {
    qf_model* raw_model = nullptr;
    if (qf_status s = qf_model_load(a.model.c_str(), &raw_model); s != QF_OK)
        return report_failure(s);
    model_ptr model = wrap(raw_model);

    qf_dataset* raw_test = nullptr;
    if (qf_status s = qf_dataset_load(a.input.c_str(), &raw_test); s != QF_OK)
        return report_failure(s);
    dataset_ptr test = wrap(raw_test);

    qf_report r{};
    if (qf_status s =
            qf_evaluate(model.get(), test.get(), a.tau1, a.tau2, &r);
        s != QF_OK)
        return report_failure(s);

    auto print_side = [](const char* name, const qf_prref1& m) {
        if (m.has_precision)
            std::printf("%-9s Pr %.4f  Re %.4f  F1 %.4f  (%lld/%lld answered)\n",
                        name, m.precision, m.recall, m.f1, m.correct_answered,
                        m.answered);
        else
            std::printf("%-9s Pr   -     Re %.4f  F1 %.4f  (0 answered)\n",
                        name, m.recall, m.f1);
    };
    std::printf("tau1 %.4f  tau2 %.4f\n", r.tau1, r.tau2_star);
    print_side("base", r.base);
    print_side("filtered", r.filtered);
    std::printf("%%filter   %.4f\n", r.pct_filter);
    if (r.has_delta_pr) std::printf("delta Pr  %+.4f\n", r.delta_pr);
    std::printf("delta Re  %+.4f\n", r.delta_re);
    std::printf("delta F1  %+.4f\n", r.delta_f1);

    if (!a.out.empty()) {
        std::string s;
        s += "{\"tau1\": " + fmt17(r.tau1);
        s += ", \"tau2_star\": " + fmt17(r.tau2_star);
        s += ", \"pct_filter\": " + fmt17(r.pct_filter);
        s += ", \"delta_pr\": ";
        s += r.has_delta_pr ? fmt17(r.delta_pr) : "null";
        s += ", \"delta_re\": " + fmt17(r.delta_re);
        s += ", \"delta_f1\": " + fmt17(r.delta_f1);
        s += ", \"base\": ";
        append_prref1(s, r.base);
        s += ", \"filtered\": ";
        append_prref1(s, r.filtered);
        s += "}\n";
        std::ofstream json(a.out, std::ios::binary);
        if (!json) return usage_error("cannot open output file: " + a.out);
        json << s;
    }
    return 0;
}

struct SweepArgs {
    std::string input;
    std::string mode = "model-only";
    std::string model;
    long long grid = 1001;
    std::string out;
};

int cmd_sweep(const SweepArgs& a) {
    qf_sweep_mode mode = QF_SWEEP_MODEL_ONLY;
    if (a.mode == "filter-only") mode = QF_SWEEP_FILTER_ONLY;
    else if (a.mode == "joint") mode = QF_SWEEP_JOINT;

    if (mode != QF_SWEEP_MODEL_ONLY && a.model.empty())
        return usage_error("--mode " + a.mode + " requires --model");

    qf_dataset* raw_ds = nullptr;
    if (qf_status s = qf_dataset_load(a.input.c_str(), &raw_ds); s != QF_OK)
        return report_failure(s);
    dataset_ptr ds = wrap(raw_ds);

    model_ptr model = wrap(static_cast<qf_model*>(nullptr));
    if (!a.model.empty()) {
        qf_model* raw_model = nullptr;
        if (qf_status s = qf_model_load(a.model.c_str(), &raw_model);
            s != QF_OK)
            return report_failure(s);
        model = wrap(raw_model);
    }

    if (qf_status s = qf_sweep_csv(ds.get(), model.get(), mode, a.grid,
                                   a.out.c_str());
        s != QF_OK)
        return report_failure(s);
    std::printf("curve written to %s\n", a.out.c_str());
    return 0;
}

struct CostArgs {
    long long n_questions = 1000;
    long long candidates = 400;
    long long batch_size = 100;
    long long seq_m = 128;
    long long seq_f = 32;
    double phi = 0.2;
};

int cmd_cost(const CostArgs& a) {
    qf_cost_result r{};
    if (qf_status s = qf_cost(a.n_questions, a.candidates, a.batch_size,
                              a.seq_m, a.seq_f, a.phi, &r);
        s != QF_OK)
        return report_failure(s);

    std::printf("baseline M-batches  %lld\n", r.baseline_m_batches);
    std::printf("filtered M-batches  %lld\n", r.filtered_m_batches);
    std::printf("F batches           %lld\n", r.f_batches);
    std::printf("cost ratio (M/F)    %.4f\n", r.cost_ratio);
    std::printf("filtered cost       %.6f M-batch units\n", r.filtered_cost);
    std::printf("savings             %.4f%%\n", r.savings_pct);
    std::printf("note: retrieval and sentence-splitting costs are excluded; "
                "real savings are larger\n");
    return 0;
}

struct GenArgs {
    long long n = 1000;
    int vocab = 12;
    int min_tokens = 4;
    int max_tokens = 4;
    double noise = 0.0;
    unsigned long long seed = 42;
    std::string out;
    std::string teacher_out;
};

int cmd_gen(const GenArgs& a) {
    qf_dataset* raw_ds = nullptr;
    qf_model* raw_teacher = nullptr;
    if (qf_status s =
            qf_generate(a.n, a.vocab, a.min_tokens, a.max_tokens, a.noise,
                        a.seed, &raw_ds,
                        a.teacher_out.empty() ? nullptr : &raw_teacher);
        s != QF_OK)
        return report_failure(s);
    dataset_ptr ds = wrap(raw_ds);
    model_ptr teacher = wrap(raw_teacher);

    if (qf_status s = qf_dataset_save(ds.get(), a.out.c_str()); s != QF_OK)
        return report_failure(s);
    if (!a.teacher_out.empty()) {
        if (qf_status s = qf_model_save(teacher.get(), a.teacher_out.c_str());
            s != QF_OK)
            return report_failure(s);
    }
    std::printf("generated %lld questions -> %s\n", a.n, a.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"question-filter toolkit: distill an answer system's "
                 "confidence into a cheap question filter, calibrate its "
                 "threshold, and measure the precision/recall/cost tradeoff"};
    app.require_subcommand(1);

    ScoreArgs score;
    auto* sc = app.add_subcommand("score",
                                  "fill teacher_score on every record");
    sc->add_option("--input", score.input, "input dataset (JSONL)")
        ->required();
    sc->add_option("--teacher", score.teacher, "teacher kind")
        ->required()
        ->check(CLI::IsMember({"lexical", "replay", "synthetic"}));
    sc->add_option("--corpus", score.corpus, "corpus JSONL (lexical teacher)");
    sc->add_option("--model", score.model,
                   "teacher parameters (synthetic teacher)");
    sc->add_option("--k", score.k, "documents to retrieve per question")
        ->check(CLI::PositiveNumber);
    sc->add_option("--out", score.out, "output dataset path")->required();

    TrainArgs train;
    qf_train_params_init(&train.params);
    auto* tr = app.add_subcommand("train", "fit a question filter");
    tr->add_option("--input", train.input, "scored dataset (JSONL)")
        ->required();
    tr->add_option("--strategy", train.strategy, "training target")
        ->required()
        ->check(CLI::IsMember({"distill-regression", "distill-classification",
                               "correctness", "wellformed"}));
    tr->add_option("--head", train.head,
                   "output head (default chosen by strategy)")
        ->check(CLI::IsMember({"regression", "classification"}));
    tr->add_option("--tau1", train.tau1,
                   "answer threshold for classification targets")
        ->check(CLI::Range(0.0, 1.0));
    tr->add_option("--lr", train.params.learning_rate, "learning rate");
    tr->add_option("--epochs", train.params.epochs, "training epochs")
        ->check(CLI::PositiveNumber);
    tr->add_option("--batch-size", train.params.batch_size, "minibatch size")
        ->check(CLI::PositiveNumber);
    tr->add_option("--warmup", train.params.warmup_fraction,
                   "fraction of steps for linear warmup");
    tr->add_option("--dim", train.params.dimension,
                   "feature dimension (power of two)");
    bool bigrams = train.params.use_bigrams != 0;
    tr->add_flag("--bigrams,!--no-bigrams", bigrams,
                 "hash adjacent token pairs too");
    tr->add_option("--seed", train.params.seed, "shuffle seed");
    tr->add_option("--out", train.out, "model output path")->required();

    CalibrateArgs calibrate;
    auto* ca = app.add_subcommand(
        "calibrate", "pick tau2* maximizing agreement F1 on a dev set");
    ca->add_option("--model", calibrate.model, "filter model path")
        ->required();
    ca->add_option("--input", calibrate.input, "scored dev dataset")
        ->required();
    ca->add_option("--tau1", calibrate.tau1, "answer threshold")
        ->check(CLI::Range(0.0, 1.0));
    ca->add_option("--out", calibrate.out, "JSON result path");

    EvaluateArgs evaluate;
    auto* ev = app.add_subcommand(
        "evaluate", "compare the system with and without the filter");
    ev->add_option("--model", evaluate.model, "filter model path")
        ->required();
    ev->add_option("--input", evaluate.input, "scored, labeled test dataset")
        ->required();
    ev->add_option("--tau1", evaluate.tau1, "answer threshold")
        ->check(CLI::Range(0.0, 1.0));
    ev->add_option("--tau2", evaluate.tau2, "filter threshold")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    ev->add_option("--out", evaluate.out, "JSON report path");

    SweepArgs sweep;
    auto* sw = app.add_subcommand("sweep", "threshold sweep curve as CSV");
    sw->add_option("--input", sweep.input, "scored, labeled dataset")
        ->required();
    sw->add_option("--mode", sweep.mode, "what the threshold applies to")
        ->check(CLI::IsMember({"model-only", "filter-only", "joint"}));
    sw->add_option("--model", sweep.model,
                   "filter model (filter-only and joint modes)");
    sw->add_option("--grid", sweep.grid, "number of thresholds")
        ->check(CLI::Range(2ll, 1000000ll));
    sw->add_option("--out", sweep.out, "CSV output path")->required();

    CostArgs cost;
    auto* co = app.add_subcommand("cost", "serving-cost arithmetic");
    co->add_option("--n-questions", cost.n_questions, "questions served")
        ->check(CLI::PositiveNumber);
    co->add_option("--candidates", cost.candidates,
                   "candidates per question")
        ->check(CLI::PositiveNumber);
    co->add_option("--batch-size", cost.batch_size, "batch size")
        ->check(CLI::PositiveNumber);
    co->add_option("--seq-m", cost.seq_m, "answer model sequence length")
        ->check(CLI::PositiveNumber);
    co->add_option("--seq-f", cost.seq_f, "filter sequence length")
        ->check(CLI::PositiveNumber);
    co->add_option("--phi", cost.phi, "fraction of questions filtered")
        ->check(CLI::Range(0.0, 1.0));

    GenArgs gen;
    auto* ge = app.add_subcommand(
        "gen", "synthetic questions from a hidden linear teacher");
    ge->add_option("--n", gen.n, "number of questions")
        ->check(CLI::PositiveNumber);
    ge->add_option("--vocab", gen.vocab, "vocabulary size")
        ->check(CLI::PositiveNumber);
    ge->add_option("--min-tokens", gen.min_tokens, "minimum question length")
        ->check(CLI::PositiveNumber);
    ge->add_option("--max-tokens", gen.max_tokens, "maximum question length")
        ->check(CLI::PositiveNumber);
    ge->add_option("--noise", gen.noise, "stddev of score perturbation");
    ge->add_option("--seed", gen.seed, "generator seed");
    ge->add_option("--out", gen.out, "dataset output path")->required();
    ge->add_option("--teacher-out", gen.teacher_out,
                   "also save the hidden teacher as a model file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    train.params.use_bigrams = bigrams ? 1 : 0;

    if (sc->parsed()) return cmd_score(score);
    if (tr->parsed()) return cmd_train(train);
    if (ca->parsed()) return cmd_calibrate(calibrate);
    if (ev->parsed()) return cmd_evaluate(evaluate);
    if (sw->parsed()) return cmd_sweep(sweep);
    if (co->parsed()) return cmd_cost(cost);
    if (ge->parsed()) return cmd_gen(gen);
    return 2;
}
