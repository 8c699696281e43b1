#include <doctest.h>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qfilter/dataset.hpp"
#include "qfilter/errors.hpp"
#include "qfilter/filter.hpp"

using namespace qfilter;

namespace {

Dataset scored_dataset(int n) {
    Dataset ds;
    for (int i = 0; i < n; ++i) {
        Question q;
        q.id = "q" + std::to_string(i);
        q.text = "t" + std::to_string(i % 7) + " t" + std::to_string(i % 5) +
                 " t" + std::to_string(i % 3);
        q.teacher_score = (i + 0.5) / n;
        q.correct = (i % 3) == 0;
        ds.records.push_back(q);
    }
    return ds;
}

std::vector<Decision> replayed(const Dataset& ds) {
    std::vector<Decision> out;
    for (const Question& q : ds.records) {
        Decision d;
        d.question_id = q.id;
        d.sigma = q.teacher_score.value_or(0.0);
        d.correct = q.correct;
        out.push_back(d);
    }
    return out;
}

FeatureConfig small_features() {
    FeatureConfig feat;
    feat.dimension = 1u << 10;
    return feat;
}

}  // namespace

TEST_CASE("loss_regression: squared error and its derivative") {
    auto [l0, g0] = loss_regression(0.3, 0.3);
    CHECK(l0 == 0.0);
    CHECK(g0 == 0.0);
    auto [l1, g1] = loss_regression(0.8, 0.3);
    CHECK(l1 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(g1 == doctest::Approx(1.0).epsilon(1e-12));
    auto [l2, g2] = loss_regression(0.0, 1.0);
    CHECK(l2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g2 == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("loss_classification: cross entropy and its derivative") {
    auto [l0, g0] = loss_classification(0.5, 1.0);
    CHECK(l0 == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    auto [l1, g1] = loss_classification(0.9, 0.0);
    CHECK(l1 == doctest::Approx(2.3025850929940455).epsilon(1e-12));
    CHECK(g1 == doctest::Approx(10.0).epsilon(1e-9));
    // clamped extremes stay finite
    auto [l2, g2] = loss_classification(1.0, 1.0);
    CHECK(std::isfinite(l2));
    CHECK(l2 >= 0.0);
}

TEST_CASE("make_targets: distillation passes sigma through") {
    Dataset ds = scored_dataset(10);
    auto decisions = replayed(ds);
    auto targets =
        make_targets(ds, decisions, TargetStrategy::distill_regression());
    REQUIRE(targets.size() == 10);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        CHECK(targets[i].first == ds.records[i].id);
        CHECK(targets[i].second == decisions[i].sigma);
    }
}

TEST_CASE("make_targets: classification thresholds the sigma exactly") {
    Dataset ds = scored_dataset(10);
    auto decisions = replayed(ds);
    auto reg =
        make_targets(ds, decisions, TargetStrategy::distill_regression());
    auto cls = make_targets(ds, decisions,
                            TargetStrategy::distill_classification(0.45));
    for (std::size_t i = 0; i < reg.size(); ++i)
        CHECK(cls[i].second == (reg[i].second > 0.45 ? 1.0 : 0.0));

    auto all_one =
        make_targets(ds, decisions, TargetStrategy::distill_classification(0.0));
    for (const auto& [id, t] : all_one) CHECK(t == 1.0);
}

TEST_CASE("make_targets: correctness prefers the decision, then the record") {
    Dataset ds = scored_dataset(4);
    auto decisions = replayed(ds);
    decisions[1].correct = true;
    ds.records[1].correct = false;
    auto targets = make_targets(ds, decisions, TargetStrategy::correctness());
    CHECK(targets[1].second == 1.0);

    decisions[2].correct.reset();
    ds.records[2].correct = true;
    targets = make_targets(ds, decisions, TargetStrategy::correctness());
    CHECK(targets[2].second == 1.0);

    decisions[3].correct.reset();
    ds.records[3].correct.reset();
    CHECK_THROWS_WITH_AS(
        make_targets(ds, decisions, TargetStrategy::correctness()),
        doctest::Contains("q3"), domain_error);
}

TEST_CASE("make_targets: wellformed reads the stored score") {
    Dataset ds = scored_dataset(3);
    ds.records[0].wellformed = 0.25;
    ds.records[1].wellformed = 1.0;
    ds.records[2].wellformed = 0.0;
    auto targets = make_targets(ds, {}, TargetStrategy::wellformed());
    CHECK(targets[0].second == 0.25);
    CHECK(targets[1].second == 1.0);

    ds.records[1].wellformed.reset();
    CHECK_THROWS_WITH_AS(make_targets(ds, {}, TargetStrategy::wellformed()),
                         doctest::Contains("wellformed"), domain_error);
}

TEST_CASE("make_targets rejects misaligned decisions") {
    Dataset ds = scored_dataset(4);
    auto decisions = replayed(ds);
    decisions.pop_back();
    CHECK_THROWS_AS(
        make_targets(ds, decisions, TargetStrategy::distill_regression()),
        domain_error);
    decisions = replayed(ds);
    std::swap(decisions[0], decisions[1]);
    CHECK_THROWS_AS(
        make_targets(ds, decisions, TargetStrategy::distill_regression()),
        domain_error);
}

TEST_CASE("distill_classification validates its threshold") {
    CHECK_THROWS_AS(TargetStrategy::distill_classification(1.5), domain_error);
    CHECK_THROWS_AS(TargetStrategy::distill_classification(-0.1), domain_error);
}

TEST_CASE("train with lr=0 returns the initialization") {
    Dataset ds = scored_dataset(20);
    auto targets = make_targets(ds, replayed(ds),
                                TargetStrategy::distill_regression());
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 1;
    FilterModel m = train(ds, targets, Head::regression, cfg, small_features(), 5);
    for (double w : m.weights) CHECK(w == 0.0);
    CHECK(m.bias == 0.0);
    CHECK(predict(m, ds.records[0].text) == 0.5);
    CHECK(m.epochs_trained == 1);
}

TEST_CASE("train is bit-deterministic in its seed") {
    Dataset ds = scored_dataset(64);
    auto targets = make_targets(ds, replayed(ds),
                                TargetStrategy::distill_regression());
    TrainConfig cfg;
    cfg.batch_size = 16;
    FilterModel a = train(ds, targets, Head::regression, cfg, small_features(), 9);
    FilterModel b = train(ds, targets, Head::regression, cfg, small_features(), 9);
    REQUIRE(a.weights.size() == b.weights.size());
    for (std::size_t i = 0; i < a.weights.size(); ++i)
        CHECK(a.weights[i] == b.weights[i]);
    CHECK(a.bias == b.bias);

    FilterModel c = train(ds, targets, Head::regression, cfg, small_features(), 10);
    bool any_differs = (a.bias != c.bias);
    for (std::size_t i = 0; i < a.weights.size() && !any_differs; ++i)
        any_differs = a.weights[i] != c.weights[i];
    CHECK(any_differs);
}

TEST_CASE("training loss does not climb under a gentle schedule") {
    Dataset ds = scored_dataset(128);
    auto targets = make_targets(ds, replayed(ds),
                                TargetStrategy::distill_regression());
    TrainConfig cfg;
    cfg.learning_rate = 0.5;
    cfg.epochs = 4;
    TrainStats stats;
    train(ds, targets, Head::regression, cfg, small_features(), 3, &stats);
    REQUIRE(stats.epoch_mean_loss.size() == 4);
    CHECK(stats.epoch_mean_loss.back() <= stats.epoch_mean_loss.front());
}

TEST_CASE("constant 0.5 targets keep the zero model at zero loss") {
    Dataset ds = scored_dataset(16);
    std::vector<std::pair<std::string, double>> targets;
    for (const Question& q : ds.records) targets.emplace_back(q.id, 0.5);
    TrainStats stats;
    FilterModel m = train(ds, targets, Head::regression, TrainConfig{},
                          small_features(), 1, &stats);
    for (double l : stats.epoch_mean_loss) CHECK(l == 0.0);
    for (double w : m.weights) CHECK(w == 0.0);
}

TEST_CASE("train validates its inputs") {
    Dataset ds = scored_dataset(8);
    auto targets = make_targets(ds, replayed(ds),
                                TargetStrategy::distill_regression());

    CHECK_THROWS_AS(train(Dataset{}, {}, Head::regression, TrainConfig{},
                          small_features(), 1),
                    domain_error);

    TrainConfig bad;
    bad.learning_rate = -1.0;
    CHECK_THROWS_AS(
        train(ds, targets, Head::regression, bad, small_features(), 1),
        domain_error);
    bad = TrainConfig{};
    bad.warmup_fraction = 1.0;
    CHECK_THROWS_AS(
        train(ds, targets, Head::regression, bad, small_features(), 1),
        domain_error);
    bad = TrainConfig{};
    bad.epochs = 0;
    CHECK_THROWS_AS(
        train(ds, targets, Head::regression, bad, small_features(), 1),
        domain_error);
    bad = TrainConfig{};
    bad.batch_size = 0;
    CHECK_THROWS_AS(
        train(ds, targets, Head::regression, bad, small_features(), 1),
        domain_error);

    // classification heads need binary targets and a threshold
    CHECK_THROWS_AS(train(ds, targets, Head::classification, TrainConfig{},
                          small_features(), 1, nullptr, 0.5),
                    domain_error);
    auto cls = make_targets(ds, replayed(ds),
                            TargetStrategy::distill_classification(0.5));
    CHECK_THROWS_AS(train(ds, cls, Head::classification, TrainConfig{},
                          small_features(), 1),
                    domain_error);
    CHECK_NOTHROW(train(ds, cls, Head::classification, TrainConfig{},
                        small_features(), 1, nullptr, 0.5));

    // a target list missing a record id
    auto short_targets = targets;
    short_targets.pop_back();
    CHECK_THROWS_AS(train(ds, short_targets, Head::regression, TrainConfig{},
                          small_features(), 1),
                    domain_error);
}

TEST_CASE("classification training stores tau1 on the model") {
    Dataset ds = scored_dataset(16);
    auto cls = make_targets(ds, replayed(ds),
                            TargetStrategy::distill_classification(0.3));
    FilterModel m = train(ds, cls, Head::classification, TrainConfig{},
                          small_features(), 2, nullptr, 0.3);
    CHECK(m.head == Head::classification);
    CHECK(m.tau1_trained == 0.3);
    CHECK_NOTHROW(m.validate());
}

TEST_CASE("train_sequential with a frozen second stage equals stage A") {
    Dataset a = scored_dataset(32);
    Dataset b;
    for (int i = 0; i < 8; ++i) {
        Question q;
        q.id = "b" + std::to_string(i);
        q.text = "t1 t2";
        q.teacher_score = 0.25;
        b.records.push_back(q);
    }
    auto ta = make_targets(a, replayed(a), TargetStrategy::distill_regression());
    auto tb = make_targets(b, replayed(b), TargetStrategy::distill_regression());

    TrainConfig cfg_a;
    TrainConfig cfg_b;
    cfg_b.learning_rate = 0.0;
    FilterModel seq = train_sequential(a, ta, b, tb, Head::regression, cfg_a,
                                       cfg_b, small_features(), 4);
    FilterModel alone =
        train(a, ta, Head::regression, cfg_a, small_features(), 4);
    REQUIRE(seq.weights.size() == alone.weights.size());
    for (std::size_t i = 0; i < seq.weights.size(); ++i)
        CHECK(seq.weights[i] == alone.weights[i]);
    CHECK(seq.bias == alone.bias);
    CHECK(seq.epochs_trained ==
          alone.epochs_trained + cfg_b.epochs);
}

TEST_CASE("gradient_check agrees with finite differences on fixed samples") {
    FeatureConfig feat = small_features();
    SparseVector x = featurize("t1 t2 t3 t4", feat);
    std::vector<double> weights(feat.dimension, 0.0);
    weights[x.entries[0].first] = 0.4;
    weights[x.entries[1].first] = -0.7;

    CHECK(gradient_check(Head::regression, x, 0.3, weights, 0.1) < 1e-4);
    CHECK(gradient_check(Head::classification, x, 1.0, weights, -0.2) < 1e-4);

    SparseVector zero;
    CHECK(gradient_check(Head::regression, zero, 0.5, weights, 0.25) < 1e-4);
}
