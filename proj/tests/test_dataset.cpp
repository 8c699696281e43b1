#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "qfilter/dataset.hpp"
#include "qfilter/errors.hpp"

using namespace qfilter;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

struct FileGuard {
    std::string path;
    ~FileGuard() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("dataset round trip preserves every field and absence") {
    Dataset ds;
    Question q1;
    q1.id = "q1";
    q1.text = "where is the tower";
    q1.candidates = std::vector<std::string>{"in paris", "in rome"};
    q1.gold_answers = std::vector<std::string>{"Paris"};
    q1.teacher_score = 0.625;
    q1.correct = true;
    q1.wellformed = 0.5;
    Question q2;
    q2.id = "q2";
    q2.text = "plain \"quoted\" text\twith\ncontrol";
    ds.records = {q1, q2};

    FileGuard file{temp_path("qf_test_roundtrip.jsonl")};
    write_dataset(ds, file.path);
    Dataset back = load_dataset(file.path);

    REQUIRE(back.records.size() == 2);
    const Question& r1 = back.records[0];
    CHECK(r1.id == "q1");
    CHECK(r1.text == "where is the tower");
    CHECK(r1.candidates == q1.candidates);
    CHECK(r1.gold_answers == q1.gold_answers);
    CHECK(r1.teacher_score == 0.625);
    CHECK(r1.correct == true);
    CHECK(r1.wellformed == 0.5);
    const Question& r2 = back.records[1];
    CHECK(r2.text == q2.text);
    CHECK_FALSE(r2.candidates.has_value());
    CHECK_FALSE(r2.gold_answers.has_value());
    CHECK_FALSE(r2.teacher_score.has_value());
    CHECK_FALSE(r2.correct.has_value());
    CHECK_FALSE(r2.wellformed.has_value());
}

TEST_CASE("load_dataset names the line of malformed JSON") {
    FileGuard file{temp_path("qf_test_malformed.jsonl")};
    write_text(file.path,
               "{\"id\":\"q1\",\"question\":\"a\"}\n"
               "{\"id\":\"q2\",,}\n");
    CHECK_THROWS_WITH_AS(load_dataset(file.path),
                         doctest::Contains("line 2"), domain_error);
}

TEST_CASE("load_dataset rejects unknown keys by name") {
    FileGuard file{temp_path("qf_test_unknown.jsonl")};
    write_text(file.path, "{\"id\":\"q1\",\"question\":\"a\",\"speed\":3}\n");
    CHECK_THROWS_WITH_AS(load_dataset(file.path),
                         doctest::Contains("speed"), domain_error);
}

TEST_CASE("load_dataset rejects duplicate ids by name") {
    FileGuard file{temp_path("qf_test_dup.jsonl")};
    write_text(file.path,
               "{\"id\":\"q1\",\"question\":\"a\"}\n"
               "{\"id\":\"q1\",\"question\":\"b\"}\n");
    CHECK_THROWS_WITH_AS(load_dataset(file.path),
                         doctest::Contains("q1"), domain_error);
}

TEST_CASE("load_dataset range-checks teacher_score and wellformed") {
    FileGuard file{temp_path("qf_test_range.jsonl")};
    write_text(file.path,
               "{\"id\":\"q1\",\"question\":\"a\",\"teacher_score\":1.3}\n");
    CHECK_THROWS_WITH_AS(load_dataset(file.path),
                         doctest::Contains("teacher_score"), domain_error);

    write_text(file.path,
               "{\"id\":\"q1\",\"question\":\"a\",\"wellformed\":-0.1}\n");
    CHECK_THROWS_WITH_AS(load_dataset(file.path),
                         doctest::Contains("wellformed"), domain_error);
}

TEST_CASE("load_dataset requires id and question strings") {
    FileGuard file{temp_path("qf_test_required.jsonl")};
    write_text(file.path, "{\"question\":\"a\"}\n");
    CHECK_THROWS_AS(load_dataset(file.path), domain_error);
    write_text(file.path, "{\"id\":7,\"question\":\"a\"}\n");
    CHECK_THROWS_AS(load_dataset(file.path), domain_error);
}

TEST_CASE("load_dataset skips blank lines and tolerates CRLF") {
    FileGuard file{temp_path("qf_test_blank.jsonl")};
    write_text(file.path,
               "{\"id\":\"q1\",\"question\":\"a\"}\r\n"
               "\n"
               "{\"id\":\"q2\",\"question\":\"b\"}\n");
    Dataset ds = load_dataset(file.path);
    REQUIRE(ds.records.size() == 2);
    CHECK(ds.records[1].id == "q2");
}

TEST_CASE("load_dataset on a missing file is an io error") {
    CHECK_THROWS_AS(load_dataset(temp_path("qf_does_not_exist.jsonl")),
                    io_error);
}

namespace {

Dataset numbered(int n) {
    Dataset ds;
    for (int i = 0; i < n; ++i) {
        Question q;
        q.id = "q" + std::to_string(i);
        q.text = "text " + std::to_string(i);
        ds.records.push_back(q);
    }
    return ds;
}

}  // namespace

TEST_CASE("split_dataset: 10 records at 0.8/0.1/0.1 give 8/1/1") {
    SplitResult r = split_dataset(numbered(10), SplitFractions{}, 42);
    CHECK(r.train.records.size() == 8);
    CHECK(r.dev.records.size() == 1);
    CHECK(r.test.records.size() == 1);
    CHECK(r.train.split_tag == SplitTag::train);
    CHECK(r.dev.split_tag == SplitTag::dev);
    CHECK(r.test.split_tag == SplitTag::test);

    std::set<std::string> ids;
    for (const auto* part : {&r.train, &r.dev, &r.test})
        for (const Question& q : part->records) ids.insert(q.id);
    CHECK(ids.size() == 10);
}

TEST_CASE("split_dataset floors decimal fractions to intended sizes") {
    SplitResult r = split_dataset(numbered(20), {0.7, 0.15, 0.15}, 1);
    CHECK(r.train.records.size() == 14);
    CHECK(r.dev.records.size() == 3);
    CHECK(r.test.records.size() == 3);
}

TEST_CASE("split_dataset is deterministic in the seed") {
    Dataset ds = numbered(50);
    SplitResult a = split_dataset(ds, SplitFractions{}, 7);
    SplitResult b = split_dataset(ds, SplitFractions{}, 7);
    REQUIRE(a.train.records.size() == b.train.records.size());
    for (std::size_t i = 0; i < a.train.records.size(); ++i)
        CHECK(a.train.records[i].id == b.train.records[i].id);
}

TEST_CASE("split_dataset validates its fractions") {
    Dataset ds = numbered(4);
    CHECK_THROWS_AS(split_dataset(ds, {0.5, 0.4, 0.2}, 1), domain_error);
    CHECK_THROWS_AS(split_dataset(ds, {-0.1, 0.6, 0.5}, 1), domain_error);
}

TEST_CASE("split_dataset on an empty dataset yields empty parts") {
    SplitResult r = split_dataset(Dataset{}, SplitFractions{}, 1);
    CHECK(r.train.records.empty());
    CHECK(r.dev.records.empty());
    CHECK(r.test.records.empty());
}
