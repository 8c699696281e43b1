#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace qfilter {

// One question record. Optional fields stay unset when the source file
// omits them, and round-trip through write_dataset unchanged.
struct Question {
    std::string id;
    std::string text;
    std::optional<std::vector<std::string>> candidates;
    std::optional<std::vector<std::string>> gold_answers;
    std::optional<double> teacher_score;  // in [0,1]
    std::optional<bool> correct;
    std::optional<double> wellformed;     // in [0,1]
};

enum class SplitTag { train, dev, test, unsplit };

struct Dataset {
    std::vector<Question> records;
    SplitTag split_tag = SplitTag::unsplit;
};

// Outcome of running the answer system on one question at a threshold.
// sigma is the confidence of the best candidate; answered means sigma
// cleared the threshold (strictly). correct is absent when the record
// carries no ground truth; best_index is absent when there were no
// candidates to choose from.
struct Decision {
    std::string question_id;
    double sigma = 0.0;
    bool answered = false;
    std::optional<bool> correct;
    std::optional<std::size_t> best_index;
};

// Reads a JSON-Lines dataset. Errors name the offending line number,
// duplicate id, or out-of-range field.
Dataset load_dataset(const std::string& path);

// Writes JSON Lines with a fixed key order; load_dataset(write_dataset(ds))
// reproduces every field exactly.
void write_dataset(const Dataset& ds, const std::string& path);

// Seeded permutation split. Sizes are floor(N*f_train) and floor(N*f_dev);
// the remainder goes to test. Fractions must be non-negative and sum to 1.
struct SplitFractions {
    double train = 0.8;
    double dev = 0.1;
    double test = 0.1;
};

struct SplitResult {
    Dataset train;
    Dataset dev;
    Dataset test;
};

SplitResult split_dataset(const Dataset& ds, const SplitFractions& fractions,
                          unsigned long long seed);

}  // namespace qfilter
