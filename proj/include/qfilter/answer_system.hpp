#pragma once

#include <string>
#include <vector>

#include "qfilter/dataset.hpp"
#include "qfilter/model.hpp"

namespace qfilter {

struct Document {
    std::string doc_id;
    std::string text;
};

struct Corpus {
    std::vector<Document> documents;
};

// Reads a JSON-Lines corpus with keys "doc_id" and "text".
Corpus load_corpus(const std::string& path);

using CandidateSet = std::vector<std::string>;

// Where teacher confidence scores come from:
//   lexical   - retrieve from a corpus, split into sentences, score each
//   replay    - use the teacher_score stored on the record
//   synthetic - evaluate a known linear teacher on the question text
struct TeacherKind {
    enum class Kind { lexical, replay, synthetic };
    Kind kind = Kind::replay;
    const Corpus* corpus = nullptr;      // lexical
    int k = 3;                           // lexical: documents to retrieve
    const FilterModel* params = nullptr; // synthetic

    static TeacherKind lexical(const Corpus& corpus, int k);
    static TeacherKind replay();
    static TeacherKind synthetic(const FilterModel& params);
};

// Top-k doc_ids by descending overlap |tokens(q) n tokens(d)| / |tokens(q)|
// (set semantics; 0 when the question has no tokens). Ties break by
// ascending doc_id; returns fewer than k when the corpus is smaller.
std::vector<std::string> retrieve(const Corpus& corpus, const Question& question,
                                  int k);

// Splits after '.', '?' or '!' when followed by whitespace or end of text.
// Delimiters stay with their sentence; segments are trimmed and empties
// dropped. Abbreviations are split too ("e.g. x" -> ["e.g.", "x"]); the
// rule is punctuation-blind by design.
std::vector<std::string> split_sentences(const std::string& text);

// Jaccard similarity of the two token sets; 0 when both are empty.
double score_candidate(const Question& question, const std::string& candidate);

// Scores every candidate, takes the max (lowest index wins ties), and
// answers iff sigma > tau1. correct is set when the record has gold
// answers: true iff the chosen candidate contains one of them
// (case-insensitive substring).
Decision answer(const Question& question, const CandidateSet& candidates,
                double tau1);

// The teacher's confidence for one question, per TeacherKind.
double teacher_score(const TeacherKind& kind, const Question& question);

// One Decision per record, in dataset order. The lexical teacher runs the
// full retrieve/split/answer pipeline; replay and synthetic teachers score
// directly and take correctness from the record when present.
std::vector<Decision> run_pipeline(const Dataset& ds, const TeacherKind& kind,
                                   double tau1);

}  // namespace qfilter
