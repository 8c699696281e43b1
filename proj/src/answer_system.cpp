#include "qfilter/answer_system.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "qfilter/errors.hpp"
#include "qfilter/filter.hpp"
#include "unicode.hpp"

namespace qfilter {

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open corpus file: " + path);

    Corpus corpus;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw domain_error("line " + std::to_string(line_no) +
                               ": malformed JSON (" + e.what() + ")");
        }
        if (!obj.is_object() || !obj.contains("doc_id") || !obj.contains("text") ||
            !obj["doc_id"].is_string() || !obj["text"].is_string())
            throw domain_error("line " + std::to_string(line_no) +
                               ": corpus records need string keys \"doc_id\" "
                               "and \"text\"");
        for (const auto& [key, value] : obj.items())
            if (key != "doc_id" && key != "text")
                throw domain_error("line " + std::to_string(line_no) +
                                   ": unknown key \"" + key + "\"");
        Document d{obj["doc_id"].get<std::string>(),
                   obj["text"].get<std::string>()};
        if (!seen.insert(d.doc_id).second)
            throw domain_error("duplicate doc_id \"" + d.doc_id + "\"");
        corpus.documents.push_back(std::move(d));
    }
    return corpus;
}

TeacherKind TeacherKind::lexical(const Corpus& corpus, int k) {
    TeacherKind t;
    t.kind = Kind::lexical;
    t.corpus = &corpus;
    t.k = k;
    return t;
}

TeacherKind TeacherKind::replay() {
    TeacherKind t;
    t.kind = Kind::replay;
    return t;
}

TeacherKind TeacherKind::synthetic(const FilterModel& params) {
    TeacherKind t;
    t.kind = Kind::synthetic;
    t.params = &params;
    return t;
}

namespace {

std::unordered_set<std::string> token_set(const std::string& text) {
    std::unordered_set<std::string> s;
    for (auto& t : tokenize(text)) s.insert(std::move(t));
    return s;
}

}  // namespace

std::vector<std::string> retrieve(const Corpus& corpus, const Question& question,
                                  int k) {
    if (k < 1) throw domain_error("retrieve requires k >= 1");

    const auto q_tokens = token_set(question.text);
    struct Scored {
        double overlap;
        const std::string* doc_id;
    };
    std::vector<Scored> scored;
    scored.reserve(corpus.documents.size());
    for (const Document& d : corpus.documents) {
        double overlap = 0.0;
        if (!q_tokens.empty()) {
            const auto d_tokens = token_set(d.text);
            std::size_t shared = 0;
            for (const auto& t : q_tokens) shared += d_tokens.count(t);
            overlap = static_cast<double>(shared) /
                      static_cast<double>(q_tokens.size());
        }
        scored.push_back({overlap, &d.doc_id});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        return *a.doc_id < *b.doc_id;
    });

    std::vector<std::string> out;
    const std::size_t take = std::min<std::size_t>(scored.size(),
                                                   static_cast<std::size_t>(k));
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(*scored[i].doc_id);
    return out;
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;

    auto trim = [](const std::string& s) {
        std::size_t b = 0;
        while (b < s.size()) {
            std::size_t i = b;
            if (!detail::is_unicode_space(detail::decode_utf8(s, i))) break;
            b = i;
        }
        std::size_t e = s.size();
        while (e > b) {
            // scan the last codepoint by stepping back over continuation bytes
            std::size_t start = e - 1;
            while (start > b &&
                   (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80)
                --start;
            std::size_t i = start;
            if (!detail::is_unicode_space(detail::decode_utf8(s, i))) break;
            e = start;
        }
        return s.substr(b, e - b);
    };

    std::size_t seg_start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        ++i;
        if (c != '.' && c != '?' && c != '!') continue;
        bool boundary = i >= text.size();
        if (!boundary) {
            std::size_t j = i;
            boundary = detail::is_unicode_space(detail::decode_utf8(text, j));
        }
        if (boundary) {
            std::string seg = trim(text.substr(seg_start, i - seg_start));
            if (!seg.empty()) out.push_back(std::move(seg));
            seg_start = i;
        }
    }
    if (seg_start < text.size()) {
        std::string seg = trim(text.substr(seg_start));
        if (!seg.empty()) out.push_back(std::move(seg));
    }
    return out;
}

double score_candidate(const Question& question, const std::string& candidate) {
    const auto a = token_set(question.text);
    const auto b = token_set(candidate);
    if (a.empty() && b.empty()) return 0.0;
    std::size_t shared = 0;
    for (const auto& t : a) shared += b.count(t);
    const std::size_t unioned = a.size() + b.size() - shared;
    return static_cast<double>(shared) / static_cast<double>(unioned);
}

namespace {

std::string ascii_lowered(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = detail::ascii_lower(c);
    return out;
}

}  // namespace

Decision answer(const Question& question, const CandidateSet& candidates,
                double tau1) {
    if (!(tau1 >= 0.0 && tau1 <= 1.0))
        throw domain_error("tau1 out of [0,1]");

    Decision d;
    d.question_id = question.id;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double s = score_candidate(question, candidates[i]);
        // strict > keeps the earliest argmax on ties
        if (!d.best_index.has_value() || s > d.sigma) {
            d.sigma = s;
            d.best_index = i;
        }
    }
    if (!d.best_index) d.sigma = 0.0;
    d.answered = d.sigma > tau1;

    const bool labeled = question.gold_answers && !question.gold_answers->empty();
    if (labeled) {
        bool correct = false;
        if (d.best_index) {
            const std::string chosen = ascii_lowered(candidates[*d.best_index]);
            for (const std::string& gold : *question.gold_answers) {
                if (chosen.find(ascii_lowered(gold)) != std::string::npos) {
                    correct = true;
                    break;
                }
            }
        }
        d.correct = correct;
    }
    return d;
}

namespace {

CandidateSet lexical_candidates(const Corpus& corpus, const Question& q, int k) {
    CandidateSet candidates;
    for (const std::string& doc_id : retrieve(corpus, q, k)) {
        auto it = std::find_if(
            corpus.documents.begin(), corpus.documents.end(),
            [&](const Document& d) { return d.doc_id == doc_id; });
        for (std::string& s : split_sentences(it->text))
            candidates.push_back(std::move(s));
    }
    return candidates;
}

}  // namespace

double teacher_score(const TeacherKind& kind, const Question& question) {
    switch (kind.kind) {
        case TeacherKind::Kind::lexical:
            return answer(question,
                          lexical_candidates(*kind.corpus, question, kind.k),
                          0.0)
                .sigma;
        case TeacherKind::Kind::replay:
            if (!question.teacher_score)
                throw domain_error("replay teacher: question \"" + question.id +
                                   "\" has no teacher_score");
            return *question.teacher_score;
        case TeacherKind::Kind::synthetic:
            return predict(*kind.params, question.text);
    }
    throw domain_error("unreachable teacher kind");
}

std::vector<Decision> run_pipeline(const Dataset& ds, const TeacherKind& kind,
                                   double tau1) {
    if (!(tau1 >= 0.0 && tau1 <= 1.0))
        throw domain_error("tau1 out of [0,1]");

    std::vector<Decision> out;
    out.reserve(ds.records.size());
    for (const Question& q : ds.records) {
        if (kind.kind == TeacherKind::Kind::lexical) {
            out.push_back(
                answer(q, lexical_candidates(*kind.corpus, q, kind.k), tau1));
        } else {
            Decision d;
            d.question_id = q.id;
            d.sigma = teacher_score(kind, q);
            d.answered = d.sigma > tau1;
            d.correct = q.correct;
            out.push_back(std::move(d));
        }
    }
    return out;
}

}  // namespace qfilter
