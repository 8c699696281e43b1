#include "qfilter/dataset.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "qfilter/errors.hpp"
#include "json_io.hpp"
#include "rng.hpp"

namespace qfilter {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw domain_error("line " + std::to_string(line_no) + ": " + what);
}

double range_checked(const json& v, const char* key, std::size_t line_no) {
    if (!v.is_number()) line_error(line_no, std::string(key) + " must be a number");
    double d = v.get<double>();
    if (!(d >= 0.0 && d <= 1.0)) line_error(line_no, std::string(key) + " out of [0,1]");
    return d;
}

std::vector<std::string> string_array(const json& v, const char* key,
                                      std::size_t line_no) {
    if (!v.is_array()) line_error(line_no, std::string(key) + " must be an array");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_string())
            line_error(line_no, std::string(key) + " must contain only strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

Question parse_record(const std::string& line, std::size_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::exception& e) {
        line_error(line_no, std::string("malformed JSON (") + e.what() + ")");
    }
    if (!obj.is_object()) line_error(line_no, "record must be a JSON object");

    Question q;
    bool have_id = false, have_question = false;
    for (const auto& [key, value] : obj.items()) {
        if (key == "id") {
            if (!value.is_string()) line_error(line_no, "id must be a string");
            q.id = value.get<std::string>();
            have_id = true;
        } else if (key == "question") {
            if (!value.is_string()) line_error(line_no, "question must be a string");
            q.text = value.get<std::string>();
            have_question = true;
        } else if (key == "candidates") {
            q.candidates = string_array(value, "candidates", line_no);
        } else if (key == "gold_answers") {
            q.gold_answers = string_array(value, "gold_answers", line_no);
        } else if (key == "teacher_score") {
            q.teacher_score = range_checked(value, "teacher_score", line_no);
        } else if (key == "correct") {
            if (!value.is_boolean()) line_error(line_no, "correct must be a boolean");
            q.correct = value.get<bool>();
        } else if (key == "wellformed") {
            q.wellformed = range_checked(value, "wellformed", line_no);
        } else {
            line_error(line_no, "unknown key \"" + key + "\"");
        }
    }
    if (!have_id) line_error(line_no, "missing required key \"id\"");
    if (!have_question) line_error(line_no, "missing required key \"question\"");
    return q;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open dataset file: " + path);

    Dataset ds;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Question q = parse_record(line, line_no);
        if (!seen.insert(q.id).second)
            throw domain_error("duplicate id \"" + q.id + "\"");
        ds.records.push_back(std::move(q));
    }
    return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
    std::string out;
    for (const Question& q : ds.records) {
        out += "{\"id\":";
        detail::append_json_string(out, q.id);
        out += ",\"question\":";
        detail::append_json_string(out, q.text);
        auto emit_array = [&](const char* key, const std::vector<std::string>& v) {
            out += ",\"";
            out += key;
            out += "\":[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ',';
                detail::append_json_string(out, v[i]);
            }
            out += ']';
        };
        if (q.candidates) emit_array("candidates", *q.candidates);
        if (q.gold_answers) emit_array("gold_answers", *q.gold_answers);
        if (q.teacher_score) {
            out += ",\"teacher_score\":";
            out += detail::format_double(*q.teacher_score);
        }
        if (q.correct) {
            out += ",\"correct\":";
            out += *q.correct ? "true" : "false";
        }
        if (q.wellformed) {
            out += ",\"wellformed\":";
            out += detail::format_double(*q.wellformed);
        }
        out += "}\n";
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open file for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw io_error("failed writing dataset to " + path);
}

SplitResult split_dataset(const Dataset& ds, const SplitFractions& fr,
                          unsigned long long seed) {
    if (fr.train < 0 || fr.dev < 0 || fr.test < 0)
        throw domain_error("split fractions must be non-negative");
    double sum = fr.train + fr.dev + fr.test;
    if (std::fabs(sum - 1.0) > 1e-9)
        throw domain_error("split fractions must sum to 1");

    const std::size_t n = ds.records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    detail::Rng rng(seed);
    rng.shuffle(order);

    // +1e-9 so decimal fractions like 0.7 floor to the intended size
    auto take = [n](double f) {
        return static_cast<std::size_t>(
            std::floor(static_cast<double>(n) * f + 1e-9));
    };
    std::size_t n_train = take(fr.train);
    std::size_t n_dev = take(fr.dev);
    if (n_train + n_dev > n) n_dev = n - n_train;

    SplitResult out;
    out.train.split_tag = SplitTag::train;
    out.dev.split_tag = SplitTag::dev;
    out.test.split_tag = SplitTag::test;
    for (std::size_t i = 0; i < n; ++i) {
        const Question& q = ds.records[order[i]];
        if (i < n_train)
            out.train.records.push_back(q);
        else if (i < n_train + n_dev)
            out.dev.records.push_back(q);
        else
            out.test.records.push_back(q);
    }
    return out;
}

}  // namespace qfilter
