#include "qfilter/filter.hpp"

#include <algorithm>
#include <cmath>

#include "qfilter/errors.hpp"
#include "unicode.hpp"

namespace qfilter {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        // strip edge punctuation only; interior stays ("a--b" is one token)
        std::size_t b = 0, e = current.size();
        while (b < e && detail::is_ascii_punct(
                            static_cast<unsigned char>(current[b])))
            ++b;
        while (e > b && detail::is_ascii_punct(
                            static_cast<unsigned char>(current[e - 1])))
            --e;
        if (e > b) tokens.emplace_back(current, b, e - b);
        current.clear();
    };

    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t start = i;
        std::uint32_t cp = detail::decode_utf8(text, i);
        if (detail::is_unicode_space(cp)) {
            flush();
        } else {
            for (std::size_t k = start; k < i; ++k)
                current += detail::ascii_lower(text[k]);
        }
    }
    flush();
    return tokens;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void FeatureConfig::validate() const {
    if (dimension < 2 || (dimension & (dimension - 1)) != 0)
        throw domain_error("feature dimension must be a power of two >= 2");
}

SparseVector featurize(const std::string& text, const FeatureConfig& cfg) {
    cfg.validate();
    std::vector<std::string> tokens = tokenize(text);

    SparseVector x;
    auto add = [&](const std::string& feature) {
        std::uint32_t idx =
            static_cast<std::uint32_t>(fnv1a64(feature) & (cfg.dimension - 1));
        x.entries.emplace_back(idx, 1.0);
    };
    for (const std::string& t : tokens) add(t);
    if (cfg.use_bigrams)
        for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
            add(tokens[i] + "_" + tokens[i + 1]);

    std::sort(x.entries.begin(), x.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // merge colliding indices into counts
    std::size_t w = 0;
    for (std::size_t r = 0; r < x.entries.size(); ++r) {
        if (w > 0 && x.entries[w - 1].first == x.entries[r].first)
            x.entries[w - 1].second += x.entries[r].second;
        else
            x.entries[w++] = x.entries[r];
    }
    x.entries.resize(w);

    double norm_sq = 0.0;
    for (const auto& [idx, v] : x.entries) norm_sq += v * v;
    if (norm_sq > 0.0) {
        double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& [idx, v] : x.entries) v *= inv;
    }
    return x;
}

}  // namespace qfilter
