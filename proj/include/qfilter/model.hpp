#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qfilter {

// Feature hashing configuration for the question filter.
struct FeatureConfig {
    std::uint32_t dimension = 1u << 18;  // power of two, >= 2
    bool use_bigrams = true;

    void validate() const;
};

enum class Head { regression, classification };

// Linear filter with a sigmoid output. The classification head predicts
// whether the answer system would clear its threshold, so it remembers
// the threshold it was trained against.
struct FilterModel {
    Head head = Head::regression;
    std::optional<double> tau1_trained;  // required iff head == classification
    FeatureConfig feature_config;
    std::vector<double> weights;         // length == feature_config.dimension
    double bias = 0.0;
    unsigned long long seed = 0;
    long long epochs_trained = 0;

    void validate() const;
};

// Versioned JSON persistence. Numbers are printed with 17 significant
// digits so a save/load round trip reproduces predictions bit-exactly.
void save_model(const FilterModel& model, const std::string& path);
FilterModel load_model(const std::string& path);

}  // namespace qfilter
