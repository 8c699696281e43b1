#include "qfilter/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "qfilter/errors.hpp"
#include "json_io.hpp"

namespace qfilter {

namespace {
constexpr int kFormatVersion = 1;
}

void FilterModel::validate() const {
    feature_config.validate();
    if (weights.size() != feature_config.dimension)
        throw domain_error("model invariant violated: weights length " +
                           std::to_string(weights.size()) +
                           " does not match dimension " +
                           std::to_string(feature_config.dimension));
    if (head == Head::classification && !tau1_trained)
        throw domain_error(
            "model invariant violated: classification head requires "
            "tau1_trained");
}

void save_model(const FilterModel& model, const std::string& path) {
    model.validate();

    std::string out;
    out.reserve(model.weights.size() * 20 + 256);
    out += "{\"format_version\": ";
    out += std::to_string(kFormatVersion);
    out += ", \"head\": ";
    out += model.head == Head::regression ? "\"regression\"" : "\"classification\"";
    out += ", \"tau1_trained\": ";
    out += model.tau1_trained ? detail::format_double17(*model.tau1_trained)
                              : std::string("null");
    out += ", \"dimension\": ";
    out += std::to_string(model.feature_config.dimension);
    out += ", \"use_bigrams\": ";
    out += model.feature_config.use_bigrams ? "true" : "false";
    out += ", \"weights\": [";
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
        if (i) out += ',';
        out += detail::format_double17(model.weights[i]);
    }
    out += "], \"bias\": ";
    out += detail::format_double17(model.bias);
    out += ", \"seed\": ";
    out += std::to_string(model.seed);
    out += ", \"epochs_trained\": ";
    out += std::to_string(model.epochs_trained);
    out += "}\n";

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open file for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw io_error("failed writing model to " + path);
}

FilterModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open model file: " + path);
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error("malformed model file " + path + ": " + e.what());
    }
    if (!obj.is_object()) throw domain_error("model file must hold a JSON object");

    static const char* kKnownKeys[] = {
        "format_version", "head",    "tau1_trained", "dimension",
        "use_bigrams",    "weights", "bias",         "seed",
        "epochs_trained"};
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : kKnownKeys) known = known || key == k;
        if (!known)
            throw domain_error("model file has unknown key \"" + key + "\"");
    }

    if (!obj.contains("format_version") || !obj["format_version"].is_number_integer())
        throw domain_error("model file missing format_version");
    int version = obj["format_version"].get<int>();
    if (version != kFormatVersion)
        throw domain_error("unsupported model format version " +
                           std::to_string(version) + " (expected " +
                           std::to_string(kFormatVersion) + ")");

    auto require = [&](const char* key) -> const nlohmann::json& {
        if (!obj.contains(key))
            throw domain_error(std::string("model file missing key \"") + key +
                               "\"");
        return obj[key];
    };

    FilterModel m;
    const auto& head = require("head");
    if (!head.is_string()) throw domain_error("model head must be a string");
    std::string head_s = head.get<std::string>();
    if (head_s == "regression")
        m.head = Head::regression;
    else if (head_s == "classification")
        m.head = Head::classification;
    else
        throw domain_error("unknown model head \"" + head_s + "\"");

    const auto& tau1 = require("tau1_trained");
    if (tau1.is_null())
        m.tau1_trained.reset();
    else if (tau1.is_number())
        m.tau1_trained = tau1.get<double>();
    else
        throw domain_error("tau1_trained must be a number or null");
    if (m.tau1_trained && !(*m.tau1_trained >= 0.0 && *m.tau1_trained <= 1.0))
        throw domain_error("tau1_trained out of [0,1]");

    const auto& dim = require("dimension");
    if (!dim.is_number_integer() || dim.get<long long>() < 2)
        throw domain_error("dimension must be a positive integer");
    m.feature_config.dimension = static_cast<std::uint32_t>(dim.get<long long>());

    const auto& bigrams = require("use_bigrams");
    if (!bigrams.is_boolean()) throw domain_error("use_bigrams must be a boolean");
    m.feature_config.use_bigrams = bigrams.get<bool>();

    const auto& weights = require("weights");
    if (!weights.is_array()) throw domain_error("weights must be an array");
    m.weights.reserve(weights.size());
    for (const auto& w : weights) {
        if (!w.is_number()) throw domain_error("weights must contain only numbers");
        m.weights.push_back(w.get<double>());
    }

    const auto& bias = require("bias");
    if (!bias.is_number()) throw domain_error("bias must be a number");
    m.bias = bias.get<double>();

    const auto& seed = require("seed");
    if (!seed.is_number_integer()) throw domain_error("seed must be an integer");
    m.seed = seed.get<unsigned long long>();

    const auto& epochs = require("epochs_trained");
    if (!epochs.is_number_integer())
        throw domain_error("epochs_trained must be an integer");
    m.epochs_trained = epochs.get<long long>();

    m.validate();
    return m;
}

}  // namespace qfilter
