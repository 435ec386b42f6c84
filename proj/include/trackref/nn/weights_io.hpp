#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <trackref/nn/tensor.hpp>

namespace trackref::nn {

// Weights file: JSON with a `kind` tag, a free-form `meta` header and
// ordered parameter entries {name, shape, data}.
struct WeightsFile {
    std::string kind;
    nlohmann::json meta = nlohmann::json::object();
    std::vector<std::pair<std::string, Tensor>> entries;

    const Tensor& find(const std::string& name) const;
};

void save_weights(const WeightsFile& w, const std::filesystem::path& file);
WeightsFile load_weights(const std::filesystem::path& file, const std::string& expected_kind = "");

}  // namespace trackref::nn
