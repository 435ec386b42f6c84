#include <trackref/nn/weights_io.hpp>

#include <fstream>

#include <trackref/core/errors.hpp>

namespace trackref::nn {

using nlohmann::json;

const Tensor& WeightsFile::find(const std::string& name) const {
    for (const auto& [n, t] : entries)
        if (n == name) return t;
    throw DataError("weights file is missing parameter '" + name + "'");
}

void save_weights(const WeightsFile& w, const std::filesystem::path& file) {
    json doc;
    doc["kind"] = w.kind;
    doc["meta"] = w.meta;
    json params = json::array();
    for (const auto& [name, t] : w.entries) {
        json entry;
        entry["name"] = name;
        entry["shape"] = t.shape();
        entry["data"] = t.data();
        params.push_back(std::move(entry));
    }
    doc["params"] = std::move(params);
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + file.string() + "'");
    out << doc.dump() << '\n';
}

WeightsFile load_weights(const std::filesystem::path& file, const std::string& expected_kind) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open '" + file.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("'" + file.string() + "': " + e.what());
    }
    WeightsFile w;
    w.kind = doc.value("kind", "");
    if (!expected_kind.empty() && w.kind != expected_kind)
        throw DataError("'" + file.string() + "': expected " + expected_kind + " weights, got '" +
                        w.kind + "'");
    w.meta = doc.value("meta", json::object());
    for (const auto& entry : doc.at("params")) {
        Tensor t(entry.at("shape").get<std::vector<int>>(),
                 entry.at("data").get<std::vector<double>>());
        if (!t.all_finite())
            throw DataError("'" + file.string() + "': non-finite parameter values");
        w.entries.emplace_back(entry.at("name").get<std::string>(), std::move(t));
    }
    return w;
}

}  // namespace trackref::nn
