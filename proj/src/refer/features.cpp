#include <trackref/refer/features.hpp>

#include <fstream>
#include <random>

#include <json.hpp>

#include <trackref/core/errors.hpp>

namespace trackref::refer {

using nlohmann::json;

nn::Tensor FeatureMap::frame(int t) const {
    const int s = positions(), c = channels();
    nn::Tensor out({s, c});
    const size_t offset = static_cast<size_t>(t) * s * c;
    std::copy_n(values.data().begin() + offset, static_cast<size_t>(s) * c, out.data().begin());
    return out;
}

namespace {

void parse_line(const std::string& line, size_t line_no, const std::filesystem::path& file,
                FeatureStore& store) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(file.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::string kind = rec.at("kind").get<std::string>();
    nn::Tensor values(rec.at("shape").get<std::vector<int>>(),
                      rec.at("data").get<std::vector<double>>());
    const int frame = rec.at("frame").get<int>();
    const int track = rec.at("track").get<int>();
    if (kind == "global") {
        store.global[frame] = std::move(values);
    } else if (kind == "local") {
        FeatureStore::LocalRecord lr;
        lr.track = track;
        auto b = rec.at("box").get<std::vector<double>>();
        lr.box = BBox{b[0], b[1], b[2], b[3]};
        lr.values = std::move(values);
        store.local[frame].push_back(std::move(lr));
    } else if (kind == "text") {
        store.text[track] = std::move(values);
    } else {
        throw ParseError(file.string() + " line " + std::to_string(line_no) +
                         ": unknown feature kind '" + kind + "'");
    }
}

}  // namespace

FeatureStore FeatureStore::load_file(const std::filesystem::path& file) {
    FeatureStore store;
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open '" + file.string() + "'");
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        parse_line(line, line_no, file, store);
    }
    return store;
}

FeatureStore FeatureStore::load_dir(const std::filesystem::path& dir) {
    if (std::filesystem::is_regular_file(dir)) return load_file(dir);
    if (!std::filesystem::is_directory(dir))
        throw IoError("feature path '" + dir.string() + "' does not exist");
    FeatureStore store;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw IoError("no .jsonl feature files under '" + dir.string() + "'");
    for (const auto& file : files) {
        FeatureStore part = load_file(file);
        for (auto& [f, t] : part.global) store.global[f] = std::move(t);
        for (auto& [f, recs] : part.local)
            for (auto& r : recs) store.local[f].push_back(std::move(r));
        for (auto& [d, t] : part.text) store.text[d] = std::move(t);
    }
    return store;
}

void FeatureStore::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + file.string() + "'");
    auto dump = [&out](int frame, int track, const char* kind, const nn::Tensor& t,
                       const BBox* box) {
        json rec;
        rec["frame"] = frame;
        rec["track"] = track;
        rec["kind"] = kind;
        rec["shape"] = t.shape();
        rec["data"] = t.data();
        if (box) rec["box"] = std::vector<double>{box->x, box->y, box->w, box->h};
        out << rec.dump() << '\n';
    };
    for (const auto& [frame, t] : global) dump(frame, 0, "global", t, nullptr);
    for (const auto& [frame, recs] : local)
        for (const auto& r : recs) dump(frame, r.track, "local", r.values, &r.box);
    for (const auto& [desc, t] : text) dump(0, desc, "text", t, nullptr);
}

nn::Tensor FeatureStore::local_for_box(int frame, const BBox& box, double gate, int s_l,
                                       int c_v) const {
    auto it = local.find(frame);
    if (it != local.end()) {
        const LocalRecord* best = nullptr;
        double best_iou = gate;
        for (const LocalRecord& r : it->second) {
            const double o = iou(r.box, box);
            if (o >= best_iou) {
                best_iou = o;
                best = &r;
            }
        }
        if (best) return best->values;
    }
    // deterministic clutter seeded from the quantized query
    const auto qx = static_cast<long>(std::llround(box.cx() * 4.0));
    const auto qy = static_cast<long>(std::llround(box.cy() * 4.0));
    std::seed_seq seq{static_cast<long>(frame), qx, qy};
    std::mt19937 rng(seq);
    std::normal_distribution<double> dist(0.0, 0.05);
    nn::Tensor clutter({s_l, c_v});
    for (double& v : clutter.data()) v = dist(rng);
    return clutter;
}

}  // namespace trackref::refer
