#include <trackref/core/desc_io.hpp>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include <trackref/core/errors.hpp>
#include <trackref/core/num_io.hpp>

namespace trackref {

using nlohmann::json;

std::vector<std::string> DescriptionRecord::tokens() const {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<DescriptionRecord> read_descriptions(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open '" + file.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("'" + file.string() + "': " + e.what());
    }
    if (!doc.is_array())
        throw ParseError("'" + file.string() + "': expected a JSON array of descriptions");
    std::vector<DescriptionRecord> descs;
    for (const auto& item : doc) {
        DescriptionRecord rec;
        rec.desc_id = item.at("id").get<int>();
        rec.text = item.at("text").get<std::string>();
        if (rec.text.empty())
            throw ParseError("description " + std::to_string(rec.desc_id) + " has empty text");
        if (item.contains("frequency"))
            rec.frequency = item["frequency"].get<double>();
        if (item.contains("positives")) {
            for (const auto& [frame_str, ids] : item["positives"].items()) {
                int frame = static_cast<int>(parse_int(frame_str));
                auto& set = rec.positives[frame];
                for (const auto& id : ids) set.insert(id.get<int>());
            }
        }
        descs.push_back(std::move(rec));
    }
    return descs;
}

void write_descriptions(const std::vector<DescriptionRecord>& descs,
                        const std::filesystem::path& file) {
    json doc = json::array();
    for (const DescriptionRecord& rec : descs) {
        json item;
        item["id"] = rec.desc_id;
        item["text"] = rec.text;
        if (rec.frequency)
            item["frequency"] = *rec.frequency;
        if (!rec.positives.empty()) {
            json pos = json::object();
            for (const auto& [frame, ids] : rec.positives)
                pos[std::to_string(frame)] = std::vector<int>(ids.begin(), ids.end());
            item["positives"] = pos;
        }
        doc.push_back(std::move(item));
    }
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + file.string() + "'");
    out << doc.dump(2) << '\n';
}

ScoreTable read_scores(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open '" + file.string() + "'");
    ScoreTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string f0, f1, f2;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2))
            throw ParseError("line " + std::to_string(line_no) + ": expected track,desc,score");
        ScoreRow row;
        row.track_id = static_cast<int>(parse_int(f0));
        row.desc_id = static_cast<int>(parse_int(f1));
        row.aggregate_score = parse_real(f2);
        table.rows.push_back(row);
    }
    return table;
}

void write_scores(const ScoreTable& table, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + file.string() + "'");
    for (const ScoreRow& row : table.rows)
        out << row.track_id << ',' << row.desc_id << ',' << format_real(row.aggregate_score)
            << '\n';
}

}  // namespace trackref
