#include <trackref/core/mot_io.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <trackref/core/errors.hpp>
#include <trackref/core/num_io.hpp>

namespace trackref {

namespace {

struct MotLine {
    int frame;
    long id;
    BBox bbox;
    double score;
    int class_id;
    double visibility;
};

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

MotLine parse_line(std::string_view line, size_t line_no) {
    auto fields = split_fields(line);
    if (fields.size() != 9)
        throw ParseError("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                         std::to_string(fields.size()));
    try {
        MotLine rec;
        rec.frame = static_cast<int>(parse_int(fields[0]));
        rec.id = parse_int(fields[1]);
        rec.bbox = BBox{parse_real(fields[2]), parse_real(fields[3]), parse_real(fields[4]),
                        parse_real(fields[5])};
        rec.score = parse_real(fields[6]);
        rec.class_id = static_cast<int>(parse_int(fields[7]));
        rec.visibility = parse_real(fields[8]);
        if (rec.frame < 1)
            throw ParseError("frame must be >= 1");
        return rec;
    } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
}

std::vector<MotLine> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError("cannot open '" + file.string() + "'");
    std::vector<MotLine> lines;
    std::string line;
    size_t line_no = 0;
    std::set<std::pair<int, long>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        MotLine rec = parse_line(line, line_no);
        if (rec.id >= 1 && !seen.insert({rec.frame, rec.id}).second)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate record for frame " +
                             std::to_string(rec.frame) + ", id " + std::to_string(rec.id));
        lines.push_back(rec);
    }
    return lines;
}

}  // namespace

std::vector<Detection> read_mot_detections(const std::filesystem::path& file) {
    std::vector<Detection> dets;
    for (const MotLine& rec : read_lines(file))
        dets.push_back(Detection{rec.frame, rec.bbox, rec.score, rec.class_id});
    return dets;
}

std::vector<Tracklet> read_mot_tracklets(const std::filesystem::path& file) {
    std::map<long, Tracklet> by_id;
    std::vector<long> order;
    for (const MotLine& rec : read_lines(file)) {
        if (rec.id < 1)
            throw ParseError("track file contains non-positive id " + std::to_string(rec.id));
        auto [it, inserted] = by_id.try_emplace(rec.id);
        if (inserted) {
            it->second.track_id = static_cast<int>(rec.id);
            order.push_back(rec.id);
        }
        it->second.entries.emplace_back(rec.frame, rec.bbox);
    }
    std::vector<Tracklet> tracks;
    tracks.reserve(order.size());
    for (long id : order) {
        Tracklet& t = by_id[id];
        std::sort(t.entries.begin(), t.entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        tracks.push_back(std::move(t));
    }
    return tracks;
}

void validate(const Detection& det) {
    if (det.frame < 1)
        throw DataError("detection frame must be >= 1");
    if (!det.bbox.valid())
        throw DataError("detection bbox must have positive width and height");
    if (!(det.confidence >= 0.0 && det.confidence <= 1.0))
        throw DataError("detection confidence must lie in [0, 1]");
}

void validate(const Tracklet& t) {
    if (t.track_id < 1)
        throw DataError("track id must be >= 1");
    if (t.entries.empty())
        throw DataError("tracklet must have at least one entry");
    int prev = 0;
    for (const auto& [frame, box] : t.entries) {
        if (frame < 1)
            throw DataError("tracklet frame must be >= 1");
        if (frame <= prev)
            throw DataError("tracklet frames must be strictly increasing");
        if (!box.valid())
            throw DataError("tracklet bbox must have positive width and height");
        prev = frame;
    }
}

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + file.string() + "'");
    return out;
}

void write_line(std::ostream& out, int frame, long id, const BBox& b, double score, int class_id,
                double visibility) {
    out << frame << ',' << id << ',' << format_real(b.x) << ',' << format_real(b.y) << ','
        << format_real(b.w) << ',' << format_real(b.h) << ',' << format_real(score) << ','
        << class_id << ',' << format_real(visibility) << '\n';
}

}  // namespace

void write_mot(const std::vector<Detection>& dets, const std::filesystem::path& file) {
    for (const Detection& d : dets) validate(d);
    auto out = open_out(file);
    for (const Detection& d : dets)
        write_line(out, d.frame, -1, d.bbox, d.confidence, d.class_id, 1.0);
}

void write_mot(const std::vector<Tracklet>& tracks, const std::filesystem::path& file) {
    std::set<int> ids;
    for (const Tracklet& t : tracks) {
        validate(t);
        if (!ids.insert(t.track_id).second)
            throw DataError("duplicate track id " + std::to_string(t.track_id));
    }
    auto out = open_out(file);
    for (const Tracklet& t : tracks)
        for (const auto& [frame, box] : t.entries)
            write_line(out, frame, t.track_id, box, 1.0, 1, 1.0);
}

}  // namespace trackref
