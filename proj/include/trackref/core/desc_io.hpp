#pragma once

#include <filesystem>
#include <vector>

#include <trackref/core/types.hpp>

namespace trackref {

// Description file: JSON array of objects with keys `id`, `text`, optional
// `frequency`, optional `positives` (map from frame string to array of
// track ids).
std::vector<DescriptionRecord> read_descriptions(const std::filesystem::path& file);
void write_descriptions(const std::vector<DescriptionRecord>& descs,
                        const std::filesystem::path& file);

// Score table file: one `track_id,desc_id,score` line per row, LF-terminated,
// reals in shortest round-trip decimal form. Window scores are an in-memory
// detail; files carry the aggregate only.
ScoreTable read_scores(const std::filesystem::path& file);
void write_scores(const ScoreTable& table, const std::filesystem::path& file);

}  // namespace trackref
