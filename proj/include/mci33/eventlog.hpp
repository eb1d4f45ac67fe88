#pragma once

// Event logs on disk: one compact JSON object per line.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mci33/trial.hpp"

namespace mci33 {

std::vector<json> parse_events(const std::string& text);
std::vector<json> read_events(const std::filesystem::path& path);
std::string render_events(const std::vector<json>& events);
void write_events(const std::filesystem::path& path, const std::vector<json>& events);
// Appends and flushes; the file is created if missing.
void append_events(const std::filesystem::path& path, const std::vector<json>& events);

struct ReplayMismatch {
    std::size_t index = 0;  // 0-based event index
    json recorded;          // null when the recorded log is shorter
    json replayed;          // null when the replay is shorter
};

struct ReplayReport {
    Trial trial;
    std::optional<ReplayMismatch> mismatch;
};

// Rebuilds the trial from the recorded outcomes and compares every event.
ReplayReport replay(const std::vector<json>& recorded);

}  // namespace mci33
