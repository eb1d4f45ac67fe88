#include "mci33/eventlog.hpp"

#include <fstream>
#include <sstream>

#include "mci33/ingest.hpp"

namespace mci33 {

std::vector<json> parse_events(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw parse_error("event log line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!out.back().is_object() || !out.back().contains("type")) {
            throw parse_error("event log line " + std::to_string(line_no) + ": not an event object");
        }
    }
    return out;
}

std::vector<json> read_events(const std::filesystem::path& path) { return parse_events(read_file(path)); }

std::string render_events(const std::vector<json>& events) {
    std::string out;
    for (const auto& ev : events) {
        out += ev.dump();
        out += '\n';
    }
    return out;
}

void write_events(const std::filesystem::path& path, const std::vector<json>& events) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << render_events(events);
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

void append_events(const std::filesystem::path& path, const std::vector<json>& events) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + path.string());
    out << render_events(events);
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

ReplayReport replay(const std::vector<json>& recorded) {
    ReplayReport report{Trial::from_events(recorded), std::nullopt};
    const auto& fresh = report.trial.events();
    const std::size_t n = std::max(fresh.size(), recorded.size());
    for (std::size_t k = 0; k < n; ++k) {
        const json a = k < recorded.size() ? recorded[k] : json(nullptr);
        const json b = k < fresh.size() ? fresh[k] : json(nullptr);
        if (a != b) {
            report.mismatch = ReplayMismatch{k, a, b};
            break;
        }
    }
    return report;
}

}  // namespace mci33
