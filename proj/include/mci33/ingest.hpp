#pragma once

// Scenario files and trial configuration documents.
//
// Scenarios use a small line-oriented text format (grammar in
// docs/formats.md); configs are JSON objects whose keys mirror TrialConfig.

#include <filesystem>
#include <string>
#include <string_view>

#include "mci33/isotonic.hpp"
#include "mci33/trial.hpp"

namespace mci33 {

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::string name;
    double target = 0.3;
    double lower = 0.25;
    double upper = 0.35;
    DoseGrid grid{1, 1};
    // (I+1) x (J+1) true toxicities indexed by (i, j); (0,0) and, when
    // has_margins is false, row 0 and column 0 hold NaN.
    Matrix tox;
    bool has_margins = false;

    EquivalenceInterval ei() const { return EquivalenceInterval::from_bounds(target, lower, upper); }
    double truth(const DoseCombo& dc) const { return tox(dc.i, dc.j); }
    // Combination DCs whose true toxicity lies in the interval.
    DoseSet true_mtdcs() const;

    friend bool operator==(const Scenario& a, const Scenario& b);
};

Scenario parse_scenario(std::string_view document);
std::string render_scenario(const Scenario& s);

// `name_or_path` is a readable file or a fixture name such as "sc3".
// Fixtures are looked up in $MCI33_FIXTURES, then in the build-time fixture
// directory.
Scenario load_scenario(const std::string& name_or_path);
std::filesystem::path fixture_dir();

// Unknown keys, wrong types and invariant violations raise parse_error with
// the offending field named.
TrialConfig parse_config(const json& doc);
TrialConfig parse_config_text(std::string_view document);
json config_to_json(const TrialConfig& cfg);

// Reads a whole file; throws parse_error when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace mci33
