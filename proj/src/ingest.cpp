#include "mci33/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#ifndef MCI33_FIXTURE_DIR
#define MCI33_FIXTURE_DIR "fixtures"
#endif

namespace mci33 {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> out;
    std::size_t k = 0;
    while (k < line.size()) {
        while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
        const std::size_t start = k;
        while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
        if (k > start) out.emplace_back(line.substr(start, k - start));
    }
    return out;
}

double parse_real(const std::string& word, int line_no) {
    double v = 0.0;
    const auto* end = word.data() + word.size();
    const auto [ptr, ec] = std::from_chars(word.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw parse_error("line " + std::to_string(line_no) + ": '" + word + "' is not a number");
    }
    return v;
}

std::string shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

bool operator==(const Scenario& a, const Scenario& b) {
    if (a.name != b.name || a.target != b.target || a.lower != b.lower || a.upper != b.upper ||
        !(a.grid == b.grid) || a.has_margins != b.has_margins || a.tox.rows != b.tox.rows ||
        a.tox.cols != b.tox.cols) {
        return false;
    }
    for (std::size_t k = 0; k < a.tox.values.size(); ++k) {
        const double x = a.tox.values[k], y = b.tox.values[k];
        if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
    }
    return true;
}

DoseSet Scenario::true_mtdcs() const {
    DoseSet out;
    const auto interval = ei();
    for (const auto& dc : grid.combinations())
        if (interval.contains(truth(dc))) out.insert(dc);
    return out;
}

Scenario parse_scenario(std::string_view document) {
    Scenario s;
    bool seen_name = false, seen_target = false, seen_ei = false;
    std::vector<double> dosage_a, dosage_b;
    std::vector<std::vector<double>> rows;
    bool in_tox = false, seen_tox = false;

    std::istringstream in{std::string(document)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const auto words = split_words(raw);
        if (words.empty()) continue;
        const auto where = "line " + std::to_string(line_no) + ": ";

        if (in_tox) {
            if (words.size() == 1 && words[0] == "end") {
                in_tox = false;
                continue;
            }
            std::vector<double> row;
            for (const auto& w : words) row.push_back(w == "-" ? kMissing : parse_real(w, line_no));
            if (!rows.empty() && row.size() != rows.front().size()) {
                throw parse_error(where + "ragged matrix: row has " + std::to_string(row.size()) +
                                  " entries, expected " + std::to_string(rows.front().size()));
            }
            rows.push_back(std::move(row));
            continue;
        }

        const auto& key = words[0];
        auto want = [&](std::size_t count) {
            if (words.size() != count + 1) {
                throw parse_error(where + "'" + key + "' takes " + std::to_string(count) + " value(s)");
            }
        };
        if (key == "scenario") {
            want(1);
            s.name = words[1];
            seen_name = true;
        } else if (key == "p_T") {
            want(1);
            s.target = parse_real(words[1], line_no);
            seen_target = true;
        } else if (key == "ei") {
            want(2);
            s.lower = parse_real(words[1], line_no);
            s.upper = parse_real(words[2], line_no);
            seen_ei = true;
        } else if (key == "dosage_a" || key == "dosage_b") {
            if (words.size() < 2) throw parse_error(where + "'" + key + "' needs at least one value");
            auto& target = key == "dosage_a" ? dosage_a : dosage_b;
            target.clear();
            for (std::size_t k = 1; k < words.size(); ++k) target.push_back(parse_real(words[k], line_no));
        } else if (key == "tox") {
            want(0);
            if (seen_tox) throw parse_error(where + "duplicate tox block");
            in_tox = seen_tox = true;
        } else {
            throw parse_error(where + "unknown directive '" + key + "'");
        }
    }
    if (in_tox) throw parse_error("tox block is missing its 'end'");
    if (!seen_name) throw parse_error("missing 'scenario' line");
    if (!seen_target) throw parse_error("missing 'p_T' line");
    if (!seen_ei) throw parse_error("missing 'ei' line");
    if (!seen_tox) throw parse_error("missing tox block");
    if (rows.size() < 2 || rows.front().size() < 2) {
        throw parse_error("tox matrix needs a margin row/column plus at least one combination row and column");
    }

    const int levels_a = static_cast<int>(rows.size()) - 1;
    const int levels_b = static_cast<int>(rows.front().size()) - 1;
    if (!dosage_a.empty() && static_cast<int>(dosage_a.size()) != levels_a) {
        throw parse_error("dosage_a has " + std::to_string(dosage_a.size()) + " values but the matrix has " +
                          std::to_string(levels_a) + " levels of drug A");
    }
    if (!dosage_b.empty() && static_cast<int>(dosage_b.size()) != levels_b) {
        throw parse_error("dosage_b has " + std::to_string(dosage_b.size()) + " values but the matrix has " +
                          std::to_string(levels_b) + " levels of drug B");
    }
    try {
        s.grid = dosage_a.empty() && dosage_b.empty()
                     ? DoseGrid(levels_a, levels_b)
                     : DoseGrid(dosage_a.empty() ? DoseGrid(levels_a, 1).dosages_a() : dosage_a,
                                dosage_b.empty() ? DoseGrid(1, levels_b).dosages_b() : dosage_b);
        (void)s.ei();
    } catch (const domain_error& e) {
        throw parse_error(e.what());
    }
    if (!(s.lower < s.upper)) throw parse_error("ei: lower must be below upper");

    s.tox = Matrix(levels_a + 1, levels_b + 1, kMissing);
    if (!std::isnan(rows[0][0])) throw parse_error("tox(0,0) must be '-' (no treatment)");
    int margins_given = 0, margins_missing = 0;
    for (int i = 0; i <= levels_a; ++i) {
        for (int j = 0; j <= levels_b; ++j) {
            if (i == 0 && j == 0) continue;
            const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const bool margin = i == 0 || j == 0;
            const auto cell = "tox" + to_string(DoseCombo{i, j});
            if (std::isnan(v)) {
                if (!margin) throw parse_error(cell + " is missing; only margins may be '-'");
                ++margins_missing;
                continue;
            }
            if (!(v > 0.0 && v < 1.0)) throw parse_error(cell + " = " + shortest(v) + " is outside (0,1)");
            if (margin) ++margins_given;
            s.tox(i, j) = v;
        }
    }
    if (margins_given > 0 && margins_missing > 0) {
        throw parse_error("margins are incomplete: give every single-agent toxicity or none");
    }
    s.has_margins = margins_given > 0;
    return s;
}

std::string render_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "scenario " << s.name << '\n';
    out << "p_T " << shortest(s.target) << '\n';
    out << "ei " << shortest(s.lower) << ' ' << shortest(s.upper) << '\n';
    out << "dosage_a";
    for (double d : s.grid.dosages_a()) out << ' ' << shortest(d);
    out << "\ndosage_b";
    for (double d : s.grid.dosages_b()) out << ' ' << shortest(d);
    out << "\ntox\n";
    for (int i = 0; i < s.tox.rows; ++i) {
        for (int j = 0; j < s.tox.cols; ++j) {
            const double v = s.tox(i, j);
            out << (j == 0 ? "" : " ") << (std::isnan(v) ? std::string("-") : shortest(v));
        }
        out << '\n';
    }
    out << "end\n";
    return out.str();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path fixture_dir() {
    if (const char* env = std::getenv("MCI33_FIXTURES"); env && *env) return env;
    return MCI33_FIXTURE_DIR;
}

Scenario load_scenario(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::is_regular_file(name_or_path, ec)) return parse_scenario(read_file(name_or_path));
    const auto candidate = fixture_dir() / (name_or_path + ".scn");
    if (fs::is_regular_file(candidate, ec)) return parse_scenario(read_file(candidate));
    throw parse_error("unknown scenario '" + name_or_path + "' (not a file, not a fixture in " +
                      fixture_dir().string() + ")");
}

namespace {

class ConfigReader {
public:
    explicit ConfigReader(const json& obj, std::string prefix = "") : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) throw parse_error(label("") + "expected an object");
    }

    const json* find(const std::string& key) {
        seen_.push_back(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void real(const std::string& key, double& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number()) throw parse_error(label(key) + "must be a number");
            out = v->get<double>();
        }
    }

    void integer(const std::string& key, int& out) {
        if (const auto* v = find(key)) {
            if (!v->is_number_integer()) throw parse_error(label(key) + "must be an integer");
            const auto x = v->get<std::int64_t>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
                throw parse_error(label(key) + "out of range");
            }
            out = static_cast<int>(x);
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const auto* v = find(key)) {
            if (!v->is_boolean()) throw parse_error(label(key) + "must be true or false");
            out = v->get<bool>();
        }
    }

    std::vector<double> reals(const json& v, const std::string& key) {
        if (!v.is_array() || v.empty()) throw parse_error(label(key) + "must be a non-empty array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw parse_error(label(key) + "must be a non-empty array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, _] : obj_.items()) {
            if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
                throw parse_error(label(key) + "unknown key");
            }
        }
    }

    std::string label(const std::string& key) const {
        return prefix_ + key + (prefix_.empty() && key.empty() ? "" : ": ");
    }

private:
    const json& obj_;
    std::string prefix_;
    std::vector<std::string> seen_;
};

}  // namespace

TrialConfig parse_config(const json& doc) {
    TrialConfig cfg;
    ConfigReader r(doc);

    const json* levels_a = r.find("levels_a");
    const json* levels_b = r.find("levels_b");
    const json* dosage_a = r.find("dosage_a");
    const json* dosage_b = r.find("dosage_b");
    if ((levels_a && dosage_a) || (levels_b && dosage_b)) {
        throw parse_error("grid: give either levels_* or dosage_* for each drug, not both");
    }
    try {
        auto levels = [&](const json* v, const char* key, int fallback) {
            if (!v) return fallback;
            if (!v->is_number_integer()) throw parse_error(std::string(key) + ": must be an integer");
            return v->get<int>();
        };
        std::vector<double> da = dosage_a ? r.reals(*dosage_a, "dosage_a")
                                          : DoseGrid(levels(levels_a, "levels_a", 4), 1).dosages_a();
        std::vector<double> db = dosage_b ? r.reals(*dosage_b, "dosage_b")
                                          : DoseGrid(1, levels(levels_b, "levels_b", 5)).dosages_b();
        cfg.grid = DoseGrid(std::move(da), std::move(db));
    } catch (const domain_error& e) {
        throw parse_error(std::string("grid: ") + e.what());
    }

    r.real("p_T", cfg.target);
    r.real("eps1", cfg.eps_low);
    r.real("eps2", cfg.eps_high);
    r.integer("cohort_size", cfg.cohort_size);
    r.integer("max_total_n", cfg.max_total_n);
    if (const auto* v = r.find("variant")) {
        const auto name = v->is_string() ? v->get<std::string>() : "";
        if (name == "two-stage") cfg.variant = Variant::TwoStage;
        else if (name == "three-stage") cfg.variant = Variant::ThreeStage;
        else throw parse_error("variant: must be \"two-stage\" or \"three-stage\"");
    }
    r.real("monitor_eta", cfg.monitor_eta);
    r.real("sr1_eta", cfg.sr1_eta);
    r.real("eps", cfg.utility_eps);
    if (const auto* v = r.find("seed")) {
        if (!v->is_number_integer()) throw parse_error("seed: must be a non-negative integer");
        if (v->is_number_unsigned()) cfg.seed = v->get<std::uint64_t>();
        else if (v->get<std::int64_t>() < 0) throw parse_error("seed: must be a non-negative integer");
        else cfg.seed = static_cast<std::uint64_t>(v->get<std::int64_t>());
    }
    r.boolean("stage1_enabled", cfg.stage1_enabled);
    r.boolean("multiple_mtdc", cfg.multiple_mtdc);
    if (const auto* v = r.find("starting_dcs"); v && !v->is_null()) {
        if (!v->is_array()) throw parse_error("starting_dcs: must be an array of [i, j] pairs");
        DoseSet dcs;
        for (const auto& d : *v) {
            try {
                dcs.insert(dose_from_json(d));
            } catch (const domain_error& e) {
                throw parse_error(std::string("starting_dcs: ") + e.what());
            }
        }
        cfg.starting_dcs = dcs;
    }
    if (const auto* v = r.find("sampler")) {
        ConfigReader s(*v, "sampler.");
        s.integer("iterations", cfg.sampler.iterations);
        s.integer("burn_in", cfg.sampler.burn_in);
        s.integer("thin", cfg.sampler.thin);
        s.reject_unknown();
    }
    if (const auto* v = r.find("prior")) {
        ConfigReader p(*v, "prior.");
        p.real("intercept_mean", cfg.prior.intercept_mean);
        p.real("intercept_var", cfg.prior.intercept_var);
        p.real("slope_log_location", cfg.prior.slope_log_location);
        p.real("slope_log_var", cfg.prior.slope_log_var);
        p.real("extra_mean", cfg.prior.extra_mean);
        p.real("extra_var", cfg.prior.extra_var);
        p.reject_unknown();
    }
    r.reject_unknown();

    try {
        cfg.validate();
    } catch (const domain_error& e) {
        throw parse_error(e.what());
    }
    return cfg;
}

TrialConfig parse_config_text(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const TrialConfig& cfg) {
    json out;
    out["dosage_a"] = cfg.grid.dosages_a();
    out["dosage_b"] = cfg.grid.dosages_b();
    out["p_T"] = cfg.target;
    out["eps1"] = cfg.eps_low;
    out["eps2"] = cfg.eps_high;
    out["cohort_size"] = cfg.cohort_size;
    out["max_total_n"] = cfg.max_total_n;
    out["variant"] = to_string(cfg.variant);
    out["monitor_eta"] = cfg.monitor_eta;
    out["sr1_eta"] = cfg.sr1_eta;
    out["eps"] = cfg.utility_eps;
    out["seed"] = cfg.seed;
    out["stage1_enabled"] = cfg.stage1_enabled;
    out["multiple_mtdc"] = cfg.multiple_mtdc;
    if (cfg.starting_dcs) out["starting_dcs"] = to_json(*cfg.starting_dcs);
    out["sampler"] = {{"iterations", cfg.sampler.iterations},
                      {"burn_in", cfg.sampler.burn_in},
                      {"thin", cfg.sampler.thin}};
    out["prior"] = {{"intercept_mean", cfg.prior.intercept_mean},
                    {"intercept_var", cfg.prior.intercept_var},
                    {"slope_log_location", cfg.prior.slope_log_location},
                    {"slope_log_var", cfg.prior.slope_log_var},
                    {"extra_mean", cfg.prior.extra_mean},
                    {"extra_var", cfg.prior.extra_var}};
    return out;
}

}  // namespace mci33
