#include "mci33/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

#include "httplib.h"
#include "mci33/eventlog.hpp"
#include "mci33/ingest.hpp"

namespace mci33 {

namespace {

Response error(int status, const std::string& message) {
    return {status, {{"error", message}}};
}

// parse_error messages start with the offending field ("cohort_size: must be >= 1").
Response config_error(const std::string& message) {
    Response r = error(400, message);
    if (const auto colon = message.find(": "); colon != std::string::npos && message.find(' ') >= colon) {
        r.body["field"] = message.substr(0, colon);
    }
    return r;
}

std::optional<json> parse_body(const std::string& body, bool allow_empty) {
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) {
        if (allow_empty) return json::object();
        return std::nullopt;
    }
    try {
        return json::parse(body);
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
}

std::string format_id(int k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%04d", k);
    return buf;
}

// Outcome cohorts keyed by dose, for comparing a resubmission with the log.
std::map<DoseCombo, std::pair<int, int>> cohort_map(const json& cohorts) {
    std::map<DoseCombo, std::pair<int, int>> out;
    for (const auto& c : cohorts) out[dose_from_json(c.at("dose"))] = {c.at("n").get<int>(), c.at("y").get<int>()};
    return out;
}

json rule_texts(const std::vector<json>& events) {
    json out = json::array();
    for (const auto& ev : events) {
        const auto type = ev.value("type", "");
        if (type == "rule") {
            out.push_back(ev.at("text"));
        } else if (type == "eliminated") {
            for (const auto& d : ev.at("doses"))
                out.push_back("SR1 eliminated " + to_string(dose_from_json(d)));
        } else if (type == "stop") {
            out.push_back(ev.at("reason"));
        }
    }
    return out;
}

}  // namespace

ConductService::ConductService(std::filesystem::path data_dir)
    : dir_(std::move(data_dir)), server_(std::make_unique<httplib::Server>()) {
    namespace fs = std::filesystem;
    fs::create_directories(dir_);
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (entry.path().extension() != ".log") continue;
        const auto id = entry.path().stem().string();
        const auto recorded = read_events(entry.path());
        auto report = replay(recorded);
        if (report.mismatch) {
            throw std::runtime_error("trial " + id + ": log does not replay (event " +
                                     std::to_string(report.mismatch->index) + ")");
        }
        auto e = std::make_shared<Entry>();
        e->trial = std::make_shared<const Trial>(std::move(report.trial));
        trials_[id] = e;
        if (id.size() > 1 && id[0] == 'T') {
            int k = 0;
            const auto [p, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), k);
            if (ec == std::errc{} && p == id.data() + id.size()) next_id_ = std::max(next_id_, k + 1);
        }
    }
}

ConductService::~ConductService() = default;

std::filesystem::path ConductService::log_path(const std::string& id) const { return dir_ / (id + ".log"); }

std::shared_ptr<ConductService::Entry> ConductService::find(const std::string& id) const {
    std::lock_guard lock(registry_);
    const auto it = trials_.find(id);
    return it == trials_.end() ? nullptr : it->second;
}

std::vector<std::string> ConductService::ids() const {
    std::lock_guard lock(registry_);
    std::vector<std::string> out;
    for (const auto& [id, _] : trials_) out.push_back(id);
    return out;
}

Response ConductService::create(const std::string& body) {
    const auto doc = parse_body(body, true);
    if (!doc) return error(400, "request body is not valid JSON");
    TrialConfig cfg;
    try {
        cfg = parse_config(*doc);
    } catch (const parse_error& e) {
        return config_error(e.what());
    }
    auto trial = std::make_shared<const Trial>(cfg);

    std::string id;
    {
        std::lock_guard lock(registry_);
        do {
            id = format_id(next_id_++);
        } while (trials_.contains(id) || std::filesystem::exists(log_path(id)));
        write_events(log_path(id), trial->events());
        auto e = std::make_shared<Entry>();
        e->trial = trial;
        trials_[id] = e;
    }
    return {201, {{"id", id}, {"stage", to_string(trial->stage())}, {"decision", trial->decision_report()}}};
}

Response ConductService::get(const std::string& id) const {
    const auto e = find(id);
    if (!e) return error(404, "unknown trial " + id);
    json body = e->load()->snapshot();
    body["id"] = id;
    return {200, body};
}

Response ConductService::events(const std::string& id) const {
    const auto e = find(id);
    if (!e) return error(404, "unknown trial " + id);
    return {200, {{"id", id}, {"events", e->load()->events()}}};
}

Response ConductService::submit(const std::string& id, const std::string& body) {
    const auto e = find(id);
    if (!e) return error(404, "unknown trial " + id);
    const auto doc = parse_body(body, false);
    if (!doc || !doc->is_object()) return error(400, "request body must be a JSON object");
    if (!doc->contains("seq") || !(*doc)["seq"].is_number_integer()) return error(400, "seq: required integer");
    if (!doc->contains("cohorts") || !(*doc)["cohorts"].is_array()) return error(400, "cohorts: required array");

    std::vector<CohortOutcome> outcomes;
    try {
        for (const auto& c : (*doc)["cohorts"]) {
            if (!c.is_object() || !c.contains("dose") || !c.contains("n") || !c.contains("y") ||
                !c["n"].is_number_integer() || !c["y"].is_number_integer()) {
                return error(400, "cohorts: each entry needs dose [i,j], integer n and integer y");
            }
            outcomes.push_back({dose_from_json(c["dose"]), c["n"].get<int>(), c["y"].get<int>()});
        }
    } catch (const domain_error& ex) {
        return error(400, std::string("cohorts: ") + ex.what());
    }
    const int seq = (*doc)["seq"].get<int>();

    std::lock_guard writer(e->write);
    const auto current = e->load();

    // A resubmission of an applied cohort is acknowledged if it matches.
    const bool already_applied = current->terminal() ? seq >= 1 && seq <= current->pending_seq()
                                                     : seq >= 1 && seq < current->pending_seq();
    if (already_applied) {
        for (const auto& ev : current->events()) {
            if (ev.value("type", "") != "outcome" || ev.at("seq").get<int>() != seq) continue;
            if (cohort_map(ev.at("cohorts")) != cohort_map((*doc)["cohorts"])) {
                return error(409, "seq " + std::to_string(seq) + " was already applied with different outcomes");
            }
            return {200,
                    {{"id", id},
                     {"seq", seq},
                     {"duplicate", true},
                     {"stage", to_string(current->stage())},
                     {"decision", current->decision_report()}}};
        }
    }
    if (current->terminal()) {
        return error(409, "trial is " + to_string(current->stage()) + "; no outcomes expected");
    }
    if (seq != current->pending_seq()) {
        return error(409, "expected seq " + std::to_string(current->pending_seq()) + ", got " + std::to_string(seq));
    }

    auto next = std::make_shared<Trial>(*current);
    try {
        next->observe(outcomes);
    } catch (const state_error& ex) {
        return error(409, ex.what());
    } catch (const domain_error& ex) {
        return error(400, ex.what());
    }
    const auto& all = next->events();
    const std::vector<json> fresh(all.begin() + static_cast<std::ptrdiff_t>(current->events().size()), all.end());
    append_events(log_path(id), fresh);
    e->store(next);

    json safety = next->decision_report()["safety"];
    return {200,
            {{"id", id},
             {"seq", seq},
             {"duplicate", false},
             {"stage", to_string(next->stage())},
             {"rules", rule_texts(fresh)},
             {"events", fresh},
             {"safety", safety},
             {"decision", next->decision_report()}}};
}

Response ConductService::finalize(const std::string& id, const std::string& body) {
    const auto e = find(id);
    if (!e) return error(404, "unknown trial " + id);
    const auto doc = parse_body(body, true);
    if (!doc || !doc->is_object()) return error(400, "request body must be a JSON object");
    bool force = false;
    if (doc->contains("force")) {
        if (!(*doc)["force"].is_boolean()) return error(400, "force: must be true or false");
        force = (*doc)["force"].get<bool>();
    }
    const auto trial = e->load();
    if (!trial->terminal() && !force) {
        return error(409, "trial is still running (stage " + to_string(trial->stage()) +
                              "); pass {\"force\": true} for a provisional report");
    }
    json body_out = to_json(trial->result(force), trial->config().grid);
    body_out["id"] = id;
    return {200, body_out};
}

void ConductService::install_routes() {
    auto& srv = *server_;
    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    srv.Post("/trials", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, create(req.body));
    });
    srv.Get(R"(/trials/([A-Za-z0-9_-]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, get(req.matches[1]));
    });
    srv.Get(R"(/trials/([A-Za-z0-9_-]+)/events)",
            [this, reply](const httplib::Request& req, httplib::Response& res) { reply(res, events(req.matches[1])); });
    srv.Post(R"(/trials/([A-Za-z0-9_-]+)/outcomes)",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
                 reply(res, submit(req.matches[1], req.body));
             });
    srv.Post(R"(/trials/([A-Za-z0-9_-]+)/finalize)",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
                 reply(res, finalize(req.matches[1], req.body));
             });
    srv.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& ex) {
            what = ex.what();
        } catch (...) {
        }
        reply(res, error(500, what));
    });
}

int ConductService::bind(const std::string& host, int port) {
    install_routes();
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
    return bound;
}

void ConductService::listen() {
    if (!server_->listen_after_bind()) throw std::runtime_error("HTTP listener failed");
}

void ConductService::serve(const std::string& host, int port) {
    bind(host, port);
    listen();
}

void ConductService::stop() { server_->stop(); }

bool ConductService::running() const { return server_->is_running(); }

}  // namespace mci33
