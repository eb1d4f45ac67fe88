#pragma once

// HTTP conduct service. Every trial lives in <data_dir>/<id>.log; the
// in-memory state is rebuilt from those logs at startup.
//
//   POST /trials                  create from a config document
//   GET  /trials/{id}             snapshot
//   POST /trials/{id}/outcomes    {"seq": k, "cohorts": [{"dose": [i,j], "n": .., "y": ..}]}
//   POST /trials/{id}/finalize    {"force": bool} (body optional)
//   GET  /trials/{id}/events      the event log
//
// Handlers are plain functions of (id, body) so they can be exercised
// without a socket; serve() binds them to an HTTP listener.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "mci33/trial.hpp"

namespace httplib {
class Server;
}

namespace mci33 {

struct Response {
    int status = 200;
    json body;
};

class ConductService {
public:
    // Loads every *.log under data_dir (created if missing). Throws if a log
    // does not replay to itself.
    explicit ConductService(std::filesystem::path data_dir);
    ~ConductService();

    Response create(const std::string& body);
    Response get(const std::string& id) const;
    Response submit(const std::string& id, const std::string& body);
    Response finalize(const std::string& id, const std::string& body);
    Response events(const std::string& id) const;

    std::vector<std::string> ids() const;

    // Blocks serving HTTP until stop() is called from another thread.
    void serve(const std::string& host, int port);
    // serve() in two steps. bind() returns the bound port (port 0 picks a
    // free one); listen() then blocks like serve().
    int bind(const std::string& host, int port);
    void listen();
    void stop();
    bool running() const;

private:
    struct Entry {
        mutable std::mutex write;  // one writer per trial
        mutable std::mutex view;   // guards the pointer swap below
        std::shared_ptr<const Trial> trial;

        std::shared_ptr<const Trial> load() const {
            std::lock_guard lock(view);
            return trial;
        }
        void store(std::shared_ptr<const Trial> t) {
            std::lock_guard lock(view);
            trial = std::move(t);
        }
    };

    std::shared_ptr<Entry> find(const std::string& id) const;
    std::filesystem::path log_path(const std::string& id) const;
    void install_routes();

    std::filesystem::path dir_;
    mutable std::mutex registry_;
    std::map<std::string, std::shared_ptr<Entry>> trials_;
    int next_id_ = 1;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace mci33
