#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "tailor/catalog.hpp"
#include "tailor/config.hpp"

namespace tailor {

struct ServiceOptions {
    std::string log_path;   // JSONL event log, created on first append
    std::string plans_dir;  // nightly plan files live here
    EngineConfig engine;
};

// The HTTP edge: accepts registrations, interest/window updates and
// interaction events, appends them to the log (durable before the
// acknowledgment), and serves each user's plan for a day with activity-
// comparison bodies rendered.
//
// Appends are serialized at a single commit point; handler threads share
// one registry guarded by the same mutex.
class IngestService {
public:
    IngestService(ServiceOptions options, MessageCatalog catalog);
    ~IngestService();

    IngestService(const IngestService&) = delete;
    IngestService& operator=(const IngestService&) = delete;

    // bind() claims the port (false on failure), bind_any_port() picks a
    // free one (handy under test); listen_after_bind() then blocks serving
    // until stop().
    bool bind(const std::string& host, int port);
    int bind_any_port(const std::string& host);
    bool listen_after_bind();
    void stop();
    bool is_running() const;

    std::uint64_t event_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tailor
