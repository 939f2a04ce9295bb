#include "tailor/service.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "tailor/activity.hpp"
#include "tailor/errors.hpp"
#include "tailor/events.hpp"
#include "tailor/pipeline.hpp"

namespace tailor {

using Json = nlohmann::ordered_json;

namespace {

Timestamp wall_clock_now() {
    return Timestamp{std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count()};
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::string& field = "") {
    Json body{{"error", message}};
    if (!field.empty()) body["field"] = field;
    send_json(res, status, body);
}

// Optional "at" override (body field or query parameter) so clients with
// buffered events can backfill; defaults to the server clock.
std::optional<Timestamp> request_time(const httplib::Request& req, const Json& body,
                                      std::string* error) {
    std::string raw;
    if (body.is_object() && body.contains("at")) {
        if (!body["at"].is_string()) {
            *error = "at must be an RFC 3339 string";
            return std::nullopt;
        }
        raw = body["at"].get<std::string>();
    } else if (req.has_param("at")) {
        raw = req.get_param_value("at");
    } else {
        return wall_clock_now();
    }
    auto at = parse_timestamp(raw);
    if (!at) {
        *error = "at is not a valid RFC 3339 timestamp";
        return std::nullopt;
    }
    return at;
}

}  // namespace

struct IngestService::Impl {
    ServiceOptions options;
    MessageCatalog catalog;
    httplib::Server server;

    mutable std::mutex mutex;
    std::vector<EventRecord> log;
    std::uint64_t next_seq = 1;
    std::map<std::string, UserProfile> profiles;
    std::map<std::string, std::map<Date, double>> activity;
    std::ofstream appender;

    explicit Impl(ServiceOptions opts, MessageCatalog cat)
        : options(std::move(opts)), catalog(std::move(cat)) {
        if (std::filesystem::exists(options.log_path)) {
            log = read_event_log(options.log_path);
            for (const EventRecord& rec : log) {
                if (rec.seq >= next_seq) next_seq = rec.seq + 1;
                apply(rec);
            }
        }
        appender.open(options.log_path, std::ios::app);
        if (!appender) throw IoError("cannot open event log for append: " + options.log_path);
        route();
    }

    void apply(const EventRecord& rec) {
        if (const auto* update = std::get_if<ProfileUpdateEvent>(&rec.kind)) {
            profiles[rec.user_id] = update->profile;
        } else if (const auto* interests = std::get_if<InterestsUpdateEvent>(&rec.kind)) {
            auto it = profiles.find(rec.user_id);
            if (it != profiles.end()) it->second.interests = interests->interests;
        } else if (const auto* sample = std::get_if<ActivitySampleEvent>(&rec.kind)) {
            activity[rec.user_id][sample->day] = sample->active_minutes;
        }
    }

    // The single commit point: assign seq, make it durable, then expose it.
    std::uint64_t append(std::string user_id, Timestamp at, EventKind kind) {
        EventRecord rec;
        rec.user_id = std::move(user_id);
        rec.at = at;
        rec.kind = std::move(kind);
        rec.seq = next_seq++;
        appender << event_to_json_line(rec) << '\n';
        appender.flush();
        if (!appender) throw IoError("failed appending to event log: " + options.log_path);
        apply(rec);
        log.push_back(std::move(rec));
        return log.back().seq;
    }

    bool user_exists(const std::string& user_id) const { return profiles.contains(user_id); }

    void route() {
        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(mutex);
            send_json(res, 200, Json{{"status", "ok"}, {"events", log.size()}});
        });

        server.Post("/users", [this](const httplib::Request& req, httplib::Response& res) {
            Json body = Json::parse(req.body, nullptr, false);
            if (body.is_discarded()) return send_error(res, 400, "body is not valid JSON");
            std::string error;
            auto at = request_time(req, body, &error);
            if (!at) return send_error(res, 400, error, "at");
            auto profile = profile_from_json(req.body, &error);
            if (!profile) return send_error(res, 400, error, "profile");
            if (profile->user_id.empty()) return send_error(res, 400, "user_id required", "user_id");
            if (!body.contains("enrolled_at")) profile->enrolled_at = date_of(*at);
            std::lock_guard lock(mutex);
            if (user_exists(profile->user_id)) {
                return send_error(res, 409, "user already registered", "user_id");
            }
            const std::string user_id = profile->user_id;
            const auto seq = append(user_id, *at, ProfileUpdateEvent{std::move(*profile)});
            send_json(res, 200, Json{{"seq", seq}});
        });

        server.Put(R"(/users/([^/]+)/interests)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       const std::string user_id = req.matches[1];
                       Json body = Json::parse(req.body, nullptr, false);
                       if (body.is_discarded() || !body.is_object() || !body.contains("interests")) {
                           return send_error(res, 400, "expected {interests: [5 levels]}",
                                             "interests");
                       }
                       std::string error;
                       auto at = request_time(req, body, &error);
                       if (!at) return send_error(res, 400, error, "at");
                       Likert3 interests{};
                       const auto& arr = body["interests"];
                       if (!arr.is_array() || arr.size() != kTopicCount) {
                           return send_error(res, 400, "interests must have 5 entries",
                                             "interests");
                       }
                       for (std::size_t i = 0; i < kTopicCount; ++i) {
                           if (!arr[i].is_number_integer() || arr[i].get<int>() < 0 ||
                               arr[i].get<int>() > 2) {
                               return send_error(res, 400, "interest levels must be 0, 1 or 2",
                                                 "interests[" + std::to_string(i) + "]");
                           }
                           interests[i] = static_cast<std::uint8_t>(arr[i].get<int>());
                       }
                       std::lock_guard lock(mutex);
                       if (!user_exists(user_id)) return send_error(res, 404, "unknown user");
                       const auto seq = append(user_id, *at, InterestsUpdateEvent{interests});
                       send_json(res, 200, Json{{"seq", seq}});
                   });

        server.Put(R"(/users/([^/]+)/window)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       const std::string user_id = req.matches[1];
                       Json body = Json::parse(req.body, nullptr, false);
                       if (body.is_discarded() || !body.is_object() || !body.contains("start") ||
                           !body.contains("end") || !body["start"].is_number_integer() ||
                           !body["end"].is_number_integer()) {
                           return send_error(res, 400, "expected {start, end} minutes of day");
                       }
                       std::string error;
                       auto at = request_time(req, body, &error);
                       if (!at) return send_error(res, 400, error, "at");
                       const TimeWindow window{body["start"].get<int>(), body["end"].get<int>()};
                       if (!valid_window(window)) {
                           return send_error(res, 400,
                                             "window must satisfy 0 <= start < end <= 1440 and "
                                             "span at least one minute",
                                             "window");
                       }
                       std::lock_guard lock(mutex);
                       auto it = profiles.find(user_id);
                       if (it == profiles.end()) return send_error(res, 404, "unknown user");
                       UserProfile updated = it->second;
                       updated.window = window;
                       const auto seq = append(user_id, *at, ProfileUpdateEvent{std::move(updated)});
                       send_json(res, 200, Json{{"seq", seq}});
                   });

        server.Post("/events/vote", [this](const httplib::Request& req, httplib::Response& res) {
            Json body = Json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) {
                return send_error(res, 400, "body is not valid JSON");
            }
            for (const char* key : {"user_id", "message_id", "value"}) {
                if (!body.contains(key) || !body[key].is_string()) {
                    return send_error(res, 400, std::string(key) + " must be a string", key);
                }
            }
            std::string error;
            auto at = request_time(req, body, &error);
            if (!at) return send_error(res, 400, error, "at");
            auto value = parse_vote_value(body["value"].get<std::string>());
            if (!value) return send_error(res, 400, "value must be like, neutral or dislike", "value");
            const std::string user_id = body["user_id"].get<std::string>();
            const std::string message_id = body["message_id"].get<std::string>();
            std::lock_guard lock(mutex);
            if (!user_exists(user_id)) return send_error(res, 404, "unknown user", "user_id");
            if (catalog.find(message_id) == nullptr) {
                return send_error(res, 404, "unknown message", "message_id");
            }
            const auto seq = append(user_id, *at, VoteEvent{message_id, *value});
            send_json(res, 200, Json{{"seq", seq}});
        });

        server.Post("/events/section-access",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        Json body = Json::parse(req.body, nullptr, false);
                        if (body.is_discarded() || !body.is_object()) {
                            return send_error(res, 400, "body is not valid JSON");
                        }
                        if (!body.contains("user_id") || !body["user_id"].is_string()) {
                            return send_error(res, 400, "user_id must be a string", "user_id");
                        }
                        if (!body.contains("topic") || !body["topic"].is_string()) {
                            return send_error(res, 400, "topic must be a topic name", "topic");
                        }
                        auto topic = parse_topic(body["topic"].get<std::string>());
                        if (!topic) return send_error(res, 400, "unknown topic", "topic");
                        if (!body.contains("dwell_seconds") || !body["dwell_seconds"].is_number()) {
                            return send_error(res, 400, "dwell_seconds must be a number",
                                              "dwell_seconds");
                        }
                        const double dwell = body["dwell_seconds"].get<double>();
                        if (dwell < 0.0) {
                            return send_error(res, 400, "dwell_seconds must be >= 0",
                                              "dwell_seconds");
                        }
                        std::string error;
                        auto at = request_time(req, body, &error);
                        if (!at) return send_error(res, 400, error, "at");
                        const std::string user_id = body["user_id"].get<std::string>();
                        std::lock_guard lock(mutex);
                        if (!user_exists(user_id)) return send_error(res, 404, "unknown user");
                        const auto seq = append(user_id, *at, SectionAccessEvent{*topic, dwell});
                        send_json(res, 200, Json{{"seq", seq}});
                    });

        server.Post("/events/read", [this](const httplib::Request& req, httplib::Response& res) {
            Json body = Json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) {
                return send_error(res, 400, "body is not valid JSON");
            }
            for (const char* key : {"user_id", "message_id"}) {
                if (!body.contains(key) || !body[key].is_string()) {
                    return send_error(res, 400, std::string(key) + " must be a string", key);
                }
            }
            std::string error;
            auto at = request_time(req, body, &error);
            if (!at) return send_error(res, 400, error, "at");
            const std::string user_id = body["user_id"].get<std::string>();
            const std::string message_id = body["message_id"].get<std::string>();
            std::lock_guard lock(mutex);
            if (!user_exists(user_id)) return send_error(res, 404, "unknown user", "user_id");
            if (catalog.find(message_id) == nullptr) {
                return send_error(res, 404, "unknown message", "message_id");
            }
            const auto seq = append(user_id, *at, MessageReadEvent{message_id});
            send_json(res, 200, Json{{"seq", seq}});
        });

        server.Post("/events/activity",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        Json body = Json::parse(req.body, nullptr, false);
                        if (body.is_discarded() || !body.is_object()) {
                            return send_error(res, 400, "body is not valid JSON");
                        }
                        if (!body.contains("user_id") || !body["user_id"].is_string()) {
                            return send_error(res, 400, "user_id must be a string", "user_id");
                        }
                        if (!body.contains("day") || !body["day"].is_string()) {
                            return send_error(res, 400, "day must be YYYY-MM-DD", "day");
                        }
                        auto day = parse_date(body["day"].get<std::string>());
                        if (!day) return send_error(res, 400, "day is not a valid date", "day");
                        if (!body.contains("active_minutes") ||
                            !body["active_minutes"].is_number()) {
                            return send_error(res, 400, "active_minutes must be a number",
                                              "active_minutes");
                        }
                        const double minutes = body["active_minutes"].get<double>();
                        if (minutes < 0.0) {
                            return send_error(res, 400, "active_minutes must be >= 0",
                                              "active_minutes");
                        }
                        std::string error;
                        auto at = request_time(req, body, &error);
                        if (!at) return send_error(res, 400, error, "at");
                        const std::string user_id = body["user_id"].get<std::string>();
                        std::lock_guard lock(mutex);
                        if (!user_exists(user_id)) return send_error(res, 404, "unknown user");
                        const auto seq = append(user_id, *at, ActivitySampleEvent{minutes, *day});
                        send_json(res, 200, Json{{"seq", seq}});
                    });

        server.Get(R"(/users/([^/]+)/plan)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       const std::string user_id = req.matches[1];
                       if (!req.has_param("date")) {
                           return send_error(res, 400, "date query parameter required", "date");
                       }
                       auto date = parse_date(req.get_param_value("date"));
                       if (!date) return send_error(res, 400, "date is not a valid date", "date");
                       std::lock_guard lock(mutex);
                       auto profile_it = profiles.find(user_id);
                       if (profile_it == profiles.end()) {
                           return send_error(res, 404, "unknown user");
                       }
                       serve_plan(res, profile_it->second, *date);
                   });
    }

    void serve_plan(httplib::Response& res, const UserProfile& user, Date date) {
        const std::string path =
            options.plans_dir + "/plan-" + format_date(date) + ".jsonl";
        Json entries = Json::array();
        if (std::filesystem::exists(path)) {
            const NightlyPlan plan = read_plan(path);
            for (const PlanEntry& entry : plan.entries) {
                if (entry.user_id != user.user_id) continue;
                const Message* message = catalog.find(entry.message_id);
                if (message == nullptr) {
                    return send_error(res, 500,
                                      "plan references a message missing from the catalog: " +
                                          entry.message_id);
                }
                entries.push_back(rendered_entry(entry, *message, user, date));
            }
        }
        send_json(res, 200, Json{{"user_id", user.user_id},
                                 {"date", format_date(date)},
                                 {"entries", entries}});
    }

    Json rendered_entry(const PlanEntry& entry, const Message& message, const UserProfile& user,
                        Date date) {
        std::string body;
        bool fallback = entry.fallback;
        std::string message_id = entry.message_id;
        if (message.has_delta_placeholder()) {
            auto activity_it = activity.find(user.user_id);
            const auto stats =
                activity_it == activity.end()
                    ? std::nullopt
                    : activity_stats(activity_it->second, user.user_id, date - 1,
                                     options.engine.ppal_window_days);
            if (stats) {
                body = render_ppal_message(message.body, user, *stats);
            } else {
                // The planner substitutes plain messages ahead of time;
                // this covers plans produced against a different log.
                const std::vector<Message>& pool = catalog.pool(Topic::kPpal);
                const Message* plain = nullptr;
                for (const Message& candidate : pool) {
                    if (!candidate.has_delta_placeholder()) {
                        plain = &candidate;
                        break;
                    }
                }
                if (plain == nullptr) {
                    body = render_name_only(message.body, user);
                } else {
                    message_id = plain->id;
                    body = render_name_only(plain->body, user);
                    fallback = true;
                }
            }
        } else {
            body = render_name_only(message.body, user);
        }
        Json j{{"user_id", entry.user_id},
               {"message_id", message_id},
               {"topic", topic_name(entry.topic)},
               {"send_at", format_timestamp(entry.send_at)},
               {"slot_index", entry.slot_index},
               {"plan_date", format_date(entry.plan_date)},
               {"body", body}};
        if (fallback) j["fallback"] = true;
        return j;
    }
};

IngestService::IngestService(ServiceOptions options, MessageCatalog catalog)
    : impl_(std::make_unique<Impl>(std::move(options), std::move(catalog))) {}

IngestService::~IngestService() {
    stop();
}

bool IngestService::bind(const std::string& host, int port) {
    return impl_->server.bind_to_port(host, port);
}

int IngestService::bind_any_port(const std::string& host) {
    return impl_->server.bind_to_any_port(host);
}

bool IngestService::listen_after_bind() {
    return impl_->server.listen_after_bind();
}

void IngestService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool IngestService::is_running() const {
    return impl_->server.is_running();
}

std::uint64_t IngestService::event_count() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->log.size();
}

}  // namespace tailor
