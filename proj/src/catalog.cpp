#include "tailor/catalog.hpp"

#include <fstream>

#include <json.hpp>

#include "tailor/errors.hpp"

namespace tailor {

using Json = nlohmann::ordered_json;

void MessageCatalog::add(Message msg) {
    if (msg.id.empty()) throw DomainError("catalog: message id must not be empty");
    if (index_.contains(msg.id)) throw DomainError("catalog: duplicate message id " + msg.id);
    const bool has_placeholder = msg.body.find(kNamePlaceholder) != std::string::npos ||
                                 msg.body.find(kDeltaPlaceholder) != std::string::npos;
    if (has_placeholder && msg.topic != Topic::kPpal) {
        throw DomainError("catalog: message " + msg.id +
                          " carries placeholders but is not in the ppal pool");
    }
    auto& pool = pools_[topic_index(msg.topic)];
    index_.emplace(msg.id, std::make_pair(topic_index(msg.topic), pool.size()));
    pool.push_back(std::move(msg));
    ++total_;
}

const Message* MessageCatalog::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return nullptr;
    return &pools_[it->second.first][it->second.second];
}

bool MessageCatalog::any_pool_empty() const {
    for (const auto& pool : pools_) {
        if (pool.empty()) return true;
    }
    return false;
}

MessageCatalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open message catalog: " + path);
    MessageCatalog catalog;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        const std::string where = path + ":" + std::to_string(line_no);
        if (j.is_discarded() || !j.is_object()) throw IoError(where + ": not a JSON object");
        if (!j.contains("id") || !j["id"].is_string() || !j.contains("topic") ||
            !j["topic"].is_string() || !j.contains("body") || !j["body"].is_string()) {
            throw IoError(where + ": expected {id, topic, body} strings");
        }
        auto topic = parse_topic(j["topic"].get<std::string>());
        if (!topic) throw IoError(where + ": unknown topic " + j["topic"].get<std::string>());
        catalog.add(Message{j["id"].get<std::string>(), *topic, j["body"].get<std::string>()});
    }
    return catalog;
}

void write_catalog(const std::string& path, const MessageCatalog& catalog) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write message catalog: " + path);
    for (Topic t : kAllTopics) {
        for (const Message& m : catalog.pool(t)) {
            Json j{{"id", m.id}, {"topic", topic_name(m.topic)}, {"body", m.body}};
            out << j.dump() << '\n';
        }
    }
    out.flush();
    if (!out) throw IoError("failed writing message catalog: " + path);
}

MessageCatalog generate_catalog(std::size_t per_topic) {
    static constexpr std::array<const char*, kTopicCount> kStems = {
        "Every smoke-free day strengthens you. Motivation note",
        "Small plate swaps add up. Diet tip",
        "A brisk walk beats a craving. Exercise idea",
        "Activity check-in",
        "Quitting reverses real damage. Health fact",
    };
    MessageCatalog catalog;
    for (Topic t : kAllTopics) {
        const auto ti = topic_index(t);
        for (std::size_t i = 0; i < per_topic; ++i) {
            Message m;
            m.id = std::string(topic_name(t)) + "-" + std::to_string(i + 1);
            m.topic = t;
            if (t == Topic::kPpal) {
                // Every third ppal message works without activity data so
                // the fallback path always has a candidate.
                if (i % 3 == 2) {
                    m.body = std::string(kStems[ti]) + " #" + std::to_string(i + 1) +
                             ": keep moving today, every active minute counts.";
                } else {
                    m.body = "Hello {name}! " + std::string(kStems[ti]) + " #" +
                             std::to_string(i + 1) +
                             ": you were {delta_minutes} min over your average activity time.";
                }
            } else {
                m.body = std::string(kStems[ti]) + " #" + std::to_string(i + 1) + ".";
            }
            catalog.add(std::move(m));
        }
    }
    return catalog;
}

}  // namespace tailor
