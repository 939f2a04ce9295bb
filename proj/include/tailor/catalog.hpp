#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "tailor/topic.hpp"
#include "tailor/types.hpp"

namespace tailor {

// The message catalog: one pool of messages per topic, loaded from a
// JSONL file of {id, topic, body}. Pool order follows file order, which
// keeps every downstream draw deterministic.
class MessageCatalog {
public:
    MessageCatalog() = default;

    // Throws DomainError on duplicate ids or placeholder misuse
    // (only ppal bodies may carry {name} / {delta_minutes}).
    void add(Message msg);

    const Message* find(const std::string& id) const;
    const std::vector<Message>& pool(Topic t) const { return pools_[topic_index(t)]; }
    std::size_t size() const { return total_; }
    bool any_pool_empty() const;

private:
    PerTopic<std::vector<Message>> pools_;
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> index_;  // id -> (pool, pos)
    std::size_t total_ = 0;
};

MessageCatalog load_catalog(const std::string& path);
void write_catalog(const std::string& path, const MessageCatalog& catalog);

// Deterministic fixture catalog: `per_topic` messages per pool. The ppal
// pool mixes templated bodies with plain ones so activity-free users
// still have something to receive.
MessageCatalog generate_catalog(std::size_t per_topic);

}  // namespace tailor
