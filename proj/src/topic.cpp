#include "tailor/topic.hpp"

namespace tailor {

namespace {
constexpr std::array<std::string_view, kTopicCount> kTopicNames = {
    "general_motivation", "diet_tips", "exercise_active_life", "ppal", "smoking_consequences",
};
}

std::string_view topic_name(Topic t) {
    return kTopicNames[topic_index(t)];
}

std::optional<Topic> parse_topic(std::string_view name) {
    for (std::size_t i = 0; i < kTopicCount; ++i) {
        if (kTopicNames[i] == name) return static_cast<Topic>(i);
    }
    return std::nullopt;
}

}  // namespace tailor
