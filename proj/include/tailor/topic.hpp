#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace tailor {

// The five message pools. Codes 0..4 index every per-topic vector in the
// engine, so the order here is load-bearing and must not change.
enum class Topic : int {
    kGeneralMotivation = 0,
    kDietTips = 1,
    kExerciseActiveLife = 2,
    kPpal = 3,
    kSmokingConsequences = 4,
};

inline constexpr std::size_t kTopicCount = 5;

inline constexpr std::array<Topic, kTopicCount> kAllTopics = {
    Topic::kGeneralMotivation, Topic::kDietTips, Topic::kExerciseActiveLife,
    Topic::kPpal,              Topic::kSmokingConsequences,
};

constexpr std::size_t topic_index(Topic t) { return static_cast<std::size_t>(t); }

std::string_view topic_name(Topic t);
std::optional<Topic> parse_topic(std::string_view name);

// Fixed-size per-topic vector.
template <typename T>
using PerTopic = std::array<T, kTopicCount>;

}  // namespace tailor
