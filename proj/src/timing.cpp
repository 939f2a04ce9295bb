#include "tailor/timing.hpp"

#include <algorithm>
#include <cmath>

#include "tailor/errors.hpp"

namespace tailor {

std::optional<int> SlotModel::slot_for_minute(int minute) const {
    if (!window_.contains(minute)) return std::nullopt;
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), minute);
    return static_cast<int>(it - boundaries_.begin()) - 1;
}

SlotModel slot_partition(const TimeWindow& window, int max_slots) {
    if (!valid_window(window)) throw DomainError("slot_partition: invalid window");
    if (max_slots < 1) throw DomainError("slot_partition: max_slots must be >= 1");
    const int duration = window.duration_minutes();
    const int count = std::min(max_slots, duration);
    const int base = duration / count;
    const int remainder = duration % count;
    std::vector<int> boundaries;
    boundaries.reserve(static_cast<std::size_t>(count) + 1);
    int edge = window.start_minute;
    boundaries.push_back(edge);
    for (int i = 0; i < count; ++i) {
        edge += base + (i < remainder ? 1 : 0);
        boundaries.push_back(edge);
    }
    return SlotModel(window, std::move(boundaries));
}

double latency_to_utility(Timestamp sent_at, std::optional<Timestamp> read_at,
                          Timestamp plan_day_end, double tau_minutes) {
    if (!read_at || *read_at >= plan_day_end) return 0.0;
    const double latency_minutes = static_cast<double>(*read_at - sent_at) / 60.0;
    return std::exp(-latency_minutes / tau_minutes);
}

double delivery_utility(const DeliveryRecord& delivery, const TimingConfig& config) {
    return latency_to_utility(delivery.sent_at, delivery.read_at,
                              midnight(delivery.plan_date + 1), config.tau_minutes);
}

std::vector<double> slot_scores(std::span<const DeliveryRecord> history, const SlotModel& model,
                                const TimingConfig& config) {
    std::vector<double> scores(static_cast<std::size_t>(model.slot_count()), config.slot_prior);
    for (const DeliveryRecord& delivery : history) {
        const auto slot = model.slot_for_minute(minute_of_day(delivery.sent_at));
        if (!slot) continue;
        scores[static_cast<std::size_t>(*slot)] += delivery_utility(delivery, config);
    }
    return scores;
}

int choose_send_minute(SlotInterval slot, Rng& rng) {
    if (slot.end <= slot.begin) throw DomainError("choose_send_minute: empty slot");
    return slot.begin +
           static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(slot.end - slot.begin)));
}

}  // namespace tailor
