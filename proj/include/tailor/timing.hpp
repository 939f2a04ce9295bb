#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tailor/rng.hpp"
#include "tailor/snapshot.hpp"
#include "tailor/time.hpp"
#include "tailor/types.hpp"

namespace tailor {

struct TimingConfig {
    double tau_minutes = 60.0;  // latency decay constant
    double slot_prior = 0.1;    // Laplace prior keeping every slot explorable
    int max_slots = 6;
};

// Half-open minute interval [begin, end).
struct SlotInterval {
    int begin = 0;
    int end = 0;
};

// Equal partition of a delivery window into min(max_slots, duration)
// contiguous slots; leftover minutes go one each to the earliest slots.
class SlotModel {
public:
    SlotModel(TimeWindow window, std::vector<int> boundaries)
        : window_(window), boundaries_(std::move(boundaries)) {}

    const TimeWindow& window() const { return window_; }
    int slot_count() const { return static_cast<int>(boundaries_.size()) - 1; }
    SlotInterval interval(int slot) const {
        return {boundaries_[static_cast<std::size_t>(slot)],
                boundaries_[static_cast<std::size_t>(slot) + 1]};
    }
    // Slot owning the given minute of day; nullopt outside the window.
    std::optional<int> slot_for_minute(int minute) const;

private:
    TimeWindow window_;
    std::vector<int> boundaries_;  // slot_count + 1 entries, first = start, last = end
};

SlotModel slot_partition(const TimeWindow& window, int max_slots = 6);

// exp(-latency/tau) for a message read before the end of its plan day;
// 0 for one never read (or read after the day ended). Strictly decreasing
// in the latency, 1 at an instant read.
double latency_to_utility(Timestamp sent_at, std::optional<Timestamp> read_at,
                          Timestamp plan_day_end, double tau_minutes);
double delivery_utility(const DeliveryRecord& delivery, const TimingConfig& config);

// Per-slot score: prior + sum of read-latency utilities of past deliveries
// landing in the slot. History entries outside the current window are
// dropped rather than remapped.
std::vector<double> slot_scores(std::span<const DeliveryRecord> history, const SlotModel& model,
                                const TimingConfig& config);

// Uniform minute within the chosen slot.
int choose_send_minute(SlotInterval slot, Rng& rng);

}  // namespace tailor
