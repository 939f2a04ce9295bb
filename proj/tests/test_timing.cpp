#include <doctest.h>

#include <cmath>

#include "tailor/errors.hpp"
#include "tailor/timing.hpp"
#include "testutil.hpp"

using namespace tailor;
using test::kEpoch;

namespace {

DeliveryRecord delivery_at(int minute, Date day, std::optional<int> read_after_minutes) {
    DeliveryRecord d;
    d.user_id = "u";
    d.message_id = "m";
    d.plan_date = day;
    d.sent_at = midnight(day) + static_cast<std::int64_t>(minute) * 60;
    d.slot_index = 0;
    if (read_after_minutes) {
        d.read_at = d.sent_at + static_cast<std::int64_t>(*read_after_minutes) * 60;
    }
    return d;
}

}  // namespace

TEST_SUITE_BEGIN("timing");

TEST_CASE("windows partition into up to six equal slots") {
    const SlotModel six = slot_partition(TimeWindow{480, 1200});
    REQUIRE(six.slot_count() == 6);
    for (int s = 0; s < 6; ++s) {
        const auto [begin, end] = six.interval(s);
        CHECK(end - begin == 120);
    }
    CHECK(six.interval(0).begin == 480);
    CHECK(six.interval(5).end == 1200);

    const SlotModel minute = slot_partition(TimeWindow{600, 601});
    REQUIRE(minute.slot_count() == 1);
    CHECK(minute.interval(0).begin == 600);
    CHECK(minute.interval(0).end == 601);

    const SlotModel day = slot_partition(TimeWindow{0, kMinutesPerDay});
    REQUIRE(day.slot_count() == 6);
    for (int s = 0; s < 6; ++s) {
        CHECK(day.interval(s).end - day.interval(s).begin == 240);
    }

    // Short windows get one slot per minute.
    const SlotModel three = slot_partition(TimeWindow{100, 103});
    CHECK(three.slot_count() == 3);
}

TEST_CASE("partition soundness over random windows (property)") {
    Rng rng(2468);
    for (int round = 0; round < 2000; ++round) {
        const int start = static_cast<int>(uniform_below(rng, kMinutesPerDay - 1));
        const int duration =
            1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(kMinutesPerDay - start)));
        const TimeWindow window{start, start + duration};
        const SlotModel model = slot_partition(window);
        CHECK(model.slot_count() == std::min(6, duration));
        int covered = 0;
        int previous_end = window.start_minute;
        int longest = 0, shortest = kMinutesPerDay + 1;
        for (int s = 0; s < model.slot_count(); ++s) {
            const auto [begin, end] = model.interval(s);
            CHECK(begin == previous_end);  // contiguous, no overlap
            CHECK(end > begin);
            covered += end - begin;
            longest = std::max(longest, end - begin);
            shortest = std::min(shortest, end - begin);
            previous_end = end;
        }
        CHECK(previous_end == window.end_minute);
        CHECK(covered == duration);
        CHECK(longest - shortest <= 1);  // equal length up to the remainder
        // Every minute maps into exactly the slot that owns it.
        const int probe = start + static_cast<int>(uniform_below(rng, duration));
        const auto slot = model.slot_for_minute(probe);
        REQUIRE(slot.has_value());
        CHECK(model.interval(*slot).begin <= probe);
        CHECK(probe < model.interval(*slot).end);
        CHECK(!model.slot_for_minute(window.end_minute).has_value());
    }
}

TEST_CASE("read latency maps to exponentially decaying utility") {
    const Date day = kEpoch;
    const Timestamp day_end = midnight(day + 1);
    const DeliveryRecord instant = delivery_at(600, day, 0);
    CHECK(latency_to_utility(instant.sent_at, instant.read_at, day_end, 60.0) == 1.0);

    const DeliveryRecord hour = delivery_at(600, day, 60);
    CHECK(latency_to_utility(hour.sent_at, hour.read_at, day_end, 60.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    const DeliveryRecord unread = delivery_at(600, day, std::nullopt);
    CHECK(latency_to_utility(unread.sent_at, unread.read_at, day_end, 60.0) == 0.0);

    // Read only after the plan day ended: scores nothing.
    const DeliveryRecord late = delivery_at(1400, day, 100);
    CHECK(*late.read_at >= day_end);
    CHECK(latency_to_utility(late.sent_at, late.read_at, day_end, 60.0) == 0.0);

    // Strictly decreasing in the latency.
    double previous = 2.0;
    for (int minutes = 0; minutes <= 600; minutes += 5) {
        const DeliveryRecord d = delivery_at(0, day, minutes);
        const double utility = latency_to_utility(d.sent_at, d.read_at, day_end, 60.0);
        CHECK(utility < previous);
        CHECK(utility >= 0.0);
        CHECK(utility <= 1.0);
        previous = utility;
    }
}

TEST_CASE("slot scores are the prior plus per-slot utilities") {
    const TimingConfig config;
    const SlotModel model = slot_partition(TimeWindow{480, 1200});

    const std::vector<DeliveryRecord> empty;
    for (double score : slot_scores(empty, model, config)) {
        CHECK(score == doctest::Approx(0.1).epsilon(1e-12));
    }

    // One delivery in slot 2 (720..840), read instantly.
    std::vector<DeliveryRecord> one = {delivery_at(750, kEpoch, 0)};
    const auto scores = slot_scores(one, model, config);
    CHECK(scores[2] == doctest::Approx(1.1).epsilon(1e-12));
    for (int s : {0, 1, 3, 4, 5}) CHECK(scores[s] == doctest::Approx(0.1).epsilon(1e-12));

    // Unread deliveries add nothing.
    std::vector<DeliveryRecord> unread = {delivery_at(500, kEpoch, std::nullopt),
                                          delivery_at(500, kEpoch - 1, std::nullopt)};
    for (double score : slot_scores(unread, model, config)) {
        CHECK(score == doctest::Approx(0.1).epsilon(1e-12));
    }

    // History outside the current window is dropped.
    std::vector<DeliveryRecord> outside = {delivery_at(300, kEpoch, 0)};
    for (double score : slot_scores(outside, model, config)) {
        CHECK(score == doctest::Approx(0.1).epsilon(1e-12));
    }
}

TEST_CASE("a slot read instantly twice strictly dominates the rest") {
    const TimingConfig config;
    const SlotModel model = slot_partition(TimeWindow{480, 1200});
    std::vector<DeliveryRecord> history = {delivery_at(900, kEpoch - 2, 0),
                                           delivery_at(910, kEpoch - 1, 0),
                                           delivery_at(500, kEpoch - 1, std::nullopt),
                                           delivery_at(1100, kEpoch - 2, std::nullopt)};
    const auto scores = slot_scores(history, model, config);
    const auto slot = model.slot_for_minute(900);
    REQUIRE(slot.has_value());
    for (int s = 0; s < model.slot_count(); ++s) {
        if (s == *slot) continue;
        CHECK(scores[static_cast<std::size_t>(*slot)] > scores[static_cast<std::size_t>(s)]);
    }
}

TEST_CASE("chosen send minutes stay inside the slot and replay with the seed") {
    Rng rng(10101);
    const SlotInterval one_minute{777, 778};
    for (int i = 0; i < 50; ++i) CHECK(choose_send_minute(one_minute, rng) == 777);

    const SlotInterval slot{480, 600};
    std::array<int, 120> histogram = {};
    for (int i = 0; i < 10000; ++i) {
        const int minute = choose_send_minute(slot, rng);
        CHECK(minute >= 480);
        CHECK(minute < 600);
        ++histogram[static_cast<std::size_t>(minute - 480)];
    }
    // Roughly uniform: every minute hit, none wildly over-represented.
    for (int count : histogram) {
        CHECK(count > 83 / 3);
        CHECK(count < 83 * 3);
    }

    Rng replay_a(555), replay_b(555);
    for (int i = 0; i < 100; ++i) {
        CHECK(choose_send_minute(slot, replay_a) == choose_send_minute(slot, replay_b));
    }

    CHECK_THROWS_AS(choose_send_minute(SlotInterval{5, 5}, rng), DomainError);
}

TEST_SUITE_END();
