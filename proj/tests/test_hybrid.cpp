#include <doctest.h>

#include <cmath>
#include <set>

#include "tailor/errors.hpp"
#include "tailor/hybrid.hpp"
#include "tailor/snapshot.hpp"
#include "testutil.hpp"

using namespace tailor;
using test::kEpoch;
using test::LogBuilder;
using test::make_profile;

namespace {

SnapshotConfig snap_config(const MessageCatalog& catalog) {
    SnapshotConfig cfg;
    cfg.catalog = &catalog;
    return cfg;
}

// A pair of profiles at maximum distance on all six attributes.
UserProfile extreme_low_profile(const std::string& id) {
    UserProfile p = make_profile(id);
    p.age = 18;
    p.fagerstrom = 0;
    p.richmond = 0;
    return p;
}

UserProfile opposite_profile(const std::string& id) {
    UserProfile p = make_profile(id);
    p.gender = "male";
    p.employment_status = "unemployed";
    p.age = 100;
    p.quit_date = kEpoch - 400;  // >= 365 days from make_profile's default
    p.fagerstrom = 10;
    p.richmond = 10;
    return p;
}

}  // namespace

TEST_SUITE_BEGIN("hybrid");

TEST_CASE("blend weights follow the damping curve") {
    CHECK(beta_demographic(0) == 0.0);
    CHECK(beta_utility(0) == 0.0);
    CHECK(beta_demographic(5) == doctest::Approx(1.0 - 50.0 / 75.0).epsilon(1e-12));
    CHECK(beta_utility(10) == doctest::Approx(1.0 - 50.0 / 150.0).epsilon(1e-12));
    // Above 22 the weight crosses 0.9.
    CHECK(beta_demographic(22) > 0.9);
    CHECK(beta_demographic(22) < 1.0);
    CHECK(beta_demographic(22) == doctest::Approx(0.9064).epsilon(1e-4));
    CHECK(beta_utility(22) == doctest::Approx(0.9064).epsilon(1e-4));

    CHECK(beta_content(0.0, 0.0) == 1.0);
    CHECK(beta_content(beta_demographic(22), beta_utility(22)) ==
          doctest::Approx(0.0936).epsilon(1e-3));
    CHECK(beta_content(1.0 / 3.0, 0.0) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("blend weights are strictly increasing and bounded (property)") {
    for (int n = 0; n < 1000; ++n) {
        CHECK(beta_demographic(n + 1) > beta_demographic(n));
        CHECK(beta_utility(n + 1) > beta_utility(n));
        CHECK(beta_demographic(n) < 1.0);
        CHECK(beta_demographic(n) >= 0.0);
    }
    Rng rng(77);
    for (int i = 0; i < 2000; ++i) {
        const int n = static_cast<int>(uniform_below(rng, 2000));
        const int r = static_cast<int>(uniform_below(rng, 2000));
        const double bd = beta_demographic(n);
        const double bu = beta_utility(r);
        CHECK(beta_content(bd, bu) == 1.0 - (bd + bu) / 2.0);
    }
}

TEST_CASE("rating similarity is a guarded Pearson correlation") {
    const std::map<std::string, double> a = {{"m1", 1.0}, {"m2", 0.0}, {"m3", 0.5}};
    const std::map<std::string, double> b = a;
    CHECK(pearson_rating_similarity(a, b) == doctest::Approx(1.0).epsilon(1e-12));

    const std::map<std::string, double> anti = {{"m1", 0.0}, {"m2", 1.0}, {"m3", 0.5}};
    CHECK(pearson_rating_similarity(a, anti) == doctest::Approx(-1.0).epsilon(1e-12));

    const std::map<std::string, double> disjoint = {{"x1", 1.0}, {"x2", 0.0}};
    CHECK(pearson_rating_similarity(a, disjoint) == 0.0);

    const std::map<std::string, double> single = {{"m1", 1.0}};
    CHECK(pearson_rating_similarity(a, single) == 0.0);  // one co-rated message

    const std::map<std::string, double> constant = {{"m1", 1.0}, {"m2", 1.0}, {"m3", 1.0}};
    CHECK(pearson_rating_similarity(a, constant) == 0.0);  // zero variance side
}

TEST_CASE("attribute similarity averages six per-attribute scores") {
    const UserProfile a = make_profile("a");
    CHECK(attribute_similarity(a, a) == 1.0);

    UserProfile b = make_profile("b");
    b.gender = "male";
    CHECK(attribute_similarity(a, b) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

    UserProfile c = make_profile("c");
    c.age = 18;
    UserProfile d = make_profile("d");
    d.age = 100;
    CHECK(attribute_similarity(c, d) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

    // Quit dates further than a year apart saturate at distance 1.
    UserProfile e = make_profile("e");
    e.quit_date = kEpoch - 1000;
    UserProfile f = make_profile("f");
    f.quit_date = kEpoch;
    const double sim = attribute_similarity(e, f);
    CHECK(sim == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("user similarity averages remapped Pearson with attribute similarity") {
    const MessageCatalog catalog = generate_catalog(5);

    // Identical profiles, identical non-constant ratings.
    LogBuilder b1;
    b1.profile(make_profile("a"));
    b1.profile(make_profile("b"));
    for (const char* user : {"a", "b"}) {
        b1.add(user, VoteEvent{"diet_tips-1", VoteValue::kLike});
        b1.add(user, VoteEvent{"diet_tips-2", VoteValue::kDislike});
    }
    const auto snap1 = build_snapshot(b1.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(user_similarity(*snap1.find_profile("a"), *snap1.find_profile("b"), snap1) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // Symmetry.
    CHECK(user_similarity(*snap1.find_profile("a"), *snap1.find_profile("b"), snap1) ==
          user_similarity(*snap1.find_profile("b"), *snap1.find_profile("a"), snap1));

    // Identical profiles, disjoint ratings: degenerate Pearson maps to 0.5.
    LogBuilder b2;
    b2.profile(make_profile("a"));
    b2.profile(make_profile("b"));
    b2.add("a", VoteEvent{"diet_tips-1", VoteValue::kLike});
    b2.add("b", VoteEvent{"ppal-1", VoteValue::kLike});
    const auto snap2 = build_snapshot(b2.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(user_similarity(*snap2.find_profile("a"), *snap2.find_profile("b"), snap2) ==
          doctest::Approx(0.75).epsilon(1e-12));

    // Fully dissimilar profiles with perfectly anticorrelated ratings.
    LogBuilder b3;
    b3.profile(extreme_low_profile("a"));
    b3.profile(opposite_profile("b"));
    b3.add("a", VoteEvent{"diet_tips-1", VoteValue::kLike});
    b3.add("a", VoteEvent{"diet_tips-2", VoteValue::kDislike});
    b3.add("b", VoteEvent{"diet_tips-1", VoteValue::kDislike});
    b3.add("b", VoteEvent{"diet_tips-2", VoteValue::kLike});
    const auto snap3 = build_snapshot(b3.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(user_similarity(*snap3.find_profile("a"), *snap3.find_profile("b"), snap3) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("demographic scores fall back to 0.5 without informative neighbors") {
    const MessageCatalog catalog = generate_catalog(5);
    LogBuilder b;
    b.profile(make_profile("only"));
    const auto snap = build_snapshot(b.log(), kEpoch, snap_config(catalog)).snapshot;
    for (double score : demographic_scores("only", snap)) CHECK(score == 0.5);
}

TEST_CASE("a single informative neighbor drives its topic's demographic score") {
    const MessageCatalog catalog = generate_catalog(5);
    LogBuilder b;
    b.profile(make_profile("u"));
    b.profile(make_profile("v"));
    b.add("v", VoteEvent{"diet_tips-1", VoteValue::kLike});
    b.add("v", VoteEvent{"diet_tips-2", VoteValue::kLike});
    const auto snap = build_snapshot(b.log(), kEpoch, snap_config(catalog)).snapshot;
    const auto scores = demographic_scores("u", snap);
    CHECK(scores[topic_index(Topic::kDietTips)] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scores[topic_index(Topic::kPpal)] == 0.5);  // nobody informs the other topics
}

TEST_CASE("zero-similarity neighbors fold the demographic score to 0.5") {
    const MessageCatalog catalog = generate_catalog(5);
    LogBuilder b;
    b.profile(extreme_low_profile("u"));
    b.profile(opposite_profile("v"));
    b.add("u", VoteEvent{"diet_tips-1", VoteValue::kLike});
    b.add("u", VoteEvent{"diet_tips-2", VoteValue::kDislike});
    b.add("v", VoteEvent{"diet_tips-1", VoteValue::kDislike});
    b.add("v", VoteEvent{"diet_tips-2", VoteValue::kLike});
    const auto snap = build_snapshot(b.log(), kEpoch, snap_config(catalog)).snapshot;
    const auto scores = demographic_scores("u", snap);
    for (double score : scores) CHECK(score == 0.5);
}

TEST_CASE("explicit topic rate is the mean of latest vote scores") {
    const MessageCatalog catalog = generate_catalog(5);
    LogBuilder b;
    b.profile(make_profile("u"));
    b.add("u", VoteEvent{"diet_tips-1", VoteValue::kLike});
    b.add("u", VoteEvent{"diet_tips-2", VoteValue::kLike});
    b.add("u", VoteEvent{"ppal-1", VoteValue::kLike});
    b.add("u", VoteEvent{"ppal-2", VoteValue::kDislike});
    const auto snap = build_snapshot(b.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(*explicit_topic_rate("u", Topic::kDietTips, snap) == 1.0);
    CHECK(*explicit_topic_rate("u", Topic::kPpal, snap) == 0.5);
    CHECK(!explicit_topic_rate("u", Topic::kSmokingConsequences, snap).has_value());
}

TEST_CASE("implicit topic rate averages access and read shares") {
    const MessageCatalog catalog = generate_catalog(20);
    LogBuilder b;
    b.profile(make_profile("u"));
    // 3 diet accesses of 10 total (all dwell-qualified).
    for (int i = 0; i < 3; ++i) b.add("u", SectionAccessEvent{Topic::kDietTips, 10.0});
    for (int i = 0; i < 7; ++i) b.add("u", SectionAccessEvent{Topic::kPpal, 10.0});
    // 5 diet reads of 20 total.
    for (int i = 0; i < 5; ++i) {
        b.add("u", MessageReadEvent{"diet_tips-" + std::to_string(i + 1)});
    }
    for (int i = 0; i < 15; ++i) {
        b.add("u", MessageReadEvent{"general_motivation-" + std::to_string(i + 1)});
    }
    const auto snap = build_snapshot(b.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(implicit_topic_rate("u", Topic::kDietTips, snap) ==
          doctest::Approx(0.275).epsilon(1e-12));

    // No interactions at all: both quotients fold to the uniform 1/5.
    LogBuilder b2;
    b2.profile(make_profile("v"));
    const auto snap2 = build_snapshot(b2.log(), kEpoch, snap_config(catalog)).snapshot;
    for (Topic t : kAllTopics) {
        CHECK(implicit_topic_rate("v", t, snap2) == doctest::Approx(0.2).epsilon(1e-12));
    }

    // Everything on one topic.
    LogBuilder b3;
    b3.profile(make_profile("w"));
    b3.add("w", SectionAccessEvent{Topic::kDietTips, 5.0});
    b3.add("w", MessageReadEvent{"diet_tips-1"});
    const auto snap3 = build_snapshot(b3.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(implicit_topic_rate("w", Topic::kDietTips, snap3) == 1.0);
}

TEST_CASE("utility scores blend explicit and implicit by vote count") {
    const MessageCatalog catalog = generate_catalog(20);
    // i_diet = (1/2 + 3/10) / 2 = 0.4 via 1 of 2 accesses and 3 of 10 reads.
    auto seed_implicit = [](LogBuilder& b, const char* user) {
        b.add(user, SectionAccessEvent{Topic::kDietTips, 9.0});
        b.add(user, SectionAccessEvent{Topic::kGeneralMotivation, 9.0});
        for (int i = 0; i < 3; ++i) {
            b.add(user, MessageReadEvent{"diet_tips-" + std::to_string(i + 1)});
        }
        for (int i = 0; i < 7; ++i) {
            b.add(user, MessageReadEvent{"ppal-" + std::to_string(i + 1)});
        }
    };

    // v = 1: the blend collapses to the implicit rate.
    LogBuilder b1;
    b1.profile(make_profile("u"));
    seed_implicit(b1, "u");
    b1.add("u", VoteEvent{"diet_tips-1", VoteValue::kLike});
    const auto snap1 = build_snapshot(b1.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(snap1.stats_for("u").n_ratings == 1);
    CHECK(utility_scores("u", snap1)[topic_index(Topic::kDietTips)] ==
          doctest::Approx(0.4).epsilon(1e-12));

    // v = 2 with e = 1.0, i = 0.4 gives 0.7.
    LogBuilder b2;
    b2.profile(make_profile("u"));
    seed_implicit(b2, "u");
    b2.add("u", VoteEvent{"diet_tips-1", VoteValue::kLike});
    b2.add("u", VoteEvent{"diet_tips-2", VoteValue::kLike});
    const auto snap2 = build_snapshot(b2.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(utility_scores("u", snap2)[topic_index(Topic::kDietTips)] ==
          doctest::Approx(0.7).epsilon(1e-12));

    // Large v approaches the explicit rate.
    LogBuilder b3;
    b3.profile(make_profile("u"));
    seed_implicit(b3, "u");
    for (int i = 0; i < 18; ++i) {
        const VoteValue value = (i % 5 == 0) ? VoteValue::kNeutral : VoteValue::kLike;
        b3.add("u", VoteEvent{"diet_tips-" + std::to_string(i + 1), value});
    }
    const auto snap3 = build_snapshot(b3.log(), kEpoch, snap_config(catalog)).snapshot;
    const double e = *snap3.stats_for("u").explicit_rate[topic_index(Topic::kDietTips)];
    CHECK(utility_scores("u", snap3)[topic_index(Topic::kDietTips)] ==
          doctest::Approx(e).epsilon(0.05));

    // v = 0: pure implicit.
    LogBuilder b4;
    b4.profile(make_profile("u"));
    seed_implicit(b4, "u");
    const auto snap4 = build_snapshot(b4.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(utility_scores("u", snap4)[topic_index(Topic::kDietTips)] ==
          doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("content scores are interest cosines against topic axes") {
    UserProfile aligned = make_profile("u");
    aligned.interests = {2, 0, 0, 0, 0};
    const auto scores = content_scores(aligned);
    CHECK(scores[0] == 1.0);
    for (std::size_t t = 1; t < kTopicCount; ++t) CHECK(scores[t] == 0.0);

    UserProfile uniform = make_profile("u");
    uniform.interests = {2, 2, 2, 2, 2};
    for (double score : content_scores(uniform)) {
        CHECK(score == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
    }

    UserProfile empty = make_profile("u");
    empty.interests = {0, 0, 0, 0, 0};
    for (double score : content_scores(empty)) CHECK(score == 0.2);
}

TEST_CASE("cold-start hybrid scores equal the content scores exactly") {
    const MessageCatalog catalog = generate_catalog(5);
    LogBuilder b;
    UserProfile fresh = make_profile("u");
    fresh.interests = {2, 0, 0, 0, 0};
    b.profile(fresh);
    const auto snap = build_snapshot(b.log(), kEpoch, snap_config(catalog)).snapshot;
    CHECK(snap.stats_for("u").n_neighbors == 0);
    CHECK(snap.stats_for("u").n_ratings == 0);
    const auto hybrid = hybrid_scores("u", snap);
    const auto content = content_scores(fresh);
    for (std::size_t t = 0; t < kTopicCount; ++t) CHECK(hybrid[t] == content[t]);
    CHECK(hybrid[0] == 1.0);

    Rng rng(31337);
    for (int round = 0; round < 50; ++round) {
        UserProfile p = make_profile("r");
        for (auto& level : p.interests) level = static_cast<std::uint8_t>(uniform_below(rng, 3));
        LogBuilder lb;
        lb.profile(p);
        const auto s = build_snapshot(lb.log(), kEpoch, snap_config(catalog)).snapshot;
        const auto h = hybrid_scores("r", s);
        const auto c = content_scores(p);
        for (std::size_t t = 0; t < kTopicCount; ++t) CHECK(h[t] == c[t]);
    }
}

TEST_CASE("hybrid scores stay within the weight envelope (property)") {
    const MessageCatalog catalog = generate_catalog(10);
    Rng rng(4242);
    for (int round = 0; round < 15; ++round) {
        const auto log = test::random_cohort_log(rng, catalog, 20, 150);
        const auto snap = build_snapshot(log, kEpoch, snap_config(catalog)).snapshot;
        for (const UserProfile& user : snap.active_users) {
            const auto parts = component_scores(user.user_id, snap);
            for (std::size_t t = 0; t < kTopicCount; ++t) {
                CHECK(parts.demographic[t] >= 0.0);
                CHECK(parts.demographic[t] <= 1.0);
                CHECK(parts.utility[t] >= 0.0);
                CHECK(parts.utility[t] <= 1.0);
                CHECK(parts.content[t] >= 0.0);
                CHECK(parts.content[t] <= 1.0);
            }
            const auto weights = hybrid_weights(snap.stats_for(user.user_id));
            const double ceiling = weights.demographic + weights.utility + weights.content;
            for (double score : hybrid_scores(user.user_id, snap)) {
                CHECK(score >= 0.0);
                CHECK(score <= ceiling + 1e-12);
            }
        }
    }
}

TEST_CASE("positive scaling preserves the argmax topic") {
    const MessageCatalog catalog = generate_catalog(10);
    Rng rng(515151);
    const auto log = test::random_cohort_log(rng, catalog, 10, 100);
    const auto snap = build_snapshot(log, kEpoch, snap_config(catalog)).snapshot;
    for (const UserProfile& user : snap.active_users) {
        auto scores = hybrid_scores(user.user_id, snap);
        const auto argmax =
            std::max_element(scores.begin(), scores.end()) - scores.begin();
        for (double scale : {0.001, 3.0, 1000.0}) {
            auto scaled = scores;
            for (double& s : scaled) s *= scale;
            CHECK(std::max_element(scaled.begin(), scaled.end()) - scaled.begin() == argmax);
        }
    }
}

TEST_CASE("pick_message avoids repeats until the pool is exhausted") {
    MessageCatalog one;
    one.add({"general_motivation-1", Topic::kGeneralMotivation, "m1"});
    one.add({"diet_tips-1", Topic::kDietTips, "d1"});
    one.add({"exercise_active_life-1", Topic::kExerciseActiveLife, "e1"});
    one.add({"ppal-1", Topic::kPpal, "p1"});
    one.add({"smoking_consequences-1", Topic::kSmokingConsequences, "s1"});
    Rng rng(11);
    CHECK(pick_message(Topic::kDietTips, one, {}, rng).id == "diet_tips-1");

    MessageCatalog two = generate_catalog(2);
    std::map<std::string, int> delivered = {{"diet_tips-1", 1}};
    for (int i = 0; i < 20; ++i) {
        CHECK(pick_message(Topic::kDietTips, two, delivered, rng).id == "diet_tips-2");
    }

    // Fully exhausted pool: the window resets and any message may repeat.
    const MessageCatalog big = generate_catalog(150);
    std::map<std::string, int> all_once;
    for (const Message& m : big.pool(Topic::kDietTips)) all_once[m.id] = 1;
    std::set<std::string> seen;
    for (int i = 0; i < 3000; ++i) {
        seen.insert(pick_message(Topic::kDietTips, big, all_once, rng).id);
    }
    CHECK(seen.size() == 150);

    // Mid-cycle the freshly repeated message is excluded again.
    all_once["diet_tips-7"] = 2;
    for (int i = 0; i < 200; ++i) {
        CHECK(pick_message(Topic::kDietTips, big, all_once, rng).id != "diet_tips-7");
    }

    const MessageCatalog empty;
    CHECK_THROWS_AS(pick_message(Topic::kDietTips, empty, {}, rng), DomainError);
}

TEST_SUITE_END();
