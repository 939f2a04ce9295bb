#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "tailor/config.hpp"
#include "tailor/errors.hpp"

using namespace tailor;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults apply without a config file") {
    const EngineConfig cfg = load_engine_config(std::nullopt);
    CHECK(cfg.messages_per_day == 1);
    CHECK(cfg.cohort_cap == 120);
    CHECK(cfg.dwell_threshold_seconds == 4.0);
    CHECK(cfg.ppal_window_days == 7);
    CHECK(cfg.timing.tau_minutes == 60.0);
    CHECK(cfg.timing.slot_prior == 0.1);
    CHECK(cfg.timing.max_slots == 6);
}

TEST_CASE("config files set keys and reject unknown or bad values") {
    const std::string path = "test_engine.conf";
    {
        std::ofstream out(path);
        out << "# engine tuning\n";
        out << "timing.tau_minutes = 45\n";
        out << "timing.slot_prior = 0.25   # larger exploration floor\n";
        out << "timing.max_slots = 4\n";
        out << "plan.messages_per_day = 2\n";
        out << "plan.cohort_cap = 60\n";
        out << "snapshot.dwell_seconds = 6\n";
        out << "ppal.window_days = 14\n";
    }
    const EngineConfig cfg = load_engine_config(path);
    CHECK(cfg.timing.tau_minutes == 45.0);
    CHECK(cfg.timing.slot_prior == 0.25);
    CHECK(cfg.timing.max_slots == 4);
    CHECK(cfg.messages_per_day == 2);
    CHECK(cfg.cohort_cap == 60);
    CHECK(cfg.dwell_threshold_seconds == 6.0);
    CHECK(cfg.ppal_window_days == 14);
    std::remove(path.c_str());

    {
        std::ofstream out(path);
        out << "plan.unknown_key = 1\n";
    }
    CHECK_THROWS_AS(load_engine_config(path), ConfigError);
    {
        std::ofstream out(path);
        out << "timing.tau_minutes = banana\n";
    }
    CHECK_THROWS_AS(load_engine_config(path), ConfigError);
    {
        std::ofstream out(path);
        out << "plan.messages_per_day = 0\n";
    }
    CHECK_THROWS_AS(load_engine_config(path), ConfigError);
    {
        std::ofstream out(path);
        out << "no equals sign here\n";
    }
    CHECK_THROWS_AS(load_engine_config(path), ConfigError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_engine_config(std::string("missing.conf")), ConfigError);
}

TEST_CASE("environment variables override file values") {
    const std::string path = "test_engine_env.conf";
    {
        std::ofstream out(path);
        out << "timing.tau_minutes = 45\n";
    }
    ::setenv("TAILOR_TIMING_TAU_MINUTES", "90", 1);
    ::setenv("TAILOR_PLAN_COHORT_CAP", "30", 1);
    const EngineConfig cfg = load_engine_config(path);
    ::unsetenv("TAILOR_TIMING_TAU_MINUTES");
    ::unsetenv("TAILOR_PLAN_COHORT_CAP");
    CHECK(cfg.timing.tau_minutes == 90.0);
    CHECK(cfg.cohort_cap == 30);
    std::remove(path.c_str());

    ::setenv("TAILOR_TIMING_MAX_SLOTS", "junk", 1);
    CHECK_THROWS_AS(load_engine_config(std::nullopt), ConfigError);
    ::unsetenv("TAILOR_TIMING_MAX_SLOTS");
}

TEST_SUITE_END();
