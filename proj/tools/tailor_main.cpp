#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tailor/catalog.hpp"
#include "tailor/config.hpp"
#include "tailor/errors.hpp"
#include "tailor/events.hpp"
#include "tailor/pipeline.hpp"
#include "tailor/service.hpp"
#include "tailor/sim/scenario.hpp"
#include "tailor/sim/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDomain = 4;

tailor::IngestService* g_service = nullptr;

void handle_signal(int) {
    if (g_service != nullptr) g_service->stop();
}

tailor::Date parse_date_or_throw(const std::string& raw) {
    auto date = tailor::parse_date(raw);
    if (!date) throw tailor::ConfigError("not a valid YYYY-MM-DD date: " + raw);
    return *date;
}

int cmd_serve(const std::string& log_path, const std::string& catalog_path,
              const std::string& plans_dir, const std::string& listen,
              const std::optional<std::string>& config_path) {
    tailor::ServiceOptions options;
    options.log_path = log_path;
    options.plans_dir = plans_dir;
    options.engine = tailor::load_engine_config(config_path);
    tailor::MessageCatalog catalog = tailor::load_catalog(catalog_path);

    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) {
        throw tailor::ConfigError("listen address must be host:port, got " + listen);
    }
    const std::string host = listen.substr(0, colon);
    const int port = std::stoi(listen.substr(colon + 1));

    tailor::IngestService service(std::move(options), std::move(catalog));
    if (!service.bind(host, port)) {
        std::cerr << "failed to bind " << listen << "\n";
        return kExitIo;
    }
    g_service = &service;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cout << "listening on " << host << ":" << port << ", log at " << log_path << "\n";
    service.listen_after_bind();
    g_service = nullptr;
    std::cout << "shut down cleanly, " << service.event_count() << " events on record\n";
    return kExitOk;
}

int cmd_nightly(const std::string& log_path, const std::string& catalog_path,
                const std::string& plans_dir, const std::string& date_raw,
                std::uint64_t seed, bool force, const std::optional<std::string>& config_path) {
    const tailor::Date plan_date = parse_date_or_throw(date_raw);
    const tailor::EngineConfig config = tailor::load_engine_config(config_path);
    const tailor::MessageCatalog catalog = tailor::load_catalog(catalog_path);
    std::vector<tailor::EventRecord> log;
    if (std::filesystem::exists(log_path)) log = tailor::read_event_log(log_path);

    std::filesystem::create_directories(plans_dir);
    const std::string plan_path =
        plans_dir + "/plan-" + tailor::format_date(plan_date) + ".jsonl";
    if (!force && std::filesystem::exists(plan_path)) {
        throw tailor::DomainError("plan file already exists (use --force to replan): " +
                                  plan_path);
    }

    const tailor::NightlyPlan plan =
        tailor::run_nightly(log, catalog, plan_date, seed, config, force);
    tailor::write_plan(plan_path, plan);

    // Commit the deliveries unless a previous run already put this date's
    // sends into the log (a forced identical replan must not double-log).
    if (!tailor::log_has_deliveries_for(log, plan_date)) {
        const std::uint64_t next_seq = log.empty() ? 1 : log.back().seq + 1;
        tailor::append_event_lines(log_path, tailor::delivery_events(plan, next_seq));
    }

    std::map<std::string, int> per_user;
    for (const auto& entry : plan.entries) ++per_user[entry.user_id];
    std::cout << "plan " << tailor::format_date(plan_date) << ": " << plan.entries.size()
              << " deliveries across " << per_user.size() << " users -> " << plan_path << "\n";
    for (const auto& entry : plan.entries) {
        std::cout << "  " << entry.user_id << "  " << tailor::topic_name(entry.topic) << "  "
                  << entry.message_id << "  " << tailor::format_timestamp(entry.send_at)
                  << "  slot " << entry.slot_index << (entry.fallback ? "  [fallback]" : "")
                  << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override, std::optional<int> days_override) {
    tailor::sim::Scenario scenario = tailor::sim::load_scenario(scenario_path);
    if (seed_override) scenario.seed = *seed_override;
    if (days_override) scenario.days = *days_override;
    const tailor::sim::SimReport report = tailor::sim::simulate(scenario);
    tailor::sim::report_to_csv(report, out_path);

    int total_deliveries = 0, total_correct = 0, total_false = 0;
    for (const auto& day : report.daily) {
        total_deliveries += day.deliveries;
        total_correct += day.correct;
        total_false += day.false_positives;
    }
    std::printf("simulated %d days, %zu personas, seed %llu\n", report.days,
                report.users.size(), static_cast<unsigned long long>(report.seed));
    std::printf("%-12s %12s %12s %12s\n", "", "deliveries", "correct", "false_pos");
    std::printf("%-12s %12d %12d %12d\n", "total", total_deliveries, total_correct, total_false);
    if (!report.daily.empty()) {
        const auto& last = report.daily.back();
        std::printf("final-day rates: correct %.3f, false positive %.3f\n", last.correct_rate,
                    last.false_positive_rate);
    }
    std::printf("%-12s %14s %16s\n", "user", "deliveries", "convergence_day");
    for (const auto& [user_id, user] : report.users) {
        int delivered = 0;
        for (int c : user.delivered_totals) delivered += c;
        std::printf("%-12s %14d %16d\n", user_id.c_str(), delivered, user.convergence_day);
    }
    std::cout << "report written to " << out_path << "\n";
    return kExitOk;
}

int cmd_seed_catalog(const std::string& out_path, int per_topic) {
    const tailor::MessageCatalog catalog = tailor::generate_catalog(per_topic);
    tailor::write_catalog(out_path, catalog);
    std::cout << "wrote " << catalog.size() << " messages (" << per_topic
              << " per topic) to " << out_path << "\n";
    return kExitOk;
}

int cmd_report(const std::string& in_path) {
    if (in_path.ends_with(".jsonl")) {
        const tailor::NightlyPlan plan = tailor::read_plan(in_path);
        std::map<std::string, int> per_user;
        tailor::PerTopic<int> per_topic = {};
        for (const auto& entry : plan.entries) {
            ++per_user[entry.user_id];
            ++per_topic[tailor::topic_index(entry.topic)];
        }
        std::printf("plan %s: %zu entries, %zu users\n",
                    tailor::format_date(plan.plan_date).c_str(), plan.entries.size(),
                    per_user.size());
        for (tailor::Topic t : tailor::kAllTopics) {
            std::printf("%-22s %6d\n", std::string(tailor::topic_name(t)).c_str(),
                        per_topic[tailor::topic_index(t)]);
        }
        return kExitOk;
    }
    // CSV report: reprint the cohort metrics per day.
    std::ifstream in(in_path);
    if (!in) throw tailor::IoError("cannot open report: " + in_path);
    std::string line;
    std::getline(in, line);
    if (line != "day,metric,user,value") {
        throw tailor::IoError(in_path + ": not a simulation report (unexpected header)");
    }
    std::map<int, std::map<std::string, std::string>> cohort_rows;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const auto c3 = line.find(',', c2 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos || c3 == std::string::npos) {
            continue;
        }
        const std::string user = line.substr(c2 + 1, c3 - c2 - 1);
        if (!user.empty()) continue;
        cohort_rows[std::stoi(line.substr(0, c1))][line.substr(c1 + 1, c2 - c1 - 1)] =
            line.substr(c3 + 1);
    }
    std::printf("%6s %12s %14s %20s\n", "day", "deliveries", "correct_rate",
                "false_positive_rate");
    for (const auto& [day, metrics] : cohort_rows) {
        auto get = [&](const char* key) {
            auto it = metrics.find(key);
            return it == metrics.end() ? std::string("-") : it->second;
        };
        std::printf("%6d %12s %14s %20s\n", day, get("deliveries").c_str(),
                    get("correct_rate").c_str(), get("false_positive_rate").c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motivational-message tailoring engine: nightly topic and send-time "
                 "recommendations, event ingestion, and cohort simulation"};
    app.require_subcommand(1);
    // Global options (--log, --catalog, ...) may follow the subcommand.
    app.fallthrough();

    std::string log_path = "events.jsonl";
    std::string catalog_path = "catalog.jsonl";
    std::string plans_dir = "plans";
    std::optional<std::string> config_path;
    app.add_option("--log", log_path, "event log path (JSONL)")->envname("TAILOR_LOG");
    app.add_option("--catalog", catalog_path, "message catalog path (JSONL)")
        ->envname("TAILOR_CATALOG");
    app.add_option("--plans", plans_dir, "directory for nightly plan files")
        ->envname("TAILOR_PLANS");
    app.add_option("--config", config_path, "engine config file (key = value)")
        ->envname("TAILOR_CONFIG");

    auto* serve = app.add_subcommand("serve", "run the ingestion and plan-serving API");
    std::string listen = "127.0.0.1:8080";
    serve->add_option("--listen", listen, "host:port to bind")->envname("TAILOR_LISTEN");

    auto* nightly = app.add_subcommand("nightly", "compute a delivery plan for a date");
    std::string date_raw;
    std::uint64_t seed = 0;
    bool force = false;
    nightly->add_option("--date", date_raw, "plan date (YYYY-MM-DD)")->required();
    nightly->add_option("--seed", seed, "master seed")->envname("TAILOR_SEED");
    nightly->add_flag("--force", force, "replan a date that already has a plan");

    auto* simulate = app.add_subcommand("simulate", "run a synthetic cohort scenario");
    std::string scenario_path;
    std::string out_path = "report.csv";
    std::optional<std::uint64_t> seed_override;
    std::optional<int> days_override;
    simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--out", out_path, "CSV report output path");
    simulate->add_option("--seed", seed_override, "override the scenario seed");
    simulate->add_option("--days", days_override, "override the scenario day count");

    auto* seed_catalog = app.add_subcommand("seed-catalog", "write a fixture message catalog");
    std::string seed_out = "catalog.jsonl";
    int per_topic = 150;
    seed_catalog->add_option("--out", seed_out, "catalog output path");
    seed_catalog->add_option("--per-topic", per_topic, "messages per topic pool")
        ->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "summarize a plan (.jsonl) or report (.csv)");
    std::string report_in;
    report->add_option("--in", report_in, "file to summarize")->required();

    try {
        app.parse(argc, argv);
        if (serve->parsed()) {
            return cmd_serve(log_path, catalog_path, plans_dir, listen, config_path);
        }
        if (nightly->parsed()) {
            return cmd_nightly(log_path, catalog_path, plans_dir, date_raw, seed, force,
                               config_path);
        }
        if (simulate->parsed()) {
            return cmd_simulate(scenario_path, out_path, seed_override, days_override);
        }
        if (seed_catalog->parsed()) return cmd_seed_catalog(seed_out, per_topic);
        if (report->parsed()) return cmd_report(report_in);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const tailor::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const tailor::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const tailor::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitDomain;
    }
}
