// barterd: dataset generation, experiment runs, reports, ledger replay and
// formula spot-checks from the command line.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "barter/simulator.hpp"

namespace fs = std::filesystem;
using namespace barter;
using namespace barter::sim;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, sep)) {
        part = trim(part);
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty() || s.front() == '-') throw UsageError("not a seed: '" + s + "'");
    return v;
}

/// "1..30", "4", "1,2,9" or any comma-separated mix of those.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& part : split(text, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(parse_u64(part));
            continue;
        }
        const std::uint64_t lo = parse_u64(part.substr(0, dots));
        const std::uint64_t hi = parse_u64(part.substr(dots + 2));
        if (hi < lo) throw UsageError("empty seed range '" + part + "'");
        if (hi - lo >= 100000) throw UsageError("seed range '" + part + "' is too large");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
    if (seeds.empty()) throw UsageError("at least one seed is required");
    return seeds;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("BARTERD_SEED"); env != nullptr && *env != '\0') {
        return parse_u64(env);
    }
    return 1;
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path.string());
    out << text;
    if (!out) throw UsageError("failed writing " + path.string());
}

std::string fixed(double v, int digits = 2) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

/// A preset name, or an object of profile keys with an optional "base" preset.
Profile resolve_profile(const nlohmann::json& j) {
    if (j.is_string()) return profile_preset(j.get<std::string>());
    if (!j.is_object()) throw UsageError("profile must be a preset name or an object");
    Profile p;
    p.name = "custom";
    if (j.contains("base")) p = profile_preset(j.at("base").get<std::string>());
    from_json(j, p);
    p.validate();
    return p;
}

// ---------------------------------------------------------------- run

struct RunOptions {
    std::vector<Profile> profiles;
    std::optional<Dataset> dataset;
    std::vector<std::uint64_t> seeds;
    std::vector<Mechanism> mechanisms{Mechanism::CRBS, Mechanism::FCFS};
    fs::path out = "out";
    SimConfig sim;
    std::optional<int> free_riders;
    unsigned jobs = 1;
};

struct Job {
    std::string profile;
    std::uint64_t seed = 0;
    Dataset dataset;
    Mechanism mechanism = Mechanism::CRBS;
    RunResult result;
    std::string error;
};

std::string stem(const Job& j) {
    return j.profile + "-s" + std::to_string(j.seed) + "-" + std::string(to_string(j.mechanism));
}

struct ProfileSummary {
    std::string name;
    double providers = 0, requestors = 0, available = 0;
    std::map<Mechanism, double> consumed, utilization, satisfaction;
    int runs = 0;
};

std::string table_summary(const std::vector<ProfileSummary>& rows, std::size_t seeds) {
    std::ostringstream os;
    const int label = 52;
    os << "Mean over " << seeds << " seed(s)\n\n";
    os << std::left << std::setw(label) << "Statistic";
    for (const auto& r : rows) os << std::right << std::setw(12) << r.name;
    os << '\n';
    auto line = [&](const std::string& name, auto value) {
        os << std::left << std::setw(label) << name;
        for (const auto& r : rows) os << std::right << std::setw(12) << value(r);
        os << '\n';
    };
    auto has = [](const ProfileSummary& r, Mechanism m) { return r.satisfaction.contains(m); };
    auto rate = [&](Mechanism m, const std::map<Mechanism, double> ProfileSummary::*field) {
        return [=](const ProfileSummary& r) {
            return has(r, m) ? fixed(100.0 * (r.*field).at(m), 1) + "%" : std::string("-");
        };
    };
    auto count = [&](Mechanism m) {
        return [=](const ProfileSummary& r) { return has(r, m) ? fixed(r.consumed.at(m), 1) : std::string("-"); };
    };
    line("Number of providers", [](const ProfileSummary& r) { return fixed(r.providers, 0); });
    line("Number of requestors", [](const ProfileSummary& r) { return fixed(r.requestors, 0); });
    line("Number of available resources", [](const ProfileSummary& r) { return fixed(r.available, 1); });
    line("Number of consumed resources in CRBS", count(Mechanism::CRBS));
    line("Number of consumed resources in FCFS", count(Mechanism::FCFS));
    line("Resource utilization rate of CRBS", rate(Mechanism::CRBS, &ProfileSummary::utilization));
    line("Resource utilization rate of FCFS", rate(Mechanism::FCFS, &ProfileSummary::utilization));
    line("Request satisfaction rate of CRBS", rate(Mechanism::CRBS, &ProfileSummary::satisfaction));
    line("Request satisfaction rate of FCFS", rate(Mechanism::FCFS, &ProfileSummary::satisfaction));

    bool both = !rows.empty();
    for (const auto& r : rows) both = both && has(r, Mechanism::CRBS) && has(r, Mechanism::FCFS);
    if (!both) return os.str();

    line("Percentage difference of request satisfaction", [](const ProfileSummary& r) {
        return fixed(100.0 * percentage_difference(r.satisfaction.at(Mechanism::CRBS), r.satisfaction.at(Mechanism::FCFS)),
                     1) + "%";
    });
    double mean_diff = 0, mean_crbs = 0, mean_fcfs = 0;
    for (const auto& r : rows) {
        mean_diff += percentage_difference(r.satisfaction.at(Mechanism::CRBS), r.satisfaction.at(Mechanism::FCFS));
        mean_crbs += r.satisfaction.at(Mechanism::CRBS);
        mean_fcfs += r.satisfaction.at(Mechanism::FCFS);
    }
    const auto n = static_cast<double>(rows.size());
    os << "\nAverage percentage difference (mean of columns): " << fixed(100.0 * mean_diff / n, 1) << "%\n";
    os << "Percentage difference of mean satisfaction rates: "
       << fixed(100.0 * percentage_difference(mean_crbs / n, mean_fcfs / n), 1) << "%\n";
    return os.str();
}

int cmd_run(RunOptions opt, const std::vector<std::string>& argv) {
    std::vector<Job> jobs;
    auto add_jobs = [&](const std::string& name, std::uint64_t seed, const Dataset& d) {
        for (Mechanism m : opt.mechanisms) jobs.push_back(Job{name, seed, d, m, {}, {}});
    };
    for (std::uint64_t seed : opt.seeds) {
        if (opt.dataset) {
            Dataset d = *opt.dataset;
            if (opt.free_riders) d = inject_free_riders(std::move(d), *opt.free_riders, seed);
            add_jobs(d.profile, seed, d);
            continue;
        }
        for (const Profile& p : opt.profiles) {
            Dataset d = generate(p, seed);
            if (opt.free_riders) d = inject_free_riders(std::move(d), *opt.free_riders, seed);
            add_jobs(p.name, seed, d);
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            SimConfig cfg = opt.sim;
            cfg.mechanism = jobs[i].mechanism;
            cfg.seed = jobs[i].seed;
            try {
                jobs[i].result = run(jobs[i].dataset, cfg);
            } catch (const std::exception& e) {
                jobs[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned threads = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(jobs.size())));
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& j : jobs) {
        if (!j.error.empty()) {
            std::cerr << "barterd: " << stem(j) << ": " << j.error << '\n';
            return 3;
        }
    }

    std::string csv = metrics_csv_header() + '\n';
    std::map<std::string, ProfileSummary> summaries;
    std::vector<std::string> order;
    for (const auto& j : jobs) {
        const fs::path dataset_path = opt.out / "datasets" / (j.profile + "-s" + std::to_string(j.seed) + ".json");
        if (!fs::exists(dataset_path) || j.mechanism == opt.mechanisms.front()) {
            write_file(dataset_path, nlohmann::json(j.dataset).dump(2) + '\n');
        }
        write_file(opt.out / "logs" / (stem(j) + ".jsonl"), j.result.log_text());
        const nlohmann::json report{{"metrics", j.result.metrics}, {"ledger", j.result.ledger}};
        write_file(opt.out / "reports" / (stem(j) + ".json"), report.dump(2) + '\n');
        csv += metrics_csv_row(j.result.metrics) + '\n';

        if (!summaries.contains(j.profile)) order.push_back(j.profile);
        ProfileSummary& s = summaries[j.profile];
        s.name = j.profile;
        const MetricsReport& m = j.result.metrics;
        s.providers = m.providers;
        s.requestors = m.requestors;
        if (j.mechanism == opt.mechanisms.front()) {
            s.available += static_cast<double>(m.available_resources);
            ++s.runs;
        }
        s.consumed[j.mechanism] += static_cast<double>(m.consumed_resources);
        s.utilization[j.mechanism] += m.resource_utilization_rate;
        s.satisfaction[j.mechanism] += m.request_satisfaction_rate;
    }
    std::vector<ProfileSummary> rows;
    for (const auto& name : order) {
        ProfileSummary s = summaries.at(name);
        const double n = s.runs;
        s.available /= n;
        for (auto* field : {&s.consumed, &s.utilization, &s.satisfaction}) {
            for (auto& [m, v] : *field) v /= n;
        }
        rows.push_back(std::move(s));
    }
    write_file(opt.out / "metrics.csv", csv);
    const std::string summary = table_summary(rows, opt.seeds.size());
    write_file(opt.out / "summary.txt", summary);

    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    nlohmann::json manifest{{"created_at", stamp}, {"argv", argv}, {"runs", jobs.size()}};
    nlohmann::json files = nlohmann::json::array();
    for (const auto& j : jobs) {
        files.push_back({{"profile", j.profile},
                         {"seed", j.seed},
                         {"mechanism", std::string(to_string(j.mechanism))},
                         {"dataset_digest", j.result.metrics.dataset_digest},
                         {"log", "logs/" + stem(j) + ".jsonl"},
                         {"report", "reports/" + stem(j) + ".json"}});
    }
    manifest["files"] = files;
    write_file(opt.out / "manifest.json", manifest.dump(2) + '\n');

    std::cout << summary;
    std::cout << "\nwrote " << jobs.size() << " run(s) to " << opt.out.string() << '\n';
    return 0;
}

std::vector<Mechanism> parse_mechanisms(const std::vector<std::string>& names) {
    std::vector<Mechanism> out;
    for (const auto& n : names) {
        for (const auto& part : split(n, ',')) {
            const Mechanism m = parse_mechanism(part);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        }
    }
    if (out.empty()) throw UsageError("at least one mechanism is required");
    return out;
}

// ---------------------------------------------------------------- compare

MetricsReport load_report(const fs::path& path) {
    const auto j = read_json(path);
    return (j.contains("metrics") ? j.at("metrics") : j).get<MetricsReport>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"barterd: cloud resource bartering marketplace simulator"};
    app.require_subcommand(1);
    std::vector<std::string> args(argv, argv + argc);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a dataset");
    std::string gen_profile = "exp3";
    std::optional<std::uint64_t> gen_seed;
    std::string gen_config, gen_out;
    std::optional<int> gen_free_riders;
    gen->add_option("--profile", gen_profile, "Preset name")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Seed (default: BARTERD_SEED or 1)");
    gen->add_option("--config", gen_config, "JSON file with profile overrides");
    gen->add_option("--free-riders", gen_free_riders, "Inject this many free riders");
    gen->add_option("--out", gen_out, "Output file (default: stdout)");

    // run
    auto* runc = app.add_subcommand("run", "Run experiments and write artifacts");
    std::string run_profiles, run_dataset, run_seeds, run_out, run_config, run_ceiling;
    std::vector<std::string> run_mechs;
    bool run_no_guard = false;
    std::optional<int> run_free_riders;
    unsigned run_jobs = 1;
    runc->add_option("--profile", run_profiles, "Preset name(s), comma-separated");
    runc->add_option("--dataset", run_dataset, "Run a dataset file instead of a generated one");
    runc->add_option("--seeds", run_seeds, "Seeds: 1..30, 1,2,5 (default: BARTERD_SEED or 1)");
    runc->add_option("--mechanisms", run_mechs, "crbs,fcfs")->delimiter(',');
    runc->add_option("--out", run_out, "Output directory (default: out)");
    runc->add_option("--config", run_config, "JSON config; flags win on conflict");
    runc->add_flag("--no-guard", run_no_guard, "Disable the free-rider guard");
    runc->add_option("--debt-ceiling", run_ceiling, "Debt tolerated before blocking (credits)");
    runc->add_option("--free-riders", run_free_riders, "Inject this many free riders into every dataset");
    runc->add_option("--jobs", run_jobs, "Parallel runs")->check(CLI::PositiveNumber);

    // compare
    auto* cmp = app.add_subcommand("compare", "Compare a CRBS report with an FCFS report");
    std::string cmp_a, cmp_b;
    cmp->add_option("crbs", cmp_a, "CRBS report JSON")->required();
    cmp->add_option("fcfs", cmp_b, "FCFS report JSON")->required();

    // price
    auto* price = app.add_subcommand("price", "Evaluate a pricing formula");
    price->require_subcommand(1);
    auto* credits = price->add_subcommand("credits", "Barter credits of a bundle");
    std::vector<std::string> bundle_items;
    std::string duration = "OneWeek";
    credits->add_option("--item", bundle_items, "CLASS=COUNT, repeatable")->required();
    credits->add_option("--duration", duration)->capture_default_str();
    auto* fraction = price->add_subcommand("fraction", "Share of the budget to invest");
    std::int64_t total = 0, remaining = 0;
    fraction->add_option("--total", total, "Urgency window")->required();
    fraction->add_option("--remaining", remaining, "Time left")->required();
    auto* bid = price->add_subcommand("bid", "Estimated bid");
    std::string budget;
    bid->add_option("--budget", budget)->required();
    bid->add_option("--total", total)->required();
    bid->add_option("--remaining", remaining)->required();
    auto* trans = price->add_subcommand("transactional", "Negotiated price");
    std::int64_t tt = 0, rtp = 0, rtr = 0;
    std::string pmax, pmin;
    trans->add_option("--tt", tt, "Shared urgency window")->required();
    trans->add_option("--pmax", pmax)->required();
    trans->add_option("--pmin", pmin)->required();
    trans->add_option("--rtp", rtp, "Provider time left")->required();
    trans->add_option("--rtr", rtr, "Requestor time left")->required();
    bool decimal = false;
    price->add_flag("--decimal", decimal, "Print a decimal approximation instead of the exact value");

    // board dump
    auto* board = app.add_subcommand("board", "Blackboard inspection");
    board->require_subcommand(1);
    auto* dump = board->add_subcommand("dump", "Live entries of a CRBS run at a time");
    std::string dump_dataset;
    std::int64_t dump_time = 0;
    dump->add_option("--dataset", dump_dataset)->required();
    dump->add_option("--time", dump_time, "Simulated minute")->required();

    // ledger replay
    auto* ledger = app.add_subcommand("ledger", "Ledger tools");
    ledger->require_subcommand(1);
    auto* replay = ledger->add_subcommand("replay", "Rebuild balances and ranks from an event log");
    std::string replay_log, replay_expect;
    replay->add_option("log", replay_log)->required();
    replay->add_option("--expect", replay_expect, "Report JSON whose ledger must match");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*gen) {
            Profile p = profile_preset(gen_profile);
            if (!gen_config.empty() && gen->count("--profile") == 0) {
                const auto cfg = read_json(gen_config);
                if (cfg.contains("profile")) p = resolve_profile(cfg.at("profile"));
            }
            const std::uint64_t seed = gen_seed.value_or(default_seed());
            Dataset d = generate(p, seed);
            if (gen_free_riders) d = inject_free_riders(std::move(d), *gen_free_riders, seed);
            const std::string text = nlohmann::json(d).dump(2) + '\n';
            if (gen_out.empty()) {
                std::cout << text;
            } else {
                write_file(gen_out, text);
            }
            return 0;
        }

        if (*runc) {
            RunOptions opt;
            nlohmann::json cfg = nlohmann::json::object();
            if (!run_config.empty()) cfg = read_json(run_config);

            if (!run_profiles.empty()) {
                for (const auto& name : split(run_profiles, ',')) opt.profiles.push_back(profile_preset(name));
            } else if (cfg.contains("profile")) {
                const auto& pj = cfg.at("profile");
                if (pj.is_array()) {
                    for (const auto& one : pj) opt.profiles.push_back(resolve_profile(one));
                } else {
                    opt.profiles.push_back(resolve_profile(pj));
                }
            }
            if (!run_dataset.empty()) {
                opt.dataset = read_json(run_dataset).get<Dataset>();
            } else if (opt.profiles.empty()) {
                if (cfg.contains("dataset")) {
                    opt.dataset = read_json(cfg.at("dataset").get<std::string>()).get<Dataset>();
                } else {
                    throw UsageError("run needs --profile, --dataset or a config naming one");
                }
            }

            if (!run_seeds.empty()) {
                opt.seeds = parse_seeds(run_seeds);
            } else if (cfg.contains("seeds")) {
                const auto& sj = cfg.at("seeds");
                if (sj.is_array()) {
                    for (const auto& s : sj) opt.seeds.push_back(s.get<std::uint64_t>());
                } else {
                    opt.seeds = parse_seeds(sj.is_string() ? sj.get<std::string>() : std::to_string(sj.get<std::uint64_t>()));
                }
            } else {
                opt.seeds = {default_seed()};
            }
            if (opt.seeds.empty()) throw UsageError("at least one seed is required");

            if (!run_mechs.empty()) {
                opt.mechanisms = parse_mechanisms(run_mechs);
            } else if (cfg.contains("mechanisms")) {
                opt.mechanisms = parse_mechanisms(cfg.at("mechanisms").get<std::vector<std::string>>());
            }

            opt.out = !run_out.empty() ? fs::path(run_out)
                                       : fs::path(cfg.value("output_dir", std::string("out")));
            if (cfg.contains("guard_enabled")) opt.sim.guard_enabled = cfg.at("guard_enabled").get<bool>();
            if (run_no_guard) opt.sim.guard_enabled = false;
            if (cfg.contains("debt_ceiling")) opt.sim.debt_ceiling = cfg.at("debt_ceiling").get<Credits>();
            if (!run_ceiling.empty()) opt.sim.debt_ceiling = Rational::parse(run_ceiling);
            if (cfg.contains("free_riders")) opt.free_riders = cfg.at("free_riders").get<int>();
            if (run_free_riders) opt.free_riders = run_free_riders;
            opt.jobs = cfg.value("jobs", 1u);
            if (runc->count("--jobs")) opt.jobs = run_jobs;
            if (cfg.contains("sim")) {
                const auto& s = cfg.at("sim");
                opt.sim.revisit_interval = s.value("revisit_interval", opt.sim.revisit_interval);
                opt.sim.feedback_delay = s.value("feedback_delay", opt.sim.feedback_delay);
                opt.sim.fcfs_service_time = s.value("fcfs_service_time", opt.sim.fcfs_service_time);
            }
            return cmd_run(std::move(opt), args);
        }

        if (*cmp) {
            const ComparisonReport report = compare(load_report(cmp_a), load_report(cmp_b));
            std::cout << nlohmann::json(report).dump(2) << '\n';
            return 0;
        }

        if (*price) {
            Rational value;
            if (*credits) {
                ResourceBundle b;
                for (const auto& item : bundle_items) {
                    const auto eq = item.find('=');
                    if (eq == std::string::npos) throw UsageError("--item expects CLASS=COUNT, got '" + item + "'");
                    b.items[parse_instance_class(item.substr(0, eq))] += std::stoll(item.substr(eq + 1));
                }
                b.validate();
                value = pricing::suggested_price(b, parse_sharing_duration(duration));
            } else if (*fraction) {
                value = pricing::budget_fraction(pricing::ClockPair{total, remaining});
            } else if (*bid) {
                value = pricing::estimated_bid(Rational::parse(budget), pricing::ClockPair{total, remaining});
            } else {
                value = pricing::transactional_price(tt, Rational::parse(pmax), Rational::parse(pmin), rtp, rtr);
            }
            std::cout << (decimal ? fixed(value.to_double(), 6) : value.to_string()) << '\n';
            return 0;
        }

        if (*dump) {
            const Dataset d = read_json(dump_dataset).get<Dataset>();
            std::cout << board_at(d, SimConfig{}, dump_time).dump(2) << '\n';
            return 0;
        }

        if (*replay) {
            std::ifstream in(replay_log);
            if (!in) throw UsageError("cannot open " + replay_log);
            const nlohmann::json snapshot = Ledger::replay(in).snapshot();
            std::cout << snapshot.dump(2) << '\n';
            if (!replay_expect.empty()) {
                const auto expected = read_json(replay_expect);
                const auto& want = expected.contains("ledger") ? expected.at("ledger") : expected;
                if (want != snapshot) {
                    std::cerr << "barterd: replayed ledger differs from " << replay_expect << '\n';
                    return 4;
                }
                std::cerr << "replay matches " << replay_expect << '\n';
            }
            return 0;
        }
    } catch (const InvariantViolation& e) {
        std::cerr << "barterd: invariant violated: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "barterd: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
