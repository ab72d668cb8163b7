// Command-line entry points: simulate, estimate, tls, tls-compare, validate.

#include "pcs/errors.hpp"
#include "pcs/scenario_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace pcs;

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kValidation = 3,
    kCapacity = 4,
    kIo = 5,
    kInternal = 6,
};

unsigned default_workers()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

ScenarioFile tls_preset(std::string_view name)
{
    ScenarioFile f;
    TlsConfig t;
    if (name == "field_replay") {
        f.tls = t;
        return f;
    }
    for (const auto& level : synthetic_levels()) {
        if (name == "level_" + level.name) {
            t.demand = uniform_demand(level.vehicles_per_hour, level.pedestrians_per_hour);
            f.tls = t;
            return f;
        }
    }
    throw ValidationError("scenario", "unknown built-in scenario '" + std::string(name) + "'");
}

// A built-in name (record1..record5, field_replay, level_a..level_f) or a file.
ScenarioFile load(const std::string& spec)
{
    if (auto rec = find_validation_record(spec)) {
        ScenarioFile f;
        f.scenario = rec->scenario;
        return f;
    }
    if (spec == "field_replay" || spec.starts_with("level_"))
        return tls_preset(spec);
    return parse_scenario(spec);
}

void apply_seed(ScenarioFile& f, const std::optional<std::uint64_t>& seed)
{
    if (!seed)
        return;
    f.scenario.engine.seed = *seed;
    if (f.tls)
        f.tls->engine.seed = *seed;
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

std::string fmt(const char* format, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

struct Options {
    std::string scenario; ///< empty selects the command default
    std::optional<std::uint64_t> seed;
    int runs = 10;
    unsigned workers = default_workers();
    std::string summary;
    std::string trace = "trace.csv";
    std::string waits;
    std::string mode;
    int seed_count = 10;
};

std::string scenario_or(const Options& o, const char* fallback)
{
    return o.scenario.empty() ? fallback : o.scenario;
}

int cmd_simulate(const Options& o)
{
    ScenarioFile f = load(scenario_or(o, "record1"));
    apply_seed(f, o.seed);
    const RunResult r = run(f.scenario);
    if (!o.trace.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, r.trace);
        emit(o.trace, csv.str());
    }
    if (!o.summary.empty())
        emit(o.summary, run_summary_json(r.summary, f));
    if (o.trace != "-" && o.summary != "-")
        std::cout << fmt("crossing time %.1f s, %d pedestrians, %s, no-move %.4f, seed %llu\n",
                         r.summary.cohort_crossing_time, r.summary.pedestrians,
                         r.summary.completed ? "all finished" : "NOT all finished",
                         r.summary.no_move_fraction,
                         static_cast<unsigned long long>(r.summary.seed));
    return r.summary.completed ? kOk : kFailure;
}

int cmd_estimate(const Options& o)
{
    if (o.runs < 1)
        throw ValidationError("runs", "must be >= 1");
    const std::string spec = scenario_or(o, "record1");
    ScenarioFile f = load(spec);
    apply_seed(f, o.seed);
    const CrossingEstimate est = estimate_crossing_time(f.scenario, o.runs, o.workers);
    if (!o.summary.empty())
        emit(o.summary, estimate_summary_json(est, o.runs, f));
    if (o.summary != "-") {
        std::cout << fmt("mean crossing time %.1f s over %d runs (seed %llu)\n", est.mean, o.runs,
                         static_cast<unsigned long long>(f.scenario.engine.seed));
        if (const auto rec = find_validation_record(spec))
            std::cout << fmt("actual %.0f s, accuracy %.2f%%\n", rec->actual_time,
                             accuracy_percent(est.mean, rec->actual_time));
    }
    return est.all_completed ? kOk : kFailure;
}

TlsConfig tls_config(ScenarioFile& f, const std::string& spec)
{
    if (!f.tls)
        throw ValidationError("tls", "scenario '" + spec + "' has no tls section");
    return *f.tls;
}

int cmd_tls(const Options& o)
{
    const std::string spec = scenario_or(o, "field_replay");
    ScenarioFile f = load(spec);
    apply_seed(f, o.seed);
    TlsConfig cfg = tls_config(f, spec);
    if (!o.mode.empty()) {
        const auto m = parse_tls_mode(o.mode);
        if (!m)
            throw ValidationError("mode", "expected static, dynamic or dynamic_with_pcs");
        cfg.mode = *m;
        f.tls->mode = *m;
    }
    const IntersectionMetrics m = simulate_intersection(cfg, cfg.engine.seed);
    if (!o.waits.empty()) {
        std::ostringstream csv;
        write_wait_samples_csv(csv, m);
        emit(o.waits, csv.str());
    }
    if (!o.summary.empty())
        emit(o.summary, tls_summary_json(m, f));
    if (o.summary != "-" && o.waits != "-")
        std::cout << fmt("%s: vehicle AWT %.1f s, pedestrian AWT %.1f s, stranded %d, cycles %d\n",
                         std::string(to_string(m.mode)).c_str(), m.vehicle_awt, m.pedestrian_awt,
                         m.stranded_pedestrians, m.cycles);
    return kOk;
}

int cmd_tls_compare(const Options& o)
{
    if (o.seed_count < 1)
        throw ValidationError("seeds", "must be >= 1");
    const std::string spec = scenario_or(o, "field_replay");
    ScenarioFile f = load(spec);
    apply_seed(f, o.seed);
    const TlsConfig cfg = tls_config(f, spec);
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < o.seed_count; ++k)
        seeds.push_back(cfg.engine.seed + static_cast<std::uint64_t>(k));
    const auto rows = compare_modes(cfg, kModes, seeds, o.workers);
    if (!o.summary.empty())
        emit(o.summary, compare_summary_json(rows, seeds, f));
    if (o.summary != "-") {
        std::cout << fmt("%-18s %10s %10s %10s %10s %9s\n", "mode", "veh AWT", "ped AWT", "veh max",
                         "ped max", "stranded");
        for (const auto& r : rows)
            std::cout << fmt("%-18s %10.1f %10.1f %10.1f %10.1f %9d\n",
                             std::string(to_string(r.mode)).c_str(), r.vehicle_awt, r.pedestrian_awt,
                             r.vehicle_max_wait, r.pedestrian_max_wait, r.stranded_pedestrians);
        const double base_v = rows.front().vehicle_awt;
        const double base_p = rows.front().pedestrian_awt;
        for (std::size_t k = 1; k < rows.size(); ++k)
            std::cout << fmt("%s vs static: vehicle %+.0f%%, pedestrian %+.0f%%\n",
                             std::string(to_string(rows[k].mode)).c_str(),
                             100.0 * (rows[k].vehicle_awt - base_v) / base_v,
                             100.0 * (rows[k].pedestrian_awt - base_p) / base_p);
    }
    return kOk;
}

int cmd_validate(const Options& o)
{
    if (o.runs < 1)
        throw ValidationError("runs", "must be >= 1");
    std::cout << fmt("%-8s %-18s %8s %10s %9s %10s\n", "record", "counts", "actual", "estimated",
                     "accuracy", "reference");
    bool ok = true;
    for (ValidationRecord rec : builtin_validation_scenarios()) {
        if (o.seed)
            rec.scenario.engine.seed = *o.seed;
        const CrossingEstimate est = estimate_crossing_time(rec.scenario, o.runs, o.workers);
        ok = ok && est.all_completed;
        std::cout << fmt("%-8s %-18s %7.0f s %8.1f s %8.2f%% %8.1f s\n", rec.name.c_str(),
                         rec.counts.c_str(), rec.actual_time, est.mean,
                         accuracy_percent(est.mean, rec.actual_time), rec.reference_normal);
    }
    return ok ? kOk : kFailure;
}

int cmd_echo(const Options& o)
{
    ScenarioFile f = load(scenario_or(o, "record1"));
    apply_seed(f, o.seed);
    std::cout << config_echo(f);
    return kOk;
}

int report(const char* category, const std::exception& e, int code)
{
    std::cerr << "error[" << category << "]: " << e.what() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pedestrian crossing simulation and signal control experiments"};
    app.require_subcommand(1);
    Options o;

    const auto add_scenario = [&](CLI::App* c, const std::string& fallback) {
        c->add_option("--scenario", o.scenario,
                      "built-in name (record1..record5, field_replay, level_a..level_f) or "
                      "file; default " + fallback);
    };
    const auto add_seed = [&](CLI::App* c) {
        c->add_option("--seed", o.seed, "overrides the scenario seed");
    };
    const auto add_workers = [&](CLI::App* c) {
        c->add_option("--workers", o.workers, "replication threads")->check(CLI::PositiveNumber);
    };

    auto* simulate = app.add_subcommand("simulate", "one run with a trace");
    simulate->add_option("--trace", o.trace, "trace CSV path, - for stdout, empty to skip")
        ->capture_default_str();
    simulate->add_option("--summary", o.summary, "summary JSON path, - for stdout");

    auto* estimate = app.add_subcommand("estimate", "mean crossing time over replications");
    estimate->add_option("--runs", o.runs, "replications")->capture_default_str();
    estimate->add_option("--summary", o.summary, "summary JSON path, - for stdout");

    auto* tls = app.add_subcommand("tls", "one signal mode at the intersection");
    tls->add_option("--mode", o.mode, "static, dynamic or dynamic_with_pcs");
    tls->add_option("--summary", o.summary, "summary JSON path, - for stdout");
    tls->add_option("--waits", o.waits, "per-agent wait CSV path, - for stdout");

    auto* compare = app.add_subcommand("tls-compare", "all three signal modes over several seeds");
    compare->add_option("--seeds", o.seed_count, "number of consecutive seeds")->capture_default_str();
    compare->add_option("--summary", o.summary, "summary JSON path, - for stdout");

    auto* validate = app.add_subcommand("validate", "accuracy against the five field records");
    validate->add_option("--runs", o.runs, "replications per record")->capture_default_str();

    auto* echo = app.add_subcommand("echo", "print the normalized configuration");

    for (auto* c : {simulate, estimate, echo})
        add_scenario(c, "record1");
    for (auto* c : {tls, compare})
        add_scenario(c, "field_replay");
    for (auto* c : {simulate, estimate, tls, compare, validate, echo})
        add_seed(c);
    for (auto* c : {estimate, compare, validate})
        add_workers(c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*simulate)
            return cmd_simulate(o);
        if (*estimate)
            return cmd_estimate(o);
        if (*tls)
            return cmd_tls(o);
        if (*compare)
            return cmd_tls_compare(o);
        if (*validate)
            return cmd_validate(o);
        if (*echo)
            return cmd_echo(o);
    } catch (const ValidationError& e) {
        return report("validation", e, kValidation);
    } catch (const CapacityError& e) {
        return report("capacity", e, kCapacity);
    } catch (const IoError& e) {
        return report("io", e, kIo);
    } catch (const InternalError& e) {
        return report("internal", e, kInternal);
    } catch (const std::exception& e) {
        return report("failure", e, kFailure);
    }
    return kUsage;
}
