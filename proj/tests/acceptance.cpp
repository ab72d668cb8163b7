// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed here.

#include "oracles.hpp"
#include "pcs/engine.hpp"
#include "pcs/errors.hpp"
#include "pcs/scenario_io.hpp"
#include "pcs/tls.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace pcs;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// C1
constexpr double kTableTolerance = 0.10;
constexpr double kStretchTolerance = 0.05;
constexpr int kStretchRecords = 4;
constexpr int kEstimatorRuns = 10;
// C2
constexpr int kOracleConfigs = 1000;
constexpr int kOracleSamples = 10000;
constexpr double kOracleSlack = 0.5 * kDeg;
// C3
constexpr double kTangencyTol = 1e-9;
// C4
constexpr int kInvariantSeeds = 50;
constexpr std::uint64_t kInvariantFirstSeed = 1000;
constexpr int kInvariantMaxSteps = 300;
constexpr double kNoMoveBound = 0.04;
// C7, C8
constexpr int kTlsSeeds = 10;
constexpr std::uint64_t kTlsFirstSeed = 100;
constexpr double kVehicleReduction = 0.30;
// C9
constexpr double kEquationRelTol = 1e-12;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

unsigned workers()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

std::vector<std::uint64_t> tls_seeds()
{
    std::vector<std::uint64_t> s;
    for (int k = 0; k < kTlsSeeds; ++k)
        s.push_back(kTlsFirstSeed + static_cast<std::uint64_t>(k));
    return s;
}

Outcome table_reproduction()
{
    Outcome o{true, ""};
    int stretch = 0;
    for (const auto& rec : builtin_validation_scenarios()) {
        const auto est = estimate_crossing_time(rec.scenario, kEstimatorRuns, workers());
        const double err = std::abs(est.mean - rec.actual_time) / rec.actual_time;
        o.pass = o.pass && est.all_completed && err <= kTableTolerance;
        if (err <= kStretchTolerance)
            ++stretch;
        o.detail += fmt("%s %.1f/%.0f s (%.2f%%) ", rec.name.c_str(), est.mean, rec.actual_time,
                        accuracy_percent(est.mean, rec.actual_time));
    }
    o.detail += fmt("| within 5%%: %d of 5 (stretch %s)", stretch,
                    stretch >= kStretchRecords ? "met" : "missed");
    return o;
}

Outcome geometry_oracle()
{
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> count(1, 8);
    std::uniform_real_distribution<double> dist(0.2, 3.0);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> clear(0.2, 1.5);
    std::uniform_real_distribution<double> move(0.2, 2.0);
    int worse = 0;
    int conflicts = 0;
    int missed = 0;
    int blocked = 0;
    double worst = 0.0;
    for (int trial = 0; trial < kOracleConfigs; ++trial) {
        const double d = move(rng);
        const Point fwd = rotate({1, 0}, ang(rng));
        std::vector<oracle::Obstacle> obstacles;
        std::vector<AngleInterval> arcs;
        const int n = count(rng);
        for (int k = 0; k < n; ++k) {
            const oracle::Obstacle ob{rotate({dist(rng), 0}, ang(rng)), clear(rng)};
            obstacles.push_back(ob);
            for (const auto& a : exclusion_interval({0, 0}, d, fwd, ob.center, ob.clearance))
                arcs.push_back(a);
        }
        const auto theta = best_angle(ExclusionSet::union_of(arcs));
        const auto brute = oracle::brute_force_best({0, 0}, d, fwd, obstacles, kOracleSamples);
        if (!brute && !theta) {
            ++blocked;
            continue;
        }
        if (!theta) {
            ++missed;
            continue;
        }
        if (oracle::conflicts(candidate_position({0, 0}, d, fwd, *theta), obstacles, kDistanceTolerance))
            ++conflicts;
        if (brute) {
            const double gap = std::abs(*theta) - std::abs(*brute);
            worst = std::max(worst, gap);
            if (gap > kOracleSlack)
                ++worse;
        }
    }
    return {worse == 0 && conflicts == 0 && missed == 0,
            fmt("%d configs, %d fully blocked, worse than brute force by >0.5 deg: %d, conflicts: %d, "
                "missed: %d, worst excess %.4f deg",
                kOracleConfigs, blocked, worse, conflicts, missed, worst / kDeg)};
}

Outcome tangency_case()
{
    const auto arcs = exclusion_interval({0, 0}, 2, {1, 0}, {2, 0}, 2);
    const auto pts = circle_intersections({{0, 0}, 2}, {{2, 0}, 2});
    const double r3 = std::sqrt(3.0);
    bool ok = arcs.size() == 1 && pts.count() == 2;
    double err = 0.0;
    if (ok) {
        err = std::max({std::abs(arcs[0].lo + 60 * kDeg), std::abs(arcs[0].hi - 60 * kDeg),
                        std::abs(pts.points[0].x - 1), std::abs(pts.points[0].y - r3),
                        std::abs(pts.points[1].x - 1), std::abs(pts.points[1].y + r3)});
        const auto theta = best_angle(ExclusionSet::union_of(std::vector<AngleInterval>{arcs[0]}));
        ok = theta.has_value();
        if (ok) {
            const Point p = candidate_position({0, 0}, 2, {1, 0}, *theta);
            err = std::max({err, std::abs(p.x - 1), std::abs(p.y + r3)});
        }
    }
    return {ok && err <= kTangencyTol,
            fmt("interval (%.12f, %.12f) deg, points (1, +-sqrt 3), max abs error %.2e", ok ? arcs[0].lo / kDeg : 0.0,
                ok ? arcs[0].hi / kDeg : 0.0, err)};
}

Outcome invariant_suite()
{
    auto base = find_validation_record("record3")->scenario;
    base.engine.max_steps = kInvariantMaxSteps;
    const auto& L = base.layout;
    int overlaps = 0;
    int containment = 0;
    int incomplete = 0;
    double worst_no_move = 0.0;
    int worst_steps = 0;
    for (int k = 0; k < kInvariantSeeds; ++k) {
        auto s = base;
        s.engine.seed = kInvariantFirstSeed + static_cast<std::uint64_t>(k);
        RunResult r;
        try {
            r = run(s);
        } catch (const InternalError&) {
            ++overlaps;
            continue;
        }
        if (!r.summary.completed)
            ++incomplete;
        worst_no_move = std::max(worst_no_move, r.summary.no_move_fraction);
        worst_steps = std::max(worst_steps, r.summary.steps);
        std::map<int, std::vector<const TraceRecord*>> by_step;
        for (const auto& row : r.trace) {
            if (row.state == PedState::Done)
                continue;
            by_step[row.step].push_back(&row);
            if (row.state == PedState::Crossing &&
                (row.x < L.left_curb() - kDistanceTolerance || row.x > L.right_curb() + kDistanceTolerance ||
                 row.y < L.lower_edge() - kDistanceTolerance || row.y > L.upper_edge() + kDistanceTolerance))
                ++containment;
        }
        for (const auto& [step, rows] : by_step)
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = i + 1; j < rows.size(); ++j)
                    if (std::hypot(rows[i]->x - rows[j]->x, rows[i]->y - rows[j]->y) <
                        rows[i]->radius + rows[j]->radius - kDistanceTolerance)
                        ++overlaps;
    }
    return {overlaps == 0 && containment == 0 && incomplete == 0 && worst_no_move < kNoMoveBound,
            fmt("record3 x %d seeds: overlaps %d, containment %d, incomplete %d, "
                "slowest %d steps, worst no-move %.4f (< %.2f)",
                kInvariantSeeds, overlaps, containment, incomplete, worst_steps, worst_no_move, kNoMoveBound)};
}

Outcome determinism()
{
    const auto once = [](const ScenarioFile& f) {
        const auto r = run(f.scenario);
        std::ostringstream trace;
        write_trace_csv(trace, r.trace);
        return trace.str() + run_summary_json(r.summary, f);
    };
    int mismatches = 0;
    int checked = 0;
    for (const auto& rec : builtin_validation_scenarios()) {
        ScenarioFile f;
        f.scenario = rec.scenario;
        f.scenario.engine.seed = 7;
        if (once(f) != once(f))
            ++mismatches;
        ++checked;
    }
    ScenarioFile t;
    t.tls = TlsConfig{};
    t.tls->demand.horizon = 600;
    const auto tls_once = [&] {
        const auto m = simulate_intersection(*t.tls, 7);
        std::ostringstream waits;
        write_wait_samples_csv(waits, m);
        return waits.str() + tls_summary_json(m, t);
    };
    if (tls_once() != tls_once())
        ++mismatches;
    ++checked;
    return {mismatches == 0, fmt("%d scenario pairs, %d byte mismatches", checked, mismatches)};
}

Outcome closed_form()
{
    struct Triple {
        double beta;
        double length;
        double speed;
    };
    const Triple triples[] = {{3.0, 43.62, 1.2676}, {3.0, 45.045, 1.2676}, {2.0, 30.0, 1.1}};
    bool ok = true;
    std::string detail;
    for (const auto& t : triples) {
        Scenario s;
        s.layout = CrosswalkLayout(t.beta, 3.6, t.length, 1.0);
        Cohort c;
        c.count = 1;
        c.type = PedestrianType::from_mean_sd(PedestrianKind::HealthyAdult, t.speed, 0.0, 0.3, 0.2);
        c.positions = {{0.0, 1.8}};
        s.cohorts = {c};
        const double expected = std::ceil((t.beta + t.length) / t.speed);
        const double got = run(s, false).summary.cohort_crossing_time;
        ok = ok && got == expected;
        detail += fmt("(%.3g, %.5g, %.5g) -> %.0f s expected %.0f; ", t.beta, t.length, t.speed, got, expected);
    }
    return {ok, detail};
}

Outcome tls_ordering()
{
    TlsConfig cfg;
    cfg.demand = field_replay_demand();
    const auto seeds = tls_seeds();
    const auto rows = compare_modes(cfg, kModes, seeds, workers());
    const auto& st = rows[0];
    const auto& dy = rows[1];
    const auto& pcs = rows[2];
    const double red_dy = 1.0 - dy.vehicle_awt / st.vehicle_awt;
    const double red_pcs = 1.0 - pcs.vehicle_awt / st.vehicle_awt;
    const bool a = red_dy >= kVehicleReduction && red_pcs >= kVehicleReduction;
    const bool b = pcs.pedestrian_awt <= dy.pedestrian_awt && dy.pedestrian_awt < st.pedestrian_awt;
    const bool c = pcs.max_stranded_per_run == 0;
    const bool d = pcs.pedestrian_max_wait < st.pedestrian_max_wait;
    return {a && b && c && d,
            fmt("%d seeds | (a) vehicle AWT %.1f/%.1f/%.1f s, reductions %.0f%%/%.0f%% %s | "
                "(b) ped AWT %.1f/%.1f/%.1f s %s | (c) PCS stranded %d %s | (d) ped max wait PCS %.1f vs static %.1f s %s",
                kTlsSeeds, st.vehicle_awt, dy.vehicle_awt, pcs.vehicle_awt, 100 * red_dy, 100 * red_pcs,
                a ? "ok" : "FAIL", st.pedestrian_awt, dy.pedestrian_awt, pcs.pedestrian_awt, b ? "ok" : "FAIL",
                pcs.stranded_pedestrians, c ? "ok" : "FAIL", pcs.pedestrian_max_wait, st.pedestrian_max_wait,
                d ? "ok" : "FAIL")};
}

Outcome demand_trend()
{
    const auto seeds = tls_seeds();
    std::map<std::string, std::vector<ModeStats>> by_level;
    for (const auto& level : synthetic_levels()) {
        TlsConfig cfg;
        cfg.demand = uniform_demand(level.vehicles_per_hour, level.pedestrians_per_hour);
        by_level[level.name] = compare_modes(cfg, kModes, seeds, workers());
    }
    bool rises = true;
    for (const auto& [lo, hi] : {std::pair{"a", "b"}, std::pair{"e", "f"}})
        for (std::size_t m = 0; m < kModes.size(); ++m)
            rises = rises && by_level[hi][m].vehicle_awt > by_level[lo][m].vehicle_awt;
    bool pcs_le = true;
    std::string detail;
    for (const auto& [name, rows] : by_level) {
        pcs_le = pcs_le && rows[2].pedestrian_awt <= rows[1].pedestrian_awt;
        detail += fmt("%s veh %.1f/%.1f/%.1f ped dyn %.1f pcs %.1f; ", name.c_str(), rows[0].vehicle_awt,
                      rows[1].vehicle_awt, rows[2].vehicle_awt, rows[1].pedestrian_awt, rows[2].pedestrian_awt);
    }
    return {rises && pcs_le, fmt("vehicle AWT rises a->b and e->f in every mode: %s; PCS ped AWT <= dynamic at every level: %s | ",
                                 rises ? "yes" : "no", pcs_le ? "yes" : "no") +
                                 detail};
}

double rel(double got, double want)
{
    return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

Outcome equations()
{
    double worst = 0.0;
    const double bounds[][2] = {{1.8, 0.6}, {1.4, 0.5}, {1.2676 + 3 * 0.09167, 1.2676 - 3 * 0.09167}, {0.7, 0.2}};
    for (const auto& b : bounds) {
        const auto p = speed_params_from_bounds(b[0], b[1]);
        worst = std::max({worst, rel(p.mu + 3 * p.sigma, b[0]), rel(p.mu - 3 * p.sigma, b[1])});
    }
    const auto adult = speed_params_from_bounds(1.8, 0.6);
    worst = std::max({worst, rel(adult.mu, 1.2), rel(adult.sigma, 0.2)});

    for (PedestrianKind k : {PedestrianKind::HealthyAdult, PedestrianKind::Elder, PedestrianKind::Child,
                             PedestrianKind::CrutchesUser, PedestrianKind::WheelchairUser}) {
        const auto t = default_type(k);
        const double base = t.mu_speed;
        for (int i : {0, 50, 100}) {
            const double want_v = base - (base - t.min_speed) * i / 100.0;
            const double want_r = t.max_radius - (t.max_radius - t.min_radius) * i / 100.0;
            worst = std::max({worst, rel(effective_speed(t, base, i), want_v), rel(effective_radius(t, i), want_r)});
        }
    }
    const auto mid = PedestrianType::from_bounds(PedestrianKind::HealthyAdult, 1.8, 0.3, 0.3, 0.2);
    worst = std::max({worst, rel(effective_speed(mid, 1.2, 50), 0.75), rel(effective_radius(mid, 50), 0.25)});
    return {worst <= kEquationRelTol, fmt("worst relative error %.2e (<= %.0e)", worst, kEquationRelTol)};
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
        double budget_s; // 0 for no limit
    };
    const Criterion criteria[] = {
        {"table reproduction", table_reproduction, 5.0},
        {"geometry oracle", geometry_oracle, 10.0},
        {"tangency case", tangency_case, 0.0},
        {"invariant suite", invariant_suite, 0.0},
        {"determinism", determinism, 0.0},
        {"single-agent closed form", closed_form, 0.0},
        {"signal mode ordering", tls_ordering, 120.0},
        {"demand trend", demand_trend, 0.0},
        {"speed and radius equations", equations, 0.0},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, check, budget] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (budget > 0.0 && secs > budget) {
            o.pass = false;
            o.detail += fmt(" | over the %.0f s budget", budget);
        }
        std::printf("criterion %d (%s): %s [%.1f s] %s\n", index, name, o.pass ? "PASS" : "FAIL", secs,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass)
            ++failed;
    }
    std::printf("%d of %d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
