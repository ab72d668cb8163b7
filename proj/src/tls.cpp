#include "pcs/tls.hpp"

#include "pcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>
#include <thread>

namespace pcs {

namespace {

constexpr std::size_t kLanes = 4; // left, through, through, through + right
constexpr std::uint64_t kVehicleStream = 0;
constexpr std::uint64_t kPedestrianStream = 1;
constexpr std::uint64_t kCohortStream = 0x5EED'C0DEULL;

std::size_t index(Approach a) noexcept { return static_cast<std::size_t>(a); }

Approach opposite(Approach a) noexcept
{
    return static_cast<Approach>((index(a) + 2) % 4);
}

struct Vehicle {
    int id = 0;
    Approach approach = Approach::North;
    Turn turn = Turn::Through;
    double arrival = 0.0;
};

struct Lane {
    std::deque<Vehicle> queue;
    double next_ready = 0.0;
};

struct WaitingPed {
    int id = 0;
    CrosswalkId crosswalk = CrosswalkId::North;
    Side side = Side::Left;
    double base_speed = 0.0;
    double arrival = 0.0;
};

std::vector<Vehicle> vehicle_arrivals(const DemandProfile& demand, Rng& rng)
{
    std::vector<Vehicle> out;
    const TurningFractions& f = demand.turning;
    const double total = f.left + f.through + f.right;
    for (Approach a : kApproaches) {
        const double rate = demand.vehicle_rate[index(a)] / 3600.0;
        if (rate <= 0.0)
            continue;
        std::exponential_distribution<double> gap(rate);
        std::uniform_real_distribution<double> pick(0.0, total);
        for (double t = gap(rng); t < demand.horizon; t += gap(rng)) {
            const double u = pick(rng);
            const Turn turn = u < f.left ? Turn::Left : u < f.left + f.through ? Turn::Through
                                                                                : Turn::Right;
            out.push_back({0, a, turn, t});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Vehicle& x, const Vehicle& y) { return x.arrival < y.arrival; });
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k].id = static_cast<int>(k);
    return out;
}

std::array<std::vector<WaitingPed>, 4> pedestrian_arrivals(const DemandProfile& demand, Rng& rng)
{
    std::array<std::vector<WaitingPed>, 4> out;
    int next_id = 0;
    for (CrosswalkId c : kApproaches) {
        const double rate = demand.pedestrian_rate[index(c)] / 3600.0;
        if (rate <= 0.0)
            continue;
        std::exponential_distribution<double> gap(rate);
        std::bernoulli_distribution left_side(0.5);
        for (double t = gap(rng); t < demand.horizon; t += gap(rng)) {
            const Side side = left_side(rng) ? Side::Left : Side::Right;
            const double speed = sample_base_speed(demand.pedestrian_type, rng);
            out[index(c)].push_back({next_id++, c, side, speed, t});
        }
    }
    return out;
}

std::size_t choose_lane(const std::array<Lane, kLanes>& lanes, Turn turn) noexcept
{
    if (turn == Turn::Left)
        return 0;
    if (turn == Turn::Right)
        return 3;
    std::size_t best = 1;
    for (std::size_t k = 2; k < kLanes; ++k)
        if (lanes[k].queue.size() < lanes[best].queue.size())
            best = k;
    return best;
}

double fixed_walk_for(const ControllerParams& params, const CrosswalkLayout& layout)
{
    return params.fixed_walk ? *params.fixed_walk : 7.0 + layout.length() / 1.067;
}

struct Occupancy {
    double from = 0.0;
    double until = 0.0;
    [[nodiscard]] bool active(double t) const noexcept { return t >= from && t < until; }
};

} // namespace

std::string_view to_string(Approach a) noexcept
{
    switch (a) {
    case Approach::North: return "north";
    case Approach::East: return "east";
    case Approach::South: return "south";
    case Approach::West: return "west";
    }
    return "north";
}

std::string_view to_string(Turn t) noexcept
{
    switch (t) {
    case Turn::Left: return "left";
    case Turn::Through: return "through";
    case Turn::Right: return "right";
    }
    return "through";
}

std::string_view to_string(TlsMode m) noexcept
{
    switch (m) {
    case TlsMode::Static: return "static";
    case TlsMode::Dynamic: return "dynamic";
    case TlsMode::DynamicWithPcs: return "dynamic_with_pcs";
    }
    return "static";
}

std::optional<TlsMode> parse_tls_mode(std::string_view name) noexcept
{
    for (TlsMode m : kModes)
        if (to_string(m) == name)
            return m;
    return std::nullopt;
}

std::optional<CrosswalkId> yield_crosswalk(Movement m) noexcept
{
    // Right turns leave on the leg clockwise-adjacent to the approach when
    // seen from above with north up; left turns on the other side.
    if (m.turn == Turn::Through)
        return std::nullopt;
    switch (m.approach) {
    case Approach::North: return m.turn == Turn::Right ? Approach::West : Approach::East;
    case Approach::South: return m.turn == Turn::Right ? Approach::East : Approach::West;
    case Approach::East: return m.turn == Turn::Right ? Approach::North : Approach::South;
    case Approach::West: return m.turn == Turn::Right ? Approach::South : Approach::North;
    }
    return std::nullopt;
}

double SignalSchedule::cycle_length() const noexcept
{
    double total = 0.0;
    for (const auto& p : phases)
        total += p.duration;
    return total;
}

std::size_t SignalSchedule::phase_at(double t) const
{
    const double cycle = cycle_length();
    if (phases.empty() || !(cycle > 0.0))
        throw std::logic_error("schedule has no duration");
    double r = std::fmod(t, cycle);
    if (r < 0.0)
        r += cycle;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        if (r < phases[k].duration)
            return k;
        r -= phases[k].duration;
    }
    return phases.size() - 1;
}

SignalSchedule static_schedule()
{
    SignalSchedule s;
    s.mode = TlsMode::Static;
    s.phases = {
        {84.0, {Approach::North, Approach::South}, {Approach::West, Approach::East}},
        {3.0, {}, {}},
        {50.0, {Approach::East, Approach::West}, {Approach::North, Approach::South}},
        {3.0, {}, {}},
    };
    return s;
}

bool walk_conflicts(const Phase& phase) noexcept
{
    for (CrosswalkId c : phase.walk_crosswalks)
        for (Approach a : phase.green_approaches)
            if (c == a || c == opposite(a))
                return true;
    return false;
}

void check_schedule_safety(const SignalSchedule& schedule)
{
    for (std::size_t k = 0; k < schedule.phases.size(); ++k)
        if (walk_conflicts(schedule.phases[k]))
            throw InternalError("phase " + std::to_string(k + 1) +
                                " grants walk across a green through movement");
}

double dynamic_green(int queue_length, double discharge_headway, double startup_lost_time,
                     GreenBounds bounds)
{
    if (queue_length < 0)
        throw std::invalid_argument("queue length must be >= 0");
    const double need = queue_length * discharge_headway + startup_lost_time;
    return std::clamp(need, bounds.min_green, bounds.max_green);
}

void DemandProfile::validate() const
{
    for (double r : vehicle_rate)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw ValidationError("vehicle_rate", "must be >= 0");
    for (double r : pedestrian_rate)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw ValidationError("pedestrian_rate", "must be >= 0");
    if (!(turning.left >= 0.0 && turning.through >= 0.0 && turning.right >= 0.0))
        throw ValidationError("turning", "fractions must be >= 0");
    if (!(turning.left + turning.through + turning.right > 0.0))
        throw ValidationError("turning", "fractions must not all be zero");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("horizon", "must be > 0");
    pedestrian_type.validate();
}

DemandProfile uniform_demand(double vehicles_per_hour, double pedestrians_per_hour,
                             TurningFractions turning, double horizon)
{
    DemandProfile d;
    d.vehicle_rate.fill(vehicles_per_hour / 4.0);
    d.pedestrian_rate.fill(pedestrians_per_hour / 4.0);
    d.turning = turning;
    d.horizon = horizon;
    return d;
}

DemandProfile field_replay_demand()
{
    constexpr double per_hour = 3600.0 / kDefaultHorizon;
    return uniform_demand(990.0 * per_hour, 522.0 * per_hour, {0.2, 0.6, 0.2}, kDefaultHorizon);
}

std::vector<SyntheticLevel> synthetic_levels()
{
    constexpr double v[] = {600.0, 900.0, 1200.0, 1500.0};
    constexpr double p[] = {300.0, 600.0, 900.0, 1000.0, 2000.0};
    return {
        {"a", v[0], p[0]}, {"b", v[0], p[1]}, {"c", v[1], p[2]},
        {"d", v[2], p[3]}, {"e", v[3], p[3]}, {"f", v[3], p[4]},
    };
}

void ControllerParams::validate() const
{
    if (!(green.min_green > 0.0) || !(green.max_green >= green.min_green))
        throw ValidationError("min_green", "need 0 < min_green <= max_green");
    if (!(min_walk > 0.0) || !(max_walk >= min_walk))
        throw ValidationError("min_walk", "need 0 < min_walk <= max_walk");
    if (!(safety_margin >= 0.0))
        throw ValidationError("safety_margin", "must be >= 0");
    if (estimator_runs < 1)
        throw ValidationError("estimator_runs", "must be >= 1");
    if (!(saturation_headway > 0.0))
        throw ValidationError("saturation_headway", "must be > 0");
    if (!(startup_lost_time >= 0.0))
        throw ValidationError("startup_lost_time", "must be >= 0");
    if (!(yellow > 0.0))
        throw ValidationError("yellow", "must be > 0");
    if (fixed_walk && !(*fixed_walk > 0.0))
        throw ValidationError("fixed_walk", "must be > 0");
    if (!(drain_limit >= 0.0))
        throw ValidationError("drain_limit", "must be >= 0");
}

CrosswalkLayout IntersectionGeometry::layout(CrosswalkId c) const
{
    const bool ew = c == CrosswalkId::East || c == CrosswalkId::West;
    return CrosswalkLayout(beta, ew ? ew_crosswalk_width : ns_crosswalk_width,
                           ew ? ew_crosswalk_length : ns_crosswalk_length, buffer);
}

void TlsConfig::validate() const
{
    demand.validate();
    controller.validate();
    engine.validate();
    for (CrosswalkId c : kApproaches)
        (void)geometry.layout(c);
}

double pedestrian_phase_duration(const Scenario& cohort, TlsMode mode,
                                 const ControllerParams& params, double static_walk)
{
    switch (mode) {
    case TlsMode::Static:
        return static_walk;
    case TlsMode::Dynamic:
        return fixed_walk_for(params, cohort.layout);
    case TlsMode::DynamicWithPcs:
        break;
    }
    if (cohort.pedestrian_count() == 0)
        return params.min_walk;
    return walk_from_estimate(estimate_crossing_time(cohort, params.estimator_runs), params);
}

double walk_from_estimate(const CrossingEstimate& est, const ControllerParams& params)
{
    if (!est.all_completed)
        return params.max_walk;
    return std::clamp(est.mean + params.safety_margin, params.min_walk, params.max_walk);
}

IntersectionMetrics simulate_intersection(const TlsConfig& config, std::uint64_t seed)
{
    config.validate();
    const ControllerParams& ctl = config.controller;
    const DemandProfile& demand = config.demand;
    const SignalSchedule plan = static_schedule();

    Rng vehicle_rng(derive_seed(seed, kVehicleStream));
    Rng pedestrian_rng(derive_seed(seed, kPedestrianStream));
    const std::vector<Vehicle> vehicles = vehicle_arrivals(demand, vehicle_rng);
    const auto peds = pedestrian_arrivals(demand, pedestrian_rng);

    IntersectionMetrics m;
    m.mode = config.mode;
    m.seed = seed;
    m.vehicles_arrived = static_cast<int>(vehicles.size());
    for (const auto& list : peds)
        m.pedestrians_arrived += static_cast<int>(list.size());

    std::array<std::array<Lane, kLanes>, 4> lanes{};
    std::array<Occupancy, 4> occupied{};
    std::array<std::size_t, 4> next_ped{};
    std::size_t next_vehicle = 0;
    std::uint64_t cohort_counter = 0;

    const auto queued_vehicles = [&] {
        std::size_t n = 0;
        for (const auto& approach : lanes)
            for (const auto& lane : approach)
                n += lane.queue.size();
        return n;
    };
    const auto pending = [&](double t) {
        if (next_vehicle < vehicles.size() || queued_vehicles() > 0)
            return true;
        for (CrosswalkId c : kApproaches)
            if (next_ped[index(c)] < peds[index(c)].size() || occupied[index(c)].until > t)
                return true;
        return false;
    };

    const auto admit = [&](double now) {
        while (next_vehicle < vehicles.size() && vehicles[next_vehicle].arrival <= now) {
            const Vehicle& v = vehicles[next_vehicle++];
            auto& approach = lanes[index(v.approach)];
            approach[choose_lane(approach, v.turn)].queue.push_back(v);
        }
    };

    double t = 0.0;
    for (std::size_t k = 0;; k = (k + 1) % plan.phases.size()) {
        if (t >= demand.horizon && (!pending(t) || t >= demand.horizon + ctl.drain_limit))
            break;
        if (k == 0)
            ++m.cycles;
        Phase phase = plan.phases[k];

        admit(t);

        // Cohorts waiting at phase onset; later arrivals wait for the next walk.
        std::vector<std::pair<CrosswalkId, Scenario>> cohorts;
        std::array<double, 4> expected_block{};
        std::vector<std::vector<WaitingPed>> members;
        double walk = 0.0;
        for (CrosswalkId c : phase.walk_crosswalks) {
            const auto& list = peds[index(c)];
            std::vector<WaitingPed> group;
            while (next_ped[index(c)] < list.size() && list[next_ped[index(c)]].arrival <= t)
                group.push_back(list[next_ped[index(c)]++]);
            std::stable_partition(group.begin(), group.end(),
                                  [](const WaitingPed& p) { return p.side == Side::Left; });

            Scenario sc;
            sc.layout = config.geometry.layout(c);
            sc.engine = config.engine;
            sc.engine.seed = derive_seed(seed ^ kCohortStream, cohort_counter++);
            for (Side side : {Side::Left, Side::Right}) {
                Cohort cohort;
                cohort.side = side;
                cohort.type = demand.pedestrian_type;
                for (const auto& p : group)
                    if (p.side == side)
                        cohort.base_speeds.push_back(p.base_speed);
                cohort.count = static_cast<int>(cohort.base_speeds.size());
                if (cohort.count > 0)
                    sc.cohorts.push_back(std::move(cohort));
            }
            if (config.mode == TlsMode::DynamicWithPcs && sc.pedestrian_count() > 0) {
                const CrossingEstimate est = estimate_crossing_time(sc, ctl.estimator_runs);
                walk = std::max(walk, walk_from_estimate(est, ctl));
                expected_block[index(c)] = est.all_completed ? est.mean : ctl.max_walk;
            } else {
                const double w = pedestrian_phase_duration(sc, config.mode, ctl, phase.duration);
                walk = std::max(walk, w);
                if (sc.pedestrian_count() > 0)
                    expected_block[index(c)] = w;
            }
            cohorts.emplace_back(c, std::move(sc));
            members.push_back(std::move(group));
        }

        if (config.mode != TlsMode::Static) {
            if (phase.green_approaches.empty()) {
                phase.duration = ctl.yellow;
            } else {
                // Turning lanes cannot start until the crosswalk they yield to
                // clears: the fixed-walk mode assumes its walk, the other mode
                // its estimate.
                double green = ctl.green.min_green;
                for (Approach a : phase.green_approaches) {
                    for (const auto& lane : lanes[index(a)]) {
                        double blocked = 0.0;
                        for (const Vehicle& v : lane.queue)
                            if (const auto cw = yield_crosswalk({a, v.turn}))
                                blocked = std::max(blocked, expected_block[index(*cw)]);
                        const double lost = std::max(0.0, blocked - ctl.startup_lost_time);
                        green = std::max(green, lost + dynamic_green(static_cast<int>(lane.queue.size()),
                                                                     ctl.saturation_headway,
                                                                     ctl.startup_lost_time, ctl.green));
                    }
                }
                green = std::min(green, ctl.green.max_green);
                phase.duration = std::ceil(std::max(green, walk));
            }
        }
        if (walk_conflicts(phase))
            throw InternalError("phase grants walk across a green through movement");

        for (std::size_t j = 0; j < cohorts.size(); ++j) {
            const auto& [c, sc] = cohorts[j];
            const auto& group = members[j];
            for (const auto& p : group) {
                m.samples.push_back({WaitSample::Kind::Pedestrian, p.id, c, p.arrival, t, true});
                ++m.pedestrians_released;
            }
            if (group.empty())
                continue;
            const RunSummary run_summary = run(sc, false).summary;
            for (const auto& time : run_summary.per_ped_crossing_time)
                if (!time || *time > phase.duration)
                    ++m.stranded_pedestrians;
            occupied[index(c)] = {t, t + run_summary.cohort_crossing_time};
        }

        const double start = t;
        const double end = t + phase.duration;
        for (; t < end; t += 1.0) {
            admit(t);
            if (t < start + ctl.startup_lost_time)
                continue;
            for (Approach a : phase.green_approaches) {
                for (Lane& lane : lanes[index(a)]) {
                    if (lane.queue.empty() || t < lane.next_ready)
                        continue;
                    const Vehicle& head = lane.queue.front();
                    if (const auto cw = yield_crosswalk({a, head.turn});
                        cw && occupied[index(*cw)].active(t))
                        continue;
                    m.samples.push_back({WaitSample::Kind::Vehicle, head.id, a, head.arrival, t, true});
                    ++m.vehicles_discharged;
                    lane.queue.pop_front();
                    lane.next_ready = t + ctl.saturation_headway;
                }
            }
        }
        t = end;
        m.phase_log.push_back(phase);
    }
    m.end_time = t;

    for (const auto& approach : lanes)
        for (const auto& lane : approach)
            for (const auto& v : lane.queue) {
                m.samples.push_back({WaitSample::Kind::Vehicle, v.id, v.approach, v.arrival, t, false});
                ++m.vehicles_queued;
            }
    for (; next_vehicle < vehicles.size(); ++next_vehicle) {
        const Vehicle& v = vehicles[next_vehicle];
        m.samples.push_back({WaitSample::Kind::Vehicle, v.id, v.approach, v.arrival,
                             std::max(t, v.arrival), false});
        ++m.vehicles_queued;
    }
    for (CrosswalkId c : kApproaches)
        for (std::size_t k = next_ped[index(c)]; k < peds[index(c)].size(); ++k) {
            const WaitingPed& p = peds[index(c)][k];
            m.samples.push_back({WaitSample::Kind::Pedestrian, p.id, c, p.arrival,
                                 std::max(t, p.arrival), false});
            ++m.pedestrians_queued;
        }

    double vsum = 0.0;
    double psum = 0.0;
    for (const auto& s : m.samples) {
        if (s.kind == WaitSample::Kind::Vehicle) {
            vsum += s.wait();
            m.vehicle_max_wait = std::max(m.vehicle_max_wait, s.wait());
        } else {
            psum += s.wait();
            m.pedestrian_max_wait = std::max(m.pedestrian_max_wait, s.wait());
        }
    }
    if (m.vehicles_arrived > 0)
        m.vehicle_awt = vsum / m.vehicles_arrived;
    if (m.pedestrians_arrived > 0)
        m.pedestrian_awt = psum / m.pedestrians_arrived;
    return m;
}

std::vector<ModeStats> compare_modes(const TlsConfig& base, std::span<const TlsMode> modes,
                                     std::span<const std::uint64_t> seeds, unsigned workers)
{
    if (seeds.empty())
        throw ValidationError("seeds", "need at least one seed");
    const std::size_t jobs = modes.size() * seeds.size();
    std::vector<IntersectionMetrics> results(jobs);
    const auto work = [&](std::size_t lane, std::size_t lanes) {
        for (std::size_t j = lane; j < jobs; j += lanes) {
            TlsConfig cfg = base;
            cfg.mode = modes[j / seeds.size()];
            IntersectionMetrics r = simulate_intersection(cfg, seeds[j % seeds.size()]);
            r.samples.clear();
            r.samples.shrink_to_fit();
            results[j] = std::move(r);
        }
    };
    const std::size_t lanes = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs, 1));
    if (lanes == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t lane = 0; lane < lanes; ++lane)
            pool.emplace_back(work, lane, lanes);
    }

    const auto mean_sd = [](const std::vector<double>& xs) {
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs)
            ss += (x - mean) * (x - mean);
        const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
        return std::pair{mean, sd};
    };

    std::vector<ModeStats> out;
    for (std::size_t mi = 0; mi < modes.size(); ++mi) {
        ModeStats s;
        s.mode = modes[mi];
        s.runs = static_cast<int>(seeds.size());
        std::vector<double> v;
        std::vector<double> p;
        double vmax = 0.0;
        double pmax = 0.0;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            const auto& r = results[mi * seeds.size() + si];
            v.push_back(r.vehicle_awt);
            p.push_back(r.pedestrian_awt);
            vmax += r.vehicle_max_wait;
            pmax += r.pedestrian_max_wait;
            s.stranded_pedestrians += r.stranded_pedestrians;
            s.max_stranded_per_run = std::max(s.max_stranded_per_run, r.stranded_pedestrians);
        }
        std::tie(s.vehicle_awt, s.vehicle_awt_sd) = mean_sd(v);
        std::tie(s.pedestrian_awt, s.pedestrian_awt_sd) = mean_sd(p);
        s.vehicle_max_wait = vmax / static_cast<double>(seeds.size());
        s.pedestrian_max_wait = pmax / static_cast<double>(seeds.size());
        out.push_back(s);
    }
    return out;
}

void write_wait_samples_csv(std::ostream& out, const IntersectionMetrics& metrics)
{
    out << "kind,id,location,arrival_s,release_s,wait_s,served\n";
    char buf[160];
    for (const auto& s : metrics.samples) {
        std::snprintf(buf, sizeof buf, "%s,%d,%s,%.6f,%.6f,%.6f,%d\n",
                      s.kind == WaitSample::Kind::Vehicle ? "vehicle" : "pedestrian", s.id,
                      std::string(to_string(s.where)).c_str(), s.arrival, s.release, s.wait(),
                      s.served ? 1 : 0);
        out << buf;
    }
}

} // namespace pcs
