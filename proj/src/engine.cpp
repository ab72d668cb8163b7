#include "pcs/engine.hpp"

#include "pcs/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace pcs {

namespace {

// Reductions tried in order: 0, inc, 2 inc, ..., always ending at 100.
template <typename Fn>
auto for_each_reduction(int increment, Fn&& fn) -> decltype(fn(0))
{
    for (int i = 0;; i = std::min(100, i + increment)) {
        if (auto result = fn(i))
            return result;
        if (i == 100)
            return {};
    }
}

bool is_live(const Pedestrian& p) noexcept { return p.state != PedState::Done; }

bool on_crosswalk(const CrosswalkLayout& layout, const Pedestrian& p) noexcept
{
    return progress_of(p.side, p.position) >= progress_of(p.side, {layout.start_curb(p.side), 0.0});
}

} // namespace

void EngineConfig::validate() const
{
    if (!(step_len > 0.0) || !std::isfinite(step_len))
        throw ValidationError("step_len", "must be > 0");
    if (max_steps <= 0)
        throw ValidationError("max_steps", "must be > 0");
    if (i_increment < 1 || i_increment > 100)
        throw ValidationError("i_increment", "must be in [1, 100]");
    if (stuck_threshold < 1)
        throw ValidationError("stuck_threshold", "must be >= 1");
}

int Scenario::pedestrian_count() const noexcept
{
    int n = 0;
    for (const auto& c : cohorts)
        n += c.count;
    return n;
}

void Scenario::validate() const
{
    engine.validate();
    for (const auto& c : cohorts) {
        if (c.count < 0)
            throw ValidationError("count", "must be >= 0");
        c.type.validate();
        if (!c.positions.empty() && static_cast<int>(c.positions.size()) != c.count)
            throw ValidationError("positions", "must list exactly `count` points");
        if (!c.base_speeds.empty() && static_cast<int>(c.base_speeds.size()) != c.count)
            throw ValidationError("base_speeds", "must list exactly `count` speeds");
        for (double v : c.base_speeds)
            if (!(v > 0.0))
                throw ValidationError("base_speeds", "speeds must be > 0");
        if (c.placement.kind == PlacementKind::Poisson && !(c.placement.poisson_lambda > 0.0))
            throw ValidationError("poisson_lambda", "must be > 0");
        if (c.placement.kind == PlacementKind::T && !(c.placement.t_dof > 2.0))
            throw ValidationError("t_dof", "must be > 2 for a finite variance");
    }
}

std::optional<Move> try_move(const Pedestrian& self, std::span<const Pedestrian* const> neighbors,
                             const CrosswalkLayout& layout, const EngineConfig& config,
                             MoveMode mode)
{
    const Point old = self.position;
    const Point forward = forward_of(self.side);
    std::vector<AngleInterval> arcs;

    return for_each_reduction(config.i_increment, [&](int i) -> std::optional<Move> {
        const double reach =
            effective_speed(self.type, self.base_speed, i, config.ceiling) * config.step_len;
        if (!(reach > 0.0))
            return std::nullopt;
        const double radius = effective_radius(self.type, i);

        arcs.clear();
        for (const Pedestrian* other : neighbors) {
            const double clearance = radius + effective_radius(*other);
            if (distance(old, other->position) > reach + clearance)
                continue;
            for (const auto& a : exclusion_interval(old, reach, forward, other->position, clearance))
                arcs.push_back(a);
        }
        for (const auto& a :
             half_plane_exclusion(old, reach, forward, {0.0, 1.0}, layout.upper_edge()))
            arcs.push_back(a);
        for (const auto& a :
             half_plane_exclusion(old, reach, forward, {0.0, -1.0}, -layout.lower_edge()))
            arcs.push_back(a);

        const ExclusionSet excluded = ExclusionSet::union_of(arcs);
        const auto theta =
            mode == MoveMode::Forward ? best_angle(excluded) : lowest_free_angle(excluded, 0.0);
        if (!theta)
            return std::nullopt;
        return Move{candidate_position(old, reach, forward, *theta), i};
    });
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run_index) noexcept
{
    std::uint64_t z = seed + (run_index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<Pedestrian> populate(const Scenario& scenario)
{
    scenario.validate();
    const CrosswalkLayout& layout = scenario.layout;
    Rng rng(scenario.engine.seed);

    std::vector<Pedestrian> peds;
    std::vector<Circle> placed_left;
    std::vector<Circle> placed_right;

    for (const Cohort& cohort : scenario.cohorts) {
        auto& placed = cohort.side == Side::Left ? placed_left : placed_right;
        std::vector<Point> positions;
        if (!cohort.positions.empty()) {
            for (Point p : cohort.positions) {
                p = clamp_to_waiting_side(layout, cohort.side, p);
                for (const Circle& c : placed)
                    if (distance(p, c.center) < c.radius + cohort.type.min_radius - kDistanceTolerance)
                        throw ValidationError("positions", "explicit standing positions overlap");
                placed.push_back({p, cohort.type.min_radius});
                positions.push_back(p);
            }
        } else {
            const std::vector<double> radii(static_cast<std::size_t>(cohort.count),
                                            cohort.type.min_radius);
            positions = sample_initial_positions(layout, cohort.side, radii, cohort.placement, rng,
                                                 placed);
            for (Point p : positions)
                placed.push_back({p, cohort.type.min_radius});
        }

        for (int k = 0; k < cohort.count; ++k) {
            Pedestrian ped;
            ped.id = static_cast<int>(peds.size());
            ped.type = cohort.type;
            ped.side = cohort.side;
            ped.position = positions[static_cast<std::size_t>(k)];
            ped.base_speed = cohort.base_speeds.empty()
                                 ? sample_base_speed(cohort.type, rng)
                                 : cohort.base_speeds[static_cast<std::size_t>(k)];
            ped.state = in_lateral_band(layout, ped.position) ? PedState::Waiting
                                                              : PedState::ReEntering;
            peds.push_back(std::move(ped));
        }
    }
    return peds;
}

Simulation::Simulation(const Scenario& scenario, bool record_trace)
    : Simulation(scenario.layout, scenario.engine, populate(scenario), record_trace)
{
}

Simulation::Simulation(const CrosswalkLayout& layout, const EngineConfig& config,
                       std::vector<Pedestrian> pedestrians, bool record_trace)
    : layout_(layout), config_(config), peds_(std::move(pedestrians)),
      step_speed_(peds_.size(), 0.0), record_trace_(record_trace)
{
    config_.validate();
    for (std::size_t k = 0; k < peds_.size(); ++k) {
        if (peds_[k].id != static_cast<int>(k))
            throw std::invalid_argument("pedestrian ids must equal their index");
        max_radius_ = std::max(max_radius_, peds_[k].type.max_radius);
    }
    double cell = 0.0;
    for (const auto& p : peds_)
        cell = std::max(cell, effective_speed(p.type, p.base_speed, 0, config_.ceiling) *
                                  config_.step_len);
    grid_ = SpatialGrid(cell + 2.0 * max_radius_ + kDistanceTolerance);
    for (const auto& p : peds_)
        if (is_live(p))
            grid_.insert(p.id, p.position);
    check_invariants();
    std::vector<int> ids;
    for (const auto& p : peds_)
        if (is_live(p))
            ids.push_back(p.id);
    record(0, ids);
}

bool Simulation::finished() const noexcept
{
    return std::none_of(peds_.begin(), peds_.end(), is_live);
}

std::vector<const Pedestrian*> Simulation::neighbors_of(const Pedestrian& ped, double reach) const
{
    std::vector<int> ids = grid_.candidates(ped.position, reach);
    std::sort(ids.begin(), ids.end());
    std::vector<const Pedestrian*> out;
    for (int id : ids) {
        const auto& other = peds_[static_cast<std::size_t>(id)];
        if (other.id != ped.id && distance(other.position, ped.position) <= reach)
            out.push_back(&other);
    }
    return out;
}

void Simulation::act(Pedestrian& ped)
{
    ++agent_steps_;
    const double top_speed = effective_speed(ped.type, ped.base_speed, 0, config_.ceiling);
    const double reach = top_speed * config_.step_len + ped.type.max_radius + max_radius_;
    const auto neighbors = neighbors_of(ped, reach);

    PedState action = PedState::Crossing;
    std::optional<Move> move;
    if (!in_lateral_band(layout_, ped.position)) {
        action = PedState::ReEntering;
        move = for_each_reduction(config_.i_increment, [&](int i) -> std::optional<Move> {
            const double speed = effective_speed(ped.type, ped.base_speed, i, config_.ceiling);
            if (!(speed > 0.0))
                return std::nullopt;
            const Point target = reentry_step(layout_, ped.position, speed, config_.step_len);
            const double radius = effective_radius(ped.type, i);
            for (const Pedestrian* other : neighbors)
                if (distance(target, other->position) < radius + effective_radius(*other))
                    return std::nullopt;
            return Move{target, i};
        });
    } else if (ped.stuck_count >= config_.stuck_threshold) {
        action = PedState::StuckTilting;
        move = try_move(ped, neighbors, layout_, config_, MoveMode::TiltRight);
        if (move)
            ++stuck_tilts_;
        else
            move = try_move(ped, neighbors, layout_, config_, MoveMode::Forward);
    } else {
        move = try_move(ped, neighbors, layout_, config_, MoveMode::Forward);
    }

    auto& speed = step_speed_[static_cast<std::size_t>(ped.id)];
    if (move) {
        grid_.move(ped.id, ped.position, move->position);
        ped.position = move->position;
        ped.reduction_i = move->reduction_i;
        ped.moving = true;
        ped.stuck_count = 0;
        speed = effective_speed(ped, config_.ceiling);
    } else {
        ped.moving = false;
        ++ped.stuck_count;
        ++no_move_steps_;
        speed = 0.0;
    }

    if (has_crossed(layout_, ped.position, ped.side)) {
        ped.state = PedState::Done;
        ped.crossing_end_step = step_;
        grid_.erase(ped.id, ped.position);
    } else if (action == PedState::ReEntering || action == PedState::StuckTilting) {
        ped.state = action;
    } else {
        ped.state = on_crosswalk(layout_, ped) ? PedState::Crossing : PedState::Waiting;
    }
}

void Simulation::step()
{
    ++step_;
    std::vector<int> left;
    std::vector<int> right;
    for (const auto& p : peds_) {
        if (!is_live(p))
            continue;
        (p.side == Side::Left ? left : right).push_back(p.id);
    }
    // Farthest from the starting curb moves first.
    const auto by_progress = [this](int a, int b) {
        const auto& pa = peds_[static_cast<std::size_t>(a)];
        const auto& pb = peds_[static_cast<std::size_t>(b)];
        const double qa = progress_of(pa.side, pa.position);
        const double qb = progress_of(pb.side, pb.position);
        return qa > qb || (qa == qb && a < b);
    };
    std::sort(left.begin(), left.end(), by_progress);
    std::sort(right.begin(), right.end(), by_progress);

    const bool left_first = config_.order == DirectionOrder::LeftFirst ||
                            (config_.order == DirectionOrder::Alternate && step_ % 2 == 0);
    for (const auto* group : left_first ? std::array{&left, &right} : std::array{&right, &left})
        for (int id : *group)
            act(peds_[static_cast<std::size_t>(id)]);

    check_invariants();

    std::vector<int> ids = left;
    ids.insert(ids.end(), right.begin(), right.end());
    std::sort(ids.begin(), ids.end());
    record(step_, ids);
}

void Simulation::record(int step, const std::vector<int>& ids)
{
    if (!record_trace_)
        return;
    for (int id : ids) {
        const auto& p = peds_[static_cast<std::size_t>(id)];
        trace_.push_back({step, id, p.position.x, p.position.y,
                          step_speed_[static_cast<std::size_t>(id)], effective_radius(p), p.state});
    }
}

void Simulation::check_invariants() const
{
    std::ostringstream problems;
    for (std::size_t a = 0; a < peds_.size(); ++a) {
        const auto& pa = peds_[a];
        if (!is_live(pa))
            continue;
        if (pa.state == PedState::Crossing && !in_motion_area(layout_, pa.position))
            problems << "ped " << pa.id << " left the motion area at (" << pa.position.x << ", "
                     << pa.position.y << ")\n";
        for (std::size_t b = a + 1; b < peds_.size(); ++b) {
            const auto& pb = peds_[b];
            if (!is_live(pb))
                continue;
            const double gap = distance(pa.position, pb.position) -
                               (effective_radius(pa) + effective_radius(pb));
            if (gap < -kDistanceTolerance)
                problems << "peds " << pa.id << " and " << pb.id << " overlap by " << -gap << "\n";
        }
    }
    const std::string report = problems.str();
    if (report.empty())
        return;

    std::ostringstream dump;
    dump << "invariant breach after step " << step_ << ":\n" << report << "state:\n";
    for (const auto& p : peds_)
        dump << "  " << p.id << " " << to_string(p.state) << " (" << p.position.x << ", "
             << p.position.y << ") r=" << effective_radius(p) << "\n";
    throw InternalError(dump.str());
}

RunSummary Simulation::summary() const
{
    RunSummary s;
    s.seed = config_.seed;
    s.pedestrians = static_cast<int>(peds_.size());
    s.steps = step_;
    s.completed = finished();
    s.agent_steps = agent_steps_;
    s.no_move_steps = no_move_steps_;
    s.no_move_fraction =
        agent_steps_ == 0 ? 0.0 : static_cast<double>(no_move_steps_) / static_cast<double>(agent_steps_);
    s.stuck_tilt_events = stuck_tilts_;

    int last = 0;
    for (const auto& p : peds_) {
        if (p.crossing_end_step) {
            last = std::max(last, *p.crossing_end_step);
            s.per_ped_crossing_time.emplace_back((*p.crossing_end_step - p.crossing_start_step) *
                                                 config_.step_len);
        } else {
            s.per_ped_crossing_time.emplace_back(std::nullopt);
        }
    }
    s.cohort_crossing_time = (s.completed ? last : step_) * config_.step_len;
    return s;
}

RunResult Simulation::run() &&
{
    while (!finished() && step_ < config_.max_steps)
        step();
    RunSummary s = summary();
    return {std::move(trace_), std::move(s)};
}

RunResult run(const Scenario& scenario, bool record_trace)
{
    return Simulation(scenario, record_trace).run();
}

CrossingEstimate estimate_crossing_time(const Scenario& scenario, int runs, unsigned workers)
{
    if (runs < 1)
        throw ValidationError("runs", "must be >= 1");
    scenario.validate();

    std::vector<RunSummary> results(static_cast<std::size_t>(runs));
    const auto work = [&](unsigned lane, unsigned lanes) {
        for (auto k = static_cast<std::size_t>(lane); k < results.size(); k += lanes) {
            Scenario replica = scenario;
            replica.engine.seed = derive_seed(scenario.engine.seed, k);
            results[k] = run(replica, false).summary;
        }
    };

    const unsigned lanes = std::clamp(workers, 1U, static_cast<unsigned>(runs));
    if (lanes == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned lane = 0; lane < lanes; ++lane)
            pool.emplace_back(work, lane, lanes);
    }

    CrossingEstimate est;
    double total = 0.0;
    for (const auto& s : results) {
        est.per_run.push_back(s.cohort_crossing_time);
        est.all_completed = est.all_completed && s.completed;
        total += s.cohort_crossing_time;
    }
    est.mean = total / static_cast<double>(runs);
    return est;
}

} // namespace pcs
