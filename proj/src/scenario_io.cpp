#include "pcs/scenario_io.hpp"

#include "pcs/errors.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace pcs {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Quantities with units

enum class Dim { Length, Time, Speed, Rate, Count };

struct UnitEntry {
    std::string_view name;
    double scale;
};

constexpr std::array kLengthUnits{UnitEntry{"m", 1.0}, UnitEntry{"cm", 0.01}, UnitEntry{"km", 1000.0}};
constexpr std::array kTimeUnits{UnitEntry{"s", 1.0}, UnitEntry{"ms", 0.001}, UnitEntry{"min", 60.0},
                                UnitEntry{"h", 3600.0}};
constexpr std::array kSpeedUnits{UnitEntry{"m/s", 1.0}, UnitEntry{"km/h", 1.0 / 3.6}};
constexpr std::array kRateUnits{UnitEntry{"/h", 1.0},     UnitEntry{"veh/h", 1.0},
                                UnitEntry{"ped/h", 1.0},  UnitEntry{"/s", 3600.0},
                                UnitEntry{"veh/s", 3600.0}, UnitEntry{"ped/s", 3600.0}};

std::string_view dim_name(Dim d)
{
    switch (d) {
    case Dim::Length: return "a length in m";
    case Dim::Time: return "a duration in s";
    case Dim::Speed: return "a speed in m/s";
    case Dim::Rate: return "a rate per hour";
    case Dim::Count: return "a plain number";
    }
    return "a number";
}

std::span<const UnitEntry> units_of(Dim d)
{
    switch (d) {
    case Dim::Length: return kLengthUnits;
    case Dim::Time: return kTimeUnits;
    case Dim::Speed: return kSpeedUnits;
    case Dim::Rate: return kRateUnits;
    case Dim::Count: return {};
    }
    return {};
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::optional<int> line_of(const YAML::Node& n)
{
    const YAML::Mark mark = n.Mark();
    if (mark.is_null())
        return std::nullopt;
    return mark.line + 1;
}

[[noreturn]] void fail(const YAML::Node& n, const std::string& key, const std::string& message)
{
    throw ValidationError(key, message, line_of(n));
}

std::string scalar_of(const YAML::Node& n, const std::string& key)
{
    if (!n.IsScalar())
        fail(n, key, "expected a scalar value");
    return n.Scalar();
}

double quantity(const YAML::Node& n, const std::string& key, Dim dim)
{
    const std::string text = scalar_of(n, key);
    const std::string_view body = trim(text);
    double value = 0.0;
    const char* first = body.data();
    const char* last = body.data() + body.size();
    if (!body.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first)
        fail(n, key, "expected " + std::string(dim_name(dim)) + ", got '" + text + "'");
    if (!std::isfinite(value))
        fail(n, key, "must be finite");
    const std::string_view unit = trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
    if (unit.empty())
        return value;
    for (const auto& u : units_of(dim))
        if (u.name == unit)
            return value * u.scale;
    fail(n, key, "expected " + std::string(dim_name(dim)) + ", got unit '" + std::string(unit) + "'");
}

double positive(const YAML::Node& n, const std::string& key, Dim dim)
{
    const double v = quantity(n, key, dim);
    if (!(v > 0.0))
        fail(n, key, "must be > 0, got " + scalar_of(n, key));
    return v;
}

double non_negative(const YAML::Node& n, const std::string& key, Dim dim)
{
    const double v = quantity(n, key, dim);
    if (!(v >= 0.0))
        fail(n, key, "must be >= 0, got " + scalar_of(n, key));
    return v;
}

template <typename Int>
Int integer(const YAML::Node& n, const std::string& key, Int lo)
{
    const std::string text = scalar_of(n, key);
    const std::string_view body = trim(text);
    Int value{};
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size())
        fail(n, key, "expected an integer, got '" + text + "'");
    if (value < lo)
        fail(n, key, "must be >= " + std::to_string(lo) + ", got " + text);
    return value;
}

void require_map(const YAML::Node& n, const std::string& key)
{
    if (!n.IsMap())
        fail(n, key, "expected a mapping");
}

void check_keys(const YAML::Node& map, const std::string& section,
                std::initializer_list<std::string_view> allowed)
{
    require_map(map, section);
    for (auto it = map.begin(); it != map.end(); ++it) {
        const std::string k = it->first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            fail(it->first, section.empty() ? k : section + "." + k, "unknown key");
    }
}

std::string join(const std::string& section, std::string_view key)
{
    return section.empty() ? std::string(key) : section + "." + std::string(key);
}

// ---------------------------------------------------------------------------
// Enumerations

Side parse_side(const YAML::Node& n, const std::string& key)
{
    const std::string s = scalar_of(n, key);
    if (s == "left")
        return Side::Left;
    if (s == "right")
        return Side::Right;
    fail(n, key, "expected 'left' or 'right', got '" + s + "'");
}

DirectionOrder parse_order(const YAML::Node& n, const std::string& key)
{
    const std::string s = scalar_of(n, key);
    if (s == "alternate")
        return DirectionOrder::Alternate;
    if (s == "left_first")
        return DirectionOrder::LeftFirst;
    if (s == "right_first")
        return DirectionOrder::RightFirst;
    fail(n, key, "expected alternate, left_first or right_first, got '" + s + "'");
}

std::string_view to_string(DirectionOrder o)
{
    switch (o) {
    case DirectionOrder::Alternate: return "alternate";
    case DirectionOrder::LeftFirst: return "left_first";
    case DirectionOrder::RightFirst: return "right_first";
    }
    return "alternate";
}

SpeedCeiling parse_ceiling(const YAML::Node& n, const std::string& key)
{
    const std::string s = scalar_of(n, key);
    if (s == "base_speed")
        return SpeedCeiling::BaseSpeed;
    if (s == "type_max")
        return SpeedCeiling::TypeMax;
    fail(n, key, "expected base_speed or type_max, got '" + s + "'");
}

std::string_view to_string(SpeedCeiling c)
{
    return c == SpeedCeiling::BaseSpeed ? "base_speed" : "type_max";
}

PedestrianKind parse_kind(const YAML::Node& n, const std::string& key)
{
    const std::string s = scalar_of(n, key);
    if (const auto k = parse_pedestrian_kind(s))
        return *k;
    fail(n, key, "unknown pedestrian type '" + s + "'");
}

PlacementKind parse_placement_kind(const YAML::Node& n, const std::string& key)
{
    const std::string s = scalar_of(n, key);
    if (s == "normal")
        return PlacementKind::Normal;
    if (s == "poisson")
        return PlacementKind::Poisson;
    if (s == "t")
        return PlacementKind::T;
    fail(n, key, "expected normal, poisson or t, got '" + s + "'");
}

// ---------------------------------------------------------------------------
// Pedestrian types

using TypeTable = std::map<PedestrianKind, PedestrianType>;

TypeTable default_table()
{
    TypeTable t;
    for (PedestrianKind k : {PedestrianKind::HealthyAdult, PedestrianKind::Elder, PedestrianKind::Child,
                             PedestrianKind::CrutchesUser, PedestrianKind::WheelchairUser})
        t.emplace(k, default_type(k));
    return t;
}

void apply_speeds(const YAML::Node& n, const std::string& section, PedestrianType& type)
{
    check_keys(n, section, {"preset", "mu", "sigma", "max", "min"});
    if (const auto preset = n["preset"]) {
        if (n["mu"] || n["sigma"] || n["max"] || n["min"])
            fail(n, section, "preset cannot be combined with explicit speeds");
        const std::string name = scalar_of(preset, join(section, "preset"));
        const PedestrianKind kind = type.kind;
        if (name == "field_adult") {
            type = field_adult_type();
        } else if (const auto k = parse_pedestrian_kind(name)) {
            const PedestrianType base = default_type(*k);
            type.mu_speed = base.mu_speed;
            type.sigma_speed = base.sigma_speed;
            type.max_speed = base.max_speed;
            type.min_speed = base.min_speed;
        } else {
            fail(preset, join(section, "preset"), "unknown speed preset '" + name + "'");
        }
        type.kind = kind;
        return;
    }

    const bool has_mu = static_cast<bool>(n["mu"]);
    const bool has_sigma = static_cast<bool>(n["sigma"]);
    const bool has_max = static_cast<bool>(n["max"]);
    const bool has_min = static_cast<bool>(n["min"]);
    if (has_mu != has_sigma)
        fail(n, section, "mu and sigma must be given together");
    if (has_max != has_min)
        fail(n, section, "max and min must be given together");
    if (!has_mu && !has_max)
        fail(n, section, "give a preset, mu and sigma, or max and min");

    if (has_max) {
        type.max_speed = positive(n["max"], join(section, "max"), Dim::Speed);
        type.min_speed = non_negative(n["min"], join(section, "min"), Dim::Speed);
        if (!(type.max_speed >= type.min_speed))
            fail(n["max"], join(section, "max"), "must be >= min");
    }
    if (has_mu) {
        type.mu_speed = positive(n["mu"], join(section, "mu"), Dim::Speed);
        type.sigma_speed = non_negative(n["sigma"], join(section, "sigma"), Dim::Speed);
        if (!has_max) {
            type.max_speed = type.mu_speed + 3.0 * type.sigma_speed;
            type.min_speed = type.mu_speed - 3.0 * type.sigma_speed;
            if (!(type.min_speed >= 0.0))
                fail(n["sigma"], join(section, "sigma"), "mu - 3 sigma must be >= 0");
        }
    } else {
        if (!(type.max_speed > type.min_speed))
            fail(n["max"], join(section, "max"), "must exceed min");
        const SpeedParams p = speed_params_from_bounds(type.max_speed, type.min_speed);
        type.mu_speed = p.mu;
        type.sigma_speed = p.sigma;
    }
}

void apply_radius(const YAML::Node& n, const std::string& section, PedestrianType& type)
{
    check_keys(n, section, {"max", "min"});
    if (const auto v = n["max"])
        type.max_radius = positive(v, join(section, "max"), Dim::Length);
    if (const auto v = n["min"])
        type.min_radius = positive(v, join(section, "min"), Dim::Length);
    if (!(type.max_radius >= type.min_radius))
        fail(n, join(section, "max"), "must be >= min");
}

void validate_type(const YAML::Node& n, const std::string& section, const PedestrianType& type)
{
    try {
        type.validate();
    } catch (const ValidationError& e) {
        fail(n, join(section, e.key()), e.what());
    }
}

// A type block: {type, speeds, radius}. Starts from `table[type]`, then the
// section default speeds, then its own speeds and radius.
PedestrianType parse_type_block(const YAML::Node& n, const std::string& section,
                                const TypeTable& table, const YAML::Node* default_speeds)
{
    PedestrianKind kind = PedestrianKind::HealthyAdult;
    if (const auto v = n["type"])
        kind = parse_kind(v, join(section, "type"));
    PedestrianType type = table.at(kind);
    if (default_speeds && !n["speeds"])
        apply_speeds(*default_speeds, "speeds", type);
    if (const auto v = n["speeds"])
        apply_speeds(v, join(section, "speeds"), type);
    if (const auto v = n["radius"])
        apply_radius(v, join(section, "radius"), type);
    validate_type(n, section, type);
    return type;
}

// ---------------------------------------------------------------------------
// Sections

CrosswalkLayout parse_layout(const YAML::Node& n)
{
    check_keys(n, "layout", {"beta", "width", "length", "buffer"});
    const auto get = [&](const char* key, double fallback) {
        const auto v = n[key];
        return v ? positive(v, join("layout", key), Dim::Length) : fallback;
    };
    if (!n["width"] || !n["length"])
        fail(n, "layout", "width and length are required");
    return CrosswalkLayout(get("beta", 3.0), get("width", 0.0), get("length", 0.0), get("buffer", 1.0));
}

PlacementDistribution parse_placement(const YAML::Node& n, const std::string& section)
{
    PlacementDistribution d;
    if (n.IsScalar()) {
        d.kind = parse_placement_kind(n, section);
        return d;
    }
    check_keys(n, section, {"kind", "lambda", "dof"});
    if (const auto v = n["kind"])
        d.kind = parse_placement_kind(v, join(section, "kind"));
    if (const auto v = n["lambda"])
        d.poisson_lambda = positive(v, join(section, "lambda"), Dim::Count);
    if (const auto v = n["dof"]) {
        d.t_dof = positive(v, join(section, "dof"), Dim::Count);
        if (!(d.t_dof > 2.0))
            fail(v, join(section, "dof"), "must be > 2 for a finite variance");
    }
    return d;
}

Cohort parse_cohort(const YAML::Node& n, const std::string& section, const TypeTable& table,
                    const YAML::Node* default_speeds)
{
    check_keys(n, section,
               {"side", "count", "type", "speeds", "radius", "placement", "positions", "base_speeds"});
    Cohort c;
    if (!n["side"])
        fail(n, join(section, "side"), "is required");
    c.side = parse_side(n["side"], join(section, "side"));
    c.type = parse_type_block(n, section, table, default_speeds);
    if (const auto v = n["placement"])
        c.placement = parse_placement(v, join(section, "placement"));

    if (const auto v = n["positions"]) {
        if (!v.IsSequence())
            fail(v, join(section, "positions"), "expected a list of [x, y] pairs");
        for (std::size_t k = 0; k < v.size(); ++k) {
            const auto p = v[k];
            const std::string key = join(section, "positions[" + std::to_string(k) + "]");
            if (!p.IsSequence() || p.size() != 2)
                fail(p, key, "expected [x, y]");
            c.positions.push_back({quantity(p[0], key, Dim::Length), quantity(p[1], key, Dim::Length)});
        }
    }
    if (const auto v = n["base_speeds"]) {
        if (!v.IsSequence())
            fail(v, join(section, "base_speeds"), "expected a list of speeds");
        for (std::size_t k = 0; k < v.size(); ++k)
            c.base_speeds.push_back(
                positive(v[k], join(section, "base_speeds[" + std::to_string(k) + "]"), Dim::Speed));
    }

    if (const auto v = n["count"])
        c.count = integer<int>(v, join(section, "count"), 0);
    else if (!c.positions.empty())
        c.count = static_cast<int>(c.positions.size());
    else if (!c.base_speeds.empty())
        c.count = static_cast<int>(c.base_speeds.size());
    else
        fail(n, join(section, "count"), "is required");

    if (!c.positions.empty() && static_cast<int>(c.positions.size()) != c.count)
        fail(n["positions"], join(section, "positions"), "must list exactly `count` points");
    if (!c.base_speeds.empty() && static_cast<int>(c.base_speeds.size()) != c.count)
        fail(n["base_speeds"], join(section, "base_speeds"), "must list exactly `count` speeds");
    return c;
}

EngineConfig parse_engine(const YAML::Node& n, const std::string& s = "engine")
{
    check_keys(n, s,
               {"step_len", "seed", "max_steps", "i_increment", "stuck_threshold", "order", "ceiling"});
    EngineConfig e;
    if (const auto v = n["step_len"])
        e.step_len = positive(v, join(s, "step_len"), Dim::Time);
    if (const auto v = n["seed"])
        e.seed = integer<std::uint64_t>(v, join(s, "seed"), 0);
    if (const auto v = n["max_steps"])
        e.max_steps = integer<int>(v, join(s, "max_steps"), 1);
    if (const auto v = n["i_increment"]) {
        e.i_increment = integer<int>(v, join(s, "i_increment"), 1);
        if (e.i_increment > 100)
            fail(v, join(s, "i_increment"), "must be <= 100");
    }
    if (const auto v = n["stuck_threshold"])
        e.stuck_threshold = integer<int>(v, join(s, "stuck_threshold"), 1);
    if (const auto v = n["order"])
        e.order = parse_order(v, join(s, "order"));
    if (const auto v = n["ceiling"])
        e.ceiling = parse_ceiling(v, join(s, "ceiling"));
    return e;
}

std::array<double, 4> parse_rates(const YAML::Node& n, const std::string& section,
                                  std::array<double, 4> rates)
{
    check_keys(n, section, {"north", "east", "south", "west"});
    for (Approach a : kApproaches) {
        const std::string name(to_string(a));
        if (const auto v = n[name])
            rates[static_cast<std::size_t>(a)] = non_negative(v, join(section, name), Dim::Rate);
    }
    return rates;
}

DemandProfile parse_demand(const YAML::Node& n, const TypeTable& table)
{
    const std::string s = "tls.demand";
    check_keys(n, s,
               {"preset", "vehicles_per_hour", "pedestrians_per_hour", "vehicle_rate",
                "pedestrian_rate", "turning", "pedestrian_type"});
    DemandProfile d;
    if (const auto v = n["preset"]) {
        const std::string name = scalar_of(v, join(s, "preset"));
        if (name == "field_replay") {
            d = field_replay_demand();
        } else {
            const auto levels = synthetic_levels();
            const auto it = std::find_if(levels.begin(), levels.end(),
                                         [&](const SyntheticLevel& l) { return "level_" + l.name == name; });
            if (it == levels.end())
                fail(v, join(s, "preset"), "expected field_replay or level_a .. level_f, got '" + name + "'");
            d = uniform_demand(it->vehicles_per_hour, it->pedestrians_per_hour);
        }
    } else {
        d.vehicle_rate.fill(0.0);
        d.pedestrian_rate.fill(0.0);
    }
    if (const auto v = n["vehicles_per_hour"])
        d.vehicle_rate.fill(non_negative(v, join(s, "vehicles_per_hour"), Dim::Rate) / 4.0);
    if (const auto v = n["pedestrians_per_hour"])
        d.pedestrian_rate.fill(non_negative(v, join(s, "pedestrians_per_hour"), Dim::Rate) / 4.0);
    if (const auto v = n["vehicle_rate"])
        d.vehicle_rate = parse_rates(v, join(s, "vehicle_rate"), d.vehicle_rate);
    if (const auto v = n["pedestrian_rate"])
        d.pedestrian_rate = parse_rates(v, join(s, "pedestrian_rate"), d.pedestrian_rate);
    if (const auto v = n["turning"]) {
        const std::string t = join(s, "turning");
        check_keys(v, t, {"left", "through", "right"});
        if (const auto x = v["left"])
            d.turning.left = non_negative(x, join(t, "left"), Dim::Count);
        if (const auto x = v["through"])
            d.turning.through = non_negative(x, join(t, "through"), Dim::Count);
        if (const auto x = v["right"])
            d.turning.right = non_negative(x, join(t, "right"), Dim::Count);
        if (!(d.turning.left + d.turning.through + d.turning.right > 0.0))
            fail(v, t, "fractions must not all be zero");
    }
    if (const auto v = n["pedestrian_type"]) {
        const std::string t = join(s, "pedestrian_type");
        check_keys(v, t, {"type", "speeds", "radius"});
        d.pedestrian_type = parse_type_block(v, t, table, nullptr);
    }
    return d;
}

ControllerParams parse_controller(const YAML::Node& n)
{
    const std::string s = "tls.controller";
    check_keys(n, s,
               {"min_green", "max_green", "min_walk", "max_walk", "safety_margin", "estimator_runs",
                "saturation_headway", "startup_lost_time", "yellow", "fixed_walk", "drain_limit"});
    ControllerParams c;
    const auto time = [&](const char* key, double& out, bool allow_zero) {
        if (const auto v = n[key])
            out = allow_zero ? non_negative(v, join(s, key), Dim::Time) : positive(v, join(s, key), Dim::Time);
    };
    time("min_green", c.green.min_green, false);
    time("max_green", c.green.max_green, false);
    time("min_walk", c.min_walk, false);
    time("max_walk", c.max_walk, false);
    time("safety_margin", c.safety_margin, true);
    time("saturation_headway", c.saturation_headway, false);
    time("startup_lost_time", c.startup_lost_time, true);
    time("yellow", c.yellow, false);
    time("drain_limit", c.drain_limit, true);
    if (const auto v = n["estimator_runs"])
        c.estimator_runs = integer<int>(v, join(s, "estimator_runs"), 1);
    if (const auto v = n["fixed_walk"]) {
        if (!(v.IsScalar() && v.Scalar() == "auto"))
            c.fixed_walk = positive(v, join(s, "fixed_walk"), Dim::Time);
    }
    if (!(c.green.max_green >= c.green.min_green))
        fail(n, join(s, "max_green"), "must be >= min_green");
    if (!(c.max_walk >= c.min_walk))
        fail(n, join(s, "max_walk"), "must be >= min_walk");
    return c;
}

IntersectionGeometry parse_geometry(const YAML::Node& n)
{
    const std::string s = "tls.geometry";
    check_keys(n, s,
               {"beta", "buffer", "ew_crosswalk_length", "ew_crosswalk_width", "ns_crosswalk_length",
                "ns_crosswalk_width"});
    IntersectionGeometry g;
    const auto len = [&](const char* key, double& out) {
        if (const auto v = n[key])
            out = positive(v, join(s, key), Dim::Length);
    };
    len("beta", g.beta);
    len("buffer", g.buffer);
    len("ew_crosswalk_length", g.ew_crosswalk_length);
    len("ew_crosswalk_width", g.ew_crosswalk_width);
    len("ns_crosswalk_length", g.ns_crosswalk_length);
    len("ns_crosswalk_width", g.ns_crosswalk_width);
    return g;
}

TlsConfig parse_tls(const YAML::Node& n, const TypeTable& table, const EngineConfig& engine)
{
    check_keys(n, "tls", {"mode", "horizon", "demand", "controller", "geometry", "engine"});
    TlsConfig t;
    t.engine = n["engine"] ? parse_engine(n["engine"], "tls.engine") : engine;
    if (const auto v = n["mode"]) {
        const std::string name = scalar_of(v, "tls.mode");
        const auto mode = parse_tls_mode(name);
        if (!mode)
            fail(v, "tls.mode", "expected static, dynamic or dynamic_with_pcs, got '" + name + "'");
        t.mode = *mode;
    }
    if (const auto v = n["demand"])
        t.demand = parse_demand(v, table);
    if (const auto v = n["horizon"])
        t.demand.horizon = positive(v, "tls.horizon", Dim::Time);
    if (const auto v = n["controller"])
        t.controller = parse_controller(v);
    if (const auto v = n["geometry"])
        t.geometry = parse_geometry(v);
    return t;
}

// ---------------------------------------------------------------------------
// Echo

Json speeds_json(const PedestrianType& t)
{
    return Json{{"mu", t.mu_speed}, {"sigma", t.sigma_speed}, {"max", t.max_speed}, {"min", t.min_speed}};
}

Json type_json(const PedestrianType& t)
{
    return Json{{"type", std::string(to_string(t.kind))},
                {"speeds", speeds_json(t)},
                {"radius", Json{{"max", t.max_radius}, {"min", t.min_radius}}}};
}

Json rates_json(const std::array<double, 4>& r)
{
    Json j = Json::object();
    for (Approach a : kApproaches)
        j[std::string(to_string(a))] = r[static_cast<std::size_t>(a)];
    return j;
}

Json engine_json(const EngineConfig& e)
{
    return Json{{"step_len", e.step_len},
                {"seed", e.seed},
                {"max_steps", e.max_steps},
                {"i_increment", e.i_increment},
                {"stuck_threshold", e.stuck_threshold},
                {"order", std::string(to_string(e.order))},
                {"ceiling", std::string(to_string(e.ceiling))}};
}

Json echo_json(const ScenarioFile& file)
{
    const Scenario& s = file.scenario;
    Json j;
    j["layout"] = Json{{"beta", s.layout.beta()},
                       {"width", s.layout.width()},
                       {"length", s.layout.length()},
                       {"buffer", s.layout.buffer()}};
    Json cohorts = Json::array();
    for (const Cohort& c : s.cohorts) {
        Json cj{{"side", std::string(to_string(c.side))}, {"count", c.count}};
        const Json type = type_json(c.type);
        for (const auto& [k, v] : type.items())
            cj[k] = v;
        cj["placement"] = Json{{"kind", std::string(to_string(c.placement.kind))},
                               {"lambda", c.placement.poisson_lambda},
                               {"dof", c.placement.t_dof}};
        if (!c.positions.empty()) {
            Json ps = Json::array();
            for (Point p : c.positions)
                ps.push_back(Json::array({p.x, p.y}));
            cj["positions"] = ps;
        }
        if (!c.base_speeds.empty())
            cj["base_speeds"] = c.base_speeds;
        cohorts.push_back(cj);
    }
    j["cohorts"] = cohorts;
    j["engine"] = engine_json(s.engine);

    if (file.tls) {
        const TlsConfig& t = *file.tls;
        const ControllerParams& c = t.controller;
        Json controller{{"min_green", c.green.min_green},
                        {"max_green", c.green.max_green},
                        {"min_walk", c.min_walk},
                        {"max_walk", c.max_walk},
                        {"safety_margin", c.safety_margin},
                        {"estimator_runs", c.estimator_runs},
                        {"saturation_headway", c.saturation_headway},
                        {"startup_lost_time", c.startup_lost_time},
                        {"yellow", c.yellow}};
        controller["fixed_walk"] = c.fixed_walk ? Json(*c.fixed_walk) : Json("auto");
        controller["drain_limit"] = c.drain_limit;
        const IntersectionGeometry& g = t.geometry;
        j["tls"] = Json{
            {"mode", std::string(to_string(t.mode))},
            {"horizon", t.demand.horizon},
            {"demand",
             Json{{"vehicle_rate", rates_json(t.demand.vehicle_rate)},
                  {"pedestrian_rate", rates_json(t.demand.pedestrian_rate)},
                  {"turning", Json{{"left", t.demand.turning.left},
                                   {"through", t.demand.turning.through},
                                   {"right", t.demand.turning.right}}},
                  {"pedestrian_type", type_json(t.demand.pedestrian_type)}}},
            {"controller", controller},
            {"geometry", Json{{"beta", g.beta},
                              {"buffer", g.buffer},
                              {"ew_crosswalk_length", g.ew_crosswalk_length},
                              {"ew_crosswalk_width", g.ew_crosswalk_width},
                              {"ns_crosswalk_length", g.ns_crosswalk_length},
                              {"ns_crosswalk_width", g.ns_crosswalk_width}}}};
        if (!(t.engine == s.engine))
            j["tls"]["engine"] = engine_json(t.engine);  // only for configs built in code
    }
    return j;
}

Json base_summary(const ScenarioFile& file)
{
    Json j;
    j["cohort_crossing_time_s"] = nullptr;
    j["vehicle_awt_s"] = nullptr;
    j["pedestrian_awt_s"] = nullptr;
    j["stranded_pedestrians"] = nullptr;
    j["no_move_fraction"] = nullptr;
    j["seed"] = file.scenario.engine.seed;
    j["config_echo"] = echo_json(file);
    return j;
}

std::string finish(const Json& j)
{
    return j.dump(2) + "\n";
}

} // namespace

ScenarioFile parse_scenario_text(std::string_view text)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ValidationError("", "malformed scenario: " + e.msg,
                              e.mark.is_null() ? std::nullopt : std::optional<int>(e.mark.line + 1));
    }
    if (!root.IsMap())
        throw ValidationError("", "scenario must be a mapping", line_of(root));

    try {
        check_keys(root, "", {"layout", "cohorts", "speeds", "types", "engine", "tls"});

        TypeTable table = default_table();
        if (const auto types = root["types"]) {
            require_map(types, "types");
            for (auto it = types.begin(); it != types.end(); ++it) {
                const std::string name = it->first.as<std::string>();
                const PedestrianKind kind = parse_kind(it->first, "types." + name);
                const std::string section = "types." + name;
                check_keys(it->second, section, {"speeds", "radius"});
                PedestrianType t = table.at(kind);
                if (const auto v = it->second["speeds"])
                    apply_speeds(v, section + ".speeds", t);
                if (const auto v = it->second["radius"])
                    apply_radius(v, section + ".radius", t);
                validate_type(it->second, section, t);
                table[kind] = t;
            }
        }

        ScenarioFile file;
        if (const auto v = root["layout"])
            file.scenario.layout = parse_layout(v);
        else if (root["cohorts"])
            fail(root, "layout", "is required when cohorts are given");
        if (const auto v = root["engine"])
            file.scenario.engine = parse_engine(v);

        const YAML::Node speeds = root["speeds"];
        if (speeds)
            require_map(speeds, "speeds");
        const YAML::Node* default_speeds = speeds ? &speeds : nullptr;
        if (const auto v = root["cohorts"]) {
            if (!v.IsSequence())
                fail(v, "cohorts", "expected a list");
            for (std::size_t k = 0; k < v.size(); ++k)
                file.scenario.cohorts.push_back(
                    parse_cohort(v[k], "cohorts[" + std::to_string(k) + "]", table, default_speeds));
        }
        if (const auto v = root["tls"])
            file.tls = parse_tls(v, table, file.scenario.engine);
        if (!root["cohorts"] && !root["tls"])
            fail(root, "cohorts", "a scenario needs cohorts or a tls section");

        try {
            file.scenario.validate();
            if (file.tls)
                file.tls->validate();
        } catch (const ValidationError& e) {
            if (e.line())
                throw;
            throw ValidationError(e.key(), e.what(), line_of(root));
        }
        return file;
    } catch (const YAML::Exception& e) {
        throw ValidationError("", e.msg, e.mark.is_null() ? std::nullopt : std::optional<int>(e.mark.line + 1));
    }
}

ScenarioFile parse_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

std::string config_echo(const ScenarioFile& file)
{
    return echo_json(file).dump(2) + "\n";
}

std::vector<ValidationRecord> builtin_validation_scenarios()
{
    struct Row {
        const char* name;
        const char* counts;
        int left;
        int right;
        double length;
        double actual;
        double normal, poisson, t;
    };
    // Left-side starters walk W2E at the first crosswalk and S2N at the second.
    constexpr Row rows[] = {
        {"record1", "E2W 29 / W2E 21", 21, 29, 43.62, 57.0, 57.2, 56.0, 56.0},
        {"record2", "E2W 25 / W2E 19", 19, 25, 43.62, 53.0, 51.4, 55.0, 54.0},
        {"record3", "E2W 23 / W2E 37", 37, 23, 43.62, 60.0, 60.2, 61.0, 66.0},
        {"record4", "S2N 3 / N2S 4", 3, 4, 45.045, 39.0, 40.5, 40.0, 38.0},
        {"record5", "S2N 3 / N2S 3", 3, 3, 45.045, 40.0, 40.7, 38.0, 39.0},
    };
    std::vector<ValidationRecord> out;
    for (const Row& r : rows) {
        ValidationRecord rec;
        rec.name = r.name;
        rec.counts = r.counts;
        rec.scenario.layout = CrosswalkLayout(3.0, 3.6, r.length, 1.0);
        rec.scenario.engine.seed = 42;
        Cohort right;
        right.side = Side::Right;
        right.count = r.right;
        right.type = field_adult_type();
        Cohort left = right;
        left.side = Side::Left;
        left.count = r.left;
        rec.scenario.cohorts = {right, left};
        rec.actual_time = r.actual;
        rec.reference_normal = r.normal;
        rec.reference_poisson = r.poisson;
        rec.reference_t = r.t;
        out.push_back(std::move(rec));
    }
    return out;
}

std::optional<ValidationRecord> find_validation_record(std::string_view name)
{
    for (auto& r : builtin_validation_scenarios())
        if (r.name == name)
            return r;
    return std::nullopt;
}

double accuracy_percent(double estimated, double actual)
{
    if (!(actual > 0.0))
        throw std::invalid_argument("actual time must be > 0");
    return 100.0 * (1.0 - std::abs(estimated - actual) / actual);
}

namespace {

// Six-decimal text without a negative zero.
void put_fixed(std::string& out, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    if (std::string_view(buf) == "-0.000000")
        out += "0.000000";
    else
        out += buf;
}

} // namespace

void write_trace_csv(std::ostream& out, const SimulationTrace& trace)
{
    std::string line;
    out << "step,ped_id,x,y,speed,radius,state\n";
    for (const TraceRecord& r : trace) {
        line.clear();
        line += std::to_string(r.step);
        line += ',';
        line += std::to_string(r.ped_id);
        for (double v : {r.x, r.y, r.speed, r.radius}) {
            line += ',';
            put_fixed(line, v);
        }
        line += ',';
        line += to_string(r.state);
        line += '\n';
        out << line;
    }
}

SimulationTrace parse_trace_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "step,ped_id,x,y,speed,radius,state")
        throw ValidationError("header", "expected step,ped_id,x,y,speed,radius,state", 1);
    SimulationTrace out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string_view> cells;
        std::string_view rest = line;
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
            cells.push_back(rest.substr(0, pos));
            rest.remove_prefix(pos + 1);
        }
        cells.push_back(rest);
        if (cells.size() != 7)
            throw ValidationError("row", "expected 7 fields, got " + std::to_string(cells.size()), lineno);

        const auto number = [&](std::string_view cell, auto& v, const char* key) {
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw ValidationError(key, "bad number '" + std::string(cell) + "'", lineno);
        };
        TraceRecord r;
        number(cells[0], r.step, "step");
        number(cells[1], r.ped_id, "ped_id");
        number(cells[2], r.x, "x");
        number(cells[3], r.y, "y");
        number(cells[4], r.speed, "speed");
        number(cells[5], r.radius, "radius");
        const auto state = parse_ped_state(cells[6]);
        if (!state)
            throw ValidationError("state", "unknown state '" + std::string(cells[6]) + "'", lineno);
        r.state = *state;
        out.push_back(r);
    }
    return out;
}

std::string run_summary_json(const RunSummary& s, const ScenarioFile& file)
{
    Json j = base_summary(file);
    j["cohort_crossing_time_s"] = s.cohort_crossing_time;
    j["no_move_fraction"] = s.no_move_fraction;
    j["seed"] = s.seed;
    j["completed"] = s.completed;
    j["pedestrians"] = s.pedestrians;
    j["steps"] = s.steps;
    j["agent_steps"] = s.agent_steps;
    j["no_move_steps"] = s.no_move_steps;
    j["stuck_tilt_events"] = s.stuck_tilt_events;
    Json per = Json::array();
    for (const auto& t : s.per_ped_crossing_time)
        per.push_back(t ? Json(*t) : Json(nullptr));
    j["per_pedestrian_crossing_time_s"] = per;
    j.erase("config_echo");
    j["config_echo"] = echo_json(file);
    return finish(j);
}

std::string estimate_summary_json(const CrossingEstimate& est, int runs, const ScenarioFile& file)
{
    Json j = base_summary(file);
    j["cohort_crossing_time_s"] = est.mean;
    j["completed"] = est.all_completed;
    j["runs"] = runs;
    j["per_run_crossing_time_s"] = est.per_run;
    j.erase("config_echo");
    j["config_echo"] = echo_json(file);
    return finish(j);
}

std::string tls_summary_json(const IntersectionMetrics& m, const ScenarioFile& file)
{
    Json j = base_summary(file);
    j["vehicle_awt_s"] = m.vehicle_awt;
    j["pedestrian_awt_s"] = m.pedestrian_awt;
    j["stranded_pedestrians"] = m.stranded_pedestrians;
    j["seed"] = m.seed;
    j["mode"] = std::string(to_string(m.mode));
    j["vehicle_max_wait_s"] = m.vehicle_max_wait;
    j["pedestrian_max_wait_s"] = m.pedestrian_max_wait;
    j["vehicles"] = Json{{"arrived", m.vehicles_arrived},
                         {"discharged", m.vehicles_discharged},
                         {"queued", m.vehicles_queued}};
    j["pedestrians"] = Json{{"arrived", m.pedestrians_arrived},
                            {"released", m.pedestrians_released},
                            {"queued", m.pedestrians_queued}};
    j["cycles"] = m.cycles;
    j["end_time_s"] = m.end_time;
    j.erase("config_echo");
    j["config_echo"] = echo_json(file);
    return finish(j);
}

std::string compare_summary_json(const std::vector<ModeStats>& rows,
                                 const std::vector<std::uint64_t>& seeds, const ScenarioFile& file)
{
    Json j = base_summary(file);
    j["seeds"] = seeds;
    Json modes = Json::array();
    for (const ModeStats& r : rows) {
        modes.push_back(Json{{"mode", std::string(to_string(r.mode))},
                             {"runs", r.runs},
                             {"vehicle_awt_s", r.vehicle_awt},
                             {"vehicle_awt_sd_s", r.vehicle_awt_sd},
                             {"pedestrian_awt_s", r.pedestrian_awt},
                             {"pedestrian_awt_sd_s", r.pedestrian_awt_sd},
                             {"vehicle_max_wait_s", r.vehicle_max_wait},
                             {"pedestrian_max_wait_s", r.pedestrian_max_wait},
                             {"stranded_pedestrians", r.stranded_pedestrians}});
    }
    j["modes"] = modes;
    j.erase("config_echo");
    j["config_echo"] = echo_json(file);
    return finish(j);
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace pcs
