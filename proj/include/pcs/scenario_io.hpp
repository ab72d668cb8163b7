#pragma once

#include "pcs/engine.hpp"
#include "pcs/tls.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcs {

/// A parsed scenario file. Every value has been validated and defaults are
/// filled in.
struct ScenarioFile {
    Scenario scenario;
    std::optional<TlsConfig> tls;
    bool operator==(const ScenarioFile&) const = default;
};

/// Parses YAML scenario text. Quantities are plain numbers in the canonical
/// unit or strings with a unit suffix ("3.6 m", "90 km/h", "1980 veh/h").
/// Canonical units: metres, seconds, m/s, and arrivals per hour.
/// Throws ValidationError with the 1-based line on bad syntax, unknown keys,
/// wrong units or out-of-domain values.
[[nodiscard]] ScenarioFile parse_scenario_text(std::string_view text);

/// Reads and parses a file. Throws IoError if it cannot be read.
[[nodiscard]] ScenarioFile parse_scenario(const std::filesystem::path& path);

/// Normalized JSON echo of every input, with all defaults spelled out. The
/// echo is itself a valid scenario file that parses back to an equal value.
[[nodiscard]] std::string config_echo(const ScenarioFile& file);

/// One field-study record with its measured crossing time.
struct ValidationRecord {
    std::string name;        ///< "record1" .. "record5"
    std::string counts;      ///< e.g. "E2W 29 / W2E 21"
    Scenario scenario;
    double actual_time = 0.0; ///< s
    /// Reference estimates for Normal, Poisson and T placement, in seconds.
    double reference_normal = 0.0;
    double reference_poisson = 0.0;
    double reference_t = 0.0;
};

/// Records 1-3 on the 43.62 x 3.6 m crosswalk, 4-5 on the 45.045 x 3.6 m
/// one, all with field-adult pedestrians and Normal placement. Eastbound and
/// southbound walkers start on the left side.
[[nodiscard]] std::vector<ValidationRecord> builtin_validation_scenarios();
[[nodiscard]] std::optional<ValidationRecord> find_validation_record(std::string_view name);

/// 100 * (1 - |estimated - actual| / actual)
[[nodiscard]] double accuracy_percent(double estimated, double actual);

/// CSV with header `step,ped_id,x,y,speed,radius,state` and six decimals.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);
/// Inverse of write_trace_csv; values carry the six-decimal rounding.
/// Throws ValidationError naming the line on malformed input.
[[nodiscard]] SimulationTrace parse_trace_csv(std::istream& in);

/// Summary documents. All of them carry the stable keys
/// cohort_crossing_time_s, vehicle_awt_s, pedestrian_awt_s,
/// stranded_pedestrians, no_move_fraction, seed and config_echo; keys that
/// do not apply to the command are null.
[[nodiscard]] std::string run_summary_json(const RunSummary& summary, const ScenarioFile& file);
[[nodiscard]] std::string estimate_summary_json(const CrossingEstimate& estimate, int runs,
                                                const ScenarioFile& file);
[[nodiscard]] std::string tls_summary_json(const IntersectionMetrics& metrics,
                                           const ScenarioFile& file);
[[nodiscard]] std::string compare_summary_json(const std::vector<ModeStats>& rows,
                                               const std::vector<std::uint64_t>& seeds,
                                               const ScenarioFile& file);

/// Writes `content` to `path`, creating parent directories. Throws IoError
/// naming the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

} // namespace pcs
