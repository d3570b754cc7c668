#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "reebfol/chart.hpp"
#include "reebfol/instances.hpp"
#include "reebfol/measures.hpp"
#include "reebfol/obstruction.hpp"

namespace reebfol {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kReportSchemaVersion = 1;

/// Chart file:
///   { "grid": {nx, ny, nz, hx, hy, hz, x0, y0, z0}, "sheets", "z_period",
///     "metric": {"g11": expr, "g12": expr, "g22": expr} | {"nodes": [[g11, g12, g22], ...]},
///     "boundary": [{side, lo, hi, kind, label, branches: [{target, u_scale, u_shift,
///                   swap_sheet, z_lo, z_hi, z_scale, z_shift}]}] }
/// Unbounded lo / hi / z_lo / z_hi are null. Expressions are over x, y, z.
json chart_to_json(const FoliatedChart& chart);
FoliatedChart chart_from_json(const json& j);

/// Measure file: {"log_f": [...]} or {"f": expr}, with optional "anchor",
/// "regularity" and "channels" (arrays per node, NaN as null).
json measure_to_json(const TransverseMeasureField& tau, bool with_channels = true);
TransverseMeasureField measure_from_json(const json& j, const FoliatedChart& chart);

/// Complex file: {"faces": [{"area": "p/q", "boundary": [[edge, +-1], ...]}],
///   "edges": [{"mark": -1|0|1, "vertices": [tail, head]?}], "vertices": [[x, y]], "levels": [...]}
json complex_to_json(const LeafComplex& c);
LeafComplex complex_from_json(const json& j);

json outcome_to_json(const LPOutcome& o);

json instance_to_json(const InstanceDescriptor& d);
InstanceDescriptor instance_from_json(const json& j);

// Canonical text: sorted keys, two-space indent, trailing newline.
std::string dump(const json& j);
json read_json(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace reebfol
