#include "terrastep/types.hpp"

#include <cmath>

namespace terrastep {

namespace {
constexpr std::array<std::string_view, kNumTerrains> kTerrainNames = {
    "METAL", "WOOD", "FOAM", "MAT", "GRASS", "GRAVEL", "STRAW", "CONCRETE", "CARPET", "POPPY"};

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}
}  // namespace

std::string_view terrain_name(TerrainClass t) { return kTerrainNames[static_cast<int>(t)]; }

std::optional<TerrainClass> parse_terrain(std::string_view name) {
    for (int i = 0; i < kNumTerrains; ++i)
        if (kTerrainNames[i] == name) return static_cast<TerrainClass>(i);
    return std::nullopt;
}

TerrainClass terrain_from_code(int code) {
    if (code < 0 || code >= kNumTerrains)
        throw std::invalid_argument("terrain code out of range: " + std::to_string(code));
    return static_cast<TerrainClass>(code);
}

double RecordingRun::duration_s() const {
    double d = 0.0;
    if (!fast.t.empty()) d = std::max(d, fast.t.back() - fast.t.front());
    if (!slow.t.empty()) d = std::max(d, slow.t.back() - slow.t.front());
    return d;
}

void RecordingRun::validate() const {
    if (fast.rate_hz <= 0.0 || slow.rate_hz <= 0.0)
        throw SchemaError("run " + run_id + ": sample rates must be positive");
    const std::size_t nf = fast.t.size();
    if (fast.acoustic.size() != nf || fast.capacitive.size() != nf)
        throw SchemaError("run " + run_id + ": fast columns have unequal lengths");
    const std::size_t ns = slow.t.size();
    if (slow.accel_x.size() != ns || slow.accel_y.size() != ns || slow.accel_z.size() != ns ||
        slow.temperature.size() != ns)
        throw SchemaError("run " + run_id + ": slow columns have unequal lengths");
    for (const auto& ch : slow.tactile)
        if (ch.size() != ns) throw SchemaError("run " + run_id + ": tactile columns have unequal lengths");

    if (!all_finite(fast.t) || !all_finite(fast.acoustic) || !all_finite(fast.capacitive))
        throw SchemaError("run " + run_id + ": non-finite value in fast stream");
    if (!all_finite(slow.t) || !all_finite(slow.accel_x) || !all_finite(slow.accel_y) ||
        !all_finite(slow.accel_z) || !all_finite(slow.temperature))
        throw SchemaError("run " + run_id + ": non-finite value in slow stream");
    for (const auto& ch : slow.tactile)
        if (!all_finite(ch)) throw SchemaError("run " + run_id + ": non-finite value in tactile channel");

    // Both streams must cover the same span within one slow-sample period.
    if (nf > 0 && ns > 0) {
        const double fast_span = fast.t.back() - fast.t.front();
        const double slow_span = slow.t.back() - slow.t.front();
        const double tol = 1.0 / slow.rate_hz + 1e-9;
        if (std::abs(fast_span - slow_span) > tol)
            throw SchemaError("run " + run_id + ": fast/slow spans differ by more than one slow period");
    }

    if (truth_boundaries) {
        for (const auto& [s, e] : *truth_boundaries)
            if (!(e > s)) throw SchemaError("run " + run_id + ": truth boundary with end <= start");
    }
}

std::array<std::size_t, kNumTerrains> Dataset::class_counts() const {
    std::array<std::size_t, kNumTerrains> counts{};
    for (const auto& row : rows)
        if (row.label) ++counts[static_cast<int>(*row.label)];
    return counts;
}

}  // namespace terrastep
