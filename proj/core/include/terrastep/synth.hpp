#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "terrastep/types.hpp"

namespace terrastep {

/// Per-terrain knobs for the synthetic footstep generator. The 10 default
/// rows are a fixture chosen to produce well-separated classes at desk
/// scale; they are editable via terrains.json and are not measurements.
struct TerrainSignature {
    double stiffness_n_mm = 100.0;    // contact force rise sharpness
    double settle_noise_pa = 10.0;    // tactile RMS while loaded (granular shifting)
    std::array<double, 9> acoustic_bands{};  // relative band energies in [0,1]
    double impact_amplitude = 0.2;    // contact transient peak (normalized)
    double impact_decay_per_s = 15.0;
    double cap_baseline_counts = 2000.0;  // capacitive plateau during contact
    double cap_jitter_counts = 50.0;
    double temp_mean_c = 23.0;
    double temp_var_c2 = 1.0;
    double vib_freq_hz = 8.0;         // accelerometer ring-down
    double vib_damping_per_s = 8.0;

    void validate() const;
};

/// The Instron-style loading cycle: descend until press_force, hold, lift,
/// rest, repeat. hold_s and rest_s defaults are frozen protocol values.
struct StepCycleSpec {
    double press_force_n = 300.0;
    double hold_s = 1.0;
    double rest_s = 0.25;
    double descent_speed_mm_s = 50.0;
    int n_steps = 1;

    void validate() const;
};

/// Summed tactile pressure produced per newton of contact force. The hold
/// plateau of a default run sums to press_force * this.
inline constexpr double kTactilePaPerNewton = 40.0;

/// Tactile drift slopes are drawn per channel from this symmetric range, so
/// the detrend stage has real work to do.
inline constexpr double kDriftSlopeMaxPaPerS = 2.0;

using SignatureTable = std::map<TerrainClass, TerrainSignature>;

const SignatureTable& default_signatures();

SignatureTable load_signatures(const std::string& path);
void save_signatures(const SignatureTable& table, const std::string& path);

/// Generates one dual-rate recording with exactly cycle.n_steps footsteps.
/// truth_boundaries hold, per step, the times where the noiseless contact
/// force crosses 30% of press_force (the level the default segmenter
/// thresholds at). Deterministic given the seed.
RecordingRun generate_run(TerrainClass terrain, const TerrainSignature& sig,
                          const StepCycleSpec& cycle, std::uint64_t seed);

/// One run per terrain, child seeds derived per terrain name. Requires all
/// 10 terrains in the table.
std::vector<RecordingRun> generate_corpus(const SignatureTable& table, const StepCycleSpec& cycle,
                                          int steps_per_terrain, std::uint64_t seed);

/// Memory-friendly variant: generates runs one at a time, in terrain-code
/// order, with the same per-terrain seeds as generate_corpus.
void for_each_corpus_run(const SignatureTable& table, const StepCycleSpec& cycle,
                         int steps_per_terrain, std::uint64_t seed,
                         const std::function<void(RecordingRun&&)>& sink);

}  // namespace terrastep
