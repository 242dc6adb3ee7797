#include "terrastep/synth.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "json.hpp"
#include "terrastep/rng.hpp"

namespace terrastep {

using nlohmann::json;

namespace {

constexpr double kApproachGapMm = 5.0;     // free travel before contact
constexpr double kTimingJitter = 0.1;      // +-10% on press/hold/release
constexpr double kWeightJitter = 0.08;     // per-step tactile load shift
constexpr double kTactileBaseNoisePa = 0.5;
constexpr double kAccelPerImpact = 6.0;    // ring amplitude per unit burst
constexpr double kAccelNoiseRms = 0.01;
constexpr double kAccelBiasX = 0.02, kAccelBiasY = -0.02, kAccelBiasZ = 0.03;
constexpr double kAcousticBackgroundRms = 0.002;
constexpr double kBandToneAmp = 0.018;
constexpr int kOscPerBand = 3;
constexpr double kCapRestJitterFrac = 0.15;
constexpr double kTempTauS = 5.0;          // OU correlation time

// Fraction of press force whose crossing times are recorded as ground
// truth; matches the default SegmentationParams threshold.
constexpr double kTruthFraction = 0.3;

constexpr std::array<double, 8> kBaseWeights = {0.138, 0.119, 0.131, 0.112,
                                                0.125, 0.135, 0.115, 0.125};

struct StepTiming {
    double press_start = 0.0;
    double press_dur = 0.0;
    double hold_dur = 0.0;
    double release_dur = 0.0;

    double hold_start() const { return press_start + press_dur; }
    double release_start() const { return hold_start() + hold_dur; }
    double contact_end() const { return release_start() + release_dur; }
};

// Loading crown: the held force rises a hair above the setpoint mid-hold,
// so each step's summed-tactile maximum sits at the hold center instead of
// wherever the noise happens to peak.
constexpr double kHoldCrownFrac = 0.01;

// Noiseless contact force at time t for one step, 0..~press_force.
double step_force(const StepTiming& s, double press_force, double t) {
    if (t < s.press_start || t > s.contact_end()) return 0.0;
    if (t < s.hold_start()) return press_force * (t - s.press_start) / s.press_dur;
    if (t < s.release_start()) {
        const double u = (t - s.hold_start()) / s.hold_dur;
        return press_force * (1.0 + kHoldCrownFrac * 4.0 * u * (1.0 - u));
    }
    return press_force * (s.contact_end() - t) / s.release_dur;
}

// Walks the step list alongside a monotone time cursor.
struct StepCursor {
    const std::vector<StepTiming>& steps;
    std::size_t i = 0;

    const StepTiming* active(double t) {
        while (i + 1 < steps.size() && t >= steps[i + 1].press_start) ++i;
        const StepTiming& s = steps[i];
        if (t >= s.press_start && t <= s.contact_end()) return &s;
        return nullptr;
    }
};

}  // namespace

void TerrainSignature::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string("TerrainSignature: ") + what +
                                                    " must be positive");
    };
    positive(stiffness_n_mm, "stiffness_n_mm");
    positive(impact_decay_per_s, "impact_decay_per_s");
    positive(cap_baseline_counts, "cap_baseline_counts");
    positive(vib_freq_hz, "vib_freq_hz");
    positive(vib_damping_per_s, "vib_damping_per_s");
    if (settle_noise_pa < 0.0 || cap_jitter_counts < 0.0 || temp_var_c2 < 0.0 ||
        impact_amplitude < 0.0)
        throw std::invalid_argument("TerrainSignature: noise parameters must be non-negative");
    for (double b : acoustic_bands)
        if (b < 0.0) throw std::invalid_argument("TerrainSignature: band energies must be non-negative");
}

void StepCycleSpec::validate() const {
    if (!(press_force_n > 0.0 && hold_s > 0.0 && rest_s > 0.0 && descent_speed_mm_s > 0.0))
        throw std::invalid_argument("StepCycleSpec: durations, force and speed must be positive");
    if (n_steps < 1) throw std::invalid_argument("StepCycleSpec: n_steps must be >= 1");
}

const SignatureTable& default_signatures() {
    static const SignatureTable table = [] {
        SignatureTable t;
        auto row = [&](TerrainClass tc, double stiff, double settle,
                       std::array<double, 9> bands, double amp, double decay, double cap,
                       double jit, double tmean, double tvar, double vf, double vd) {
            TerrainSignature s;
            s.stiffness_n_mm = stiff;
            s.settle_noise_pa = settle;
            s.acoustic_bands = bands;
            s.impact_amplitude = amp;
            s.impact_decay_per_s = decay;
            s.cap_baseline_counts = cap;
            s.cap_jitter_counts = jit;
            s.temp_mean_c = tmean;
            s.temp_var_c2 = tvar;
            s.vib_freq_hz = vf;
            s.vib_damping_per_s = vd;
            t[tc] = s;
        };
        // Hard/stiff surfaces ring fast and high; deformable ones rise
        // slowly; granular ones shift under load (settle noise). Each class
        // gets its own spectral fingerprint and ring-down frequency.
        row(TerrainClass::Metal, 2500, 3, {0.00, 0.01, 0.02, 0.04, 0.08, 0.15, 0.40, 0.85, 1.00},
            0.55, 35, 5200, 25, 21.0, 1.0, 16.0, 9.0);
        row(TerrainClass::Wood, 900, 6, {0.02, 0.05, 0.12, 0.30, 1.00, 0.55, 0.15, 0.04, 0.01},
            0.40, 25, 3600, 30, 22.0, 1.2, 11.0, 7.0);
        row(TerrainClass::Foam, 12, 10, {1.00, 0.65, 0.30, 0.10, 0.04, 0.01, 0.00, 0.00, 0.00},
            0.06, 8, 1500, 40, 23.5, 1.0, 3.2, 12.0);
        row(TerrainClass::Mat, 35, 8, {0.80, 1.00, 0.45, 0.15, 0.05, 0.01, 0.00, 0.00, 0.00},
            0.10, 10, 2600, 35, 23.0, 1.1, 4.0, 10.0);
        row(TerrainClass::Grass, 60, 35, {0.10, 0.25, 0.55, 1.00, 0.65, 0.30, 0.10, 0.03, 0.01},
            0.18, 14, 1900, 60, 26.0, 2.0, 6.6, 8.0);
        row(TerrainClass::Gravel, 320, 160, {0.05, 0.10, 0.25, 0.50, 0.80, 1.00, 0.85, 0.55, 0.25},
            0.50, 18, 3000, 90, 27.0, 2.2, 9.2, 6.0);
        row(TerrainClass::Straw, 45, 90, {0.15, 0.55, 1.00, 0.60, 0.30, 0.12, 0.05, 0.01, 0.00},
            0.22, 12, 1200, 70, 26.5, 2.0, 4.8, 9.0);
        row(TerrainClass::Concrete, 1800, 4, {0.00, 0.02, 0.05, 0.10, 0.30, 1.00, 0.65, 0.20, 0.05},
            0.45, 30, 4400, 25, 24.0, 1.5, 13.2, 8.0);
        row(TerrainClass::Carpet, 85, 12, {0.40, 0.95, 1.00, 0.35, 0.12, 0.04, 0.01, 0.00, 0.00},
            0.12, 10, 2200, 35, 22.5, 1.0, 5.6, 9.0);
        row(TerrainClass::Poppy, 150, 220, {0.05, 0.10, 0.20, 0.40, 0.70, 0.90, 1.00, 0.85, 0.55},
            0.30, 15, 900, 120, 25.0, 2.0, 7.6, 7.0);
        return t;
    }();
    return table;
}

SignatureTable load_signatures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open signature table: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    SignatureTable table;
    for (const auto& [key, v] : j.items()) {
        const auto t = parse_terrain(key);
        if (!t) throw SchemaError(path + ": unknown terrain '" + key + "'");
        TerrainSignature s;
        s.stiffness_n_mm = v.at("stiffness_n_mm").get<double>();
        s.settle_noise_pa = v.at("settle_noise_pa").get<double>();
        const auto& bands = v.at("acoustic_bands");
        if (bands.size() != 9) throw SchemaError(path + ": acoustic_bands must have 9 entries");
        for (int i = 0; i < 9; ++i) s.acoustic_bands[i] = bands[i].get<double>();
        s.impact_amplitude = v.at("impact_amplitude").get<double>();
        s.impact_decay_per_s = v.at("impact_decay_per_s").get<double>();
        s.cap_baseline_counts = v.at("cap_baseline_counts").get<double>();
        s.cap_jitter_counts = v.at("cap_jitter_counts").get<double>();
        s.temp_mean_c = v.at("temp_mean_c").get<double>();
        s.temp_var_c2 = v.at("temp_var_c2").get<double>();
        s.vib_freq_hz = v.at("vib_freq_hz").get<double>();
        s.vib_damping_per_s = v.at("vib_damping_per_s").get<double>();
        s.validate();
        table[*t] = s;
    }
    return table;
}

void save_signatures(const SignatureTable& table, const std::string& path) {
    json j;
    for (const auto& [t, s] : table) {
        json v;
        v["stiffness_n_mm"] = s.stiffness_n_mm;
        v["settle_noise_pa"] = s.settle_noise_pa;
        v["acoustic_bands"] = s.acoustic_bands;
        v["impact_amplitude"] = s.impact_amplitude;
        v["impact_decay_per_s"] = s.impact_decay_per_s;
        v["cap_baseline_counts"] = s.cap_baseline_counts;
        v["cap_jitter_counts"] = s.cap_jitter_counts;
        v["temp_mean_c"] = s.temp_mean_c;
        v["temp_var_c2"] = s.temp_var_c2;
        v["vib_freq_hz"] = s.vib_freq_hz;
        v["vib_damping_per_s"] = s.vib_damping_per_s;
        j[std::string(terrain_name(t))] = v;
    }
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write signature table: " + path);
    out << j.dump(2) << '\n';
}

RecordingRun generate_run(TerrainClass terrain, const TerrainSignature& sig,
                          const StepCycleSpec& cycle, std::uint64_t seed) {
    sig.validate();
    cycle.validate();

    const double fast_rate = 18000.0;
    const double slow_rate = 45.0;

    Rng timing_rng(Rng::child_seed(seed, "timing"));
    const double approach_s = kApproachGapMm / cycle.descent_speed_mm_s;
    const double base_press_s = cycle.press_force_n / (sig.stiffness_n_mm * cycle.descent_speed_mm_s);

    std::vector<StepTiming> steps;
    std::vector<std::pair<double, double>> truth;
    double cursor = cycle.rest_s;  // lead-in rest
    for (int i = 0; i < cycle.n_steps; ++i) {
        StepTiming s;
        cursor += approach_s;
        s.press_start = cursor;
        s.press_dur = base_press_s * (1.0 + kTimingJitter * (2.0 * timing_rng.next_double() - 1.0));
        s.hold_dur = cycle.hold_s * (1.0 + kTimingJitter * (2.0 * timing_rng.next_double() - 1.0));
        s.release_dur = base_press_s * (1.0 + kTimingJitter * (2.0 * timing_rng.next_double() - 1.0));
        cursor = s.contact_end() + cycle.rest_s;
        truth.emplace_back(s.press_start + kTruthFraction * s.press_dur,
                           s.release_start() + (1.0 - kTruthFraction) * s.release_dur);
        steps.push_back(s);
    }
    const double duration = cursor + cycle.rest_s;  // symmetric tail rest

    RecordingRun run;
    run.run_id = "synth-" + std::string(terrain_name(terrain)) + "-" + std::to_string(seed);
    run.terrain = terrain;
    run.seed = seed;
    run.truth_boundaries = std::move(truth);
    run.fast.rate_hz = fast_rate;
    run.slow.rate_hz = slow_rate;

    const auto n_slow = static_cast<std::size_t>(std::floor(duration * slow_rate)) + 1;
    const auto n_fast = static_cast<std::size_t>(std::floor(duration * fast_rate)) + 1;

    // ---- slow stream ----
    Rng tactile_rng(Rng::child_seed(seed, "tactile"));
    Rng weight_rng(Rng::child_seed(seed, "weights"));
    Rng accel_rng(Rng::child_seed(seed, "accel"));
    Rng temp_rng(Rng::child_seed(seed, "temperature"));

    std::array<double, kTactileChannels> drift{};
    for (auto& d : drift)
        d = tactile_rng.next_in(-kDriftSlopeMaxPaPerS, kDriftSlopeMaxPaPerS);

    // per-step load distribution across the 8 barometers, renormalized
    std::vector<std::array<double, kTactileChannels>> step_weights(steps.size());
    for (auto& w : step_weights) {
        double total = 0.0;
        for (int c = 0; c < kTactileChannels; ++c) {
            w[c] = kBaseWeights[c] * (1.0 + kWeightJitter * weight_rng.next_gaussian());
            if (w[c] < 0.01) w[c] = 0.01;
            total += w[c];
        }
        for (auto& v : w) v /= total;
    }

    // per-step accelerometer ring phase
    std::vector<double> ring_phase(steps.size());
    for (auto& p : ring_phase) p = accel_rng.next_in(0.0, 2.0 * std::numbers::pi);

    auto& slow = run.slow;
    slow.t.resize(n_slow);
    slow.accel_x.resize(n_slow);
    slow.accel_y.resize(n_slow);
    slow.accel_z.resize(n_slow);
    slow.temperature.resize(n_slow);
    for (auto& ch : slow.tactile) ch.resize(n_slow);

    const double temp_sd = std::sqrt(sig.temp_var_c2);
    const double rho = std::exp(-1.0 / (slow_rate * kTempTauS));
    const double ou_step_sd = temp_sd * std::sqrt(1.0 - rho * rho);
    double ou = temp_sd * temp_rng.next_gaussian();

    StepCursor slow_cursor{steps};
    std::size_t last_step = 0;
    const double ring_amp = sig.impact_amplitude * kAccelPerImpact;
    for (std::size_t i = 0; i < n_slow; ++i) {
        const double t = static_cast<double>(i) / slow_rate;
        slow.t[i] = t;

        const StepTiming* active = slow_cursor.active(t);
        const std::size_t step_idx = slow_cursor.i;
        const double force = active ? step_force(*active, cycle.press_force_n, t) : 0.0;

        const auto& w = step_weights[active ? step_idx : std::min(last_step, steps.size() - 1)];
        if (active) last_step = step_idx;
        // settle noise models grains shifting load between barometers while
        // the machine holds the total force: zero-sum across channels, so it
        // never disturbs the summed series the segmenter thresholds
        std::array<double, kTactileChannels> shift{};
        if (force > 0.0) {
            double mean_shift = 0.0;
            for (auto& s : shift) {
                s = tactile_rng.next_gaussian();
                mean_shift += s;
            }
            mean_shift /= kTactileChannels;
            const double scale =
                sig.settle_noise_pa * std::sqrt(double(kTactileChannels) / (kTactileChannels - 1));
            for (auto& s : shift) s = scale * (s - mean_shift);
        }
        for (int c = 0; c < kTactileChannels; ++c) {
            double p = w[c] * kTactilePaPerNewton * force + shift[c];
            p += kTactileBaseNoisePa * tactile_rng.next_gaussian();
            p += drift[c] * t;
            slow.tactile[c][i] = p;
        }

        // ring-down excited at touchdown, decaying through the stance
        const StepTiming& ref = steps[step_idx];
        double ax = kAccelBiasX, ay = kAccelBiasY, az = kAccelBiasZ;
        if (t >= ref.press_start) {
            const double dt = t - ref.press_start;
            const double envelope = ring_amp * std::exp(-sig.vib_damping_per_s * dt);
            if (envelope > 1e-6) {
                const double phase = 2.0 * std::numbers::pi * sig.vib_freq_hz * dt + ring_phase[step_idx];
                az += envelope * std::sin(phase);
                ax += 0.35 * envelope * std::sin(phase + 0.6);
                ay += 0.25 * envelope * std::sin(phase + 1.1);
            }
        }
        slow.accel_x[i] = ax + kAccelNoiseRms * accel_rng.next_gaussian();
        slow.accel_y[i] = ay + kAccelNoiseRms * accel_rng.next_gaussian();
        slow.accel_z[i] = az + kAccelNoiseRms * accel_rng.next_gaussian();

        ou = rho * ou + ou_step_sd * temp_rng.next_gaussian();
        slow.temperature[i] = sig.temp_mean_c + ou;
    }

    // ---- fast stream ----
    Rng acoustic_rng(Rng::child_seed(seed, "acoustic"));
    Rng cap_rng(Rng::child_seed(seed, "capacitive"));
    Rng osc_rng(Rng::child_seed(seed, "oscillators"));

    // terrain hum: a small bank of tones inside each spectral band,
    // re-randomized every step, synthesized by complex rotation
    const int n_osc = 9 * kOscPerBand;
    std::vector<double> osc_amp(n_osc);
    std::vector<std::complex<double>> osc_state(n_osc), osc_rot(n_osc);
    const std::array<double, 10> band_edges = [] {
        std::array<double, 10> e{};
        const double lo = 20.0, hi = 9000.0;
        for (int i = 0; i <= 9; ++i) e[i] = lo * std::pow(hi / lo, i / 9.0);
        return e;
    }();
    auto reseed_oscillators = [&](double t0) {
        for (int b = 0; b < 9; ++b) {
            for (int k = 0; k < kOscPerBand; ++k) {
                const int idx = b * kOscPerBand + k;
                const double f = band_edges[b] *
                                 std::pow(band_edges[b + 1] / band_edges[b], osc_rng.next_double());
                const double phase = osc_rng.next_in(0.0, 2.0 * std::numbers::pi);
                osc_amp[idx] = kBandToneAmp * sig.acoustic_bands[b] * (0.85 + 0.3 * osc_rng.next_double());
                osc_state[idx] = std::polar(1.0, phase + 2.0 * std::numbers::pi * f * t0);
                const double w = 2.0 * std::numbers::pi * f / fast_rate;
                osc_rot[idx] = {std::cos(w), std::sin(w)};
            }
        }
    };

    auto& fast = run.fast;
    fast.t.resize(n_fast);
    fast.acoustic.resize(n_fast);
    fast.capacitive.resize(n_fast);

    StepCursor fast_cursor{steps};
    std::size_t armed_step = static_cast<std::size_t>(-1);
    double burst_env = 0.0;
    const double burst_decay = std::exp(-sig.impact_decay_per_s / fast_rate);
    for (std::size_t i = 0; i < n_fast; ++i) {
        const double t = static_cast<double>(i) / fast_rate;
        fast.t[i] = t;

        const StepTiming* active = fast_cursor.active(t);
        const std::size_t step_idx = fast_cursor.i;
        if (active && step_idx != armed_step) {
            armed_step = step_idx;
            burst_env = sig.impact_amplitude;
            reseed_oscillators(t);
        }

        double acoustic = kAcousticBackgroundRms * acoustic_rng.next_gaussian();
        double force = 0.0;
        if (active) {
            force = step_force(*active, cycle.press_force_n, t);
            const double envelope = force / cycle.press_force_n;
            double hum = 0.0;
            for (int k = 0; k < n_osc; ++k) {
                hum += osc_amp[k] * osc_state[k].imag();
                osc_state[k] *= osc_rot[k];
            }
            acoustic += envelope * hum;
            if (burst_env > 1e-5) {
                acoustic += burst_env * acoustic_rng.next_gaussian() * 0.5;
                burst_env *= burst_decay;
            }
        }
        fast.acoustic[i] = std::clamp(acoustic, -1.0, 1.0);

        double cap = sig.cap_baseline_counts * (force / cycle.press_force_n);
        cap += (force > 0.0 ? sig.cap_jitter_counts : kCapRestJitterFrac * sig.cap_jitter_counts) *
               cap_rng.next_gaussian();
        fast.capacitive[i] = cap;
    }

    return run;
}

std::vector<RecordingRun> generate_corpus(const SignatureTable& table, const StepCycleSpec& cycle,
                                          int steps_per_terrain, std::uint64_t seed) {
    std::vector<RecordingRun> runs;
    for_each_corpus_run(table, cycle, steps_per_terrain, seed,
                        [&](RecordingRun&& run) { runs.push_back(std::move(run)); });
    return runs;
}

void for_each_corpus_run(const SignatureTable& table, const StepCycleSpec& cycle,
                         int steps_per_terrain, std::uint64_t seed,
                         const std::function<void(RecordingRun&&)>& sink) {
    for (TerrainClass t : all_terrains())
        if (!table.contains(t))
            throw std::invalid_argument("generate_corpus: missing terrain " +
                                        std::string(terrain_name(t)));
    if (steps_per_terrain < 1)
        throw std::invalid_argument("generate_corpus: steps_per_terrain must be >= 1");

    StepCycleSpec per_run = cycle;
    per_run.n_steps = steps_per_terrain;
    for (TerrainClass t : all_terrains()) {
        const std::uint64_t child =
            Rng::child_seed(seed, "run." + std::string(terrain_name(t)));
        sink(generate_run(t, table.at(t), per_run, child));
    }
}

}  // namespace terrastep
