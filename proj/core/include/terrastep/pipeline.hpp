#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "terrastep/control.hpp"
#include "terrastep/features.hpp"
#include "terrastep/model.hpp"
#include "terrastep/preprocess.hpp"
#include "terrastep/types.hpp"

namespace terrastep {

struct StepEvent;

struct PipelineConfig {
    SegmentationParams seg;
    bool realtime = false;   // sleep to the sample clock instead of free-running
    bool threaded = false;   // producer/consumer split over a bounded FIFO
    double window_s = 8.0;   // sliding buffer span; bounds pipeline memory
    std::string events_path;         // optional JSONL sink for step events
    std::string actuation_log_path;  // optional JSONL actuation log
    std::function<void(const StepEvent&)> on_event;  // live observer, may be empty
};

struct StepEvent {
    int step_index = 0;
    double t_start = 0.0, t_end = 0.0;
    TerrainClass label = TerrainClass::Metal;
    ActuationCommand command;
    double classify_latency_ms = 0.0;
    double extract_latency_ms = 0.0;
};

struct ContactBoundary {
    double t_start = 0.0, t_end = 0.0, t_peak = 0.0;
};

/// Online footstep detector over the summed raw tactile signal. Keeps a
/// sliding window of window_s seconds; the contact threshold is the window
/// minimum plus the threshold fraction of the largest window peak-to-peak
/// seen so far (drift rides on the window minimum, the contact amplitude is
/// remembered). When a contact closes, its boundaries are re-derived inside
/// the window with the same crossing rules as the offline segmenter, and
/// the contact is held back until no later contact can merge with it (peak
/// gap rule). Contacts whose peak falls below the final threshold are
/// discarded, which suppresses noise blobs seen before the first footstep.
class StreamingSegmenter {
public:
    StreamingSegmenter(const SegmentationParams& params, double rate_hz, double window_s);

    /// Feeds one sample; returns contacts finalized by it.
    std::vector<ContactBoundary> push(double t, double value);
    /// Flushes at end of stream.
    std::vector<ContactBoundary> finish();

    std::size_t max_buffer_samples() const { return capacity_; }

private:
    struct Pending {
        ContactBoundary bounds;
        double peak_value = 0.0;
    };

    void trim(double now);
    double threshold() const;
    ContactBoundary refine(double thr) const;
    bool valid(const Pending& p, double thr) const;
    void close_contact(double thr, std::vector<ContactBoundary>& out);

    SegmentationParams params_;
    double rate_hz_;
    double window_s_;
    std::size_t capacity_;
    std::deque<double> t_, v_;
    std::deque<std::pair<double, double>> min_q_, max_q_;  // monotonic (t, v)
    double amplitude_ = 0.0;  // running max of window peak-to-peak
    bool above_ = false;
    double peak_t_ = 0.0, peak_v_ = 0.0;
    std::optional<Pending> pending_;
};

/// Emulates the dual-path runtime on a recorded run: frames are replayed at
/// their timestamps (or as fast as possible), footsteps detected online,
/// features extracted at step end, classified, and turned into actuation
/// commands. Labels match the offline pipeline on synthetic fixtures.
std::vector<StepEvent> run_pipeline(const RecordingRun& run, const ModelArtifact& model,
                                    const PipelineConfig& cfg);

struct BenchRow {
    std::string model_path;
    std::string algo;
    int steps = 0;
    double mean_ms = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::string machine;
};

/// Mean per-step predict latency for each model over the first n_steps
/// footsteps of the run. Throws when the run has fewer steps.
BenchResult bench_latency(const std::vector<std::string>& model_paths, const RecordingRun& run,
                          int n_steps = 10, const SegmentationParams& seg = {});

/// (fast samples consumed per wall second) / fast rate, free-running.
/// Returns +inf for an empty run.
double throughput_ratio(const RecordingRun& run, const SegmentationParams& seg = {});

/// CPU model string recorded alongside benchmark numbers.
std::string machine_fingerprint();

}  // namespace terrastep
