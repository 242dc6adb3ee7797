#include "terrastep/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "json.hpp"
#include "terrastep/queue.hpp"

namespace terrastep {

using nlohmann::json;

// ---------------------------------------------------------------------------
// StreamingSegmenter

StreamingSegmenter::StreamingSegmenter(const SegmentationParams& params, double rate_hz,
                                       double window_s)
    : params_(params), rate_hz_(rate_hz), window_s_(window_s) {
    params_.validate();
    if (!(rate_hz > 0.0) || !(window_s > 0.0))
        throw std::invalid_argument("StreamingSegmenter: rate and window must be positive");
    capacity_ = static_cast<std::size_t>(std::ceil(window_s * rate_hz)) + 2;
}

void StreamingSegmenter::trim(double now) {
    const double horizon = now - window_s_;
    while (!t_.empty() && t_.front() < horizon) {
        t_.pop_front();
        v_.pop_front();
    }
    while (t_.size() > capacity_) {
        t_.pop_front();
        v_.pop_front();
    }
    while (!min_q_.empty() && min_q_.front().first < horizon) min_q_.pop_front();
    while (!max_q_.empty() && max_q_.front().first < horizon) max_q_.pop_front();
}

double StreamingSegmenter::threshold() const {
    if (min_q_.empty() || amplitude_ <= 0.0) return std::numeric_limits<double>::infinity();
    return min_q_.front().second + params_.contact_threshold_frac * amplitude_;
}

// Boundary of the contact whose peak is peak_t_: last upward crossing of
// thr before the peak, first downward crossing after, within the buffer.
ContactBoundary StreamingSegmenter::refine(double thr) const {
    const auto peak_it = std::lower_bound(t_.begin(), t_.end(), peak_t_);
    std::size_t peak = static_cast<std::size_t>(peak_it - t_.begin());
    if (peak >= t_.size()) peak = t_.size() - 1;

    std::size_t up = peak;
    while (up > 0 && v_[up - 1] >= thr) --up;
    std::size_t down = peak;
    while (down + 1 < t_.size() && v_[down + 1] >= thr) ++down;
    if (down + 1 < t_.size()) ++down;  // first sample back below threshold

    ContactBoundary b;
    b.t_start = t_[up];
    b.t_end = t_[down];
    // the true peak may sit anywhere in the refined span
    std::size_t arg = up;
    for (std::size_t i = up; i <= down; ++i)
        if (v_[i] > v_[arg]) arg = i;
    b.t_peak = t_[arg];
    return b;
}

bool StreamingSegmenter::valid(const Pending& p, double thr) const {
    return p.peak_value >= thr && (p.bounds.t_end - p.bounds.t_start) >= params_.min_contact_s;
}

void StreamingSegmenter::close_contact(double thr, std::vector<ContactBoundary>& out) {
    Pending candidate;
    candidate.bounds = refine(thr);
    candidate.peak_value = peak_v_;

    if (pending_) {
        if (candidate.bounds.t_peak - pending_->bounds.t_peak < params_.min_step_gap_s) {
            if (valid(*pending_, thr)) {
                // same footstep: widen the pending contact
                pending_->bounds.t_end = candidate.bounds.t_end;
                if (candidate.peak_value > pending_->peak_value) {
                    pending_->peak_value = candidate.peak_value;
                    pending_->bounds.t_peak = candidate.bounds.t_peak;
                }
                return;
            }
            // the pending blob was sub-threshold noise; drop it
        } else if (valid(*pending_, thr)) {
            out.push_back(pending_->bounds);
        }
    }
    pending_ = candidate;
}

std::vector<ContactBoundary> StreamingSegmenter::push(double t, double value) {
    std::vector<ContactBoundary> out;

    t_.push_back(t);
    v_.push_back(value);
    while (!min_q_.empty() && min_q_.back().second >= value) min_q_.pop_back();
    min_q_.emplace_back(t, value);
    while (!max_q_.empty() && max_q_.back().second <= value) max_q_.pop_back();
    max_q_.emplace_back(t, value);
    trim(t);
    amplitude_ = std::max(amplitude_, max_q_.front().second - min_q_.front().second);

    const double thr = threshold();
    if (!above_) {
        if (value >= thr) {
            above_ = true;
            peak_t_ = t;
            peak_v_ = value;
        }
    } else {
        if (value > peak_v_) {
            peak_v_ = value;
            peak_t_ = t;
        }
        if (value < thr) {
            above_ = false;
            close_contact(thr, out);
        }
    }

    // a pending contact becomes final once no later peak can merge with it
    if (pending_ && !above_ && t - pending_->bounds.t_peak >= params_.min_step_gap_s) {
        if (valid(*pending_, thr)) out.push_back(pending_->bounds);
        pending_.reset();
    }
    return out;
}

std::vector<ContactBoundary> StreamingSegmenter::finish() {
    std::vector<ContactBoundary> out;
    const double thr = threshold();
    if (above_) {
        above_ = false;
        close_contact(thr, out);
    }
    if (pending_) {
        if (valid(*pending_, thr)) out.push_back(pending_->bounds);
        pending_.reset();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Streaming pipeline

namespace {

// Running least-squares fit over all samples seen, matching the offline
// whole-run detrend as the stream grows.
struct RunningLine {
    double n = 0, si = 0, sii = 0, sy = 0, siy = 0;

    void add(double i, double y) {
        n += 1;
        si += i;
        sii += i * i;
        sy += y;
        siy += i * y;
    }
    // value of the fitted line at sample index i
    double at(double i) const {
        if (n < 2) return n == 1 ? sy : 0.0;
        const double ibar = si / n, ybar = sy / n;
        const double sxx = sii - n * ibar * ibar;
        const double slope = sxx > 0.0 ? (siy - n * ibar * ybar) / sxx : 0.0;
        return ybar + slope * (i - ibar);
    }
};

struct SlowSample {
    std::size_t index;
    SlowFrame frame;
    double tactile_sum_raw;
};

class StreamingPipeline {
public:
    StreamingPipeline(const ModelArtifact* model, const PipelineConfig& cfg, double fast_rate,
                      double slow_rate)
        : model_(model), cfg_(cfg), fast_rate_(fast_rate),
          segmenter_(cfg.seg, slow_rate, cfg.window_s) {
        if (!cfg_.events_path.empty()) {
            events_out_.open(cfg_.events_path, std::ios::binary);
            if (!events_out_) throw SchemaError("cannot write " + cfg_.events_path);
        }
        if (!cfg_.actuation_log_path.empty()) {
            actuation_out_.open(cfg_.actuation_log_path, std::ios::binary);
            if (!actuation_out_) throw SchemaError("cannot write " + cfg_.actuation_log_path);
        }
    }

    void push_fast(const FastFrame& f) {
        ++fast_seen_;
        fast_.push_back(f);
        const double horizon = f.t - cfg_.window_s;
        while (!fast_.empty() && fast_.front().t < horizon) fast_.pop_front();
    }

    void push_slow(const SlowFrame& f) {
        double sum = 0.0;
        for (int c = 0; c < kTactileChannels; ++c) {
            tactile_fit_[c].add(static_cast<double>(slow_seen_), f.tactile[c]);
            sum += f.tactile[c];
        }
        SlowSample s{slow_seen_, f, sum};
        ++slow_seen_;
        slow_.push_back(s);
        const double horizon = f.t - cfg_.window_s;
        while (!slow_.empty() && slow_.front().frame.t < horizon) slow_.pop_front();

        for (const ContactBoundary& b : segmenter_.push(f.t, sum)) emit(b);
    }

    void finish() {
        for (const ContactBoundary& b : segmenter_.finish()) emit(b);
    }

    const std::vector<StepEvent>& events() const { return events_; }
    std::size_t fast_seen() const { return fast_seen_; }

private:
    void emit(const ContactBoundary& b) {
        // slow slice [t_start, t_end], plus the first sample past the end to
        // mirror the offline inclusive window
        std::vector<const SlowSample*> rows;
        for (const SlowSample& s : slow_)
            if (s.frame.t >= b.t_start && s.frame.t <= b.t_end) rows.push_back(&s);
        if (rows.size() < 2) return;

        const auto t_extract0 = std::chrono::steady_clock::now();

        SegmentWindow win;
        std::array<std::vector<double>, kTactileChannels> tactile;
        std::vector<double> tactile_sum(rows.size(), 0.0);
        std::vector<double> ax, ay, az, temp;
        for (int c = 0; c < kTactileChannels; ++c) tactile[c].resize(rows.size());
        ax.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const SlowSample& s = *rows[i];
            for (int c = 0; c < kTactileChannels; ++c) {
                const double flat =
                    s.frame.tactile[c] - tactile_fit_[c].at(static_cast<double>(s.index));
                tactile[c][i] = flat;
                tactile_sum[i] += flat;
            }
            ax.push_back(s.frame.accel_x);
            ay.push_back(s.frame.accel_y);
            az.push_back(s.frame.accel_z);
            temp.push_back(s.frame.temperature);
        }

        std::vector<double> acoustic, capacitive;
        for (const FastFrame& f : fast_) {
            if (f.t < b.t_start || f.t > b.t_end) continue;
            acoustic.push_back(f.acoustic);
            capacitive.push_back(f.capacitive);
        }
        if (acoustic.size() < 2) return;

        win.accel_x = ax;
        win.accel_y = ay;
        win.accel_z = az;
        win.temperature = temp;
        win.acoustic = acoustic;
        win.capacitive = capacitive;
        for (int c = 0; c < kTactileChannels; ++c) win.tactile[c] = tactile[c];
        win.tactile_sum = tactile_sum;
        win.fast_rate_hz = fast_rate_;

        StepEvent ev;
        ev.step_index = static_cast<int>(events_.size());
        ev.t_start = b.t_start;
        ev.t_end = b.t_end;

        const SpectralBandSpec& bands = model_ ? model_->bands : default_bands_;
        const FeatureVector fv = extract_features(win, bands);
        const auto t_extract1 = std::chrono::steady_clock::now();
        ev.extract_latency_ms =
            std::chrono::duration<double, std::milli>(t_extract1 - t_extract0).count();

        if (model_) {
            const auto t0 = std::chrono::steady_clock::now();
            ev.label = predict(*model_, fv);
            const auto t1 = std::chrono::steady_clock::now();
            ev.classify_latency_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            ev.command = decide(ev.label);
            foot_ = apply(foot_, ev.command);
        }

        if (events_out_) {
            json j{{"step_index", ev.step_index},
                   {"t_start", ev.t_start},
                   {"t_end", ev.t_end},
                   {"label", std::string(terrain_name(ev.label))},
                   {"action", std::string(action_name(ev.command.action))},
                   {"extract_latency_ms", ev.extract_latency_ms},
                   {"classify_latency_ms", ev.classify_latency_ms}};
            events_out_ << j.dump() << '\n';
        }
        if (actuation_out_) {
            json j{{"t", ev.t_end},
                   {"label", std::string(terrain_name(ev.label))},
                   {"action", std::string(action_name(ev.command.action))},
                   {"tarsal_angle_deg", foot_.tarsal_angle_deg},
                   {"contact_area_factor", foot_.contact_area_factor}};
            actuation_out_ << j.dump() << '\n';
        }
        if (cfg_.on_event) cfg_.on_event(ev);
        events_.push_back(ev);
    }

    const ModelArtifact* model_;
    PipelineConfig cfg_;
    double fast_rate_;
    SpectralBandSpec default_bands_ = SpectralBandSpec::log_bands(18000.0);
    StreamingSegmenter segmenter_;
    std::deque<FastFrame> fast_;
    std::deque<SlowSample> slow_;
    std::array<RunningLine, kTactileChannels> tactile_fit_;
    std::vector<StepEvent> events_;
    FootState foot_ = FootState::passive();
    std::ofstream events_out_, actuation_out_;
    std::size_t fast_seen_ = 0, slow_seen_ = 0;
};

struct StreamItem {
    bool is_fast = false;
    FastFrame fast;
    SlowFrame slow;
};

// Replays both streams in time order. Fast frames go first on exact ties,
// so a step finalized by a slow sample already has the simultaneous fast
// data buffered, like the offline slicing.
template <typename FastFn, typename SlowFn>
void replay(const RecordingRun& run, bool realtime, FastFn&& on_fast, SlowFn&& on_slow) {
    const auto start = std::chrono::steady_clock::now();
    std::size_t fi = 0, si = 0;
    const std::size_t nf = run.fast.size(), ns = run.slow.size();
    while (fi < nf || si < ns) {
        const bool take_slow =
            si < ns && (fi >= nf || run.slow.t[si] < run.fast.t[fi]);
        const double t = take_slow ? run.slow.t[si] : run.fast.t[fi];
        if (realtime) {
            std::this_thread::sleep_until(start + std::chrono::duration<double>(t));
        }
        if (take_slow) {
            on_slow(run.slow.frame(si));
            ++si;
        } else {
            on_fast(run.fast.frame(fi));
            ++fi;
        }
    }
}

std::vector<StepEvent> run_pipeline_impl(const RecordingRun& run, const ModelArtifact* model,
                                         const PipelineConfig& cfg, std::size_t* fast_seen) {
    run.validate();
    StreamingPipeline pipe(model, cfg, run.fast.rate_hz, run.slow.rate_hz);

    if (cfg.threaded) {
        BoundedQueue<StreamItem> queue(8192);
        std::thread producer([&] {
            replay(
                run, cfg.realtime,
                [&](const FastFrame& f) { queue.push(StreamItem{true, f, {}}); },
                [&](const SlowFrame& s) { queue.push(StreamItem{false, {}, s}); });
            queue.close();
        });
        while (auto item = queue.pop()) {
            if (item->is_fast)
                pipe.push_fast(item->fast);
            else
                pipe.push_slow(item->slow);
        }
        producer.join();
    } else {
        replay(
            run, cfg.realtime, [&](const FastFrame& f) { pipe.push_fast(f); },
            [&](const SlowFrame& s) { pipe.push_slow(s); });
    }
    pipe.finish();
    if (fast_seen) *fast_seen = pipe.fast_seen();
    return pipe.events();
}

}  // namespace

std::vector<StepEvent> run_pipeline(const RecordingRun& run, const ModelArtifact& model,
                                    const PipelineConfig& cfg) {
    return run_pipeline_impl(run, &model, cfg, nullptr);
}

BenchResult bench_latency(const std::vector<std::string>& model_paths, const RecordingRun& run,
                          int n_steps, const SegmentationParams& seg) {
    if (n_steps < 1) throw std::invalid_argument("bench_latency: n_steps must be >= 1");
    run.validate();
    const std::vector<FootstepSegment> segments = segment(run, seg);
    if (segments.size() < static_cast<std::size_t>(n_steps))
        throw std::invalid_argument("bench_latency: run has " + std::to_string(segments.size()) +
                                    " steps, need " + std::to_string(n_steps));

    BenchResult result;
    result.machine = machine_fingerprint();
    for (const std::string& path : model_paths) {
        const ModelArtifact model = load_model(path);
        std::vector<FeatureVector> features;
        for (int i = 0; i < n_steps; ++i)
            features.push_back(extract_features(run, segments[i], model.bands));

        double total_ms = 0.0;
        for (const FeatureVector& fv : features) {
            const auto t0 = std::chrono::steady_clock::now();
            (void)predict(model, fv);
            const auto t1 = std::chrono::steady_clock::now();
            total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        result.rows.push_back(BenchRow{path, std::string(algo_name(model.algo)), n_steps,
                                       total_ms / n_steps});
    }
    return result;
}

double throughput_ratio(const RecordingRun& run, const SegmentationParams& seg) {
    if (run.fast.size() == 0) return std::numeric_limits<double>::infinity();
    PipelineConfig cfg;
    cfg.seg = seg;
    std::size_t fast_seen = 0;
    const auto t0 = std::chrono::steady_clock::now();
    run_pipeline_impl(run, nullptr, cfg, &fast_seen);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();
    if (seconds <= 0.0) return std::numeric_limits<double>::infinity();
    return (static_cast<double>(fast_seen) / seconds) / run.fast.rate_hz;
}

std::string machine_fingerprint() {
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            std::string name = colon == std::string::npos ? line : line.substr(colon + 1);
            const auto first = name.find_first_not_of(' ');
            if (first != std::string::npos) name = name.substr(first);
            return name + " x" + std::to_string(std::thread::hardware_concurrency());
        }
    }
    return "unknown cpu x" + std::to_string(std::thread::hardware_concurrency());
}

}  // namespace terrastep
