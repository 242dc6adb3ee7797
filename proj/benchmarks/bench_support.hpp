#pragma once

// Shared fixtures for the microbenchmarks: one short gravel run, segmented
// once, plus a small training corpus for the predict benchmarks.

#include "terrastep/features.hpp"
#include "terrastep/model.hpp"
#include "terrastep/preprocess.hpp"
#include "terrastep/synth.hpp"

namespace bench {

inline const terrastep::RecordingRun& fixture_run() {
    static const terrastep::RecordingRun run = [] {
        terrastep::StepCycleSpec cycle;
        cycle.n_steps = 12;
        return terrastep::generate_run(terrastep::TerrainClass::Gravel,
                                       terrastep::default_signatures().at(terrastep::TerrainClass::Gravel),
                                       cycle, 1234);
    }();
    return run;
}

inline const std::vector<terrastep::FootstepSegment>& fixture_segments() {
    static const auto segments = terrastep::segment(fixture_run(), {});
    return segments;
}

inline const terrastep::Dataset& fixture_dataset() {
    static const terrastep::Dataset ds = [] {
        terrastep::Dataset out;
        const auto bands = terrastep::SpectralBandSpec::log_bands(18000.0);
        terrastep::StepCycleSpec cycle;
        cycle.n_steps = 12;
        terrastep::for_each_corpus_run(
            terrastep::default_signatures(), cycle, 12, 77, [&](terrastep::RecordingRun&& run) {
                for (const auto& seg : terrastep::segment(run, {})) {
                    auto fv = terrastep::extract_features(run, seg, bands);
                    fv.label = run.terrain;
                    out.rows.push_back(std::move(fv));
                }
            });
        return out;
    }();
    return ds;
}

}  // namespace bench
