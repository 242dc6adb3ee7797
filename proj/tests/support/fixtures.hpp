#pragma once

// Small synthetic datasets for classifier tests: ten well-separated
// gaussian blobs in the 100-wide feature layout, far cheaper than running
// the full generator.

#include "terrastep/rng.hpp"
#include "terrastep/types.hpp"

namespace fixtures {

inline terrastep::Dataset blob_dataset(std::size_t per_class, std::uint64_t seed,
                                       double spread = 0.5) {
    terrastep::Rng rng(seed);
    terrastep::Dataset ds;
    for (int c = 0; c < terrastep::kNumTerrains; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            terrastep::FeatureVector fv;
            for (std::size_t d = 0; d < terrastep::kFeatureCount; ++d) {
                const double center = 5.0 * c * ((d + c) % 3 == 0 ? 1.0 : -0.4);
                fv.values[d] = center + spread * rng.next_gaussian();
            }
            fv.label = static_cast<terrastep::TerrainClass>(c);
            ds.rows.push_back(fv);
        }
    }
    return ds;
}

}  // namespace fixtures
