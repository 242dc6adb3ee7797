#pragma once

#include <string>

#include "terrastep/types.hpp"

namespace terrastep {

// Run files are directories: meta.json + fast.csv (t,acoustic,capacitive)
// + slow.csv (t,ax,ay,az,temp,tac0..tac7). Doubles are rendered with the
// shortest round-trip decimal form, so save/load is bit-exact.

void save_run(const RecordingRun& run, const std::string& dir);
RecordingRun load_run(const std::string& dir);

// Dataset files: features.csv with the 100 frozen feature columns + label.

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

namespace detail {
/// Shortest decimal rendering that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);  // throws SchemaError on garbage
}  // namespace detail

}  // namespace terrastep
