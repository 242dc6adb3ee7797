#include "terrastep/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "terrastep/features.hpp"

namespace terrastep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace detail {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw SchemaError("bad numeric field: '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

void write_fast_csv(const FastStream& fast, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path);
    out << "t,acoustic,capacitive\n";
    std::string line;
    for (std::size_t i = 0; i < fast.size(); ++i) {
        line.clear();
        line += detail::format_double(fast.t[i]);
        line += ',';
        line += detail::format_double(fast.acoustic[i]);
        line += ',';
        line += detail::format_double(fast.capacitive[i]);
        line += '\n';
        out << line;
    }
}

void write_slow_csv(const SlowStream& slow, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path);
    out << "t,ax,ay,az,temp,tac0,tac1,tac2,tac3,tac4,tac5,tac6,tac7\n";
    std::string line;
    for (std::size_t i = 0; i < slow.size(); ++i) {
        line.clear();
        line += detail::format_double(slow.t[i]);
        line += ',';
        line += detail::format_double(slow.accel_x[i]);
        line += ',';
        line += detail::format_double(slow.accel_y[i]);
        line += ',';
        line += detail::format_double(slow.accel_z[i]);
        line += ',';
        line += detail::format_double(slow.temperature[i]);
        for (int c = 0; c < kTactileChannels; ++c) {
            line += ',';
            line += detail::format_double(slow.tactile[c][i]);
        }
        line += '\n';
        out << line;
    }
}

void read_fast_csv(FastStream& fast, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,acoustic,capacitive")
        throw SchemaError(path + ": malformed header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) throw SchemaError(path + ": expected 3 columns");
        fast.t.push_back(detail::parse_double(fields[0]));
        fast.acoustic.push_back(detail::parse_double(fields[1]));
        fast.capacitive.push_back(detail::parse_double(fields[2]));
    }
}

void read_slow_csv(SlowStream& slow, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,ax,ay,az,temp,tac0,tac1,tac2,tac3,tac4,tac5,tac6,tac7")
        throw SchemaError(path + ": malformed header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 13) throw SchemaError(path + ": expected 13 columns");
        slow.t.push_back(detail::parse_double(fields[0]));
        slow.accel_x.push_back(detail::parse_double(fields[1]));
        slow.accel_y.push_back(detail::parse_double(fields[2]));
        slow.accel_z.push_back(detail::parse_double(fields[3]));
        slow.temperature.push_back(detail::parse_double(fields[4]));
        for (int c = 0; c < kTactileChannels; ++c)
            slow.tactile[c].push_back(detail::parse_double(fields[5 + c]));
    }
}

}  // namespace

void save_run(const RecordingRun& run, const std::string& dir) {
    run.validate();
    fs::create_directories(dir);

    json meta;
    meta["schema_version"] = 1;
    meta["run_id"] = run.run_id;
    meta["terrain"] = run.terrain ? std::string(terrain_name(*run.terrain)) : "UNKNOWN";
    meta["fast_rate_hz"] = run.fast.rate_hz;
    meta["slow_rate_hz"] = run.slow.rate_hz;
    meta["seed"] = run.seed;
    if (run.truth_boundaries) {
        json bounds = json::array();
        for (const auto& [s, e] : *run.truth_boundaries) bounds.push_back({s, e});
        meta["truth_boundaries"] = bounds;
    } else {
        meta["truth_boundaries"] = nullptr;
    }
    std::ofstream mout(fs::path(dir) / "meta.json", std::ios::binary);
    if (!mout) throw SchemaError("cannot write meta.json in " + dir);
    mout << meta.dump(2) << '\n';

    write_fast_csv(run.fast, (fs::path(dir) / "fast.csv").string());
    write_slow_csv(run.slow, (fs::path(dir) / "slow.csv").string());
}

RecordingRun load_run(const std::string& dir) {
    std::ifstream min(fs::path(dir) / "meta.json", std::ios::binary);
    if (!min) throw SchemaError("cannot open meta.json in " + dir);
    json meta;
    try {
        min >> meta;
    } catch (const json::exception& e) {
        throw SchemaError(dir + "/meta.json: " + e.what());
    }

    RecordingRun run;
    try {
        run.run_id = meta.at("run_id").get<std::string>();
        const std::string terrain = meta.at("terrain").get<std::string>();
        if (terrain != "UNKNOWN") {
            const auto t = parse_terrain(terrain);
            if (!t) throw SchemaError(dir + ": unknown terrain label '" + terrain + "'");
            run.terrain = *t;
        }
        run.fast.rate_hz = meta.at("fast_rate_hz").get<double>();
        run.slow.rate_hz = meta.at("slow_rate_hz").get<double>();
        run.seed = meta.at("seed").get<std::uint64_t>();
        if (!meta.at("truth_boundaries").is_null()) {
            std::vector<std::pair<double, double>> bounds;
            for (const auto& b : meta.at("truth_boundaries"))
                bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
            run.truth_boundaries = std::move(bounds);
        }
    } catch (const json::exception& e) {
        throw SchemaError(dir + "/meta.json: " + e.what());
    }

    read_fast_csv(run.fast, (fs::path(dir) / "fast.csv").string());
    read_slow_csv(run.slow, (fs::path(dir) / "slow.csv").string());
    run.validate();
    return run;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot write " + path);
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) out << names[i] << ',';
    out << "label\n";
    std::string line;
    for (const auto& row : ds.rows) {
        if (!row.label) throw SchemaError("save_dataset: unlabeled row");
        line.clear();
        for (double v : row.values) {
            line += detail::format_double(v);
            line += ',';
        }
        line += terrain_name(*row.label);
        line += '\n';
        out << line;
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty file");

    std::ostringstream expected;
    for (const auto& n : feature_names()) expected << n << ',';
    expected << "label";
    if (line != expected.str())
        throw SchemaError(path + ": header does not match the frozen 100-feature layout");

    Dataset ds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != kFeatureCount + 1)
            throw SchemaError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(kFeatureCount + 1) + " columns, got " +
                              std::to_string(fields.size()));
        FeatureVector fv;
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            fv.values[i] = detail::parse_double(fields[i]);
            if (!std::isfinite(fv.values[i]))
                throw SchemaError(path + ":" + std::to_string(line_no) + ": non-finite feature");
        }
        const auto label = parse_terrain(fields[kFeatureCount]);
        if (!label)
            throw SchemaError(path + ":" + std::to_string(line_no) + ": unknown label '" +
                              std::string(fields[kFeatureCount]) + "'");
        fv.label = *label;
        ds.rows.push_back(fv);
    }
    return ds;
}

}  // namespace terrastep
