#pragma once

/**
 * @file io.hpp
 * @brief CSV emission and parsing for series, snapshots and profiles.
 *
 * Numbers are written with 17 significant digits so that a written series
 * reparses to bit-identical doubles.
 */

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "collapse/timeseries.hpp"

namespace collapse::io {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline constexpr const char* kSeriesHeader = "t,x_L,x_R,h_max";

inline std::string series_csv(const TimeSeries& s) {
    std::string out = kSeriesHeader;
    out += '\n';
    for (const auto& r : s.records) {
        out += format_double(r.t);
        out += ',';
        out += format_double(r.x_left);
        out += ',';
        out += format_double(r.x_right);
        out += ',';
        out += format_double(r.h_max);
        out += '\n';
    }
    return out;
}

inline void write_series_csv(const std::filesystem::path& path, const TimeSeries& s) {
    write_text_file(path, series_csv(s));
}

/// Snapshot rows are (xi, h, x_phys) with x_phys = x0 + xi * x_f.
inline std::string snapshot_csv(const TimeSeries& s, const ProfileSnapshot& snap) {
    std::string out = "xi,h,x_phys\n";
    const double xf = snap.half_width();
    const double x0 = snap.center();
    for (std::size_t i = 0; i < snap.h.size(); ++i) {
        out += format_double(s.xi[i]);
        out += ',';
        out += format_double(snap.h[i]);
        out += ',';
        out += format_double(x0 + s.xi[i] * xf);
        out += '\n';
    }
    return out;
}

/// Writes <run_id>_series.csv and <run_id>_snap_<step>.csv into dir.
inline void write_run_outputs(const std::filesystem::path& dir, const TimeSeries& s) {
    std::filesystem::create_directories(dir);
    write_series_csv(dir / (s.meta.run_id + "_series.csv"), s);
    for (const auto& snap : s.snapshots) {
        write_text_file(dir / (s.meta.run_id + "_snap_" + std::to_string(snap.step) + ".csv"),
                        snapshot_csv(s, snap));
    }
}

/// Generic two-column CSV.
inline std::string columns_csv(const std::string& header, const std::vector<double>& a,
                               const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("columns_csv: size mismatch");
    std::string out = header;
    out += '\n';
    for (std::size_t i = 0; i < a.size(); ++i) {
        out += format_double(a[i]);
        out += ',';
        out += format_double(b[i]);
        out += '\n';
    }
    return out;
}

inline TimeSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty series file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSeriesHeader)
        throw std::runtime_error("series file header must be '" + std::string(kSeriesHeader) +
                                 "', got '" + line + "'");
    TimeSeries s;
    s.meta.run_id = path.stem().string();
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        SeriesRecord r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r.t, &r.x_left, &r.x_right, &r.h_max) != 4)
            throw std::runtime_error("bad series row at line " + std::to_string(lineno) + " of " +
                                     path.string());
        s.records.push_back(r);
    }
    for (std::size_t i = 1; i < s.records.size(); ++i)
        if (!(s.records[i].t > s.records[i - 1].t))
            throw std::runtime_error("series times must strictly increase: " + path.string());
    return s;
}

}  // namespace collapse::io
