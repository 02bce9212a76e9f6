#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace collapse {

/// One per-step record of the front positions and peak level.
struct SeriesRecord {
    double t = 0.0;
    double x_left = 0.0;
    double x_right = 0.0;
    double h_max = 0.0;

    double half_width() const { return 0.5 * (x_right - x_left); }
    double center() const { return 0.5 * (x_right + x_left); }
};

/// Full level profile stored every snapshot_every steps.
struct ProfileSnapshot {
    std::int64_t step = 0;
    double t = 0.0;
    double x_left = 0.0;
    double x_right = 0.0;
    std::vector<double> h;  ///< on the shared xi grid of the run

    double half_width() const { return 0.5 * (x_right - x_left); }
    double center() const { return 0.5 * (x_right + x_left); }
};

struct RunMetadata {
    std::string run_id = "run";
    double c = 0.0;
    std::string scheme;  ///< "explicit" | "implicit" | "analytic"
    int subintervals = 0;
    double dt = 0.0;
    std::string ic_description;
    std::string termination;  ///< stop rule or abort cause
};

struct TimeSeries {
    RunMetadata meta;
    std::vector<double> xi;  ///< grid nodes, shared by all snapshots
    std::vector<SeriesRecord> records;
    std::vector<ProfileSnapshot> snapshots;
};

}  // namespace collapse
