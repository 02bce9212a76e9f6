#pragma once

/**
 * @file pde_solver.hpp
 * @brief Moving-boundary finite-difference integration of the
 *        filtration-absorption equation.
 *
 * The dome h(x,t) with fronts x_L(t) < x_R(t) is mapped onto the fixed
 * interval xi in [-1,1] via xi = (x - x0(t))/x_f(t), x_f = (x_R - x_L)/2,
 * x0 = (x_R + x_L)/2.  Flux continuity at the degenerate fronts gives the
 * interface law
 *
 *     dx_R/dt = (c-1) h_xi(+1,t) / x_f,   dx_L/dt = (c-1) h_xi(-1,t) / x_f,
 *
 * and after substituting it the transformed equation reads
 *
 *     h_t = 1/x_f^2 [ (c-1) h_xi ((xi+1) h_xi(1,t) - (xi-1) h_xi(-1,t))/2
 *                     + h h_xixi - (c-1) h_xi^2 ].
 *
 * Two forward-in-time, centered-in-space steppers are provided: a fully
 * explicit one and a semi-implicit one that treats the degenerate diffusion
 * term with a lagged coefficient (one tridiagonal solve per step) and the
 * first-order terms explicitly.  Interfaces advance by forward Euler
 * synchronized with the interior update in both schemes.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "collapse/selfsimilar.hpp"
#include "collapse/timeseries.hpp"
#include "collapse/tridiagonal.hpp"

namespace collapse {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Explicit stability monitor tripped, or the state went negative/non-finite.
struct InstabilityDetected : SimulationError {
    using SimulationError::SimulationError;
};

/// The support degenerated mid-step (x_R <= x_L).
struct CollapseReached : SimulationError {
    using SimulationError::SimulationError;
};

/// The lagged-coefficient tridiagonal system lost its pivot.
struct SolverSingular : SimulationError {
    using SimulationError::SimulationError;
};

/// Thrown by run(); carries everything recorded up to the failure.
struct RunAborted : SimulationError {
    RunAborted(const std::string& what, TimeSeries partial)
        : SimulationError(what), series(std::move(partial)) {}
    TimeSeries series;
};

// ---------------------------------------------------------------------------
// Grid and state
// ---------------------------------------------------------------------------

/// Uniform grid on [-1, 1] with an even number of subintervals (node at 0).
struct Grid {
    int subintervals = 202;
    double dxi = 2.0 / 202.0;

    explicit Grid(int n = 202) : subintervals(n), dxi(2.0 / n) {
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("grid subinterval count must be even and >= 8");
    }
    int nodes() const { return subintervals + 1; }
    double xi(int i) const { return -1.0 + dxi * i; }
};

struct SimState {
    double t = 0.0;
    std::vector<double> h;  ///< level at the grid nodes; h.front() == h.back() == 0
    double x_left = 0.0;
    double x_right = 0.0;

    double half_width() const { return 0.5 * (x_right - x_left); }
    double center() const { return 0.5 * (x_right + x_left); }
    double h_max() const { return *std::max_element(h.begin(), h.end()); }
};

enum class Scheme { Explicit, Implicit };

inline const char* scheme_name(Scheme s) {
    return s == Scheme::Explicit ? "explicit" : "implicit";
}

struct StopRule {
    double max_time = std::numeric_limits<double>::infinity();
    double min_halfwidth_fraction = 1e-3;  ///< stop when x_f < frac * x_f(0)
    double min_height_fraction = 1e-6;     ///< stop when h_max < frac * h_max(0)
};

struct SchemeConfig {
    Scheme scheme = Scheme::Explicit;
    double dt = 0.0;  ///< 0 selects the scheme default (1e-5 explicit, 1e-4 implicit)
    int subintervals = 202;
    StopRule stop;
    std::int64_t snapshot_every = 1000;
    double cfl_limit = 0.5;  ///< explicit monitor threshold on h_max dt/(x_f^2 dxi^2)

    double effective_dt() const {
        if (dt > 0.0) return dt;
        return scheme == Scheme::Explicit ? 1e-5 : 1e-4;
    }
    void validate() const {
        if (dt < 0.0 || !std::isfinite(effective_dt()))
            throw std::invalid_argument("dt must be positive");
        if (snapshot_every < 1) throw std::invalid_argument("snapshot_every must be >= 1");
        Grid check(subintervals);
        (void)check;
    }
};

// ---------------------------------------------------------------------------
// Initial conditions
// ---------------------------------------------------------------------------

/// Compactly supported initial level: positive inside (x_left0, x_right0),
/// zero at and beyond the endpoints.
struct InitialCondition {
    double x_left0 = 0.0;
    double x_right0 = 0.0;
    std::function<double(double)> level;
    std::string description;
};

/// Cubic smoothstep 3s^2 - 2s^3 on [0,1].
inline double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }

/**
 * @brief Plateau of the given height with smoothstep ramps of width w down to
 *        zero at the support endpoints.
 */
inline InitialCondition make_smoothed_block(double height, double x_left0, double x_right0,
                                            double w) {
    if (!(height > 0.0)) throw std::domain_error("block height must be positive");
    if (!(x_right0 > x_left0)) throw std::domain_error("block support must have positive width");
    if (!(w > 0.0) || !(w < 0.5 * (x_right0 - x_left0)))
        throw std::domain_error("smoothing width must lie in (0, half support width)");
    InitialCondition ic;
    ic.x_left0 = x_left0;
    ic.x_right0 = x_right0;
    ic.description = "smoothed_block(height=" + std::to_string(height) + ",w=" + std::to_string(w) + ")";
    ic.level = [=](double x) {
        if (x <= x_left0 || x >= x_right0) return 0.0;
        if (x < x_left0 + w) return height * smoothstep((x - x_left0) / w);
        if (x > x_right0 - w) return height * smoothstep((x_right0 - x) / w);
        return height;
    };
    return ic;
}

/**
 * @brief Nonsymmetric pair of parabolas sharing the vertex (1/2, 1):
 *        h0 = -4x^2+4x on (0,1/2) and -(4/9)x^2+(4/9)x+8/9 on (1/2,2).
 */
inline InitialCondition make_nonsymmetric() {
    InitialCondition ic;
    ic.x_left0 = 0.0;
    ic.x_right0 = 2.0;
    ic.description = "nonsymmetric_parabolas";
    ic.level = [](double x) {
        if (x <= 0.0 || x >= 2.0) return 0.0;
        if (x < 0.5) return -4.0 * x * x + 4.0 * x;
        return -(4.0 / 9.0) * x * x + (4.0 / 9.0) * x + 8.0 / 9.0;
    };
    return ic;
}

/// Exact self-similar dome sampled at t_start, for scheme validation runs.
inline InitialCondition make_selfsimilar_ic(double B, double t0, double t_start, double c,
                                            double x0 = 0.0) {
    SelfSimilarSolution sol(c, B, t0, x0);
    if (sol.regime() != Regime::FiniteTimeCollapse)
        throw std::domain_error("self-similar initial condition requires c > 3/2");
    if (!(t_start < t0)) throw std::domain_error("t_start must precede the collapse time");
    const double xf = sol.half_width(t_start);
    InitialCondition ic;
    ic.x_left0 = x0 - xf;
    ic.x_right0 = x0 + xf;
    ic.description = "self_similar(B=" + std::to_string(B) + ",t0=" + std::to_string(t0) +
                     ",t_start=" + std::to_string(t_start) + ")";
    ic.level = [sol, t_start](double x) { return sol.evaluate(x, t_start); };
    return ic;
}

/// Piecewise-linear interpolant of sampled values; support is [x.front(), x.back()].
inline InitialCondition make_custom(std::vector<double> x, std::vector<double> h,
                                    std::string description = "custom") {
    if (x.size() != h.size() || x.size() < 3)
        throw std::domain_error("custom initial condition needs >= 3 samples");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw std::domain_error("custom sample abscissae must increase");
    if (h.front() != 0.0 || h.back() != 0.0)
        throw std::domain_error("custom level must vanish at the support endpoints");
    for (double v : h)
        if (!(v >= 0.0)) throw std::domain_error("custom level must be nonnegative");
    InitialCondition ic;
    ic.x_left0 = x.front();
    ic.x_right0 = x.back();
    ic.description = std::move(description);
    ic.level = [xs = std::move(x), hs = std::move(h)](double xq) {
        if (xq <= xs.front() || xq >= xs.back()) return 0.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), xq);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double w = (xq - xs[j]) / (xs[j + 1] - xs[j]);
        return (1.0 - w) * hs[j] + w * hs[j + 1];
    };
    return ic;
}

// ---------------------------------------------------------------------------
// Steppers
// ---------------------------------------------------------------------------

/// Second-order one-sided estimates of h_xi at xi = -1 and xi = +1.
inline std::pair<double, double> boundary_slopes(const SimState& state, const Grid& grid) {
    const auto& h = state.h;
    const std::size_t n = h.size() - 1;
    const double sl = (-3.0 * h[0] + 4.0 * h[1] - h[2]) / (2.0 * grid.dxi);
    const double sr = (3.0 * h[n] - 4.0 * h[n - 1] + h[n - 2]) / (2.0 * grid.dxi);
    return {sl, sr};
}

namespace detail {

struct StepScratch {
    std::vector<double> next, lower, diag, upper, rhs, tri;
};

inline void check_state(const std::vector<double>& h, double t) {
    for (double v : h) {
        if (!std::isfinite(v))
            throw InstabilityDetected("non-finite level at t = " + std::to_string(t));
        if (v < -1e-12)
            throw InstabilityDetected("negative level " + std::to_string(v) +
                                      " at t = " + std::to_string(t));
    }
}

inline void advance_fronts(SimState& s, double c, double dt, double sl, double sr, double xf) {
    s.x_right += dt * (c - 1.0) * sr / xf;
    s.x_left += dt * (c - 1.0) * sl / xf;
    if (!(s.x_right > s.x_left))
        throw CollapseReached("support degenerated at t = " + std::to_string(s.t));
}

inline void step_explicit_into(const SimState& state, SimState& out, double c,
                               const SchemeConfig& cfg, const Grid& grid) {
    const double dt = cfg.effective_dt();
    const double xf = state.half_width();
    if (!(xf > 0.0)) throw CollapseReached("support already degenerate");
    const auto [sl, sr] = boundary_slopes(state, grid);
    const double dxi = grid.dxi;

    const double ratio = state.h_max() * dt / (xf * xf * dxi * dxi);
    if (ratio > cfg.cfl_limit)
        throw InstabilityDetected("explicit stability monitor: h_max dt/(x_f^2 dxi^2) = " +
                                  std::to_string(ratio) + " > " + std::to_string(cfg.cfl_limit) +
                                  " at t = " + std::to_string(state.t));

    const auto& h = state.h;
    const std::size_t n = h.size() - 1;
    out.h.resize(h.size());
    const double inv_xf2 = 1.0 / (xf * xf);
    for (std::size_t i = 1; i < n; ++i) {
        const double xi = grid.xi(static_cast<int>(i));
        const double d1 = (h[i + 1] - h[i - 1]) / (2.0 * dxi);
        const double d2 = (h[i + 1] - 2.0 * h[i] + h[i - 1]) / (dxi * dxi);
        const double sweep = 0.5 * ((xi + 1.0) * sr - (xi - 1.0) * sl);
        const double rhs = inv_xf2 * ((c - 1.0) * d1 * sweep + h[i] * d2 - (c - 1.0) * d1 * d1);
        out.h[i] = h[i] + dt * rhs;
    }
    out.h[0] = 0.0;
    out.h[n] = 0.0;
    check_state(out.h, state.t);
    for (double& v : out.h) v = std::max(v, 0.0);

    out.t = state.t + dt;
    out.x_left = state.x_left;
    out.x_right = state.x_right;
    advance_fronts(out, c, dt, sl, sr, xf);
}

inline void step_implicit_into(const SimState& state, SimState& out, double c,
                               const SchemeConfig& cfg, const Grid& grid, StepScratch& ws) {
    const double dt = cfg.effective_dt();
    const double xf = state.half_width();
    if (!(xf > 0.0)) throw CollapseReached("support already degenerate");
    const auto [sl, sr] = boundary_slopes(state, grid);
    const double dxi = grid.dxi;

    const auto& h = state.h;
    const std::size_t nn = h.size();
    const std::size_t n = nn - 1;
    ws.lower.assign(nn - 1, 0.0);
    ws.diag.assign(nn, 1.0);
    ws.upper.assign(nn - 1, 0.0);
    ws.rhs.assign(nn, 0.0);
    const double inv_xf2 = 1.0 / (xf * xf);
    // diffusion implicit with lagged coefficient h_i^n; first-order terms explicit
    for (std::size_t i = 1; i < n; ++i) {
        const double xi = grid.xi(static_cast<int>(i));
        const double d1 = (h[i + 1] - h[i - 1]) / (2.0 * dxi);
        const double sweep = 0.5 * ((xi + 1.0) * sr - (xi - 1.0) * sl);
        const double expl = inv_xf2 * ((c - 1.0) * d1 * sweep - (c - 1.0) * d1 * d1);
        const double r = dt * h[i] * inv_xf2 / (dxi * dxi);
        ws.lower[i - 1] = -r;
        ws.diag[i] = 1.0 + 2.0 * r;
        ws.upper[i] = -r;
        ws.rhs[i] = h[i] + dt * expl;
    }
    // identity rows pin h = 0 at both boundaries
    ws.upper[0] = 0.0;
    ws.lower[n - 1] = 0.0;

    out.h.resize(nn);
    try {
        solve_tridiagonal(ws.lower, ws.diag, ws.upper, ws.rhs, out.h, ws.tri);
    } catch (const SingularTridiagonal& e) {
        throw SolverSingular(std::string("implicit step at t = ") + std::to_string(state.t) +
                             ": " + e.what());
    }
    check_state(out.h, state.t);
    for (double& v : out.h) v = std::max(v, 0.0);
    out.h[0] = 0.0;
    out.h[n] = 0.0;

    out.t = state.t + dt;
    out.x_left = state.x_left;
    out.x_right = state.x_right;
    advance_fronts(out, c, dt, sl, sr, xf);
}

}  // namespace detail

/// One explicit forward-in-time, centered-in-space step.
inline SimState step_explicit(const SimState& state, double c, const SchemeConfig& cfg,
                              const Grid& grid) {
    SimState out;
    detail::step_explicit_into(state, out, c, cfg, grid);
    return out;
}

/// One semi-implicit step (lagged-coefficient diffusion, explicit transport).
inline SimState step_implicit(const SimState& state, double c, const SchemeConfig& cfg,
                              const Grid& grid) {
    SimState out;
    detail::StepScratch ws;
    detail::step_implicit_into(state, out, c, cfg, grid, ws);
    return out;
}

// ---------------------------------------------------------------------------
// Run driver
// ---------------------------------------------------------------------------

/// Sample an initial condition onto the transformed grid.
inline SimState initial_state(const InitialCondition& ic, const Grid& grid) {
    if (!ic.level) throw std::invalid_argument("initial condition has no level function");
    if (!(ic.x_right0 > ic.x_left0))
        throw std::invalid_argument("initial support must have positive width");
    SimState s;
    s.t = 0.0;
    s.x_left = ic.x_left0;
    s.x_right = ic.x_right0;
    s.h.resize(grid.nodes());
    const double xf = s.half_width();
    const double x0 = s.center();
    for (int i = 0; i < grid.nodes(); ++i) {
        const double v = ic.level(x0 + grid.xi(i) * xf);
        if (!(v >= -1e-12) || !std::isfinite(v))
            throw std::invalid_argument("initial level is negative or non-finite");
        s.h[i] = std::max(v, 0.0);
    }
    s.h.front() = 0.0;
    s.h.back() = 0.0;
    return s;
}

/**
 * @brief Integrate from an initial condition until a stop rule fires.
 *
 * Records (t, x_L, x_R, h_max) every step and the full profile every
 * snapshot_every steps (plus the initial and final profiles).  On a stepper
 * failure throws RunAborted carrying the series recorded so far, with the
 * last valid state still appended.
 */
inline TimeSeries run(const InitialCondition& ic, double c, const SchemeConfig& cfg,
                      const std::string& run_id = "run") {
    if (!(c > 1.0))
        throw std::invalid_argument("run requires c > 1: the interface law encodes the "
                                    "flux condition of the absorbing regime");
    cfg.validate();
    const Grid grid(cfg.subintervals);

    TimeSeries ts;
    ts.meta.run_id = run_id;
    ts.meta.c = c;
    ts.meta.scheme = scheme_name(cfg.scheme);
    ts.meta.subintervals = cfg.subintervals;
    ts.meta.dt = cfg.effective_dt();
    ts.meta.ic_description = ic.description;
    ts.xi.resize(grid.nodes());
    for (int i = 0; i < grid.nodes(); ++i) ts.xi[i] = grid.xi(i);

    SimState cur = initial_state(ic, grid);
    const double xf0 = cur.half_width();
    const double hmax0 = cur.h_max();
    if (!(hmax0 > 0.0)) throw std::invalid_argument("initial level is identically zero");

    auto record = [&ts](const SimState& s) {
        ts.records.push_back({s.t, s.x_left, s.x_right, s.h_max()});
    };
    auto snapshot = [&ts](const SimState& s, std::int64_t step) {
        ts.snapshots.push_back({step, s.t, s.x_left, s.x_right, s.h});
    };

    record(cur);
    snapshot(cur, 0);

    SimState next;
    detail::StepScratch ws;
    std::int64_t step = 0;
    std::string why;
    try {
        while (true) {
            if (cur.t >= cfg.stop.max_time) {
                why = "max_time";
                break;
            }
            if (cur.half_width() < cfg.stop.min_halfwidth_fraction * xf0) {
                why = "min_halfwidth";
                break;
            }
            if (cur.h_max() < cfg.stop.min_height_fraction * hmax0) {
                why = "min_height";
                break;
            }
            if (cfg.scheme == Scheme::Explicit)
                detail::step_explicit_into(cur, next, c, cfg, grid);
            else
                detail::step_implicit_into(cur, next, c, cfg, grid, ws);
            std::swap(cur, next);
            ++step;
            record(cur);
            if (step % cfg.snapshot_every == 0) snapshot(cur, step);
        }
    } catch (const SimulationError& e) {
        ts.meta.termination = std::string("aborted: ") + e.what();
        if (ts.snapshots.empty() || ts.snapshots.back().step != step) snapshot(cur, step);
        throw RunAborted(e.what(), std::move(ts));
    }
    ts.meta.termination = why;
    if (ts.snapshots.back().step != step) snapshot(cur, step);
    return ts;
}

}  // namespace collapse
