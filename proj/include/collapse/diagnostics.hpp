#pragma once

/**
 * @file diagnostics.hpp
 * @brief Extraction of the intermediate-asymptotics constants (t0, B, mu)
 *        from simulation series, plus profile-shape metrics.
 *
 * In the collapse regime the asymptotics obey
 *
 *     x_f^2 / h_max = (t0 - t) / (mu F(0)),      x_f = B (t0 - t)^mu,
 *
 * so t0 is the root of the straight line fitted through (t, x_f^2/h_max) and
 * (mu, ln B) are the slope and intercept of ln x_f against ln(t0 - t).  Both
 * fits are ordinary least squares.  The fit window matters: the approach to
 * the asymptote is algebraic, so the window selector anchors itself to the
 * latest stretch of the series (at least a factor-2 internal decay of x_f)
 * and extends earlier only while the running log-log slope stays flat.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "collapse/selfsimilar.hpp"
#include "collapse/timeseries.hpp"

namespace collapse {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed time interval used to restrict a fit.
struct FitWindow {
    double t_begin = 0.0;
    double t_end = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line needs >= 2 matched samples");
    const double n = static_cast<double>(x.size());
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - xm, dy = y[i] - ym;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw FitError("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    f.n = x.size();
    if (syy > 0.0) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (f.slope * x[i] + f.intercept);
            ss_res += r * r;
        }
        f.r2 = std::max(0.0, 1.0 - ss_res / syy);
    } else {
        f.r2 = 1.0;
    }
    return f;
}

struct T0Fit {
    double t0 = 0.0;
    double r2_linear = 0.0;
    double slope = 0.0;
};

struct MuBFit {
    double mu = 0.0;
    double B = 0.0;
    double r2_loglog = 0.0;
};

/// Combined report of the full fitting pipeline.
struct FitResult {
    double t0 = 0.0;
    double B = 0.0;
    double mu = 0.0;
    double r2_linear = 0.0;
    double r2_loglog = 0.0;
    FitWindow window;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> window_index_range(const TimeSeries& s,
                                                              const FitWindow& w) {
    std::size_t a = 0, b = s.records.size();
    while (a < b && s.records[a].t < w.t_begin) ++a;
    while (b > a && s.records[b - 1].t > w.t_end) --b;
    return {a, b};
}

}  // namespace detail

/**
 * @brief Collapse-time estimate from the straight line through
 *        (t, x_f^2/h_max) on the given window.
 *
 * Throws FitError when the window holds fewer than 10 records, the fitted
 * slope is nonnegative, or r^2 < 0.9 (the data is not yet asymptotic).
 */
inline T0Fit fit_t0(const TimeSeries& s, double c, const FitWindow& w) {
    if (!(c > 1.0)) throw std::domain_error("fit_t0 applies to the contracting regimes, c > 1");
    const auto [a, b] = detail::window_index_range(s, w);
    if (b - a < 10) throw FitError("fit_t0: fewer than 10 records in window");
    std::vector<double> t, y;
    t.reserve(b - a);
    y.reserve(b - a);
    for (std::size_t i = a; i < b; ++i) {
        const auto& r = s.records[i];
        const double xf = r.half_width();
        if (!(xf > 0.0) || !(r.h_max > 0.0))
            throw FitError("fit_t0: nonpositive half-width or peak in window");
        t.push_back(r.t);
        y.push_back(xf * xf / r.h_max);
    }
    const LineFit line = fit_line(t, y);
    if (line.slope >= 0.0)
        throw FitError("fit_t0: fitted slope is nonnegative; contraction not yet dominant");
    if (line.r2 < 0.9) throw FitError("fit_t0: r^2 < 0.9; window not in the asymptotic regime");
    return {-line.intercept / line.slope, line.r2, line.slope};
}

/**
 * @brief Power-law fit: slope mu and intercept ln B of ln x_f vs ln(t0 - t).
 */
inline MuBFit fit_mu_B(const TimeSeries& s, double t0, const FitWindow& w) {
    const auto [a, b] = detail::window_index_range(s, w);
    if (b - a < 10) throw FitError("fit_mu_B: fewer than 10 records in window");
    if (!(t0 > s.records[b - 1].t))
        throw FitError("fit_mu_B: t0 does not exceed the window's last time");
    std::vector<double> lt, lx;
    lt.reserve(b - a);
    lx.reserve(b - a);
    for (std::size_t i = a; i < b; ++i) {
        const auto& r = s.records[i];
        lt.push_back(std::log(t0 - r.t));
        lx.push_back(std::log(r.half_width()));
    }
    const LineFit line = fit_line(lt, lx);
    return {line.slope, std::exp(line.intercept), line.r2};
}

struct WindowOptions {
    double slope_band = 0.005;   ///< relative spread of the running slope kept in window
    double decay_factor = 2.0;   ///< minimum internal x_f decay spanned by the window
    double tail_fraction = 5e-3; ///< drop records with x_f below this fraction of x_f(0)
    std::size_t min_records = 10;
};

/**
 * @brief Locate the latest stretch of the series that behaves as a pure
 *        power law.
 *
 * A provisional t0 comes from fit_t0 on the last third of the series.  The
 * window is anchored at the latest usable record, grown backward to span at
 * least a factor decay_factor of x_f contraction, then extended further only
 * while the running slope of ln x_f vs ln(t0_prov - t) stays within
 * slope_band of itself and x_f has decayed at least twofold from its initial
 * value.  Records with x_f below tail_fraction * x_f(0) are excluded: near
 * total collapse the discretization error dominates.
 */
inline FitWindow select_fit_window(const TimeSeries& s, const WindowOptions& opt = {}) {
    const auto& rec = s.records;
    const std::size_t n = rec.size();
    if (n < 50) throw std::invalid_argument("select_fit_window needs >= 50 records");

    double t0p = 0.0;
    try {
        const double t_first = rec.front().t, t_last = rec.back().t;
        t0p = fit_t0(s, s.meta.c > 1.0 ? s.meta.c : 2.0,
                     {t_first + 2.0 / 3.0 * (t_last - t_first), t_last})
                  .t0;
    } catch (const FitError& e) {
        throw WindowNotFound(std::string("no provisional collapse time: ") + e.what());
    }

    const double xf0 = rec.front().half_width();
    std::vector<std::size_t> elig;
    elig.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double xf = rec[i].half_width();
        if (xf >= opt.tail_fraction * xf0 && rec[i].t < t0p && xf > 0.0) elig.push_back(i);
    }
    const std::size_t W = std::max<std::size_t>(10, n / 50);
    if (elig.size() <= W) throw WindowNotFound("too few usable records for a running slope");

    // trailing-window running slope over the eligible records
    std::vector<double> lt(elig.size()), lx(elig.size()), slope(elig.size(), 0.0);
    for (std::size_t k = 0; k < elig.size(); ++k) {
        lt[k] = std::log(t0p - rec[elig[k]].t);
        lx[k] = std::log(rec[elig[k]].half_width());
    }
    for (std::size_t k = W; k < elig.size(); ++k) {
        slope[k] = fit_line(std::span(lt).subspan(k - W, W), std::span(lx).subspan(k - W, W)).slope;
    }

    std::size_t b = elig.size() - 1;
    std::size_t a = b;
    // anchor: minimal latest span with the required internal decay
    while (a > W && rec[elig[a]].half_width() < opt.decay_factor * rec[elig[b]].half_width()) --a;
    if (rec[elig[a]].half_width() < opt.decay_factor * rec[elig[b]].half_width())
        throw WindowNotFound("series does not span the required x_f decay");
    // extend while the running slope stays flat and the factor-2 decay from
    // the initial half-width is preserved
    double lo = slope[a], hi = slope[a];
    for (std::size_t k = a; k <= b; ++k) {
        lo = std::min(lo, slope[k]);
        hi = std::max(hi, slope[k]);
    }
    while (a > W) {
        const double cand = slope[a - 1];
        const double nlo = std::min(lo, cand), nhi = std::max(hi, cand);
        if ((nhi - nlo) / std::abs(0.5 * (nhi + nlo)) >= opt.slope_band) break;
        if (rec[elig[a - 1]].half_width() > 0.5 * xf0) break;
        --a;
        lo = nlo;
        hi = nhi;
    }
    if (b - a + 1 < opt.min_records) throw WindowNotFound("stable window is too short");
    return {rec[elig[a]].t, rec[elig[b]].t};
}

/// Full pipeline: window selection, then the two fits on that window.
inline FitResult fit_series(const TimeSeries& s, double c, const WindowOptions& opt = {}) {
    const FitWindow w = select_fit_window(s, opt);
    const T0Fit tf = fit_t0(s, c, w);
    const MuBFit mb = fit_mu_B(s, tf.t0, w);
    return {tf.t0, mb.B, mb.mu, tf.r2_linear, mb.r2_loglog, w};
}

// ---------------------------------------------------------------------------
// Profile-shape metrics
// ---------------------------------------------------------------------------

namespace detail {

struct Peak {
    double xi = 0.0;
    double h = 0.0;
};

// Parabolic refinement of the discrete maximum through its two neighbors.
inline Peak refine_peak(std::span<const double> xi, std::span<const double> h) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < h.size(); ++i)
        if (h[i] > h[imax]) imax = i;
    if (imax == 0 || imax + 1 == h.size()) return {xi[imax], h[imax]};
    const double d2 = h[imax + 1] - 2.0 * h[imax] + h[imax - 1];
    if (!(d2 < 0.0)) return {xi[imax], h[imax]};
    const double dxi = xi[1] - xi[0];
    const double off = 0.5 * (h[imax - 1] - h[imax + 1]) / d2;
    const double hpk = h[imax] - (h[imax - 1] - h[imax + 1]) * (h[imax - 1] - h[imax + 1]) / (8.0 * d2);
    return {xi[imax] + off * dxi, hpk};
}

inline double interp(std::span<const double> xi, std::span<const double> h, double x) {
    if (x <= xi.front() || x >= xi.back()) return 0.0;
    const double dxi = xi[1] - xi[0];
    auto j = static_cast<std::size_t>((x - xi.front()) / dxi);
    j = std::min(j, xi.size() - 2);
    const double w = (x - xi[j]) / dxi;
    return (1.0 - w) * h[j] + w * h[j + 1];
}

}  // namespace detail

/**
 * @brief Sup-norm distance of the normalized profile from the self-similar
 *        parabola 1 - xi^2, after recentering at the interpolated maximum.
 */
inline double profile_collapse_error(std::span<const double> xi, std::span<const double> h,
                                     double c) {
    if (!(c > 1.0)) throw std::domain_error("collapse profile comparison requires c > 1");
    if (xi.size() != h.size() || xi.size() < 3)
        throw std::invalid_argument("profile_collapse_error needs >= 3 matched samples");
    const auto peak = detail::refine_peak(xi, h);
    if (!(peak.h > 0.0)) throw std::domain_error("profile has no positive peak");
    double worst = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) {
        const double u = xi[i] - peak.xi;
        const double parabola = std::max(0.0, 1.0 - u * u);
        worst = std::max(worst, std::abs(h[i] / peak.h - parabola));
    }
    return worst;
}

inline double profile_collapse_error(const TimeSeries& s, const ProfileSnapshot& snap, double c) {
    return profile_collapse_error(s.xi, snap.h, c);
}

/**
 * @brief Peak-relative asymmetry: sup over offsets d of
 *        |h(xi_peak + d) - h(xi_peak - d)| / h_peak.
 */
inline double asymmetry(std::span<const double> xi, std::span<const double> h) {
    if (xi.size() != h.size() || xi.size() < 3)
        throw std::invalid_argument("asymmetry needs >= 3 matched samples");
    const auto peak = detail::refine_peak(xi, h);
    if (!(peak.h > 0.0)) throw std::domain_error("profile has no positive peak");
    const double dxi = xi[1] - xi[0];
    const double reach = std::max(peak.xi - xi.front(), xi.back() - peak.xi);
    const auto offsets = static_cast<std::size_t>(std::ceil(reach / dxi));
    double worst = 0.0;
    for (std::size_t k = 1; k <= offsets; ++k) {
        const double d = static_cast<double>(k) * dxi;
        worst = std::max(worst, std::abs(detail::interp(xi, h, peak.xi + d) -
                                         detail::interp(xi, h, peak.xi - d)));
    }
    return worst / peak.h;
}

inline double asymmetry(const TimeSeries& s, const ProfileSnapshot& snap) {
    return asymmetry(s.xi, snap.h);
}

// ---------------------------------------------------------------------------
// Synthetic series
// ---------------------------------------------------------------------------

/// Exact series sampled from a closed-form solution (for oracles and plots).
inline TimeSeries series_from_solution(const SelfSimilarSolution& sol, double t_begin,
                                       double t_end, std::size_t samples) {
    if (samples < 2 || !(t_end > t_begin))
        throw std::invalid_argument("series_from_solution: bad sampling request");
    TimeSeries ts;
    ts.meta.run_id = "analytic";
    ts.meta.c = sol.c();
    ts.meta.scheme = "analytic";
    ts.meta.ic_description = "self_similar_exact";
    ts.records.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t =
            t_begin + (t_end - t_begin) * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double xf = sol.half_width(t);
        ts.records.push_back({t, sol.x0() - xf, sol.x0() + xf, sol.h_max(t)});
    }
    return ts;
}

}  // namespace collapse
