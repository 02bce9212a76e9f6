#pragma once

/**
 * @file selfsimilar.hpp
 * @brief Closed-form self-similar solutions of the filtration-absorption
 *        equation dh/dt = h h_xx - (c-1) h_x^2 across all absorption regimes.
 *
 * For c > 3/2 the dome collapses in finite time t0:
 *
 *     h(x,t) = B^2 mu (t0-t)^(2mu-1) F((x-x0)/x_f),   x_f = B (t0-t)^mu,
 *     F(xi)  = (1-xi^2) / (2(c-1)),                   mu  = (c-1)/(2c-3),
 *
 * equivalently h = B^2/(2(2c-3)) (t0-t)^(1/(2c-3)) [1 - (x-x0)^2/x_f^2].
 * For 1 < c < 3/2 the same profile decays forever as a power law,
 *
 *     h_max(t) = B^2/(2(3-2c)) (t0+t)^(-1/(3-2c)),
 *     x_f(t)   = B (t0+t)^(-(c-1)/(3-2c)),
 *
 * and exactly at c = 3/2 the decay is exponential:
 *
 *     h = C^2 e^(-2t/Theta) [1 - (x-x0)^2/(C^2 Theta e^(-2t/Theta))],
 *     x_f = C sqrt(Theta) e^(-t/Theta).
 *
 * The amplitude constant B is stored internally as log(B) so that the
 * c -> 3/2 limit constructions, whose B over/underflows double precision,
 * evaluate without special casing.
 */

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace collapse {

/// Qualitative behavior of the self-similar family as a function of c.
enum class Regime {
    WeakAbsorption,      ///< 0 <= c < 1: support expands (porous-medium-like)
    DegenerateUnit,      ///< c = 1: degenerate borderline case
    PowerLawDecay,       ///< 1 < c < 3/2: support contracts forever, power-law decay
    ExponentialBoundary, ///< c = 3/2: exponential contraction, support never vanishes
    FiniteTimeCollapse,  ///< c > 3/2: support shrinks to a point at finite t0
};

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::WeakAbsorption: return "weak_absorption";
        case Regime::DegenerateUnit: return "degenerate_unit";
        case Regime::PowerLawDecay: return "power_law_decay";
        case Regime::ExponentialBoundary: return "exponential_boundary";
        case Regime::FiniteTimeCollapse: return "finite_time_collapse";
    }
    return "unknown";
}

/// Absorption coefficient together with its regime classification.
struct AbsorptionParams {
    double c = 0.0;
    Regime regime = Regime::WeakAbsorption;
};

/// Classify a nonnegative absorption coefficient.
inline AbsorptionParams classify(double c) {
    if (!std::isfinite(c) || c < 0.0)
        throw std::domain_error("absorption coefficient must be finite and nonnegative");
    AbsorptionParams p;
    p.c = c;
    if (c < 1.0)
        p.regime = Regime::WeakAbsorption;
    else if (c == 1.0)
        p.regime = Regime::DegenerateUnit;
    else if (c < 1.5)
        p.regime = Regime::PowerLawDecay;
    else if (c == 1.5)
        p.regime = Regime::ExponentialBoundary;
    else
        p.regime = Regime::FiniteTimeCollapse;
    return p;
}

/**
 * @brief Similarity exponent mu = (c-1)/(2c-3) for the collapse regime.
 *
 * Strictly decreasing on (3/2, inf) with limit 1/2 as c -> inf.
 */
inline double mu_of_c(double c) {
    if (!std::isfinite(c) || c <= 1.5)
        throw std::domain_error("mu_of_c requires c > 3/2");
    return (c - 1.0) / (2.0 * c - 3.0);
}

/// Whether evaluators outside the support return 0 or throw.
enum class SupportPolicy { ZeroOutside, Strict };

/**
 * @brief Normalized dome profile F(xi) = (1-xi^2)/(2(c-1)) on |xi| <= 1.
 *
 * F solves F F'' - (c-1) F'^2 - xi F' + ((2mu-1)/mu) F = 0 with
 * F'(0) = 0, F(1) = 0 and the flux condition F'(1) = -1/(c-1).
 */
inline double profile_F(double xi, double c, SupportPolicy policy = SupportPolicy::Strict) {
    if (!(c > 1.0)) throw std::domain_error("profile_F requires c > 1");
    if (std::abs(xi) > 1.0) {
        if (policy == SupportPolicy::Strict)
            throw std::domain_error("profile_F: |xi| > 1 is outside the dome");
        return 0.0;
    }
    return (1.0 - xi * xi) / (2.0 * (c - 1.0));
}

/**
 * @brief One member of the self-similar family, valid for c > 1, c != 3/2.
 *
 * Collapse regime (c > 3/2): defined for t < t0, support half-width
 * B (t0-t)^mu.  Decay regime (1 < c < 3/2): defined for t0 + t > 0,
 * half-width B (t0+t)^(-(c-1)/(3-2c)).
 */
class SelfSimilarSolution {
  public:
    SelfSimilarSolution(double c, double B, double t0, double x0 = 0.0)
        : SelfSimilarSolution(c, check_log(B), t0, x0, 0) {}

    /// Construct from log(B); needed when B itself is not representable.
    static SelfSimilarSolution with_log_scale(double c, double log_B, double t0,
                                              double x0 = 0.0) {
        return SelfSimilarSolution(c, log_B, t0, x0, 0);
    }

    double c() const { return c_; }
    double B() const { return std::exp(log_B_); }
    double log_B() const { return log_B_; }
    double t0() const { return t0_; }
    double x0() const { return x0_; }
    Regime regime() const { return regime_; }

    /// Similarity exponent mu (collapse regime only).
    double mu() const {
        if (regime_ != Regime::FiniteTimeCollapse)
            throw std::domain_error("mu is defined for the collapse regime only");
        return mu_of_c(c_);
    }

    /// Exponent p in x_f = B tau^p, with tau = t0-t (collapse) or t0+t (decay).
    double width_exponent() const {
        return regime_ == Regime::FiniteTimeCollapse ? mu_of_c(c_)
                                                     : -(c_ - 1.0) / (3.0 - 2.0 * c_);
    }

    /// Exponent q in h_max proportional to tau^q.
    double height_exponent() const {
        return regime_ == Regime::FiniteTimeCollapse ? 1.0 / (2.0 * c_ - 3.0)
                                                     : -1.0 / (3.0 - 2.0 * c_);
    }

    /// Support half-width at time t.
    double half_width(double t) const {
        return std::exp(log_B_ + width_exponent() * log_tau(t));
    }

    /// Peak level h(x0, t).
    double h_max(double t) const { return amplitude(t) * profile_F(0.0, c_); }

    /**
     * @brief Level h(x, t); zero outside the support unless the strict policy
     *        is requested.
     */
    double evaluate(double x, double t,
                    SupportPolicy policy = SupportPolicy::ZeroOutside) const {
        const double xf = half_width(t);
        const double xi = (x - x0_) / xf;
        if (std::abs(xi) >= 1.0) {
            if (policy == SupportPolicy::Strict)
                throw std::domain_error("evaluation point is outside the dome support");
            return 0.0;
        }
        return amplitude(t) * profile_F(xi, c_);
    }

  private:
    SelfSimilarSolution(double c, double log_B, double t0, double x0, int)
        : c_(c), log_B_(log_B), t0_(t0), x0_(x0) {
        if (!std::isfinite(c) || !std::isfinite(log_B) || !std::isfinite(t0))
            throw std::domain_error("self-similar parameters must be finite");
        const Regime r = classify(c).regime;
        if (r != Regime::FiniteTimeCollapse && r != Regime::PowerLawDecay)
            throw std::domain_error(
                "closed-form self-similar solutions require 1 < c < 3/2 or c > 3/2");
        regime_ = r;
    }

    static double check_log(double B) {
        if (!(B > 0.0)) throw std::domain_error("similarity constant B must be positive");
        return std::log(B);
    }

    // log of tau = t0 - t (collapse, requires t < t0) or t0 + t (decay).
    double log_tau(double t) const {
        if (regime_ == Regime::FiniteTimeCollapse) {
            if (!(t < t0_))
                throw std::domain_error("collapse solution requires t < t0");
            return std::log(t0_ - t);
        }
        if (!(t0_ + t > 0.0))
            throw std::domain_error("decay solution requires t0 + t > 0");
        return std::log(t0_ + t);
    }

    // Amplitude of the F-factorization: h = amplitude(t) * F(xi).
    // Collapse: B^2 mu tau^(2mu-1); decay: the matching Eq-form prefactor,
    // B^2 (c-1)/(3-2c) tau^(-1/(3-2c)) which times F(0) gives h_max above.
    double amplitude(double t) const {
        const double lt = log_tau(t);
        if (regime_ == Regime::FiniteTimeCollapse) {
            const double m = mu_of_c(c_);
            return m * std::exp(2.0 * log_B_ + (2.0 * m - 1.0) * lt);
        }
        const double pre = (c_ - 1.0) / (3.0 - 2.0 * c_);
        return pre * std::exp(2.0 * log_B_ - 1.0 / (3.0 - 2.0 * c_) * lt);
    }

    double c_;
    double log_B_;
    double t0_;
    double x0_;
    Regime regime_ = Regime::FiniteTimeCollapse;
};

/**
 * @brief The c = 3/2 boundary solution with exponentially contracting support.
 */
class ExponentialLimitSolution {
  public:
    ExponentialLimitSolution(double C, double Theta, double x0 = 0.0)
        : C_(C), Theta_(Theta), x0_(x0) {
        if (!(C > 0.0) || !(Theta > 0.0))
            throw std::domain_error("exponential solution requires C > 0 and Theta > 0");
    }

    double C() const { return C_; }
    double Theta() const { return Theta_; }
    double x0() const { return x0_; }

    /// Half-width x_f = C sqrt(Theta) exp(-t/Theta); positive for all t.
    double half_width(double t) const {
        return C_ * std::sqrt(Theta_) * std::exp(-t / Theta_);
    }

    double h_max(double t) const { return C_ * C_ * std::exp(-2.0 * t / Theta_); }

    double evaluate(double x, double t,
                    SupportPolicy policy = SupportPolicy::ZeroOutside) const {
        const double xf = half_width(t);
        const double u = (x - x0_) / xf;
        if (std::abs(u) >= 1.0) {
            if (policy == SupportPolicy::Strict)
                throw std::domain_error("evaluation point is outside the dome support");
            return 0.0;
        }
        return h_max(t) * (1.0 - u * u);
    }

  private:
    double C_;
    double Theta_;
    double x0_;
};

/// Which side of c = 3/2 the limit construction approaches from.
enum class LimitSide { FromAbove, FromBelow };

/**
 * @brief Sup-norm discrepancy between the c = 3/2 +- eps power-law solution
 *        and the exponential boundary solution.
 *
 * From above, c = 3/2 + eps is paired with t0 = Theta/(4 eps) and
 * B^2 t0^(1/(2eps)+1) = C^2 Theta; from below, c = 3/2 - eps with the same t0
 * and B t0^(-1/(4eps)+1/2) = C sqrt(Theta).  Either family then converges to
 * the exponential solution as eps -> 0.  The comparison is taken on a fixed
 * grid t in [0, Theta], |x - x0| <= C sqrt(Theta).
 */
inline double limit_consistency_check(double eps, double Theta, double C,
                                      LimitSide side = LimitSide::FromAbove,
                                      double x0 = 0.0) {
    if (!(eps > 0.0) || !(eps <= 0.1))
        throw std::domain_error("limit_consistency_check requires eps in (0, 0.1]");
    const ExponentialLimitSolution target(C, Theta, x0);
    const double t0 = Theta / (4.0 * eps);
    const double log_CrtTheta = std::log(C * std::sqrt(Theta));
    double log_B;
    double c;
    if (side == LimitSide::FromAbove) {
        c = 1.5 + eps;
        log_B = log_CrtTheta - (0.25 / eps + 0.5) * std::log(t0);
    } else {
        c = 1.5 - eps;
        log_B = log_CrtTheta + (0.25 / eps - 0.5) * std::log(t0);
    }
    const auto sol = SelfSimilarSolution::with_log_scale(c, log_B, t0, x0);

    constexpr int kTimeSamples = 21;
    constexpr int kSpaceSamples = 41;
    const double span = C * std::sqrt(Theta);
    double worst = 0.0;
    for (int i = 0; i < kTimeSamples; ++i) {
        const double t = Theta * static_cast<double>(i) / (kTimeSamples - 1);
        for (int j = 0; j < kSpaceSamples; ++j) {
            const double x = x0 - span + 2.0 * span * static_cast<double>(j) / (kSpaceSamples - 1);
            const double d = std::abs(sol.evaluate(x, t) - target.evaluate(x, t));
            worst = std::max(worst, d);
        }
    }
    return worst;
}

}  // namespace collapse
