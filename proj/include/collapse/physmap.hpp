#pragma once

/**
 * @file physmap.hpp
 * @brief Reduction of physical rock/fluid parameters to the canonical
 *        filtration-absorption equation.
 *
 * Gently sloping groundwater flow over an impermeable bed, with partial
 * absorption of the receding fluid into the rock matrix, is governed by
 *
 *     m(1-a) dh/dt = kappa * ( h h_xx + (1 - a m/m1) h_x^2 ),
 *     kappa = rho g k / mu_f.
 *
 * Rescaling x by sqrt(kappa / (m (1-a))) turns this into the canonical form
 *
 *     dh/dt = h h_xx - (c-1) h_x^2,     c = a m / m1,
 *
 * so the whole parameter set collapses to the single absorption coefficient c.
 * In a non-fissurized medium (m1 = m) c = a < 1; only a fissurized rock
 * (fissure porosity m1 much below block porosity m) can push c above 1.
 */

#include <cmath>
#include <stdexcept>

namespace collapse {

/// Physical description of the rock/fluid pair. SI units throughout.
struct RockFluidParams {
    double permeability = 0.0;        ///< k [m^2]
    double block_porosity = 0.0;      ///< m, 0 < m < 1
    double fissure_porosity = 0.0;    ///< m1, 0 < m1 <= m
    double absorption_fraction = 0.0; ///< a, 0 <= a < 1
    double density = 0.0;             ///< rho [kg/m^3]
    double viscosity = 0.0;           ///< mu_f [Pa s]
    double gravity = 9.80665;         ///< g [m/s^2], standard gravity by default
};

/// Result of the parameter reduction.
struct CanonicalReduction {
    double c = 0.0;           ///< absorption coefficient a*m/m1
    double space_scale = 0.0; ///< factor sqrt(kappa/(m(1-a))) dividing x
    double kappa = 0.0;       ///< rho*g*k/mu_f, joint rock/fluid property
};

inline void validate(const RockFluidParams& p) {
    if (!(p.permeability > 0.0)) throw std::domain_error("permeability must be positive");
    if (!(p.block_porosity > 0.0) || !(p.block_porosity < 1.0))
        throw std::domain_error("block_porosity must lie in (0,1)");
    if (!(p.fissure_porosity > 0.0)) throw std::domain_error("fissure_porosity must be positive");
    if (p.fissure_porosity > p.block_porosity)
        throw std::domain_error("fissure_porosity must not exceed block_porosity");
    if (!(p.absorption_fraction >= 0.0) || !(p.absorption_fraction < 1.0))
        throw std::domain_error("absorption_fraction must lie in [0,1)");
    if (!(p.density > 0.0)) throw std::domain_error("density must be positive");
    if (!(p.viscosity > 0.0)) throw std::domain_error("viscosity must be positive");
    if (!(p.gravity > 0.0)) throw std::domain_error("gravity must be positive");
}

/**
 * @brief Reduce physical parameters to the canonical coefficient c and the
 *        space rescaling factor.
 *
 * c = a m / m1,  kappa = rho g k / mu_f,  space_scale = sqrt(kappa/(m(1-a))).
 */
inline CanonicalReduction reduce(const RockFluidParams& p) {
    validate(p);
    CanonicalReduction r;
    r.kappa = p.density * p.gravity * p.permeability / p.viscosity;
    r.c = p.absorption_fraction * p.block_porosity / p.fissure_porosity;
    r.space_scale = std::sqrt(r.kappa / (p.block_porosity * (1.0 - p.absorption_fraction)));
    return r;
}

}  // namespace collapse
