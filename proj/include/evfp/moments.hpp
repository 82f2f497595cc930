#pragma once

#include <optional>

#include "evfp/grid.hpp"

namespace evfp {

/// Velocity-space integrals of F at fixed (a, phi, H).
struct MomentSet {
    double N;      // particle number, 4pi * int F r^2 dr
    double rho;    // energy density,  (4pi/a^4) int F sqrt(a^2+r^2) r^2 dr
    double P;      // pressure, (4pi/3a^4) int F r^2/sqrt(a^2+r^2) r^2 dr
    double l2;     // (4pi int F^2 r^2 dr)^(1/2)
    double q;      // rho + 3P - 2 phi  (= 6 H^2 Q)
    double ricci;  // 4 phi - (rho + 3P)
    std::optional<double> Q;  // q / (6 H^2); absent when H == 0
};

/// Composite midpoint on cell centers; bit-compatible with the particle
/// number conserved by fp_step's telescoping fluxes.
MomentSet compute_moments(const RadialDistribution& F, double a, double phi, double H);

/// 4pi * int F (a^2 + r^2)^(gamma/2) r^2 dr with the same midpoint rule.
/// gamma_moment(F, a, 1) == rho * a^4.
double gamma_moment(const RadialDistribution& F, double a, double gamma);

}  // namespace evfp
