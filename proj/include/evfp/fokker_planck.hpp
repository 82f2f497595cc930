#pragma once

#include <stdexcept>

#include "evfp/grid.hpp"

namespace evfp {

/// Parameters of one diffusion step. The scale factor is frozen at the
/// step-midpoint value supplied by the splitting integrator.
struct FPStepParams {
    double sigma;  // diffusion constant, >= 0
    double a;      // scale factor, > 0
    double dt;     // time increment, > 0
};

/// Crank-Nicolson produced negatives beyond the undershoot tolerance;
/// the caller retries with a smaller dt (never clamps).
class fp_undershoot_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Undershoot tolerance relative to max_i F_i.
inline constexpr double undershoot_tol = 1e-12;

/// Continuum radial flux coefficient r^2 sqrt(a^2 + r^2).
double radial_face_coefficient(double a, double r);

/// dF/dt = sigma a (1/r^2) d/dr(C(r) dF/dr) evaluated on the grid with
/// zero-flux faces at r=0 and r=r_max. Symmetric under the r^2 dr weight.
std::vector<double> fp_generator_apply(const RadialDistribution& F, double sigma, double a);

/// One conservative Crank-Nicolson step. Preserves the discrete particle
/// number 4*pi*sum F_i r_i^2 dr to round-off and does not increase the
/// discrete L2 norm.
RadialDistribution fp_step(const RadialDistribution& F, const FPStepParams& p);

}  // namespace evfp
