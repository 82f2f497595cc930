#pragma once

// 3D Cartesian explicit-Euler oracle for the momentum-space diffusion
// operator, used only to validate the radial reduction and fp_step.

#include <functional>
#include <vector>

namespace oracle {

/// Cube [-L, L]^3, n^3 cells, centers chosen so v_{n-1-i} = -v_i exactly.
struct CartesianField {
    int n;
    double L;
    double dv;
    std::vector<double> values;  // index (i*n + j)*n + k

    double& at(int i, int j, int k) { return values[(size_t(i) * n + j) * n + k]; }
    double at(int i, int j, int k) const { return values[(size_t(i) * n + j) * n + k]; }
    double center(int i) const { return (2 * i + 1 - n) * (0.5 * dv); }
};

CartesianField make_field(int n, double L, const std::function<double(double)>& radial_profile);

/// sigma a div(D grad F) with central second-order differences of the flux
/// form and zero ghost values outside the cube.
std::vector<double> cartesian_divergence(const CartesianField& f, double sigma, double a);

/// Explicit-Euler steps of total length dt, split into substeps satisfying
/// the stability bound. Throws std::invalid_argument when even one substep
/// of the requested count violates it.
CartesianField cartesian_step(const CartesianField& f, double sigma, double a, double dt,
                              int substeps);

/// Largest admissible explicit-Euler substep on this grid.
double cartesian_stable_dt(const CartesianField& f, double sigma, double a);

}  // namespace oracle
