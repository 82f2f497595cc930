#pragma once

#include <memory>
#include <vector>

namespace evfp {

/// Uniform cell-centered grid on [0, r_max] for the momentum modulus.
/// Faces sit at i*dr with faces[0] = 0 and faces[n_cells] = r_max exactly;
/// centers at (i+1/2)*dr.
struct RadialGrid {
    int n_cells;
    double r_max;
    double dr;
    std::vector<double> centers;  // size n_cells
    std::vector<double> faces;    // size n_cells + 1
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Requires n_cells >= 8 and r_max > 0.
GridPtr build_grid(int n_cells, double r_max);

/// Named isotropic initial profiles.
struct Profile {
    enum class Kind { Zero, Gaussian, Ball };
    Kind kind = Kind::Zero;
    double amplitude = 0.0;
    double width = 0.0;   // gaussian: F = A exp(-r^2/w^2)
    double radius = 0.0;  // ball:     F = A for r <= radius, else 0

    static Profile zero();
    static Profile gaussian(double amplitude, double width);
    static Profile ball(double amplitude, double radius);
};

/// Cell-centered samples of the isotropic distribution F(t, |v|).
/// Immutable by convention: every update produces a new snapshot.
struct RadialDistribution {
    GridPtr grid;
    std::vector<double> values;
};

RadialDistribution sample_profile(const Profile& profile, const GridPtr& grid);

/// Analytic fraction of a gaussian profile's mass lying beyond r_max.
double gaussian_tail_fraction(double width, double r_max);

}  // namespace evfp
