#include "evfp/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace evfp {

GridPtr build_grid(int n_cells, double r_max) {
    if (n_cells < 8)
        throw std::invalid_argument("build_grid: n_cells must be >= 8 (unusable resolution)");
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw std::invalid_argument("build_grid: r_max must be positive and finite");

    auto g = std::make_shared<RadialGrid>();
    g->n_cells = n_cells;
    g->r_max = r_max;
    g->dr = r_max / n_cells;
    g->centers.resize(n_cells);
    g->faces.resize(n_cells + 1);
    for (int i = 0; i < n_cells; ++i)
        g->centers[i] = (i + 0.5) * g->dr;
    for (int i = 0; i <= n_cells; ++i)
        g->faces[i] = i * g->dr;
    g->faces[0] = 0.0;
    g->faces[n_cells] = r_max;  // exact endpoints
    return g;
}

Profile Profile::zero() {
    return Profile{};
}

Profile Profile::gaussian(double amplitude, double width) {
    if (!(amplitude > 0.0) || !(width > 0.0))
        throw std::invalid_argument("gaussian profile: amplitude and width must be positive");
    Profile p;
    p.kind = Kind::Gaussian;
    p.amplitude = amplitude;
    p.width = width;
    return p;
}

Profile Profile::ball(double amplitude, double radius) {
    if (!(amplitude > 0.0) || !(radius > 0.0))
        throw std::invalid_argument("ball profile: amplitude and radius must be positive");
    Profile p;
    p.kind = Kind::Ball;
    p.amplitude = amplitude;
    p.radius = radius;
    return p;
}

RadialDistribution sample_profile(const Profile& profile, const GridPtr& grid) {
    if (!grid)
        throw std::invalid_argument("sample_profile: null grid");
    RadialDistribution F;
    F.grid = grid;
    F.values.assign(grid->n_cells, 0.0);
    switch (profile.kind) {
        case Profile::Kind::Zero:
            break;
        case Profile::Kind::Gaussian:
            for (int i = 0; i < grid->n_cells; ++i) {
                const double u = grid->centers[i] / profile.width;
                F.values[i] = profile.amplitude * std::exp(-u * u);
            }
            break;
        case Profile::Kind::Ball:
            for (int i = 0; i < grid->n_cells; ++i)
                F.values[i] = grid->centers[i] <= profile.radius ? profile.amplitude : 0.0;
            break;
    }
    return F;
}

double gaussian_tail_fraction(double width, double r_max) {
    // int_x^inf e^{-u^2} u^2 du = (x/2) e^{-x^2} + (sqrt(pi)/4) erfc(x),
    // normalized by the full integral sqrt(pi)/4.
    const double x = r_max / width;
    const double sqrt_pi = std::sqrt(M_PI);
    return (2.0 * x / sqrt_pi) * std::exp(-x * x) + std::erfc(x);
}

}  // namespace evfp
