#include "evfp/moments.hpp"

#include <cmath>
#include <stdexcept>

namespace evfp {

namespace {
constexpr double four_pi = 4.0 * M_PI;
}

MomentSet compute_moments(const RadialDistribution& F, double a, double phi, double H) {
    if (!(a > 0.0))
        throw std::invalid_argument("compute_moments: a must be positive");
    const RadialGrid& g = *F.grid;
    double s_n = 0.0, s_e = 0.0, s_p = 0.0, s_l2 = 0.0;
    for (int i = 0; i < g.n_cells; ++i) {
        const double r2 = g.centers[i] * g.centers[i];
        const double e = std::sqrt(a * a + r2);
        const double fr2 = F.values[i] * r2;
        s_n += fr2;
        s_e += fr2 * e;
        s_p += fr2 * (r2 / e);
        s_l2 += F.values[i] * fr2;
    }
    const double a4 = a * a * a * a;
    MomentSet m;
    m.N = four_pi * s_n * g.dr;
    m.rho = four_pi * s_e * g.dr / a4;
    m.P = four_pi * s_p * g.dr / (3.0 * a4);
    m.l2 = std::sqrt(four_pi * s_l2 * g.dr);
    m.q = m.rho + 3.0 * m.P - 2.0 * phi;
    m.ricci = 4.0 * phi - (m.rho + 3.0 * m.P);
    if (H != 0.0)
        m.Q = m.q / (6.0 * H * H);
    return m;
}

double gamma_moment(const RadialDistribution& F, double a, double gamma) {
    if (!(a > 0.0))
        throw std::invalid_argument("gamma_moment: a must be positive");
    if (!(gamma > 0.0))
        throw std::invalid_argument("gamma_moment: gamma must be positive");
    const RadialGrid& g = *F.grid;
    double s = 0.0;
    if (gamma == 1.0) {
        // same accumulation as the energy sum in compute_moments, so that
        // gamma_moment(F, a, 1) tracks rho * a^4 to round-off
        for (int i = 0; i < g.n_cells; ++i) {
            const double r2 = g.centers[i] * g.centers[i];
            s += F.values[i] * r2 * std::sqrt(a * a + r2);
        }
    } else {
        for (int i = 0; i < g.n_cells; ++i) {
            const double r2 = g.centers[i] * g.centers[i];
            s += F.values[i] * r2 * std::pow(a * a + r2, 0.5 * gamma);
        }
    }
    return four_pi * s * g.dr;
}

}  // namespace evfp
