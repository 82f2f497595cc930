#include "evfp/fokker_planck.hpp"

#include <algorithm>
#include <cmath>

namespace evfp {

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Interior face coefficients, discretely compatible with the energy moment:
// C_f = r_i r_{i+1} (E_i + E_{i+1}) / 2 with E = sqrt(a^2 + r^2), so that
// sum_i E_i (L F)_i r_i^2 dr = 3 sum_i F_i r_i^2 dr - (last-cell leak)
// holds exactly. Boundary faces carry zero flux.
std::vector<double> face_coefficients(const RadialGrid& g, double a) {
    const int n = g.n_cells;
    std::vector<double> C(n + 1, 0.0);
    double E_prev = std::sqrt(a * a + g.centers[0] * g.centers[0]);
    for (int f = 1; f < n; ++f) {
        const double E = std::sqrt(a * a + g.centers[f] * g.centers[f]);
        C[f] = g.centers[f - 1] * g.centers[f] * 0.5 * (E_prev + E);
        E_prev = E;
    }
    return C;
}

void check_params(const FPStepParams& p) {
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma))
        throw std::invalid_argument("fp_step: sigma must be >= 0");
    if (!(p.a > 0.0) || !std::isfinite(p.a))
        throw std::invalid_argument("fp_step: a must be positive");
    if (!(p.dt > 0.0) || !std::isfinite(p.dt))
        throw std::invalid_argument("fp_step: dt must be positive");
}

}  // namespace

double radial_face_coefficient(double a, double r) {
    return r * r * std::sqrt(a * a + r * r);
}

std::vector<double> fp_generator_apply(const RadialDistribution& F, double sigma, double a) {
    const RadialGrid& g = *F.grid;
    const int n = g.n_cells;
    const auto C = face_coefficients(g, a);
    std::vector<double> out(n);
    const double inv_dr2 = 1.0 / (g.dr * g.dr);
    double flux_lo = 0.0;  // zero flux at r = 0
    for (int i = 0; i < n; ++i) {
        const double flux_hi = i + 1 < n ? C[i + 1] * (F.values[i + 1] - F.values[i]) : 0.0;
        out[i] = sigma * a * inv_dr2 * (flux_hi - flux_lo) / (g.centers[i] * g.centers[i]);
        flux_lo = flux_hi;
    }
    return out;
}

RadialDistribution fp_step(const RadialDistribution& F, const FPStepParams& p) {
    check_params(p);
    if (!all_finite(F.values))
        throw std::runtime_error("fp_step: non-finite input state");

    const RadialGrid& g = *F.grid;
    const int n = g.n_cells;
    const auto C = face_coefficients(g, p.a);

    // Increment form of Crank-Nicolson: (I - (dt/2) L) dF = dt L F, then
    // F += dF. Fluxes are built from differences of F, so the flat states
    // (sigma = 0, constant F) are exact fixed points and the solve stays
    // well-conditioned when sigma a dt / dr^2 is enormous.
    std::vector<double> diag(n), lower(n), upper(n), rhs(n);
    const double w = p.sigma * p.a * p.dt / (2.0 * g.dr * g.dr);
    double flux_lo = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lam = w / (g.centers[i] * g.centers[i]);
        const double cl = C[i];
        const double cr = i + 1 <= n ? C[i + 1] : 0.0;
        const double flux_hi = i + 1 < n ? C[i + 1] * (F.values[i + 1] - F.values[i]) : 0.0;
        diag[i] = 1.0 + lam * (cl + cr);
        lower[i] = -lam * cl;
        upper[i] = -lam * cr;
        rhs[i] = 2.0 * lam * (flux_hi - flux_lo);
        flux_lo = flux_hi;
    }

    // Thomas algorithm; the matrix is strictly diagonally dominant.
    std::vector<double> cp(n), dp(n);
    cp[0] = upper[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        const double m = diag[i] - lower[i] * cp[i - 1];
        cp[i] = upper[i] / m;
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m;
    }
    RadialDistribution out;
    out.grid = F.grid;
    out.values.resize(n);
    double dF = dp[n - 1];
    out.values[n - 1] = F.values[n - 1] + dF;
    for (int i = n - 2; i >= 0; --i) {
        dF = dp[i] - cp[i] * dF;
        out.values[i] = F.values[i] + dF;
    }

    if (!all_finite(out.values))
        throw std::runtime_error("fp_step: tridiagonal solve produced non-finite values");
    const double mx = std::max(0.0, *std::max_element(out.values.begin(), out.values.end()));
    const double mn = *std::min_element(out.values.begin(), out.values.end());
    if (mn < -undershoot_tol * mx)
        throw fp_undershoot_error("fp_step: undershoot beyond tolerance, retry with smaller dt");
    return out;
}

}  // namespace evfp
