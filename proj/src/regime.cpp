#include "evfp/regime.hpp"

#include <cmath>
#include <stdexcept>

namespace evfp {

namespace {

constexpr double constraint_tol = 1e-10;
const double sqrt_pi = std::sqrt(M_PI);

// phi0 > (3/a0^2) [k_+ + 3 (sigma N / 6)^(2/3)], the beta -> 1 supremum of
// the curvature-energy condition (strict, since beta < 1 is open).
double curvature_energy_threshold(double sigma, double N, double a0, int k) {
    const double k_plus = k > 0 ? 1.0 : 0.0;
    return 3.0 / (a0 * a0) * (k_plus + 3.0 * std::pow(sigma * N / 6.0, 2.0 / 3.0));
}

}  // namespace

double erfc(double x) {
    return std::erfc(x);
}

double erfcx(double x) {
    if (x < 0.0)
        return 2.0 * std::exp(x * x) - erfcx(-x);  // overflows to inf for x << 0, correctly
    if (x < 10.0)
        return std::exp(x * x) * std::erfc(x);
    // asymptotic series: erfcx(x) = (1/(x sqrt(pi))) sum_k (-1)^k (2k-1)!!/(2x^2)^k
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int kk = 1; kk <= 20; ++kk) {
        term *= -(2.0 * kk - 1.0) * inv2x2;
        sum += term;
        if (std::abs(term) < 1e-18) break;
    }
    return sum / (x * sqrt_pi);
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::GlobalGuaranteed: return "GLOBAL_GUARANTEED";
        case Verdict::BlowupGuaranteed: return "BLOWUP_GUARANTEED";
        case Verdict::Undetermined: return "UNDETERMINED";
    }
    return "?";
}

double blowup_threshold(double sigma, double N, double H0, double a0, int k) {
    if (!(H0 > 0.0) || !(a0 > 0.0) || !(N >= 0.0) || !(sigma >= 0.0))
        throw std::invalid_argument("blowup_threshold: requires H0 > 0, a0 > 0, N >= 0, sigma >= 0");
    if (k == 1) {
        const double x = 9.0 * H0 * N / (4.0 * std::sqrt(2.0));
        return 9.0 * sigma * N * N / (4.0 * a0 * a0 * a0) * std::sqrt(M_PI / 2.0) * erfcx(x);
    }
    return sigma * N / (H0 * a0 * a0 * a0);
}

RegimeVerdict classify(double N, double rho0, double a0, double H0, double phi0, double sigma,
                       int k) {
    if (k != -1 && k != 0 && k != 1)
        throw std::invalid_argument("classify: k must be one of {-1, 0, 1}");
    if (!(a0 > 0.0) || !(H0 > 0.0) || !(phi0 > 0.0))
        throw std::invalid_argument("classify: requires a0 > 0, H0 > 0, phi0 > 0");
    if (!(N >= 0.0) || !(rho0 >= 0.0) || !(sigma >= 0.0))
        throw std::invalid_argument("classify: requires N, rho0, sigma >= 0");

    RegimeVerdict out;
    out.Sigma0 = sigma / H0;
    out.Phi0 = phi0 / rho0;  // +inf for vacuum data
    out.phi_m = std::min(4.0 / (N * N), 9.0 / (4.0 * rho0 * std::pow(a0, 4)));

    const double raw = H0 * H0 - (rho0 + phi0) / 3.0 + k / (a0 * a0);
    const double scale =
        std::max({H0 * H0, (rho0 + std::abs(phi0)) / 3.0, 1.0 / (a0 * a0)});
    out.constraint_residual = raw / scale;
    if (std::abs(out.constraint_residual) > constraint_tol)
        throw std::invalid_argument(
            "classify: data violate the Hamiltonian constraint; close them with "
            "initial_data first");

    bool blowup = false, global = false;

    const double b_thr = blowup_threshold(sigma, N, H0, a0, k);
    if (phi0 < b_thr) {
        blowup = true;
        out.fired.push_back({k == 1 ? "blowup-threshold-closed" : "blowup-threshold-flat",
                             phi0, b_thr});
    }

    if (k == 0 || k == -1) {
        const double g1 = 3.0 * sigma * N / (H0 * a0 * a0 * a0);
        if (phi0 >= g1) {
            global = true;
            out.fired.push_back({"global-diffusion-margin", phi0, g1});
        }
    }

    if (k == 1) {
        const double s3 = 3.0 * sigma / H0;
        const double r2 = rho0 * a0 * a0;
        if (s3 <= 1.0 && r2 < 1.5) {
            global = true;
            out.fired.push_back({"global-closed-small-density", r2, 1.5});
        } else if (s3 > 1.0) {
            const double bound = 1.5 * (H0 / (3.0 * sigma)) * std::exp(1.0 - H0 / (3.0 * sigma));
            if (r2 <= bound) {
                global = true;
                out.fired.push_back({"global-closed-small-density", r2, bound});
            }
        }
    }

    {
        const double g3 = curvature_energy_threshold(sigma, N, a0, k);
        if (phi0 > g3) {
            global = true;
            out.fired.push_back({"global-curvature-energy", phi0, g3});
        }
    }

    // Decidable-at-t=0 proxy for the closed-universe phi floor: reported as a
    // candidate only, never as a guarantee (the hypothesis is on lim phi).
    if (k == 1 && phi0 >= out.phi_m)
        out.fired.push_back({"closed-phi-floor-candidate", phi0, out.phi_m});

    if (blowup && global)
        throw std::logic_error(
            "classify: blow-up and global criteria fired together on constrained data; "
            "this contradicts their disjointness");

    out.verdict = blowup ? Verdict::BlowupGuaranteed
                         : (global ? Verdict::GlobalGuaranteed : Verdict::Undetermined);
    return out;
}

bool corollary_window(double Sigma0, double Phi0, int k) {
    if (k != 0 && k != -1)
        throw std::invalid_argument("corollary_window: only k in {0, -1} is covered");
    return 3.0 * Sigma0 < Phi0 && Phi0 < 0.5;
}

}  // namespace evfp
