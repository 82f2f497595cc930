#pragma once

#include <string>
#include <vector>

namespace evfp {

/// Complementary error function, 2/sqrt(pi) int_x^inf exp(-t^2) dt.
double erfc(double x);

/// Scaled complement exp(x^2) erfc(x); finite for arbitrarily large x > 0.
double erfcx(double x);

enum class Verdict { GlobalGuaranteed, BlowupGuaranteed, Undetermined };

const char* to_string(Verdict v);

struct FiredCriterion {
    std::string name;
    double compared;   // the quantity tested
    double threshold;  // the bound it was compared against
};

struct RegimeVerdict {
    Verdict verdict = Verdict::Undetermined;
    std::vector<FiredCriterion> fired;
    double Sigma0;  // sigma / H0
    double Phi0;    // phi0 / rho0
    double phi_m;   // min{4/N^2, 9/(4 rho0 a0^4)}
    double constraint_residual;
};

/// k in {0,-1}: sigma N / (H0 a0^3).
/// k = 1: (9 sigma N^2 / 4 a0^3) sqrt(pi/2) erfcx(x), x = 9 H0 N / (4 sqrt 2).
double blowup_threshold(double sigma, double N, double H0, double a0, int k);

/// Closed-form classification of constrained initial data. Throws
/// std::invalid_argument on unconstrained input and std::logic_error if a
/// blow-up and a global criterion ever fire together (disjoint by theorem).
RegimeVerdict classify(double N, double rho0, double a0, double H0, double phi0, double sigma,
                       int k);

/// true iff 3 Sigma0 < Phi0 < 1/2; rejects k = 1.
bool corollary_window(double Sigma0, double Phi0, int k);

}  // namespace evfp
