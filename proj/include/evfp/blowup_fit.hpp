#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "evfp/cosmo.hpp"

namespace evfp {

class fit_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PowerFit {
    double p;         // fitted exponent of (t_max - t)
    double c;         // prefactor, |y| ~ c (t_max - t)^p
    double residual;  // rms residual of the log-log fit
};

/// Extrapolated singular time from an affine least-squares fit of 1/H
/// against t over the last decade of (t_max - t), iterated to a fixed point.
/// Requires >= 5 samples, H < 0 strictly decreasing, and a zero crossing
/// beyond the last sample.
double estimate_tmax(std::span<const double> t, std::span<const double> H);

/// Least squares of log|y| against log(t_max - t). Requires >= 5 points,
/// all t < t_max, all y nonzero, nonzero spread.
PowerFit fit_power(std::span<const double> t, std::span<const double> y, double t_max);

struct BlowupFit {
    double t_max_est;
    std::map<std::string, PowerFit> exponents;  // keys: H, a, phi, rho, ricci
    double window_lo;
    double window_hi;
    double residual;           // rms residual of the H fit
    double t_max_uncertainty;  // half-width of the last sampling interval
};

/// Tail = samples with H < -10 |H0|; power fits over the last decade of
/// (t_max_est - t).
BlowupFit fit_blowup(const RunRecord& record);

struct AsymptoticFit {
    double phi_inf_est;  // phi at t_end (monotone and convergent)
    double H_limit_est;  // mean of H over the final tenth of the run
    double rate;         // exponential decay rate of phi - phi_inf_est
    double residual;
    double window_lo;
    double window_hi;
    bool h_limit_ok;  // |H_limit_est - sqrt(phi_inf/3)| < 1% of sqrt(phi_inf/3)
};

/// Requires a global run with t_end >= 20/sqrt(phi(t_end)/3).
AsymptoticFit fit_asymptotics(const RunRecord& record);

}  // namespace evfp
