#pragma once

#include <utility>
#include <vector>

#include "evfp/fokker_planck.hpp"
#include "evfp/moments.hpp"

namespace evfp {

/// ODE unknowns plus time.
struct CosmoState {
    double t;    // proper time
    double a;    // scale factor, > 0
    double H;    // Hubble function, da/dt / a
    double phi;  // cosmological scalar field
};

struct ModelParams {
    double sigma = 0.0;     // diffusion constant, >= 0 (0 = Vlasov limit)
    int k = 0;              // spatial curvature, in {-1, 0, 1}
    double eta = 1e-3;      // accuracy fraction per step
    double dt_max = 1.0;
    double a_floor = 0.0;   // 0 means auto: 1e-6 * a0
    double H_ceiling = 1e8;
    double t_end = 0.0;
};

struct OdeRates {
    double da;    // H a
    double dH;    // -(rho + P)/2 + k/a^2
    double dphi;  // -3 sigma N / a^3
};

OdeRates ode_rhs(const CosmoState& s, const MomentSet& m, const ModelParams& p);

/// H^2 - (rho + phi)/3 + k/a^2
double constraint_residual_raw(const CosmoState& s, const MomentSet& m, int k);
/// Raw residual normalized by max(H^2, (|rho|+|phi|)/3, 1/a^2).
double constraint_residual(const CosmoState& s, const MomentSet& m, int k);

enum class ClosureMode { Check, SolvePhi0, SolveH0 };

struct InitialData {
    CosmoState state;
    RadialDistribution F;
};

/// Builds constrained initial data. Check mode requires the quadruple to
/// satisfy the constraint to 1e-10 (normalized); SolvePhi0 computes
/// phi0 = 3(H0^2 + k/a0^2) - rho0; SolveH0 computes
/// H0 = +sqrt((rho0 + phi0)/3 - k/a0^2). Rejects a0 <= 0, H0 <= 0,
/// solved phi0 <= 0, negative discriminant, and gaussian profiles whose
/// analytic tail mass beyond r_max exceeds 1e-12 of the total.
InitialData initial_data(const Profile& profile, const GridPtr& grid, double a0, double H0,
                         double phi0, const ModelParams& p, ClosureMode mode);

/// One Strang step: RK4 half-step of the (a, H, phi) subsystem with moments
/// recomputed per stage from the frozen F, a full FP step at the post-half-step
/// scale factor, then the second ODE half-step with moments from the updated F.
std::pair<CosmoState, RadialDistribution> step(const CosmoState& s, const RadialDistribution& F,
                                               const ModelParams& p, double dt);

/// dt = min(dt_max, eta/|H|, eta(|phi| + phi_scale_floor)/|dphi|,
///          eta/sqrt(rho + |phi|), t_end - t).
double adapt_dt(const CosmoState& s, const MomentSet& m, const ModelParams& p,
                double phi_scale_floor = 0.0);

enum class Termination { ReachedTEnd, BlowupDetected, StepFailure };

const char* to_string(Termination t);

struct Sample {
    CosmoState state;
    MomentSet moments;
    double constraint_residual;
    double tail_mass_fraction;  // last-cell mass / N
    double budget_integral;     // int_0^t H a^3 P ds, trapezoid per step
    double budget_residual;     // filled after the run
};

struct SamplingOptions {
    double cadence = 0.01;         // uniform sampling interval
    double blowup_h_ratio = 1.01;  // geometric |H| ratio once |H| > 10 |H0|
};

struct RunRecord {
    std::vector<Sample> samples;
    Termination termination = Termination::ReachedTEnd;
    double t_stop = 0.0;
    double N0 = 0.0;
    ModelParams params;
    double max_constraint_residual = 0.0;
    double max_budget_residual = 0.0;
    double n_drift = 0.0;            // max |N/N0 - 1| over samples
    bool tail_mass_warning = false;  // last-cell mass fraction exceeded 1e-8
};

/// Advances until t_end, a < a_floor, or |H| > H_ceiling (the last two set
/// BlowupDetected). StepFailure after 40 consecutive dt halvings or a
/// non-finite state. t_end <= 0 yields an empty-series record.
RunRecord simulate(const InitialData& init, const ModelParams& p,
                   const SamplingOptions& sampling = {});

/// residual(t) = [rho a^3 - rho0 a0^3 - 3 sigma N t + 3 int_0^t H a^3 P ds],
/// normalized by rho0 a0^3 (or absolute when that is zero).
std::vector<double> rho_a3_budget(const RunRecord& record);

}  // namespace evfp
