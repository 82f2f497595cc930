#include "evfp/cosmo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evfp {

namespace {

constexpr double check_tol = 1e-10;       // constraint tolerance for Check mode
constexpr double tail_mass_limit = 1e-8;  // last-cell mass fraction warning level
constexpr int max_halvings = 40;

void validate_params(const ModelParams& p) {
    if (p.k != -1 && p.k != 0 && p.k != 1)
        throw std::invalid_argument("ModelParams: k must be one of {-1, 0, 1}");
    if (!(p.sigma >= 0.0))
        throw std::invalid_argument("ModelParams: sigma must be >= 0");
    if (!(p.eta > 0.0) || !(p.dt_max > 0.0) || !(p.H_ceiling > 0.0))
        throw std::invalid_argument("ModelParams: numerical knobs must be positive");
}

double tail_mass_fraction(const RadialDistribution& F, double N) {
    if (N <= 0.0) return 0.0;
    const RadialGrid& g = *F.grid;
    const int i = g.n_cells - 1;
    return 4.0 * M_PI * F.values[i] * g.centers[i] * g.centers[i] * g.dr / N;
}

struct OdeVec {
    double a, H, phi;
};

// RK4 on (a, H, phi) with moments recomputed from the frozen F at each stage.
OdeVec rk4(const OdeVec& y0, double t_unused, double h, const RadialDistribution& F,
           const ModelParams& p) {
    (void)t_unused;  // system is autonomous
    auto rhs = [&](const OdeVec& y) -> OdeVec {
        if (!(y.a > 0.0))
            throw std::runtime_error("ode stage: scale factor not positive");
        const MomentSet m = compute_moments(F, y.a, y.phi, y.H);
        const CosmoState s{0.0, y.a, y.H, y.phi};
        const OdeRates r = ode_rhs(s, m, p);
        return OdeVec{r.da, r.dH, r.dphi};
    };
    const OdeVec k1 = rhs(y0);
    const OdeVec k2 = rhs({y0.a + 0.5 * h * k1.a, y0.H + 0.5 * h * k1.H, y0.phi + 0.5 * h * k1.phi});
    const OdeVec k3 = rhs({y0.a + 0.5 * h * k2.a, y0.H + 0.5 * h * k2.H, y0.phi + 0.5 * h * k2.phi});
    const OdeVec k4 = rhs({y0.a + h * k3.a, y0.H + h * k3.H, y0.phi + h * k3.phi});
    return OdeVec{y0.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
                  y0.H + h / 6.0 * (k1.H + 2.0 * k2.H + 2.0 * k3.H + k4.H),
                  y0.phi + h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi)};
}

}  // namespace

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedTEnd: return "REACHED_T_END";
        case Termination::BlowupDetected: return "BLOWUP_DETECTED";
        case Termination::StepFailure: return "STEP_FAILURE";
    }
    return "?";
}

OdeRates ode_rhs(const CosmoState& s, const MomentSet& m, const ModelParams& p) {
    OdeRates r;
    r.da = s.H * s.a;
    r.dH = -0.5 * (m.rho + m.P) + p.k / (s.a * s.a);
    r.dphi = -3.0 * p.sigma * m.N / (s.a * s.a * s.a);
    return r;
}

double constraint_residual_raw(const CosmoState& s, const MomentSet& m, int k) {
    return s.H * s.H - (m.rho + s.phi) / 3.0 + k / (s.a * s.a);
}

double constraint_residual(const CosmoState& s, const MomentSet& m, int k) {
    const double raw = constraint_residual_raw(s, m, k);
    const double scale = std::max({s.H * s.H, (std::abs(m.rho) + std::abs(s.phi)) / 3.0,
                                   1.0 / (s.a * s.a)});
    return raw / scale;
}

InitialData initial_data(const Profile& profile, const GridPtr& grid, double a0, double H0,
                         double phi0, const ModelParams& p, ClosureMode mode) {
    validate_params(p);
    if (!(a0 > 0.0))
        throw std::invalid_argument("initial_data: a0 must be positive");

    if (profile.kind == Profile::Kind::Gaussian) {
        const double tail = gaussian_tail_fraction(profile.width, grid->r_max);
        if (!(tail < 1e-12))
            throw std::invalid_argument(
                "initial_data: gaussian tail mass beyond r_max exceeds 1e-12 of the total; "
                "increase r_max or shrink the width");
    }
    if (profile.kind == Profile::Kind::Ball && profile.radius >= grid->r_max)
        throw std::invalid_argument("initial_data: ball radius must lie inside r_max");

    InitialData init;
    init.F = sample_profile(profile, grid);
    const MomentSet m0 = compute_moments(init.F, a0, 0.0, 0.0);
    const double rho0 = m0.rho;

    switch (mode) {
        case ClosureMode::SolvePhi0: {
            if (!(H0 > 0.0))
                throw std::invalid_argument("initial_data: H0 must be positive");
            phi0 = 3.0 * (H0 * H0 + p.k / (a0 * a0)) - rho0;
            if (!(phi0 > 0.0))
                throw std::invalid_argument(
                    "initial_data: solved phi0 is not positive; the data violate phi0 > 0");
            break;
        }
        case ClosureMode::SolveH0: {
            if (!(phi0 > 0.0))
                throw std::invalid_argument("initial_data: phi0 must be positive");
            const double disc = (rho0 + phi0) / 3.0 - p.k / (a0 * a0);
            if (!(disc > 0.0))
                throw std::invalid_argument(
                    "initial_data: negative discriminant, no real positive H0 satisfies the "
                    "constraint");
            H0 = std::sqrt(disc);
            break;
        }
        case ClosureMode::Check: {
            if (!(H0 > 0.0))
                throw std::invalid_argument("initial_data: H0 must be positive");
            if (!(phi0 > 0.0))
                throw std::invalid_argument("initial_data: phi0 must be positive");
            const CosmoState s{0.0, a0, H0, phi0};
            const double res = std::abs(constraint_residual(s, m0, p.k));
            if (res > check_tol)
                throw std::invalid_argument(
                    "initial_data: quadruple violates the Hamiltonian constraint "
                    "(normalized residual " +
                    std::to_string(res) + " > 1e-10)");
            break;
        }
    }
    init.state = CosmoState{0.0, a0, H0, phi0};
    return init;
}

std::pair<CosmoState, RadialDistribution> step(const CosmoState& s, const RadialDistribution& F,
                                               const ModelParams& p, double dt) {
    // Strang: ODE half-step, full FP step at the post-half-step scale factor,
    // ODE half-step with moments from the updated F.
    const OdeVec yhalf = rk4({s.a, s.H, s.phi}, s.t, 0.5 * dt, F, p);
    RadialDistribution F_new =
        p.sigma > 0.0 ? fp_step(F, FPStepParams{p.sigma, yhalf.a, dt}) : F;
    const OdeVec y_new = rk4(yhalf, s.t + 0.5 * dt, 0.5 * dt, F_new, p);
    return {CosmoState{s.t + dt, y_new.a, y_new.H, y_new.phi}, std::move(F_new)};
}

double adapt_dt(const CosmoState& s, const MomentSet& m, const ModelParams& p,
                double phi_scale_floor) {
    double dt = p.dt_max;
    if (s.H != 0.0) dt = std::min(dt, p.eta / std::abs(s.H));
    const double dphi = -3.0 * p.sigma * m.N / (s.a * s.a * s.a);
    if (dphi != 0.0)
        dt = std::min(dt, p.eta * (std::abs(s.phi) + phi_scale_floor) / std::abs(dphi));
    const double e = m.rho + std::abs(s.phi);
    if (e > 0.0) dt = std::min(dt, p.eta / std::sqrt(e));
    dt = std::min(dt, p.t_end - s.t);
    return dt;
}

RunRecord simulate(const InitialData& init, const ModelParams& p,
                   const SamplingOptions& sampling) {
    validate_params(p);
    RunRecord rec;
    rec.params = p;
    rec.termination = Termination::ReachedTEnd;
    if (p.t_end <= 0.0)
        return rec;  // degenerate input: empty series

    const double a_floor = p.a_floor > 0.0 ? p.a_floor : 1e-6 * init.state.a;
    const double phi_floor = 1e-2 * std::abs(init.state.phi);
    const double H0_abs = std::abs(init.state.H);

    CosmoState s = init.state;
    RadialDistribution F = init.F;
    rec.N0 = compute_moments(F, s.a, s.phi, s.H).N;

    double budget_integral = 0.0;
    auto budget_f = [&](const CosmoState& st, const MomentSet& m) {
        return st.H * st.a * st.a * st.a * m.P;
    };

    auto push_sample = [&](const MomentSet& m) {
        Sample smp;
        smp.state = s;
        smp.moments = m;
        smp.constraint_residual = constraint_residual(s, m, p.k);
        smp.tail_mass_fraction = tail_mass_fraction(F, m.N);
        smp.budget_integral = budget_integral;
        smp.budget_residual = 0.0;
        if (smp.tail_mass_fraction > tail_mass_limit) rec.tail_mass_warning = true;
        rec.samples.push_back(std::move(smp));
    };

    MomentSet m = compute_moments(F, s.a, s.phi, s.H);
    push_sample(m);
    double budget_prev = budget_f(s, m);
    double last_sample_t = s.t;
    double last_sample_H = H0_abs;

    while (s.t < p.t_end) {
        m = compute_moments(F, s.a, s.phi, s.H);
        double dt = adapt_dt(s, m, p, phi_floor);
        if (!(dt > 0.0) || dt <= 1e-15 * std::max(1.0, s.t))
            break;  // time increment no longer representable: t_end reached

        CosmoState s_new{};
        RadialDistribution F_new;
        int halvings = 0;
        for (;; ++halvings) {
            if (halvings > max_halvings) {
                rec.termination = Termination::StepFailure;
                rec.t_stop = s.t;
                goto done;
            }
            try {
                std::tie(s_new, F_new) = step(s, F, p, dt);
                break;
            } catch (const fp_undershoot_error&) {
                dt *= 0.5;
            } catch (const std::runtime_error&) {
                rec.termination = Termination::StepFailure;
                rec.t_stop = s.t;
                goto done;
            }
        }
        s = s_new;
        F = std::move(F_new);

        if (!std::isfinite(s.a) || !std::isfinite(s.H) || !std::isfinite(s.phi)) {
            rec.termination = Termination::StepFailure;
            rec.t_stop = s.t;
            break;
        }

        m = compute_moments(F, s.a, s.phi, s.H);
        const double budget_new = budget_f(s, m);
        budget_integral += 0.5 * (budget_prev + budget_new) * dt;
        budget_prev = budget_new;

        if (s.a < a_floor || std::abs(s.H) > p.H_ceiling) {
            push_sample(m);
            rec.termination = Termination::BlowupDetected;
            rec.t_stop = s.t;
            break;
        }

        bool due = s.t - last_sample_t >= sampling.cadence || s.t >= p.t_end;
        if (std::abs(s.H) > 10.0 * H0_abs &&
            std::abs(s.H) >= sampling.blowup_h_ratio * last_sample_H)
            due = true;  // log-spaced abscissae in (T_stop - t) near blow-up
        if (due) {
            push_sample(m);
            last_sample_t = s.t;
            last_sample_H = std::abs(s.H);
        }
    }
done:
    if (rec.termination == Termination::ReachedTEnd) rec.t_stop = s.t;

    const auto budget = rho_a3_budget(rec);
    for (size_t i = 0; i < rec.samples.size(); ++i) {
        rec.samples[i].budget_residual = budget[i];
        rec.max_budget_residual = std::max(rec.max_budget_residual, std::abs(budget[i]));
        rec.max_constraint_residual =
            std::max(rec.max_constraint_residual, std::abs(rec.samples[i].constraint_residual));
        if (rec.N0 > 0.0)
            rec.n_drift = std::max(rec.n_drift, std::abs(rec.samples[i].moments.N / rec.N0 - 1.0));
    }
    return rec;
}

std::vector<double> rho_a3_budget(const RunRecord& record) {
    const auto& smp = record.samples;
    std::vector<double> res(smp.size(), 0.0);
    if (smp.empty()) return res;

    const double sigma = record.params.sigma;
    const double N0 = record.N0;
    const double rho0a03 =
        smp[0].moments.rho * smp[0].state.a * smp[0].state.a * smp[0].state.a;
    const double denom = rho0a03 > 0.0 ? rho0a03 : 1.0;

    bool have_integrals = true;
    for (const auto& x : smp)
        if (!std::isfinite(x.budget_integral)) have_integrals = false;

    double trapz = 0.0;
    double f_prev =
        smp[0].state.H * smp[0].state.a * smp[0].state.a * smp[0].state.a * smp[0].moments.P;
    for (size_t i = 0; i < smp.size(); ++i) {
        const auto& st = smp[i].state;
        const double f =
            st.H * st.a * st.a * st.a * smp[i].moments.P;
        if (i > 0) trapz += 0.5 * (f_prev + f) * (st.t - smp[i - 1].state.t);
        f_prev = f;
        const double integral = have_integrals ? smp[i].budget_integral : trapz;
        const double rho_a3 = smp[i].moments.rho * st.a * st.a * st.a;
        res[i] = (rho_a3 - rho0a03 - 3.0 * sigma * N0 * st.t + 3.0 * integral) / denom;
    }
    return res;
}

}  // namespace evfp
