#include "evfp/blowup_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evfp {

namespace {

struct AffineFit {
    double intercept, slope, rms;
};

// least squares y = intercept + slope * x, centered for conditioning
AffineFit affine_fit(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    double xm = 0.0, ym = 0.0;
    for (size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (sxx == 0.0)
        throw fit_error("degenerate fit window: zero spread in the abscissa");
    AffineFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

}  // namespace

double estimate_tmax(std::span<const double> t, std::span<const double> H) {
    const size_t n = t.size();
    if (n < 5 || H.size() != n)
        throw fit_error("estimate_tmax: fewer than 5 qualifying samples");
    for (size_t i = 0; i < n; ++i) {
        if (!(H[i] < 0.0))
            throw fit_error("estimate_tmax: series must have H < 0");
        if (i > 0 && !(H[i] < H[i - 1]))
            throw fit_error("estimate_tmax: non-monotone tail");
    }

    const double t_last = t[n - 1];
    std::vector<double> u(n), invH(n);
    for (size_t i = 0; i < n; ++i) {
        u[i] = t[i] - t_last;
        invH[i] = 1.0 / H[i];
    }

    // The fit window is the last decade of (T - t), but T is the fit's own
    // output; seed with t_last + 1/|H_last| and iterate to a fixed point.
    double T = t_last + 1.0 / std::abs(H[n - 1]);
    for (int iter = 0; iter < 16; ++iter) {
        const double width = 10.0 * (T - t_last);
        std::vector<double> uw, yw;
        for (size_t i = 0; i < n; ++i) {
            if (T - t[i] <= width) {
                uw.push_back(u[i]);
                yw.push_back(invH[i]);
            }
        }
        if (uw.size() < 5) {
            uw = u;
            yw = invH;
        }
        const AffineFit f = affine_fit(uw, yw);
        if (!(f.slope > 0.0))
            throw fit_error("estimate_tmax: 1/H is not increasing over the tail");
        const double T_new = t_last - f.intercept / f.slope;
        const bool converged = std::abs(T_new - T) <= 1e-12 * std::max(1.0, std::abs(T_new));
        T = T_new;
        if (converged) break;
    }
    if (!(T > t_last))
        throw fit_error("estimate_tmax: zero crossing does not exceed the last sample");
    return T;
}

PowerFit fit_power(std::span<const double> t, std::span<const double> y, double t_max) {
    const size_t n = t.size();
    if (n < 5 || y.size() != n)
        throw fit_error("fit_power: fewer than 5 points");
    std::vector<double> lx(n), ly(n);
    for (size_t i = 0; i < n; ++i) {
        if (!(t[i] < t_max))
            throw fit_error("fit_power: all t must precede t_max");
        if (y[i] == 0.0 || !std::isfinite(y[i]))
            throw fit_error("fit_power: y must be nonzero and finite in the window");
        lx[i] = std::log(t_max - t[i]);
        ly[i] = std::log(std::abs(y[i]));
    }
    const AffineFit f = affine_fit(lx, ly);
    return PowerFit{f.slope, std::exp(f.intercept), f.rms};
}

BlowupFit fit_blowup(const RunRecord& record) {
    const auto& smp = record.samples;
    if (smp.size() < 5)
        throw fit_error("fit_blowup: record too short");
    const double H0_abs = std::abs(smp[0].state.H);

    std::vector<double> tt, HH, aa, pp, rr, cc;
    for (const auto& x : smp) {
        if (x.state.H < -10.0 * H0_abs) {
            tt.push_back(x.state.t);
            HH.push_back(x.state.H);
            aa.push_back(x.state.a);
            pp.push_back(x.state.phi);
            rr.push_back(x.moments.rho);
            cc.push_back(x.moments.ricci);
        }
    }
    if (tt.size() < 5)
        throw fit_error("fit_blowup: fewer than 5 samples with H < -10 |H0|");

    BlowupFit fit;
    fit.t_max_est = estimate_tmax(tt, HH);
    fit.t_max_uncertainty = 0.5 * (tt[tt.size() - 1] - tt[tt.size() - 2]);

    const double width = 10.0 * (fit.t_max_est - tt.back());
    std::vector<double> wt, wH, wa, wp, wr, wc;
    for (size_t i = 0; i < tt.size(); ++i) {
        if (fit.t_max_est - tt[i] <= width) {
            wt.push_back(tt[i]);
            wH.push_back(HH[i]);
            wa.push_back(aa[i]);
            wp.push_back(pp[i]);
            wr.push_back(rr[i]);
            wc.push_back(cc[i]);
        }
    }
    if (wt.size() < 5)
        throw fit_error("fit_blowup: fewer than 5 samples in the last decade");
    fit.window_lo = wt.front();
    fit.window_hi = wt.back();

    fit.exponents["H"] = fit_power(wt, wH, fit.t_max_est);
    fit.exponents["a"] = fit_power(wt, wa, fit.t_max_est);
    fit.exponents["phi"] = fit_power(wt, wp, fit.t_max_est);
    fit.exponents["rho"] = fit_power(wt, wr, fit.t_max_est);
    fit.exponents["ricci"] = fit_power(wt, wc, fit.t_max_est);
    fit.residual = fit.exponents["H"].residual;
    return fit;
}

AsymptoticFit fit_asymptotics(const RunRecord& record) {
    if (record.termination != Termination::ReachedTEnd)
        throw fit_error("fit_asymptotics: not a global run");
    const auto& smp = record.samples;
    if (smp.size() < 10)
        throw fit_error("fit_asymptotics: record too short");

    const double t_end = smp.back().state.t;
    const double phi_end = smp.back().state.phi;
    if (!(phi_end > 0.0))
        throw fit_error("fit_asymptotics: phi not positive at t_end");
    const double h_inf = std::sqrt(phi_end / 3.0);
    if (t_end < 20.0 / h_inf)
        throw fit_error("fit_asymptotics: window too short, need t_end >= 20/sqrt(phi_end/3)");

    AsymptoticFit fit;
    fit.phi_inf_est = phi_end;

    // H limit: mean over the final tenth of the span (converged region)
    const double span = t_end - smp.front().state.t;
    double h_sum = 0.0;
    int h_cnt = 0;
    for (const auto& x : smp) {
        if (x.state.t >= t_end - 0.1 * span) {
            h_sum += x.state.H;
            ++h_cnt;
        }
    }
    fit.H_limit_est = h_sum / h_cnt;
    fit.h_limit_ok = std::abs(fit.H_limit_est - h_inf) < 0.01 * h_inf;

    // exponential rate of phi - phi_inf over the band [1e-8, 1e-2] of its
    // initial value (above integrator noise, past the early transient)
    const double s0 = smp.front().state.phi - fit.phi_inf_est;
    if (s0 <= 0.0) {
        // phi constant along the run (vacuum): already converged
        fit.rate = 0.0;
        fit.residual = 0.0;
        fit.window_lo = t_end - 0.1 * span;
        fit.window_hi = t_end;
        return fit;
    }
    std::vector<double> wt, ws;
    for (const auto& x : smp) {
        const double s = x.state.phi - fit.phi_inf_est;
        if (s >= 1e-8 * s0 && s <= 1e-2 * s0) {
            wt.push_back(x.state.t);
            ws.push_back(std::log(s));
        }
    }
    if (wt.size() < 5) {
        wt.clear();
        ws.clear();
        for (const auto& x : smp) {
            const double s = x.state.phi - fit.phi_inf_est;
            if (s > 0.0 && s <= 1e-2 * s0) {
                wt.push_back(x.state.t);
                ws.push_back(std::log(s));
            }
        }
    }
    if (wt.size() < 5)
        throw fit_error("fit_asymptotics: window too short for the rate fit");
    const auto f = affine_fit(wt, ws);
    fit.rate = -f.slope;
    fit.residual = f.rms;
    fit.window_lo = wt.front();
    fit.window_hi = wt.back();
    return fit;
}

}  // namespace evfp
