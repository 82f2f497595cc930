#include "evfp/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace evfp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// fixed 17-significant-digit formatting keeps output bit-identical across runs
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json fit_to_json(const BlowupFit& f) {
    json expo = json::object();
    for (const auto& [name, pf] : f.exponents)
        expo[name] = {{"p", pf.p}, {"c", pf.c}, {"residual", pf.residual}};
    return json{{"t_max_est", f.t_max_est},
                {"t_max_uncertainty", f.t_max_uncertainty},
                {"window", {f.window_lo, f.window_hi}},
                {"residual", f.residual},
                {"exponents", expo}};
}

json fit_to_json(const AsymptoticFit& f) {
    return json{{"phi_inf_est", f.phi_inf_est}, {"H_limit_est", f.H_limit_est},
                {"rate", f.rate},               {"residual", f.residual},
                {"window", {f.window_lo, f.window_hi}},
                {"h_limit_ok", f.h_limit_ok}};
}

json verdict_to_json(const RegimeVerdict& v) {
    json fired = json::array();
    for (const auto& c : v.fired)
        fired.push_back({{"name", c.name}, {"compared", c.compared}, {"threshold", c.threshold}});
    return json{{"verdict", to_string(v.verdict)},
                {"fired_criteria", fired},
                {"Sigma0", v.Sigma0},
                {"Phi0", v.Phi0},
                {"phi_m", v.phi_m},
                {"constraint_residual", v.constraint_residual}};
}

}  // namespace

InitialData make_initial_data(const RunConfig& cfg) {
    auto grid = build_grid(cfg.n_cells, cfg.r_max);
    return initial_data(cfg.profile, grid, cfg.a0, cfg.H0.value_or(0.0), cfg.phi0.value_or(0.0),
                        cfg.model, cfg.closure());
}

void write_timeseries_csv(std::ostream& os, const RunRecord& rec) {
    os << "t,a,H,phi,N,rho,P,q,Q,ricci,l2,constraint_residual,budget_residual,"
          "tail_mass_fraction\n";
    for (const auto& s : rec.samples) {
        os << fmt(s.state.t) << ',' << fmt(s.state.a) << ',' << fmt(s.state.H) << ','
           << fmt(s.state.phi) << ',' << fmt(s.moments.N) << ',' << fmt(s.moments.rho) << ','
           << fmt(s.moments.P) << ',' << fmt(s.moments.q) << ','
           << (s.moments.Q ? fmt(*s.moments.Q) : "") << ',' << fmt(s.moments.ricci) << ','
           << fmt(s.moments.l2) << ',' << fmt(s.constraint_residual) << ','
           << fmt(s.budget_residual) << ',' << fmt(s.tail_mass_fraction) << '\n';
    }
}

RunRecord read_timeseries_csv(std::istream& is) {
    RunRecord rec;
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("timeseries csv: empty file");
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() < 14)
            throw std::runtime_error("timeseries csv: malformed line " + std::to_string(lineno));
        auto num = [&](int i) { return cells[i].empty() ? NAN : std::stod(cells[i]); };
        Sample s;
        s.state = CosmoState{num(0), num(1), num(2), num(3)};
        s.moments.N = num(4);
        s.moments.rho = num(5);
        s.moments.P = num(6);
        s.moments.q = num(7);
        if (!cells[8].empty()) s.moments.Q = num(8);
        s.moments.ricci = num(9);
        s.moments.l2 = num(10);
        s.constraint_residual = num(11);
        s.budget_residual = num(12);
        s.tail_mass_fraction = num(13);
        s.budget_integral = NAN;
        rec.samples.push_back(s);
    }
    if (!rec.samples.empty()) {
        rec.N0 = rec.samples.front().moments.N;
        rec.t_stop = rec.samples.back().state.t;
    }
    return rec;
}

std::string summary_json(const RunRecord& rec) {
    json j{{"termination", to_string(rec.termination)},
           {"t_stop", rec.t_stop},
           {"samples", rec.samples.size()},
           {"N0", rec.N0},
           {"n_drift", rec.n_drift},
           {"max_constraint_residual", rec.max_constraint_residual},
           {"max_budget_residual", rec.max_budget_residual},
           {"tail_mass_warning", rec.tail_mass_warning}};
    if (rec.termination == Termination::BlowupDetected) {
        try {
            j["blowup_fit"] = fit_to_json(fit_blowup(rec));
        } catch (const fit_error& e) {
            j["blowup_fit_error"] = e.what();
        }
    } else if (rec.termination == Termination::ReachedTEnd && !rec.samples.empty()) {
        try {
            j["asymptotic_fit"] = fit_to_json(fit_asymptotics(rec));
        } catch (const fit_error& e) {
            j["asymptotic_fit_error"] = e.what();
        }
    }
    return j.dump(2);
}

std::string verdict_json(const RegimeVerdict& v) {
    return verdict_to_json(v).dump(2);
}

std::string blowup_fit_json(const BlowupFit& f) {
    return fit_to_json(f).dump(2);
}

std::string asymptotic_fit_json(const AsymptoticFit& f) {
    return fit_to_json(f).dump(2);
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, bool resolve, int jobs) {
    if (!cfg.sweep)
        throw config_error("sweep command requires a [sweep] section");
    const SweepSpec& sp = *cfg.sweep;

    auto grid = build_grid(cfg.n_cells, cfg.r_max);
    const RadialDistribution F0 = sample_profile(cfg.profile, grid);
    const MomentSet m0 = compute_moments(F0, cfg.a0, 0.0, 0.0);

    std::vector<double> phi0s(sp.phi0_steps), sigmas(sp.sigma_steps);
    for (int i = 0; i < sp.phi0_steps; ++i)
        phi0s[i] = sp.phi0_steps == 1
                       ? sp.phi0_min
                       : sp.phi0_min + (sp.phi0_max - sp.phi0_min) * i / (sp.phi0_steps - 1);
    for (int j = 0; j < sp.sigma_steps; ++j)
        sigmas[j] = sp.sigma_steps == 1
                        ? sp.sigma_min
                        : sp.sigma_min + (sp.sigma_max - sp.sigma_min) * j / (sp.sigma_steps - 1);

    std::vector<SweepRow> rows(phi0s.size() * sigmas.size());

    auto run_cell = [&](size_t idx) {
        const double phi0 = phi0s[idx / sigmas.size()];
        const double sigma = sigmas[idx % sigmas.size()];
        SweepRow& row = rows[idx];
        row.phi0 = phi0;
        row.sigma = sigma;
        row.Sigma0 = NAN;
        row.Phi0 = m0.rho > 0.0 ? phi0 / m0.rho : INFINITY;

        ModelParams mp = cfg.model;
        mp.sigma = sigma;
        InitialData init;
        try {
            init = initial_data(cfg.profile, grid, cfg.a0, 0.0, phi0, mp, ClosureMode::SolveH0);
        } catch (const std::invalid_argument&) {
            row.verdict = "INVALID";
            return;
        }
        const double H0 = init.state.H;
        row.Sigma0 = sigma / H0;
        const RegimeVerdict v = classify(m0.N, m0.rho, cfg.a0, H0, phi0, sigma, mp.k);
        row.verdict = to_string(v.verdict);

        if (!resolve) return;
        if (v.verdict == Verdict::BlowupGuaranteed && sigma > 0.0 && m0.N > 0.0) {
            // run at least to the consistency deadline of the blow-up theorem
            const double deadline =
                10.0 * (std::pow(cfg.a0, 3) * H0 * phi0 / (sigma * m0.N) + 1.0);
            mp.t_end = std::max(mp.t_end, deadline);
        }
        const RunRecord rec =
            simulate(init, mp, SamplingOptions{cfg.cadence, cfg.blowup_sample_ratio});
        row.outcome = to_string(rec.termination);
        if (!rec.samples.empty()) {
            row.q0_positive = rec.samples.front().moments.q > 0.0;
            row.q_final_negative = rec.samples.back().moments.q < 0.0;
        }
    };

    const int workers = std::max(1, jobs);
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t idx = next.fetch_add(1); idx < rows.size(); idx = next.fetch_add(1))
                run_cell(idx);
        });
    }
    for (auto& th : pool) th.join();
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool resolved) {
    os << "phi0,sigma,Sigma0,Phi0,verdict";
    if (resolved) os << ",simulated_outcome,q0_positive,q_final_negative";
    os << '\n';
    for (const auto& r : rows) {
        os << fmt(r.phi0) << ',' << fmt(r.sigma) << ',' << fmt(r.Sigma0) << ',' << fmt(r.Phi0)
           << ',' << r.verdict;
        if (resolved) {
            os << ',' << r.outcome << ','
               << (r.q0_positive ? (*r.q0_positive ? "true" : "false") : "") << ','
               << (r.q_final_negative ? (*r.q_final_negative ? "true" : "false") : "");
        }
        os << '\n';
    }
}

bool sweep_row_contradicts(const SweepRow& row, double t_end_used, double blowup_deadline) {
    if (row.verdict == "GLOBAL_GUARANTEED" && row.outcome == "BLOWUP_DETECTED")
        return true;
    if (row.verdict == "BLOWUP_GUARANTEED" && row.outcome == "REACHED_T_END" &&
        t_end_used >= blowup_deadline)
        return true;
    return false;
}

namespace {

// probe writability before running anything, so failures leave no partial files
void ensure_writable_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path probe = fs::path(dir) / ".evfp_probe";
    std::ofstream f(probe);
    if (!f) throw std::runtime_error("output directory '" + dir + "' is not writable");
    f.close();
    fs::remove(probe, ec);
}

bool wants(const RunConfig& cfg, const std::string& format) {
    for (const auto& f : cfg.formats)
        if (f == format) return true;
    return false;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    try {
        ensure_writable_dir(cfg.out_dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
    InitialData init;
    try {
        init = make_initial_data(cfg);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
    const RunRecord rec =
        simulate(init, cfg.model, SamplingOptions{cfg.cadence, cfg.blowup_sample_ratio});

    if (wants(cfg, "csv")) {
        std::ofstream csv(fs::path(cfg.out_dir) / "timeseries.csv");
        write_timeseries_csv(csv, rec);
        if (!csv) {
            log << "error: failed writing timeseries.csv\n";
            return 2;
        }
    }
    if (wants(cfg, "json")) {
        std::ofstream js(fs::path(cfg.out_dir) / "summary.json");
        js << summary_json(rec) << '\n';
        if (!js) {
            log << "error: failed writing summary.json\n";
            return 2;
        }
    }
    log << "termination: " << to_string(rec.termination) << " at t = " << rec.t_stop << " ("
        << rec.samples.size() << " samples)\n";
    // blow-up is a result, not an error
    return rec.termination == Termination::StepFailure ? 1 : 0;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
    const InitialData init = make_initial_data(cfg);
    const MomentSet m0 = compute_moments(init.F, init.state.a, init.state.phi, init.state.H);
    const RegimeVerdict v = classify(m0.N, m0.rho, init.state.a, init.state.H, init.state.phi,
                                     cfg.model.sigma, cfg.model.k);
    out << verdict_json(v) << '\n';
    return 0;
}

int cmd_sweep(const RunConfig& cfg, bool resolve, int jobs, std::ostream& log) {
    try {
        ensure_writable_dir(cfg.out_dir);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
    const auto rows = run_sweep(cfg, resolve, jobs);
    {
        std::ofstream csv(fs::path(cfg.out_dir) / "sweep.csv");
        write_sweep_csv(csv, rows, resolve);
        if (!csv) {
            log << "error: failed writing sweep.csv\n";
            return 2;
        }
    }
    log << "sweep: " << rows.size() << " cells\n";
    return 0;
}

int cmd_fit_blowup(const std::string& csv_path, std::ostream& out) {
    std::ifstream in(csv_path);
    if (!in) {
        out << "error: cannot open '" << csv_path << "'\n";
        return 2;
    }
    RunRecord rec = read_timeseries_csv(in);
    try {
        out << blowup_fit_json(fit_blowup(rec)) << '\n';
    } catch (const fit_error& e) {
        out << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace evfp
