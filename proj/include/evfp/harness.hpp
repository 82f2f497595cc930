#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evfp/blowup_fit.hpp"
#include "evfp/config.hpp"
#include "evfp/regime.hpp"

namespace evfp {

/// Grid + profile + constraint closure from a validated config.
InitialData make_initial_data(const RunConfig& cfg);

void write_timeseries_csv(std::ostream& os, const RunRecord& rec);
RunRecord read_timeseries_csv(std::istream& is);

std::string summary_json(const RunRecord& rec);
std::string verdict_json(const RegimeVerdict& v);
std::string blowup_fit_json(const BlowupFit& f);
std::string asymptotic_fit_json(const AsymptoticFit& f);

struct SweepRow {
    double phi0;
    double sigma;
    double Sigma0;
    double Phi0;
    std::string verdict;
    std::string outcome;  // empty when not resolved
    std::optional<bool> q0_positive;
    std::optional<bool> q_final_negative;
};

/// Cells in lexicographic (phi0, sigma) order; independent cells execute on a
/// bounded worker pool, assembly is order-stable. Closure is SolveH0 per cell.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, bool resolve, int jobs);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool resolved);

/// True when the row pair (verdict, outcome) contradicts the theorems:
/// GLOBAL_GUARANTEED with BLOWUP_DETECTED, or BLOWUP_GUARANTEED still running
/// at t_end >= 10 (a0^3 H0 phi0 / sigma N + 1).
bool sweep_row_contradicts(const SweepRow& row, double t_end_used, double blowup_deadline);

int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_classify(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, bool resolve, int jobs, std::ostream& log);
int cmd_fit_blowup(const std::string& csv_path, std::ostream& out);

}  // namespace evfp
