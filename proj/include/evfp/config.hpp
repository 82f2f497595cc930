#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evfp/cosmo.hpp"

namespace evfp {

class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SweepSpec {
    double phi0_min = 0.0, phi0_max = 0.0;
    int phi0_steps = 0;
    double sigma_min = 0.0, sigma_max = 0.0;
    int sigma_steps = 0;
};

struct RunConfig {
    ModelParams model;  // sigma, k + numerics knobs incl. t_end
    Profile profile;
    int n_cells = 200;
    double r_max = 20.0;
    double a0 = 1.0;
    std::optional<double> H0;
    std::optional<double> phi0;
    bool solve_phi0 = false;
    bool solve_H0 = false;
    std::string out_dir = ".";
    double cadence = 0.01;
    double blowup_sample_ratio = 1.01;
    std::vector<std::string> formats = {"csv", "json"};
    std::optional<SweepSpec> sweep;

    ClosureMode closure() const;
};

/// INI-style sections [model], [initial], [numerics], [output], [sweep].
/// Unknown keys, missing mandatory keys, type mismatches and invalid closure
/// combinations are errors naming the offending key.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

}  // namespace evfp
