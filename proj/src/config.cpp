#include "evfp/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace evfp {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

using KvMap = std::map<std::string, std::map<std::string, std::string>>;

KvMap parse_ini(const std::string& text) {
    KvMap out;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            out[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw config_error("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw config_error("line " + std::to_string(lineno) + ": empty key or value");
        if (out[section].count(key))
            throw config_error("duplicate key '" + section + "." + key + "'");
        out[section][key] = val;
    }
    return out;
}

class SectionReader {
  public:
    SectionReader(const KvMap& kv, std::string section) : section_(std::move(section)) {
        auto it = kv.find(section_);
        if (it != kv.end()) pairs_ = it->second;
    }

    bool has(const std::string& key) const { return pairs_.count(key) > 0; }

    double number(const std::string& key) {
        const std::string raw = take(key);
        try {
            size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw config_error("key '" + section_ + "." + key + "': expected a number, got '" +
                               raw + "'");
        }
    }

    double number_or(const std::string& key, double fallback) {
        return has(key) ? number(key) : fallback;
    }

    int integer(const std::string& key) {
        const double v = number(key);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw config_error("key '" + section_ + "." + key + "': expected an integer");
        return i;
    }

    bool boolean(const std::string& key) {
        std::string raw = take(key);
        std::transform(raw.begin(), raw.end(), raw.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (raw == "true" || raw == "1" || raw == "yes") return true;
        if (raw == "false" || raw == "0" || raw == "no") return false;
        throw config_error("key '" + section_ + "." + key + "': expected a boolean");
    }

    std::string text(const std::string& key) { return take(key); }

    void finish() const {
        for (const auto& [key, _] : pairs_)
            if (!consumed_.count(key))
                throw config_error("unknown key '" + section_ + "." + key + "'");
    }

  private:
    std::string take(const std::string& key) {
        auto it = pairs_.find(key);
        if (it == pairs_.end())
            throw config_error("missing mandatory key '" + section_ + "." + key + "'");
        consumed_.insert(key);
        return it->second;
    }

    std::string section_;
    std::map<std::string, std::string> pairs_;
    std::set<std::string> consumed_;
};

}  // namespace

ClosureMode RunConfig::closure() const {
    if (solve_phi0) return ClosureMode::SolvePhi0;
    if (solve_H0) return ClosureMode::SolveH0;
    return ClosureMode::Check;
}

RunConfig parse_config(const std::string& text) {
    const KvMap kv = parse_ini(text);
    for (const auto& [section, _] : kv)
        if (section != "model" && section != "initial" && section != "numerics" &&
            section != "output" && section != "sweep")
            throw config_error("unknown section '[" + section + "]'");

    RunConfig cfg;

    SectionReader model(kv, "model");
    cfg.model.sigma = model.number_or("sigma", 0.0);
    if (cfg.model.sigma < 0.0) throw config_error("key 'model.sigma': must be >= 0");
    if (model.has("k")) {
        const int k = model.integer("k");
        if (k != -1 && k != 0 && k != 1)
            throw config_error("key 'model.k': must be one of -1, 0, 1");
        cfg.model.k = k;
    }
    model.finish();

    SectionReader initial(kv, "initial");
    std::string profile_name = initial.has("profile") ? initial.text("profile") : "zero";
    if (profile_name == "zero") {
        cfg.profile = Profile::zero();
    } else if (profile_name == "gaussian") {
        cfg.profile = Profile::gaussian(initial.number("amplitude"), initial.number("width"));
    } else if (profile_name == "ball") {
        cfg.profile = Profile::ball(initial.number("amplitude"), initial.number("radius"));
    } else {
        throw config_error("key 'initial.profile': unknown profile '" + profile_name + "'");
    }
    cfg.a0 = initial.number("a0");
    if (!(cfg.a0 > 0.0)) throw config_error("key 'initial.a0': must be positive");
    if (initial.has("H0")) cfg.H0 = initial.number("H0");
    if (initial.has("phi0")) cfg.phi0 = initial.number("phi0");
    if (initial.has("solve_phi0")) cfg.solve_phi0 = initial.boolean("solve_phi0");
    if (initial.has("solve_H0")) cfg.solve_H0 = initial.boolean("solve_H0");
    initial.finish();

    SectionReader numerics(kv, "numerics");
    cfg.n_cells = numerics.has("n_cells") ? numerics.integer("n_cells") : cfg.n_cells;
    cfg.r_max = numerics.number_or("r_max", cfg.r_max);
    cfg.model.eta = numerics.number_or("eta", cfg.model.eta);
    cfg.model.dt_max = numerics.number_or("dt_max", cfg.model.dt_max);
    cfg.model.a_floor = numerics.number_or("a_floor", cfg.model.a_floor);
    cfg.model.H_ceiling = numerics.number_or("H_ceiling", cfg.model.H_ceiling);
    cfg.model.t_end = numerics.number("t_end");
    numerics.finish();

    SectionReader output(kv, "output");
    if (output.has("dir")) cfg.out_dir = output.text("dir");
    cfg.cadence = output.number_or("cadence", cfg.cadence);
    cfg.blowup_sample_ratio = output.number_or("blowup_sample_ratio", cfg.blowup_sample_ratio);
    if (!(cfg.blowup_sample_ratio > 1.0))
        throw config_error("key 'output.blowup_sample_ratio': must exceed 1");
    if (output.has("formats")) {
        cfg.formats.clear();
        std::istringstream fs(output.text("formats"));
        std::string item;
        while (std::getline(fs, item, ',')) {
            item = trim(item);
            if (item != "csv" && item != "json")
                throw config_error("key 'output.formats': unknown format '" + item + "'");
            cfg.formats.push_back(item);
        }
    }
    output.finish();

    if (kv.count("sweep")) {
        SectionReader sweep(kv, "sweep");
        SweepSpec sp;
        sp.phi0_min = sweep.number("phi0_min");
        sp.phi0_max = sweep.number("phi0_max");
        sp.phi0_steps = sweep.integer("phi0_steps");
        sp.sigma_min = sweep.number("sigma_min");
        sp.sigma_max = sweep.number("sigma_max");
        sp.sigma_steps = sweep.integer("sigma_steps");
        sweep.finish();
        if (sp.phi0_steps < 1 || sp.sigma_steps < 1)
            throw config_error("key 'sweep.*_steps': ranges must be non-empty");
        if (sp.phi0_max < sp.phi0_min || sp.sigma_max < sp.sigma_min)
            throw config_error("key 'sweep.*': range maxima must not precede minima");
        cfg.sweep = sp;
    }

    // exactly one constraint-closure mode
    const int modes = (cfg.phi0 && cfg.H0 && !cfg.solve_phi0 && !cfg.solve_H0 ? 1 : 0) +
                      (cfg.solve_phi0 ? 1 : 0) + (cfg.solve_H0 ? 1 : 0);
    if (cfg.solve_phi0 && cfg.solve_H0)
        throw config_error("exactly one closure mode: solve_phi0 and solve_H0 both set");
    if (cfg.solve_phi0 && cfg.phi0)
        throw config_error("exactly one closure mode: both phi0 and solve_phi0 given");
    if (cfg.solve_H0 && cfg.H0)
        throw config_error("exactly one closure mode: both H0 and solve_H0 given");
    if (cfg.sweep) {
        if (!cfg.solve_H0)
            throw config_error("sweep requires the solve_H0 closure (phi0 comes from the range)");
        if (cfg.phi0)
            throw config_error("sweep ranges over phi0; remove the initial.phi0 key");
    } else {
        if (modes != 1)
            throw config_error("exactly one closure mode required: phi0+H0, solve_phi0, or solve_H0");
        if (!cfg.solve_H0 && !cfg.H0)
            throw config_error("missing mandatory key 'initial.H0'");
        if (!cfg.solve_phi0 && !cfg.phi0)
            throw config_error("missing mandatory key 'initial.phi0'");
    }

    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace evfp
