#include "kdiff/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "kdiff/errors.hpp"

namespace kdiff {

std::string scenario_name(Scenario s) {
    switch (s) {
    case Scenario::classical_twist: return "classical_twist";
    case Scenario::quantum_coherent: return "quantum_coherent";
    case Scenario::quantum_measured: return "quantum_measured";
    case Scenario::classical_randomized: return "classical_randomized";
    case Scenario::unitary_model_check: return "unitary_model_check";
    case Scenario::full_table: return "full_table";
    }
    return "?";
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "classical_twist") return Scenario::classical_twist;
    if (name == "quantum_coherent") return Scenario::quantum_coherent;
    if (name == "quantum_measured") return Scenario::quantum_measured;
    if (name == "classical_randomized") return Scenario::classical_randomized;
    if (name == "unitary_model_check") return Scenario::unitary_model_check;
    if (name == "full_table") return Scenario::full_table;
    throw ConfigError("unknown scenario '" + name +
                      "' (expected classical_twist, quantum_coherent, quantum_measured, "
                      "classical_randomized, unitary_model_check or full_table)");
}

SystemParams SystemConfig::to_params() const {
    SystemParams p;
    if (h0 == "rotator")
        p.h0 = FreeHamiltonian::rotator(inertia);
    else if (h0 == "polynomial")
        p.h0 = FreeHamiltonian::polynomial(coefficients);
    else
        throw ConfigError("field h0: unknown kind '" + h0 + "' (expected rotator or polynomial)");

    if (potential == "cosine")
        p.v = Potential::cosine();
    else if (potential == "cosine_sum")
        p.v = Potential::cosine_sum(harmonics);
    else
        throw ConfigError("field potential: unknown kind '" + potential +
                          "' (expected cosine or cosine_sum)");
    p.lambda = lambda;
    p.period_t = period;
    p.tau = tau;
    p.hbar = hbar;
    p.basis_m = basis_m;
    p.grid_g = grid_g;
    return p;
}

ScenarioConfig default_config(Scenario s) {
    ScenarioConfig c;
    c.scenario = s;
    if (s == Scenario::unitary_model_check) {
        c.system.basis_m = 16;
        c.run.kicks = 3;
    }
    return c;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& message) {
    throw ConfigError("line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        fail(line, "key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& v, const std::string& key, int line) {
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        fail(line, "key '" + key + "': expected an integer, got '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        fail(line, "key '" + key + "': expected an unsigned integer, got '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(line, "key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key, int line) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, "key '" + key + "': empty list element");
        out.push_back(parse_double(item, key, line));
    }
    return out;
}

std::vector<Harmonic> parse_harmonics(const std::string& v, const std::string& key, int line) {
    std::vector<Harmonic> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            fail(line, "key '" + key + "': expected k:weight entries, got '" + item + "'");
        Harmonic h;
        h.k = static_cast<int>(parse_int(trim(item.substr(0, colon)), key, line));
        h.weight = parse_double(trim(item.substr(colon + 1)), key, line);
        out.push_back(h);
    }
    if (out.empty()) fail(line, "key '" + key + "': empty harmonic list");
    return out;
}

struct RawLine {
    int number;
    std::string section;
    std::string key;
    std::string value;
};

std::vector<RawLine> tokenize(const std::string& text) {
    std::vector<RawLine> out;
    std::stringstream ss(text);
    std::string line;
    std::string section; // "" = top level
    int number = 0;
    while (std::getline(ss, line)) {
        ++number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(number, "unterminated section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "system" && section != "run" && section != "output")
                fail(number, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(number, "expected key = value, got '" + line + "'");
        RawLine rl;
        rl.number = number;
        rl.section = section;
        rl.key = trim(line.substr(0, eq));
        rl.value = trim(line.substr(eq + 1));
        if (rl.key.empty()) fail(number, "missing key before '='");
        out.push_back(rl);
    }
    return out;
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    const std::vector<RawLine> lines = tokenize(text);

    // The scenario selects the defaults, so resolve it first.
    Scenario scenario = Scenario::quantum_measured;
    for (const auto& rl : lines) {
        if (rl.section.empty() && rl.key == "scenario") {
            try {
                scenario = scenario_from_name(rl.value);
            } catch (const ConfigError& e) {
                fail(rl.number, e.what());
            }
        }
    }
    ScenarioConfig c = default_config(scenario);

    for (const auto& rl : lines) {
        const std::string& k = rl.key;
        const std::string& v = rl.value;
        const int ln = rl.number;
        if (rl.section.empty()) {
            if (k == "scenario") continue; // already applied
            fail(ln, "unknown key '" + k + "' at top level (only 'scenario' is allowed)");
        } else if (rl.section == "system") {
            if (k == "h0") c.system.h0 = v;
            else if (k == "inertia") c.system.inertia = parse_double(v, k, ln);
            else if (k == "coefficients") c.system.coefficients = parse_double_list(v, k, ln);
            else if (k == "potential") c.system.potential = v;
            else if (k == "harmonics") c.system.harmonics = parse_harmonics(v, k, ln);
            else if (k == "lambda") c.system.lambda = parse_double(v, k, ln);
            else if (k == "period") c.system.period = parse_double(v, k, ln);
            else if (k == "tau") c.system.tau = parse_double(v, k, ln);
            else if (k == "hbar") c.system.hbar = parse_double(v, k, ln);
            else if (k == "basis_m") c.system.basis_m = static_cast<int>(parse_int(v, k, ln));
            else if (k == "grid_g") c.system.grid_g = static_cast<int>(parse_int(v, k, ln));
            else fail(ln, "unknown key '" + k + "' in [system]");
        } else if (rl.section == "run") {
            if (k == "kicks") c.run.kicks = static_cast<int>(parse_int(v, k, ln));
            else if (k == "ensemble") c.run.ensemble = parse_int(v, k, ln);
            else if (k == "trajectories") c.run.trajectories = static_cast<int>(parse_int(v, k, ln));
            else if (k == "seed") c.run.seed = parse_u64(v, k, ln);
            else if (k == "p0_index") c.run.p0_index = static_cast<int>(parse_int(v, k, ln));
            else if (k == "leak_budget") c.run.leak_budget = parse_double(v, k, ln);
            else if (k == "branch_budget") c.run.branch_budget = parse_u64(v, k, ln);
            else if (k == "fit_lo") c.run.fit_lo = static_cast<int>(parse_int(v, k, ln));
            else if (k == "fit_hi") c.run.fit_hi = static_cast<int>(parse_int(v, k, ln));
            else fail(ln, "unknown key '" + k + "' in [run]");
        } else { // output
            if (k == "dir") c.output.dir = v;
            else if (k == "formats") {
                if (v != "csv") fail(ln, "key 'formats': only 'csv' is supported, got '" + v + "'");
                c.output.formats = v;
            } else if (k == "dump_w") c.output.dump_w = parse_bool(v, k, ln);
            else fail(ln, "unknown key '" + k + "' in [output]");
        }
    }

    // Range validation with field names; build_system performs the physics
    // checks, the run block is checked here.
    (void)build_system(c.system.to_params());
    if (c.run.kicks < 1) throw ConfigError("field kicks: must be >= 1");
    if (c.run.ensemble < 1) throw ConfigError("field ensemble: must be >= 1");
    if (c.run.trajectories < 0) throw ConfigError("field trajectories: must be >= 0");
    if (c.run.p0_index < -c.system.basis_m || c.run.p0_index > c.system.basis_m)
        throw ConfigError("field p0_index: outside the basis [-" +
                          std::to_string(c.system.basis_m) + ", " +
                          std::to_string(c.system.basis_m) + "]");
    if (!(c.run.leak_budget > 0.0)) throw ConfigError("field leak_budget: must be > 0");
    if (c.run.fit_lo >= 0 && c.run.fit_hi >= 0 && c.run.fit_hi - c.run.fit_lo + 1 < 3)
        throw ConfigError("fields fit_lo/fit_hi: window must span at least 3 kicks");
    return c;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string write_config(const ScenarioConfig& c) {
    std::ostringstream out;
    out << "scenario = " << scenario_name(c.scenario) << "\n\n";
    out << "[system]\n";
    out << "h0 = " << c.system.h0 << "\n";
    if (c.system.h0 == "rotator") out << "inertia = " << fmt(c.system.inertia) << "\n";
    if (!c.system.coefficients.empty()) {
        out << "coefficients = ";
        for (std::size_t i = 0; i < c.system.coefficients.size(); ++i)
            out << (i ? ", " : "") << fmt(c.system.coefficients[i]);
        out << "\n";
    }
    out << "potential = " << c.system.potential << "\n";
    if (!c.system.harmonics.empty()) {
        out << "harmonics = ";
        for (std::size_t i = 0; i < c.system.harmonics.size(); ++i)
            out << (i ? ", " : "") << c.system.harmonics[i].k << ":"
                << fmt(c.system.harmonics[i].weight);
        out << "\n";
    }
    out << "lambda = " << fmt(c.system.lambda) << "\n";
    out << "period = " << fmt(c.system.period) << "\n";
    out << "tau = " << fmt(c.system.tau) << "\n";
    out << "hbar = " << fmt(c.system.hbar) << "\n";
    out << "basis_m = " << c.system.basis_m << "\n";
    out << "grid_g = " << c.system.grid_g << "\n\n";
    out << "[run]\n";
    out << "kicks = " << c.run.kicks << "\n";
    out << "ensemble = " << c.run.ensemble << "\n";
    out << "trajectories = " << c.run.trajectories << "\n";
    out << "seed = " << c.run.seed << "\n";
    out << "p0_index = " << c.run.p0_index << "\n";
    out << "leak_budget = " << fmt(c.run.leak_budget) << "\n";
    out << "branch_budget = " << c.run.branch_budget << "\n";
    out << "fit_lo = " << c.run.fit_lo << "\n";
    out << "fit_hi = " << c.run.fit_hi << "\n\n";
    out << "[output]\n";
    out << "dir = " << c.output.dir << "\n";
    out << "formats = " << c.output.formats << "\n";
    out << "dump_w = " << (c.output.dump_w ? "true" : "false") << "\n";
    return out.str();
}

} // namespace kdiff
