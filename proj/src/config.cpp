#include "emapr/bench.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace emapr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw std::invalid_argument("bad number for '" + key + "': '" + v + "'");
    return x;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
    Int x{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("bad integer for '" + key + "': '" + v + "'");
    }
    return x;
}

std::string num(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

}  // namespace

void apply_setting(BenchmarkConfig& c, const std::string& key, const std::string& value) {
    if (key == "problem") {
        c.problem = parse_problem(value);
    } else if (key == "element") {
        c.element = parse_element(value);
    } else if (key == "alpha") {
        c.alpha = to_double(key, value);
    } else if (key == "nu") {
        c.nu = to_double(key, value);
    } else if (key == "dt") {
        c.dt = to_double(key, value);
    } else if (key == "T") {
        c.T = to_double(key, value);
    } else if (key == "n") {
        c.n = to_int<int>(key, value);
    } else if (key == "levels") {
        c.levels = to_int<int>(key, value);
    } else if (key == "mesh_file") {
        c.mesh_file = value;
    } else if (key == "perturb") {
        c.perturb = to_double(key, value);
    } else if (key == "seed") {
        c.seed = to_int<std::uint64_t>(key, value);
    } else if (key == "form") {
        c.form = parse_form(value);
    } else if (key == "scheme") {
        c.scheme = parse_scheme(value);
    } else if (key == "method") {
        c.nonlinear.method = parse_method(value);
    } else if (key == "tol") {
        c.nonlinear.tolerance = to_double(key, value);
    } else if (key == "max_iter") {
        c.nonlinear.max_iterations = to_int<int>(key, value);
    } else if (key == "f_amplitude") {
        c.gradient_amplitude = to_double(key, value);
    } else if (key == "initial") {
        c.initial = parse_initial_condition(value);
    } else if (key == "record_every") {
        c.record_every = to_int<int>(key, value);
    } else if (key == "output_dir") {
        c.output_dir = value;
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

std::map<std::string, std::string> config_to_map(const BenchmarkConfig& c) {
    return {
        {"problem", std::string(problem_name(c.problem))},
        {"element", std::string(element_name(c.element))},
        {"alpha", num(c.alpha)},
        {"nu", num(c.nu)},
        {"dt", num(c.dt)},
        {"T", num(c.T)},
        {"n", std::to_string(c.n)},
        {"levels", std::to_string(c.levels)},
        {"mesh_file", c.mesh_file},
        {"perturb", num(c.perturb)},
        {"seed", std::to_string(c.seed)},
        {"form", std::string(form_name(c.form))},
        {"scheme", std::string(scheme_name(c.scheme))},
        {"method", std::string(method_name(c.nonlinear.method))},
        {"tol", num(c.nonlinear.tolerance)},
        {"max_iter", std::to_string(c.nonlinear.max_iterations)},
        {"f_amplitude", num(c.gradient_amplitude)},
        {"initial", std::string(initial_condition_name(c.initial))},
        {"record_every", std::to_string(c.record_every)},
        {"output_dir", c.output_dir},
    };
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

BenchmarkConfig make_config(const std::map<std::string, std::string>& settings) {
    const auto it = settings.find("problem");
    BenchmarkConfig c = default_config(it == settings.end() ? ProblemKind::PotentialFlow : parse_problem(it->second));
    for (const auto& [key, value] : settings) apply_setting(c, key, value);
    return c;
}

}  // namespace emapr
