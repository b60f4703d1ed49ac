#include "emapr/bench.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace emapr;

namespace {

// one --key option per config key; flags override the config file
struct ConfigOptions {
    std::string file;
    std::map<std::string, std::string> values;

    void attach(CLI::App& app) {
        app.add_option("--config", file, "key = value config file");
        for (const auto& [key, def] : config_to_map(BenchmarkConfig{})) {
            app.add_option("--" + key, values[key], "config key '" + key + "'");
        }
    }

    BenchmarkConfig build(CLI::App& app) const {
        std::map<std::string, std::string> settings;
        if (!file.empty()) settings = read_config_file(file);
        for (const auto& [key, value] : values) {
            if (app.count("--" + key) > 0) settings[key] = value;
        }
        BenchmarkConfig c = make_config(settings);
        validate(c);
        return c;
    }
};

std::string run_label(const BenchmarkConfig& c) {
    std::ostringstream s;
    s << problem_name(c.problem) << '_' << element_name(c.element) << '_' << form_name(c.form);
    return s.str();
}

fs::path output_path(const BenchmarkConfig& c, const std::string& name) {
    fs::path dir = resolve_output_dir(c);
    fs::create_directories(dir);
    return dir / name;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void write_dat(const fs::path& path, const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out = open_output(path);
    out << "# t E E_d M_sum M_x err_L2_u err_L2_Pu err_H1_u\n";
    for (const auto& r : records) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.6f %.10e %.10e %.10e %.10e %.10e %.10e %.10e\n", r.t, r.q.E, r.q.E_d,
                      r.q.M.x() + r.q.M.y(), r.q.M_x, r.errors.L2_u, r.errors.L2_Pu, r.errors.H1_u);
        out << buf;
    }
}

void print_rates(std::ostream& out, const ConvergenceStudy& s) {
    auto cell = [](const std::vector<std::optional<double>>& r, std::size_t l) {
        char buf[16];
        if (l == 0 || !r[l - 1]) return std::string("   -  ");
        std::snprintf(buf, sizeof buf, "%6.3f", *r[l - 1]);
        return std::string(buf);
    };
    out << "level     h         L2_u    eoc     L2_Pu   eoc     H1_u    eoc     L2_p    eoc\n";
    for (std::size_t l = 0; l < s.levels.size(); ++l) {
        const ErrorBundle& e = s.levels[l].records.back().errors;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%5zu %9.3e %9.3e %s %9.3e %s %9.3e %s %9.3e %s\n", l, s.levels[l].h, e.L2_u,
                      cell(s.eoc_L2_u, l).c_str(), e.L2_Pu, cell(s.eoc_L2_Pu, l).c_str(), e.H1_u,
                      cell(s.eoc_H1_u, l).c_str(), e.L2_p, cell(s.eoc_L2_p, l).c_str());
        out << buf;
    }
}

void summarize(std::ostream& out, const std::string& label, const RunResult& r) {
    const DiagnosticsRecord& first = r.records.front();
    const DiagnosticsRecord& last = r.records.back();
    auto rel = [](double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b); };
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "%s: cells=%d dofs=%d+%d t=%.4g E_d drift=%.3e M_x drift=%.3e |M|=%.3e L2_u=%.4e L2_Pu=%.4e "
                  "H1_u=%.4e (%.1fs)\n",
                  label.c_str(), r.num_cells, r.velocity_dofs, r.pressure_dofs, last.t, rel(last.q.E_d, first.q.E_d),
                  rel(last.q.M_x, first.q.M_x), last.q.M.norm(), last.errors.L2_u, last.errors.L2_Pu,
                  last.errors.H1_u, r.seconds);
    out << buf;
}

RecordCallback progress(bool verbose) {
    if (!verbose) return {};
    return [](const DiagnosticsRecord& r) {
        std::fprintf(stderr, "t=%-8.4g E_d=%.10e M_x=%.6e L2_u=%.4e\n", r.t, r.q.E_d, r.q.M_x, r.errors.L2_u);
    };
}

int cmd_mesh(int n, const std::vector<double>& domain, int refine, double perturb, std::uint64_t seed,
             const std::string& output) {
    if (domain.size() != 4) throw std::invalid_argument("--domain needs x0,y0,x1,y1");
    Mesh mesh = build_uniform_square_mesh(n, {domain[0], domain[1], domain[2], domain[3]});
    for (int i = 0; i < refine; ++i) mesh = refine_uniform(mesh);
    if (perturb > 0.0) mesh = perturb_interior_vertices(mesh, perturb, seed);
    std::printf("vertices,edges,cells,h,shape_regularity\n%d,%d,%d,%.6e,%.6f\n", mesh.num_vertices(),
                mesh.num_edges(), mesh.num_cells(), mesh.max_h(), shape_regularity(mesh));
    if (!output.empty()) {
        std::ofstream out = open_output(output);
        write_mesh(out, mesh);
    }
    return 0;
}

int cmd_run(const BenchmarkConfig& c, const std::string& output, bool dat, bool verbose) {
    std::string label = output.empty() ? run_label(c) : output;
    if (label.ends_with(".csv")) label.resize(label.size() - 4);
    if (c.levels > 1) {
        const ConvergenceStudy study = run_convergence(c);
        std::ofstream out = open_output(output_path(c, label + "_eoc.csv"));
        write_convergence_csv(out, study);
        print_rates(std::cout, study);
        return 0;
    }
    const RunResult r = run_simulation(c, std::make_shared<const Mesh>(make_mesh(c)), progress(verbose));
    const fs::path csv = output_path(c, label + ".csv");
    std::ofstream out = open_output(csv);
    write_records_csv(out, r.records);
    if (dat) write_dat(output_path(c, label + ".dat"), r.records);
    summarize(std::cout, label, r);
    std::cout << "wrote " << csv.string() << '\n';
    return 0;
}

int cmd_compare(BenchmarkConfig c, const std::string& forms, bool dat, bool verbose) {
    std::vector<ConvectionForm> list;
    std::stringstream ss(forms);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) list.push_back(parse_form(item));
    }
    if (list.empty()) throw std::invalid_argument("--forms is empty");
    auto mesh = std::make_shared<const Mesh>(make_mesh(c));
    for (ConvectionForm form : list) {
        c.form = form;
        const std::string label = run_label(c);
        const RunResult r = run_simulation(c, mesh, progress(verbose));
        std::ofstream out = open_output(output_path(c, label + ".csv"));
        write_records_csv(out, r.records);
        if (dat) write_dat(output_path(c, label + ".dat"), r.records);
        summarize(std::cout, label, r);
    }
    return 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
    return out;
}

int cmd_eoc(const std::string& input, const std::string& h_column) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open '" + input + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("'" + input + "' is empty");
    const std::vector<std::string> header = split_csv_line(line);
    int hcol = -1;
    std::vector<int> cols;
    for (int i = 0; i < static_cast<int>(header.size()); ++i) {
        if (header[i] == h_column) hcol = i;
        if (header[i].rfind("err", 0) == 0) cols.push_back(i);
    }
    if (hcol < 0) throw std::runtime_error("no column '" + h_column + "' in '" + input + "'");
    if (cols.empty()) throw std::runtime_error("no err* columns in '" + input + "'");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        std::vector<double> row(header.size(), std::nan(""));
        for (std::size_t i = 0; i < f.size() && i < row.size(); ++i) {
            if (!f[i].empty()) row[i] = std::stod(f[i]);
        }
        rows.push_back(std::move(row));
    }
    std::printf("%-14s", h_column.c_str());
    for (int c : cols) std::printf(" %14s %7s", header[c].c_str(), "eoc");
    std::printf("\n");
    std::vector<std::vector<std::optional<double>>> rates;
    for (int c : cols) {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& r : rows) pairs.emplace_back(r[hcol], r[c]);
        rates.push_back(eoc(pairs));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::printf("%-14.6e", rows[i][hcol]);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            std::printf(" %14.6e", rows[i][cols[k]]);
            if (i > 0 && rates[k][i - 1]) {
                std::printf(" %7.3f", *rates[k][i - 1]);
            } else {
                std::printf(" %7s", "-");
            }
        }
        std::printf("\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pressure-robust EMA-conserving finite element benchmarks"};
    app.require_subcommand(1);

    auto* mesh_cmd = app.add_subcommand("mesh", "build a uniform mesh, print statistics, optionally write it");
    int mesh_n = 8, mesh_refine = 0;
    std::vector<double> mesh_domain{0.0, 0.0, 1.0, 1.0};
    double mesh_perturb = 0.0;
    std::uint64_t mesh_seed = 1;
    std::string mesh_output;
    mesh_cmd->add_option("--n", mesh_n, "cells per side")->check(CLI::PositiveNumber);
    mesh_cmd->add_option("--domain", mesh_domain, "x0 y0 x1 y1")->delimiter(',')->expected(4);
    mesh_cmd->add_option("--refine", mesh_refine, "uniform refinements")->check(CLI::NonNegativeNumber);
    mesh_cmd->add_option("--perturb", mesh_perturb, "interior vertex jitter");
    mesh_cmd->add_option("--seed", mesh_seed, "jitter seed");
    mesh_cmd->add_option("--output,-o", mesh_output, "mesh file to write");

    auto* run_cmd = app.add_subcommand("run", "run one benchmark (a convergence study when levels > 1)");
    ConfigOptions run_opts;
    run_opts.attach(*run_cmd);
    std::string run_output;
    bool run_dat = false, run_verbose = false;
    run_cmd->add_option("--output,-o", run_output, "output file stem");
    run_cmd->add_flag("--dat", run_dat, "also write a whitespace-separated .dat file");
    run_cmd->add_flag("--verbose,-v", run_verbose, "print every record to stderr");

    auto* eoc_cmd = app.add_subcommand("eoc", "rate table for the err* columns of a CSV");
    std::string eoc_input, eoc_h = "h";
    eoc_cmd->add_option("--input,-i", eoc_input, "CSV with an h column and err* columns")->required();
    eoc_cmd->add_option("--h-column", eoc_h, "name of the mesh size column");

    auto* cmp_cmd = app.add_subcommand("compare", "run several convection forms on one mesh");
    ConfigOptions cmp_opts;
    cmp_opts.attach(*cmp_cmd);
    std::string cmp_forms = "emapr,emac,classical";
    bool cmp_dat = false, cmp_verbose = false;
    cmp_cmd->add_option("--forms", cmp_forms, "comma-separated forms");
    cmp_cmd->add_flag("--dat", cmp_dat, "also write .dat files");
    cmp_cmd->add_flag("--verbose,-v", cmp_verbose, "print every record to stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mesh_cmd) return cmd_mesh(mesh_n, mesh_domain, mesh_refine, mesh_perturb, mesh_seed, mesh_output);
        if (*run_cmd) return cmd_run(run_opts.build(*run_cmd), run_output, run_dat, run_verbose);
        if (*eoc_cmd) return cmd_eoc(eoc_input, eoc_h);
        if (*cmp_cmd) return cmd_compare(cmp_opts.build(*cmp_cmd), cmp_forms, cmp_dat, cmp_verbose);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
