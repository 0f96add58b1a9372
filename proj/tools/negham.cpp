// negham: command-line front end for the quasiparticle predictor, the exact
// Gaussian engine and the oracle suites.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "negham/harness.hpp"

using namespace negham;
using namespace negham::harness;

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> state;
    std::optional<double> filling;
    std::optional<int> l, l1, l2, d, offset, steps, kgrid, workers, ceiling;
    std::optional<double> tmin, tmax, cutoff;
    std::optional<std::string> alphas, lambdas, cutoff_mode, output, format;
};

void add_common(CLI::App* app, Flags& f)
{
    app->add_option("--config", f.config, "key = value config file");
    app->add_option("--state", f.state, "dimer | squeezed | symmetric");
    app->add_option("--filling", f.filling, "constant filling for squeezed/symmetric");
    app->add_option("--l", f.l, "sets l1 = l2");
    app->add_option("--l1", f.l1);
    app->add_option("--l2", f.l2);
    app->add_option("--d", f.d, "gap between the intervals");
    app->add_option("--offset", f.offset, "lattice shift of the geometry");
    app->add_option("--tmin", f.tmin);
    app->add_option("--tmax", f.tmax);
    app->add_option("--steps", f.steps);
    app->add_option("--alpha", f.alphas, "comma separated list");
    app->add_option("--lambda", f.lambdas, "comma separated list");
    app->add_option("--kgrid", f.kgrid);
    app->add_option("--cutoff", f.cutoff);
    app->add_option("--cutoff-mode", f.cutoff_mode, "clip | truncate");
    app->add_option("--workers", f.workers, "0 = all cores; overrides NEGHAM_THREADS");
    app->add_option("--ceiling", f.ceiling, "largest BdG dimension for exact runs");
    app->add_option("--output", f.output, "file, or - for stdout");
    app->add_option("--format", f.format, "csv | json");
}

ExperimentConfig resolve(const Flags& f)
{
    ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (const char* env = std::getenv("NEGHAM_THREADS")) apply_setting(c, "numerics.workers", env);
    if (f.state) c.state = *f.state;
    if (f.filling) c.filling = *f.filling;
    if (f.l) c.l1 = c.l2 = *f.l;
    if (f.l1) c.l1 = *f.l1;
    if (f.l2) c.l2 = *f.l2;
    if (f.d) c.d = *f.d;
    if (f.offset) c.offset = *f.offset;
    if (f.tmin) c.t_min = *f.tmin;
    if (f.tmax) c.t_max = *f.tmax;
    if (f.steps) c.steps = *f.steps;
    if (f.alphas) apply_setting(c, "replica.alphas", *f.alphas);
    if (f.lambdas) apply_setting(c, "replica.lambdas", *f.lambdas);
    if (f.kgrid) c.kgrid = *f.kgrid;
    if (f.cutoff) c.cutoff = *f.cutoff;
    if (f.cutoff_mode) c.cutoff_mode = *f.cutoff_mode;
    if (f.workers) c.workers = *f.workers;
    if (f.ceiling) c.ceiling = *f.ceiling;
    if (f.output) c.output = *f.output;
    if (f.format) c.format = *f.format;
    c.validate();
    set_workers(c.workers);
    return c;
}

template <class F>
void with_output(const std::string& path, F&& write)
{
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    write(out);
}

void emit(const ExperimentConfig& c, const std::vector<ResultRow>& rows)
{
    with_output(c.output, [&](std::ostream& os) {
        if (c.format == "json") write_json(os, rows);
        else write_csv(os, rows);
    });
}

void write_dumps(const ExperimentConfig& c, const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (double t : c.times()) {
        const std::string tag = format_double(t);
        const auto prof = nearest_neighbour_profile(c, t);
        std::ofstream nd(fs::path(dir) / ("ndiag_t" + tag + ".csv"));
        nd << "site,interval,exact_re,exact_im,kernel_re,kernel_im\n";
        for (const auto& p : prof.points)
            nd << p.site << ',' << p.interval << ',' << format_double(p.exact.real()) << ','
               << format_double(p.exact.imag()) << ',' << format_double(p.kernel.real()) << ','
               << format_double(p.kernel.imag()) << '\n';
        std::ofstream ni(fs::path(dir) / ("nimag_eigs_t" + tag + ".csv"));
        ni << "eigenvalue\n";
        for (double e : prof.imag_eigenvalues) ni << format_double(e) << '\n';
        std::ofstream od(fs::path(dir) / ("offdiag_t" + tag + ".csv"));
        od << "x,y,z,value_re,value_im,deosc_re,deosc_im\n";
        for (const auto& s : prof.offdiag)
            od << s.x << ',' << s.y << ',' << s.z << ',' << format_double(s.value.real()) << ','
               << format_double(s.value.imag()) << ',' << format_double(s.deoscillated.real()) << ','
               << format_double(s.deoscillated.imag()) << '\n';
        std::ofstream km(fs::path(dir) / ("K_t" + tag + ".txt"));
        write_matrix(km, dump_matrix(c, "K", t), "entanglement Hamiltonian, t=" + tag);
    }
}

void print_checks(const std::vector<Check>& checks)
{
    for (const auto& c : checks)
        std::cout << (c.pass ? "PASS" : (c.counted ? "FAIL" : "INFO")) << "  " << c.name
                  << "  max=" << format_double(c.value) << "  tol=" << format_double(c.tolerance) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"negativity Hamiltonian laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    Flags f;
    auto* predict = app.add_subcommand("predict", "quasiparticle predictions");
    auto* exact = app.add_subcommand("exact", "exact Gaussian sweep of the dimer quench");
    auto* compare = app.add_subcommand("compare", "quasiparticle vs exact with tolerances");
    auto* oracle = app.add_subcommand("oracle", "pair-algebra and dense Fock oracle suites");
    auto* dump = app.add_subcommand("dump-matrix", "write one matrix at one time");
    for (auto* s : {predict, exact, compare, dump}) add_common(s, f);

    std::string dump_dir;
    exact->add_option("--dump-dir", dump_dir, "write K, N_diag, N_imag and off-diagonal profiles per time");

    std::optional<std::string> quantity, route;
    std::optional<double> rel_tol, abs_tol;
    compare->add_option("--quantity", quantity, "log_ratio | renyi_negativity | renyi_entropy");
    compare->add_option("--route", route, "spectrum | composed");
    compare->add_option("--rel-tol", rel_tol, "fraction of the predicted peak");
    compare->add_option("--abs-tol", abs_tol);

    int grid = 20, max_modes = 8;
    oracle->add_option("--grid", grid, "n x phi grid size of the pair suite");
    oracle->add_option("--max-modes", max_modes, "largest l1 + l2 of the dense suite");

    std::string which = "N";
    double dump_t = 0.0;
    dump->add_option("--which", which, "C, bdg, G, K, N, N_real, N_imag, N_diag, N_offdiag");
    dump->add_option("--t", dump_t, "time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*predict) {
            const auto c = resolve(f);
            emit(c, cmd_predict(c));
        } else if (*exact) {
            const auto c = resolve(f);
            emit(c, cmd_exact(c));
            if (!dump_dir.empty()) write_dumps(c, dump_dir);
        } else if (*compare) {
            auto c = resolve(f);
            if (quantity) c.quantity = *quantity;
            if (route) c.exact_route = *route;
            if (rel_tol) c.rel_tol = *rel_tol;
            if (abs_tol) c.abs_tol = *abs_tol;
            c.validate();
            const auto rep = cmd_compare(c);
            with_output(c.output, [&](std::ostream& os) {
                if (c.format == "json") {
                    nlohmann::json arr = nlohmann::json::array();
                    for (const auto& e : rep.entries)
                        arr.push_back({{"t", e.t}, {"alpha", e.alpha}, {"qp", e.qp}, {"exact", e.exact},
                                       {"deviation", e.deviation}, {"allowed", e.allowed}, {"pass", e.pass}});
                    os << nlohmann::json{{"pass", rep.pass}, {"entries", arr}}.dump(1) << '\n';
                } else {
                    os << "t,alpha,qp,exact,deviation,allowed,pass\n";
                    for (const auto& e : rep.entries)
                        os << format_double(e.t) << ',' << e.alpha << ',' << format_double(e.qp) << ','
                           << format_double(e.exact) << ',' << format_double(e.deviation) << ','
                           << format_double(e.allowed) << ',' << (e.pass ? 1 : 0) << '\n';
                }
            });
            std::cerr << rep.summary;
            return rep.pass ? exit_ok : exit_tolerance;
        } else if (*oracle) {
            if (const char* env = std::getenv("NEGHAM_THREADS")) set_workers(std::atoi(env));
            auto checks = pair_suite(grid);
            const auto dense = dense_suite(max_modes);
            checks.insert(checks.end(), dense.begin(), dense.end());
            print_checks(checks);
            return all_pass(checks) ? exit_ok : exit_tolerance;
        } else if (*dump) {
            const auto c = resolve(f);
            const auto m = dump_matrix(c, which, dump_t);
            with_output(c.output, [&](std::ostream& os) {
                write_matrix(os, m, which + " t=" + format_double(dump_t) + " l1=" + std::to_string(c.l1) +
                                        " l2=" + std::to_string(c.l2) + " d=" + std::to_string(c.d) +
                                        " sites A1 then A2, little-endian Jordan-Wigner");
            });
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_ok;
}
