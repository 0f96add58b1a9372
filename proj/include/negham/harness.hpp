#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "negham/gaussian.hpp"
#include "negham/qp.hpp"

namespace negham::harness {

inline constexpr const char* version = "0.1.0";

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ToleranceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_tolerance = 3 };

struct ExperimentConfig {
    std::string state = "dimer";  // dimer | squeezed | symmetric (the latter two at constant filling)
    double filling = 0.5;
    int l1 = 200, l2 = 200, d = 200;
    int offset = 0;
    double t_min = 0.0, t_max = 600.0;
    int steps = 60;
    std::vector<int> alphas{2, 3, 4};
    std::vector<double> lambdas;
    int kgrid = 4096;
    double cutoff = 1e-8;
    std::string cutoff_mode = "truncate";
    std::string output = "-";
    std::string format = "csv";
    int workers = 0;  // 0 = available parallelism
    int ceiling = 4000;
    // compare
    std::string quantity = "log_ratio";
    std::string exact_route = "spectrum";  // spectrum | composed
    double rel_tol = 0.05;
    double abs_tol = 1e-3;

    std::vector<double> times() const;
    TripartiteGeometry geometry() const;
    qp::Setup qp_setup() const;
    gauss::CutoffMode mode() const;
    void validate() const;
};

// Flat key = value text; "[section]" headers prefix keys with "section.".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string to_config_text(const ExperimentConfig& cfg);

struct ResultRow {
    std::string method;  // qp | exact | oracle
    std::string quantity;
    double t = 0.0;
    int alpha = 0;
    double lambda = 0.0;
    double value_re = 0.0;
    double value_im = 0.0;
    double cutoff = 0.0;
    int kgrid = 0;
    std::string version = harness::version;
};

void sort_rows(std::vector<ResultRow>& rows);
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_json(std::ostream& os, const std::vector<ResultRow>& rows);
std::string format_double(double v);  // 17 significant digits

std::vector<ResultRow> cmd_predict(const ExperimentConfig& cfg);
std::vector<ResultRow> cmd_exact(const ExperimentConfig& cfg);

struct CompareEntry {
    double t = 0.0;
    int alpha = 0;
    double qp = 0.0;
    double exact = 0.0;
    double deviation = 0.0;
    double allowed = 0.0;
    bool pass = true;
};
struct CompareReport {
    std::vector<CompareEntry> entries;
    bool pass = true;
    std::string summary;
};
CompareReport cmd_compare(const ExperimentConfig& cfg);

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool counted = true;  // informational checks do not affect the verdict
};
// Pair algebra over an n x phi grid.
std::vector<Check> pair_suite(int grid = 20);
// Dense Fock oracle vs covariance formulas on small dimer geometries.
std::vector<Check> dense_suite(int max_modes = 8, int max_gap = 3, const std::vector<double>& times = {0, 2, 5, 10});
bool all_pass(const std::vector<Check>& checks);

// Text matrix dump: "rows cols" header, then row-major "re,im" pairs.
void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m, const std::string& comment = "");
Eigen::MatrixXcd read_matrix(std::istream& is);
Eigen::MatrixXcd dump_matrix(const ExperimentConfig& cfg, const std::string& which, double t);

// Exact operators at one time: N_diag(x, x+1) against K_-(x, 1) on A1 and
// K_+(x, 1) on A2, the N_imag spectrum and the A2 x A1 off-diagonal profile.
struct ProfilePoint {
    int site = 0;      // lattice site
    int interval = 1;  // 1 or 2
    cplx exact;
    cplx kernel;
};
struct ExactProfile {
    std::vector<ProfilePoint> points;
    std::vector<double> imag_eigenvalues;
    std::vector<gauss::OffdiagSample> offdiag;
    double commutator = 0.0;  // ||[N_real, N_imag]|| / ||N_real||
    double k_norm = 0.0;
    gauss::EigenDiagnostics diag;
    gauss::Decomposition dec;
    Eigen::MatrixXcd k_embedded;
};
ExactProfile nearest_neighbour_profile(const ExperimentConfig& cfg, double t);

void set_workers(int workers);

}  // namespace negham::harness
