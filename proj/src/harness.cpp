#include "negham/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "negham/oracles.hpp"

namespace negham::harness {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v)
{
    std::istringstream is(v);
    T x{};
    is >> x;
    if (is.fail() || !(is >> std::ws).eof()) throw UsageError("bad value for " + key + ": '" + v + "'");
    return x;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v)
{
    std::vector<T> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number<T>(key, item));
    }
    return out;
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        if constexpr (std::is_same_v<T, double>) s += format_double(v[i]);
        else s += std::to_string(v[i]);
    }
    return s;
}

// Runs body(i) for i in [0, n) on the OpenMP pool and rethrows the first failure.
void parallel_for(int n, const std::function<void(int)>& body)
{
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace

std::string format_double(double v)
{
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> ExperimentConfig::times() const
{
    std::vector<double> t;
    if (steps == 0) return {t_min};
    for (int i = 0; i <= steps; ++i) t.push_back(t_min + (t_max - t_min) * i / steps);
    return t;
}

TripartiteGeometry ExperimentConfig::geometry() const { return {l1, l2, d}; }

qp::Setup ExperimentConfig::qp_setup() const
{
    qp::Setup s;
    if (state == "dimer") s.occupation = OccupationFunction::dimer();
    else if (state == "squeezed") s.occupation = OccupationFunction::constant(filling, StateKind::squeezed);
    else if (state == "symmetric") s.occupation = OccupationFunction::constant(filling, StateKind::symmetric);
    else throw UsageError("unknown state '" + state + "'");
    s.geometry = geometry();
    s.kgrid = kgrid;
    return s;
}

gauss::CutoffMode ExperimentConfig::mode() const
{
    if (cutoff_mode == "clip") return gauss::CutoffMode::clip;
    if (cutoff_mode == "truncate") return gauss::CutoffMode::truncate;
    throw UsageError("cutoff_mode must be clip or truncate");
}

void ExperimentConfig::validate() const
{
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw UsageError(what);
    };
    need(state == "dimer" || state == "squeezed" || state == "symmetric", "state must be dimer, squeezed or symmetric");
    need(filling >= 0.0 && filling <= 1.0, "filling must lie in [0,1]");
    need(l1 >= 1 && l2 >= 1 && d >= 1, "geometry.l1, l2, d must be >= 1");
    need(t_min >= 0.0 && t_max >= t_min, "time grid must satisfy 0 <= t_min <= t_max");
    need(steps >= 0, "time.steps must be >= 0");
    need(!alphas.empty(), "replica.alphas must not be empty");
    for (int a : alphas) need(a >= 1, "alpha must be >= 1");
    need(kgrid >= 4, "numerics.kgrid must be >= 4");
    need(cutoff > 0.0 && cutoff < 0.5, "numerics.cutoff must lie in (0, 0.5)");
    (void)mode();
    need(format == "csv" || format == "json", "output.format must be csv or json");
    need(workers >= 0, "numerics.workers must be >= 0");
    need(ceiling >= 1, "numerics.ceiling must be >= 1");
    need(exact_route == "spectrum" || exact_route == "composed", "compare.exact_route must be spectrum or composed");
    need(quantity == "log_ratio" || quantity == "renyi_negativity" || quantity == "renyi_entropy",
         "compare.quantity must be log_ratio, renyi_negativity or renyi_entropy");
    need(rel_tol >= 0.0 && abs_tol >= 0.0, "tolerances must be >= 0");
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& v)
{
    if (key == "state.kind") c.state = v;
    else if (key == "state.filling") c.filling = parse_number<double>(key, v);
    else if (key == "geometry.l1") c.l1 = parse_number<int>(key, v);
    else if (key == "geometry.l2") c.l2 = parse_number<int>(key, v);
    else if (key == "geometry.d") c.d = parse_number<int>(key, v);
    else if (key == "geometry.offset") c.offset = parse_number<int>(key, v);
    else if (key == "time.t_min") c.t_min = parse_number<double>(key, v);
    else if (key == "time.t_max") c.t_max = parse_number<double>(key, v);
    else if (key == "time.steps") c.steps = parse_number<int>(key, v);
    else if (key == "replica.alphas") c.alphas = parse_list<int>(key, v);
    else if (key == "replica.lambdas") c.lambdas = parse_list<double>(key, v);
    else if (key == "numerics.kgrid") c.kgrid = parse_number<int>(key, v);
    else if (key == "numerics.cutoff") c.cutoff = parse_number<double>(key, v);
    else if (key == "numerics.cutoff_mode") c.cutoff_mode = v;
    else if (key == "numerics.workers") c.workers = parse_number<int>(key, v);
    else if (key == "numerics.ceiling") c.ceiling = parse_number<int>(key, v);
    else if (key == "output.path") c.output = v;
    else if (key == "output.format") c.format = v;
    else if (key == "compare.quantity") c.quantity = v;
    else if (key == "compare.exact_route") c.exact_route = v;
    else if (key == "compare.rel_tol") c.rel_tol = parse_number<double>(key, v);
    else if (key == "compare.abs_tol") c.abs_tol = parse_number<double>(key, v);
    else throw UsageError("unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw UsageError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        try {
            apply_setting(cfg, key, trim(line.substr(eq + 1)));
        } catch (const UsageError& e) {
            throw UsageError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& c)
{
    std::ostringstream os;
    os << "[state]\nkind = " << c.state << "\nfilling = " << format_double(c.filling) << "\n\n";
    os << "[geometry]\nl1 = " << c.l1 << "\nl2 = " << c.l2 << "\nd = " << c.d << "\noffset = " << c.offset << "\n\n";
    os << "[time]\nt_min = " << format_double(c.t_min) << "\nt_max = " << format_double(c.t_max)
       << "\nsteps = " << c.steps << "\n\n";
    os << "[replica]\nalphas = " << join(c.alphas) << "\nlambdas = " << join(c.lambdas) << "\n\n";
    os << "[numerics]\nkgrid = " << c.kgrid << "\ncutoff = " << format_double(c.cutoff)
       << "\ncutoff_mode = " << c.cutoff_mode << "\nworkers = " << c.workers << "\nceiling = " << c.ceiling << "\n\n";
    os << "[output]\npath = " << c.output << "\nformat = " << c.format << "\n\n";
    os << "[compare]\nquantity = " << c.quantity << "\nexact_route = " << c.exact_route
       << "\nrel_tol = " << format_double(c.rel_tol) << "\nabs_tol = " << format_double(c.abs_tol) << "\n";
    return os.str();
}

void sort_rows(std::vector<ResultRow>& rows)
{
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.method, a.quantity, a.alpha, a.lambda, a.t) <
               std::tie(b.method, b.quantity, b.alpha, b.lambda, b.t);
    });
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
    os << "method,quantity,t,alpha,lambda,value_re,value_im,cutoff,kgrid,version\n";
    for (const auto& r : rows)
        os << r.method << ',' << r.quantity << ',' << format_double(r.t) << ',' << r.alpha << ','
           << format_double(r.lambda) << ',' << format_double(r.value_re) << ',' << format_double(r.value_im) << ','
           << format_double(r.cutoff) << ',' << r.kgrid << ',' << r.version << '\n';
}

void write_json(std::ostream& os, const std::vector<ResultRow>& rows)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"method", r.method}, {"quantity", r.quantity}, {"t", r.t}, {"alpha", r.alpha},
                       {"lambda", r.lambda}, {"value_re", r.value_re}, {"value_im", r.value_im},
                       {"cutoff", r.cutoff}, {"kgrid", r.kgrid}, {"version", r.version}});
    os << arr.dump(1) << '\n';
}

void set_workers(int workers) { omp_set_num_threads(workers > 0 ? workers : omp_get_num_procs()); }

std::vector<ResultRow> cmd_predict(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto setup = cfg.qp_setup();
    const auto ts = cfg.times();
    std::vector<std::vector<ResultRow>> per(ts.size());
    parallel_for(static_cast<int>(ts.size()), [&](int i) {
        const double t = ts[i];
        auto row = [&](const std::string& q, int alpha, double lambda, cplx v) {
            ResultRow r;
            r.method = "qp";
            r.quantity = q;
            r.t = t;
            r.alpha = alpha;
            r.lambda = lambda;
            r.value_re = v.real();
            r.value_im = v.imag();
            r.cutoff = setup.clip;
            r.kgrid = setup.kgrid;
            per[i].push_back(r);
        };
        for (int a : cfg.alphas) {
            row("renyi_entropy", a, 0.0, qp::renyi_entropy(a, t, setup));
            if (cfg.l1 == cfg.l2) {
                const double lr = qp::log_ratio(a, t, setup);
                row("log_ratio", a, 0.0, lr);
                row(a == 1 ? "log_negativity" : "renyi_negativity", a, 0.0, qp::renyi_negativity(a, t, setup));
                if (setup.occupation.kind == StateKind::symmetric)
                    for (double lam : cfg.lambdas)
                        row("log_charged_moment", a, lam, qp::log_charged_moment(a, lam, t, setup));
            }
        }
    });
    std::vector<ResultRow> rows;
    for (auto& v : per) rows.insert(rows.end(), v.begin(), v.end());
    sort_rows(rows);
    return rows;
}

namespace {

void check_ceiling(const ExperimentConfig& cfg)
{
    if (cfg.state != "dimer") throw UnsupportedError("exact evolution is implemented for the dimer state only");
    const int dim = 2 * (cfg.l1 + cfg.l2);
    if (dim > cfg.ceiling)
        throw DomainError("matrix dimension " + std::to_string(dim) + " exceeds ceiling " + std::to_string(cfg.ceiling));
}

}  // namespace

std::vector<ResultRow> cmd_exact(const ExperimentConfig& cfg)
{
    cfg.validate();
    check_ceiling(cfg);
    gauss::SweepOptions opt;
    opt.alphas = cfg.alphas;
    opt.cutoff = cfg.cutoff;
    opt.offset = cfg.offset;
    const auto pts = gauss::sweep_parallel(cfg.geometry(), cfg.times(), opt);
    std::vector<ResultRow> rows;
    for (const auto& p : pts) {
        auto row = [&](const std::string& q, double v) {
            ResultRow r;
            r.method = "exact";
            r.quantity = q;
            r.t = p.t;
            r.alpha = p.alpha;
            r.value_re = v;
            r.cutoff = cfg.cutoff;
            r.kgrid = 0;
            rows.push_back(r);
        };
        row("renyi_entropy", p.entropy);
        row(p.alpha == 1 ? "log_negativity" : "renyi_negativity", p.negativity);
        row(p.alpha == 1 ? "log_negativity_composed" : "renyi_negativity_composed", p.composed);
        row("log_ratio", p.log_ratio);
        row("log_ratio_composed", p.log_ratio_composed);
    }
    sort_rows(rows);
    return rows;
}

CompareReport cmd_compare(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto qp_rows = cmd_predict(cfg);
    const auto ex_rows = cmd_exact(cfg);
    std::string exq = cfg.quantity;
    if (cfg.exact_route == "composed" && exq != "renyi_entropy") exq += "_composed";
    // alpha = 1 negativity rows carry the log_negativity name
    auto name = [](std::string q, int alpha) {
        if (alpha == 1 && q.rfind("renyi_negativity", 0) == 0) q.replace(0, 16, "log_negativity");
        return q;
    };
    auto lookup = [&](const std::vector<ResultRow>& rows, const std::string& q, int alpha, double t) {
        const std::string want = name(q, alpha);
        for (const auto& r : rows)
            if (r.alpha == alpha && r.t == t && r.lambda == 0.0 && r.quantity == want) return r.value_re;
        throw NumericalError("compare: missing row " + want);
    };
    CompareReport rep;
    std::ostringstream summary;
    for (int a : cfg.alphas) {
        double peak = 0.0;
        for (double t : cfg.times()) peak = std::max(peak, std::abs(lookup(qp_rows, cfg.quantity, a, t)));
        const double allowed = cfg.rel_tol * peak + cfg.abs_tol;
        double worst = 0.0;
        for (double t : cfg.times()) {
            CompareEntry e;
            e.t = t;
            e.alpha = a;
            e.qp = lookup(qp_rows, cfg.quantity, a, t);
            e.exact = lookup(ex_rows, exq, a, t);
            e.deviation = std::abs(e.exact - e.qp);
            e.allowed = allowed;
            e.pass = e.deviation <= allowed;
            rep.pass = rep.pass && e.pass;
            worst = std::max(worst, e.deviation);
            rep.entries.push_back(e);
        }
        summary << "alpha=" << a << " " << cfg.quantity << " peak=" << format_double(peak)
                << " max_dev=" << format_double(worst) << " allowed=" << format_double(allowed) << " "
                << (worst <= allowed ? "PASS" : "FAIL") << "\n";
    }
    rep.summary = summary.str();
    return rep;
}

bool all_pass(const std::vector<Check>& checks)
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || !c.counted; });
}

namespace {

using oracle::Matrix4;

double maxabs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Tracker {
    std::map<std::string, Check> checks;
    std::vector<std::string> order;
    void add(const std::string& name, double value, double tol, bool counted = true)
    {
        auto it = checks.find(name);
        if (it == checks.end()) {
            order.push_back(name);
            checks[name] = {name, value, tol, value <= tol, counted};
            return;
        }
        it->second.value = std::max(it->second.value, value);
        it->second.pass = it->second.value <= tol;
    }
    std::vector<Check> result() const
    {
        std::vector<Check> out;
        for (const auto& n : order) out.push_back(checks.at(n));
        return out;
    }
};

double distance_to_set(const std::array<double, 4>& spec, std::initializer_list<double> set)
{
    double worst = 0.0;
    for (double s : spec) {
        double best = INFINITY;
        for (double v : set) best = std::min(best, std::abs(s - v));
        worst = std::max(worst, best);
    }
    return worst;
}

// o_spectrum is sorted ascending
double multiset_distance(const std::array<double, 4>& spec, const std::array<double, 4>& want)
{
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(spec[i] - want[i]));
    return worst;
}

}  // namespace

std::vector<Check> pair_suite(int grid)
{
    using namespace oracle;
    const double tol = 1e-12;
    Tracker tr;
    const auto& ops = PairOps::get();
    const StateKind kinds[2] = {StateKind::squeezed, StateKind::symmetric};
    const double lambdas[4] = {0.0, 0.4, 1.3, -2.2};
    for (int i = 0; i < grid; ++i) {
        const double n = (i + 0.5) / grid;
        for (int j = 0; j < grid; ++j) {
            const double phi = 2.0 * pi * j / grid;
            for (StateKind kind : kinds) {
                const std::string kn = kind == StateKind::squeezed ? "squeezed" : "symmetric";
                const auto rho = pair_state(kind, n, phi);
                const Matrix4 t1 = transpose_mode1(rho.m);
                const Matrix4 r1 = time_reversal_mode1_coherent(rho.m);
                tr.add(kn + " trace", std::abs(rho.m.trace() - 1.0), tol);
                tr.add(kn + " transpose closed form", maxabs(t1 - closed_transposed(kind, n, phi)), tol);
                tr.add(kn + " transpose twice", maxabs(transpose_mode1(t1) - rho.m), tol);
                tr.add(kn + " time reversal closed form", maxabs(r1 - closed_time_reversed(kind, n, phi)), tol);
                const auto rep = verify_exponential_forms(kind, n, phi);
                tr.add(kn + " exp form transpose", rep.transpose_form, tol);
                tr.add(kn + " exp form time reversal", rep.reversal_form, tol);
                tr.add(kn + " O^2 = 2 O", rep.o_square, tol);
                tr.add(kn + " [O, N] = 0", rep.o_commutator, tol);
                tr.add(kn + " O spectrum in {0,+-2}", distance_to_set(rep.o_spectrum, {-2.0, 0.0, 2.0}), tol);
                tr.add(kn + " O spectrum equals {0,0,2,-2} (multiset)",
                       multiset_distance(rep.o_spectrum, {-2.0, 0.0, 0.0, 2.0}), tol, false);
                tr.add(kn + " O^(f) spectrum in {0,+-1}", distance_to_set(rep.of_spectrum, {-1.0, 0.0, 1.0}), tol);
                tr.add(kn + " O^(f) has no quartic term", rep.of_quartic, tol);
                tr.add(kn + " (1-i)/2 R + (1+i)/2 R^dag = T", rep.combination, tol);
                tr.add(kn + " R R^dag exp form", rep.reversal_square, tol);
                tr.add("particle-hole replacement squeezed -> symmetric", rep.ph_replacement, tol);

                const auto [a, b] = ab_split(kind, n, phi);
                tr.add(kn + " A + B = T", maxabs(a + b - t1), tol);
                tr.add(kn + " AB = BA = 0", std::max(maxabs(a * b), maxabs(b * a)), tol);
                Matrix4 ap = Matrix4::Identity(), bp = Matrix4::Identity(), tp = Matrix4::Identity();
                for (int p = 1; p <= 6; ++p) {
                    ap = ap * a;
                    bp = bp * b;
                    tp = tp * t1;
                    tr.add(kn + " A^p closed form", maxabs(ap - a_power_closed(kind, n, p)), tol);
                    tr.add(kn + " B^p closed form", maxabs(bp - b_power_closed(kind, n, phi, p)), tol);
                    tr.add(kn + " AB orthogonality Tr(A+B)^p", std::abs(tp.trace() - ap.trace() - bp.trace()), tol);
                }
                for (int alpha = 1; alpha <= 6; ++alpha) {
                    const auto tr0 = pair_traces(rho, alpha);
                    const cplx closed = alpha % 2 ? cplx(std::pow(n, alpha) + std::pow(1 - n, alpha))
                                                  : cplx(std::pow(std::pow(n, alpha / 2.0) + std::pow(1 - n, alpha / 2.0), 2));
                    if (alpha > 1) tr.add(kn + " Tr (rho^T1)^alpha closed form", std::abs(tr0.transposed - closed), tol);
                    tr.add(kn + " fermionic = standard moments", std::abs(tr0.fermionic - tr0.transposed), tol);
                    // phi only enters through a phase of the coherence
                    const auto ref = pair_traces(pair_state(kind, n, 0.0), alpha);
                    tr.add("phi independence", std::abs(tr0.transposed - ref.transposed), tol);
                    tr.add("phi independence", std::abs(tr0.fermionic - ref.fermionic), tol);
                    if (kind == StateKind::symmetric)
                        for (double lam : lambdas) {
                            const cplx brute = pair_traces(rho, alpha, lam).charged;
                            tr.add("charged factor (imbalance) closed form", std::abs(brute - qp::charged_pure_factor(alpha, lam, n)), tol);
                            tr.add("charged factor squared-bracket even-alpha form", std::abs(brute - qp::charged_pure_factor_squared(alpha, lam, n)), tol, false);
                        }
                }
                // the transposed symmetric pair commutes with the imbalance
                if (kind == StateKind::symmetric) {
                    const Matrix4 q = ops.n2 - ops.n1;
                    tr.add("symmetric T commutes with n2 - n1", maxabs(t1 * q - q * t1), tol);
                }
            }
        }
    }
    // Two-mode dense oracle against the pair implementation. The pair basis differs
    // from the dense one by the sign of |11>.
    Matrix4 w = Matrix4::Identity();
    w(3, 3) = -1.0;
    const Eigen::MatrixXcd d0 = dense_annihilator(0, 2), d1 = dense_annihilator(1, 2);
    tr.add("pair/dense basis map", std::max(maxabs(w * ops.c1 * w.adjoint() - d0), maxabs(w * ops.c2 * w.adjoint() - d1)), tol);
    for (StateKind kind : kinds)
        for (double n : {0.2, 0.5, 0.85}) {
            const auto rho = pair_state(kind, n, 0.9).m;
            const Eigen::MatrixXcd dense = dense_time_reversal(w * rho * w.adjoint(), 2, 1);
            tr.add("two-mode dense time reversal", maxabs(dense - w * time_reversal_mode1(rho) * w.adjoint()), 1e-13);
        }
    return tr.result();
}

std::vector<Check> dense_suite(int max_modes, int max_gap, const std::vector<double>& times)
{
    struct Item {
        int l1, l2, d;
        double t;
    };
    std::vector<Item> items;
    for (int l1 = 1; l1 < max_modes; ++l1)
        for (int l2 = 1; l1 + l2 <= max_modes; ++l2)
            for (int d = 1; d <= max_gap; ++d)
                for (double t : times) items.push_back({l1, l2, d, t});
    struct Dev {
        double remeasure = 0, composed[5] = {}, hformula[5] = {};
    };
    std::vector<Dev> devs(items.size());
    parallel_for(static_cast<int>(items.size()), [&](int i) {
        const auto& it = items[i];
        const TripartiteGeometry g(it.l1, it.l2, it.d);
        // offset 1 cuts the boundary dimers, so t = 0 is not a product over intervals
        const auto c = gauss::correlation_dimer(it.t, g.sites(1)).c;
        const auto st = oracle::dense_from_covariance(c);
        devs[i].remeasure = maxabs(oracle::measure_correlation(st.rho, st.modes) - c);
        const auto r = oracle::dense_time_reversal(st.rho, st.modes, it.l1);
        const auto gm = gauss::time_reversed_covariance(c, it.l1);
        const auto spec = gauss::negativity_spectrum(gm, 1e-12);
        for (int a = 1; a <= 4; ++a) {
            const double dense = oracle::dense_renyi_negativity(r, a);
            devs[i].composed[a] = std::abs(dense - gauss::renyi_negativity_composed(gm, a));
            devs[i].hformula[a] = std::abs(dense - gauss::renyi_negativity_exact(spec, a));
        }
    });
    Tracker tr;
    for (const auto& d : devs) {
        tr.add("dense re-measured covariance", d.remeasure, 1e-10);
        for (int a = 1; a <= 4; ++a)
            tr.add("dense vs covariance composition alpha=" + std::to_string(a), d.composed[a], 1e-8);
        for (int a = 1; a <= 4; ++a)
            tr.add("dense vs h-spectrum formula alpha=" + std::to_string(a), d.hformula[a], 1e-8, false);
    }
    return tr.result();
}

void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m, const std::string& comment)
{
    if (!comment.empty()) os << "# " << comment << '\n';
    os << m.rows() << ' ' << m.cols() << '\n';
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j)
            os << (j ? " " : "") << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
        os << '\n';
    }
}

Eigen::MatrixXcd read_matrix(std::istream& is)
{
    std::string line;
    while (std::getline(is, line) && (line.empty() || line[0] == '#')) {
    }
    std::istringstream hs(line);
    int r = 0, c = 0;
    if (!(hs >> r >> c)) throw UsageError("matrix dump: bad header");
    Eigen::MatrixXcd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
            std::string tok;
            is >> tok;
            const auto comma = tok.find(',');
            if (comma == std::string::npos) throw UsageError("matrix dump: bad entry");
            m(i, j) = cplx(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
        }
    return m;
}

Eigen::MatrixXcd dump_matrix(const ExperimentConfig& cfg, const std::string& which, double t)
{
    cfg.validate();
    check_ceiling(cfg);
    const auto g = cfg.geometry();
    const auto c = gauss::correlation_dimer(t, g.sites(cfg.offset)).c;
    if (which == "C") return c;
    if (which == "bdg") return gauss::fermionic_partial_transpose(c, g.l1);
    const auto gm = gauss::time_reversed_covariance(c, g.l1);
    if (which == "G") return gm;
    const auto k = gauss::entanglement_hamiltonian(c, cfg.cutoff, cfg.mode()).m;
    if (which == "K") return k;
    const auto n = gauss::negativity_hamiltonian(gm, cfg.cutoff, cfg.mode()).n;
    if (which == "N") return n.m;
    const auto dec = gauss::decompose(n, gauss::embed_reduced_frame(k, g.l1));
    if (which == "N_real") return dec.real.m;
    if (which == "N_imag") return dec.imag.m;
    if (which == "N_diag") return dec.diag.m;
    if (which == "N_offdiag") return dec.offdiag.m;
    throw UsageError("unknown matrix '" + which + "' (C, bdg, G, K, N, N_real, N_imag, N_diag, N_offdiag)");
}

ExactProfile nearest_neighbour_profile(const ExperimentConfig& cfg, double t)
{
    cfg.validate();
    check_ceiling(cfg);
    const auto g = cfg.geometry();
    const auto setup = cfg.qp_setup();
    const auto c = gauss::correlation_dimer(t, g.sites(cfg.offset)).c;
    const auto k = gauss::entanglement_hamiltonian(c, cfg.cutoff, cfg.mode()).m;
    const auto nh = gauss::negativity_hamiltonian(gauss::time_reversed_covariance(c, g.l1), cfg.cutoff, cfg.mode());
    ExactProfile out;
    out.diag = nh.diag;
    out.k_embedded = gauss::embed_reduced_frame(k, g.l1);
    out.k_norm = k.norm();
    out.dec = gauss::decompose(nh.n, out.k_embedded);
    const auto& dm = out.dec.diag.m;
    for (int i = 0; i + 1 < g.l1; ++i)
        out.points.push_back({i, 1, dm(i, i + 1), qp::kernel_minus(i, 1, t, setup)});
    for (int i = 0; i + 1 < g.l2; ++i) {
        const int r = g.l1 + i;
        out.points.push_back({g.a2_begin() + i, 2, dm(r, r + 1), qp::kernel_plus(g.a2_begin() + i, 1, t, setup)});
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.dec.imag.m, Eigen::EigenvaluesOnly);
    out.imag_eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    out.offdiag = gauss::extract_offdiag_profile(out.dec.offdiag.m, g);
    out.commutator = gauss::commutator_ratio(out.dec.real.m, out.dec.imag.m);
    return out;
}

}  // namespace negham::harness
