#include "negham/gaussian.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace negham::gauss {

namespace {

const cplx I(0.0, 1.0);

int floor_div2(int x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

// log|1 + e^w| without overflow.
double log_abs_1p_exp(cplx w)
{
    if (w.real() > 0.0) return w.real() + std::log(std::abs(1.0 + std::exp(-w)));
    return std::log(std::abs(1.0 + std::exp(w)));
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double frob(const Matrix& m) { return m.norm(); }

}  // namespace

std::vector<double> bessel_j_table(int nmax, double x)
{
    if (nmax < 0) throw DomainError("bessel: negative order");
    if (x < 0.0) throw DomainError("bessel: negative argument");
    std::vector<double> j(nmax + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }
    const int top = std::max(nmax, static_cast<int>(x));
    int start = top + 20 + static_cast<int>(std::sqrt(40.0 * top));
    start += start % 2;
    double next = 0.0, cur = 1e-300, norm = 0.0;
    for (int k = start; k > 0; --k) {
        const double prev = 2.0 * k / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if (k - 1 <= nmax) j[k - 1] = cur;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for (int m = k - 1; m <= nmax; ++m) j[m] *= 1e-250;
        }
    }
    norm += cur;
    for (double& v : j) v /= norm;
    return j;
}

double bessel_j(int n, double x)
{
    const int a = std::abs(n);
    const double v = bessel_j_table(a, x)[a];
    return (n < 0 && (a % 2)) ? -v : v;
}

CorrelationMatrix correlation_dimer(double t, const std::vector<int>& sites)
{
    if (!(t >= 0.0)) throw DomainError("correlation_dimer: t must be >= 0");
    const int n = static_cast<int>(sites.size());
    CorrelationMatrix out{Matrix::Zero(n, n), sites};
    if (n == 0) return out;
    if (t == 0.0) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (floor_div2(sites[a]) == floor_div2(sites[b])) out.c(a, b) = 0.5;
        return out;
    }
    const auto [lo, hi] = std::minmax_element(sites.begin(), sites.end());
    const auto bess = bessel_j_table(*hi - *lo, 2.0 * t);
    static const cplx phase[4] = {1.0, -I, -1.0, I};  // e^{-i pi m / 2}
#pragma omp parallel for schedule(static)
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int x = sites[a], y = sites[b], dx = x - y;
            cplx v = 0.0;
            if (dx == 0) v = 0.5;
            else if (dx == 1 || dx == -1) v = 0.25;
            if (dx != 0) {
                const int m = std::abs(dx);
                const double jn = (dx < 0 && (m % 2)) ? -bess[m] : bess[m];
                v += I * (dx / (4.0 * t)) * phase[((x + y) % 4 + 4) % 4] * jn;
            }
            out.c(a, b) = v;
        }
    }
    return out;
}

CorrelationMatrix restrict(const CorrelationMatrix& c, const TripartiteGeometry& g, int offset)
{
    const auto want = g.sites(offset);
    std::vector<int> idx;
    idx.reserve(want.size());
    for (int s : want) {
        auto it = std::find(c.sites.begin(), c.sites.end(), s);
        if (it == c.sites.end()) throw DomainError("restrict: site " + std::to_string(s) + " not in matrix");
        idx.push_back(static_cast<int>(it - c.sites.begin()));
    }
    const int n = static_cast<int>(idx.size());
    CorrelationMatrix out{Matrix(n, n), want};
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out.c(a, b) = c.c(idx[a], idx[b]);
    return out;
}

OperatorMatrix entanglement_hamiltonian(const Matrix& c, double cutoff, CutoffMode mode)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    if (es.info() != Eigen::Success) throw NumericalError("entanglement_hamiltonian: eigensolver failed");
    const Matrix& v = es.eigenvectors();
    const double res = (c * v - v * es.eigenvalues().asDiagonal()).colwise().norm().maxCoeff();
    if (res > 1e-8) throw NumericalError("entanglement_hamiltonian: residual " + std::to_string(res));
    Eigen::VectorXd h(c.rows());
    for (int i = 0; i < c.rows(); ++i) {
        const double nu = es.eigenvalues()(i);
        const bool edge = nu < cutoff || nu > 1.0 - cutoff;
        if (edge && mode == CutoffMode::truncate) {
            h(i) = 0.0;
            continue;
        }
        const double x = std::clamp(nu, cutoff, 1.0 - cutoff);
        h(i) = std::log((1.0 - x) / x);
    }
    return {v * h.asDiagonal() * v.adjoint(), OperatorLabel::K};
}

Matrix time_reversed_covariance(const Matrix& c, int l1)
{
    const int n = static_cast<int>(c.rows());
    if (l1 < 0 || l1 > n) throw DomainError("time_reversed_covariance: bad l1");
    const int l2 = n - l1;
    Matrix g = c;
    g.topLeftCorner(l1, l1) = Matrix::Identity(l1, l1) - c.topLeftCorner(l1, l1);
    g.topRightCorner(l1, l2) *= I;
    g.bottomLeftCorner(l2, l1) *= I;
    return g;
}

Matrix bdg_embed(const Matrix& c)
{
    const int n = static_cast<int>(c.rows());
    Matrix b = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            b(2 * i, 2 * j) = c(i, j);
            b(2 * i + 1, 2 * j + 1) = (i == j ? 1.0 : 0.0) - c(j, i);
        }
    return b;
}

Matrix apply_cross_map(const Matrix& bdg, int l1)
{
    const int n = static_cast<int>(bdg.rows() / 2);
    Eigen::Matrix2cd isx;
    isx << 0.0, I, I, 0.0;
    Matrix out = bdg;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const bool a1i = i < l1, a1j = j < l1;
            if (!a1i && !a1j) continue;
            if (a1i && a1j) {
                // transposition acts on the A1 site indices
                out.block<2, 2>(2 * i, 2 * j) = bdg.block<2, 2>(2 * j, 2 * i);
                continue;
            }
            const Eigen::Matrix2cd blk = bdg.block<2, 2>(2 * i, 2 * j);
            out.block<2, 2>(2 * i, 2 * j) = a1i ? Eigen::Matrix2cd(isx * blk) : Eigen::Matrix2cd(blk * isx);
        }
    return out;
}

Matrix fermionic_partial_transpose(const Matrix& c, int l1)
{
    if (l1 < 0 || l1 > c.rows()) throw DomainError("fermionic_partial_transpose: bad l1");
    return apply_cross_map(bdg_embed(c), l1);
}

namespace {

struct Eig {
    Eigen::VectorXcd nu;
    Matrix v;
    EigenDiagnostics diag;
};

Eig general_eigen(const Matrix& gamma)
{
    const int n = static_cast<int>(gamma.rows());
    Eig e{Eigen::VectorXcd(n), Matrix(n, n), {}};
    Matrix a = gamma;
    const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, reinterpret_cast<lapack_complex_double*>(a.data()), n,
                                   reinterpret_cast<lapack_complex_double*>(e.nu.data()), nullptr, 1,
                                   reinterpret_cast<lapack_complex_double*>(e.v.data()), n);
    if (info != 0) throw NumericalError("negativity_hamiltonian: zgeev failed, info " + std::to_string(info));
    // residuals relative to ||Gamma||_F
    const Eigen::VectorXd res = (gamma * e.v - e.v * e.nu.asDiagonal()).colwise().norm().transpose();
    const Eigen::VectorXd len = e.v.colwise().norm().transpose();
    e.diag.max_residual = (res.array() / len.array()).maxCoeff() / std::max(1.0, gamma.norm());
    if (e.diag.max_residual > 1e-8) {
        std::ostringstream os;
        os << "negativity_hamiltonian: eigenpair residual " << e.diag.max_residual;
        throw NumericalError(os.str());
    }
    return e;
}

// h for one eigenvalue; returns false for a truncated mode.
bool map_eigenvalue(cplx nu, double cutoff, cplx& h, EigenDiagnostics& d, bool snap)
{
    const bool near0 = std::abs(nu) < cutoff, near1 = std::abs(1.0 - nu) < cutoff;
    if (near0 || near1) {
        ++d.clipped;
        if (!snap) return false;
        // Snap to the real axis: the phase of a numerically pure eigenvalue is noise.
        nu = near0 ? cplx(cutoff) : cplx(1.0 - cutoff);
    } else if (std::abs(nu.imag()) < cutoff && (nu.real() < 0.0 || nu.real() > 1.0)) {
        ++d.branch_cut;
    }
    h = std::log((1.0 - nu) / nu);
    return true;
}

}  // namespace

NegativityHamiltonian negativity_hamiltonian(const Matrix& gamma, double cutoff, CutoffMode mode,
                                             bool build_operator)
{
    Eig e = general_eigen(gamma);
    const int n = static_cast<int>(gamma.rows());
    NegativityHamiltonian out;
    out.spectrum.h.resize(n);
    Eigen::VectorXcd hv(n);
    for (int i = 0; i < n; ++i) {
        cplx h;
        if (!map_eigenvalue(e.nu(i), cutoff, h, e.diag, mode == CutoffMode::clip)) h = 0.0;
        hv(i) = h;
        out.spectrum.h[i] = h;
    }
    if (build_operator) {
        Eigen::PartialPivLU<Matrix> lu(e.v);
        const double rc = lu.rcond();
        e.diag.condition = rc > 0.0 ? 1.0 / rc : INFINITY;
        if (!(e.diag.condition <= 1e12)) {
            std::ostringstream os;
            os << "negativity_hamiltonian: eigenvector condition " << e.diag.condition;
            throw NumericalError(os.str());
        }
        out.n = {e.v * hv.asDiagonal() * lu.inverse(), OperatorLabel::N_full};
    }
    out.diag = e.diag;
    return out;
}

ModeSpectrum negativity_spectrum(const Matrix& gamma, double cutoff)
{
    return negativity_hamiltonian(gamma, cutoff, CutoffMode::clip, false).spectrum;
}

Matrix embed_reduced_frame(const Matrix& k, int l1)
{
    const int n = static_cast<int>(k.rows());
    const int l2 = n - l1;
    Matrix out = Matrix::Zero(n, n);
    out.topLeftCorner(l1, l1) = -k.topLeftCorner(l1, l1);
    out.bottomRightCorner(l2, l2) = k.bottomRightCorner(l2, l2);
    return out;
}

Matrix embed_bdg(const Matrix& k)
{
    const int n = static_cast<int>(k.rows());
    Matrix b = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            b(2 * i, 2 * j) = k(i, j);
            b(2 * i + 1, 2 * j + 1) = -k(j, i);
        }
    return b;
}

Decomposition decompose(const OperatorMatrix& n, const Matrix& k_embedded)
{
    if (n.m.rows() != k_embedded.rows() || n.m.cols() != k_embedded.cols())
        throw DomainError("decompose: shape mismatch");
    Decomposition d;
    d.real = {(n.m + n.m.adjoint()) / 2.0, OperatorLabel::N_real};
    d.imag = {(n.m - n.m.adjoint()) / (2.0 * I), OperatorLabel::N_imag};
    d.diag = {d.real.m - k_embedded, OperatorLabel::N_diag};
    d.offdiag = {I * d.imag.m, OperatorLabel::N_offdiag};
    return d;
}

ModeSpectrum particle_hole_reduce(const ModeSpectrum& full, double tol)
{
    ModeSpectrum out;
    out.reduced = true;
    // On the imaginary axis the doubled spectrum holds every value twice ({ib, -ib} from h and
    // again from -h); sorting and taking every second entry keeps one conjugate pair.
    std::vector<cplx> axis;
    for (cplx h : full.h) {
        if (h.real() > tol) out.h.push_back(h);
        else if (std::abs(h.real()) <= tol) axis.push_back(h);
    }
    std::sort(axis.begin(), axis.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
    for (size_t i = 0; i < axis.size(); i += 2) out.h.push_back(axis[i]);
    return out;
}

double renyi_negativity_exact(const ModeSpectrum& s, int alpha)
{
    if (alpha < 1) throw DomainError("alpha must be >= 1");
    double total = 0.0;
    if (alpha % 2 == 0 || alpha == 1) {
        for (cplx h : s.h) total += softplus(-alpha * h.real()) - alpha * log_abs_1p_exp(-h);
        return total;
    }
    cplx im_check = 0.0;
    // An eigenvalue error e moves h by e / min(nu, 1 - nu), so nearly pure modes
    // cannot pair better than that; their share is added to the 1e-8 budget.
    double budget = 1e-8;
    for (cplx h : s.h) {
        const cplx w(-alpha * h.real(), -h.imag());
        total += log_abs_1p_exp(w) - alpha * log_abs_1p_exp(-h);
        if (std::abs(h.real()) < 30.0) im_check += std::log(1.0 + std::exp(w)) - double(alpha) * std::log(1.0 + std::exp(-h));
        if (h.imag() != 0.0) budget += 16.0 * std::numeric_limits<double>::epsilon() * (alpha + 1) * (1.0 + std::exp(std::min(std::abs(h.real()), 30.0)));
    }
    // Principal logs; imaginary parts cancel between conjugate partners up to 2 pi.
    const double r = std::remainder(im_check.imag(), 2.0 * pi);
    if (std::abs(r) > budget) {
        std::ostringstream os;
        os << "renyi_negativity_exact: imaginary residual " << r << " exceeds " << budget
           << " (conjugate pairing violated)";
        throw NumericalError(os.str());
    }
    return total;
}

namespace {

double logdet_hpd(const Matrix& x)
{
    Eigen::LLT<Matrix> llt(x);
    if (llt.info() != Eigen::Success) throw NumericalError("composition: X not positive definite");
    double s = 0.0;
    for (int i = 0; i < x.rows(); ++i) s += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
    return s;
}

double logabsdet(const Matrix& y)
{
    Eigen::PartialPivLU<Matrix> lu(y);
    double s = 0.0;
    for (int i = 0; i < y.rows(); ++i) s += std::log(std::abs(lu.matrixLU()(i, i)));
    return s;
}

}  // namespace

// rho rho^dag is Gaussian with 1 - G_{rho rho^dag} = (1 - G) X^{-1} (1 - G^dag),
// X = (1 - G^dag)(1 - G) + G^dag G, Tr rho rho^dag = det X.
double renyi_negativity_composed(const Matrix& g, int alpha)
{
    if (alpha < 1) throw DomainError("alpha must be >= 1");
    const int n = static_cast<int>(g.rows());
    const Matrix id = Matrix::Identity(n, n);
    const Matrix gd = g.adjoint();
    const Matrix x = (id - gd) * (id - g) + gd * g;
    const double ldx = logdet_hpd(x);
    Matrix q = (id - g) * x.llt().solve(id - gd);
    q = (q + q.adjoint()).eval() / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(id - q);
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    if (alpha == 1) {
        // sqrt(w) and sqrt(1-w) straight from the CS decomposition of the stacked QR factor,
        // so nearly pure modes do not pick up sqrt(roundoff).
        Matrix stacked(2 * n, n);
        stacked << id - g, g;
        Eigen::HouseholderQR<Matrix> qr(stacked);
        const Matrix thin = qr.householderQ() * Matrix::Identity(2 * n, n);
        // Sines and cosines pair up as descending against ascending.
        const Eigen::VectorXd sn = Eigen::BDCSVD<Matrix>(thin.bottomRows(n)).singularValues();
        const Eigen::VectorXd cs = Eigen::BDCSVD<Matrix>(thin.topRows(n)).singularValues();
        double s = 0.5 * ldx;
        for (int i = 0; i < n; ++i) s += std::log(sn(i) + cs(n - 1 - i));
        return s;
    }
    const int m = alpha / 2;
    double base = m * ldx;
    for (double v : w) base += std::log(std::pow(v, m) + std::pow(1.0 - v, m));
    if (alpha % 2 == 0) return base;
    Eigen::VectorXd gm(n);
    for (int i = 0; i < n; ++i) {
        const double a = std::pow(w(i), m), b = std::pow(1.0 - w(i), m);
        gm(i) = a / (a + b);
    }
    const Matrix& v = es.eigenvectors();
    const Matrix gs = v * gm.asDiagonal() * v.adjoint();
    return base + logabsdet((id - gs) * (id - g) + gs * g);
}

double renyi_entropy_exact(const Matrix& c, int alpha)
{
    if (alpha < 1) throw DomainError("alpha must be >= 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(c, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (double nu : es.eigenvalues()) {
        nu = std::clamp(nu, 0.0, 1.0);
        if (alpha == 1) {
            if (nu > 0.0) s -= nu * std::log(nu);
            if (nu < 1.0) s -= (1.0 - nu) * std::log(1.0 - nu);
        } else {
            s += std::log(std::pow(nu, alpha) + std::pow(1.0 - nu, alpha));
        }
    }
    return alpha == 1 ? s : s / (1.0 - alpha);
}

std::vector<OffdiagSample> extract_offdiag_profile(const Matrix& n_offdiag, const TripartiteGeometry& g)
{
    if (n_offdiag.rows() != g.size()) throw DomainError("extract_offdiag_profile: shape mismatch");
    std::vector<OffdiagSample> out;
    out.reserve(size_t(g.l1) * g.l2);
    for (int i = 0; i < g.l2; ++i)
        for (int j = 0; j < g.l1; ++j) {
            OffdiagSample s;
            s.x = g.a2_begin() + i;
            s.y = j;
            s.z = s.x - s.y;
            s.value = n_offdiag(g.l1 + i, j);
            s.deoscillated = (s.x % 2 ? -1.0 : 1.0) * s.value;
            out.push_back(s);
        }
    return out;
}

double commutator_ratio(const Matrix& a, const Matrix& b)
{
    const double na = frob(a);
    if (na == 0.0) return 0.0;
    return frob(a * b - b * a) / na;
}

namespace {

SweepPoint make_point(double t, int alpha, double s, double e, double ec)
{
    SweepPoint p;
    p.t = t;
    p.alpha = alpha;
    p.entropy = s;
    p.negativity = e;
    p.composed = ec;
    p.log_ratio = e + (alpha - 1) * s;
    p.log_ratio_composed = ec + (alpha - 1) * s;
    return p;
}

}  // namespace

std::vector<SweepPoint> sweep_parallel(const TripartiteGeometry& g, const std::vector<double>& times,
                                       const SweepOptions& opt)
{
    const int nt = static_cast<int>(times.size());
    const int na = static_cast<int>(opt.alphas.size());
    std::vector<SweepPoint> out(size_t(nt) * na);
    const auto sites = g.sites(opt.offset);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < nt; ++i) {
        try {
            const Matrix c = correlation_dimer(times[i], sites).c;
            const Matrix gm = time_reversed_covariance(c, g.l1);
            const ModeSpectrum spec = negativity_spectrum(gm, opt.cutoff);
            for (int a = 0; a < na; ++a) {
                const int alpha = opt.alphas[a];
                out[size_t(i) * na + a] = make_point(times[i], alpha, renyi_entropy_exact(c, alpha),
                                                     renyi_negativity_exact(spec, alpha),
                                                     renyi_negativity_composed(gm, alpha));
            }
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

std::vector<SweepPoint> sweep_serial(const TripartiteGeometry& g, const std::vector<double>& times,
                                     const SweepOptions& opt)
{
    std::vector<SweepPoint> out;
    const auto sites = g.sites(opt.offset);
    for (double t : times) {
        const Matrix c = correlation_dimer(t, sites).c;
        const Matrix gamma = fermionic_partial_transpose(c, g.l1);
        const ModeSpectrum spec = particle_hole_reduce(negativity_spectrum(gamma, opt.cutoff));
        for (int alpha : opt.alphas) {
            // Nambu doubling squares every trace; halve the composed value.
            out.push_back(make_point(t, alpha, renyi_entropy_exact(c, alpha), renyi_negativity_exact(spec, alpha),
                                     0.5 * renyi_negativity_composed(gamma, alpha)));
        }
    }
    return out;
}

}  // namespace negham::gauss
