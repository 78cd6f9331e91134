#include "perifide/cyclic.hpp"

#include "perifide/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace perifide {

Vec stack(const Tuple& u)
{
    Eigen::Index n = 0;
    for (const auto& x : u) n += x.size();
    Vec v(n);
    Eigen::Index k = 0;
    for (const auto& x : u) {
        v.segment(k, x.size()) = x;
        k += x.size();
    }
    return v;
}

Tuple unstack(const Vec& v, int theta)
{
    if (theta < 1 || v.size() % theta != 0)
        throw std::invalid_argument("unstack: length is not a multiple of theta");
    const Eigen::Index N = v.size() / theta;
    Tuple u(static_cast<std::size_t>(theta));
    for (int t = 0; t < theta; ++t) u[t] = v.segment(t * N, N);
    return u;
}

Tuple zeros(int theta, int N) { return Tuple(static_cast<std::size_t>(theta), Vec::Zero(N)); }

Tuple repeat(const Vec& v, int theta) { return Tuple(static_cast<std::size_t>(theta), v); }

double pairing_theta(const QuadratureRule& r, const Tuple& a, const Tuple& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("pairing_theta: period mismatch");
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) s += pairing(r, a[t], b[t]);
    return s;
}

Tuple cyclic_residual(const Rhs& f, const Tuple& u, double a)
{
    const int theta = static_cast<int>(u.size());
    Tuple r(u.size());
    for (int t = 0; t < theta; ++t) {
        const int c = (t + 1) % theta;
        r[c] = f.eval(t, u[t], a) - u[c];
    }
    return r;
}

Vec cyclic_residual_stacked(const Rhs& f, const Tuple& u, double a)
{
    return stack(cyclic_residual(f, u, a));
}

namespace {

Mat assemble(const Rhs& f, const Tuple& u, double a, bool parallel)
{
    const int theta = static_cast<int>(u.size());
    const int N = f.size();
    Mat J = Mat::Zero(theta * N, theta * N);
    std::vector<Mat> blocks(static_cast<std::size_t>(theta));
    if (parallel) {
#pragma omp parallel for schedule(dynamic) if (theta > 1)
        for (int t = 0; t < theta; ++t) blocks[t] = f.d1_matrix(t, u[t], a);
    } else {
        for (int t = 0; t < theta; ++t) blocks[t] = f.d1_matrix(t, u[t], a);
    }
    for (int t = 0; t < theta; ++t) {
        const int c = (t + 1) % theta;
        J.block(c * N, t * N, N, N) += blocks[t];
        J.block(c * N, c * N, N, N) -= Mat::Identity(N, N);
    }
    return J;
}

} // namespace

Mat assemble_jacobian(const Rhs& f, const Tuple& u, double a) { return assemble(f, u, a, true); }

Mat assemble_jacobian_serial(const Rhs& f, const Tuple& u, double a)
{
    return assemble(f, u, a, false);
}

Vec d2_stacked(const Rhs& f, const Tuple& u, double a)
{
    const int theta = static_cast<int>(u.size());
    Tuple r(u.size());
    for (int t = 0; t < theta; ++t) r[(t + 1) % theta] = f.d2(t, u[t], a);
    return stack(r);
}

Vec block_weights(const QuadratureRule& r, int theta)
{
    return r.weights.replicate(theta, 1);
}

Mat dual_matrix(const QuadratureRule& r, const Mat& J)
{
    const Vec w = block_weights(r, static_cast<int>(J.rows() / r.size()));
    return w.cwiseInverse().asDiagonal() * J.transpose() * w.asDiagonal();
}

PeriodicOrbit solve_periodic(const Rhs& f, const Tuple& initial, double a,
                             const NewtonOptions& opt)
{
    const int theta = static_cast<int>(initial.size());
    Tuple u = initial;
    Vec r = cyclic_residual_stacked(f, u, a);
    double nrm = r.lpNorm<Eigen::Infinity>();
    std::ostringstream trace;
    trace << "residuals:";
    int k = 0;
    while (nrm >= opt.tol) {
        if (k >= opt.max_iter)
            throw Error("no-convergence", "Newton did not converge; " + trace.str());
        trace << ' ' << nrm;
        const Mat J = assemble_jacobian(f, u, a);
        Eigen::PartialPivLU<Mat> lu(J);
        const double rc = lu.rcond();
        if (!(rc > 1e-15)) throw Error("singular-jacobian", "cyclic Jacobian is singular");
        const Vec d = -lu.solve(r);
        double s = 1.0;
        bool accepted = false;
        Tuple best;
        Vec best_r;
        double best_n = 0.0;
        for (int h = 0; h <= opt.max_halvings; ++h, s *= 0.5) {
            Tuple trial = unstack(stack(u) + s * d, theta);
            try {
                Vec rt = cyclic_residual_stacked(f, trial, a);
                const double nt = rt.lpNorm<Eigen::Infinity>();
                if (!std::isfinite(nt)) continue;
                best = std::move(trial);
                best_r = std::move(rt);
                best_n = nt;
                accepted = true;
                if (nt < nrm) break;
            } catch (const DomainError&) {
            }
        }
        if (!accepted) throw Error("no-convergence", "Newton left the domain; " + trace.str());
        u = std::move(best);
        r = std::move(best_r);
        nrm = best_n;
        ++k;
    }
    return PeriodicOrbit{theta, u, a, nrm, k};
}

std::vector<cplx> group_multipliers(const std::vector<cplx>& raw, int theta, bool* ambiguous)
{
    const std::size_t n = raw.size();
    std::vector<cplx> nu(n);
    for (std::size_t i = 0; i < n; ++i) nu[i] = std::pow(raw[i] + 1.0, theta);
    if (ambiguous) *ambiguous = false;
    if (theta == 1) {
        std::sort(nu.begin(), nu.end(), [](cplx x, cplx y) {
            return std::abs(x) != std::abs(y) ? std::abs(x) > std::abs(y) : x.imag() > y.imag();
        });
        return nu;
    }
    // union-find over pairs within the relative grouping tolerance
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double scale = std::max(std::abs(nu[i]), std::abs(nu[j]));
            if (std::abs(nu[i] - nu[j]) <= 1e-6 * scale + 1e-12) parent[find(i)] = find(j);
        }
    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<cplx> out;
    for (const auto& g : groups) {
        if (g.empty()) continue;
        cplx mean = 0.0;
        for (auto i : g) mean += nu[i];
        mean /= static_cast<double>(g.size());
        if (g.size() % static_cast<std::size_t>(theta) != 0 && std::abs(mean) > 1e-9 && ambiguous)
            *ambiguous = true;
        const std::size_t m =
            std::max<std::size_t>(1, (g.size() + theta / 2) / static_cast<std::size_t>(theta));
        if (m == 1 || g.size() < static_cast<std::size_t>(theta)) {
            for (std::size_t k = 0; k < m; ++k) out.push_back(mean);
            continue;
        }
        // a cluster holding several multipliers: split by sorted values
        std::vector<cplx> vals;
        for (auto i : g) vals.push_back(nu[i]);
        std::sort(vals.begin(), vals.end(), [](cplx x, cplx y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        });
        for (std::size_t k = 0; k < m; ++k) {
            cplx s = 0.0;
            std::size_t cnt = 0;
            for (std::size_t q = k * theta; q < std::min(vals.size(), (k + 1) * theta); ++q, ++cnt)
                s += vals[q];
            out.push_back(cnt ? s / static_cast<double>(cnt) : mean);
        }
    }
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
        return std::abs(x) != std::abs(y) ? std::abs(x) > std::abs(y) : x.imag() > y.imag();
    });
    return out;
}

FloquetData floquet_from_jacobian(const Mat& J, int theta)
{
    Eigen::EigenSolver<Mat> es(J, false);
    if (es.info() != Eigen::Success) throw Error("eigensolver-failure", "dense eigensolve failed");
    FloquetData fd;
    const auto ev = es.eigenvalues();
    fd.raw_eigs.assign(ev.data(), ev.data() + ev.size());
    fd.multipliers = group_multipliers(fd.raw_eigs, theta, &fd.ambiguous);
    fd.morse_index = 0;
    double best = 1e300;
    for (const auto& m : fd.multipliers) {
        if (std::abs(m) > 1.0) ++fd.morse_index;
        const double d = std::abs(std::abs(m) - 1.0);
        if (d < best) {
            best = d;
            fd.critical = m;
        }
    }
    return fd;
}

FloquetData floquet(const Rhs& f, const PeriodicOrbit& orbit)
{
    return floquet_from_jacobian(assemble_jacobian(f, orbit.states, orbit.alpha), orbit.theta);
}

Mat period_matrix(const Rhs& f, const PeriodicOrbit& orbit)
{
    const int N = f.size();
    Mat X = Mat::Identity(N, N);
    for (int t = 0; t < orbit.theta; ++t) X = f.d1_matrix(t, orbit.states[t], orbit.alpha) * X;
    return X;
}

PeriodicOrbit double_period(const PeriodicOrbit& orbit)
{
    PeriodicOrbit o = orbit;
    o.theta = 2 * orbit.theta;
    o.states.insert(o.states.end(), orbit.states.begin(), orbit.states.end());
    return o;
}

void normalize(const QuadratureRule& r, EigSequences& e)
{
    const double n = std::sqrt(pairing_theta(r, e.xi, e.xi));
    const Vec& x0 = e.xi[0];
    const double mx = x0.cwiseAbs().maxCoeff();
    int j = 0;
    while (j < x0.size() && std::abs(x0[j]) < mx * (1 - 1e-9)) ++j;
    const double s = (x0[j] < 0 ? -1.0 : 1.0) / n;
    for (auto& x : e.xi) x *= s;
    const double p = pairing_theta(r, e.eta, e.xi);
    if (!(std::abs(p) > 1e-300))
        throw Error("non-simple-eigenvalue", "dual eigenvector orthogonal to primal");
    for (auto& x : e.eta) x /= p;
}

EigSequences eig_sequences(const Rhs& f, const PeriodicOrbit& orbit, int target)
{
    if (target == -1) return eig_sequences(f, double_period(orbit), 1);
    if (target != 1) throw std::invalid_argument("eig_sequences: target must be +1 or -1");
    const QuadratureRule& r = f.rule();
    const Mat J = assemble_jacobian(f, orbit.states, orbit.alpha);
    const FloquetData fd = floquet_from_jacobian(J, orbit.theta);
    int near = 0;
    for (const auto& m : fd.multipliers)
        if (std::abs(m - 1.0) < 1e-6) ++near;
    if (near == 0) throw std::invalid_argument("eig_sequences: 1 is not a Floquet multiplier");
    if (near > 1) throw Error("non-simple-eigenvalue", "multiplier 1 is not simple");

    Eigen::BDCSVD<Mat> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Index n = J.cols();
    const Vec wb = block_weights(r, orbit.theta);
    EigSequences e;
    e.xi = unstack(svd.matrixV().col(n - 1), orbit.theta);
    e.eta = unstack(svd.matrixU().col(n - 1).cwiseQuotient(wb), orbit.theta);
    e.multiplier = 1.0;
    normalize(r, e);
    e.xi_residual = (J * stack(e.xi)).lpNorm<Eigen::Infinity>();
    e.eta_residual = (dual_matrix(r, J) * stack(e.eta)).lpNorm<Eigen::Infinity>();
    return e;
}

Vec bordered_solve(const Mat& J, const Vec& b, const Vec& c, const Vec& rhs, double* mu)
{
    const Eigen::Index n = J.rows();
    Mat B(n + 1, n + 1);
    B.topLeftCorner(n, n) = J;
    B.topRightCorner(n, 1) = b;
    B.bottomLeftCorner(1, n) = c.transpose();
    B(n, n) = 0.0;
    Vec R(n + 1);
    R.head(n) = rhs;
    R[n] = 0.0;
    Eigen::PartialPivLU<Mat> lu(B);
    if (!(lu.rcond() > 1e-15)) throw Error("singular-jacobian", "bordered system is singular");
    const Vec x = lu.solve(R);
    if (mu) *mu = x[n];
    return x.head(n);
}

Tuple solve_tangent(const Rhs& f, const PeriodicOrbit& orbit)
{
    const Mat J = assemble_jacobian(f, orbit.states, orbit.alpha);
    Eigen::PartialPivLU<Mat> lu(J);
    if (!(lu.rcond() > 1e-13))
        throw Error("hyperbolicity-violated", "1 is a Floquet multiplier; D1G is singular");
    return unstack(-lu.solve(d2_stacked(f, orbit.states, orbit.alpha)), orbit.theta);
}

Tuple solve_tangent_bordered(const Rhs& f, const PeriodicOrbit& orbit, const EigSequences& e)
{
    const Mat J = assemble_jacobian(f, orbit.states, orbit.alpha);
    const Vec lw = block_weights(f.rule(), orbit.theta).cwiseProduct(stack(e.eta));
    double mu = 0.0;
    const Vec x = bordered_solve(J, stack(e.xi), lw, -d2_stacked(f, orbit.states, orbit.alpha), &mu);
    return unstack(x, orbit.theta);
}

double total_population(const QuadratureRule& r, const PeriodicOrbit& orbit)
{
    double s = 0.0;
    for (const auto& x : orbit.states) s += integrate(r, x);
    return s / orbit.theta;
}

nlohmann::json to_json(const PeriodicOrbit& o)
{
    nlohmann::json states = nlohmann::json::array();
    for (const auto& x : o.states) states.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    return {{"theta", o.theta},
            {"alpha", o.alpha},
            {"residual_norm", o.residual_norm},
            {"states", states}};
}

} // namespace perifide
