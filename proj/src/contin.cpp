#include "perifide/contin.hpp"

#include "perifide/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace perifide {

namespace {

Vec stack_tangent(const Tangent& t)
{
    const Vec z = stack(t.z);
    Vec v(z.size() + 1);
    v.head(z.size()) = z;
    v[z.size()] = t.delta;
    return v;
}

Mat extended_jacobian(const Rhs& f, const PeriodicOrbit& o)
{
    const Mat J = assemble_jacobian(f, o.states, o.alpha);
    const Eigen::Index n = J.rows();
    Mat M(n, n + 1);
    M.leftCols(n) = J;
    M.col(n) = d2_stacked(f, o.states, o.alpha);
    return M;
}

double weighted_norm(const Vec& bw, const Vec& z, double delta)
{
    return std::sqrt(bw.dot(z.cwiseAbs2()) + delta * delta);
}

// greedy nearest-neighbour pairing of two multiplier lists of equal length
std::vector<std::pair<std::size_t, std::size_t>> match(const std::vector<cplx>& a,
                                                       const std::vector<cplx>& b)
{
    struct Cand {
        double d;
        std::size_t i, j;
    };
    std::vector<Cand> c;
    c.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c.push_back({std::abs(a[i] - b[j]), i, j});
    std::sort(c.begin(), c.end(), [](const Cand& x, const Cand& y) {
        return x.d < y.d || (x.d == y.d && (x.i < y.i || (x.i == y.i && x.j < y.j)));
    });
    std::vector<char> ua(a.size(), 0), ub(b.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& x : c) {
        if (ua[x.i] || ub[x.j]) continue;
        ua[x.i] = ub[x.j] = 1;
        out.emplace_back(x.i, x.j);
    }
    return out;
}

int morse_of(const std::vector<cplx>& m)
{
    return static_cast<int>(std::count_if(m.begin(), m.end(), [](cplx x) { return std::abs(x) > 1.0; }));
}

cplx nearest(const std::vector<cplx>& m, cplx target)
{
    return *std::min_element(m.begin(), m.end(), [&](cplx x, cplx y) {
        return std::abs(x - target) < std::abs(y - target);
    });
}

BranchPoint make_point(const Rhs& f, const PeriodicOrbit& o, const Tangent& t, double s, int iters)
{
    BranchPoint p;
    p.orbit = o;
    p.tangent = t;
    p.multipliers = floquet(f, o).multipliers;
    p.morse_index = morse_of(p.multipliers);
    p.total_population = total_population(f.rule(), o);
    p.s = s;
    p.corrector_iterations = iters;
    return p;
}

} // namespace

std::vector<cplx> BranchPoint::leading(std::size_t k) const
{
    return {multipliers.begin(), multipliers.begin() + std::min(k, multipliers.size())};
}

std::string to_string(EventKind k)
{
    return k == EventKind::fold_detected ? "fold_detected" : "crossing_detected";
}

Tangent initial_tangent(const Rhs& f, const PeriodicOrbit& o)
{
    const Mat M = extended_jacobian(f, o);
    const Eigen::Index n = M.rows();
    const Vec bw = block_weights(f.rule(), o.theta);
    const Vec isw = bw.cwiseSqrt().cwiseInverse();
    Mat S = M;
    S.leftCols(n) = M.leftCols(n) * isw.asDiagonal();
    Eigen::BDCSVD<Mat> svd(S, Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();
    if (sv[n - 1] < 1e-10 * std::max(1.0, sv[0]))
        throw Error("start-at-singularity", "null space of [D1G | D2G] has dimension > 1");
    Vec v = svd.matrixV().col(n);
    Tangent t;
    t.z = unstack(v.head(n).cwiseProduct(isw), o.theta);
    t.delta = v[n];
    const double nr = weighted_norm(bw, stack(t.z), t.delta);
    for (auto& x : t.z) x /= nr;
    t.delta /= nr;
    if (t.delta < 0) {
        for (auto& x : t.z) x = -x;
        t.delta = -t.delta;
    }
    return t;
}

Tangent next_tangent(const Rhs& f, const PeriodicOrbit& o, const Tangent& prev)
{
    const Mat M = extended_jacobian(f, o);
    const Eigen::Index n = M.rows();
    const Vec bw = block_weights(f.rule(), o.theta);
    Mat A(n + 1, n + 1);
    A.topRows(n) = M;
    A.bottomLeftCorner(1, n) = bw.cwiseProduct(stack(prev.z)).transpose();
    A(n, n) = prev.delta;
    Vec rhs = Vec::Zero(n + 1);
    rhs[n] = 1.0;
    Eigen::PartialPivLU<Mat> lu(A);
    if (!(lu.rcond() > 1e-15)) throw Error("singular-jacobian", "tangent system is singular");
    const Vec v = lu.solve(rhs);
    const double nr = weighted_norm(bw, v.head(n), v[n]);
    Tangent t;
    t.z = unstack(v.head(n) / nr, o.theta);
    t.delta = v[n] / nr;
    return t;
}

double tangent_residual(const Rhs& f, const PeriodicOrbit& o, const Tangent& t)
{
    return (extended_jacobian(f, o) * stack_tangent(t)).lpNorm<Eigen::Infinity>();
}

CorrectorResult correct(const Rhs& f, const Tuple& phi_pred, double alpha_pred, const Tangent& t,
                        const NewtonOptions& opt)
{
    const int theta = static_cast<int>(phi_pred.size());
    const Vec bw = block_weights(f.rule(), theta);
    const Vec row = bw.cwiseProduct(stack(t.z));
    const Vec p0 = stack(phi_pred);
    const Eigen::Index n = p0.size();
    CorrectorResult r;
    Vec p = p0;
    double a = alpha_pred;
    try {
        Vec G = cyclic_residual_stacked(f, unstack(p, theta), a);
        double g0 = G.lpNorm<Eigen::Infinity>();
        for (int it = 0; it < opt.max_iter; ++it) {
            const double c = row.dot(p - p0) + t.delta * (a - alpha_pred);
            if (G.lpNorm<Eigen::Infinity>() < opt.tol && std::abs(c) < opt.tol) {
                r.converged = true;
                break;
            }
            const Tuple u = unstack(p, theta);
            Mat A(n + 1, n + 1);
            A.topLeftCorner(n, n) = assemble_jacobian(f, u, a);
            A.topRightCorner(n, 1) = d2_stacked(f, u, a);
            A.bottomLeftCorner(1, n) = row.transpose();
            A(n, n) = t.delta;
            Vec R(n + 1);
            R.head(n) = G;
            R[n] = c;
            Eigen::PartialPivLU<Mat> lu(A);
            if (!(lu.rcond() > 1e-15)) break;
            const Vec d = lu.solve(R);
            p -= d.head(n);
            a -= d[n];
            ++r.iterations;
            G = cyclic_residual_stacked(f, unstack(p, theta), a);
            const double gn = G.lpNorm<Eigen::Infinity>();
            if (!std::isfinite(gn) || gn > 1e6 * std::max(1.0, g0)) break;
        }
        if (!r.converged) {
            const double c = row.dot(p - p0) + t.delta * (a - alpha_pred);
            r.converged = G.lpNorm<Eigen::Infinity>() < opt.tol && std::abs(c) < opt.tol;
        }
        r.orbit = PeriodicOrbit{theta, unstack(p, theta), a, G.lpNorm<Eigen::Infinity>(), r.iterations};
    } catch (const DomainError&) {
        r.converged = false;
    }
    return r;
}

namespace {

// events between points k−1 and k
void detect(const Branch& b, std::size_t k, const ContinuationOptions& opt, std::vector<BranchEvent>& out)
{
    const BranchPoint& p = b.points[k - 1];
    const BranchPoint& q = b.points[k];
    const bool fold = p.tangent.delta * q.tangent.delta < 0;
    if (fold) {
        BranchEvent e;
        e.kind = EventKind::fold_detected;
        e.index = static_cast<int>(k - 1);
        e.multiplier = nearest(p.multipliers, 1.0);
        out.push_back(e);
    }
    if (p.multipliers.size() != q.multipliers.size()) return;
    for (const auto& [i, j] : match(p.multipliers, q.multipliers)) {
        const cplx m0 = p.multipliers[i], m1 = q.multipliers[j];
        const double d0 = std::abs(m0) - 1.0, d1 = std::abs(m1) - 1.0;
        if (!(d0 * d1 < 0 && std::abs(d0) > opt.crossing_margin && std::abs(d1) > opt.crossing_margin))
            continue;
        if (m0.imag() < -1e-12) continue; // report a complex pair once
        if (fold && m0.real() > 0 && std::abs(m0.imag()) < 1e-8) continue; // the fold's own multiplier
        BranchEvent e;
        e.kind = EventKind::crossing_detected;
        e.index = static_cast<int>(k - 1);
        e.multiplier = m0;
        out.push_back(e);
    }
}

} // namespace

Branch continue_branch(const Rhs& f, const PeriodicOrbit& start, const ContinuationOptions& opt)
{
    Branch b;
    Tangent t = initial_tangent(f, start);
    if (opt.direction < 0) {
        for (auto& x : t.z) x = -x;
        t.delta = -t.delta;
    }
    b.points.push_back(make_point(f, start, t, 0.0, start.iterations));
    const double hmin = opt.h * opt.h_min_factor, hmax = opt.h * opt.h_max_factor;
    double h = opt.h;
    for (int k = 0; k < opt.k_max; ++k) {
        const BranchPoint& p = b.points.back();
        Tuple pred = p.orbit.states;
        for (std::size_t s = 0; s < pred.size(); ++s) pred[s] += h * p.tangent.z[s];
        const CorrectorResult c = correct(f, pred, p.orbit.alpha + h * p.tangent.delta, p.tangent, opt.newton);
        if (!c.converged) {
            h *= 0.5;
            if (h < hmin) {
                b.aborted = true;
                b.stop_reason = "corrector-divergence";
                break;
            }
            --k;
            continue;
        }
        Tangent tn;
        try {
            tn = next_tangent(f, c.orbit, p.tangent);
        } catch (const Error&) {
            h *= 0.5;
            if (h < hmin) {
                b.aborted = true;
                b.stop_reason = "singular-tangent";
                break;
            }
            --k;
            continue;
        }
        b.points.push_back(make_point(f, c.orbit, tn, p.s + h, c.iterations));
        if (opt.detect) detect(b, b.points.size() - 1, opt, b.events);
        if (c.iterations <= opt.grow_iterations) h = std::min(2 * h, hmax);
        else if (c.iterations >= opt.shrink_iterations) h = std::max(0.5 * h, hmin);
        const double a = c.orbit.alpha;
        if (a < opt.alpha_min || a > opt.alpha_max) {
            b.stop_reason = "alpha-range";
            break;
        }
    }
    if (b.stop_reason.empty()) b.stop_reason = "k-max";
    if (opt.localize)
        for (auto& e : b.events) {
            try {
                e.point = localize_event(f, b, e, opt);
            } catch (const std::exception& ex) {
                e.error = ex.what();
            }
        }
    return b;
}

BifurcationPoint localize_event(const Rhs& f, const Branch& b, BranchEvent& ev, const ContinuationOptions& opt)
{
    const BranchPoint& p = b.points.at(static_cast<std::size_t>(ev.index));
    const BranchPoint& q = b.points.at(static_cast<std::size_t>(ev.index) + 1);
    const bool fold = ev.kind == EventKind::fold_detected;

    struct Sample {
        PeriodicOrbit orbit;
        Tangent tangent;
        cplx m;
        double test;
    };
    auto at = [&](double sig, cplx guide) -> Sample {
        Tuple pred = p.orbit.states;
        for (std::size_t s = 0; s < pred.size(); ++s) pred[s] += sig * p.tangent.z[s];
        NewtonOptions no = opt.newton;
        no.max_iter = std::max(no.max_iter, 30);
        const CorrectorResult c = correct(f, pred, p.orbit.alpha + sig * p.tangent.delta, p.tangent, no);
        if (!c.converged) throw Error("localization-failed", "corrector diverged inside the bracket");
        Sample s{c.orbit, next_tangent(f, c.orbit, p.tangent), 0.0, 0.0};
        if (fold) {
            s.test = s.tangent.delta;
        } else {
            s.m = nearest(floquet(f, c.orbit).multipliers, guide);
            s.test = std::abs(s.m) - 1.0;
        }
        return s;
    };

    double lo = 0.0, hi = q.s - p.s;
    cplx mlo = ev.multiplier;
    cplx mhi = fold ? cplx(1.0) : nearest(q.multipliers, ev.multiplier);
    double flo = fold ? p.tangent.delta : std::abs(mlo) - 1.0;
    double fhi = fold ? q.tangent.delta : std::abs(mhi) - 1.0;
    if (!(flo * fhi < 0))
        throw Error("localization-failed", "test function has no sign change in the bracket");

    Sample best = at(lo, mlo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Sample s = at(mid, 0.5 * (mlo + mhi));
        best = s;
        if (std::abs(s.test) < opt.localize_tol || hi - lo < 1e-14) break;
        if (s.test * flo < 0) {
            hi = mid, fhi = s.test, mhi = s.m;
        } else {
            lo = mid, flo = s.test, mlo = s.m;
        }
        if (!(flo * fhi < 0)) throw Error("localization-failed", "bracket lost during refinement");
    }
    if (!(std::abs(best.test) < std::max(opt.localize_tol, 1e-6)))
        throw Error("localization-failed",
                    "test function " + std::to_string(best.test) + " above tolerance");
    ev.s = p.s + (lo + hi) / 2;

    ClassifyOptions co;
    if (!fold && std::abs(best.tangent.delta) > 1e-6) {
        Tuple psi = best.tangent.z;
        for (auto& x : psi) x /= best.tangent.delta;
        co.tangent = psi;
    }
    return classify(f, best.orbit, co);
}

PeriodicOrbit switch_branch(const Rhs& f, const BifurcationPoint& bp, double eps, const NewtonOptions& opt)
{
    if (bp.eig.xi.empty()) throw std::invalid_argument("switch_branch: point carries no eigen-sequence");
    const PeriodicOrbit base =
        static_cast<int>(bp.eig.xi.size()) == bp.orbit.theta ? bp.orbit : double_period(bp.orbit);
    const int theta = base.theta;
    const Vec bw = block_weights(f.rule(), theta);
    Vec xi = stack(bp.eig.xi);
    xi /= std::sqrt(bw.dot(xi.cwiseAbs2()));
    const Vec row = bw.cwiseProduct(xi);
    const Vec p0 = stack(base.states);
    const Eigen::Index n = p0.size();
    Vec p = p0 + eps * xi;
    double a = base.alpha;
    Vec G = cyclic_residual_stacked(f, unstack(p, theta), a);
    int it = 0;
    for (; it < std::max(opt.max_iter, 50); ++it) {
        const double c = row.dot(p - p0) - eps;
        if (G.lpNorm<Eigen::Infinity>() < opt.tol && std::abs(c) < opt.tol) break;
        const Tuple u = unstack(p, theta);
        Mat A(n + 1, n + 1);
        A.topLeftCorner(n, n) = assemble_jacobian(f, u, a);
        A.topRightCorner(n, 1) = d2_stacked(f, u, a);
        A.bottomLeftCorner(1, n) = row.transpose();
        A(n, n) = 0.0;
        Vec R(n + 1);
        R.head(n) = G;
        R[n] = c;
        const Vec d = Eigen::PartialPivLU<Mat>(A).solve(R);
        p -= d.head(n);
        a -= d[n];
        G = cyclic_residual_stacked(f, unstack(p, theta), a);
        if (!G.allFinite()) break;
    }
    if (!(G.lpNorm<Eigen::Infinity>() < opt.tol))
        throw Error("no-convergence", "branch switching did not converge");
    return PeriodicOrbit{theta, unstack(p, theta), a, G.lpNorm<Eigen::Infinity>(), it};
}

nlohmann::json to_json(const BranchEvent& e)
{
    nlohmann::json j = {{"event", to_string(e.kind)},
                        {"index", e.index},
                        {"s", e.s},
                        {"multiplier", {e.multiplier.real(), e.multiplier.imag()}}};
    if (e.point) j["point"] = to_json(*e.point);
    if (!e.error.empty()) j["error"] = e.error;
    return j;
}

void write_branch_csv(const Branch& b, const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw Error("io", "cannot write " + path);
    os.precision(12);
    os << "s,alpha,morse_index,total_population,leading_multiplier_re,leading_multiplier_im,delta\n";
    for (const auto& p : b.points) {
        const cplx m = p.multipliers.empty() ? cplx(0.0) : p.multipliers.front();
        os << p.s << ',' << p.orbit.alpha << ',' << p.morse_index << ',' << p.total_population << ','
           << m.real() << ',' << m.imag() << ',' << p.tangent.delta << '\n';
    }
}

} // namespace perifide
