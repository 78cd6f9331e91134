// Acceptance checks: one PASS/FAIL line per criterion, tolerances pinned below.
#include "fixtures.hpp"

#include "perifide/error.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

using namespace perifide;

namespace {

constexpr double pi = std::numbers::pi;

namespace tol {
constexpr double laplace_alpha_rel = 1e-2;
constexpr double laplace_runtime_s = 10.0;
constexpr double gauss_alpha00_abs = 1e-2;
constexpr double gauss_flip1_abs = 5e-2;
constexpr double gauss_flip2_abs = 2e-1;
constexpr double gauss_runtime_s = 60.0;
constexpr double fold_rel = 1e-4;
constexpr double flip_alpha_rel = 1e-4;
constexpr double flip_gbar_rel = 1e-3;
constexpr double pitch_alpha_rel = 1e-4;
constexpr double pitch_indicator_rel = 1e-3;
constexpr double pitch_wbar_abs = 1e-4;
constexpr double allee_fold_abs = 5e-3;
constexpr double spectrum_rel = 1e-8;
constexpr double derivative_rel = 1e-6;
constexpr double fd_step = 1e-5;
constexpr double adjoint_rel = 1e-12;
constexpr double closed_form_rel = 1e-8;
constexpr double laplace_gbar_rel = 1e-4;
constexpr double doubled_rel = 1e-12;
constexpr double eig_fd_step = 1e-3;
constexpr double eig_derivative_rel = 5e-2;
constexpr double order_low = 1.9;
constexpr double order_high = 3.9;
constexpr double parity_exact = 1e-15;
constexpr double even_preserve = 1e-12;
constexpr double pair_population = 1e-8;
} // namespace tol

// collects failed sub-checks of one criterion
class Criterion {
public:
    void check(bool ok, const std::string& what)
    {
        if (!ok) failed_.push_back(what);
    }
    void close(double measured, double expected, double rel, const std::string& what)
    {
        std::ostringstream os;
        os.precision(10);
        os << what << " measured " << measured << " expected " << expected << " (rel " << rel << ")";
        const bool ok = std::abs(measured - expected) <= rel * std::abs(expected);
        check(ok, os.str());
        if (ok) notes_.push_back(what + " " + std::to_string(measured));
    }
    void within(double measured, double expected, double abs, const std::string& what)
    {
        std::ostringstream os;
        os.precision(10);
        os << what << " measured " << measured << " expected " << expected << " (abs " << abs << ")";
        const bool ok = std::abs(measured - expected) <= abs;
        check(ok, os.str());
        if (ok) notes_.push_back(what + " " + std::to_string(measured));
    }
    bool pass() const { return failed_.empty(); }
    std::string detail() const
    {
        std::string s;
        for (const auto& f : pass() ? notes_ : failed_) s += (s.empty() ? "" : "; ") + f;
        return s;
    }

private:
    std::vector<std::string> failed_, notes_;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PeriodicOrbit trivial(const Model& m, double alpha)
{
    return {m.period(), zeros(m.period(), m.size()), alpha, 0.0, 0};
}

const BranchEvent* find_event(const Branch& b, BifKind k, int skip = 0)
{
    for (const auto& e : b.events)
        if (e.point && e.point->kind == k && skip-- == 0) return &e;
    return nullptr;
}

double omega_h(const QuadratureRule& r, int i, int j, double a)
{
    const Vec c = fx::e1(r, a);
    const Vec s = r.nodes.unaryExpr([a](double x) { return std::sin(pi * a * x); });
    return integrate(r, (c.array().pow(i) * s.array().pow(j)).matrix());
}

// ---------------------------------------------------------------------------------------------

const double laplace_table[] = {1.74, 5.12, 12.73, 25.13, 42.42};

void laplace_family(Criterion& c, Order order, bool timed)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Model m = fx::laplace_bh(order, 50);
    const auto modes = classify_trivial_branch(m, 5);
    const auto nu = laplace_roots(2.0, 5);
    for (int i = 0; i < 5; ++i) {
        const std::string tag = "alpha_" + std::to_string(i) + "^0";
        c.close(modes[i].alpha0, laplace_table[i], tol::laplace_alpha_rel, tag + " (Nystrom)");
        c.close(1 + nu[i] * nu[i], laplace_table[i], tol::laplace_alpha_rel, tag + " (roots)");
        if (i % 2 == 0) {
            c.check(modes[i].point.kind == BifKind::transcritical, tag + " not transcritical");
        } else {
            c.check(modes[i].point.kind == BifKind::pitchfork, tag + " not pitchfork");
            c.check(modes[i].point.criticality == "super", tag + " not supercritical");
        }
    }
    if (timed) {
        const double t = seconds_since(t0);
        c.check(t < tol::laplace_runtime_s, "runtime " + std::to_string(t) + " s");
    }
}

Criterion criterion1()
{
    Criterion c;
    laplace_family(c, Order::growth_then_dispersal, true);
    return c;
}

Criterion criterion2()
{
    Criterion c;
    laplace_family(c, Order::dispersal_then_growth, false);
    const auto a = classify_trivial_branch(fx::laplace_bh(Order::growth_then_dispersal, 50), 5);
    const auto b = classify_trivial_branch(fx::laplace_bh(Order::dispersal_then_growth, 50), 5);
    for (int i = 0; i < 5; ++i) {
        c.close(b[i].alpha0, a[i].alpha0, tol::laplace_alpha_rel, "alpha_" + std::to_string(i) + "^0 vs Hammerstein");
        c.check(a[i].point.kind == b[i].point.kind, "kind differs at mode " + std::to_string(i));
    }
    return c;
}

Criterion criterion3()
{
    Criterion c;
    const auto t0 = std::chrono::steady_clock::now();
    const Model m = fx::gauss_ricker(50);
    const auto modes = classify_trivial_branch(m, 1);
    const double a0 = modes[0].alpha0;
    c.within(a0, 1.36, tol::gauss_alpha00_abs, "alpha_0^0");
    c.check(modes[0].point.kind == BifKind::transcritical, "alpha_0^0 not transcritical");
    c.check(floquet(m, trivial(m, 0.99 * a0)).morse_index == 0, "trivial Morse index below alpha_0^0");
    c.check(floquet(m, trivial(m, 1.01 * a0)).morse_index == 1, "trivial Morse index above alpha_0^0");
    const auto [lo, hi] = gauss_radius_bounds(1.0, 2.0);
    c.check(modes[0].lambda >= lo && modes[0].lambda <= hi, "spectral radius outside the erf bounds");

    ContinuationOptions o;
    o.h = 0.05;
    o.k_max = 2000;
    o.alpha_min = 0.0;
    o.alpha_max = 40.0;
    const Branch b = continue_branch(m, switch_branch(m, modes[0].point, 1e-2), o);
    const BranchEvent* f1 = find_event(b, BifKind::flip, 0);
    const BranchEvent* f2 = find_event(b, BifKind::flip, 1);
    c.check(f1 != nullptr, "first flip not detected");
    c.check(f2 != nullptr, "second flip not detected");
    if (f1) c.within(f1->point->orbit.alpha, 10.32, tol::gauss_flip1_abs, "first flip");
    if (f2) c.within(f2->point->orbit.alpha, 31.67, tol::gauss_flip2_abs, "second flip");
    const double t = seconds_since(t0);
    c.check(t < tol::gauss_runtime_s, "runtime " + std::to_string(t) + " s");
    return c;
}

Criterion criterion4()
{
    Criterion c;
    const double a = 0.25, L = 2.0;
    const Model m = fx::cosine_fold(50);
    const QuadratureRule& r = m.rule();
    ContinuationOptions o;
    o.alpha_min = -0.5;
    o.alpha_max = 0.5;
    const Branch b = continue_branch(m, solve_periodic(m, {Vec::Constant(m.size(), 0.5)}, 0.2), o);
    const BranchEvent* e = find_event(b, BifKind::fold);
    c.check(e != nullptr, "fold not localized");
    if (!e) return c;
    const BifurcationPoint& bp = *e->point;
    const double exact = 3 / (9 - 8 * std::cos(pi * a * L) - std::cos(2 * pi * a * L));
    c.close(bp.orbit.alpha, exact, tol::fold_rel, "fold alpha");
    const double w10 = fx::omega(1, 0, a, L), w30 = fx::omega(3, 0, a, L);
    const Tuple xp{fx::e1(r, a)}, ep{fx::e1(r, a).cwiseAbs2()};
    const double cs = fx::scale_of(r, bp.eig.xi, xp), ds = fx::scale_of(r, bp.eig.eta, ep);
    c.close(bp.ind.g01->value / ds, pi * a * w10 * w30, tol::fold_rel, "g01");
    c.close(bp.ind.g20->value / (ds * cs * cs), pi * a * w30 * w30, tol::fold_rel, "g20");
    c.check(bp.criticality == "sub", "criticality " + bp.criticality);
    c.check(bp.morse["gamma_minus"] == 0, "Morse index of the lower branch");
    c.check(bp.morse["gamma_plus"] == 1, "Morse index of the upper branch");
    return c;
}

Criterion criterion5()
{
    Criterion c;
    const double a = 0.25, L = 2.0;
    const Model m = fx::cosine_flip(50);
    const QuadratureRule& r = m.rule();
    const double w20 = fx::omega(2, 0, a, L), w40 = fx::omega(4, 0, a, L);
    const Vec e1 = fx::e1(r, a);

    ContinuationOptions o;
    o.alpha_min = 0.0;
    o.alpha_max = 5.0;
    const Branch b0 = continue_branch(m, solve_periodic(m, {Vec::Zero(m.size())}, 0.5), o);
    const BranchEvent* fe = find_event(b0, BifKind::flip);
    c.check(fe != nullptr, "flip not localized");
    if (!fe) return c;
    const BifurcationPoint& fl = *fe->point;
    const double a0 = 2 / (pi * a * w20);
    c.close(fl.orbit.alpha, a0, tol::flip_alpha_rel, "flip alpha");
    c.check(fl.criticality == "super", "flip criticality " + fl.criticality);
    {
        const Tuple xp{e1, -e1};
        const double cs = fx::scale_of(r, fl.eig.xi, xp), ds = fx::scale_of(r, fl.eig.eta, xp);
        c.close(fl.ind.gbar->value / (ds * cs * cs * cs), -12 * w40, tol::flip_gbar_rel, "flip gbar");
    }

    const PeriodicOrbit start = switch_branch(m, fl, 1e-2);
    ContinuationOptions o2 = o;
    o2.h = 0.02;
    const Branch b1 = continue_branch(m, start, o2);
    const BranchEvent* pe = find_event(b1, BifKind::pitchfork);
    c.check(pe != nullptr, "pitchfork on the 2-cycle branch not localized");
    if (!pe) return c;
    const BifurcationPoint& pf = *pe->point;
    c.close(pf.orbit.alpha, 2 * a0, tol::pitch_alpha_rel, "pitchfork alpha");
    const double s2 = w20 / (2 * w40);
    const Vec ee = (3 * s2 * e1.cwiseAbs2().array() - 1).matrix().cwiseProduct(e1);
    const Tuple xp{e1, e1}, ep{ee, ee};
    const double cs = fx::scale_of(r, pf.eig.xi, xp), ds = fx::scale_of(r, pf.eig.eta, ep);
    c.close(pf.ind.g11->value / (ds * cs), pi * a * w20, tol::pitch_indicator_rel, "pitchfork g11");
    c.close(pf.ind.gbar->value / (ds * cs * cs * cs), -192 * w40, tol::pitch_indicator_rel, "pitchfork gbar");
    // phase of the 2-cycle: φ_t = σ(−1)^t s e1
    const double sigma = pairing(r, pf.orbit.states[0], e1) > 0 ? 1.0 : -1.0;
    const double k = 3 * std::sqrt(2 * w40 / w20);
    double werr = 0;
    for (int t = 0; t < 2; ++t) {
        const Vec expect = sigma * (t % 2 == 0 ? -k : k) * e1;
        werr = std::max(werr, (pf.wbar[t] / (cs * cs) - expect).lpNorm<Eigen::Infinity>());
    }
    c.check(werr <= tol::pitch_wbar_abs, "wbar nodewise error " + std::to_string(werr));
    return c;
}

Criterion criterion6()
{
    Criterion c;
    const Model m = fx::allee(50);
    ContinuationOptions o;
    o.direction = -1;
    o.alpha_min = 0.0;
    o.alpha_max = 0.6001;
    const Branch b = continue_branch(m, solve_periodic(m, {Vec::Constant(m.size(), 8.0)}, 0.6), o);
    const BranchEvent* e = nullptr;
    for (const auto& x : b.events)
        if (x.kind == EventKind::fold_detected && x.point) {
            e = &x;
            break;
        }
    c.check(e != nullptr, "fold not localized");
    if (!e) return c;
    // α is aL for the rate slot with coefficient 1/L
    c.within(e->point->orbit.alpha, 0.464, tol::allee_fold_abs, "fold aL");
    c.check(e->point->kind == BifKind::fold, "event is not a fold");
    bool upper_stable = true, monotone = true, lower_unstable = true;
    for (int k = 0; k <= e->index; ++k) {
        upper_stable &= b.points[k].morse_index == 0;
        // traversal runs towards smaller aL, so the population must decrease
        if (k) monotone &= b.points[k].total_population < b.points[k - 1].total_population;
    }
    int end = static_cast<int>(b.points.size());
    for (const auto& x : b.events)
        if (x.index > e->index) {
            end = x.index + 1;
            break;
        }
    int lower = 0;
    for (int k = e->index + 1; k < end; ++k, ++lower) lower_unstable &= b.points[k].morse_index == 1;
    c.check(upper_stable, "upper branch not exponentially stable");
    c.check(monotone, "total population along the upper branch not increasing in aL");
    c.check(lower > 0 && lower_unstable, "lower branch Morse index not 1");
    return c;
}

Model random_small_model(std::mt19937& g)
{
    std::uniform_int_distribution<int> nd(2, 4), th(1, 3), kd(0, 2), gd(0, 3);
    std::uniform_real_distribution<double> ud(0.5, 2.0);
    const KernelKind kk[] = {KernelKind::laplace, KernelKind::gauss, KernelKind::cosine};
    const GrowthKind gk[] = {GrowthKind::beverton_holt, GrowthKind::ricker, GrowthKind::logistic,
                             GrowthKind::hassell};
    const int k = kd(g);
    ModelSpec s = fx::spec(kk[k], k == 2 ? 0.2 : ud(g), gk[gd(g)], 2.0, nd(g));
    const int theta = th(g);
    s.beta.clear();
    for (int t = 0; t < theta; ++t) s.beta.push_back(ud(g));
    return Model(s);
}

Criterion criterion7()
{
    Criterion c;
    std::mt19937 g(20240607u);
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const Model m = random_small_model(g);
        Tuple u;
        for (int t = 0; t < m.period(); ++t) u.push_back(fx::random_vec(m.size(), 0.0, 1.0));
        const PeriodicOrbit o{m.period(), u, 1.3, 0.0, 0};
        std::vector<cplx> grouped = floquet(m, o).multipliers;
        Eigen::EigenSolver<Mat> es(period_matrix(m, o), false);
        c.check(grouped.size() == static_cast<std::size_t>(m.size()), "grouped count differs");
        for (Eigen::Index i = 0; i < es.eigenvalues().size() && !grouped.empty(); ++i) {
            const cplx x = es.eigenvalues()[i];
            auto it = std::min_element(grouped.begin(), grouped.end(),
                                       [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
            worst = std::max(worst, std::abs(*it - x) / std::max(1.0, std::abs(x)));
            grouped.erase(it);
        }
    }
    c.check(worst <= tol::spectrum_rel, "worst mismatch " + std::to_string(worst));
    return c;
}

Criterion criterion8()
{
    Criterion c;
    auto err = [](const Vec& a, const Vec& b) {
        return (a - b).lpNorm<Eigen::Infinity>() / std::max(1.0, b.lpNorm<Eigen::Infinity>());
    };
    auto cd = [](const std::function<Vec(double)>& f) {
        return Vec((f(tol::fd_step) - f(-tol::fd_step)) / (2 * tol::fd_step));
    };
    double worst = 0, worst_dual = 0;
    std::string where;
    for (const auto& [name, m] : fx::all_models(8)) {
        std::uniform_int_distribution<int> td(0, m.period() - 1);
        std::uniform_real_distribution<double> ad(0.4, 1.6);
        const int N = m.size();
        for (int rep = 0; rep < 20; ++rep) {
            const int t = td(fx::rng());
            const Vec u = fx::random_vec(N, 0.05, 1.5), v = fx::random_vec(N, -1, 1),
                      w = fx::random_vec(N, -1, 1), x = fx::random_vec(N, -1, 1);
            const double a = ad(fx::rng());
            const double errs[] = {
                err(cd([&](double h) { return m.eval(t, u + h * v, a); }), m.d1(t, u, a, v)),
                err(cd([&](double h) { return m.eval(t, u, a + h); }), m.d2(t, u, a)),
                err(cd([&](double h) { return m.d1(t, u + h * v, a, w); }), m.d11(t, u, a, v, w)),
                err(cd([&](double h) { return m.d1(t, u, a + h, v); }), m.d12(t, u, a, v)),
                err(cd([&](double h) { return m.d2(t, u, a + h); }), m.d22(t, u, a)),
                err(cd([&](double h) { return m.d11(t, u + h * v, a, w, x); }), m.d111(t, u, a, v, w, x))};
            for (double e : errs)
                if (e > worst) worst = e, where = name;
            const double lhs = pairing(m.rule(), w, m.d1(t, u, a, v));
            const double rhs = pairing(m.rule(), m.dual_d1(t, u, a, w), v);
            worst_dual = std::max(worst_dual, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
    }
    c.check(worst <= tol::derivative_rel, "worst derivative error " + std::to_string(worst) + " (" + where + ")");
    c.check(worst_dual <= tol::adjoint_rel, "worst adjointness error " + std::to_string(worst_dual));
    return c;
}

Criterion criterion9()
{
    Criterion c;
    ModelSpec ps = fx::spec(KernelKind::laplace, 1.0, GrowthKind::beverton_holt, 1.0, 30);
    ps.beta = {1.0, 1.6, 0.7};
    const std::vector<Model> models{fx::laplace_bh(Order::growth_then_dispersal, 30), Model(ps), fx::gauss_ricker(30)};
    double worst = 0;
    for (const Model& m : models) {
        const int theta = m.period();
        const KOperator K = build_K(m);
        const TrivialSpectrum s = k_spectrum(m, K, 4);
        for (int i = 0; i < 4; ++i) {
            const EigSequences e = trivial_eig_sequences(m, s, i, theta);
            const PeriodicOrbit o = trivial(m, s.alpha0[i]);
            const TrivialIndicators ti = trivial_indicators(m, s, i, theta);
            const Indicator g[] = {indicator_g11(m, o, e), indicator_g20(m, o, e), indicator_g30(m, o, e)};
            const double v[] = {ti.g11, ti.g20, ti.g30};
            for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(v[k] - g[k].value) / std::max(1.0, g[k].scale));
            if (i % 2 == 1 && m.kernel_values().isApprox(m.kernel_values().transpose())) {
                const Indicator gb = indicator_gbar(m, o, e, solve_wbar(m, o, e));
                worst = std::max(worst, std::abs(trivial_gbar(m, K, s, i, theta) - gb.value) / std::max(1.0, gb.scale));
            }
        }
    }
    c.check(worst <= tol::closed_form_rel, "closed forms vs generic sums " + std::to_string(worst));

    // Laplace ḡ closed form for the unnormalized eigenfunction sin(aνx)
    for (auto [i, n] : {std::pair{1, 200}, std::pair{3, 400}}) {
        const Model m = fx::laplace_bh(Order::growth_then_dispersal, n);
        const KOperator K = build_K(m);
        const TrivialSpectrum s = k_spectrum(m, K, i + 1);
        const double v = laplace_roots(2.0, i + 1)[i];
        const double n2 = 1 - std::sin(2 * v) / (2 * v);
        const double closed = laplace_gbar_autonomous(1.0, 2.0, i, m.trivial_coefficients()) / (n2 * n2);
        c.close(trivial_gbar(m, K, s, i, 1), closed, tol::laplace_gbar_rel, "Laplace gbar mode " + std::to_string(i));
    }

    // flip sums over the doubled period are twice the one-period sums
    const Model m = fx::cosine_flip(50);
    const double a0 = 2 / (pi * 0.25 * omega_h(m.rule(), 2, 0, 0.25));
    const PeriodicOrbit o2 = double_period(trivial(m, a0));
    const EigSequences e = eig_sequences(m, o2, 1);
    const Vec& x = e.xi[0];
    const double g11 = indicator_g11(m, o2, e).value, g30 = indicator_g30(m, o2, e).value;
    const double h11 = pairing(m.rule(), e.eta[1], m.d12(0, o2.states[0], a0, x));
    const double h30 = pairing(m.rule(), e.eta[1], m.d111(0, o2.states[0], a0, x, x, x));
    c.close(g11, 2 * h11, tol::doubled_rel, "doubled g11");
    c.close(g30, 2 * h30, tol::doubled_rel, "doubled g30");
    return c;
}

// eigenvalue of D1G nearest 0, i.e. the critical eigenvalue of I + D1G shifted by 1
double critical_mu(const Rhs& f, const PeriodicOrbit& o)
{
    const FloquetData fd = floquet(f, o);
    cplx best = fd.raw_eigs.front();
    for (const cplx& m : fd.raw_eigs)
        if (std::abs(m) < std::abs(best)) best = m;
    return best.real();
}

Criterion criterion10()
{
    Criterion c;
    const double h = tol::eig_fd_step;
    // unit ξ and ⟨η, ξ⟩_θ = 1, so the branching constraint parameter is the curve parameter s
    auto branch_lambda = [&](const Rhs& f, const BifurcationPoint& bp, double s) {
        return critical_mu(f, switch_branch(f, bp, s, {1e-13, 50, 0}));
    };

    // fold: exact discrete fold point of the cosine example
    {
        const double a = 0.25;
        const Model m = fx::cosine_fold(50);
        const double w10 = omega_h(m.rule(), 1, 0, a), w30 = omega_h(m.rule(), 3, 0, a);
        const double s = 1 / (pi * a * w30);
        const PeriodicOrbit o{1, {s * fx::e1(m.rule(), a)}, s / (2 * pi * a * w10), 0, 0};
        const BifurcationPoint bp = classify(m, o);
        const double ld = (branch_lambda(m, bp, h) - branch_lambda(m, bp, -h)) / (2 * h);
        c.close(ld, bp.ind.g20->value, tol::eig_derivative_rel, "fold lambda'(0) vs g20");
    }
    const Model m = fx::laplace_bh(Order::growth_then_dispersal, 50);
    const TrivialSpectrum sp = k_spectrum(m, build_K(m), 2);
    // transcritical Γ₁ (trivial branch, α = α* + s) and Γ₂
    {
        const PeriodicOrbit o = trivial(m, sp.alpha0[0]);
        const BifurcationPoint bp = classify(m, o);
        const double l1 = (critical_mu(m, trivial(m, sp.alpha0[0] + h)) - critical_mu(m, trivial(m, sp.alpha0[0] - h))) /
                          (2 * h);
        c.close(l1, bp.ind.g11->value, tol::eig_derivative_rel, "transcritical Gamma1 lambda'(0) vs g11");
        const double l2 = (branch_lambda(m, bp, h) - branch_lambda(m, bp, -h)) / (2 * h);
        c.close(l2, bp.ind.g20->value / 2, tol::eig_derivative_rel, "transcritical Gamma2 lambda'(0) vs g20/2");
    }
    // pitchfork Γ₂
    {
        const PeriodicOrbit o = trivial(m, sp.alpha0[1]);
        const BifurcationPoint bp = classify(m, o);
        const double lp = branch_lambda(m, bp, h), lm = branch_lambda(m, bp, -h), l0 = critical_mu(m, o);
        const double ld = (lp - lm) / (2 * h), ldd = (lp - 2 * l0 + lm) / (h * h);
        const double pred = 2.0 / 3.0 * bp.ind.g30->value + 2 * pairing_d11(m, bp.orbit, bp.eig, bp.wbar);
        c.check(std::abs(ld) <= tol::eig_derivative_rel * std::abs(bp.ind.g11->value),
                "pitchfork lambda'(0) = " + std::to_string(ld) + " not ~0 against g11 = " +
                    std::to_string(bp.ind.g11->value));
        c.close(ldd, pred, tol::eig_derivative_rel, "pitchfork lambda''(0) vs (2/3)g30 + 2z'(G20 xi wbar)");
    }
    return c;
}

double fitted_order(RuleKind k)
{
    std::vector<double> lx, ly;
    for (int n : {8, 16, 32, 64}) {
        const QuadratureRule r = build_rule(k, n, 0.0, 1.0);
        lx.push_back(std::log(1.0 / n));
        ly.push_back(std::log(std::abs(integrate(r, r.nodes.array().exp().matrix()) - (std::exp(1.0) - 1.0))));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 4;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / 4;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 4; ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
    return sxy / sxx;
}

Criterion criterion11()
{
    Criterion c;
    const double mid = fitted_order(RuleKind::midpoint), trap = fitted_order(RuleKind::trapezoidal),
                 cheb = fitted_order(RuleKind::chebyshev2);
    c.check(mid >= tol::order_low, "midpoint order " + std::to_string(mid));
    c.check(trap >= tol::order_low, "trapezoidal order " + std::to_string(trap));
    c.check(cheb >= tol::order_high, "chebyshev2 order " + std::to_string(cheb));
    return c;
}

Criterion criterion12()
{
    Criterion c;
    const Model lm = fx::laplace_bh(Order::growth_then_dispersal, 50);
    const Model gm = fx::gauss_ricker(50);
    const QuadratureRule& r = lm.rule();
    // parity decomposition
    const Vec u = fx::random_vec(r.size(), -1, 1);
    const auto [odd, even] = parity_decompose(r, u);
    double perr = (odd + even - u).lpNorm<Eigen::Infinity>();
    for (int j = 0; j < r.size(); ++j)
        perr = std::max({perr, std::abs(odd[j] + odd[r.mirror(j)]), std::abs(even[j] - even[r.mirror(j)])});
    c.check(perr <= tol::parity_exact, "parity decomposition error " + std::to_string(perr));
    // even models map even states to even states
    double eerr = 0;
    for (const Model* m : {&lm, &gm}) {
        const Vec ue = even.cwiseAbs();
        const Vec fu = m->eval(0, ue, 3.0);
        for (int j = 0; j < r.size(); ++j) eerr = std::max(eerr, std::abs(fu[j] - fu[r.mirror(j)]));
    }
    c.check(eerr <= tol::even_preserve, "even preservation error " + std::to_string(eerr));
    // eigenfunction parity alternates
    for (const Model* m : {&lm, &gm}) {
        const TrivialSpectrum s = k_spectrum(*m, build_K(*m), 6);
        for (int i = 0; i < 6; ++i) c.check(s.parity[i] == i % 2, "parity of mode " + std::to_string(i));
    }
    // pitchfork pairs share the total population
    const auto modes = classify_trivial_branch(lm, 2);
    const PeriodicOrbit p = switch_branch(lm, modes[1].point, 1e-2), q = switch_branch(lm, modes[1].point, -1e-2);
    const double dp = std::abs(total_population(r, p) - total_population(r, q));
    c.check(std::abs(p.alpha - q.alpha) <= tol::pair_population, "pitchfork pair alpha differs");
    c.check(dp <= tol::pair_population, "pitchfork pair population difference " + std::to_string(dp));
    return c;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Criterion()>>> criteria{
        {"Laplace Beverton-Holt trivial branch", criterion1},
        {"dispersal-growth Beverton-Holt", criterion2},
        {"Gauss-Ricker primary branch and flips", criterion3},
        {"cosine-kernel fold", criterion4},
        {"cosine-kernel flip chain", criterion5},
        {"Allee fold in aL", criterion6},
        {"spectrum relation on random instances", criterion7},
        {"derivative suite", criterion8},
        {"indicator cross-checks", criterion9},
        {"eigenvalue derivatives along branches", criterion10},
        {"quadrature convergence orders", criterion11},
        {"symmetry suite", criterion12},
    };
    int failures = 0, k = 0;
    for (const auto& [name, run] : criteria) {
        ++k;
        Criterion c;
        try {
            c = run();
        } catch (const std::exception& e) {
            c.check(false, std::string("exception: ") + e.what());
        }
        if (!c.pass()) ++failures;
        const std::string d = c.detail();
        std::printf("criterion %2d %s: %s%s%s\n", k, c.pass() ? "PASS" : "FAIL", name, d.empty() ? "" : " -- ",
                    d.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
