#include "perifide/bifurc.hpp"

#include "perifide/error.hpp"

#include <cmath>
#include <functional>

namespace perifide {

bool is_zero(double v, double scale) { return std::abs(v) < 1e-6 * std::max(1.0, scale); }

bool Indicator::zero() const { return is_zero(value, scale); }

namespace {

Indicator pair_sum(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e,
                   const std::function<Vec(int)>& term)
{
    const QuadratureRule& r = f.rule();
    Indicator g;
    for (int t = 0; t < o.theta; ++t) {
        const Vec v = term(t);
        const Vec& eta = e.eta[(t + 1) % o.theta];
        g.value += pairing(r, eta, v);
        g.scale += (r.weights.array() * eta.array() * v.array()).abs().sum();
    }
    return g;
}

Tuple concat(const Tuple& a)
{
    Tuple r = a;
    r.insert(r.end(), a.begin(), a.end());
    return r;
}

} // namespace

Indicator indicator_g01(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e)
{
    return pair_sum(f, o, e, [&](int t) { return f.d2(t, o.states[t], o.alpha); });
}

Indicator indicator_g11(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e)
{
    return pair_sum(f, o, e, [&](int t) { return f.d12(t, o.states[t], o.alpha, e.xi[t]); });
}

Indicator indicator_g20(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e)
{
    return pair_sum(f, o, e,
                    [&](int t) { return f.d11(t, o.states[t], o.alpha, e.xi[t], e.xi[t]); });
}

Indicator indicator_g30(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e)
{
    return pair_sum(f, o, e, [&](int t) {
        return f.d111(t, o.states[t], o.alpha, e.xi[t], e.xi[t], e.xi[t]);
    });
}

Indicator indicator_g02(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e)
{
    return pair_sum(f, o, e, [&](int t) { return f.d22(t, o.states[t], o.alpha); });
}

double pairing_d11(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e, const Tuple& v)
{
    return pair_sum(f, o, e, [&](int t) {
               return f.d11(t, o.states[t], o.alpha, e.xi[t], v[t]);
           }).value;
}

Tuple solve_wbar(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e)
{
    const Indicator g20 = indicator_g20(f, o, e);
    if (!g20.zero())
        throw Error("not-a-pitchfork", "g20 = " + std::to_string(g20.value) + " is not zero");
    Tuple rhs(static_cast<std::size_t>(o.theta));
    for (int t = 0; t < o.theta; ++t)
        rhs[(t + 1) % o.theta] = -f.d11(t, o.states[t], o.alpha, e.xi[t], e.xi[t]);
    const Mat J = assemble_jacobian(f, o.states, o.alpha);
    const Vec lw = block_weights(f.rule(), o.theta).cwiseProduct(stack(e.eta));
    double mu = 0.0;
    return unstack(bordered_solve(J, stack(e.xi), lw, stack(rhs), &mu), o.theta);
}

Indicator indicator_gbar(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e,
                         const Tuple& wbar)
{
    return pair_sum(f, o, e, [&](int t) {
        const Vec& x = e.xi[t];
        return Vec(f.d111(t, o.states[t], o.alpha, x, x, x) +
                   3.0 * f.d11(t, o.states[t], o.alpha, x, wbar[t]));
    });
}

PerturbedRhs::PerturbedRhs(const Rhs& base, Tuple phi, double alpha, Tuple psi, Tuple chi)
    : base_(base), phi_(std::move(phi)), psi_(std::move(psi)), chi_(std::move(chi)), alpha_(alpha)
{
    if (phi_.empty() || psi_.size() != phi_.size())
        throw std::invalid_argument("perturbed motion: branch and tangent periods differ");
    if (!chi_.empty() && chi_.size() != phi_.size())
        throw std::invalid_argument("perturbed motion: curvature period differs");
}

int PerturbedRhs::idx(int t) const
{
    const int p = period();
    return ((t % p) + p) % p;
}

Vec PerturbedRhs::phi(int t, double a) const
{
    const int i = idx(t);
    const double d = a - alpha_;
    Vec r = phi_[i] + d * psi_[i];
    if (!chi_.empty()) r += 0.5 * d * d * chi_[i];
    return r;
}

Vec PerturbedRhs::dphi(int t, double a) const
{
    const int i = idx(t);
    Vec r = psi_[i];
    if (!chi_.empty()) r += (a - alpha_) * chi_[i];
    return r;
}

Vec PerturbedRhs::ddphi(int t) const
{
    return chi_.empty() ? Vec(Vec::Zero(size())) : chi_[idx(t)];
}

Vec PerturbedRhs::eval(int t, const Vec& u, double a) const
{
    return base_.eval(t, u + phi(t, a), a) - phi(t + 1, a);
}

Mat PerturbedRhs::d1_matrix(int t, const Vec& u, double a) const
{
    return base_.d1_matrix(t, u + phi(t, a), a);
}

Vec PerturbedRhs::d1(int t, const Vec& u, double a, const Vec& v) const
{
    return base_.d1(t, u + phi(t, a), a, v);
}

Vec PerturbedRhs::d2(int t, const Vec& u, double a) const
{
    const Vec x = u + phi(t, a);
    return base_.d1(t, x, a, dphi(t, a)) + base_.d2(t, x, a) - dphi(t + 1, a);
}

Vec PerturbedRhs::d11(int t, const Vec& u, double a, const Vec& v, const Vec& w) const
{
    return base_.d11(t, u + phi(t, a), a, v, w);
}

Vec PerturbedRhs::d12(int t, const Vec& u, double a, const Vec& v) const
{
    const Vec x = u + phi(t, a);
    return base_.d12(t, x, a, v) + base_.d11(t, x, a, v, dphi(t, a));
}

Vec PerturbedRhs::d22(int t, const Vec& u, double a) const
{
    const Vec x = u + phi(t, a);
    const Vec p = dphi(t, a);
    return base_.d11(t, x, a, p, p) + 2.0 * base_.d12(t, x, a, p) + base_.d22(t, x, a) +
           base_.d1(t, x, a, ddphi(t)) - ddphi(t + 1);
}

Vec PerturbedRhs::d111(int t, const Vec& u, double a, const Vec& v1, const Vec& v2,
                       const Vec& v3) const
{
    return base_.d111(t, u + phi(t, a), a, v1, v2, v3);
}

Vec PerturbedRhs::dual_d1(int t, const Vec& u, double a, const Vec& w) const
{
    return base_.dual_d1(t, u + phi(t, a), a, w);
}

Tuple solve_branch_curvature(const Rhs& f, const PeriodicOrbit& o, const Tuple& psi,
                             const EigSequences* e)
{
    Tuple rhs(static_cast<std::size_t>(o.theta));
    for (int t = 0; t < o.theta; ++t) {
        const Vec& x = o.states[t];
        rhs[(t + 1) % o.theta] = -(f.d11(t, x, o.alpha, psi[t], psi[t]) +
                                   2.0 * f.d12(t, x, o.alpha, psi[t]) + f.d22(t, x, o.alpha));
    }
    const Mat J = assemble_jacobian(f, o.states, o.alpha);
    if (e) {
        const Vec lw = block_weights(f.rule(), o.theta).cwiseProduct(stack(e->eta));
        double mu = 0.0;
        return unstack(bordered_solve(J, stack(e->xi), lw, stack(rhs), &mu), o.theta);
    }
    Eigen::PartialPivLU<Mat> lu(J);
    if (!(lu.rcond() > 1e-13)) throw Error("hyperbolicity-violated", "D1G is singular");
    return unstack(lu.solve(stack(rhs)), o.theta);
}

std::string to_string(BifKind k)
{
    switch (k) {
    case BifKind::fold: return "fold";
    case BifKind::transcritical: return "transcritical";
    case BifKind::pitchfork: return "pitchfork";
    case BifKind::flip: return "flip";
    case BifKind::unclassified: return "unclassified";
    }
    return "?";
}

PeriodicOrbit flip_embed(const Rhs& f, const PeriodicOrbit& o, double tol)
{
    const FloquetData fd = floquet(f, o);
    bool found = false;
    for (const auto& m : fd.multipliers)
        if (std::abs(m + 1.0) < tol) found = true;
    if (!found) throw std::invalid_argument("flip_embed: no Floquet multiplier near -1");
    return double_period(o);
}

namespace {

void crossing(const Rhs& g, const PeriodicOrbit& z, bool flip, BifurcationPoint& bp)
{
    bp.eig = eig_sequences(g, z, 1);
    const Indicator g11 = indicator_g11(g, z, bp.eig);
    const Indicator g20 = indicator_g20(g, z, bp.eig);
    const Indicator g02 = indicator_g02(g, z, bp.eig);
    bp.ind.g11 = g11;
    bp.ind.g20 = g20;
    bp.ind.g02 = g02;
    bp.g02_small = g02.zero();
    if (g11.zero())
        throw Error("degenerate-unclassified", "g11 = " + std::to_string(g11.value) + " vanishes");
    const int m = bp.morse_center;
    const bool up = g11.value > 0;
    bp.morse = {{"gamma1_below", m + (up ? 0 : 1)}, {"gamma1_above", m + (up ? 1 : 0)}};
    if (!flip && !g20.zero()) {
        bp.kind = BifKind::transcritical;
        bp.criticality = "";
        bp.branch_direction = bp.eig.xi;
        for (auto& x : bp.branch_direction) x *= -2.0 * g11.value / g20.value;
        bp.morse["gamma2_below"] = m + (up ? 1 : 0);
        bp.morse["gamma2_above"] = m + (up ? 0 : 1);
        bp.stability_exchange = up ? "gamma1 loses stability as alpha increases; gamma2 gains it"
                                   : "gamma1 gains stability as alpha increases; gamma2 loses it";
        return;
    }
    bp.ind.g30 = indicator_g30(g, z, bp.eig);
    bp.wbar = solve_wbar(g, z, bp.eig);
    const Indicator gb = indicator_gbar(g, z, bp.eig, bp.wbar);
    bp.ind.gbar = gb;
    if (gb.zero())
        throw Error("degenerate-unclassified", "gbar = " + std::to_string(gb.value) + " vanishes");
    bp.kind = flip ? BifKind::flip : BifKind::pitchfork;
    bp.criticality = gb.value / g11.value > 0 ? "sub" : "super";
    bp.alpha_ddot = -gb.value / (3.0 * g11.value);
    bp.morse["gamma2"] = m + (gb.value > 0 ? 1 : 0);
    bp.morse["gamma2_side"] = bp.alpha_ddot > 0 ? "above" : "below";
    bp.stability_exchange = bp.criticality == "super"
                                ? "bifurcating branch inherits the stability lost by gamma1"
                                : "bifurcating branch is unstable on the side where gamma1 is stable";
}

} // namespace

BifurcationPoint classify(const Rhs& f, const PeriodicOrbit& o, const ClassifyOptions& opt)
{
    BifurcationPoint bp;
    bp.orbit = o;
    const FloquetData fd = floquet(f, o);
    double dp = 1e300, dm = 1e300;
    std::size_t ip = 0, im = 0;
    for (std::size_t i = 0; i < fd.multipliers.size(); ++i) {
        const double a = std::abs(fd.multipliers[i] - 1.0), b = std::abs(fd.multipliers[i] + 1.0);
        if (a < dp) dp = a, ip = i;
        if (b < dm) dm = b, im = i;
    }
    const bool flip = dm < dp;
    const std::size_t ic = flip ? im : ip;
    if (std::min(dp, dm) > opt.multiplier_tol) {
        bp.kind = BifKind::unclassified;
        bp.critical_multiplier = fd.critical;
        bp.stability_exchange = "crossing, unclassified";
        return bp;
    }
    bp.critical_multiplier = fd.multipliers[ic];
    bp.morse_center = 0;
    for (std::size_t i = 0; i < fd.multipliers.size(); ++i)
        if (i != ic && std::abs(fd.multipliers[i]) > 1.0) ++bp.morse_center;

    const PeriodicOrbit ob = flip ? double_period(o) : o;
    double d2max = 0.0;
    for (int t = 0; t < ob.theta; ++t)
        d2max = std::max(d2max, f.d2(t, ob.states[t], ob.alpha).lpNorm<Eigen::Infinity>());
    bp.b3 = d2max < 1e-8;

    if (bp.b3) {
        crossing(f, ob, flip, bp);
        return bp;
    }

    EigSequences e = eig_sequences(f, ob, 1);
    const Indicator g01 = indicator_g01(f, ob, e);
    const Indicator g20 = indicator_g20(f, ob, e);
    if (!flip && !g01.zero() && !g20.zero()) {
        bp.eig = e;
        bp.ind.g01 = g01;
        bp.ind.g20 = g20;
        bp.kind = BifKind::fold;
        bp.criticality = g20.value / g01.value > 0 ? "sub" : "super";
        bp.alpha_ddot = -g20.value / g01.value;
        const int m = bp.morse_center;
        bp.morse = {{"gamma_plus", m + (g20.value > 0 ? 1 : 0)},
                    {"gamma_minus", m + (g20.value < 0 ? 1 : 0)}};
        bp.stability_exchange = "Morse index changes by one across the fold";
        return bp;
    }

    // crossing on a nontrivial branch: pass through the equation of perturbed motion
    Tuple psi, chi;
    if (flip) {
        const Tuple p = opt.tangent ? *opt.tangent : solve_tangent(f, o);
        psi = concat(p);
        chi = concat(solve_branch_curvature(f, o, p));
    } else {
        psi = opt.tangent ? *opt.tangent : solve_tangent_bordered(f, ob, e);
        chi = solve_branch_curvature(f, ob, psi, &e);
    }
    bp.tangent = psi;
    bp.perturbed = true;
    bp.ind.g01 = g01;
    PerturbedRhs w(f, ob.states, ob.alpha, psi, chi);
    PeriodicOrbit z{ob.theta, zeros(ob.theta, f.size()), ob.alpha, 0.0, 0};
    crossing(w, z, flip, bp);
    return bp;
}

std::pair<Vec, Vec> parity_decompose(const QuadratureRule& r, const Vec& u)
{
    if (!r.symmetric()) throw Error("unsupported", "parity needs a rule symmetric about 0");
    if (u.size() != r.size()) throw std::invalid_argument("parity: length mismatch");
    const Vec m = u.reverse();
    return {0.5 * (u - m), 0.5 * (u + m)};
}

nlohmann::json to_json(const Indicators& ind)
{
    nlohmann::json j = nlohmann::json::object();
    auto put = [&](const char* k, const std::optional<Indicator>& g) {
        if (g) j[k] = {{"value", g->value}, {"scale", g->scale}, {"zero", g->zero()}};
    };
    put("g01", ind.g01);
    put("g11", ind.g11);
    put("g20", ind.g20);
    put("g30", ind.g30);
    put("g02", ind.g02);
    put("gbar", ind.gbar);
    return j;
}

nlohmann::json to_json(const BifurcationPoint& b)
{
    auto norm = [](const Tuple& x) {
        double s = 0.0;
        for (const auto& v : x) s += v.squaredNorm();
        return std::sqrt(s);
    };
    return {{"kind", to_string(b.kind)},
            {"criticality", b.criticality},
            {"alpha", b.orbit.alpha},
            {"theta", b.orbit.theta},
            {"indicators", to_json(b.ind)},
            {"b3", b.b3},
            {"perturbed_motion", b.perturbed},
            {"g02_small", b.g02_small},
            {"alpha_ddot", b.alpha_ddot},
            {"critical_multiplier", {b.critical_multiplier.real(), b.critical_multiplier.imag()}},
            {"morse_center", b.morse_center},
            {"morse", b.morse},
            {"stability_exchange", b.stability_exchange},
            {"eig", {{"xi_norm", norm(b.eig.xi)}, {"eta_norm", norm(b.eig.eta)},
                     {"xi_residual", b.eig.xi_residual}, {"eta_residual", b.eig.eta_residual}}}};
}

} // namespace perifide
