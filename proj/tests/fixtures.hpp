#pragma once

#include "perifide/contin.hpp"
#include "perifide/trivial.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

namespace fx {

using namespace perifide;

inline ModelSpec spec(KernelKind k, double a, GrowthKind g, double gp = 1.0, int n = 50, double L = 2.0)
{
    ModelSpec s;
    s.rule = build_rule(RuleKind::chebyshev2, n, -L / 2, L / 2);
    s.kernel = {k, a};
    s.growth = {g, gp};
    return s;
}

inline Model laplace_bh(Order o = Order::growth_then_dispersal, int n = 50)
{
    ModelSpec s = spec(KernelKind::laplace, 1.0, GrowthKind::beverton_holt, 1.0, n);
    s.order = o;
    return Model(s);
}

inline Model gauss_ricker(int n = 50)
{
    return Model(spec(KernelKind::gauss, 1.0, GrowthKind::ricker, 1.0, n));
}

inline Model cosine_fold(int n = 50)
{
    ModelSpec s = spec(KernelKind::cosine, 0.25, GrowthKind::quadratic_fold, 1.0, n);
    s.slot = Slot::additive;
    s.slot_coef = 2.0;
    return Model(s);
}

inline Model cosine_flip(int n = 50)
{
    return Model(spec(KernelKind::cosine, 0.25, GrowthKind::cubic_flip, 1.0, n));
}

inline Model allee(int n = 50)
{
    ModelSpec s = spec(KernelKind::laplace, 1.0, GrowthKind::allee, 10.0, n);
    s.slot = Slot::kernel_rate;
    s.slot_coef = 0.5;
    return Model(s);
}

// every bundled model plus periodic and slot variants
inline std::vector<std::pair<std::string, Model>> all_models(int n = 8)
{
    std::vector<std::pair<std::string, Model>> v;
    v.emplace_back("laplace_bh", laplace_bh(Order::growth_then_dispersal, n));
    v.emplace_back("laplace_bh_dg", laplace_bh(Order::dispersal_then_growth, n));
    v.emplace_back("gauss_ricker", gauss_ricker(n));
    v.emplace_back("cosine_fold", cosine_fold(n));
    v.emplace_back("cosine_flip", cosine_flip(n));
    v.emplace_back("allee", allee(n));
    ModelSpec h = spec(KernelKind::gauss, 1.5, GrowthKind::hassell, 2.0, n);
    h.beta = {1.0, 1.5, 0.7};
    h.slot = Slot::scaled_outer;
    v.emplace_back("gauss_hassell_periodic", Model(h));
    ModelSpec l = spec(KernelKind::laplace, 2.0, GrowthKind::logistic, 1.0, n);
    l.beta = {0.9, 1.2};
    l.order = Order::dispersal_then_growth;
    v.emplace_back("laplace_logistic_periodic", Model(l));
    ModelSpec p;
    p.rule = point_rule(0.0);
    p.kernel = {KernelKind::pointmass, 0.8};
    p.growth = {GrowthKind::ricker, 1.0};
    p.beta = {1.0, 2.0};
    v.emplace_back("pointmass_ricker", Model(p));
    return v;
}

// F(u) = u + u² + α² − 1: the fixed points form the unit circle u² + α² = 1
class Circle final : public Rhs {
public:
    const QuadratureRule& rule() const override { return r_; }
    int period() const override { return 1; }
    Vec eval(int, const Vec& u, double a) const override
    {
        return (u.array() + u.array().square() + a * a - 1).matrix();
    }
    Mat d1_matrix(int, const Vec& u, double) const override
    {
        return (1 + 2 * u.array()).matrix().asDiagonal();
    }
    Vec d2(int, const Vec& u, double a) const override { return Vec::Constant(u.size(), 2 * a); }
    Vec d11(int, const Vec&, double, const Vec& v, const Vec& w) const override
    {
        return 2 * v.cwiseProduct(w);
    }
    Vec d12(int, const Vec& u, double, const Vec&) const override { return Vec::Zero(u.size()); }
    Vec d22(int, const Vec& u, double) const override { return Vec::Constant(u.size(), 2.0); }
    Vec d111(int, const Vec& u, double, const Vec&, const Vec&, const Vec&) const override
    {
        return Vec::Zero(u.size());
    }
    Vec dual_d1(int t, const Vec& u, double a, const Vec& w) const override
    {
        return d1_matrix(t, u, a) * w;
    }

private:
    QuadratureRule r_ = point_rule(0.0);
};

inline std::mt19937& rng()
{
    static std::mt19937 g(20240521u);
    return g;
}

inline Vec random_vec(int n, double lo, double hi)
{
    std::uniform_real_distribution<double> d(lo, hi);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng());
    return v;
}

inline double rel_err(const Vec& a, const Vec& b)
{
    return (a - b).lpNorm<Eigen::Infinity>() / std::max(1e-300, b.lpNorm<Eigen::Infinity>());
}

inline double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

// ω_ij = ∫_{−L/2}^{L/2} cos(πax)^i sin(πax)^j dx by adaptive Gauss–Kronrod
inline double omega(int i, int j, double a = 0.25, double L = 2.0)
{
    auto f = [=](double x) {
        return std::pow(std::cos(std::numbers::pi * a * x), i) * std::pow(std::sin(std::numbers::pi * a * x), j);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -L / 2, L / 2, 15, 1e-15);
}

inline Vec e1(const QuadratureRule& r, double a = 0.25)
{
    return r.nodes.unaryExpr([a](double x) { return std::cos(std::numbers::pi * a * x); });
}

// ⟨x, y⟩_θ / ⟨y, y⟩_θ: the factor c with x ≈ c·y
inline double scale_of(const QuadratureRule& r, const Tuple& x, const Tuple& y)
{
    return pairing_theta(r, x, y) / pairing_theta(r, y, y);
}

} // namespace fx
