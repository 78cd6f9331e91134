#include "perifide/model.hpp"

#include "perifide/error.hpp"
#include "perifide/nystrom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace perifide {

namespace {
constexpr double pi = std::numbers::pi;
}

double Kernel::value(double x, double y, double a) const
{
    const double r = std::abs(x - y);
    switch (kind) {
    case KernelKind::laplace: return 0.5 * a * std::exp(-a * r);
    case KernelKind::gauss: return a / std::sqrt(pi) * std::exp(-a * a * r * r);
    case KernelKind::cosine: return 2 * a * r <= 1 ? 0.5 * pi * a * std::cos(pi * a * r) : 0.0;
    case KernelKind::pointmass: return a;
    }
    return 0.0;
}

double Kernel::d_rate(double x, double y, double a) const
{
    const double r = std::abs(x - y);
    switch (kind) {
    case KernelKind::laplace: return 0.5 * std::exp(-a * r) * (1 - a * r);
    case KernelKind::gauss:
        return std::exp(-a * a * r * r) * (1 - 2 * a * a * r * r) / std::sqrt(pi);
    case KernelKind::cosine:
        if (2 * a * r > 1) return 0.0;
        return 0.5 * pi * std::cos(pi * a * r) - 0.5 * pi * pi * a * r * std::sin(pi * a * r);
    case KernelKind::pointmass: return 1.0;
    }
    return 0.0;
}

double Kernel::d2_rate(double x, double y, double a) const
{
    const double r = std::abs(x - y);
    switch (kind) {
    case KernelKind::laplace: return 0.5 * std::exp(-a * r) * (a * r * r - 2 * r);
    case KernelKind::gauss:
        return std::exp(-a * a * r * r) * (4 * a * a * a * r * r * r * r - 6 * a * r * r) /
               std::sqrt(pi);
    case KernelKind::cosine:
        if (2 * a * r > 1) return 0.0;
        return -pi * pi * r * std::sin(pi * a * r) -
               0.5 * pi * pi * pi * a * r * r * std::cos(pi * a * r);
    case KernelKind::pointmass: return 0.0;
    }
    return 0.0;
}

std::array<double, 4> Growth::eval(double z) const
{
    const double p = param;
    switch (kind) {
    case GrowthKind::identity: return {z, 1, 0, 0};
    case GrowthKind::beverton_holt: {
        const double q = 1 / (1 + z);
        return {z * q, q * q, -2 * q * q * q, 6 * q * q * q * q};
    }
    case GrowthKind::ricker: {
        const double e = std::exp(-z);
        return {z * e, (1 - z) * e, (z - 2) * e, (3 - z) * e};
    }
    case GrowthKind::logistic: return {z * (1 - z), 1 - 2 * z, -2, 0};
    case GrowthKind::hassell: {
        const double q = 1 + z;
        return {z * std::pow(q, -p), (1 + (1 - p) * z) * std::pow(q, -p - 1),
                -p * (2 + (1 - p) * z) * std::pow(q, -p - 2),
                p * (p + 1) * (3 + (1 - p) * z) * std::pow(q, -p - 3)};
    }
    case GrowthKind::allee: {
        const double q = 1 / (1 + z * z);
        return {p * z * z * q, p * 2 * z * q * q, p * (2 - 6 * z * z) * q * q * q,
                p * 24 * z * (z * z - 1) * q * q * q * q};
    }
    case GrowthKind::cubic_flip: return {z * (z * z - 1), 3 * z * z - 1, 6 * z, 6};
    case GrowthKind::quadratic_fold: return {z * z, 2 * z, 2, 0};
    }
    return {0, 0, 0, 0};
}

bool Growth::in_domain(double z) const
{
    switch (kind) {
    case GrowthKind::beverton_holt:
    case GrowthKind::hassell: return z > -1;
    default: return std::isfinite(z);
    }
}

KernelKind parse_kernel_kind(const std::string& s)
{
    if (s == "laplace") return KernelKind::laplace;
    if (s == "gauss") return KernelKind::gauss;
    if (s == "cosine") return KernelKind::cosine;
    if (s == "pointmass") return KernelKind::pointmass;
    throw std::invalid_argument("unknown kernel '" + s + "'");
}

GrowthKind parse_growth_kind(const std::string& s)
{
    if (s == "identity") return GrowthKind::identity;
    if (s == "beverton_holt") return GrowthKind::beverton_holt;
    if (s == "ricker") return GrowthKind::ricker;
    if (s == "logistic") return GrowthKind::logistic;
    if (s == "hassell") return GrowthKind::hassell;
    if (s == "allee") return GrowthKind::allee;
    if (s == "cubic_flip") return GrowthKind::cubic_flip;
    if (s == "quadratic_fold") return GrowthKind::quadratic_fold;
    throw std::invalid_argument("unknown growth '" + s + "'");
}

Order parse_order(const std::string& s)
{
    if (s == "growth_then_dispersal") return Order::growth_then_dispersal;
    if (s == "dispersal_then_growth") return Order::dispersal_then_growth;
    throw std::invalid_argument("unknown order '" + s + "'");
}

Slot parse_slot(const std::string& s)
{
    if (s == "multiplicative") return Slot::multiplicative;
    if (s == "scaled_outer") return Slot::scaled_outer;
    if (s == "additive") return Slot::additive;
    if (s == "kernel_rate") return Slot::kernel_rate;
    throw std::invalid_argument("unknown parameter slot '" + s + "'");
}

std::string to_string(KernelKind k)
{
    switch (k) {
    case KernelKind::laplace: return "laplace";
    case KernelKind::gauss: return "gauss";
    case KernelKind::cosine: return "cosine";
    case KernelKind::pointmass: return "pointmass";
    }
    return "?";
}

std::string to_string(GrowthKind k)
{
    switch (k) {
    case GrowthKind::identity: return "identity";
    case GrowthKind::beverton_holt: return "beverton_holt";
    case GrowthKind::ricker: return "ricker";
    case GrowthKind::logistic: return "logistic";
    case GrowthKind::hassell: return "hassell";
    case GrowthKind::allee: return "allee";
    case GrowthKind::cubic_flip: return "cubic_flip";
    case GrowthKind::quadratic_fold: return "quadratic_fold";
    }
    return "?";
}

std::string to_string(Order o)
{
    return o == Order::growth_then_dispersal ? "growth_then_dispersal" : "dispersal_then_growth";
}

std::string to_string(Slot s)
{
    switch (s) {
    case Slot::multiplicative: return "multiplicative";
    case Slot::scaled_outer: return "scaled_outer";
    case Slot::additive: return "additive";
    case Slot::kernel_rate: return "kernel_rate";
    }
    return "?";
}

Vec Rhs::d1(int t, const Vec& u, double a, const Vec& v) const
{
    return d1_matrix(t, u, a) * v;
}

Vec Rhs::apply_derivative(int t, const Vec& u, double a, int i, int j,
                          const std::vector<Vec>& dirs) const
{
    auto need = [&](std::size_t k) {
        if (dirs.size() < k)
            throw std::invalid_argument("apply_derivative: missing direction vectors");
    };
    if (i == 1 && j == 0) return need(1), d1(t, u, a, dirs[0]);
    if (i == 0 && j == 1) return d2(t, u, a);
    if (i == 2 && j == 0) return need(1), d11(t, u, a, dirs[0], dirs.size() > 1 ? dirs[1] : dirs[0]);
    if (i == 1 && j == 1) return need(1), d12(t, u, a, dirs[0]);
    if (i == 0 && j == 2) return d22(t, u, a);
    if (i == 3 && j == 0) {
        need(1);
        const Vec& v2 = dirs.size() > 1 ? dirs[1] : dirs[0];
        const Vec& v3 = dirs.size() > 2 ? dirs[2] : v2;
        return d111(t, u, a, dirs[0], v2, v3);
    }
    throw std::invalid_argument("apply_derivative: unsupported order (" + std::to_string(i) +
                                "," + std::to_string(j) + ")");
}

struct Model::Point {
    const Vec* w = nullptr;
    const Mat* K = nullptr;
    Mat Kown, Ka;
    Vec h, hu, huu, huuu, ha;
    Vec S, Sa, Saa;
    Vec O, OS, OSS, OSSS, Oa, OSa, Oaa;

    Vec P(const Vec& v) const { return nystrom_apply(*K, *w, hu.cwiseProduct(v)); }
};

Model::Model(ModelSpec spec) : spec_(std::move(spec))
{
    if (spec_.beta.empty()) throw std::invalid_argument("model: empty beta sequence");
    for (double b : spec_.beta)
        if (!(b > 0)) throw std::invalid_argument("model: beta entries must be positive");
    if (spec_.order == Order::growth_then_dispersal) {
        inner_ = spec_.growth;
        outer_ = Growth{GrowthKind::identity, 1.0};
    } else {
        inner_ = Growth{GrowthKind::identity, 1.0};
        outer_ = spec_.growth;
    }
    if (spec_.slot != Slot::kernel_rate) K_ = kernel_at(spec_.kernel.a, 0);
}

double Model::beta(int t) const
{
    const int p = period();
    return spec_.beta[static_cast<std::size_t>(((t % p) + p) % p)];
}

Mat Model::kernel_at(double rate, int drate) const
{
    const Kernel k = spec_.kernel;
    KernelFn f;
    if (drate == 0) f = [k, rate](double x, double y) { return k.value(x, y, rate); };
    else if (drate == 1) f = [k, rate](double x, double y) { return k.d_rate(x, y, rate); };
    else f = [k, rate](double x, double y) { return k.d2_rate(x, y, rate); };
    return kernel_matrix(f, spec_.rule.nodes);
}

Model::Point Model::at(int t, const Vec& u, double a, int order) const
{
    const int N = size();
    if (u.size() != N) throw std::invalid_argument("model: state length mismatch with rule");
    Point p;
    p.w = &spec_.rule.weights;
    const double c = spec_.slot_coef;
    const bool rate = spec_.slot == Slot::kernel_rate;
    Mat Kaa;
    if (rate) {
        p.Kown = kernel_at(c * a, 0);
        p.K = &p.Kown;
        if (order >= 1) {
            p.Ka = c * kernel_at(c * a, 1);
            Kaa = c * c * kernel_at(c * a, 2);
        }
    } else {
        p.K = &K_;
    }

    p.h.resize(N);
    p.hu.resize(N);
    p.huu.resize(N);
    p.huuu.resize(N);
    for (int j = 0; j < N; ++j) {
        if (!inner_.in_domain(u[j])) throw DomainError(j, "growth argument outside domain");
        const auto g = inner_.eval(u[j]);
        p.h[j] = g[0];
        p.hu[j] = g[1];
        p.huu[j] = g[2];
        p.huuu[j] = g[3];
    }
    const bool additive = spec_.slot == Slot::additive;
    if (additive) p.h.array() += c * a;
    p.ha = Vec::Constant(N, additive ? c : 0.0);

    const Mat& K = *p.K;
    const Vec& w = *p.w;
    p.S = nystrom_apply(K, w, p.h);
    if (order >= 1) {
        p.Sa = nystrom_apply(K, w, p.ha);
        p.Saa = Vec::Zero(N);
        if (rate) {
            p.Sa += nystrom_apply(p.Ka, w, p.h);
            p.Saa = nystrom_apply(Kaa, w, p.h) + 2 * nystrom_apply(p.Ka, w, p.ha);
        }
    }

    const double bt = beta(t);
    double A = 1, Ad = 0, B = bt, Bd = 0;
    if (spec_.slot == Slot::multiplicative) {
        B = a * bt;
        Bd = bt;
    } else if (spec_.slot == Slot::scaled_outer) {
        A = a * bt;
        Ad = bt;
        B = 1;
    }
    p.O.resize(N);
    p.OS.resize(N);
    p.OSS.resize(N);
    p.OSSS.resize(N);
    p.Oa.resize(N);
    p.OSa.resize(N);
    p.Oaa.resize(N);
    for (int i = 0; i < N; ++i) {
        const double S = p.S[i];
        const double z = B * S;
        if (!outer_.in_domain(z)) throw DomainError(i, "outer growth argument outside domain");
        const auto G = outer_.eval(z);
        p.O[i] = A * G[0];
        p.OS[i] = A * G[1] * B;
        p.OSS[i] = A * G[2] * B * B;
        p.OSSS[i] = A * G[3] * B * B * B;
        p.Oa[i] = Ad * G[0] + A * G[1] * Bd * S;
        p.OSa[i] = Ad * G[1] * B + A * (G[2] * Bd * S * B + G[1] * Bd);
        p.Oaa[i] = 2 * Ad * G[1] * Bd * S + A * G[2] * Bd * S * Bd * S;
    }
    return p;
}

Vec Model::eval(int t, const Vec& u, double a) const { return at(t, u, a, 0).O; }

Mat Model::d1_matrix(int t, const Vec& u, double a) const
{
    const Point p = at(t, u, a, 0);
    return nystrom_jacobian(*p.K, *p.w, p.OS, p.hu);
}

Vec Model::d1(int t, const Vec& u, double a, const Vec& v) const
{
    const Point p = at(t, u, a, 0);
    return p.OS.cwiseProduct(p.P(v));
}

Vec Model::d2(int t, const Vec& u, double a) const
{
    const Point p = at(t, u, a, 1);
    return p.OS.cwiseProduct(p.Sa) + p.Oa;
}

Vec Model::d11(int t, const Vec& u, double a, const Vec& v, const Vec& w) const
{
    const Point p = at(t, u, a, 0);
    const Vec q = nystrom_apply(*p.K, *p.w, p.huu.cwiseProduct(v).cwiseProduct(w));
    return p.OSS.cwiseProduct(p.P(v)).cwiseProduct(p.P(w)) + p.OS.cwiseProduct(q);
}

Vec Model::d12(int t, const Vec& u, double a, const Vec& v) const
{
    const Point p = at(t, u, a, 1);
    Vec r = (p.OSS.cwiseProduct(p.Sa) + p.OSa).cwiseProduct(p.P(v));
    if (spec_.slot == Slot::kernel_rate)
        r += p.OS.cwiseProduct(nystrom_apply(p.Ka, *p.w, p.hu.cwiseProduct(v)));
    return r;
}

Vec Model::d22(int t, const Vec& u, double a) const
{
    const Point p = at(t, u, a, 1);
    return p.OSS.cwiseProduct(p.Sa.cwiseAbs2()) + 2 * p.OSa.cwiseProduct(p.Sa) + p.Oaa +
           p.OS.cwiseProduct(p.Saa);
}

Vec Model::d111(int t, const Vec& u, double a, const Vec& v1, const Vec& v2,
                const Vec& v3) const
{
    const Point p = at(t, u, a, 0);
    auto Q = [&](const Vec& x, const Vec& y) {
        return nystrom_apply(*p.K, *p.w, p.huu.cwiseProduct(x).cwiseProduct(y));
    };
    const Vec P1 = p.P(v1), P2 = p.P(v2), P3 = p.P(v3);
    const Vec T = nystrom_apply(*p.K, *p.w, p.huuu.cwiseProduct(v1).cwiseProduct(v2).cwiseProduct(v3));
    return p.OSSS.cwiseProduct(P1).cwiseProduct(P2).cwiseProduct(P3) +
           p.OSS.cwiseProduct(P1.cwiseProduct(Q(v2, v3)) + P2.cwiseProduct(Q(v1, v3)) +
                              P3.cwiseProduct(Q(v1, v2))) +
           p.OS.cwiseProduct(T);
}

Vec Model::dual_d1(int t, const Vec& u, double a, const Vec& w) const
{
    const Point p = at(t, u, a, 0);
    const Vec s = p.w->cwiseProduct(p.OS).cwiseProduct(w);
    return p.hu.cwiseProduct(nystrom_apply_transpose(*p.K, s));
}

std::array<double, 4> Model::trivial_coefficients() const
{
    if (!newrhs_form())
        throw Error("unsupported-model", "trivial coefficients need the multiplicative slot");
    const auto g = inner_.eval(0.0);
    const auto G = outer_.eval(0.0);
    if (g[1] == 0 || G[1] == 0)
        throw Error("unsupported-model", "growth has vanishing derivative at 0");
    if (g[2] * G[2] != 0)
        throw Error("unsupported-model", "both growth stages curved at 0");
    return {g[2] / g[1], G[2] / (G[1] * G[1]), g[3] / g[1], G[3] / (G[1] * G[1] * G[1])};
}

Vec Model::to_original(int t, const Vec& ubar, double a) const { return a * beta(t) * ubar; }

Vec Model::from_original(int t, const Vec& u, double a) const { return u / (a * beta(t)); }

nlohmann::json to_json(const ModelSpec& m)
{
    return {{"kernel", to_string(m.kernel.kind)},
            {"a", m.kernel.a},
            {"growth", to_string(m.growth.kind)},
            {"growth_param", m.growth.param},
            {"order", to_string(m.order)},
            {"slot", to_string(m.slot)},
            {"slot_coef", m.slot_coef},
            {"beta", m.beta},
            {"rule", to_json(m.rule)}};
}

} // namespace perifide
