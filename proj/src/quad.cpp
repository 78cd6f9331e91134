#include "perifide/quad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace perifide {

RuleKind parse_rule_kind(const std::string& s)
{
    if (s == "midpoint") return RuleKind::midpoint;
    if (s == "trapezoidal") return RuleKind::trapezoidal;
    if (s == "chebyshev2") return RuleKind::chebyshev2;
    if (s == "pointmass") return RuleKind::pointmass;
    throw std::invalid_argument("unknown rule kind '" + s + "'");
}

std::string to_string(RuleKind k)
{
    switch (k) {
    case RuleKind::midpoint: return "midpoint";
    case RuleKind::trapezoidal: return "trapezoidal";
    case RuleKind::chebyshev2: return "chebyshev2";
    case RuleKind::pointmass: return "pointmass";
    }
    return "?";
}

bool QuadratureRule::symmetric() const
{
    const int N = size();
    const double tol = 1e-13 * std::max(1.0, std::abs(b - a));
    for (int j = 0; j < N; ++j) {
        if (std::abs(nodes[j] + nodes[N - 1 - j]) > tol) return false;
        if (std::abs(weights[j] - weights[N - 1 - j]) > tol) return false;
    }
    return true;
}

QuadratureRule build_rule(RuleKind kind, int n, double a, double b)
{
    if (n < 1) throw std::invalid_argument("build_rule: n must be positive");
    if (!(a < b)) throw std::invalid_argument("build_rule: degenerate interval");
    if (kind == RuleKind::pointmass) throw std::invalid_argument("build_rule: use point_rule");

    QuadratureRule r;
    r.kind = kind;
    r.a = a;
    r.b = b;
    r.n = n;
    const double h = (b - a) / n;
    std::vector<double> x, w;
    switch (kind) {
    case RuleKind::midpoint:
        for (int j = 1; j <= n; ++j) {
            x.push_back(a + h * (j - 0.5));
            w.push_back(h);
        }
        break;
    case RuleKind::trapezoidal:
        for (int j = 1; j <= n + 1; ++j) {
            x.push_back(j == n + 1 ? b : a + h * (j - 1));
            w.push_back(j == 1 || j == n + 1 ? h / 2 : h);
        }
        break;
    case RuleKind::chebyshev2: {
        // composite two-point Gauss-Legendre; per-subinterval order keeps the list sorted
        const double off = h / (2.0 * std::sqrt(3.0));
        for (int k = 0; k < n; ++k) {
            const double m = a + h * (k + 0.5);
            x.push_back(m - off);
            x.push_back(m + off);
            w.push_back(h / 2);
            w.push_back(h / 2);
        }
        break;
    }
    default: break;
    }
    r.nodes = Eigen::Map<Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
    r.weights = Eigen::Map<Vec>(w.data(), static_cast<Eigen::Index>(w.size()));
    // exact mirror symmetry on symmetric intervals
    if (a == -b) {
        const int N = r.size();
        for (int j = 0; j < N / 2; ++j) {
            const double s = 0.5 * (r.nodes[N - 1 - j] - r.nodes[j]);
            r.nodes[j] = -s;
            r.nodes[N - 1 - j] = s;
        }
        if (N % 2 == 1) r.nodes[N / 2] = 0.0;
    }
    return r;
}

QuadratureRule point_rule(double x)
{
    QuadratureRule r;
    r.kind = RuleKind::pointmass;
    r.a = x;
    r.b = x;
    r.n = 1;
    r.nodes = Vec::Constant(1, x);
    r.weights = Vec::Ones(1);
    return r;
}

static void check_len(const QuadratureRule& r, const Vec& u, const char* op)
{
    if (u.size() != r.size())
        throw std::invalid_argument(std::string(op) + ": length mismatch with rule");
}

double integrate(const QuadratureRule& r, const Vec& u)
{
    check_len(r, u, "integrate");
    return r.weights.dot(u);
}

double pairing(const QuadratureRule& r, const Vec& u, const Vec& v)
{
    check_len(r, u, "pairing");
    check_len(r, v, "pairing");
    return integrate(r, u.cwiseProduct(v));
}

Vec sample(const QuadratureRule& r, double (*f)(double))
{
    return r.nodes.unaryExpr(f);
}

nlohmann::json to_json(const QuadratureRule& r)
{
    return {{"kind", to_string(r.kind)},
            {"a", r.a},
            {"b", r.b},
            {"n", r.n},
            {"nodes", std::vector<double>(r.nodes.data(), r.nodes.data() + r.size())},
            {"weights", std::vector<double>(r.weights.data(), r.weights.data() + r.size())}};
}

} // namespace perifide
