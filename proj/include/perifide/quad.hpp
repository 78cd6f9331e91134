#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <string>

namespace perifide {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class RuleKind { midpoint, trapezoidal, chebyshev2, pointmass };

RuleKind parse_rule_kind(const std::string& s);
std::string to_string(RuleKind k);

struct QuadratureRule {
    RuleKind kind = RuleKind::midpoint;
    double a = 0.0;
    double b = 1.0;
    int n = 1;
    Vec nodes;
    Vec weights;

    int size() const { return static_cast<int>(nodes.size()); }
    bool symmetric() const;
    // index of the node mirrored about 0 (valid only for symmetric rules)
    int mirror(int j) const { return size() - 1 - j; }
};

QuadratureRule build_rule(RuleKind kind, int n, double a, double b);
// Single node at x with unit weight; turns the IDE into a scalar map.
QuadratureRule point_rule(double x = 0.0);

double integrate(const QuadratureRule& r, const Vec& u);
double pairing(const QuadratureRule& r, const Vec& u, const Vec& v);
Vec sample(const QuadratureRule& r, double (*f)(double));

nlohmann::json to_json(const QuadratureRule& r);

} // namespace perifide
