#pragma once

#include "perifide/quad.hpp"

#include <array>
#include <json.hpp>
#include <string>
#include <vector>

namespace perifide {

enum class KernelKind { laplace, gauss, cosine, pointmass };

struct Kernel {
    KernelKind kind = KernelKind::laplace;
    double a = 1.0;

    double operator()(double x, double y) const { return value(x, y, a); }
    // value and first two derivatives with respect to the rate a
    double value(double x, double y, double rate) const;
    double d_rate(double x, double y, double rate) const;
    double d2_rate(double x, double y, double rate) const;
};

enum class GrowthKind {
    identity,
    beverton_holt,
    ricker,
    logistic,
    hassell,
    allee,
    cubic_flip,
    quadratic_fold
};

struct Growth {
    GrowthKind kind = GrowthKind::identity;
    double param = 1.0; // hassell exponent c, allee factor

    // {g, g', g'', g'''}
    std::array<double, 4> eval(double z) const;
    bool in_domain(double z) const;
};

// Where growth sits relative to dispersal.
enum class Order { growth_then_dispersal, dispersal_then_growth };

// How the parameter enters. With S = ∫k(·,y;a) h(u(y),α)dy and outer growth G:
//   multiplicative: G(αβ_t S), h = g(u)
//   scaled_outer:   αβ_t G(S), h = g(u)
//   additive:       G(β_t S), h = cα + g(u)
//   kernel_rate:    G(β_t S), h = g(u), kernel rate a = cα
enum class Slot { multiplicative, scaled_outer, additive, kernel_rate };

KernelKind parse_kernel_kind(const std::string& s);
GrowthKind parse_growth_kind(const std::string& s);
Order parse_order(const std::string& s);
Slot parse_slot(const std::string& s);
std::string to_string(KernelKind k);
std::string to_string(GrowthKind k);
std::string to_string(Order o);
std::string to_string(Slot s);

// Interface of a θ₀-periodic Nyström right-hand side with derivatives up to order 3.
class Rhs {
public:
    virtual ~Rhs() = default;
    virtual const QuadratureRule& rule() const = 0;
    virtual int period() const = 0;
    int size() const { return rule().size(); }

    virtual Vec eval(int t, const Vec& u, double a) const = 0;
    virtual Mat d1_matrix(int t, const Vec& u, double a) const = 0;
    virtual Vec d1(int t, const Vec& u, double a, const Vec& v) const;
    virtual Vec d2(int t, const Vec& u, double a) const = 0;
    virtual Vec d11(int t, const Vec& u, double a, const Vec& v, const Vec& w) const = 0;
    virtual Vec d12(int t, const Vec& u, double a, const Vec& v) const = 0;
    virtual Vec d22(int t, const Vec& u, double a) const = 0;
    virtual Vec d111(int t, const Vec& u, double a, const Vec& v1, const Vec& v2,
                     const Vec& v3) const = 0;
    virtual Vec dual_d1(int t, const Vec& u, double a, const Vec& w) const = 0;

    // orders (i,j) in {(1,0),(0,1),(2,0),(1,1),(0,2),(3,0)}
    Vec apply_derivative(int t, const Vec& u, double a, int i, int j,
                         const std::vector<Vec>& dirs = {}) const;
};

struct ModelSpec {
    QuadratureRule rule;
    Kernel kernel;
    Growth growth;
    Order order = Order::growth_then_dispersal;
    Slot slot = Slot::multiplicative;
    double slot_coef = 1.0;
    std::vector<double> beta{1.0};
};

class Model final : public Rhs {
public:
    explicit Model(ModelSpec spec);

    const ModelSpec& spec() const { return spec_; }
    const QuadratureRule& rule() const override { return spec_.rule; }
    int period() const override { return static_cast<int>(spec_.beta.size()); }
    double beta(int t) const;
    const Growth& inner() const { return inner_; }
    const Growth& outer() const { return outer_; }
    // Nyström kernel values k(x_i, x_j) at the model's fixed rate
    const Mat& kernel_values() const { return K_; }

    Vec eval(int t, const Vec& u, double a) const override;
    Mat d1_matrix(int t, const Vec& u, double a) const override;
    Vec d1(int t, const Vec& u, double a, const Vec& v) const override;
    Vec d2(int t, const Vec& u, double a) const override;
    Vec d11(int t, const Vec& u, double a, const Vec& v, const Vec& w) const override;
    Vec d12(int t, const Vec& u, double a, const Vec& v) const override;
    Vec d22(int t, const Vec& u, double a) const override;
    Vec d111(int t, const Vec& u, double a, const Vec& v1, const Vec& v2,
             const Vec& v3) const override;
    Vec dual_d1(int t, const Vec& u, double a, const Vec& w) const override;

    // (c2, d2, c3, d3) of the trivial-branch normal form
    std::array<double, 4> trivial_coefficients() const;
    bool newrhs_form() const { return spec_.slot == Slot::multiplicative; }

    // dispersal-growth change of variables ū_t = u_t/(αβ_t)
    Vec to_original(int t, const Vec& ubar, double a) const;
    Vec from_original(int t, const Vec& u, double a) const;

private:
    struct Point; // derivative data at (t, u, α)
    Point at(int t, const Vec& u, double a, int order) const;
    Mat kernel_at(double a, int drate) const;

    ModelSpec spec_;
    Growth inner_, outer_;
    Mat K_;
};

nlohmann::json to_json(const ModelSpec& m);

} // namespace perifide
