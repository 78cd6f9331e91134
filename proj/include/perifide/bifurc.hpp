#pragma once

#include "perifide/cyclic.hpp"

#include <json.hpp>
#include <optional>
#include <string>

namespace perifide {

// A pairing sum together with Σ|summands|, the scale of its zero test.
struct Indicator {
    double value = 0.0;
    double scale = 0.0;
    bool zero() const;
};

// |v| < 1e-6·max(1, scale)
bool is_zero(double v, double scale);

struct Indicators {
    std::optional<Indicator> g01, g11, g20, g30, g02, gbar;
};

// Σ_t ⟨η_{t+1}, D_t⟩ for the named derivative term D_t
Indicator indicator_g01(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e);
Indicator indicator_g11(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e);
Indicator indicator_g20(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e);
Indicator indicator_g30(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e);
Indicator indicator_g02(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e);

// ψ̄ with D1G ψ̄ + [D1²F_t ξ_t²] = 0 and ⟨η, ψ̄⟩_θ = 0
Tuple solve_wbar(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e);
Indicator indicator_gbar(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e,
                         const Tuple& wbar);
// z'(D1²G[ξ, ψ̄]) = Σ_t ⟨η_{t+1}, D1²F_t ξ_t ψ̄_t⟩
double pairing_d11(const Rhs& f, const PeriodicOrbit& o, const EigSequences& e, const Tuple& v);

// Equation of perturbed motion along φ(α) = φ* + (α−α*)ψ + ½(α−α*)²χ:
// F̃_t(u,α) = F_t(u + φ(α)_t, α) − φ(α)_{t+1}.
class PerturbedRhs final : public Rhs {
public:
    PerturbedRhs(const Rhs& base, Tuple phi, double alpha, Tuple psi, Tuple chi = {});

    const QuadratureRule& rule() const override { return base_.rule(); }
    int period() const override { return static_cast<int>(phi_.size()); }

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

private:
    int idx(int t) const;
    Vec phi(int t, double a) const;
    Vec dphi(int t, double a) const;
    Vec ddphi(int t) const;

    const Rhs& base_;
    Tuple phi_, psi_, chi_;
    double alpha_;
};

// Second α-derivative χ of the branch through o with tangent ψ (bordered when D1G is singular).
Tuple solve_branch_curvature(const Rhs& f, const PeriodicOrbit& o, const Tuple& psi,
                             const EigSequences* e = nullptr);

enum class BifKind { fold, transcritical, pitchfork, flip, unclassified };
std::string to_string(BifKind k);

struct BifurcationPoint {
    PeriodicOrbit orbit;      // base orbit at α*
    BifKind kind = BifKind::unclassified;
    std::string criticality;  // "sub" | "super" | ""
    Indicators ind;
    EigSequences eig;         // on the embedded period for flips
    Tuple wbar;
    Tuple tangent;            // branch tangent used by the perturbed motion (if any)
    bool b3 = false;
    bool perturbed = false;
    bool g02_small = true;
    double alpha_ddot = 0.0;  // fold: −g20/g01; pitchfork: −ḡ/(3g11)
    Tuple branch_direction;   // transcritical: −2(g11/g20)ξ
    int morse_center = 0;     // multipliers outside the unit disk, critical one excluded
    cplx critical_multiplier;
    std::string stability_exchange;
    nlohmann::json morse; // per-branch Morse-index verdicts
};

struct ClassifyOptions {
    std::optional<Tuple> tangent; // φ̇(α*) of the branch carrying the orbit
    double multiplier_tol = 1e-4;
};

BifurcationPoint classify(const Rhs& f, const PeriodicOrbit& o, const ClassifyOptions& opt = {});

// repeats the orbit at double period; requires a multiplier near −1
PeriodicOrbit flip_embed(const Rhs& f, const PeriodicOrbit& o, double tol = 1e-4);

// (odd, even) parts by node reflection on a symmetric rule
std::pair<Vec, Vec> parity_decompose(const QuadratureRule& r, const Vec& u);

nlohmann::json to_json(const Indicators& ind);
nlohmann::json to_json(const BifurcationPoint& b);

} // namespace perifide
