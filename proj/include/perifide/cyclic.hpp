#pragma once

#include "perifide/model.hpp"

#include <complex>
#include <json.hpp>
#include <vector>

namespace perifide {

using Tuple = std::vector<Vec>;
using cplx = std::complex<double>;

Vec stack(const Tuple& u);
Tuple unstack(const Vec& v, int theta);
Tuple zeros(int theta, int N);
// θ-tuple with every component equal to v
Tuple repeat(const Vec& v, int theta);
// Σ_t ⟨a_t, b_t⟩
double pairing_theta(const QuadratureRule& r, const Tuple& a, const Tuple& b);

struct PeriodicOrbit {
    int theta = 1;
    Tuple states;
    double alpha = 0.0;
    double residual_norm = 0.0;
    int iterations = 0;
};

struct FloquetData {
    std::vector<cplx> multipliers; // sorted by modulus, descending
    std::vector<cplx> raw_eigs;    // eigenvalues μ of D1G
    int morse_index = 0;
    cplx critical;                 // multiplier nearest the unit circle
    bool ambiguous = false;        // a root cluster whose size is not a multiple of θ
};

struct EigSequences {
    Tuple xi;
    Tuple eta;
    double multiplier = 1.0; // Floquet multiplier the sequences belong to (after embedding: +1)
    double xi_residual = 0.0;
    double eta_residual = 0.0;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    int max_halvings = 8;
};

// Component 0 is F_{θ−1}(u_{θ−1}) − u_0, component t+1 is F_t(u_t) − u_{t+1}.
Tuple cyclic_residual(const Rhs& f, const Tuple& u, double a);
Vec cyclic_residual_stacked(const Rhs& f, const Tuple& u, double a);
// D1G as a dense θN×θN block-cyclic matrix
Mat assemble_jacobian(const Rhs& f, const Tuple& u, double a);
// serial reference assembly
Mat assemble_jacobian_serial(const Rhs& f, const Tuple& u, double a);
// D2G stacked by component
Vec d2_stacked(const Rhs& f, const Tuple& u, double a);
// matrix of the dual operator D1G' in the weighted block pairing
Mat dual_matrix(const QuadratureRule& r, const Mat& J);
// weights repeated θ times
Vec block_weights(const QuadratureRule& r, int theta);

PeriodicOrbit solve_periodic(const Rhs& f, const Tuple& initial, double a,
                             const NewtonOptions& opt = {});

std::vector<cplx> group_multipliers(const std::vector<cplx>& raw, int theta, bool* ambiguous);
FloquetData floquet(const Rhs& f, const PeriodicOrbit& orbit);
FloquetData floquet_from_jacobian(const Mat& J, int theta);

// Period-θ product Ξ_θ = D1F_{θ−1}···D1F_0 (test oracle only)
Mat period_matrix(const Rhs& f, const PeriodicOrbit& orbit);

// +1: sequences on the orbit's period; −1: on the doubled period.
EigSequences eig_sequences(const Rhs& f, const PeriodicOrbit& orbit, int target = 1);
// normalizes ⟨ξ,ξ⟩_θ = 1, sign of ξ_0 and ⟨η,ξ⟩_θ = 1
void normalize(const QuadratureRule& r, EigSequences& e);

// ψ solving D1G ψ = −D2G
Tuple solve_tangent(const Rhs& f, const PeriodicOrbit& orbit);
// same system bordered by ⟨η,ψ⟩_θ = 0 for orbits where D1G is singular
Tuple solve_tangent_bordered(const Rhs& f, const PeriodicOrbit& orbit, const EigSequences& e);

double total_population(const QuadratureRule& r, const PeriodicOrbit& orbit);

// repeats the states so that the period doubles
PeriodicOrbit double_period(const PeriodicOrbit& orbit);

// Solves [J b; cᵀ 0][x; μ] = [rhs; 0]. Returns x, stores μ.
Vec bordered_solve(const Mat& J, const Vec& b, const Vec& c, const Vec& rhs, double* mu);

nlohmann::json to_json(const PeriodicOrbit& o);

} // namespace perifide
