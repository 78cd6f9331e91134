#pragma once

#include "perifide/bifurc.hpp"

#include <array>
#include <vector>

namespace perifide {

struct KOperator {
    Mat matrix;        // G'(0) D3f(x_i, y_j, 0) w_j
    Vec weights;
    bool symmetric_core = true;
};

struct TrivialSpectrum {
    std::vector<double> lambda;  // descending
    std::vector<Vec> xi;         // ⟨ξ,ξ⟩ = 1, positive at the first maximal-magnitude node
    std::vector<double> alpha0;  // 1/(λ_i (β_{θ0−1}···β_0)^{1/θ0})
    std::vector<int> parity;     // 0 even, 1 odd, −1 neither (or asymmetric rule)
};

KOperator build_K(const Model& m);
TrivialSpectrum k_spectrum(const Model& m, const KOperator& K, int count);

// a_t = (α*λ)^t ∏_{r<t} β_r
std::vector<double> trivial_weights(const Model& m, double lambda, double alpha, int theta);
// ξ_t = a_t ξ_0, η_t = a_t^{−1} ξ_0
EigSequences trivial_eig_sequences(const Model& m, const TrivialSpectrum& s, int i, int theta);

struct TrivialIndicators {
    double alpha = 0.0;
    double g11 = 0.0, g20 = 0.0, g30 = 0.0;
};
// closed forms in the normalization of trivial_eig_sequences
TrivialIndicators trivial_indicators(const Model& m, const TrivialSpectrum& s, int i, int theta);

// w̄ = λ^{−θ}𝒦^θ w̄ + ξ_0², ⟨ξ_0, w̄⟩ = 0
Vec solve_fredholm_wbar(const KOperator& K, const TrivialSpectrum& s, int i, int theta);
// ḡ assembled from w̄ and the closed forms
double trivial_gbar(const Model& m, const KOperator& K, const TrivialSpectrum& s, int i, int theta);

// roots ν_0 < ν_1 < … of tan(aLν/2) = 1/ν (even i) and cot(aLν/2) = −1/ν (odd i)
std::vector<double> laplace_roots(double aL, int count);
// autonomous ḡ for odd modes and the unnormalized eigenfunction sin(aνx)
double laplace_gbar_autonomous(double a, double L, int i, const std::array<double, 4>& c);

std::pair<double, double> gauss_radius_bounds(double a, double L);

struct TrivialMode {
    int i = 0;
    double lambda = 0.0;
    double alpha0 = 0.0;
    int parity = -1;
    BifurcationPoint point;
};
// generic classification on the trivial orbit at each α_i⁰
std::vector<TrivialMode> classify_trivial_branch(const Model& m, int count, int theta = 0);

} // namespace perifide
