#pragma once

#include "perifide/bifurc.hpp"

#include <json.hpp>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace perifide {

// Unit tangent (z, δ) with ⟨z,z⟩_θ + δ² = 1.
struct Tangent {
    Tuple z;
    double delta = 0.0;
};

struct BranchPoint {
    PeriodicOrbit orbit;
    Tangent tangent;
    int morse_index = 0;
    std::vector<cplx> multipliers; // all, sorted by modulus
    double total_population = 0.0;
    double s = 0.0;
    int corrector_iterations = 0;

    std::vector<cplx> leading(std::size_t k = 4) const;
};

enum class EventKind { fold_detected, crossing_detected };
std::string to_string(EventKind k);

struct BranchEvent {
    EventKind kind = EventKind::fold_detected;
    int index = 0;             // brackets points index and index+1
    cplx multiplier;           // crossing multiplier at the left end
    std::optional<BifurcationPoint> point;
    double s = 0.0;            // localized arclength
    std::string error;         // localization diagnostics
};

struct ContinuationOptions {
    double h = 0.05;
    int k_max = 200;
    int direction = 1; // sign of δ₀
    double alpha_min = -std::numeric_limits<double>::infinity();
    double alpha_max = std::numeric_limits<double>::infinity();
    double h_min_factor = 1.0 / 64;
    double h_max_factor = 4.0;
    int grow_iterations = 3;
    int shrink_iterations = 8;
    double crossing_margin = 1e-9;
    bool detect = true;
    bool localize = true;
    double localize_tol = 1e-8;
    NewtonOptions newton{1e-10, 12, 0};
};

struct Branch {
    std::vector<BranchPoint> points;
    std::vector<BranchEvent> events;
    bool aborted = false;
    std::string stop_reason;
};

// null vector of [D1G | D2G]; δ₀ ≥ 0
Tangent initial_tangent(const Rhs& f, const PeriodicOrbit& o);
// tangent oriented along prev: solves [D1G D2G; prevᵀ] (z,δ) = (0,1) and normalizes
Tangent next_tangent(const Rhs& f, const PeriodicOrbit& o, const Tangent& prev);
// ‖[D1G D2G](z,δ)‖∞
double tangent_residual(const Rhs& f, const PeriodicOrbit& o, const Tangent& t);

struct CorrectorResult {
    PeriodicOrbit orbit;
    bool converged = false;
    int iterations = 0;
};
// Newton on G = 0, ⟨z, φ−φ'⟩_θ + δ(α−α') = 0 starting from the predictor (φ', α')
CorrectorResult correct(const Rhs& f, const Tuple& phi_pred, double alpha_pred, const Tangent& t,
                        const NewtonOptions& opt);

Branch continue_branch(const Rhs& f, const PeriodicOrbit& start,
                       const ContinuationOptions& opt = {});

// bisection on arclength inside the bracket, then classification
BifurcationPoint localize_event(const Rhs& f, const Branch& b, BranchEvent& ev,
                                const ContinuationOptions& opt = {});

// Newton from φ* + εξ̂ with the constraint ⟨ξ̂, φ − φ*⟩_θ = ε (ξ̂ unit)
PeriodicOrbit switch_branch(const Rhs& f, const BifurcationPoint& bp, double eps,
                            const NewtonOptions& opt = {});

nlohmann::json to_json(const BranchEvent& e);
void write_branch_csv(const Branch& b, const std::string& path);

} // namespace perifide
