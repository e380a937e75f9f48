#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "depmix/innovations.hpp"

namespace depmix {

enum class FilterKind { IidPassthrough, LinearGeometric, TvAR1, TvMA, RandomWalkScenery };

// Coefficient functions of rescaled time are affine, c(t) = c0 + c1*t,
// which keeps filter specifications declarative and serializable.
struct AffineCoef {
    double c0 = 0.0;
    double c1 = 0.0;
    double operator()(double t) const { return c0 + c1 * t; }
    double max_abs() const; // over t in [0,1]
};

// A filter G(t, .) applied to the innovation sequence. All causal kinds are
// linear: G(t, F_i) = sum_{k=0}^{L} c_k(t) eps_{i-k}, with L the truncation
// lag for the infinite-order kinds. RandomWalkScenery is the non-causal
// exception and is evaluated by its own path rule.
struct FilterSpec {
    FilterKind kind = FilterKind::IidPassthrough;
    InnovationLaw innovation;
    double rho = 0.0;                  // LinearGeometric
    AffineCoef ar_coef;                // TvAR1 coefficient function a(t)
    std::vector<AffineCoef> ma_coefs;  // TvMA lags 0..q
    std::int64_t truncation_lag = -1;  // <0 selects the default policy
    bool centered = false;

    static FilterSpec iid_passthrough(InnovationLaw law);
    static FilterSpec linear_geometric(double rho, InnovationLaw law);
    static FilterSpec tv_ar1(AffineCoef coef, InnovationLaw law);
    static FilterSpec tv_ma(std::vector<AffineCoef> coefs, InnovationLaw law);
    static FilterSpec random_walk_scenery();

    void validate() const;

    bool causal() const { return kind != FilterKind::RandomWalkScenery; }
    bool time_varying() const;

    // Highest innovation lag entering an evaluation (resolved truncation).
    std::int64_t effective_lag() const;

    // Fills c_0(t) .. c_L(t); out.size() must be effective_lag()+1.
    void coefs_at(double t, std::span<double> out) const;

    // sup_t sum_{k >= from_lag} |c_k(t)|; the reported truncation tail is
    // coef_tail_sup(effective_lag()+1).
    double coef_tail_sup(std::int64_t from_lag) const;

    // Mean of the uncentered value G(t, F_i); nullopt when the innovation
    // mean does not exist.
    std::optional<double> analytic_mean(double t) const;

    std::string describe() const;
};

// Default truncation: first lag where the geometric tail drops below 1e-12.
std::int64_t default_truncation_lag(double rho_max);

} // namespace depmix
