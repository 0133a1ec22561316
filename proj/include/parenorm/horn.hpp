#pragma once

#include <cstdint>
#include <optional>

#include "parenorm/fatou.hpp"
#include "parenorm/germ.hpp"
#include "parenorm/numtypes.hpp"

namespace parenorm {

// ============================================================================
// The coordinate extensions rho (attracting, over the whole basin) and chi
// (repelling, pushed forward), the horn map H = rho o chi, its zeta_+
// normalization, and the top/bottom parabolic renormalizations.
// ============================================================================

// Exp(z) = e^{2 pi i z} and its inverse branch with Re w in [0, 1).
Cplx cylinder_exp(Cplx z);
Cplx cylinder_log(Cplx z);

struct RhoResult {
    Cplx value;
    int64_t blocks = 0;   // m in the landing h^{mq+k}
    int64_t residue = 0;  // k
};

// Fatou coordinates of a parabolic germ extended along orbits, with the
// additive anchors: c0 makes rho(cv) = 0; c1 is adjusted later by the
// zeta_+ normalization of the sampler.
class ExtendedCoordinates {
  public:
    explicit ExtendedCoordinates(const UnicriticalGerm& germ);

    const UnicriticalGerm& germ() const { return atlas_.germ(); }
    const FatouAtlas& atlas() const { return atlas_; }
    Cplx c0() const { return c0_; }
    Cplx c1() const { return c1_; }
    void shift_c1(Cplx delta) { c1_ += delta; }

    // phi_0 of the first landing in P_0 minus the block count.
    // Throws DomainError when the orbit escapes, ConvergenceError on budget.
    RhoResult rho(Cplx z, double tol) const;

    // h^{mq}(phi_1^{-1}(w - c1 - m)); the shift m is chosen internally.
    Cplx chi(Cplx w, double tol) const;

    bool in_basin(Cplx z) const;

    int64_t basin_budget = 400'000;  // h steps allowed before P_0 entry
    double escape_radius = 50.0;

  private:
    FatouAtlas atlas_;
    Cplx c0_{0.0, 0.0};
    Cplx c1_{0.0, 0.0};
};

struct HornSummary {
    double eta = 0.0;            // fitted strip height
    Cplx zeta_plus_target;       // (1 - E(w)) / 2
    Cplx zeta_plus_fit;          // after normalization, should match target
    Cplx zeta_minus_fit;         // reported, not pinned by the normalization
    Cplx derivative_at_zero;     // fitted multiplier of the top renormalization
};

class HornMapSampler {
  public:
    explicit HornMapSampler(const UnicriticalGerm& germ);

    const ExtendedCoordinates& coords() const { return coords_; }
    double eta() const { return eta_; }
    const HornSummary& summary() const { return summary_; }

    // H(w) = rho(chi(w)); 1-periodic; throws when chi(w) leaves the basin.
    Cplx horn(Cplx w, double tol) const;

    // Adjusts c1 so that the fitted limit of H(w) - w at the top end equals
    // (1 - E(w))/2, then refits both ends and the derivative at 0.
    void normalize(double tol = 1e-8);
    bool normalized() const { return normalized_; }

    // Top renormalization Exp o H o Exp^{-1}, fixing 0 and infinity.
    Cplx renorm_top(Cplx z, double tol) const;
    // Bottom renormalization lambda_b / top(1/z) with derivative 1 at 0.
    Cplx renorm_bottom(Cplx z, double tol) const;

    // Locates a critical point of the top renormalization near the unit
    // scale by scanning |H'| over the fundamental strip; returns the
    // critical value Exp(H(w*)).
    Cplx critical_value_estimate(double tol = 1e-6) const;

    // Winding number of H around a small circle at the located critical
    // point; equals the local degree of the renormalized map there.
    int64_t critical_local_degree(double tol = 1e-6) const;

  private:
    Cplx fit_zeta(double im_height, double tol, int points) const;
    double fit_eta();
    std::optional<Cplx> horn_opt(Cplx w, double tol) const;
    Cplx find_critical_point(double tol) const;

    ExtendedCoordinates coords_;
    double eta_ = 0.0;
    double eta_top_ = 0.0;
    double eta_bottom_ = 0.0;
    Cplx lambda_bottom_{1.0, 0.0};
    HornSummary summary_;
    bool normalized_ = false;
};

}  // namespace parenorm
