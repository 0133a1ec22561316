#pragma once

#include <cstdint>
#include <vector>

#include "parenorm/germ.hpp"
#include "parenorm/numtypes.hpp"

namespace parenorm {

// ============================================================================
// Petals and numerical Fatou coordinates for a parabolic germ.
//
// The coordinate is evaluated through a resonant normal form: a polynomial
// change of variables psi with hat_h = psi^{-1} o h o psi carrying only
// z^{jq+1} terms up to the working order.  In the plane w = -1/(q a zeta^q)
// the q-fold map becomes w + 1 + A/w + B/w^2 + C/w^3 + ..., and the Abel
// coordinate has the asymptotic template
//     T(w) = w - A log w + D/w + E/w^2,
//     D = B - A^2 + A/2,  E = (C - A B + A^2 - A/3 - A D + D) / 2.
// Orbits are iterated with the exact polynomial only until |w| is a couple
// of thousand: the template tail there is ~1e-9, while iterating further
// would accumulate rounding at one ulp of w per step.
// ============================================================================

struct ParabolicNormalForm {
    int64_t q = 1;
    Cplx a;               // leading coefficient of hat_h^q at zeta^{q+1}
    Cplx A, B, C;         // w-plane expansion of the q-fold map
    Cplx D, E;            // Abel template corrections at 1/w and 1/w^2
    TruncatedSeries psi;      // normalizing change of variables, tangent to id
    TruncatedSeries psi_inv;  // its series inverse
    TruncatedSeries g_hat;    // hat_h^q
    double r_nf = 0.1;        // radius on which psi / psi_inv are trusted

    Cplx to_normal(Cplx z) const { return psi_inv.eval(z); }
    Cplx from_normal(Cplx zeta) const { return psi.eval(zeta); }
    Cplx w_of(Cplx zeta) const;  // -1/(q a zeta^q)
};

ParabolicNormalForm make_normal_form(const UnicriticalGerm& germ);

enum class PetalKind { attracting, repelling };

struct PetalChart {
    PetalKind kind = PetalKind::attracting;
    int64_t index = 0;   // j in Z/2qZ, even attracting, odd repelling
    int64_t branch = 0;  // which of the q axes of this kind
    double direction = 0.0;  // axis angle in the z plane
    double theta = 0.0;      // Fatou tilt
    double margin = 2.0;     // half-plane offset in the w plane
    double r_cap = 0.5;      // outer radius of the chart

    bool contains(Cplx z, const ParabolicNormalForm& nf) const;
};

// All 2q petal charts of a parabolic germ at one Fatou tilt, with the raw
// (constant-free) coordinate evaluators.  Immutable after construction.
class FatouAtlas {
  public:
    FatouAtlas(const UnicriticalGerm& germ, double theta);

    const UnicriticalGerm& germ() const { return germ_; }
    const ParabolicNormalForm& normal_form() const { return nf_; }
    double theta() const { return theta_; }
    int64_t petal_count() const { return 2 * germ_.q(); }
    int64_t cv_branch() const { return k0_; }

    const PetalChart& chart(int64_t index) const;

    double attracting_direction(int64_t branch) const;
    double repelling_direction(int64_t branch) const;
    int64_t nearest_attracting_branch(Cplx z) const;

    // Petal index of z, or -1 when z is in no chart.
    int64_t locate(Cplx z) const;

    // Raw Abel coordinate on petal j (no additive normalization).
    // Throws DomainError off the petal, ConvergenceError past the budget.
    Cplx coordinate(int64_t j, Cplx z, double tol) const;

    // Point with coordinate(j, .) = w on a repelling petal, via template
    // inversion far out plus forward blocks.
    Cplx coordinate_inverse(int64_t j, Cplx w, double tol) const;

    // Template-seed point for chart j near coordinate value w; approximate
    // (no refinement), intended for generating petal samples.
    Cplx approx_point(int64_t j, Cplx w) const;

    // Asymptotic index law: petal reached from P_j after one extra h step,
    // verified on the tail of the orbit.
    int64_t petal_cycle_check(Cplx z, int64_t j) const;

    // Template and stopping radius, exposed for the horn-map layer.
    Cplx template_value(Cplx w, PetalKind kind) const;
    static double w_stop_for(double tol);

    int64_t iteration_budget = 10'000'000;  // single h steps per evaluation

  private:
    Cplx backward_block(Cplx z, double tol) const;  // one h^{-q} step

    UnicriticalGerm germ_;
    double theta_;
    ParabolicNormalForm nf_;
    int64_t k0_ = 0;
    std::vector<PetalChart> charts_;
};

}  // namespace parenorm
