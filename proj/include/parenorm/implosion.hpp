#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "parenorm/horn.hpp"
#include "parenorm/valley.hpp"

namespace parenorm {

// ============================================================================
// Perturbed dynamics: Lavaurs maps, gate transits, conjugate symmetry, and
// the near-parabolic renormalization step through Koenigs linearizers.
// ============================================================================

// L_delta(z) = chi(rho(z) + delta) over the normalized coordinates of the
// unperturbed germ.
struct LavaursMap {
    std::shared_ptr<const HornMapSampler> base;  // normalized
    Cplx delta;

    Cplx apply(Cplx z, double tol) const;
};

LavaursMap make_lavaurs(const UnicriticalGerm& germ, Cplx delta);

struct LavaursLadderRow {
    int64_t k = 0;
    Cplx alpha;
    double sup_error = 0.0;
};

// For each k: alpha_k = 1/(k - delta), h_k = e^{2 pi i mu_w(alpha_k)} G_d,
// and the error sup_z |h_k^{kq}(z) - L_delta(z)| over the test points.
std::vector<LavaursLadderRow> lavaurs_experiment(int d, const Mcf& omega, Cplx delta,
                                                 const std::vector<int64_t>& k_list,
                                                 const std::vector<Cplx>& points,
                                                 double tol = 1e-8);

// Default test points: a spread across the anchor petal of the base germ.
std::vector<Cplx> lavaurs_default_points(const UnicriticalGerm& germ, int count);

struct GateTransit {
    int64_t m = 0;        // whole q-blocks of the crossing
    int64_t k = 0;        // residual steps
    Cplx z_end;           // first petal-entering point reached
};

// Iterates h_alpha from a petal-exiting start (thresholds read in the
// unperturbed charts) until the orbit is petal-entering on the attracting
// side.  Lemma-style window checks are the caller's business.
GateTransit gate_transit(const UnicriticalGerm& base, Cplx alpha, Cplx z_start,
                         double tol = 1e-8);

// Petal-exiting start points for gate runs, spread over the exit band.
std::vector<Cplx> gate_start_points(const UnicriticalGerm& base, Cplx alpha,
                                    int count, double tol = 1e-8);

// Whether z is petal-exiting / petal-entering for the given alpha, in the
// unperturbed charts of `base`.
bool petal_exiting(const FatouAtlas& atlas, Cplx alpha, Cplx z, double tol);
bool petal_entering(const FatouAtlas& atlas, Cplx alpha, Cplx z, double tol);

// The reflected germ h*(z) = conj(h(conj z)): degree unchanged, word
// conjugated, alpha -> -conj(alpha).
UnicriticalGerm conjugate_germ(const UnicriticalGerm& germ);

// ----------------------------------------------------------------------------
// Koenigs charts for alpha with |(h^q)'(0)| < 1.
// ----------------------------------------------------------------------------

class PerturbedCharts {
  public:
    explicit PerturbedCharts(const UnicriticalGerm& germ);

    const UnicriticalGerm& germ() const { return germ_; }
    Cplx lambda_q() const { return lambda_q_; }
    Cplx log_lambda_q() const { return log_lambda_q_; }
    Cplx sigma() const { return sigma_; }
    Cplx lambda_sigma() const { return lambda_sigma_; }
    const std::vector<Cplx>& fixed_cycle() const { return cycle_; }
    int64_t m0() const { return m0_; }

    // log kappa at the attracting fixed point 0, continued along the orbit
    // of z itself (no branch cuts enter).
    Cplx log_kappa_attr(Cplx z) const;

    // phi_a(z) = log kappa / log lambda_q + c_a, anchored on the critical
    // orbit; branch chosen nearest `hint` when one is supplied.
    Cplx phi_attr(Cplx z) const;
    Cplx phi_attr(Cplx z, Cplx hint) const;

    // Inverse of the repelling coordinate at sigma: seed in the linear disc
    // plus forward blocks.
    Cplx phi_rep_inverse(Cplx w) const;

    // Transition from the repelling to the attracting coordinate:
    // phi_a(h^{mq}(phi_rep_inverse(w))) - m, branch threaded through hint.
    Cplx transition(Cplx w, Cplx hint) const;
    Cplx transition(Cplx w) const;

    Cplx branch_period() const;  // 2 pi i / log lambda_q

    int64_t block_budget = 200'000;

  private:
    Cplx eval_q(Cplx z) const { return germ_.eval_q(z); }

    UnicriticalGerm germ_;
    Cplx lambda_q_, log_lambda_q_;
    Cplx sigma_, lambda_sigma_, log_lambda_sigma_;
    std::vector<Cplx> cycle_;
    Cplx koenigs_c2_attr_;  // first correction of the attracting linearizer
    Cplx koenigs_c2_rep_;
    double r_attr_ = 0.0, seed_scale_ = 0.0;
    Cplx c_attr_{0.0, 0.0};
    int64_t m0_ = 0;
};

struct FiberRenormResult {
    double im_height = 0.0;           // strip height used for the sample
    std::vector<Cplx> grid;           // sampled w values (one period)
    std::vector<Cplx> transition;     // unwrapped transition values
    double periodicity_residual = 0;  // max |G(w+1) - G(w) - 1| over the grid
    Cplx derivative_fit;              // fitted multiplier of Exp o G o Exp^{-1}
};

// Samples the perturbed transition map on a one-period grid at a workable
// strip height (probed automatically when `im_height` is NaN).
FiberRenormResult fiber_renorm_sample(const PerturbedCharts& charts, int points,
                                      double im_height, double tol = 1e-6);

struct SemiconjugacyCheck {
    bool matched = false;
    int64_t m = 0;
    int64_t k = 0;
    double mismatch = 1e18;   // orbit-vs-reconstruction distance at the match
    double window_lo = 0.0;   // Re(1/(4 alpha))
    double window_hi = 0.0;   // Re(7/(4 alpha))
};

// One-turn orbit check: z1 = phi_rep^{-1}(w); the renormalized image pulled
// back by e^{-2 pi i/alpha} determines a target point z2 on the next sheet;
// a direct h_alpha orbit must connect z1 to z2 with m in the window.
SemiconjugacyCheck semiconjugacy_check(const PerturbedCharts& charts, Cplx w,
                                       double match_tol, double tol = 1e-6);

// ----------------------------------------------------------------------------
// Skew product step
// ----------------------------------------------------------------------------

struct SkewStepExact {
    BigRat alpha;
    Side side = Side::plus;
    BigRat angle_next;  // T(alpha)
};

// Exact angle bookkeeping: x = mu_w(alpha) with alpha in A_{1/2}.
SkewStepExact skew_step_exact(const BigRat& x, const Mcf& omega);

struct SkewStepNumeric {
    Cplx alpha;
    Cplx angle_next;
    bool renorm_computed = false;  // in-regime flag (|lambda_q| < 1)
    FiberRenormResult renorm;      // valid when renorm_computed
};

SkewStepNumeric skew_step_numeric(int d, const Mcf& omega, Cplx alpha,
                                  int points = 48, double tol = 1e-6);

}  // namespace parenorm
