#pragma once

#include <cstdint>
#include <vector>

#include "parenorm/mcf.hpp"
#include "parenorm/numtypes.hpp"

namespace parenorm {

// ============================================================================
// Truncated power series over complex doubles and the concrete germs
// h = e^{2 pi i mu_w(alpha)} G_d with G_d(z) = ((z+1)^d - 1) / d.
// ============================================================================

// Coefficients c[0..K]; arithmetic is exact convolution truncated at order K.
struct TruncatedSeries {
    std::vector<Cplx> c;

    TruncatedSeries() : c(1, Cplx(0.0)) {}
    explicit TruncatedSeries(int64_t order) : c(size_t(order) + 1, Cplx(0.0)) {}

    int64_t order() const { return int64_t(c.size()) - 1; }
    Cplx coeff(int64_t k) const { return (k >= 0 && k <= order()) ? c[size_t(k)] : Cplx(0.0); }

    static TruncatedSeries identity(int64_t order);

    TruncatedSeries truncated(int64_t order) const;
    TruncatedSeries operator+(const TruncatedSeries& rhs) const;
    TruncatedSeries operator-(const TruncatedSeries& rhs) const;
    TruncatedSeries operator*(const TruncatedSeries& rhs) const;
    TruncatedSeries scaled(Cplx s) const;

    // this(rhs(z)); rhs must have zero constant term
    TruncatedSeries compose(const TruncatedSeries& rhs) const;

    // series g with g(this(z)) = z; requires c0 = 0, c1 != 0
    TruncatedSeries inverse() const;

    // multiplicative reciprocal 1/this; requires c0 != 0
    TruncatedSeries reciprocal() const;

    Cplx eval(Cplx z) const;
};

struct IterationResult {
    Cplx z;
    int64_t steps = 0;
    bool escaped = false;
};

struct QFoldData {
    TruncatedSeries series;  // h^q to the requested order
    Cplx a;                  // coefficient of z^{q+1}
};

class UnicriticalGerm {
  public:
    // alpha = 0 gives the parabolic germ; mu_w(alpha) must stay finite.
    UnicriticalGerm(int d, Mcf omega, Cplx alpha);

    int degree() const { return d_; }
    const Mcf& omega() const { return omega_; }
    Cplx alpha() const { return alpha_; }
    bool parabolic() const { return alpha_ == Cplx(0.0, 0.0); }

    Cplx lambda() const { return lambda_; }
    Cplx rotation_number() const { return mu_; }   // mu_w(alpha)
    BigRat rotation_rational() const;              // exact p/q, alpha = 0 only
    int64_t p() const { return p_; }
    int64_t q() const { return q_; }

    Cplx critical_point() const { return Cplx(-1.0, 0.0); }
    Cplx critical_value() const { return lambda_ * Cplx(-1.0 / d_, 0.0); }

    Cplx eval(Cplx z) const;        // h(z)
    Cplx derivative(Cplx z) const;  // h'(z) = lambda (z+1)^{d-1}
    Cplx eval_q(Cplx z) const;      // h^q(z)

    IterationResult iterate(Cplx z0, int64_t n, double escape_radius) const;

    // Damped Newton solve of h(w) = target from the given guess.  Throws
    // ConvergenceError on budget exhaustion, DomainError when the orbit of
    // the solve drifts into the flat spot at the critical point.
    Cplx local_inverse(Cplx target, Cplx guess, double tol) const;

    // The preimage with z+1 in the principal d-th root sector, in closed
    // form: z = expm1(log1p(d u / lambda)/d).  This is the branch fixing
    // the parabolic point; it is accurate to a few ulp of z itself, which
    // deep backward orbits need (Newton on the polynomial bottoms out at
    // an absolute ~1e-15 from the (z+1)^d - 1 cancellation).
    Cplx preimage_principal(Cplx u) const;

    // Taylor series of h to the requested order.
    TruncatedSeries h_series(int64_t order) const;

    // Series of h^q with the leading-coefficient checks; alpha = 0 only.
    QFoldData q_fold_series(int64_t order = -1) const;

  private:
    int d_;
    Mcf omega_;
    Cplx alpha_;
    Cplx mu_;
    Cplx lambda_;
    int64_t p_ = 0;
    int64_t q_ = 1;
    BigInt p_exact_, q_exact_;
};

}  // namespace parenorm
