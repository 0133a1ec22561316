#include "parenorm/germ.hpp"

#include <algorithm>
#include <cmath>

#include "parenorm/errors.hpp"

namespace parenorm {

TruncatedSeries TruncatedSeries::identity(int64_t order) {
    TruncatedSeries s(order);
    if (order >= 1) s.c[1] = 1.0;
    return s;
}

TruncatedSeries TruncatedSeries::truncated(int64_t order) const {
    TruncatedSeries out(order);
    int64_t upto = std::min(order, this->order());
    for (int64_t k = 0; k <= upto; ++k) out.c[size_t(k)] = c[size_t(k)];
    return out;
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& rhs) const {
    TruncatedSeries out(std::max(order(), rhs.order()));
    for (int64_t k = 0; k <= out.order(); ++k) out.c[size_t(k)] = coeff(k) + rhs.coeff(k);
    return out;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& rhs) const {
    TruncatedSeries out(std::max(order(), rhs.order()));
    for (int64_t k = 0; k <= out.order(); ++k) out.c[size_t(k)] = coeff(k) - rhs.coeff(k);
    return out;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& rhs) const {
    TruncatedSeries out(std::max(order(), rhs.order()));
    for (int64_t k = 0; k <= out.order(); ++k) {
        Cplx acc(0.0);
        for (int64_t j = std::max<int64_t>(0, k - rhs.order());
             j <= std::min(k, order()); ++j)
            acc += c[size_t(j)] * rhs.c[size_t(k - j)];
        out.c[size_t(k)] = acc;
    }
    return out;
}

TruncatedSeries TruncatedSeries::scaled(Cplx s) const {
    TruncatedSeries out = *this;
    for (auto& v : out.c) v *= s;
    return out;
}

TruncatedSeries TruncatedSeries::compose(const TruncatedSeries& rhs) const {
    if (rhs.coeff(0) != Cplx(0.0))
        throw DomainError("series compose: inner constant term must vanish");
    const int64_t K = std::max(order(), rhs.order());
    // Horner over the outer coefficients
    TruncatedSeries acc(K);
    for (int64_t k = order(); k >= 0; --k) {
        acc = acc * rhs;
        acc.c[0] += c[size_t(k)];
    }
    return acc;
}

TruncatedSeries TruncatedSeries::inverse() const {
    if (coeff(0) != Cplx(0.0) || coeff(1) == Cplx(0.0))
        throw DomainError("series inverse: need c0 = 0, c1 != 0");
    const int64_t K = order();
    TruncatedSeries inv(K);
    inv.c[1] = 1.0 / c[1];
    // fix coefficients order by order so that inv(this(z)) = z
    for (int64_t k = 2; k <= K; ++k) {
        TruncatedSeries probe = inv.compose(truncated(k));
        Cplx c1_inv_pow(1.0);
        for (int64_t j = 0; j < k; ++j) c1_inv_pow *= inv.c[1];
        inv.c[size_t(k)] = -probe.c[size_t(k)] * c1_inv_pow;
    }
    return inv;
}

TruncatedSeries TruncatedSeries::reciprocal() const {
    if (coeff(0) == Cplx(0.0)) throw DomainError("series reciprocal: c0 = 0");
    const int64_t K = order();
    TruncatedSeries out(K);
    out.c[0] = 1.0 / c[0];
    for (int64_t k = 1; k <= K; ++k) {
        Cplx acc(0.0);
        for (int64_t j = 1; j <= k; ++j) acc += coeff(j) * out.c[size_t(k - j)];
        out.c[size_t(k)] = -acc / c[0];
    }
    return out;
}

Cplx TruncatedSeries::eval(Cplx z) const {
    Cplx acc(0.0);
    for (int64_t k = order(); k >= 0; --k) acc = acc * z + c[size_t(k)];
    return acc;
}

namespace {

Cplx cplx_ipow(Cplx base, int64_t e) {
    Cplx acc(1.0);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

// log(1+x) and exp(y)-1 with the rounding of the intermediate 1+x / exp(y)
// divided back out, so small arguments keep full relative accuracy
Cplx log1p_c(Cplx x) {
    Cplx u = 1.0 + x;
    if (u == Cplx(1.0)) return x;
    return std::log(u) * (x / (u - 1.0));
}

Cplx expm1_c(Cplx y) {
    Cplx u = std::exp(y);
    if (u == Cplx(1.0)) return y;
    return (u - 1.0) * (y / std::log(u));
}

}  // namespace

UnicriticalGerm::UnicriticalGerm(int d, Mcf omega, Cplx alpha)
    : d_(d), omega_(std::move(omega)), alpha_(alpha) {
    if (d_ < 2) throw DomainError("germ degree must be >= 2");
    omega_.validate();
    auto [cv, sig] = convergents_and_signature(omega_);
    const int64_t n = omega_.height();
    p_exact_ = cv.p_at(n);
    q_exact_ = cv.q_at(n);
    if (boost::multiprecision::abs(q_exact_) > BigInt(1) << 40)
        throw DomainError("germ: convergent denominator too large for iteration");
    p_ = p_exact_.convert_to<int64_t>();
    q_ = q_exact_.convert_to<int64_t>();
    if (alpha_ == Cplx(0.0)) {
        mu_ = Cplx(make_rat(p_exact_, q_exact_).convert_to<double>(), 0.0);
        lambda_ = unit_exp(make_rat(p_exact_, q_exact_));
    } else {
        mu_ = eval_mu(omega_, alpha_);
        lambda_ = std::exp(-kTwoPi * mu_.imag()) * unit_exp(mu_.real());
    }
}

BigRat UnicriticalGerm::rotation_rational() const {
    if (!parabolic()) throw DomainError("rotation_rational: alpha != 0");
    return make_rat(p_exact_, q_exact_);
}

Cplx UnicriticalGerm::eval(Cplx z) const {
    return lambda_ * (cplx_ipow(z + 1.0, d_) - 1.0) / double(d_);
}

Cplx UnicriticalGerm::derivative(Cplx z) const {
    return lambda_ * cplx_ipow(z + 1.0, d_ - 1);
}

Cplx UnicriticalGerm::eval_q(Cplx z) const {
    for (int64_t j = 0; j < q_; ++j) z = eval(z);
    return z;
}

IterationResult UnicriticalGerm::iterate(Cplx z0, int64_t n, double escape_radius) const {
    IterationResult out{z0, 0, false};
    const double esc2 = escape_radius * escape_radius;
    for (int64_t j = 0; j < n; ++j) {
        if (std::norm(out.z) > esc2) { out.escaped = true; return out; }
        out.z = eval(out.z);
        ++out.steps;
    }
    if (std::norm(out.z) > esc2) out.escaped = true;
    return out;
}

Cplx UnicriticalGerm::local_inverse(Cplx target, Cplx guess, double tol) const {
    constexpr int kMaxIter = 80;
    constexpr double kDerivFloor = 1e-6;
    Cplx w = guess;
    double err = std::abs(eval(w) - target);
    for (int it = 0; it < kMaxIter; ++it) {
        if (err < tol) return w;
        Cplx dh = derivative(w);
        if (std::abs(dh) < kDerivFloor)
            throw DomainError("local_inverse: derivative vanishing near critical point");
        Cplx step = (eval(w) - target) / dh;
        double damp = 1.0;
        for (int back = 0; back < 30; ++back) {
            Cplx trial = w - damp * step;
            double trial_err = std::abs(eval(trial) - target);
            if (trial_err < err) {
                w = trial;
                err = trial_err;
                break;
            }
            damp *= 0.5;
            if (back == 29)
                throw ConvergenceError("local_inverse: damping failed to reduce residual");
        }
    }
    if (err < tol) return w;
    throw ConvergenceError("local_inverse: no convergence within budget");
}

Cplx UnicriticalGerm::preimage_principal(Cplx u) const {
    Cplx s = double(d_) * u / lambda_;
    if (std::abs(1.0 + s) < 0.05)
        return local_inverse(u, u / lambda_, 1e-13);  // near the cut; rare
    return expm1_c(log1p_c(s) / double(d_));
}

TruncatedSeries UnicriticalGerm::h_series(int64_t order) const {
    TruncatedSeries s(order);
    // lambda/d * sum_{k>=1} C(d,k) z^k, truncated; C(d,k) built multiplicatively
    double binom = 1.0;
    for (int64_t k = 1; k <= std::min<int64_t>(order, d_); ++k) {
        binom *= double(d_ - (k - 1)) / double(k);
        s.c[size_t(k)] = lambda_ * binom / double(d_);
    }
    return s;
}

QFoldData UnicriticalGerm::q_fold_series(int64_t order) const {
    if (!parabolic()) throw DomainError("q_fold_series: alpha != 0");
    if (order < 0) order = q_ + 2;
    TruncatedSeries h = h_series(order);
    TruncatedSeries g = TruncatedSeries::identity(order);
    for (int64_t j = 0; j < q_; ++j) g = h.compose(g);
    QFoldData out{g, g.coeff(q_ + 1)};
    if (std::abs(g.coeff(1) - 1.0) > 1e-10)
        throw DegenerateGermError("q-fold series: linear coefficient differs from 1");
    for (int64_t k = 2; k <= q_; ++k)
        if (std::abs(g.coeff(k)) > 1e-10)
            throw DegenerateGermError("q-fold series: non-vanishing low coefficient");
    if (std::abs(out.a) <= 1e-8)
        throw DegenerateGermError("q-fold series: degenerate leading coefficient");
    return out;
}

}  // namespace parenorm
