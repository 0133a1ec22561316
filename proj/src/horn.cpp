#include "parenorm/horn.hpp"

#include <cmath>

#include "parenorm/errors.hpp"

namespace parenorm {

Cplx cylinder_exp(Cplx z) {
    return std::exp(-kTwoPi * z.imag()) * Cplx(std::cos(kTwoPi * z.real()),
                                               std::sin(kTwoPi * z.real()));
}

Cplx cylinder_log(Cplx z) {
    if (z == Cplx(0.0)) throw DomainError("cylinder_log at 0");
    double re = std::arg(z) / kTwoPi;
    if (re < 0.0) re += 1.0;
    if (re >= 1.0) re -= 1.0;
    return Cplx(re, -std::log(std::abs(z)) / kTwoPi);
}

ExtendedCoordinates::ExtendedCoordinates(const UnicriticalGerm& germ)
    : atlas_(germ, 0.0) {
    // anchor: rho(cv) = 0
    const int64_t q = germ.q();
    Cplx z = germ.critical_value();
    for (int64_t s = 0; s <= basin_budget; ++s) {
        if (atlas_.chart(0).contains(z, atlas_.normal_form())) {
            Cplx raw = atlas_.coordinate(0, z, 1e-9);
            c0_ = -(raw - Cplx(double(s / q), 0.0));
            return;
        }
        z = atlas_.germ().eval(z);
        if (std::norm(z) > escape_radius * escape_radius)
            throw ConvergenceError("critical value escaped the basin");
    }
    throw ConvergenceError("critical orbit never reached P_0");
}

RhoResult ExtendedCoordinates::rho(Cplx z, double tol) const {
    const int64_t q = germ().q();
    Cplx cur = z;
    for (int64_t s = 0; s <= basin_budget; ++s) {
        if (atlas_.chart(0).contains(cur, atlas_.normal_form())) {
            int64_t m = s / q, k = s % q;
            Cplx raw = atlas_.coordinate(0, cur, tol);
            return {raw - double(m) + c0_, m, k};
        }
        cur = germ().eval(cur);
        if (std::norm(cur) > escape_radius * escape_radius)
            throw DomainError("rho: point not in the parabolic basin");
    }
    throw ConvergenceError("rho: basin budget exceeded");
}

Cplx ExtendedCoordinates::chi(Cplx w, double tol) const {
    return atlas_.coordinate_inverse(1, w - c1_, tol);
}

bool ExtendedCoordinates::in_basin(Cplx z) const {
    Cplx cur = z;
    for (int64_t s = 0; s <= basin_budget; ++s) {
        if (atlas_.chart(0).contains(cur, atlas_.normal_form())) return true;
        cur = germ().eval(cur);
        if (std::norm(cur) > escape_radius * escape_radius) return false;
    }
    return false;
}

HornMapSampler::HornMapSampler(const UnicriticalGerm& germ) : coords_(germ) {
    int sig = signature(germ.omega());
    summary_.zeta_plus_target = Cplx((1.0 - double(sig)) / 2.0, 0.0);
}

Cplx HornMapSampler::horn(Cplx w, double tol) const {
    return coords_.rho(coords_.chi(w, tol), tol).value;
}

std::optional<Cplx> HornMapSampler::horn_opt(Cplx w, double tol) const {
    try {
        return horn(w, tol);
    } catch (const DomainError&) {
        return std::nullopt;
    } catch (const ConvergenceError&) {
        return std::nullopt;
    }
}

Cplx HornMapSampler::fit_zeta(double im_height, double tol, int points) const {
    Cplx acc(0.0);
    for (int j = 0; j < points; ++j) {
        Cplx w((j + 0.5) / double(points), im_height);
        acc += horn(w, tol) - w;
    }
    return acc / double(points);
}

double HornMapSampler::fit_eta() {
    // the two ends are fitted separately: the zeta_+ gauge leaves the lower
    // component of the domain deeper down than the upper one
    auto end_height = [&](double sign) -> double {
        for (int eta = 1; eta <= 12; ++eta) {
            bool ok = true;
            for (int j = 0; j < 256 && ok; ++j) {
                double x = (j + 0.5) / 256.0;
                if (!horn_opt(Cplx(x, sign * double(eta)), 1e-5)) ok = false;
            }
            if (ok) return double(eta);
        }
        throw ConvergenceError("no strip height up to 12 bounds the horn domain");
    };
    eta_top_ = end_height(+1.0);
    eta_bottom_ = end_height(-1.0);
    return std::max(eta_top_, eta_bottom_);
}

void HornMapSampler::normalize(double tol) {
    // both raw ends are sampled at |Im| = 5 before the gauge shift; the
    // shift itself then moves the usable lower heights further down
    Cplx zeta_plus_raw = fit_zeta(5.0, tol, 64);
    Cplx zeta_minus_raw = fit_zeta(-5.0, tol, 64);
    Cplx shift = zeta_plus_raw - summary_.zeta_plus_target;
    coords_.shift_c1(shift);
    summary_.zeta_plus_fit = fit_zeta(5.0, tol, 64);
    if (std::abs(summary_.zeta_plus_fit - summary_.zeta_plus_target) > 1e-4)
        throw ConvergenceError("zeta_+ normalization did not converge");
    summary_.zeta_minus_fit = zeta_minus_raw - shift;
    eta_ = fit_eta();
    summary_.eta = eta_;

    // multiplier of the top renormalization at 0, read on Im w = 4
    Cplx acc(0.0);
    for (int j = 0; j < 32; ++j) {
        Cplx w((j + 0.5) / 32.0, 4.0);
        acc += cylinder_exp(horn(w, tol) - w);
    }
    summary_.derivative_at_zero = acc / 32.0;

    // bottom multiplier from the lower end, below the fitted strip
    double bottom_height = -std::max(9.0, eta_ + 2.0);
    acc = Cplx(0.0);
    for (int j = 0; j < 32; ++j) {
        Cplx w((j + 0.5) / 32.0, bottom_height);
        acc += cylinder_exp(horn(w, tol) - w);
    }
    lambda_bottom_ = acc / 32.0;
    normalized_ = true;
}

Cplx HornMapSampler::renorm_top(Cplx z, double tol) const {
    if (!normalized_) throw DomainError("renormalization before normalize()");
    if (z == Cplx(0.0)) return Cplx(0.0);
    Cplx w = cylinder_log(z);
    // well past the fitted ends the horn map is a translation
    if (w.imag() > eta_top_ + 3.0)
        return cylinder_exp(w + summary_.zeta_plus_target);
    if (w.imag() < -(eta_bottom_ + 3.0))
        return cylinder_exp(w + summary_.zeta_minus_fit);
    return cylinder_exp(horn(w, tol));
}

Cplx HornMapSampler::renorm_bottom(Cplx z, double tol) const {
    if (!normalized_) throw DomainError("renormalization before normalize()");
    if (z == Cplx(0.0)) return Cplx(0.0);
    Cplx top = renorm_top(1.0 / z, tol);
    if (top == Cplx(0.0)) throw DomainError("bottom renormalization hit a zero");
    return lambda_bottom_ / top;
}

Cplx HornMapSampler::find_critical_point(double tol) const {
    const double delta = 1e-3;
    auto deriv_mag = [&](Cplx w, double use_tol) -> std::optional<double> {
        auto hp = horn_opt(w + delta, use_tol);
        auto hm = horn_opt(w - delta, use_tol);
        if (!hp || !hm) return std::nullopt;
        return std::abs((*hp - *hm) / (2.0 * delta));
    };

    Cplx best_w;
    double best = 1e18;
    for (int iy = 0; iy < 75; ++iy) {
        double y = -2.6 + 5.2 * iy / 74.0;
        for (int ix = 0; ix < 40; ++ix) {
            double x = ix / 40.0;
            auto d = deriv_mag(Cplx(x, y), 1e-4);
            if (d && *d < best) { best = *d; best_w = Cplx(x, y); }
        }
    }
    if (best > 1e17) throw ConvergenceError("horn derivative scan found no domain");

    double step = 0.03;
    for (int round = 0; round < 6; ++round) {
        Cplx center = best_w;
        for (int iy = -2; iy <= 2; ++iy) {
            for (int ix = -2; ix <= 2; ++ix) {
                Cplx w = center + Cplx(ix * step, iy * step);
                auto d = deriv_mag(w, tol);
                if (d && *d < best) { best = *d; best_w = w; }
            }
        }
        step /= 3.0;
    }
    if (best > 0.05)
        throw ConvergenceError("no critical point of the horn map located");
    return best_w;
}

Cplx HornMapSampler::critical_value_estimate(double tol) const {
    return cylinder_exp(horn(find_critical_point(tol), tol));
}

int64_t HornMapSampler::critical_local_degree(double tol) const {
    Cplx w_star = find_critical_point(tol);
    Cplx center = horn(w_star, tol);
    const int samples = 64;
    const double radius = 0.03;
    double total = 0.0;
    double prev = 0.0;
    for (int s = 0; s <= samples; ++s) {
        Cplx w = w_star + std::polar(radius, kTwoPi * s / samples);
        Cplx v = horn(w, tol) - center;
        double ang = std::arg(v);
        if (s > 0) {
            double d = ang - prev;
            if (d > kPi) d -= kTwoPi;
            if (d <= -kPi) d += kTwoPi;
            total += d;
        }
        prev = ang;
    }
    return std::llround(total / kTwoPi);
}

}  // namespace parenorm
