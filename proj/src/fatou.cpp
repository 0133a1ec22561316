#include "parenorm/fatou.hpp"

#include <algorithm>
#include <cmath>

#include "parenorm/errors.hpp"

namespace parenorm {

namespace {

double angle_diff(double x, double y) {
    double d = std::fmod(x - y, kTwoPi);
    if (d > kPi) d -= kTwoPi;
    if (d <= -kPi) d += kTwoPi;
    return d;
}

Cplx cplx_pow_int(Cplx z, int64_t e) {
    Cplx acc(1.0);
    for (int64_t j = 0; j < e; ++j) acc *= z;
    return acc;
}

constexpr double kMaxTilt = kPi / 13.0 + 1e-9;

}  // namespace

Cplx ParabolicNormalForm::w_of(Cplx zeta) const {
    return -1.0 / (double(q) * a * cplx_pow_int(zeta, q));
}

ParabolicNormalForm make_normal_form(const UnicriticalGerm& germ) {
    if (!germ.parabolic()) throw DomainError("normal form requires alpha = 0");
    const int64_t q = germ.q();
    const int64_t K = 4 * q + 3;
    const Cplx lambda = germ.lambda();
    TruncatedSeries h = germ.h_series(K);

    ParabolicNormalForm nf;
    nf.q = q;
    nf.psi = TruncatedSeries::identity(K);
    if (q > 1) {
        // kill non-resonant orders one by one with tau(z) = z + c z^k
        for (int64_t k = 2; k <= K; ++k) {
            if ((k - 1) % q == 0) continue;
            TruncatedSeries conj =
                nf.psi.inverse().compose(h.compose(nf.psi));
            Cplx e = conj.coeff(k);
            Cplx lam_k(1.0);
            for (int64_t j = 0; j < k; ++j) lam_k *= lambda;
            TruncatedSeries tau = TruncatedSeries::identity(K);
            tau.c[size_t(k)] = e / (lam_k - lambda);
            nf.psi = nf.psi.compose(tau);
        }
    }
    nf.psi_inv = nf.psi.inverse();

    TruncatedSeries h_hat = nf.psi_inv.compose(h.compose(nf.psi));
    TruncatedSeries g = TruncatedSeries::identity(K);
    for (int64_t j = 0; j < q; ++j) g = h_hat.compose(g);
    nf.g_hat = g;
    nf.a = g.coeff(q + 1);
    if (std::abs(nf.a) <= 1e-8)
        throw DegenerateGermError("normal form: degenerate parabolic germ");

    // s(zeta) = g(zeta)/zeta, then P = s^{-q}; only zeta^{jq} powers survive
    TruncatedSeries s(K - 1);
    for (int64_t k = 0; k <= K - 1; ++k) s.c[size_t(k)] = g.coeff(k + 1);
    TruncatedSeries sq = TruncatedSeries::identity(K - 1);
    sq.c[1] = 0.0; sq.c[0] = 1.0;
    for (int64_t j = 0; j < q; ++j) sq = sq * s;
    TruncatedSeries P = sq.reciprocal();
    const Cplx qa = double(q) * nf.a;
    nf.A = P.coeff(2 * q) / (qa * qa);
    nf.B = -P.coeff(3 * q) / (qa * qa * qa);
    nf.C = P.coeff(4 * q) / (qa * qa * qa * qa);
    nf.D = nf.B - nf.A * nf.A + 0.5 * nf.A;
    nf.E = 0.5 * (nf.C - nf.A * nf.B + nf.A * nf.A - nf.A / 3.0 - nf.A * nf.D + nf.D);

    // trust radius for psi: largest scale at which the round trip closes
    double r = 0.6;
    for (const TruncatedSeries* series : {&nf.psi, &nf.psi_inv}) {
        for (int64_t k = 2; k <= K; ++k) {
            double mag = std::abs(series->coeff(k));
            if (mag > 1e-14)
                r = std::min(r, 0.75 * std::pow(1.0 / mag, 1.0 / double(k - 1)));
        }
    }
    for (int tries = 0; tries < 40; ++tries) {
        double worst = 0.0;
        for (int sdx = 0; sdx < 16; ++sdx) {
            Cplx zeta = std::polar(r, kTwoPi * sdx / 16.0);
            worst = std::max(worst,
                             std::abs(nf.psi_inv.eval(nf.psi.eval(zeta)) - zeta));
        }
        if (worst < 1e-11 * std::max(1.0, r)) break;
        r *= 0.8;
        if (tries == 39)
            throw ConvergenceError("normal form: no usable trust radius");
    }
    nf.r_nf = r;
    return nf;
}

bool PetalChart::contains(Cplx z, const ParabolicNormalForm& nf) const {
    if (z == Cplx(0.0)) return false;
    double mag = std::abs(z);
    if (mag > r_cap) return false;
    if (nf.q > 1 &&
        std::abs(angle_diff(std::arg(z), direction)) > kPi / double(nf.q) + 1e-12)
        return false;
    Cplx w = -1.0 / (double(nf.q) * nf.a * cplx_pow_int(z, nf.q));
    double lhs = w.real();
    double rhs = std::tan(theta) * w.imag();
    return kind == PetalKind::attracting ? (lhs > rhs + margin) : (lhs < rhs - margin);
}

FatouAtlas::FatouAtlas(const UnicriticalGerm& germ, double theta)
    : germ_(germ), theta_(theta), nf_(make_normal_form(germ)) {
    if (std::abs(theta_) > kMaxTilt)
        throw DomainError("Fatou tilt outside [-pi/13, pi/13]");
    const int64_t q = germ_.q();
    const double margin = 2.0;

    double r0 = std::min(0.7, std::pow(1.0 / (double(q) * std::abs(nf_.a) * margin),
                                       1.0 / double(q)));

    auto make_chart = [&](PetalKind kind, int64_t branch, double r_cap) {
        PetalChart c;
        c.kind = kind;
        c.branch = branch;
        c.direction = kind == PetalKind::attracting ? attracting_direction(branch)
                                                    : repelling_direction(branch);
        c.theta = theta_;
        c.margin = margin;
        c.r_cap = r_cap;
        return c;
    };

    // largest radius with sampled forward invariance of the attracting petals
    double r_cap = r0;
    for (int shrink = 0; shrink < 24; ++shrink) {
        bool ok = true;
        for (int64_t k = 0; k < q && ok; ++k) {
            PetalChart trial = make_chart(PetalKind::attracting, k, r_cap);
            for (int sdx = 0; sdx < 60 && ok; ++sdx) {
                double rr = r_cap * (0.55 + 0.43 * (sdx % 10) / 9.0);
                double ang = trial.direction +
                             (kPi / double(q)) * (-0.95 + 1.9 * (sdx / 10) / 5.0);
                Cplx z = std::polar(rr, ang);
                if (!trial.contains(z, nf_)) continue;
                if (!trial.contains(germ_.eval_q(z), nf_)) ok = false;
            }
        }
        if (ok) break;
        r_cap *= 0.88;
    }

    std::vector<PetalChart> by_branch;
    for (int64_t k = 0; k < q; ++k) {
        by_branch.push_back(make_chart(PetalKind::attracting, k, r_cap));
        by_branch.push_back(make_chart(PetalKind::repelling, k, r_cap));
    }

    // P_0 is the attracting petal the critical orbit enters first
    Cplx z = germ_.critical_value();
    int64_t k_enter = -1;
    for (int64_t s = 0; s < 1'000'000; ++s) {
        for (int64_t k = 0; k < q; ++k) {
            if (by_branch[size_t(2 * k)].contains(z, nf_)) { k_enter = k; break; }
        }
        if (k_enter >= 0) break;
        z = germ_.eval(z);
        if (std::norm(z) > 2500.0)
            throw ConvergenceError("critical orbit escaped; no anchor petal");
    }
    if (k_enter < 0)
        throw ConvergenceError("critical orbit found no attracting petal");
    k0_ = k_enter;

    charts_.resize(size_t(2 * q));
    for (int64_t k = 0; k < q; ++k) {
        int64_t j = 2 * (((k - k0_) % q + q) % q);
        by_branch[size_t(2 * k)].index = j;
        by_branch[size_t(2 * k + 1)].index = j + 1;
        charts_[size_t(j)] = by_branch[size_t(2 * k)];
        charts_[size_t(j + 1)] = by_branch[size_t(2 * k + 1)];
    }
}

const PetalChart& FatouAtlas::chart(int64_t index) const {
    if (index < 0 || index >= petal_count()) throw DomainError("petal index out of range");
    return charts_[size_t(index)];
}

double FatouAtlas::attracting_direction(int64_t branch) const {
    double base = (kPi - std::arg(nf_.a)) / double(germ_.q());
    return angle_diff(base + kTwoPi * double(branch) / double(germ_.q()), 0.0);
}

double FatouAtlas::repelling_direction(int64_t branch) const {
    return angle_diff(attracting_direction(branch) + kPi / double(germ_.q()), 0.0);
}

int64_t FatouAtlas::nearest_attracting_branch(Cplx z) const {
    const int64_t q = germ_.q();
    int64_t best = 0;
    double best_diff = 1e9;
    for (int64_t k = 0; k < q; ++k) {
        double d = std::abs(angle_diff(std::arg(z), attracting_direction(k)));
        if (d < best_diff) { best_diff = d; best = k; }
    }
    return best;
}

int64_t FatouAtlas::locate(Cplx z) const {
    for (const auto& c : charts_)
        if (c.contains(z, nf_)) return c.index;
    return -1;
}

double FatouAtlas::w_stop_for(double tol) {
    // below: template tail dominates; above: one ulp of w per orbit step does
    return std::clamp(std::cbrt(60.0 / std::max(tol, 1e-14)), 800.0, 1500.0);
}

Cplx FatouAtlas::template_value(Cplx w, PetalKind kind) const {
    // repelling branch cut sits on the positive axis; the additive gauge is
    // symmetric so Ecalle heights match raw w-plane heights on both ends
    Cplx logw = kind == PetalKind::attracting ? std::log(w) : std::log(-w);
    return w - nf_.A * logw + nf_.D / w + nf_.E / (w * w);
}

Cplx FatouAtlas::backward_block(Cplx z, double /*tol*/) const {
    Cplx u = z;
    for (int64_t j = 0; j < germ_.q(); ++j) u = germ_.preimage_principal(u);
    return u;
}

Cplx FatouAtlas::coordinate(int64_t j, Cplx z, double tol) const {
    const PetalChart& c = chart(j);
    if (!c.contains(z, nf_))
        throw DomainError("coordinate: point outside petal " + std::to_string(j));
    const double w_stop = w_stop_for(tol);
    const double enter_radius = 0.7 * nf_.r_nf;
    const int64_t q = germ_.q();
    int64_t steps = 0;
    int64_t blocks = 0;
    Cplx cur = z;

    auto advance = [&](int64_t n_blocks) {
        for (int64_t b = 0; b < n_blocks; ++b) {
            cur = c.kind == PetalKind::attracting ? germ_.eval_q(cur)
                                                  : backward_block(cur, tol);
            ++blocks;
            steps += q;
            if (steps > iteration_budget)
                throw ConvergenceError("coordinate: iteration budget exceeded");
        }
    };

    while (std::abs(cur) > enter_radius) {
        advance(1);
        if (c.kind == PetalKind::repelling && std::abs(cur) > 1.2 * c.r_cap)
            throw ConvergenceError("coordinate: backward orbit left the petal");
    }
    Cplx w = nf_.w_of(nf_.to_normal(cur));
    while (std::abs(w) < w_stop) {
        auto jump = int64_t(std::ceil(w_stop - std::abs(w))) + 8;
        advance(std::max<int64_t>(jump, 64));
        w = nf_.w_of(nf_.to_normal(cur));
    }
    Cplx base = template_value(w, c.kind);
    return c.kind == PetalKind::attracting ? base - double(blocks)
                                           : base + double(blocks);
}

Cplx FatouAtlas::coordinate_inverse(int64_t j, Cplx w, double tol) const {
    const PetalChart& c = chart(j);
    if (c.kind != PetalKind::repelling)
        throw DomainError("coordinate_inverse: repelling charts only");
    const int64_t q = germ_.q();
    // smallest shift that puts the target safely inside the petal image AND
    // inside the normal-form trust radius; the connecting orbit then follows
    // the natural path of the extension, so the only corner crossing is the
    // one the requested endpoint itself demands
    const double w_min_nf =
        1.0 / (double(q) * std::abs(nf_.a) * std::pow(0.7 * nf_.r_nf, double(q)));
    const double depth = std::max(c.margin + 4.0, w_min_nf);
    const int64_t m = std::max<int64_t>(0, int64_t(std::ceil(w.real() + depth)));
    const Cplx v = w - double(m);

    // template inversion: exact enough far out, a seed otherwise
    Cplx x = v;
    for (int it = 0; it < 60; ++it) {
        Cplx res = template_value(x, PetalKind::repelling) - v;
        if (std::abs(res) < 1e-13 * (1.0 + std::abs(v))) break;
        Cplx deriv = 1.0 - nf_.A / x - nf_.D / (x * x) - 2.0 * nf_.E / (x * x * x);
        x -= res / deriv;
        if (it == 59) throw ConvergenceError("coordinate_inverse: template solve stalled");
    }
    Cplx zeta_q = -1.0 / (double(q) * nf_.a * x);
    double mag = std::pow(std::abs(zeta_q), 1.0 / double(q));
    double base_ang = std::arg(zeta_q) / double(q);
    double best_diff = 1e9;
    Cplx zeta;
    for (int64_t l = 0; l < q; ++l) {
        double ang = base_ang + kTwoPi * double(l) / double(q);
        double d = std::abs(angle_diff(ang, c.direction));
        if (d < best_diff) { best_diff = d; zeta = std::polar(mag, ang); }
    }
    Cplx z = nf_.from_normal(zeta);

    if (std::abs(v) < w_stop_for(tol)) {
        // close in the template is not at tolerance; polish against the true
        // coordinate, whose error budget the result then inherits
        if (!c.contains(z, nf_))
            throw ConvergenceError("coordinate_inverse: seed left the petal");
        for (int it = 0; it < 16; ++it) {
            Cplx res = coordinate(j, z, tol) - v;
            if (std::abs(res) < std::max(tol, 1e-10)) break;
            Cplx zt = nf_.to_normal(z);
            Cplx w_raw = nf_.w_of(zt);
            Cplx dT = 1.0 - nf_.A / w_raw - nf_.D / (w_raw * w_raw) -
                      2.0 * nf_.E / (w_raw * w_raw * w_raw);
            Cplx psi_prime(0.0);
            for (int64_t k = 1; k <= nf_.psi.order(); ++k)
                psi_prime += double(k) * nf_.psi.coeff(k) * cplx_pow_int(zt, k - 1);
            Cplx step = res / (dT * (-double(q)) * w_raw / (zt * psi_prime));
            // damp: the trial must stay on the chart
            for (int back = 0; back < 8; ++back) {
                if (c.contains(z - step, nf_)) break;
                step *= 0.5;
                if (back == 7)
                    throw ConvergenceError("coordinate_inverse: step left the petal");
            }
            z -= step;
            if (it == 15)
                throw ConvergenceError("coordinate_inverse: refinement stalled");
        }
    }
    if (m * q > iteration_budget)
        throw ConvergenceError("coordinate_inverse: shift exceeds budget");
    for (int64_t b = 0; b < m; ++b) z = germ_.eval_q(z);
    return z;
}

Cplx FatouAtlas::approx_point(int64_t j, Cplx w) const {
    const PetalChart& c = chart(j);
    const int64_t q = germ_.q();
    Cplx zeta_q = -1.0 / (double(q) * nf_.a * w);
    double mag = std::pow(std::abs(zeta_q), 1.0 / double(q));
    double base_ang = std::arg(zeta_q) / double(q);
    double best_diff = 1e9;
    Cplx zeta;
    for (int64_t l = 0; l < q; ++l) {
        double ang = base_ang + kTwoPi * double(l) / double(q);
        double d = std::abs(angle_diff(ang, c.direction));
        if (d < best_diff) { best_diff = d; zeta = std::polar(mag, ang); }
    }
    return nf_.from_normal(zeta);
}

int64_t FatouAtlas::petal_cycle_check(Cplx z, int64_t j) const {
    const PetalChart& c = chart(j);
    if (c.kind != PetalKind::attracting)
        throw DomainError("petal_cycle_check: start petal must be attracting");
    if (!c.contains(z, nf_)) throw DomainError("petal_cycle_check: point outside petal");
    Cplx cur = germ_.eval(z);  // h^{0 q + 1}
    int64_t last = -2, streak = 0;
    const int64_t max_blocks = 200'000;
    for (int64_t n = 0; n < max_blocks; ++n) {
        int64_t idx = locate(cur);
        if (idx >= 0) {
            if (idx == last) ++streak;
            else { last = idx; streak = 1; }
            if (streak >= 3) return idx;
        }
        cur = germ_.eval_q(cur);
        if (std::norm(cur) > 2500.0)
            throw ConvergenceError("petal_cycle_check: orbit escaped");
    }
    throw ConvergenceError("petal_cycle_check: no stable petal index");
}

}  // namespace parenorm
