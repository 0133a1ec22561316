#include "parenorm/implosion.hpp"

#include <cmath>
#include <limits>

#include "parenorm/errors.hpp"

namespace parenorm {

namespace {

Cplx principal_ratio_log(Cplx next, Cplx cur) { return std::log(next / cur); }

}  // namespace

Cplx LavaursMap::apply(Cplx z, double tol) const {
    const ExtendedCoordinates& coords = base->coords();
    return coords.chi(coords.rho(z, tol).value + delta, tol);
}

LavaursMap make_lavaurs(const UnicriticalGerm& germ, Cplx delta) {
    auto sampler = std::make_shared<HornMapSampler>(germ);
    sampler->normalize(1e-8);
    return LavaursMap{std::move(sampler), delta};
}

std::vector<Cplx> lavaurs_default_points(const UnicriticalGerm& germ, int count) {
    FatouAtlas atlas(germ, 0.0);
    std::vector<Cplx> points;
    int tries = 0;
    while (int(points.size()) < count && tries < 40 * count) {
        double t = double(tries++);
        Cplx w(6.0 + std::fmod(1.7 * t, 11.0), -2.0 + std::fmod(0.9 * t, 4.0));
        Cplx z = atlas.approx_point(0, w);
        if (atlas.chart(0).contains(z, atlas.normal_form())) points.push_back(z);
    }
    if (int(points.size()) < count)
        throw ConvergenceError("could not place Lavaurs test points in the petal");
    return points;
}

std::vector<LavaursLadderRow> lavaurs_experiment(int d, const Mcf& omega, Cplx delta,
                                                 const std::vector<int64_t>& k_list,
                                                 const std::vector<Cplx>& points,
                                                 double tol) {
    UnicriticalGerm base(d, omega, Cplx(0.0));
    LavaursMap lavaurs = make_lavaurs(base, delta);
    std::vector<Cplx> expected;
    expected.reserve(points.size());
    for (Cplx z : points) expected.push_back(lavaurs.apply(z, tol));

    std::vector<LavaursLadderRow> rows;
    for (int64_t k : k_list) {
        Cplx alpha = 1.0 / (double(k) - delta);
        if (!AngleSector{1.0, Side::plus}.contains(alpha))
            throw DomainError("lavaurs_experiment: alpha_k outside the plus sector");
        UnicriticalGerm perturbed(d, omega, alpha);
        double sup = 0.0;
        for (size_t i = 0; i < points.size(); ++i) {
            Cplx z = points[i];
            for (int64_t s = 0; s < k * base.q(); ++s) {
                z = perturbed.eval(z);
                if (std::norm(z) > 2500.0)
                    throw ConvergenceError("lavaurs_experiment: orbit escaped");
            }
            sup = std::max(sup, std::abs(z - expected[i]));
        }
        rows.push_back({k, alpha, sup});
    }
    return rows;
}

bool petal_exiting(const FatouAtlas& atlas, Cplx alpha, Cplx z, double tol) {
    const PetalChart& chart = atlas.chart(1);
    if (!chart.contains(z, atlas.normal_form())) return false;
    double quarter = (Cplx(1.0) / (4.0 * alpha)).real();
    Cplx phi = atlas.coordinate(1, z, tol);
    return phi.real() > -quarter - chart.margin;
}

bool petal_entering(const FatouAtlas& atlas, Cplx alpha, Cplx z, double tol) {
    double quarter = (Cplx(1.0) / (4.0 * alpha)).real();
    for (int64_t j = 0; j < atlas.petal_count(); j += 2) {
        const PetalChart& chart = atlas.chart(j);
        if (!chart.contains(z, atlas.normal_form())) continue;
        Cplx phi = atlas.coordinate(j, z, tol);
        return phi.real() < chart.margin + quarter;
    }
    return false;
}

GateTransit gate_transit(const UnicriticalGerm& base, Cplx alpha, Cplx z_start,
                         double tol) {
    if (!base.parabolic()) throw DomainError("gate_transit: base germ must have alpha 0");
    FatouAtlas atlas(base, 0.0);
    if (!petal_exiting(atlas, alpha, z_start, tol))
        throw DomainError("gate_transit: start point is not petal-exiting");
    UnicriticalGerm perturbed(base.degree(), base.omega(), alpha);
    const int64_t q = base.q();
    double crossing = (Cplx(1.0) / alpha).real();
    const int64_t budget = int64_t(std::ceil(4.0 * crossing + 1000.0)) * q;
    Cplx z = z_start;
    for (int64_t s = 1; s <= budget; ++s) {
        z = perturbed.eval(z);
        if (std::norm(z) > 2500.0)
            throw ConvergenceError("gate_transit: orbit escaped the gate");
        if (petal_entering(atlas, alpha, z, tol))
            return GateTransit{s / q, s % q, z};
    }
    throw ConvergenceError("gate_transit: budget exceeded before entry");
}

std::vector<Cplx> gate_start_points(const UnicriticalGerm& base, Cplx alpha,
                                    int count, double tol) {
    FatouAtlas atlas(base, 0.0);
    double quarter = (Cplx(1.0) / (4.0 * alpha)).real();
    const double margin = atlas.chart(1).margin;
    std::vector<Cplx> points;
    int tries = 0;
    while (int(points.size()) < count && tries < 30 * count) {
        double t = double(tries++);
        double depth = margin + 0.5 + std::fmod(0.23 * t, 0.8) * (quarter - 1.0);
        Cplx w(-depth, -1.5 + std::fmod(0.71 * t, 3.0));
        try {
            Cplx z = atlas.coordinate_inverse(1, w, tol);
            if (petal_exiting(atlas, alpha, z, tol)) points.push_back(z);
        } catch (const ConvergenceError&) {
        }
    }
    if (int(points.size()) < count)
        throw ConvergenceError("gate_start_points: exit band sampling failed");
    return points;
}

UnicriticalGerm conjugate_germ(const UnicriticalGerm& germ) {
    return UnicriticalGerm(germ.degree(), conjugate(germ.omega()),
                           -std::conj(germ.alpha()));
}

// ----------------------------------------------------------------------------
// PerturbedCharts
// ----------------------------------------------------------------------------

PerturbedCharts::PerturbedCharts(const UnicriticalGerm& germ) : germ_(germ) {
    if (germ_.parabolic()) throw DomainError("perturbed charts need alpha != 0");
    const int64_t q = germ_.q();

    // zeta_0 = q mu - p by the exact Moebius identity alpha/(q + E alpha q_{n-1})
    auto [cv_tables, sig] = convergents_and_signature(germ_.omega());
    Cplx q_prev = Cplx(to_double(cv_tables.q_at(germ_.omega().height() - 1)), 0.0);
    Cplx zeta0 = germ_.alpha() /
                 (double(germ_.q()) + double(sig) * germ_.alpha() * q_prev);
    if (zeta0.imag() <= 0.0)
        throw DomainError("perturbed charts: (h^q)'(0) is not attracting");
    log_lambda_q_ = Cplx(0.0, kTwoPi) * zeta0;
    lambda_q_ = std::exp(log_lambda_q_);

    // low-order series of h^q for the linearizer correction and the seeds
    TruncatedSeries hq = germ_.h_series(q + 2);
    TruncatedSeries g = TruncatedSeries::identity(q + 2);
    for (int64_t j = 0; j < q; ++j) g = hq.compose(g);
    Cplx g2 = g.coeff(2);
    koenigs_c2_attr_ = (q >= 2 && std::abs(g2) < 1e-14)
                           ? Cplx(0.0)
                           : g2 / (lambda_q_ - lambda_q_ * lambda_q_);
    Cplx a_pert = g.coeff(q + 1);

    // nonzero fixed points of h^q near 0
    Cplx seed_pow = Cplx(0.0, -kTwoPi) * zeta0 / a_pert;
    double mag = std::pow(std::abs(seed_pow), 1.0 / double(q));
    double base_ang = std::arg(seed_pow) / double(q);
    for (int64_t l = 0; l < q; ++l) {
        Cplx z = std::polar(mag, base_ang + kTwoPi * double(l) / double(q));
        for (int it = 0; it < 80; ++it) {
            Cplx val = germ_.eval_q(z) - z;
            Cplx deriv(1.0);
            Cplx cur = z;
            for (int64_t j = 0; j < q; ++j) {
                deriv *= germ_.derivative(cur);
                cur = germ_.eval(cur);
            }
            Cplx step = val / (deriv - 1.0);
            z -= step;
            if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
            if (it == 79)
                throw ConvergenceError("perturbed charts: fixed point solve stalled");
        }
        cycle_.push_back(z);
    }

    // chart fixed point: the one along the unperturbed repelling axis of P_1
    UnicriticalGerm base(germ_.degree(), germ_.omega(), Cplx(0.0));
    FatouAtlas base_atlas(base, 0.0);
    double target_dir = base_atlas.chart(1).direction;
    double best = 1e18;
    for (Cplx z : cycle_) {
        double d = std::abs(std::remainder(std::arg(z) - target_dir, kTwoPi));
        if (d < best) { best = d; sigma_ = z; }
    }

    Cplx deriv(1.0);
    Cplx cur = sigma_;
    for (int64_t j = 0; j < q; ++j) {
        deriv *= germ_.derivative(cur);
        cur = germ_.eval(cur);
    }
    lambda_sigma_ = deriv;
    log_lambda_sigma_ = std::log(lambda_sigma_);
    if (std::abs(lambda_sigma_) <= 1.0)
        throw ConvergenceError("perturbed charts: sigma is not repelling");

    // second coefficient of h^q at sigma by central differences
    double fd = 1e-5 * std::abs(sigma_);
    Cplx second = (germ_.eval_q(sigma_ + fd) - 2.0 * germ_.eval_q(sigma_) +
                   germ_.eval_q(sigma_ - fd)) /
                  (fd * fd);
    koenigs_c2_rep_ =
        0.5 * second / (lambda_sigma_ - lambda_sigma_ * lambda_sigma_);

    r_attr_ = 0.2 * std::abs(sigma_);
    seed_scale_ = 1e-6 * std::abs(sigma_);

    // anchor on the critical orbit: minimal m0 with the orbit inside the
    // attracting entry disc, where the coordinate equals m0
    Cplx z = germ_.critical_value();
    int64_t m = 0;
    while (std::abs(z) > r_attr_) {
        z = eval_q(z);
        ++m;
        if (std::norm(z) > 2500.0)
            throw ConvergenceError("perturbed charts: critical orbit escaped");
        if (m > block_budget)
            throw ConvergenceError("perturbed charts: critical orbit anchor budget");
    }
    m0_ = m;
    c_attr_ = Cplx(double(m0_), 0.0) - log_kappa_attr(z) / log_lambda_q_;
}

Cplx PerturbedCharts::log_kappa_attr(Cplx z) const {
    if (z == Cplx(0.0)) throw DomainError("log_kappa_attr at the fixed point");
    Cplx lg = std::log(z);
    Cplx cur = z;
    int64_t n = 0;
    const double stop = std::max(1e-5 * std::abs(sigma_), 1e-13);
    while (std::abs(cur) > stop) {
        Cplx next = eval_q(cur);
        lg += principal_ratio_log(next, cur);
        cur = next;
        if (++n > block_budget)
            throw ConvergenceError("log_kappa_attr: block budget exceeded");
    }
    // first-order linearizer correction at the stopping point
    lg += std::log(Cplx(1.0) + koenigs_c2_attr_ * cur);
    return lg - double(n) * log_lambda_q_;
}

Cplx PerturbedCharts::phi_attr(Cplx z) const {
    return log_kappa_attr(z) / log_lambda_q_ + c_attr_;
}

Cplx PerturbedCharts::phi_attr(Cplx z, Cplx hint) const {
    Cplx raw = phi_attr(z);
    Cplx period = branch_period();
    double k = std::round(((hint - raw) / period).real());
    return raw + k * period;
}

Cplx PerturbedCharts::branch_period() const {
    return Cplx(0.0, kTwoPi) / log_lambda_q_;
}

Cplx PerturbedCharts::phi_rep_inverse(Cplx w) const {
    Cplx target_log = log_lambda_sigma_ * w;  // log kappa_r of the result
    double log_gain = std::log(std::abs(lambda_sigma_));
    int64_t m = std::max<int64_t>(
        0, int64_t(std::ceil((target_log.real() - std::log(seed_scale_)) / log_gain)));
    Cplx v = std::exp(target_log - double(m) * log_lambda_sigma_);
    Cplx z = sigma_ + v - koenigs_c2_rep_ * v * v;
    for (int64_t b = 0; b < m; ++b) {
        z = eval_q(z);
        if (std::norm(z) > 2500.0)
            throw ConvergenceError("phi_rep_inverse: seed transport escaped");
    }
    return z;
}

Cplx PerturbedCharts::transition(Cplx w, Cplx hint) const {
    Cplx z = phi_rep_inverse(w);
    int64_t m = 0;
    while (std::abs(z) > r_attr_) {
        z = eval_q(z);
        if (std::norm(z) > 2500.0)
            throw DomainError("transition: orbit left the gate region");
        if (++m > block_budget)
            throw ConvergenceError("transition: block budget exceeded");
    }
    return phi_attr(z, hint + double(m)) - double(m);
}

Cplx PerturbedCharts::transition(Cplx w) const {
    Cplx z = phi_rep_inverse(w);
    int64_t m = 0;
    while (std::abs(z) > r_attr_) {
        z = eval_q(z);
        if (std::norm(z) > 2500.0)
            throw DomainError("transition: orbit left the gate region");
        if (++m > block_budget)
            throw ConvergenceError("transition: block budget exceeded");
    }
    return phi_attr(z) - double(m);
}

FiberRenormResult fiber_renorm_sample(const PerturbedCharts& charts, int points,
                                      double im_height, double tol) {
    (void)tol;
    double height = im_height;
    if (std::isnan(height)) {
        bool found = false;
        for (double probe : {2.0, 1.5, 2.5, 3.0, 1.0, 3.5, -2.0, -1.5, -2.5, -3.0}) {
            bool ok = true;
            for (int j = 0; j < 8 && ok; ++j) {
                try {
                    charts.transition(Cplx((j + 0.5) / 8.0, probe));
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (ok) { height = probe; found = true; break; }
        }
        if (!found)
            throw ConvergenceError("fiber_renorm_sample: no workable strip height");
    }

    FiberRenormResult out;
    out.im_height = height;
    out.grid.reserve(size_t(points));
    out.transition.reserve(size_t(points));
    Cplx hint;
    bool have_hint = false;
    for (int j = 0; j < points; ++j) {
        Cplx w(double(j) / points, height);
        Cplx value = have_hint ? charts.transition(w, hint + Cplx(1.0 / points, 0.0))
                               : charts.transition(w);
        out.grid.push_back(w);
        out.transition.push_back(value);
        hint = value;
        have_hint = true;
    }
    double worst = 0.0;
    Cplx deriv_acc(0.0);
    for (int j = 0; j < points; ++j) {
        Cplx w = out.grid[size_t(j)];
        Cplx shifted = charts.transition(w + 1.0, out.transition[size_t(j)] + 1.0);
        worst = std::max(worst,
                         std::abs(shifted - out.transition[size_t(j)] - 1.0));
        deriv_acc += cylinder_exp(out.transition[size_t(j)] - w);
    }
    out.periodicity_residual = worst;
    out.derivative_fit = deriv_acc / double(points);
    return out;
}

SemiconjugacyCheck semiconjugacy_check(const PerturbedCharts& charts, Cplx w,
                                       double match_tol, double tol) {
    (void)tol;
    SemiconjugacyCheck out;
    Cplx alpha = charts.germ().alpha();
    Cplx inv_alpha = 1.0 / alpha;
    out.window_lo = (0.25 * inv_alpha).real();
    out.window_hi = (1.75 * inv_alpha).real();

    Cplx z1 = charts.phi_rep_inverse(w);
    Cplx g_w = charts.transition(w);
    // representative of the renormalized image on the next turn of the
    // cylinder, placed so the connecting block count sits near Re(1/alpha)
    Cplx tau0 = g_w - inv_alpha;
    double j = std::round(inv_alpha.real() + (w - tau0).real());
    Cplx z2 = charts.phi_rep_inverse(tau0 + j);

    const int64_t q = charts.germ().q();
    const int64_t max_steps =
        int64_t(std::ceil(2.4 * std::abs(inv_alpha.real()) + 64.0)) * q;
    Cplx z = z1;
    for (int64_t s = 1; s <= max_steps; ++s) {
        z = charts.germ().eval(z);
        if (std::norm(z) > 2500.0) break;
        double dist = std::abs(z - z2);
        if (dist < out.mismatch) {
            out.mismatch = dist;
            out.m = s / q;
            out.k = s % q;
        }
    }
    out.matched = out.mismatch < match_tol && out.m > out.window_lo &&
                  out.m < out.window_hi;
    return out;
}

SkewStepExact skew_step_exact(const BigRat& x, const Mcf& omega) {
    SkewStepExact out;
    out.alpha = eval_mu_inverse(omega, x);
    if (out.alpha == 0)
        throw DomainError("skew_step_exact: alpha = 0 is the parabolic fiber");
    if (2 * boost::multiprecision::abs(rat_num(out.alpha)) >= rat_den(out.alpha))
        throw DomainError("skew_step_exact: angle does not decompose into A_{1/2}");
    out.side = out.alpha > 0 ? Side::plus : Side::minus;
    out.angle_next = t_map(out.alpha, out.side);
    return out;
}

SkewStepNumeric skew_step_numeric(int d, const Mcf& omega, Cplx alpha, int points,
                                  double tol) {
    SkewStepNumeric out;
    out.alpha = alpha;
    Side side;
    if (AngleSector{0.5, Side::plus}.contains(alpha)) side = Side::plus;
    else if (AngleSector{0.5, Side::minus}.contains(alpha)) side = Side::minus;
    else throw DomainError("skew_step_numeric: alpha outside A_{1/2}");
    out.angle_next = t_map(alpha, side);

    UnicriticalGerm germ(d, omega, alpha);
    try {
        PerturbedCharts charts(germ);
        out.renorm = fiber_renorm_sample(
            charts, points, std::numeric_limits<double>::quiet_NaN(), tol);
        out.renorm_computed = true;
    } catch (const DomainError&) {
        out.renorm_computed = false;  // descriptor-only step outside the regime
    }
    return out;
}

}  // namespace parenorm
