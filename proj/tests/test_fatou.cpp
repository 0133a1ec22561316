#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "parenorm/errors.hpp"
#include "parenorm/fatou.hpp"
#include "parenorm/rng.hpp"

using namespace parenorm;

namespace {

const char* kGermWords[] = {"", "(2:+)", "(3:-)"};

// Point in petal j synthesized from a target w value through the normal form.
Cplx petal_point(const FatouAtlas& atlas, int64_t j, Cplx w) {
    const auto& nf = atlas.normal_form();
    const auto& chart = atlas.chart(j);
    const int64_t q = nf.q;
    Cplx zeta_q = -1.0 / (double(q) * nf.a * w);
    double mag = std::pow(std::abs(zeta_q), 1.0 / double(q));
    double base = std::arg(zeta_q) / double(q);
    double best = 1e9;
    Cplx zeta;
    for (int64_t l = 0; l < q; ++l) {
        double ang = base + kTwoPi * double(l) / double(q);
        double d = std::abs(std::remainder(ang - chart.direction, kTwoPi));
        if (d < best) { best = d; zeta = std::polar(mag, ang); }
    }
    return nf.from_normal(zeta);
}

Cplx sample_attracting(const FatouAtlas& atlas, int64_t j, Rng& rng) {
    for (int tries = 0; tries < 200; ++tries) {
        Cplx w(rng.uniform(5.0, 28.0), rng.uniform(-14.0, 14.0));
        Cplx z = petal_point(atlas, j, w);
        if (atlas.chart(j).contains(z, atlas.normal_form())) return z;
    }
    throw std::runtime_error("no attracting sample found");
}

Cplx sample_repelling(const FatouAtlas& atlas, int64_t j, Rng& rng) {
    for (int tries = 0; tries < 200; ++tries) {
        Cplx w(-rng.uniform(5.0, 28.0), rng.uniform(-14.0, 14.0));
        Cplx z = petal_point(atlas, j, w);
        if (atlas.chart(j).contains(z, atlas.normal_form())) return z;
    }
    throw std::runtime_error("no repelling sample found");
}

}  // namespace

TEST_CASE("normal form: frozen constants for G_2") {
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    auto nf = make_normal_form(g);
    CHECK(std::abs(nf.a - Cplx(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(nf.A - Cplx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(nf.B - Cplx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(nf.D - Cplx(0.5, 0.0)) < 1e-12);
}

TEST_CASE("normal form: non-resonant orders vanish, resonant a matches q-fold") {
    for (int d : {2, 3}) {
        for (auto text : {"(2:+)", "(3:-)"}) {
            UnicriticalGerm g(d, parse_mcf(text), Cplx(0.0));
            auto nf = make_normal_form(g);
            auto qf = g.q_fold_series();
            CHECK(std::abs(nf.a - qf.a) < 1e-9);
            for (int64_t k = 2; k <= nf.g_hat.order(); ++k) {
                if ((k - 1) % g.q() == 0) continue;
                CHECK(std::abs(nf.g_hat.coeff(k)) < 1e-9);
            }
        }
    }
}

TEST_CASE("normal form: A recovered by least squares from the actual map") {
    for (int d : {2, 3}) {
        for (auto text : kGermWords) {
            UnicriticalGerm g(d, parse_mcf(text), Cplx(0.0));
            FatouAtlas atlas(g, 0.0);
            const auto& nf = atlas.normal_form();
            // fit F(w) - w - 1 ~ A/w over dyadic |w|; Richardson across
            // consecutive dyads cancels the B/w^2 contamination
            auto slope_at = [&](double wr) {
                Cplx acc(0.0);
                for (int s = -2; s <= 2; ++s) {
                    Cplx w(wr, wr * 0.1 * s);
                    Cplx z = petal_point(atlas, 0, w);
                    Cplx w_next = nf.w_of(nf.to_normal(g.eval_q(z)));
                    acc += (w_next - w - 1.0) * w;
                }
                return acc / 5.0;
            };
            Cplx fitted(0.0);
            int pairs = 0;
            for (int dyad = 6; dyad <= 11; ++dyad) {
                Cplx lo = slope_at(std::pow(2.0, dyad));
                Cplx hi = slope_at(std::pow(2.0, dyad + 1));
                fitted += 2.0 * hi - lo;
                ++pairs;
            }
            fitted /= double(pairs);
            CHECK(std::abs(fitted - nf.A) < 1e-3 * (1.0 + std::abs(nf.A)));
        }
    }
}

TEST_CASE("template: Abel residual through the true map decays like w^-4") {
    for (int d : {2, 3}) {
        for (auto text : kGermWords) {
            UnicriticalGerm g(d, parse_mcf(text), Cplx(0.0));
            FatouAtlas atlas(g, 0.0);
            const auto& nf = atlas.normal_form();
            double res_lo = 0.0, res_hi = 0.0;
            for (double scale : {100.0, 400.0}) {
                double worst = 0.0;
                for (int s = -2; s <= 2; ++s) {
                    Cplx w(scale, 0.2 * scale * s);
                    Cplx z = petal_point(atlas, 0, w);
                    Cplx wn = nf.w_of(nf.to_normal(g.eval_q(z)));
                    Cplx res = atlas.template_value(wn, PetalKind::attracting) -
                               atlas.template_value(w, PetalKind::attracting) - 1.0;
                    worst = std::max(worst, std::abs(res));
                }
                (scale < 200.0 ? res_lo : res_hi) = worst;
            }
            // one extra factor 4 of slack on the 4^4 = 256 decay
            CHECK(res_hi <= res_lo / 64.0 + 1e-14);
            CHECK(res_lo < 1e-5);
        }
    }
}

TEST_CASE("petal membership: frozen examples for G_2") {
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    FatouAtlas atlas(g, 0.0);
    // W(-0.2) = -2/(-0.2) = 10 on the attracting side
    CHECK(atlas.chart(0).contains(Cplx(-0.2, 0.0), atlas.normal_form()));
    CHECK(!atlas.chart(1).contains(Cplx(-0.2, 0.0), atlas.normal_form()));
    CHECK(atlas.chart(1).contains(Cplx(0.2, 0.0), atlas.normal_form()));
    CHECK(!atlas.chart(0).contains(Cplx(0.2, 0.0), atlas.normal_form()));
    CHECK(!atlas.chart(0).contains(Cplx(0.0, 0.0), atlas.normal_form()));
    CHECK(atlas.locate(Cplx(-0.2, 0.0)) == 0);
    CHECK(atlas.locate(Cplx(0.2, 0.0)) == 1);
    CHECK(atlas.locate(Cplx(0.0, 0.3)) == -1);
}

TEST_CASE("petals: disjoint and circularly ordered") {
    Rng rng(0x5eed0301);
    for (int d : {2, 3}) {
        for (auto text : kGermWords) {
            UnicriticalGerm g(d, parse_mcf(text), Cplx(0.0));
            FatouAtlas atlas(g, 0.0);
            const int64_t count = atlas.petal_count();

            std::vector<std::pair<double, int64_t>> angular;
            for (int64_t j = 0; j < count; ++j) {
                Cplx z = (j % 2 == 0) ? sample_attracting(atlas, j, rng)
                                      : sample_repelling(atlas, j, rng);
                CHECK(atlas.locate(z) == j);  // no other chart claims it
                angular.push_back({std::arg(z), j});
            }
            std::sort(angular.begin(), angular.end());
            // indices must appear in cyclic order around zero
            int64_t start = 0;
            while (angular[size_t(start)].second != 0) ++start;
            for (int64_t s = 0; s < count; ++s) {
                CHECK(angular[size_t((start + s) % count)].second == s);
            }
        }
    }
}

TEST_CASE("attracting coordinate: Abel equation across the germ set") {
    Rng rng(0x5eed0302);
    const double tol = 1e-9;
    for (int d : {2, 3}) {
        for (auto text : kGermWords) {
            UnicriticalGerm g(d, parse_mcf(text), Cplx(0.0));
            FatouAtlas atlas(g, 0.0);
            for (int s = 0; s < 12; ++s) {
                Cplx z = sample_attracting(atlas, 0, rng);
                Cplx phi_z = atlas.coordinate(0, z, tol);
                Cplx phi_hz = atlas.coordinate(0, g.eval_q(z), tol);
                CHECK(std::abs(phi_hz - phi_z - 1.0) < 1e-8);
            }
        }
    }
}

TEST_CASE("attracting coordinate: residual with decorrelated stopping radii") {
    Rng rng(0x5eed0303);
    for (int d : {2, 3}) {
        for (auto text : kGermWords) {
            UnicriticalGerm g(d, parse_mcf(text), Cplx(0.0));
            FatouAtlas atlas(g, 0.0);
            for (int s = 0; s < 6; ++s) {
                Cplx z = sample_attracting(atlas, 0, rng);
                // different tolerances force different stopping radii, so the
                // values share no terminal cancellation; each must honor the
                // looser of the two tolerances involved
                Cplx phi_a = atlas.coordinate(0, z, 1e-6);
                Cplx phi_b = atlas.coordinate(0, z, 1e-9);
                CHECK(std::abs(phi_a - phi_b) < 1e-6);
                Cplx phi_c = atlas.coordinate(0, z, 1e-8);
                CHECK(std::abs(phi_c - phi_b) < 1e-8);
                Cplx phi_hz = atlas.coordinate(0, g.eval_q(z), 1e-9);
                CHECK(std::abs(phi_hz - phi_c - 1.0) < 1e-8);
            }
        }
    }
}

TEST_CASE("coordinate: off-petal point is rejected") {
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    FatouAtlas atlas(g, 0.0);
    CHECK_THROWS_AS(atlas.coordinate(0, Cplx(0.2, 0.0), 1e-8), DomainError);
    CHECK_THROWS_AS(atlas.coordinate(1, Cplx(-0.2, 0.0), 1e-8), DomainError);
    CHECK_THROWS_AS(atlas.coordinate(7, Cplx(-0.2, 0.0), 1e-8), DomainError);
}

TEST_CASE("repelling coordinate: Abel equation along the backward orbit") {
    Rng rng(0x5eed0304);
    for (int d : {2, 3}) {
        for (auto text : kGermWords) {
            UnicriticalGerm g(d, parse_mcf(text), Cplx(0.0));
            FatouAtlas atlas(g, 0.0);
            for (int s = 0; s < 6; ++s) {
                Cplx z = sample_repelling(atlas, 1, rng);
                // phi(z) = phi(h^{-q}(z)) + 1 wherever both sides are defined
                Cplx phi_z = atlas.coordinate(1, z, 1e-9);
                Cplx z_back = g.local_inverse(z, z / g.lambda(), 1e-13);
                for (int64_t r = 1; r < g.q(); ++r)
                    z_back = g.local_inverse(z_back, z_back / g.lambda(), 1e-13);
                if (!atlas.chart(1).contains(z_back, atlas.normal_form())) continue;
                Cplx phi_back = atlas.coordinate(1, z_back, 1e-9);
                CHECK(std::abs(phi_z - phi_back - 1.0) < 1e-8);
            }
        }
    }
}

TEST_CASE("repelling coordinate: backward orbit shrinks to the fixed point") {
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    FatouAtlas atlas(g, 0.0);
    Cplx z(0.3, 0.0);
    REQUIRE(atlas.chart(1).contains(z, atlas.normal_form()));
    double prev = std::abs(z);
    Cplx cur = z;
    for (int n = 0; n < 400; ++n)
        cur = g.local_inverse(cur, cur / g.lambda(), 1e-13);
    CHECK(std::abs(cur) < 0.1 * prev);
}

TEST_CASE("repelling inverse: round trips, equivariance, far field") {
    Rng rng(0x5eed0305);
    for (int d : {2, 3}) {
        for (auto text : kGermWords) {
            UnicriticalGerm g(d, parse_mcf(text), Cplx(0.0));
            FatouAtlas atlas(g, 0.0);
            for (int s = 0; s < 5; ++s) {
                Cplx w(rng.uniform(-20.0, -6.0), rng.uniform(-10.0, 10.0));
                Cplx z = atlas.coordinate_inverse(1, w, 1e-9);
                REQUIRE(atlas.chart(1).contains(z, atlas.normal_form()));
                Cplx back = atlas.coordinate(1, z, 1e-9);
                CHECK(std::abs(back - w) < 1e-8);

                Cplx z_next = atlas.coordinate_inverse(1, w + 1.0, 1e-9);
                CHECK(std::abs(z_next - g.eval_q(z)) < 1e-8 * (1.0 + std::abs(z)));
            }
            // far out the coordinate degenerates to the base transform
            Cplx w_far(-1e6, 0.0);
            Cplx z_far = atlas.coordinate_inverse(1, w_far, 1e-6);
            Cplx w_raw = atlas.normal_form().w_of(atlas.normal_form().to_normal(z_far));
            CHECK(std::abs(w_raw - w_far) / std::abs(w_far) < 1e-3);
        }
    }
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    FatouAtlas atlas(g, 0.0);
    CHECK_THROWS_AS(atlas.coordinate_inverse(0, Cplx(-8.0, 0.0), 1e-8), DomainError);
}

TEST_CASE("petal cycle: one h step advances the index by 2p") {
    Rng rng(0x5eed0306);
    {
        UnicriticalGerm g(2, parse_mcf("(3:+)"), Cplx(0.0));
        FatouAtlas atlas(g, 0.0);
        Cplx z = sample_attracting(atlas, 0, rng);
        CHECK(atlas.petal_cycle_check(z, 0) == 2);
    }
    {
        UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
        FatouAtlas atlas(g, 0.0);
        Cplx z = sample_attracting(atlas, 0, rng);
        CHECK(atlas.petal_cycle_check(z, 0) == 0);
    }
    {
        UnicriticalGerm g(2, parse_mcf("(2:+)"), Cplx(0.0));
        FatouAtlas atlas(g, 0.0);
        Cplx z = sample_attracting(atlas, 0, rng);
        CHECK(atlas.petal_cycle_check(z, 0) == 2);
    }
    {
        // p = -1: the index moves backwards
        UnicriticalGerm g(2, parse_mcf("(3:-)"), Cplx(0.0));
        FatouAtlas atlas(g, 0.0);
        Cplx z = sample_attracting(atlas, 0, rng);
        CHECK(atlas.petal_cycle_check(z, 0) == (0 - 2 + 6) % 6);
    }
}

TEST_CASE("tilted petals: residuals stay within the relaxed tolerance") {
    Rng rng(0x5eed0307);
    for (double theta : {-kPi / 14.0, kPi / 14.0}) {
        UnicriticalGerm g(2, parse_mcf("(2:+)"), Cplx(0.0));
        FatouAtlas atlas(g, theta);
        for (int s = 0; s < 6; ++s) {
            Cplx z = sample_attracting(atlas, 0, rng);
            Cplx phi_z = atlas.coordinate(0, z, 1e-8);
            Cplx phi_hz = atlas.coordinate(0, g.eval_q(z), 1e-8);
            CHECK(std::abs(phi_hz - phi_z - 1.0) < 1e-6);
        }
    }
    CHECK_THROWS_AS(FatouAtlas(UnicriticalGerm(2, Mcf{}, Cplx(0.0)), 0.3), DomainError);
}

TEST_CASE("translation freedom: constants shift the coordinate rigidly") {
    // the evaluator is constant-free; adding c0 after the fact is exact, so
    // two normalizations differ by exactly their constant difference
    Rng rng(0x5eed0308);
    UnicriticalGerm g(3, parse_mcf("(3:-)"), Cplx(0.0));
    FatouAtlas atlas(g, 0.0);
    Cplx c0(0.37, -1.21), c1(-2.5, 0.25);
    Cplx base;
    bool first = true;
    for (int s = 0; s < 5; ++s) {
        Cplx z = sample_attracting(atlas, 0, rng);
        Cplx diff = (atlas.coordinate(0, z, 1e-9) + c0) -
                    (atlas.coordinate(0, z, 1e-9) + c1);
        if (first) { base = diff; first = false; }
        CHECK(std::abs(diff - base) < 1e-10);
    }
}
