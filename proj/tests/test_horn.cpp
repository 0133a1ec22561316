#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "parenorm/errors.hpp"
#include "parenorm/horn.hpp"
#include "parenorm/rng.hpp"

using namespace parenorm;

TEST_CASE("cylinder exp/log round trip") {
    Rng rng(0x5eed0401);
    for (int trial = 0; trial < 100; ++trial) {
        Cplx w(rng.uniform01(), rng.uniform(-3.0, 3.0));
        Cplx back = cylinder_log(cylinder_exp(w));
        CHECK(std::abs(back - w) < 1e-12);
    }
    CHECK_THROWS_AS(cylinder_log(Cplx(0.0)), DomainError);
}

TEST_CASE("rho: anchor, Abel shift, landing independence, basin errors") {
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    ExtendedCoordinates coords(g);

    CHECK(std::abs(coords.rho(g.critical_value(), 1e-9).value) < 1e-9);

    Cplx z(-0.3, 0.05);
    auto r1 = coords.rho(z, 1e-9);
    auto r2 = coords.rho(g.eval_q(z), 1e-9);
    CHECK(std::abs(r2.value - r1.value - 1.0) < 1e-8);

    // independence from the landing used: push the point q more steps in
    // by hand and subtract one block
    Cplx landed = z;
    for (int64_t s = 0; s < r1.blocks * g.q() + r1.residue + g.q(); ++s)
        landed = g.eval(landed);
    Cplx direct = coords.atlas().coordinate(0, landed, 1e-9) -
                  double(r1.blocks + 1) + coords.c0();
    CHECK(std::abs(direct - r1.value) < 1e-8);

    CHECK_THROWS_AS(coords.rho(Cplx(3.0, 0.0), 1e-9), DomainError);
    CHECK(coords.in_basin(Cplx(-0.3, 0.0)));
    CHECK(!coords.in_basin(Cplx(3.0, 0.0)));
}

TEST_CASE("rho: Abel shift for a q=3 germ") {
    UnicriticalGerm g(2, parse_mcf("(3:-)"), Cplx(0.0));
    ExtendedCoordinates coords(g);
    CHECK(std::abs(coords.rho(g.critical_value(), 1e-9).value) < 1e-9);
    Cplx z = g.critical_value();
    for (int s = 0; s < 7; ++s) z = g.eval(z);  // some orbit point in the basin
    auto r1 = coords.rho(z, 1e-9);
    auto r2 = coords.rho(g.eval_q(z), 1e-9);
    CHECK(std::abs(r2.value - r1.value - 1.0) < 1e-8);
}

TEST_CASE("chi: equivariance and far-field agreement") {
    for (auto text : {"", "(2:+)"}) {
        UnicriticalGerm g(2, parse_mcf(text), Cplx(0.0));
        ExtendedCoordinates coords(g);
        Rng rng(0x5eed0402);
        for (int s = 0; s < 5; ++s) {
            Cplx w(rng.uniform01(), rng.uniform(3.5, 5.0));
            Cplx a = coords.chi(w + 1.0, 1e-9);
            Cplx b = g.eval_q(coords.chi(w, 1e-9));
            CHECK(std::abs(a - b) < 1e-8);
        }
        // deep in the repelling end chi is the raw inverse coordinate
        Cplx w_deep(-40.0, 1.0);
        Cplx z = coords.chi(w_deep, 1e-9);
        Cplx back = coords.atlas().coordinate(1, z, 1e-9) + coords.c1();
        CHECK(std::abs(back - w_deep) < 1e-8);
    }
}

TEST_CASE("horn map: periodicity and flattening toward the top end") {
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    HornMapSampler sampler(g);
    sampler.normalize(1e-8);
    Rng rng(0x5eed0403);
    for (int s = 0; s < 8; ++s) {
        Cplx w(rng.uniform01(), rng.uniform(2.0, 4.0));
        Cplx lhs = sampler.horn(w + 1.0, 1e-7);
        Cplx rhs = sampler.horn(w, 1e-7);
        CHECK(std::abs(lhs - rhs - 1.0) < 1e-6);
    }
    Cplx d5 = sampler.horn(Cplx(0.25, 5.0), 1e-8) - Cplx(0.25, 5.0);
    Cplx d6 = sampler.horn(Cplx(0.25, 6.0), 1e-8) - Cplx(0.25, 6.0);
    CHECK(std::abs(d5 - d6) < 1e-3);
}

TEST_CASE("normalization: zeta_+ targets and the derivative at 0") {
    struct Case { int d; const char* w; double target; };
    const Case cases[] = {{2, "", 0.0}, {2, "(2:+)", 1.0}, {3, "(3:-)", 0.0}};
    for (const auto& c : cases) {
        UnicriticalGerm g(c.d, parse_mcf(c.w), Cplx(0.0));
        HornMapSampler sampler(g);
        CHECK(std::abs(sampler.summary().zeta_plus_target - Cplx(c.target, 0.0)) <
              1e-15);
        sampler.normalize(1e-8);
        const auto& s = sampler.summary();
        CHECK(std::abs(s.zeta_plus_fit - s.zeta_plus_target) < 1e-4);
        CHECK(std::abs(s.derivative_at_zero - Cplx(1.0, 0.0)) < 1e-3);
        CHECK(s.eta >= 1.0);
        CHECK(s.eta <= 8.0);
    }
}

TEST_CASE("renormalization: definition consistency and extension at 0") {
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    HornMapSampler sampler(g);
    CHECK_THROWS_AS(sampler.renorm_top(Cplx(0.1, 0.0), 1e-6), DomainError);
    sampler.normalize(1e-8);

    CHECK(sampler.renorm_top(Cplx(0.0), 1e-6) == Cplx(0.0));
    Rng rng(0x5eed0404);
    for (int s = 0; s < 5; ++s) {
        Cplx w(rng.uniform01(), rng.uniform(2.0, 4.0));
        Cplx via_strip = cylinder_exp(sampler.horn(w, 1e-7));
        Cplx via_plane = sampler.renorm_top(cylinder_exp(w), 1e-7);
        CHECK(std::abs(via_strip - via_plane) < 1e-6);
    }

    // fitted linear coefficient on a deep circle
    Cplx acc(0.0);
    for (int s = 0; s < 16; ++s) {
        Cplx z = std::polar(std::exp(-kTwoPi * 4.0), kTwoPi * s / 16.0);
        acc += sampler.renorm_top(z, 1e-8) / z;
    }
    CHECK(std::abs(acc / 16.0 - Cplx(1.0, 0.0)) < 1e-3);

    // bottom renormalization also has derivative 1 at 0; its test circle
    // must sit below the lower edge of the horn domain
    CHECK(sampler.renorm_bottom(Cplx(0.0), 1e-6) == Cplx(0.0));
    double bottom_radius = std::exp(-kTwoPi * (sampler.summary().eta + 4.0));
    acc = Cplx(0.0);
    for (int s = 0; s < 16; ++s) {
        Cplx z = std::polar(bottom_radius, kTwoPi * s / 16.0);
        acc += sampler.renorm_bottom(z, 1e-8) / z;
    }
    CHECK(std::abs(acc / 16.0 - Cplx(1.0, 0.0)) < 1e-3);
}

TEST_CASE("critical value of the renormalized G_2 sits at 1") {
    UnicriticalGerm g(2, Mcf{}, Cplx(0.0));
    HornMapSampler sampler(g);
    sampler.normalize(1e-8);
    Cplx cv = sampler.critical_value_estimate(1e-6);
    CHECK(std::abs(cv - Cplx(1.0, 0.0)) < 1e-3);
    CHECK(sampler.critical_local_degree(1e-6) == 2);
}
