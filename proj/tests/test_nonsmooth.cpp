#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "focs/nonsmooth.hpp"

using namespace focs;

namespace {
NonsmoothActuator section4() { return NonsmoothActuator::checked(1.0, 1.8, -1.5, 0.8, -0.5); }
}

TEST_CASE("construction validates signs and derives the break points") {
    const NonsmoothActuator act = section4();
    CHECK(act.w_max == doctest::Approx(2.6));
    CHECK(act.w_min == doctest::Approx(-2.0));
    CHECK(act.w_min < act.b_l);
    CHECK(act.b_l < act.b_r);
    CHECK(act.b_r < act.w_max);
    CHECK(act.disturbance_bound() == doctest::Approx(0.8));

    CHECK_THROWS_AS(NonsmoothActuator::checked(0.0, 1.8, -1.5, 0.8, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(NonsmoothActuator::checked(1.0, -1.8, -1.5, 0.8, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(NonsmoothActuator::checked(1.0, 1.8, 1.5, 0.8, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(NonsmoothActuator::checked(1.0, 1.8, -1.5, -0.8, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(NonsmoothActuator::checked(1.0, 1.8, -1.5, 0.8, 0.5), std::invalid_argument);
}

TEST_CASE("saturation stage examples") {
    const NonsmoothActuator act = section4();
    CHECK(saturate(3.0, act) == doctest::Approx(2.6));
    CHECK(saturate(0.0, act) == 0.0);
    CHECK(saturate(-3.0, act) == doctest::Approx(-2.0));
}

TEST_CASE("dead zone stage examples") {
    const NonsmoothActuator act = section4();
    CHECK(dead_zone(1.0, act) == doctest::Approx(0.2));
    CHECK(dead_zone(0.3, act) == 0.0);
    CHECK(dead_zone(-2.0, act) == doctest::Approx(-1.5));
}

TEST_CASE("dead zone disturbance examples and bound") {
    const NonsmoothActuator act = section4();
    CHECK(dead_zone_disturbance(1.0, act) == doctest::Approx(-0.8));
    CHECK(dead_zone_disturbance(0.0, act) == 0.0);
    CHECK(dead_zone_disturbance(-5.0, act) == doctest::Approx(0.5));
}

TEST_CASE("composed map examples") {
    const NonsmoothActuator act = section4();
    CHECK(actuate(3.0, act) == 1.8);  // pinned at the upper limit exactly
    CHECK(actuate(1.0, act) == doctest::Approx(0.2));
    CHECK(actuate(0.1, act) == 0.0);
}

TEST_CASE("dense sweep: composition identity is bit-exact with the reference parameters") {
    const NonsmoothActuator act = section4();
    auto probe = [&](double v) {
        CHECK(actuate(v, act) == dead_zone(saturate(v, act), act));
    };
    const std::size_t count = 100000;
    for (std::size_t i = 0; i <= count; ++i)
        probe(-10.0 + 20.0 * static_cast<double>(i) / static_cast<double>(count));
    for (double v : {act.w_min, act.b_l, 0.0, act.b_r, act.w_max}) {
        probe(v);
        probe(std::nextafter(v, -100.0));
        probe(std::nextafter(v, 100.0));
    }
}

TEST_CASE("linear-plus-disturbance rewrite is bit-exact for any parameters") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pos(0.05, 4.0);
    std::uniform_real_distribution<double> wdist(-20.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        const NonsmoothActuator act =
            NonsmoothActuator::checked(pos(rng), pos(rng), -pos(rng), pos(rng), -pos(rng));
        for (int i = 0; i < 500; ++i) {
            const double w = wdist(rng);
            CHECK(dead_zone(w, act) == act.m * w + dead_zone_disturbance(w, act));
            CHECK(std::abs(dead_zone_disturbance(w, act)) <= act.disturbance_bound());
        }
    }
}

TEST_CASE("output limits and monotonicity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(0.05, 4.0);
    std::uniform_real_distribution<double> vdist(-30.0, 30.0);
    for (int trial = 0; trial < 100; ++trial) {
        const NonsmoothActuator act =
            NonsmoothActuator::checked(pos(rng), pos(rng), -pos(rng), pos(rng), -pos(rng));
        double prev_v = -1e9, prev_u = actuate(-1e9, act);
        CHECK(prev_u == act.u_low);
        std::vector<double> vs;
        for (int i = 0; i < 400; ++i) vs.push_back(vdist(rng));
        std::sort(vs.begin(), vs.end());
        for (double v : vs) {
            const double u = actuate(v, act);
            CHECK(u <= act.u_up);
            CHECK(u >= act.u_low);
            if (v >= prev_v) CHECK(u >= prev_u);
            prev_v = v;
            prev_u = u;
        }
    }
}
