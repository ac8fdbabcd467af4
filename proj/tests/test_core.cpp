#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vcoup/core.hpp"

using namespace vcoup;

TEST_CASE("roster validation rejects coincident and non-finite emitters") {
    EmitterRoster r;
    r.push_back({Vec3(0, 0, 0), Vec3(0, 0, 1)});
    r.push_back({Vec3(1, 0, 0), Vec3(0, 0, 1)});
    CHECK_NOTHROW(check_roster(r));

    r.push_back({Vec3(1, 0, 0), Vec3(1, 0, 0)});
    CHECK_THROWS_AS(check_roster(r), GeometryError);

    r.pop_back();
    r.push_back({Vec3(std::nan(""), 0, 0), Vec3(0, 0, 1)});
    CHECK_THROWS_AS(check_roster(r), GeometryError);
}

TEST_CASE("unit system scales must be positive") {
    UnitSystem u;
    CHECK_NOTHROW(u.validate());
    u.c_scale = 0.0;
    CHECK_THROWS_AS(u.validate(), Error);
    u.c_scale = -1.0;
    CHECK_THROWS_AS(u.validate(), Error);
}

TEST_CASE("interaction energy contracts mu_i . Re(lambda) . mu_j") {
    Dyadic33 lam = Dyadic33::Zero();
    lam(0, 0) = 2.0;
    lam(0, 2) = -1.0;
    lam(2, 2) = 0.5;
    const Vec3 mi(1.0, 0.0, 0.0), mj(3.0, 0.0, 4.0);
    // 1*(2*3 + (-1)*4) = 2
    CHECK(interaction_energy(mi, lam, mj) == doctest::Approx(2.0));

    // imaginary residue above the relative floor is rejected
    lam(0, 0) += complexd(0.0, 1e-3);
    CHECK_THROWS_AS(interaction_energy(mi, lam, mj), InvalidCouplingError);
}

TEST_CASE("error hierarchy is catchable through the base type") {
    try {
        throw ConvergenceError("x", 3.5);
    } catch (const Error& e) {
        CHECK(std::string(e.what()) == "x");
    }
    CHECK_THROWS_AS(throw UseStaticKernelError("y"), Error);
}
