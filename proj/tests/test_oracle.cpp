#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vcoup/oracle.hpp"

using namespace vcoup;

namespace {

FockModel one_emitter_one_mode(double eps, double omega, double g,
                               int n_max) {
    FockModel m;
    m.emitters.push_back({Vec3::Zero(), Vec3(0, 0, 1)});
    m.splittings = {eps};
    m.modes.roster_size = 1;
    DiscreteMode mo;
    mo.omega = omega;
    mo.field = {CVec3(0.0, 0.0, g)};
    m.modes.modes = {mo};
    m.n_max = n_max;
    return m;
}

} // namespace

TEST_CASE("dimension bookkeeping and limits") {
    FockModel m = one_emitter_one_mode(0.0, 1.0, 0.1, 9);
    CHECK(m.dimension() == 20); // 2 * (9+1)
    CHECK_NOTHROW(m.validate());
    m.n_max = 0;
    CHECK_THROWS_AS(m.validate(), Error);
    m.n_max = 9;
    m.dimension_limit = 10;
    CHECK_THROWS_AS(m.validate(), DimensionError);
}

TEST_CASE("displaced oscillator: E_g = -g^2/omega at eps = 0") {
    const FockModel m = one_emitter_one_mode(0.0, 1.0, 0.1, 20);
    CHECK(std::abs(exact_ground_energy(m) + 0.01) < 1e-10);
    CHECK(std::abs(effective_ground_energy(m) + 0.01) < 1e-12);
}

TEST_CASE("decoupled two-level system: E_g = -eps/2") {
    const FockModel m = one_emitter_one_mode(0.3, 1.0, 0.0, 3);
    CHECK(exact_ground_energy(m) == doctest::Approx(-0.15).epsilon(1e-12));
}

TEST_CASE("two emitters, one shared mode: polaron displacement energy") {
    FockModel m;
    m.emitters.push_back({Vec3(0, 0, 0), Vec3(0, 0, 1)});
    m.emitters.push_back({Vec3(0, 0, 1), Vec3(0, 0, 1)});
    m.splittings = {0.0, 0.0};
    m.modes.roster_size = 2;
    DiscreteMode mo;
    mo.omega = 1.3;
    mo.field = {CVec3(0, 0, 0.12), CVec3(0, 0, 0.07)};
    m.modes.modes = {mo};
    m.n_max = 30;
    // best sign choice aligns both couplings: -(0.12+0.07)^2/1.3
    const double expect = -(0.19 * 0.19) / 1.3;
    CHECK(std::abs(exact_ground_energy(m) - expect) < 1e-10);
    CHECK(std::abs(effective_ground_energy(m) - expect) < 1e-12);
}

TEST_CASE("ground energy decreases monotonically with the Fock cutoff") {
    double prev = 1e300;
    for (int nmax : {2, 4, 8, 16}) {
        const FockModel m = one_emitter_one_mode(0.4, 1.0, 0.25, nmax);
        const double e = exact_ground_energy(m);
        CHECK(e <= prev + 1e-15);
        prev = e;
    }
}

TEST_CASE("Lanczos path agrees with the dense solver") {
    // 2 emitters x 2 modes with n_max = 7 -> dim 256 (dense); n_max chosen
    // larger pushes the same physics through the iterative path.
    FockModel dense;
    dense.emitters.push_back({Vec3(0, 0, 0), Vec3(0, 0, 1)});
    dense.emitters.push_back({Vec3(0, 0, 1), Vec3(1, 0, 0)});
    dense.splittings = {0.2, 0.35};
    dense.modes.roster_size = 2;
    DiscreteMode a;
    a.omega = 1.0;
    a.field = {CVec3(0, 0, 0.15), CVec3(0.1, 0, 0)};
    DiscreteMode b;
    b.omega = 1.7;
    b.field = {CVec3(0.05, 0, 0.1), CVec3(0, 0, 0.12)};
    dense.modes.modes = {a, b};
    dense.n_max = 7;

    FockModel big = dense;
    big.n_max = 40; // dim 2^2 * 41^2 = 6724 -> Lanczos
    const double ed = exact_ground_energy(dense);
    const double eb = exact_ground_energy(big);
    // the big-cutoff answer is converged; dense n_max=7 already close
    CHECK(std::abs(ed - eb) < 1e-6);
}

TEST_CASE("dipole self-energy flag adds the constant to both energies") {
    FockModel m = one_emitter_one_mode(0.1, 1.0, 0.2, 25);
    const double e0 = exact_ground_energy(m);
    const double f0 = effective_ground_energy(m);
    m.include_dipole_self_energy = true;
    // constant = |mu.E|^2/omega = 0.04
    CHECK(exact_ground_energy(m) == doctest::Approx(e0 + 0.04));
    CHECK(effective_ground_energy(m) == doctest::Approx(f0 + 0.04));
}

TEST_CASE("trace-out error vanishes at eps = 0 and grows with slope >= 1") {
    FockModel base;
    base.emitters.push_back({Vec3(0, 0, 0), Vec3(0, 0, 1)});
    base.emitters.push_back({Vec3(0, 0, 1), Vec3(0, 0, 1)});
    base.splittings = {0.0, 0.0};
    base.modes.roster_size = 2;
    DiscreteMode a;
    a.omega = 1.0;
    a.field = {CVec3(0, 0, 0.08), CVec3(0, 0, 0.05)};
    DiscreteMode b;
    b.omega = 1.4;
    b.field = {CVec3(0, 0, 0.06), CVec3(0, 0, 0.09)};
    base.modes.modes = {a, b};
    base.n_max = 30;

    const std::vector<double> grid{0.0, 0.01, 0.1, 0.3};
    const auto rows = traceout_error_sweep(base, 1.0, grid);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].energy_error <= 1e-10);
    CHECK(rows[2].energy_error / rows[1].energy_error >= 5.0);
    const double slope =
        std::log(rows[3].energy_error / rows[1].energy_error) /
        std::log(0.3 / 0.01);
    CHECK(slope >= 1.0);
}

TEST_CASE("single-mirror limit of the image series") {
    ImageSeriesConfig cfg;
    cfg.z1 = 0.0;
    cfg.z2 = 5.0;
    cfg.f1 = 0.8;
    cfg.f2 = 0.0; // top mirror switched off
    const Vec3 r(0.1, 0.0, 0.4), rp(0.0, 0.2, 0.7);
    const Dyadic33 series = image_series_static(cfg, r, rp);
    MirrorSpec m{Vec3(0, 0, 0), Vec3(0, 0, 1), 0.8};
    CHECK((series - mirror_static_g(m, r, rp)).cwiseAbs().maxCoeff() <
          1e-14);
}

TEST_CASE("image series is symmetric under reflecting the cavity") {
    ImageSeriesConfig cfg;
    cfg.z1 = 0.0;
    cfg.z2 = 1.0;
    cfg.f1 = 1.0;
    cfg.f2 = 0.5;
    const Vec3 r(0.2, -0.1, 0.35), rp(0.0, 0.3, 0.6);
    const Dyadic33 a = image_series_static(cfg, r, rp);

    // flip z -> 1 - z and swap the mirror strengths
    ImageSeriesConfig flipped = cfg;
    flipped.f1 = 0.5;
    flipped.f2 = 1.0;
    auto flip = [](const Vec3& v) { return Vec3(v.x(), v.y(), 1.0 - v.z()); };
    const Dyadic33 b = image_series_static(flipped, flip(r), flip(rp));
    // xz / yz blocks change sign under the reflection, diagonals do not
    Dyadic33 expect = b;
    for (int k : {0, 1}) {
        expect(k, 2) *= -1.0;
        expect(2, k) *= -1.0;
    }
    CHECK((a - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("image series validation") {
    ImageSeriesConfig cfg;
    cfg.z1 = 1.0;
    cfg.z2 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), GeometryError);
    cfg.z1 = 0.0;
    cfg.z2 = 1.0;
    cfg.f1 = 2.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.f1 = 1.0;
    CHECK_NOTHROW(cfg.validate());
    CHECK_THROWS_AS(image_series_static(cfg, Vec3(0, 0, 1.5), Vec3(0, 0, 0.5)),
                    GeometryError);
}
