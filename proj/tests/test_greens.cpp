#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vcoup/greens.hpp"
#include "vcoup/oracle.hpp"

using namespace vcoup;

namespace {

double rel_dev(const Dyadic33& a, const Dyadic33& ref) {
    return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

LayerStack half_space_pec() {
    LayerStack s;
    s.layers.resize(2);
    s.layers[0].permittivity.model = DrudeModel{1e4, 0.0};
    s.layers[1].permittivity.model = complexd(1.0, 0.0);
    s.z0 = 0.0;
    s.emitter_layer = 1;
    return s;
}

} // namespace

TEST_CASE("free-space G matches the unit-separation reference value") {
    // transverse component at rho = 1, w = 1 equals i e^{i} / (4 pi)
    const Dyadic33 g = free_space_g(Vec3(0, 0, 0), Vec3(0, 0, 1), 1.0);
    const complexd exact = complexd(0, 1) * std::exp(complexd(0, 1)) /
                           (4.0 * pi);
    CHECK(std::abs(g(0, 0) - exact) < 1e-15);
    CHECK(std::abs(g(1, 1) - exact) < 1e-15);
    CHECK(std::abs(g(0, 1)) < 1e-15);
}

TEST_CASE("free-space G is reciprocal and has the right static residue") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 20; ++t) {
        const Vec3 r(u(rng), u(rng), u(rng));
        Vec3 rp(u(rng), u(rng), u(rng));
        if ((r - rp).norm() < 1e-3) rp.z() += 1.0;
        const double w = 0.3 + 0.2 * t;
        const Dyadic33 g = free_space_g(r, rp, w);
        const Dyadic33 gt = free_space_g(rp, r, w);
        CHECK((g - gt.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }
    // w^2 G_zz at rho = 1 along z tends to 2/(4 pi)
    double prev = 1e9;
    for (double w : {0.1, 0.01, 0.001}) {
        const Dyadic33 g = free_space_g(Vec3(0, 0, 0), Vec3(0, 0, 1), w);
        const double v = (w * w * g(2, 2)).real();
        CHECK(std::abs(v - 2.0 / (4.0 * pi)) < std::abs(prev));
        prev = v - 2.0 / (4.0 * pi);
    }
    CHECK(std::abs(prev) < 1e-6);
}

TEST_CASE("free-space G rejects coincident points and zero frequency") {
    CHECK_THROWS_AS(free_space_g(Vec3(1, 2, 3), Vec3(1, 2, 3), 1.0),
                    GeometryError);
    CHECK_THROWS_AS(free_space_g(Vec3(0, 0, 0), Vec3(0, 0, 1), 0.0),
                    UseStaticKernelError);
}

TEST_CASE("electrostatic kernel: traceless, symmetric, correct normals") {
    const Dyadic33 k = electrostatic_kernel(Vec3(0, 0, 0), Vec3(0, 0, 2));
    CHECK(std::abs(k.trace()) < 1e-16);
    // longitudinal: (1/2) * 2 / (4 pi 8), transverse: -(1/2) / (4 pi 8)
    CHECK(k(2, 2).real() == doctest::Approx(1.0 / (32.0 * pi)));
    CHECK(k(0, 0).real() == doctest::Approx(-1.0 / (64.0 * pi)));
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // halved dipole kernel
    const Dyadic33 d = dipole_kernel(Vec3(0, 0, 0), Vec3(0, 0, 2));
    CHECK((d - 2.0 * k).cwiseAbs().maxCoeff() < 1e-16);
}

TEST_CASE("mirror spec validates and reflects") {
    MirrorSpec m{Vec3(0, 0, 1), Vec3(0, 0, 1), 1.0};
    CHECK_NOTHROW(m.validate());
    CHECK(m.image(Vec3(0.5, 0, 3.0)).z() == doctest::Approx(-1.0));
    m.strength = 1.5;
    CHECK_THROWS_AS(m.validate(), Error);
    m.strength = 1.0;
    m.normal = Vec3::Zero();
    CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("mirror static kernel rejects points straddling the plane") {
    MirrorSpec m{Vec3::Zero(), Vec3(0, 0, 1), 1.0};
    CHECK_THROWS_AS(mirror_static_g(m, Vec3(0, 0, 0.5), Vec3(0, 0, -0.5)),
                    GeometryError);
}

TEST_CASE("PEC half-space: Sommerfeld static limit matches the image dipole") {
    LayeredGreens g(half_space_pec());
    MirrorSpec m{Vec3::Zero(), Vec3(0, 0, 1), 1.0};
    for (const Vec3& r : {Vec3(0.0, 0.0, 0.3), Vec3(0.4, -0.2, 0.7)}) {
        const Dyadic33 ls = g.static_lambda_scattered(r, r);
        const Dyadic33 im = mirror_static_g(m, r, r);
        CHECK(rel_dev(ls, im) < 1e-5);
    }
    // two distinct points: full static lambda = electrostatic + image term
    const Vec3 a(0.0, 0.0, 0.4), b(0.3, 0.1, 0.6);
    const Dyadic33 full = g.static_lambda(a, b);
    const Dyadic33 ref = electrostatic_kernel(a, b) + mirror_static_g(m, a, b);
    CHECK(rel_dev(full, ref) < 1e-5);
}

TEST_CASE("dielectric half-space static limit follows f = (eps-1)/(eps+1)") {
    LayerStack s = half_space_pec();
    s.layers[0].permittivity.model = complexd(3.0, 0.0);
    LayeredGreens g(s);
    MirrorSpec m{Vec3::Zero(), Vec3(0, 0, 1), 0.5};
    const Vec3 r(0.1, 0.0, 0.5);
    CHECK(rel_dev(g.static_lambda_scattered(r, r), mirror_static_g(m, r, r)) <
          1e-5);
}

TEST_CASE("planar cavity static limit matches the two-mirror image series") {
    LayerStack s;
    s.layers.resize(3);
    s.layers[0].permittivity.model = DrudeModel{1e4, 0.0};
    s.layers[1].permittivity.model = complexd(1.0, 0.0);
    s.layers[1].thickness = 1.0;
    s.layers[2].permittivity.model = complexd(3.0, 0.0);
    s.z0 = 0.0;
    s.emitter_layer = 1;
    LayeredGreens g(s);

    ImageSeriesConfig ic;
    ic.z1 = 0.0;
    ic.z2 = 1.0;
    ic.f1 = 1.0;
    ic.f2 = 0.5;
    const Vec3 r(0.2, 0.1, 0.4), rp(-0.1, 0.3, 0.65);
    CHECK(rel_dev(g.static_lambda_scattered(r, r),
                  image_series_static(ic, r, r)) < 1e-5);
    CHECK(rel_dev(g.static_lambda_scattered(r, rp),
                  image_series_static(ic, r, rp)) < 1e-5);
}

TEST_CASE("layered scattered G is reciprocal at finite frequency") {
    LayerStack s = half_space_pec();
    s.layers[0].permittivity.model = complexd(2.0, 0.5);
    const Vec3 r(0.0, 0.0, 0.4), rp(0.5, -0.2, 0.8);
    const Dyadic33 g = layered_scattered_g(s, r, rp, 1.3);
    const Dyadic33 gt = layered_scattered_g(s, rp, r, 1.3);
    CHECK((g - gt.transpose()).cwiseAbs().maxCoeff() /
              g.cwiseAbs().maxCoeff() <
          1e-7);
}

TEST_CASE("all-vacuum stack scatters nothing") {
    LayerStack s;
    s.layers.resize(2);
    s.emitter_layer = 1;
    const Dyadic33 g =
        layered_scattered_g(s, Vec3(0, 0, 0.5), Vec3(0, 0, 0.7), 1.0);
    CHECK(g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("passivity: Im G_S,zz at a lossy surface is nonnegative") {
    LayerStack s = half_space_pec();
    s.layers[0].permittivity.model = complexd(2.0, 1.0);
    for (double z : {0.3, 0.6, 1.0}) {
        const Vec3 r(0, 0, z);
        const Dyadic33 g = layered_scattered_g(s, r, r, 1.0);
        // Im(G0 + GS) >= 0 on the diagonal; Im G0,zz(r,r) = w/(6 pi)
        CHECK(g(2, 2).imag() + 1.0 / (6.0 * pi) >= 0.0);
        CHECK(std::abs(g(0, 1)) < 1e-12);
    }
}

TEST_CASE("layer stack geometry and validation") {
    LayerStack s;
    s.layers.resize(3);
    s.layers[1].thickness = 2.0;
    s.z0 = -1.0;
    s.emitter_layer = 1;
    CHECK_NOTHROW(s.validate());
    CHECK(s.layer_bottom(1) == doctest::Approx(-1.0));
    CHECK(s.layer_top(1) == doctest::Approx(1.0));
    CHECK(s.in_emitter_layer(Vec3(5, 5, 0.0)));
    CHECK_FALSE(s.in_emitter_layer(Vec3(0, 0, 1.5)));

    s.emitter_layer = 0; // semi-infinite vacuum bottom layer is allowed
    CHECK_NOTHROW(s.validate());
    s.emitter_layer = 7;
    CHECK_THROWS_AS(s.validate(), Error);
    s.emitter_layer = 1;
    s.layers[1].permittivity.model = complexd(4.0, 0.0);
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("Drude permittivity is clamped to a minimal loss") {
    PermittivityModel p;
    p.model = DrudeModel{10.0, 0.0};
    const complexd e = p.eps(1.0);
    CHECK(e.real() == doctest::Approx(1.0 - 100.0).epsilon(1e-6));
    CHECK(e.imag() > 0.0);
    CHECK_FALSE(p.is_vacuum());
    PermittivityModel v;
    CHECK(v.is_vacuum());
}
