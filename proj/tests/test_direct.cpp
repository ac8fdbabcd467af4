#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vcoup/direct.hpp"

using namespace vcoup;

namespace {

EmitterRoster pair_along_z(double rho) {
    EmitterRoster r;
    r.push_back({Vec3(0, 0, 0), Vec3(0, 0, 1)});
    r.push_back({Vec3(0, 0, rho), Vec3(0, 0, 1)});
    return r;
}

double rel_dev(const Dyadic33& a, const Dyadic33& ref) {
    return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("mode-sum coupling reproduces a hand-built two-mode example") {
    DiscreteModeSet set;
    set.roster_size = 2;
    DiscreteMode m1;
    m1.omega = 2.0;
    m1.field = {CVec3(0.0, 0.0, 0.3), CVec3(0.0, 0.0, complexd(0.1, 0.2))};
    DiscreteMode m2;
    m2.omega = 0.5;
    m2.field = {CVec3(0.4, 0.0, 0.0), CVec3(0.0, 0.0, 0.2)};
    set.modes = {m1, m2};

    const CouplingMatrix lam = coupling_from_modes(set, pair_along_z(1.0));
    // lambda_01,zz = Re(0.3 * conj(0.1+0.2i))/2 + 0 = 0.015
    CHECK(lam.block(0, 1)(2, 2).real() == doctest::Approx(0.015));
    // lambda_01,xz comes from mode 2 only: 0.4 * 0.2 / 0.5
    CHECK(lam.block(0, 1)(0, 2).real() == doctest::Approx(0.16));
    CHECK(std::abs(lam.block(0, 1)(1, 2)) < 1e-16);
    // self block includes both modes: zz = 0.09/2, xx = 0.16/0.5
    CHECK(lam.block(0, 0)(2, 2).real() == doctest::Approx(0.045));
    CHECK(lam.block(0, 0)(0, 0).real() == doctest::Approx(0.32));
    // lambda_ji = lambda_ij^T
    CHECK((lam.block(1, 0) - lam.block(0, 1).transpose())
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("residue route equals the electrostatic kernel in free space") {
    FreeSpaceGreens g;
    const auto roster = pair_along_z(0.7);
    const CouplingMatrix lam = coupling_from_residue(g, roster);
    CHECK(rel_dev(lam.block(0, 1),
                  electrostatic_kernel(roster[0].position,
                                       roster[1].position)) < 1e-15);
    CHECK(lam.block(0, 0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("closed-form Gaussian-cutoff kernel matches its series limits") {
    const Vec3 nz(0, 0, 1);
    // large cutoff: tends to the electrostatic kernel
    const Dyadic33 wide = cutoff_kernel_closed_form(8.0, nz, false, 1.0);
    CHECK(rel_dev(wide, electrostatic_kernel(Vec3(0, 0, 0), nz)) < 1e-12);
    // small cutoff: suppressed as (rho Lambda)^3
    const Dyadic33 narrow = cutoff_kernel_closed_form(1e-3, nz, false, 1.0);
    CHECK(narrow.cwiseAbs().maxCoeff() < 1e-7);
    // normalized vs physical scaling at rho = 2
    const Dyadic33 norm = cutoff_kernel_closed_form(1.0, nz, true);
    const Dyadic33 phys = cutoff_kernel_closed_form(1.0, nz, false, 2.0);
    CHECK(rel_dev(norm, Dyadic33(8.0 * pi * 8.0 * phys)) < 1e-14);
}

TEST_CASE("spectral route reproduces the closed form across rho_Lambda") {
    FreeSpaceGreens g;
    for (double rl : {0.25, 0.5, 1.0, 2.0}) {
        const auto roster = pair_along_z(1.0);
        SpectralCutoff cut{CutoffKind::gaussian, 2.0 * pi * rl};
        const CouplingMatrix lam = coupling_from_spectrum(g, roster, cut);
        const Dyadic33 cf =
            cutoff_kernel_closed_form(rl, Vec3(0, 0, 1), false, 1.0);
        CHECK(rel_dev(lam.block(0, 1), cf) < 1e-8);
    }
}

TEST_CASE("frozen spectral values at rho_Lambda = 1") {
    FreeSpaceGreens g;
    SpectralCutoff cut{CutoffKind::gaussian, 2.0 * pi};
    const CouplingMatrix lam =
        coupling_from_spectrum(g, pair_along_z(1.0), cut);
    CHECK(lam.block(0, 1)(2, 2).real() ==
          doctest::Approx(0.0795621743632).epsilon(1e-10));
    CHECK(lam.block(0, 1)(0, 0).real() ==
          doctest::Approx(-0.0396370813487).epsilon(1e-10));
}

TEST_CASE("serial and parallel spectral assemblies agree exactly") {
    FreeSpaceGreens g;
    EmitterRoster roster = pair_along_z(1.0);
    roster.push_back({Vec3(0.8, 0.0, 0.5), Vec3(1, 0, 0)});
    SpectralCutoff cut{CutoffKind::gaussian, 4.0};
    const CouplingMatrix a = coupling_from_spectrum(g, roster, cut);
    const CouplingMatrix b = coupling_from_spectrum_serial(g, roster, cut);
    for (std::size_t i = 0; i < a.blocks.size(); ++i)
        CHECK((a.blocks[i] - b.blocks[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("smooth partials converge monotonically; sharp ones do not") {
    FreeSpaceGreens g;
    const auto roster = pair_along_z(1.0);
    const std::vector<double> grid{0.0, 2.0 * pi * 0.5, 2.0 * pi,
                                   2.0 * pi * 2.0};
    const auto rows = truncation_report(g, roster, grid);
    REQUIRE(rows.size() == 4);
    // omega_max = 0: zero partial, relative error 1
    CHECK(rows[0].partial.frobenius() == 0.0);
    CHECK(rows[0].rel_error_vs_residue == doctest::Approx(1.0));
    // Gaussian partials: error strictly shrinks with the cutoff
    CHECK(rows[1].rel_error_vs_residue > rows[2].rel_error_vs_residue);
    CHECK(rows[2].rel_error_vs_residue > rows[3].rel_error_vs_residue);
    CHECK(rows[3].rel_error_vs_residue < 1e-8);
    // hard partials: O(1) error even at the largest cutoff
    CHECK(rows[3].rel_error_hard > 0.1);
    CHECK(rows[3].partial_hard.cutoff->kind == CutoffKind::hard);
    CHECK(rows[3].partial.cutoff->kind == CutoffKind::gaussian);
}

TEST_CASE("classical energy sums mu.lambda.mu over ordered pairs") {
    CouplingMatrix lam;
    lam.n = 2;
    lam.blocks.assign(4, Dyadic33::Zero());
    lam.block(0, 1)(2, 2) = 0.25;
    lam.block(1, 0)(2, 2) = 0.25;
    const auto roster = pair_along_z(1.0);
    // -2 * (1 * 0.25 * 1)
    CHECK(classical_interaction_energy(lam, roster) ==
          doctest::Approx(-0.5));
}

TEST_CASE("effective Hamiltonian spec carries its pieces through") {
    FreeSpaceGreens g;
    const auto roster = pair_along_z(1.0);
    auto lam = coupling_from_residue(g, roster);
    auto spec = assemble_heff(std::string{"two-level"}, lam, roster);
    CHECK(spec.roster.size() == 2);
    CHECK(spec.lambda.route == CouplingRoute::residue);
    CHECK(std::any_cast<std::string>(spec.matter) == "two-level");
}

TEST_CASE("mode set and cutoff validation") {
    DiscreteModeSet set;
    set.roster_size = 1;
    DiscreteMode m;
    m.omega = -1.0;
    m.field = {CVec3::Zero()};
    set.modes = {m};
    CHECK_THROWS_AS(set.validate(), Error);
    set.modes[0].omega = 1.0;
    set.modes[0].field.clear();
    CHECK_THROWS_AS(set.validate(), DimensionError);

    SpectralCutoff bad{CutoffKind::gaussian, 0.0};
    CHECK_THROWS_AS(bad.validate(), Error);
}
