// mediator.hpp — indirect coupling pipeline: mediator-photon block
// Hamiltonian, polariton diagonalization, the D matrix by three equivalent
// routes, and the effective matter-matter coupling xi.

#pragma once

#include <vector>

#include "vcoup/core.hpp"
#include "vcoup/direct.hpp"
#include "vcoup/greens.hpp"

namespace vcoup {

// Localized bosonic mediator mode coupled to both the EM field (via its
// dipole nu) and the matter excitations (strength Gamma).
struct Mediator {
    Vec3 position{Vec3::Zero()};
    CVec3 dipole{CVec3::Zero()}; // nu_i
    double frequency{1.0};       // Omega_i > 0
    complexd matter_coupling{0.0}; // Gamma_i
};

// Hermitian (N+M)x(N+M) block matrix [[Omega, zeta], [zeta^dag, omega]].
struct HmpMatrix {
    Eigen::MatrixXcd h;
    std::size_t n_mediators{0};
    std::size_t n_modes{0};
};

struct PolaritonBasis {
    Eigen::VectorXd frequencies; // ascending
    Eigen::MatrixXcd u;          // unitary, rows = (mediators; modes)
    bool stable{true};

    // mediator block C (first N rows of U)
    Eigen::MatrixXcd mediator_block(std::size_t n_mediators) const {
        return u.topRows(static_cast<Eigen::Index>(n_mediators));
    }
};

enum class DMethod { eigensum, inverse_block, schur };
enum class XiMethod { exact, perturbative, electrostatic };

struct XiMatrix {
    Eigen::MatrixXcd xi;
    XiMethod method{XiMethod::exact};
};

// zeta_in = nu_i^* . E_n(r_i); mode fields must be sampled at the mediator
// positions (mode.field[i] corresponds to mediators[i]).
HmpMatrix assemble_hmp(const std::vector<Mediator>& mediators,
                       const DiscreteModeSet& modes);

// Ascending eigenfrequencies with a deterministic eigenvector phase
// convention (first nonzero component real positive). Flags instability
// when any frequency is <= 0.
PolaritonBasis diagonalize_polaritons(const HmpMatrix& h);

// Mediator-block D matrix. All three routes agree to machine precision for
// stable systems.
Eigen::MatrixXcd d_matrix(const HmpMatrix& h, DMethod method);

// Effective coupling xi_ij. Perturbative and electrostatic methods require
// a single common mediator frequency Omega.
XiMatrix xi_matrix(const std::vector<Mediator>& mediators,
                   const DiscreteModeSet& modes, XiMethod method);
XiMatrix xi_matrix_electrostatic(const std::vector<Mediator>& mediators,
                                 const GreensEvaluator& g);

struct SweepRow {
    double omega_mediator{0.0};
    complexd xi_offdiag{0.0};
    complexd xi_offdiag_normalized{0.0};   // xi * Omega^2 / (Gamma_i^* Gamma_j)
    complexd xi_truncated_normalized{0.0}; // single nearest polariton kept
    std::vector<double> polariton_frequencies;
    bool perturbative_ok{true}; // zeta/Omega <= 0.05 for this row
};

// Mediator-frequency sweep of the exact off-diagonal coupling (i=0, j=1)
// against a deliberately truncated single-polariton variant.
std::vector<SweepRow> resonance_sweep(std::vector<Mediator> mediators,
                                      const DiscreteModeSet& modes,
                                      const std::vector<double>& omega_sweep);

} // namespace vcoup
