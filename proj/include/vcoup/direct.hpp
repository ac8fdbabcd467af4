// direct.hpp — direct cavity-mediated coupling lambda_ij by three routes:
// discrete mode sums, spectral integration of Im G, and the zero-frequency
// residue; plus cutoff and mode-truncation diagnostics.

#pragma once

#include <any>
#include <optional>
#include <string>
#include <vector>

#include "vcoup/core.hpp"
#include "vcoup/greens.hpp"

namespace vcoup {

// One quantized EM mode sampled at the emitter positions.
struct DiscreteMode {
    double omega{1.0}; // > 0
    std::vector<CVec3> field; // E_n(r_i) per emitter
};

struct DiscreteModeSet {
    std::vector<DiscreteMode> modes;
    std::size_t roster_size{0};

    void validate() const;
};

enum class CouplingRoute { modes, spectrum, residue };

enum class CutoffKind { gaussian, hard };

// Spectral cutoff: Gaussian weight exp(-w^2/wc^2) or hard upper limit.
struct SpectralCutoff {
    CutoffKind kind{CutoffKind::gaussian};
    double value{1.0}; // omega_c for gaussian, omega_max for hard

    void validate() const {
        if (kind == CutoffKind::gaussian && !(value > 0.0))
            throw Error("gaussian cutoff frequency must be positive");
        if (kind == CutoffKind::hard && !(value >= 0.0))
            throw Error("hard cutoff must be nonnegative");
    }
};

// N x N grid of 3x3 coupling blocks lambda_ij.
struct CouplingMatrix {
    std::size_t n{0};
    std::vector<Dyadic33> blocks; // row-major
    CouplingRoute route{CouplingRoute::modes};
    std::optional<SpectralCutoff> cutoff;
    double quadrature_error{0.0};

    Dyadic33& block(std::size_t i, std::size_t j) { return blocks[i * n + j]; }
    const Dyadic33& block(std::size_t i, std::size_t j) const {
        return blocks[i * n + j];
    }
    double frobenius() const;
};

struct EffectiveHamiltonianSpec {
    std::any matter; // opaque matter description, consumed by the oracle
    CouplingMatrix lambda;
    EmitterRoster roster;
};

struct SpectrumOptions {
    quad::Tolerance tol{1e-8, 1e-14, 28};
    bool parallel_pairs{true};
};

// Eq.-(3)-style exact finite sum over discrete modes; includes self blocks.
CouplingMatrix coupling_from_modes(const DiscreteModeSet& modes,
                                   const EmitterRoster& emitters);

// Spectral integral (1/pi) int dw w Im G(r_i, r_j, w) with the cutoff
// weight. Self blocks use the scattered part of G only.
CouplingMatrix coupling_from_spectrum(const GreensEvaluator& g,
                                      const EmitterRoster& emitters,
                                      const SpectralCutoff& cutoff,
                                      const SpectrumOptions& opt = {});

// Zero-frequency residue (1/2)[w^2 G]_{w=0}; self blocks from G_S only.
CouplingMatrix coupling_from_residue(const GreensEvaluator& g,
                                     const EmitterRoster& emitters,
                                     bool parallel_pairs = true);

// Closed form of the Gaussian-cutoff free-space kernel, normalized by
// 8 pi rho^3 when normalized = true, otherwise the physical lambda at
// separation rho along n.
Dyadic33 cutoff_kernel_closed_form(double rho_over_lambda, const Vec3& n,
                                   bool normalized = true, double rho = 1.0);

// Packages H_eff = H_le - sum_ij mu_i . lambda_ij . mu_j. The double sum
// runs over ordered pairs, so each unordered pair appears twice; lambda
// blocks carry the residue kernel (with its factor 1/2) unchanged.
EffectiveHamiltonianSpec assemble_heff(std::any hle, CouplingMatrix lam,
                                       EmitterRoster roster);

// Classical contraction -sum_ij mu_i . lambda_ij . mu_j over ordered pairs.
double classical_interaction_energy(const CouplingMatrix& lam,
                                    const EmitterRoster& roster);

struct TruncationRow {
    double omega_max{0.0};
    CouplingMatrix partial;      // Gaussian cutoff omega_c = omega_max
    double rel_error_vs_residue{0.0};
    CouplingMatrix partial_hard; // hard cutoff at omega_max
    double rel_error_hard{0.0};
};

// Partial couplings on an ascending frequency grid, with Frobenius-norm
// errors against the residue route. Each row carries both the smooth
// (Gaussian) partial, whose error decreases monotonically with the cutoff,
// and the sharp (hard) partial, whose error oscillates with a growing
// envelope — an abrupt mode truncation does not converge at all.
std::vector<TruncationRow> truncation_report(const GreensEvaluator& g,
                                             const EmitterRoster& emitters,
                                             const std::vector<double>& grid,
                                             const SpectrumOptions& opt = {});

// Serial reference implementations (same contract, no pair parallelism).
CouplingMatrix coupling_from_spectrum_serial(const GreensEvaluator& g,
                                             const EmitterRoster& emitters,
                                             const SpectralCutoff& cutoff,
                                             const SpectrumOptions& opt = {});

} // namespace vcoup
