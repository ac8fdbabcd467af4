// oracle.hpp — independent brute-force verifiers: Fock-truncated exact
// diagonalization of the full light-matter Hamiltonian, and image-dipole
// series for mirror geometries.

#pragma once

#include <cstdint>
#include <vector>

#include "vcoup/core.hpp"
#include "vcoup/direct.hpp"
#include "vcoup/greens.hpp"

namespace vcoup {

// Two-level emitters (splitting eps_i, dipole operator mu_i sigma_x)
// coupled to a discrete mode set, truncated at n_max photons per mode.
struct FockModel {
    EmitterRoster emitters;
    std::vector<double> splittings; // eps_i per emitter
    DiscreteModeSet modes;
    int n_max{10};
    bool include_dipole_self_energy{false};
    std::uint64_t dimension_limit{1u << 20};

    void validate() const;
    std::uint64_t dimension() const;
};

// Lowest eigenvalue of the full Hamiltonian in the product basis. Dense
// solve below dimension 4096, Lanczos above.
double exact_ground_energy(const FockModel& model);

// Ground energy of the matter-only effective Hamiltonian
// H_le - sum_ij (mu_i . lambda_ij . mu_j) sx_i sx_j with lambda from
// coupling_from_modes on the model's mode set.
double effective_ground_energy(const FockModel& model);

struct TraceoutRow {
    double eps_over_omega{0.0};
    double energy_error{0.0};
};

// Scales all splittings to eps = ratio * omega_ref and tabulates
// |E_g(full) - E_g(H_eff)| per grid point.
std::vector<TraceoutRow> traceout_error_sweep(const FockModel& base,
                                              double omega_ref,
                                              const std::vector<double>& grid);

// Two parallel mirrors normal to z.
struct ImageSeriesConfig {
    double z1{0.0}, z2{1.0}; // mirror plane positions, z1 < z2
    double f1{1.0}, f2{1.0};
    double truncation_threshold{1e-12}; // |term| / |partial sum|
    std::uint64_t max_images{1000000};

    void validate() const;
};

// Converged alternating image-dipole sum of the static scattered coupling
// kernel for both points strictly inside the gap. Deterministic summation
// order (images by increasing bounce count).
Dyadic33 image_series_static(const ImageSeriesConfig& cfg, const Vec3& r,
                             const Vec3& rp);

} // namespace vcoup
