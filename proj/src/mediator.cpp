#include "vcoup/mediator.hpp"

#include <algorithm>
#include <cmath>

#include "vcoup/parallel.hpp"

namespace vcoup {

HmpMatrix assemble_hmp(const std::vector<Mediator>& mediators,
                       const DiscreteModeSet& modes) {
    modes.validate();
    const std::size_t nm = mediators.size();
    const std::size_t np = modes.modes.size();
    if (modes.roster_size != nm)
        throw DimensionError("mode fields are not sampled at the mediator "
                             "positions");
    for (const auto& med : mediators)
        if (!(med.frequency > 0.0))
            throw Error("mediator frequency must be positive");

    const auto total = static_cast<Eigen::Index>(nm + np);
    HmpMatrix out;
    out.n_mediators = nm;
    out.n_modes = np;
    out.h = Eigen::MatrixXcd::Zero(total, total);
    for (std::size_t i = 0; i < nm; ++i)
        out.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            mediators[i].frequency;
    for (std::size_t n = 0; n < np; ++n)
        out.h(static_cast<Eigen::Index>(nm + n),
              static_cast<Eigen::Index>(nm + n)) = modes.modes[n].omega;
    for (std::size_t i = 0; i < nm; ++i)
        for (std::size_t n = 0; n < np; ++n) {
            // Eigen's dot conjugates its first argument: nu^* . E
            const complexd zeta =
                mediators[i].dipole.dot(modes.modes[n].field[i]);
            out.h(static_cast<Eigen::Index>(i),
                  static_cast<Eigen::Index>(nm + n)) = zeta;
            out.h(static_cast<Eigen::Index>(nm + n),
                  static_cast<Eigen::Index>(i)) = std::conj(zeta);
        }
    return out;
}

PolaritonBasis diagonalize_polaritons(const HmpMatrix& h) {
    const double hnorm = h.h.cwiseAbs().maxCoeff();
    if ((h.h - h.h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * hnorm)
        throw Error("diagonalize_polaritons: input is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.h);
    if (solver.info() != Eigen::Success)
        throw Error("diagonalize_polaritons: eigensolver failed");

    PolaritonBasis out;
    out.frequencies = solver.eigenvalues(); // already ascending
    out.u = solver.eigenvectors();

    // deterministic phase: first nonzero component made real positive
    for (Eigen::Index c = 0; c < out.u.cols(); ++c) {
        for (Eigen::Index r = 0; r < out.u.rows(); ++r) {
            const complexd v = out.u(r, c);
            if (std::abs(v) > 1e-12) {
                out.u.col(c) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }

    out.stable = out.frequencies.minCoeff() > 0.0;
    return out;
}

Eigen::MatrixXcd d_matrix(const HmpMatrix& h, DMethod method) {
    const auto n = static_cast<Eigen::Index>(h.n_mediators);
    const auto m = static_cast<Eigen::Index>(h.n_modes);
    switch (method) {
    case DMethod::eigensum: {
        PolaritonBasis pol = diagonalize_polaritons(h);
        if (!pol.stable) {
            Eigen::Index bad = 0;
            pol.frequencies.minCoeff(&bad);
            throw InstabilityError(
                "d_matrix: polariton " + std::to_string(bad) +
                " has non-positive frequency " +
                std::to_string(pol.frequencies(bad)));
        }
        const Eigen::MatrixXcd c = pol.mediator_block(h.n_mediators);
        return c * pol.frequencies.cwiseInverse().asDiagonal() * c.adjoint();
    }
    case DMethod::inverse_block: {
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(h.h);
        if (!lu.isInvertible())
            throw Error("d_matrix: singular block Hamiltonian");
        return lu.inverse().topLeftCorner(n, n);
    }
    case DMethod::schur: {
        const Eigen::MatrixXcd omega = h.h.bottomRightCorner(m, m);
        const Eigen::MatrixXcd zeta = h.h.topRightCorner(n, m);
        Eigen::FullPivLU<Eigen::MatrixXcd> lu_omega(omega);
        if (!lu_omega.isInvertible())
            throw Error("d_matrix: singular photon block");
        const Eigen::MatrixXcd schur =
            h.h.topLeftCorner(n, n) - zeta * lu_omega.solve(zeta.adjoint());
        Eigen::FullPivLU<Eigen::MatrixXcd> lu_s(schur);
        if (!lu_s.isInvertible())
            throw Error("d_matrix: singular Schur complement");
        return lu_s.inverse();
    }
    }
    throw Error("d_matrix: unknown method");
}

namespace {

double common_mediator_frequency(const std::vector<Mediator>& mediators) {
    if (mediators.empty()) throw Error("no mediators");
    const double omega0 = mediators.front().frequency;
    for (const auto& m : mediators)
        if (std::abs(m.frequency - omega0) > 1e-12 * omega0)
            throw UnsupportedConfigurationError(
                "perturbative/electrostatic xi requires a single common "
                "mediator frequency");
    return omega0;
}

} // namespace

XiMatrix xi_matrix(const std::vector<Mediator>& mediators,
                   const DiscreteModeSet& modes, XiMethod method) {
    const auto n = static_cast<Eigen::Index>(mediators.size());
    XiMatrix out;
    out.method = method;
    out.xi = Eigen::MatrixXcd::Zero(n, n);

    if (method == XiMethod::exact) {
        const HmpMatrix h = assemble_hmp(mediators, modes);
        const Eigen::MatrixXcd d = d_matrix(h, DMethod::eigensum);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                out.xi(i, j) = std::conj(mediators[i].matter_coupling) *
                               d(i, j) * mediators[j].matter_coupling;
        return out;
    }
    if (method == XiMethod::electrostatic)
        throw UnsupportedConfigurationError(
            "electrostatic xi needs a Green's evaluator; use "
            "xi_matrix_electrostatic");

    // perturbative expansion around zeta/Omega -> 0
    const double omega0 = common_mediator_frequency(mediators);
    const HmpMatrix h = assemble_hmp(mediators, modes); // reuses zeta fill
    const Eigen::MatrixXcd zeta =
        h.h.topRightCorner(n, static_cast<Eigen::Index>(modes.modes.size()));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            complexd modesum(0.0);
            for (std::size_t k = 0; k < modes.modes.size(); ++k) {
                const auto ki = static_cast<Eigen::Index>(k);
                modesum += zeta(i, ki) * std::conj(zeta(j, ki)) /
                           modes.modes[k].omega;
            }
            complexd v = modesum / (omega0 * omega0);
            if (i == j) v += 1.0 / omega0;
            out.xi(i, j) = std::conj(mediators[i].matter_coupling) * v *
                           mediators[j].matter_coupling;
        }
    return out;
}

XiMatrix xi_matrix_electrostatic(const std::vector<Mediator>& mediators,
                                 const GreensEvaluator& g) {
    const double omega0 = common_mediator_frequency(mediators);
    const auto n = static_cast<Eigen::Index>(mediators.size());
    XiMatrix out;
    out.method = XiMethod::electrostatic;
    out.xi = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto iu = static_cast<std::size_t>(i);
            const auto ju = static_cast<std::size_t>(j);
            const Dyadic33 lam =
                i == j ? g.static_lambda_scattered(mediators[iu].position,
                                                   mediators[ju].position)
                       : g.static_lambda(mediators[iu].position,
                                         mediators[ju].position);
            // [w^2 nu_i^* . G . nu_j]_0 / 2 = nu_i^* . lambda . nu_j
            const complexd contraction =
                (mediators[iu].dipole.adjoint() * lam *
                 mediators[ju].dipole)(0, 0);
            complexd v = contraction / (omega0 * omega0);
            if (i == j) v += 1.0 / omega0;
            out.xi(i, j) = std::conj(mediators[iu].matter_coupling) * v *
                           mediators[ju].matter_coupling;
        }
    return out;
}

std::vector<SweepRow> resonance_sweep(std::vector<Mediator> mediators,
                                      const DiscreteModeSet& modes,
                                      const std::vector<double>& omega_sweep) {
    if (mediators.size() < 2)
        throw Error("resonance_sweep needs at least two mediators");
    modes.validate();
    if (omega_sweep.empty()) throw Error("empty sweep grid");

    std::vector<SweepRow> rows(omega_sweep.size());
    parallel_for(
        static_cast<std::ptrdiff_t>(omega_sweep.size()),
        [&](std::ptrdiff_t t) {
            const auto idx = static_cast<std::size_t>(t);
            const double omega_med = omega_sweep[idx];
            std::vector<Mediator> meds = mediators;
            for (auto& m : meds) m.frequency = omega_med;

            const HmpMatrix h = assemble_hmp(meds, modes);
            const auto nm = static_cast<Eigen::Index>(meds.size());
            const double zeta_max =
                h.h.topRightCorner(nm, h.h.cols() - nm).cwiseAbs().maxCoeff();

            SweepRow row;
            row.omega_mediator = omega_med;
            row.perturbative_ok = zeta_max <= 0.05 * omega_med;

            PolaritonBasis pol = diagonalize_polaritons(h);
            if (!pol.stable)
                throw InstabilityError(
                    "resonance_sweep: unstable polariton spectrum at "
                    "Omega = " + std::to_string(omega_med));
            row.polariton_frequencies.assign(
                pol.frequencies.data(),
                pol.frequencies.data() + pol.frequencies.size());

            const Eigen::MatrixXcd c = pol.mediator_block(meds.size());
            const Eigen::MatrixXcd d =
                c * pol.frequencies.cwiseInverse().asDiagonal() * c.adjoint();

            const complexd gnorm =
                std::conj(meds[0].matter_coupling) * meds[1].matter_coupling;
            row.xi_offdiag = gnorm * d(0, 1);
            row.xi_offdiag_normalized = d(0, 1) * omega_med * omega_med;

            // contrast: keep only the polariton closest to Omega
            Eigen::Index nearest = 0;
            (pol.frequencies.array() - omega_med)
                .abs()
                .minCoeff(&nearest);
            const complexd d_trunc = c(0, nearest) *
                                     std::conj(c(1, nearest)) /
                                     pol.frequencies(nearest);
            row.xi_truncated_normalized = d_trunc * omega_med * omega_med;
            rows[idx] = std::move(row);
        });
    return rows;
}

} // namespace vcoup
