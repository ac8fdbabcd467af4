#include "vcoup/direct.hpp"

#include <cmath>

#include "vcoup/parallel.hpp"

namespace vcoup {

void DiscreteModeSet::validate() const {
    for (std::size_t n = 0; n < modes.size(); ++n) {
        const auto& m = modes[n];
        if (!(m.omega > 0.0))
            throw Error("mode " + std::to_string(n) +
                        " has non-positive frequency");
        if (m.field.size() != roster_size)
            throw DimensionError("mode " + std::to_string(n) +
                                 " field vector count does not match roster");
        for (const auto& f : m.field)
            if (!f.allFinite()) throw Error("non-finite mode field");
    }
}

double CouplingMatrix::frobenius() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.cwiseAbs2().sum();
    return std::sqrt(s);
}

CouplingMatrix coupling_from_modes(const DiscreteModeSet& modes,
                                   const EmitterRoster& emitters) {
    modes.validate();
    if (modes.roster_size != emitters.size())
        throw DimensionError("mode set was sampled on a different roster");
    if (modes.modes.empty()) throw Error("empty mode set");

    const std::size_t n = emitters.size();
    CouplingMatrix out;
    out.n = n;
    out.route = CouplingRoute::modes;
    out.blocks.assign(n * n, Dyadic33::Zero());
    for (const auto& m : modes.modes) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Dyadic33 d = (m.field[i] * m.field[j].adjoint()) / m.omega;
                out.block(i, j) += d.real().cast<complexd>();
            }
    }
    return out;
}

namespace {

struct PairIndex {
    std::size_t i, j;
};

std::vector<PairIndex> upper_pairs(std::size_t n) {
    std::vector<PairIndex> p;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) p.push_back({i, j});
    return p;
}

// Spectral integrand w Im G / pi with the cutoff weight; self blocks use
// the scattered part only (the divergent free-space self term belongs to
// the free-state Lamb shift).
Dyadic33 spectral_block(const GreensEvaluator& g, const Vec3& ri,
                        const Vec3& rj, bool self, const SpectralCutoff& cut,
                        const quad::Tolerance& tol, double osc_scale,
                        double* err) {
    cut.validate();
    const double wmax =
        cut.kind == CutoffKind::gaussian ? 6.5 * cut.value : cut.value;
    if (wmax == 0.0) {
        if (err) *err = 0.0;
        return Dyadic33::Zero();
    }

    auto f = [&](double w) -> Dyadic33 {
        Dyadic33 gv = self ? g.scattered(ri, rj, w) : g.full(ri, rj, w);
        double weight = 1.0;
        if (cut.kind == CutoffKind::gaussian) {
            const double x = w / cut.value;
            weight = std::exp(-x * x);
        }
        return (w * weight / pi) * gv.imag().cast<complexd>();
    };

    // panels proportional to the sin(w rho) oscillation count
    const int nseg =
        std::max(4, static_cast<int>(std::ceil(wmax * osc_scale / 3.0)));
    std::vector<double> breaks;
    breaks.reserve(nseg + 1);
    for (int s = 0; s <= nseg; ++s)
        breaks.push_back(wmax * static_cast<double>(s) / nseg);

    Dyadic33 val = quad::integrate_segments<Dyadic33>(f, breaks,
                                                      Dyadic33::Zero(), tol,
                                                      err);
    // Eq.-(3)-style Re[.]
    return val.real().cast<complexd>();
}

template <class Loop>
CouplingMatrix spectrum_impl(const GreensEvaluator& g,
                             const EmitterRoster& emitters,
                             const SpectralCutoff& cutoff,
                             const SpectrumOptions& opt, const Loop& loop) {
    check_roster(emitters);
    cutoff.validate();
    const std::size_t n = emitters.size();

    double rho_max = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            rho_max = std::max(
                rho_max, (emitters[i].position - emitters[j].position).norm());
    if (rho_max == 0.0) rho_max = 1.0;

    CouplingMatrix out;
    out.n = n;
    out.route = CouplingRoute::spectrum;
    out.cutoff = cutoff;
    out.blocks.assign(n * n, Dyadic33::Zero());

    const auto pairs = upper_pairs(n);
    std::vector<double> errs(pairs.size(), 0.0);
    loop(static_cast<std::ptrdiff_t>(pairs.size()), [&](std::ptrdiff_t p) {
        const auto [i, j] = pairs[static_cast<std::size_t>(p)];
        const double rho =
            i == j ? rho_max
                   : (emitters[i].position - emitters[j].position).norm();
        out.block(i, j) = spectral_block(
            g, emitters[i].position, emitters[j].position, i == j, cutoff,
            opt.tol, rho, &errs[static_cast<std::size_t>(p)]);
        if (i != j) out.block(j, i) = out.block(i, j).transpose();
    });
    for (double e : errs) out.quadrature_error += e;
    return out;
}

} // namespace

CouplingMatrix coupling_from_spectrum(const GreensEvaluator& g,
                                      const EmitterRoster& emitters,
                                      const SpectralCutoff& cutoff,
                                      const SpectrumOptions& opt) {
    if (opt.parallel_pairs)
        return spectrum_impl(g, emitters, cutoff, opt,
                             [](std::ptrdiff_t n, auto&& b) {
                                 parallel_for(n, b);
                             });
    return coupling_from_spectrum_serial(g, emitters, cutoff, opt);
}

CouplingMatrix coupling_from_spectrum_serial(const GreensEvaluator& g,
                                             const EmitterRoster& emitters,
                                             const SpectralCutoff& cutoff,
                                             const SpectrumOptions& opt) {
    return spectrum_impl(g, emitters, cutoff, opt,
                         [](std::ptrdiff_t n, auto&& b) { serial_for(n, b); });
}

CouplingMatrix coupling_from_residue(const GreensEvaluator& g,
                                     const EmitterRoster& emitters,
                                     bool parallel_pairs) {
    check_roster(emitters);
    const std::size_t n = emitters.size();
    CouplingMatrix out;
    out.n = n;
    out.route = CouplingRoute::residue;
    out.blocks.assign(n * n, Dyadic33::Zero());

    const auto pairs = upper_pairs(n);
    auto body = [&](std::ptrdiff_t p) {
        const auto [i, j] = pairs[static_cast<std::size_t>(p)];
        out.block(i, j) =
            i == j ? g.static_lambda_scattered(emitters[i].position,
                                               emitters[i].position)
                   : g.static_lambda(emitters[i].position,
                                     emitters[j].position);
        if (i != j) out.block(j, i) = out.block(i, j).transpose();
    };
    if (parallel_pairs)
        parallel_for(static_cast<std::ptrdiff_t>(pairs.size()), body);
    else
        serial_for(static_cast<std::ptrdiff_t>(pairs.size()), body);
    return out;
}

Dyadic33 cutoff_kernel_closed_form(double rho_over_lambda, const Vec3& n,
                                   bool normalized, double rho) {
    if (!(rho_over_lambda >= 0.0) || !std::isfinite(rho_over_lambda))
        throw Error("cutoff_kernel_closed_form: rho_over_lambda must be "
                    "finite and nonnegative");
    const Vec3 nu = n.normalized();
    const Eigen::Matrix3d nn = nu * nu.transpose();
    const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();

    const double x = rho_over_lambda;
    const double gauss = std::exp(-pi * pi * x * x);
    const double trans = 4.0 * std::pow(pi, 2.5) * x * x * x * gauss;
    const double bracket =
        std::erf(pi * x) - 2.0 * std::sqrt(pi) * x * gauss;

    Eigen::Matrix3d kern = trans * (eye - nn) + bracket * (3.0 * nn - eye);
    if (!normalized) kern /= 8.0 * pi * rho * rho * rho;
    return kern.cast<complexd>();
}

EffectiveHamiltonianSpec assemble_heff(std::any hle, CouplingMatrix lam,
                                       EmitterRoster roster) {
    if (lam.n != roster.size())
        throw DimensionError("coupling matrix does not match roster size");
    check_roster(roster);
    return EffectiveHamiltonianSpec{std::move(hle), std::move(lam),
                                    std::move(roster)};
}

double classical_interaction_energy(const CouplingMatrix& lam,
                                    const EmitterRoster& roster) {
    if (lam.n != roster.size())
        throw DimensionError("coupling matrix does not match roster size");
    double e = 0.0;
    for (std::size_t i = 0; i < lam.n; ++i)
        for (std::size_t j = 0; j < lam.n; ++j)
            e -= interaction_energy(roster[i].dipole, lam.block(i, j),
                                    roster[j].dipole);
    return e;
}

std::vector<TruncationRow> truncation_report(const GreensEvaluator& g,
                                             const EmitterRoster& emitters,
                                             const std::vector<double>& grid,
                                             const SpectrumOptions& opt) {
    if (grid.empty()) throw Error("truncation_report: empty frequency grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw Error("truncation_report: grid must be strictly ascending");

    const CouplingMatrix residue = coupling_from_residue(g, emitters);
    const double ref = residue.frobenius();

    std::vector<TruncationRow> rows(grid.size());
    parallel_for(static_cast<std::ptrdiff_t>(grid.size()),
                 [&](std::ptrdiff_t t) {
                     const auto idx = static_cast<std::size_t>(t);
                     SpectrumOptions o = opt;
                     o.parallel_pairs = false; // rows already run in parallel
                     auto rel_dev = [&](const CouplingMatrix& part) {
                         double dev = 0.0;
                         for (std::size_t b = 0; b < part.blocks.size(); ++b)
                             dev += (part.blocks[b] - residue.blocks[b])
                                        .cwiseAbs2()
                                        .sum();
                         return ref > 0.0 ? std::sqrt(dev) / ref
                                          : std::sqrt(dev);
                     };
                     TruncationRow row;
                     row.omega_max = grid[idx];
                     if (grid[idx] == 0.0) {
                         CouplingMatrix zero;
                         zero.n = emitters.size();
                         zero.blocks.assign(zero.n * zero.n,
                                            Dyadic33::Zero());
                         zero.route = CouplingRoute::spectrum;
                         row.partial = zero;
                         row.partial_hard = std::move(zero);
                     } else {
                         row.partial = coupling_from_spectrum_serial(
                             g, emitters,
                             {CutoffKind::gaussian, grid[idx]}, o);
                         row.partial_hard = coupling_from_spectrum_serial(
                             g, emitters, {CutoffKind::hard, grid[idx]}, o);
                     }
                     row.rel_error_vs_residue = rel_dev(row.partial);
                     row.rel_error_hard = rel_dev(row.partial_hard);
                     rows[idx] = std::move(row);
                 });
    return rows;
}

} // namespace vcoup
