#include "vcoup/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

namespace vcoup {

void FockModel::validate() const {
    check_roster(emitters);
    modes.validate();
    if (modes.roster_size != emitters.size())
        throw DimensionError("mode set roster does not match emitters");
    if (splittings.size() != emitters.size())
        throw DimensionError("splittings count does not match emitters");
    if (n_max < 1) throw Error("n_max must be >= 1");
    if (dimension() > dimension_limit)
        throw DimensionError("Fock model dimension " +
                             std::to_string(dimension()) +
                             " exceeds the configured limit");
}

std::uint64_t FockModel::dimension() const {
    std::uint64_t d = std::uint64_t{1} << emitters.size();
    for (std::size_t n = 0; n < modes.modes.size(); ++n) {
        d *= static_cast<std::uint64_t>(n_max + 1);
        if (d > (std::uint64_t{1} << 40)) return d; // avoid overflow games
    }
    return d;
}

namespace {

using SpMat = Eigen::SparseMatrix<complexd>;
using Triplet = Eigen::Triplet<complexd>;

struct FockBasis {
    std::size_t n_spins, n_modes;
    int n_levels; // n_max + 1
    std::uint64_t dim;

    std::uint64_t spin_of(std::uint64_t idx) const {
        return idx & ((std::uint64_t{1} << n_spins) - 1);
    }
    // occupation of mode n
    int occ(std::uint64_t idx, std::size_t n) const {
        std::uint64_t rest = idx >> n_spins;
        for (std::size_t k = 0; k < n; ++k)
            rest /= static_cast<std::uint64_t>(n_levels);
        return static_cast<int>(rest % static_cast<std::uint64_t>(n_levels));
    }
    std::uint64_t with_occ_shift(std::uint64_t idx, std::size_t n,
                                 int delta) const {
        std::uint64_t stride = std::uint64_t{1} << n_spins;
        for (std::size_t k = 0; k < n; ++k)
            stride *= static_cast<std::uint64_t>(n_levels);
        return idx + static_cast<std::uint64_t>(delta) * stride;
    }
    std::uint64_t flip_spin(std::uint64_t idx, std::size_t i) const {
        return idx ^ (std::uint64_t{1} << i);
    }
};

double dipole_self_energy_constant(const FockModel& m) {
    double c = 0.0;
    for (const auto& mode : m.modes.modes) {
        complexd tot(0.0);
        for (std::size_t i = 0; i < m.emitters.size(); ++i)
            tot += m.emitters[i].dipole.cast<complexd>().dot(mode.field[i]);
        c += std::norm(tot) / mode.omega;
    }
    return c;
}

SpMat build_full_hamiltonian(const FockModel& m) {
    const FockBasis b{m.emitters.size(), m.modes.modes.size(), m.n_max + 1,
                      m.dimension()};
    const auto dim = static_cast<Eigen::Index>(b.dim);

    // couplings g_in = mu_i . E_n(r_i)
    std::vector<std::vector<complexd>> g(m.emitters.size());
    for (std::size_t i = 0; i < m.emitters.size(); ++i) {
        g[i].resize(m.modes.modes.size());
        for (std::size_t n = 0; n < m.modes.modes.size(); ++n)
            g[i][n] = m.emitters[i].dipole.cast<complexd>().conjugate().dot(
                m.modes.modes[n].field[i]);
    }

    const double dse =
        m.include_dipole_self_energy ? dipole_self_energy_constant(m) : 0.0;

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(b.dim) *
                  (1 + 2 * m.emitters.size() * m.modes.modes.size()));
    for (std::uint64_t s = 0; s < b.dim; ++s) {
        const auto si = static_cast<Eigen::Index>(s);
        double diag = dse;
        for (std::size_t i = 0; i < m.emitters.size(); ++i)
            diag += 0.5 * m.splittings[i] *
                    (((b.spin_of(s) >> i) & 1u) ? 1.0 : -1.0);
        for (std::size_t n = 0; n < m.modes.modes.size(); ++n)
            diag += m.modes.modes[n].omega * b.occ(s, n);
        trips.emplace_back(si, si, complexd(diag, 0.0));

        // sigma_x^i (g a_n + g^* a_n^dagger)
        for (std::size_t i = 0; i < m.emitters.size(); ++i)
            for (std::size_t n = 0; n < m.modes.modes.size(); ++n) {
                const std::uint64_t sf = b.flip_spin(s, i);
                const int occ = b.occ(s, n);
                if (occ > 0) {
                    const std::uint64_t to = b.with_occ_shift(sf, n, -1);
                    trips.emplace_back(static_cast<Eigen::Index>(to), si,
                                       g[i][n] * std::sqrt(double(occ)));
                }
                if (occ < m.n_max) {
                    const std::uint64_t to = b.with_occ_shift(sf, n, +1);
                    trips.emplace_back(static_cast<Eigen::Index>(to), si,
                                       std::conj(g[i][n]) *
                                           std::sqrt(double(occ + 1)));
                }
            }
    }
    SpMat h(dim, dim);
    h.setFromTriplets(trips.begin(), trips.end());
    return h;
}

// Plain Lanczos for the lowest eigenvalue; ghost eigenvalues do not affect
// the extremal estimate.
double lanczos_lowest(const SpMat& h, int max_iter = 500, double tol = 1e-13) {
    const Eigen::Index dim = h.rows();
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        v(i) = complexd(1.0 + 1e-3 * std::sin(double(i)), 0.0);
    v.normalize();

    Eigen::VectorXcd v_prev = Eigen::VectorXcd::Zero(dim);
    std::vector<double> alpha, beta;
    double last = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXcd w = h * v;
        const double a = std::real(v.dot(w));
        alpha.push_back(a);
        w -= a * v;
        if (!beta.empty()) w -= beta.back() * v_prev;
        const double bnorm = w.norm();

        const auto k = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < k)
                t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const double low = es.eigenvalues()(0);
        if (it > 5 && std::abs(low - last) < tol * std::max(1.0, std::abs(low)))
            return low;
        last = low;

        if (bnorm < 1e-14) return low; // invariant subspace exhausted
        beta.push_back(bnorm);
        v_prev = v;
        v = w / bnorm;
    }
    return last;
}

double lowest_eigenvalue(const SpMat& h) {
    if (h.rows() <= 600) {
        Eigen::MatrixXcd dense(h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
        if (es.info() != Eigen::Success)
            throw Error("dense eigensolver failed");
        return es.eigenvalues()(0);
    }
    return lanczos_lowest(h);
}

} // namespace

double exact_ground_energy(const FockModel& model) {
    model.validate();
    return lowest_eigenvalue(build_full_hamiltonian(model));
}

double effective_ground_energy(const FockModel& model) {
    model.validate();
    const CouplingMatrix lam = coupling_from_modes(model.modes, model.emitters);

    const std::size_t ns = model.emitters.size();
    const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << ns);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);

    const double dse = model.include_dipole_self_energy
                           ? dipole_self_energy_constant(model)
                           : 0.0;

    for (Eigen::Index s = 0; s < dim; ++s) {
        double diag = dse;
        for (std::size_t i = 0; i < ns; ++i)
            diag += 0.5 * model.splittings[i] *
                    (((static_cast<std::uint64_t>(s) >> i) & 1u) ? 1.0 : -1.0);
        h(s, s) += diag;
        for (std::size_t i = 0; i < ns; ++i)
            for (std::size_t j = 0; j < ns; ++j) {
                const double lij = interaction_energy(
                    model.emitters[i].dipole, lam.block(i, j),
                    model.emitters[j].dipole);
                if (i == j) {
                    h(s, s) -= lij; // sx^2 = 1
                } else if (i < j) {
                    // -lij sx_i sx_j, counted once here for each ordered
                    // pair via the symmetric partner below
                    const auto to = static_cast<Eigen::Index>(
                        static_cast<std::uint64_t>(s) ^
                        (std::uint64_t{1} << i) ^ (std::uint64_t{1} << j));
                    h(to, s) -= 2.0 * lij; // (i,j) and (j,i) terms
                }
            }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw Error("effective-model eigensolver failed");
    return es.eigenvalues()(0);
}

std::vector<TraceoutRow> traceout_error_sweep(const FockModel& base,
                                              double omega_ref,
                                              const std::vector<double>& grid) {
    if (!(omega_ref > 0.0)) throw Error("omega_ref must be positive");
    std::vector<TraceoutRow> rows;
    rows.reserve(grid.size());
    for (double ratio : grid) {
        FockModel m = base;
        std::fill(m.splittings.begin(), m.splittings.end(),
                  ratio * omega_ref);
        const double full = exact_ground_energy(m);
        const double eff = effective_ground_energy(m);
        rows.push_back({ratio, std::abs(full - eff)});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Image-dipole series

void ImageSeriesConfig::validate() const {
    if (!(z1 < z2)) throw GeometryError("mirror planes must satisfy z1 < z2");
    if (std::abs(f1) > 1.0 || std::abs(f2) > 1.0)
        throw Error("mirror strengths must satisfy |f| <= 1");
    if (!(truncation_threshold > 0.0))
        throw Error("truncation threshold must be positive");
}

namespace {

struct ImageTerm {
    double z_image;
    double weight;
    bool odd; // odd number of reflections
};

// Image positions of a source at zbar (relative to the lower mirror), for
// bounce count m. Gap length L, strengths f1 (lower), f2 (upper).
std::vector<ImageTerm> images_at_bounce(int m_bounce, double zbar, double L,
                                        double f1, double f2) {
    std::vector<ImageTerm> out;
    if (m_bounce % 2 == 0) {
        const int k = m_bounce / 2;
        const double w = std::pow(f1 * f2, k);
        if (w != 0.0) {
            out.push_back({2.0 * k * L + zbar, w, false});
            out.push_back({-2.0 * k * L + zbar, w, false});
        }
    } else {
        const int k = (m_bounce + 1) / 2; // 1, 2, ...
        // upper branch: 2kL - zbar with f2^k f1^(k-1)
        const double wu = std::pow(f2, k) * std::pow(f1, k - 1);
        if (wu != 0.0) out.push_back({2.0 * k * L - zbar, wu, true});
        // lower branch: -2(k-1)L - zbar with f1^k f2^(k-1)
        const double wl = std::pow(f1, k) * std::pow(f2, k - 1);
        if (wl != 0.0) out.push_back({-2.0 * (k - 1) * L - zbar, wl, true});
    }
    return out;
}

} // namespace

Dyadic33 image_series_static(const ImageSeriesConfig& cfg, const Vec3& r,
                             const Vec3& rp) {
    cfg.validate();
    const double L = cfg.z2 - cfg.z1;
    if (!(r.z() > cfg.z1 && r.z() < cfg.z2 && rp.z() > cfg.z1 &&
          rp.z() < cfg.z2))
        throw GeometryError(
            "image_series_static: points must lie strictly inside the gap");

    const double zbar_p = rp.z() - cfg.z1;
    const Eigen::Matrix3d s_odd =
        (Eigen::Vector3d(-1.0, -1.0, 1.0)).asDiagonal();

    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    std::uint64_t n_images = 0;
    int quiet_levels = 0;
    for (int m = 1;; ++m) {
        const auto terms = images_at_bounce(m, zbar_p, L, cfg.f1, cfg.f2);
        double level_mag = 0.0;
        for (const auto& t : terms) {
            const Vec3 img(rp.x(), rp.y(), cfg.z1 + t.z_image);
            Eigen::Matrix3d k = dipole_kernel(r, img).real();
            if (t.odd) k = (k * s_odd).eval();
            const Eigen::Matrix3d contrib = t.weight * k;
            acc += contrib;
            level_mag += contrib.cwiseAbs().maxCoeff();
            ++n_images;
        }
        const double ref = std::max(acc.cwiseAbs().maxCoeff(), 1e-300);
        if (terms.empty() || level_mag / ref < cfg.truncation_threshold) {
            if (++quiet_levels >= 2) break;
        } else {
            quiet_levels = 0;
        }
        if (n_images > cfg.max_images)
            throw ConvergenceError(
                "image_series_static: series did not converge", level_mag);
    }
    return (0.5 * acc).cast<complexd>();
}

} // namespace vcoup
