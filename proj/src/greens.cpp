#include "vcoup/greens.hpp"

#include <cmath>
#include <limits>

namespace vcoup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sqrt with the branch Im >= 0 (and Re >= 0 on the real axis), i.e. waves
// decay away from the stack.
complexd kz_branch(complexd arg) {
    complexd s = std::sqrt(arg);
    if (s.imag() < 0.0) s = -s;
    if (s.imag() == 0.0 && s.real() < 0.0) s = -s;
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// Closed-form kernels

Dyadic33 free_space_g(const Vec3& r, const Vec3& rp, double omega) {
    const Vec3 d = r - rp;
    const double rho = d.norm();
    if (rho == 0.0) throw GeometryError("free_space_g: coincident points");
    if (omega == 0.0)
        throw UseStaticKernelError(
            "free_space_g: omega = 0 is not defined, use the static kernel");
    if (omega < 0.0) throw Error("free_space_g: omega must be >= 0");

    const double k = omega; // c = 1
    const Vec3 n = d / rho;
    const Eigen::Matrix3d nn = n * n.transpose();
    const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();

    const complexd ikr(0.0, k * rho);
    const complexd pre = std::exp(ikr) / (4.0 * pi * rho);
    const complexd longit = (ikr - 1.0) / (k * k * rho * rho);

    Dyadic33 g = pre * ((eye - nn).cast<complexd>() +
                        longit * (eye - 3.0 * nn).cast<complexd>());
    return g;
}

Dyadic33 dipole_kernel(const Vec3& r, const Vec3& rp) {
    const Vec3 d = r - rp;
    const double rho = d.norm();
    if (rho == 0.0) throw GeometryError("dipole_kernel: coincident points");
    const Vec3 n = d / rho;
    Eigen::Matrix3d k =
        (3.0 * (n * n.transpose()) - Eigen::Matrix3d::Identity()) /
        (4.0 * pi * rho * rho * rho);
    return k.cast<complexd>();
}

Dyadic33 electrostatic_kernel(const Vec3& r, const Vec3& rp) {
    return 0.5 * dipole_kernel(r, rp);
}

// ---------------------------------------------------------------------------
// Single static mirror

void MirrorSpec::validate() const {
    if (normal.norm() == 0.0)
        throw GeometryError("mirror normal must be nonzero");
    if (std::abs(strength) > 1.0)
        throw Error("mirror strength must satisfy |f| <= 1");
}

Dyadic33 mirror_static_g(const MirrorSpec& mirror, const Vec3& r,
                         const Vec3& rp) {
    mirror.validate();
    const Vec3 n = mirror.normal.normalized();
    MirrorSpec m{mirror.point, n, mirror.strength};
    const double sr = m.side(r);
    const double srp = m.side(rp);
    if (sr == 0.0 || srp == 0.0 || (sr > 0.0) != (srp > 0.0))
        throw GeometryError(
            "mirror_static_g: points must lie strictly on the same side");
    if (m.strength == 0.0) return Dyadic33::Zero();

    // S_f = f diag(-1,-1,+1) in mirror-adapted coordinates = f (2 n n - I).
    const Eigen::Matrix3d sf =
        m.strength * (2.0 * (n * n.transpose()) - Eigen::Matrix3d::Identity());
    const Dyadic33 k = dipole_kernel(r, m.image(rp));
    return 0.5 * k * sf.cast<complexd>();
}

// ---------------------------------------------------------------------------
// Layer stack

complexd PermittivityModel::eps(double omega) const {
    if (std::holds_alternative<complexd>(model))
        return std::get<complexd>(model);
    const auto& d = std::get<DrudeModel>(model);
    const double gamma = std::max(d.gamma, 1e-6 * d.omega_p);
    const complexd den(omega * omega, gamma * omega);
    if (den == complexd(0.0, 0.0)) return complexd(-kInf, 0.0);
    return 1.0 - d.omega_p * d.omega_p / den;
}

bool PermittivityModel::is_vacuum() const {
    return std::holds_alternative<complexd>(model) &&
           std::get<complexd>(model) == complexd(1.0, 0.0);
}

void LayerStack::validate() const {
    if (layers.size() < 2)
        throw Error("layer stack needs at least 2 layers");
    for (std::size_t l = 1; l + 1 < layers.size(); ++l)
        if (!(layers[l].thickness > 0.0))
            throw Error("interior layer thickness must be positive");
    if (emitter_layer >= layers.size())
        throw Error("emitter layer index out of range");
    if (!layers[emitter_layer].permittivity.is_vacuum())
        throw Error("emitter layer must be vacuum");
    for (const auto& lay : layers)
        if (std::holds_alternative<DrudeModel>(lay.permittivity.model)) {
            const auto& d = std::get<DrudeModel>(lay.permittivity.model);
            if (d.omega_p < 0.0 || d.gamma < 0.0)
                throw Error("Drude parameters must be nonnegative");
        }
}

double LayerStack::layer_bottom(std::size_t l) const {
    if (l == 0) return -kInf;
    double z = z0;
    for (std::size_t i = 1; i < l; ++i) z += layers[i].thickness;
    return z;
}

double LayerStack::layer_top(std::size_t l) const {
    if (l + 1 == layers.size()) return kInf;
    return layer_bottom(l) + (l == 0 ? 0.0 : layers[l].thickness);
}

bool LayerStack::in_emitter_layer(const Vec3& r) const {
    return r.z() > layer_bottom(emitter_layer) &&
           r.z() < layer_top(emitter_layer);
}

// ---------------------------------------------------------------------------
// Sommerfeld integration

namespace {

struct StackAtOmega {
    std::vector<complexd> eps;
    double k{0.0};
    std::size_t j{0}; // emitter layer
    std::vector<double> thickness;
};

struct Reflections {
    complexd rd_s{0.0}, rd_p{0.0}; // generalized, looking down
    complexd ru_s{0.0}, ru_p{0.0}; // generalized, looking up
};

// Fresnel coefficients at the interface from layer a into layer b.
void fresnel(complexd eps_a, complexd eps_b, complexd kza, complexd kzb,
             complexd& rs, complexd& rp) {
    rs = (kza - kzb) / (kza + kzb);
    rp = (eps_b * kza - eps_a * kzb) / (eps_b * kza + eps_a * kzb);
}

Reflections generalized_reflections(const StackAtOmega& s, double krho) {
    const double k2 = s.k * s.k;
    const std::size_t n = s.eps.size();
    std::vector<complexd> kz(n);
    for (std::size_t l = 0; l < n; ++l)
        kz[l] = kz_branch(s.eps[l] * k2 - krho * krho);

    Reflections out;
    // downward: start from the bottommost interface (between layers 1 and 0)
    if (s.j > 0) {
        complexd Rs(0.0), Rp(0.0);
        fresnel(s.eps[1], s.eps[0], kz[1], kz[0], Rs, Rp);
        for (std::size_t l = 2; l <= s.j; ++l) {
            complexd rs, rp;
            fresnel(s.eps[l], s.eps[l - 1], kz[l], kz[l - 1], rs, rp);
            const complexd ph =
                std::exp(complexd(0.0, 2.0) * kz[l - 1] * s.thickness[l - 1]);
            Rs = (rs + Rs * ph) / (1.0 + rs * Rs * ph);
            Rp = (rp + Rp * ph) / (1.0 + rp * Rp * ph);
        }
        out.rd_s = Rs;
        out.rd_p = Rp;
    }
    // upward: start from the topmost interface
    if (s.j + 1 < n) {
        complexd Rs(0.0), Rp(0.0);
        fresnel(s.eps[n - 2], s.eps[n - 1], kz[n - 2], kz[n - 1], Rs, Rp);
        for (std::size_t l = n - 2; l > s.j; --l) {
            complexd rs, rp;
            fresnel(s.eps[l - 1], s.eps[l], kz[l - 1], kz[l], rs, rp);
            const complexd ph =
                std::exp(complexd(0.0, 2.0) * kz[l] * s.thickness[l]);
            Rs = (rs + Rs * ph) / (1.0 + rs * Rs * ph);
            Rp = (rp + Rp * ph) / (1.0 + rp * Rp * ph);
        }
        out.ru_s = Rs;
        out.ru_p = Rp;
    }
    return out;
}

struct SommerfeldGeometry {
    double zb{0.0}, zt{0.0}; // emitter-layer interfaces (may be +-inf)
    double L{kInf};
    double zbar{0.0}, zbarp{0.0}; // heights above zb (or raw z if no below)
    double ubar{0.0}, ubarp{0.0}; // depths below zt
    double R{0.0};
    double c1{1.0}, s1{0.0}, c2{1.0}, s2{0.0};
    bool has_below{false}, has_above{false};
};

// Bracket dyad of the Sommerfeld integrand at one krho; excludes the
// (i/8 pi^2) prefactor and the krho/kz dkrho measure.
Dyadic33 integrand_bracket(const StackAtOmega& s, const SommerfeldGeometry& g,
                           double krho, complexd kz) {
    const Reflections refl = generalized_reflections(s, krho);

    const double x = krho * g.R;
    const double j0 = std::cyl_bessel_j(0, x);
    const double j1 = std::cyl_bessel_j(1, x);
    const double j2 = std::cyl_bessel_j(2, x);

    // phase factors; all exponents have nonnegative decay
    const complexd ik = complexd(0.0, 1.0) * kz;
    const complexd e1 =
        g.has_below ? std::exp(ik * (g.zbar + g.zbarp)) : complexd(0.0);
    const complexd e3 =
        g.has_above ? std::exp(ik * (g.ubar + g.ubarp)) : complexd(0.0);
    complexd e2(0.0), e4(0.0), eL2(0.0);
    if (g.has_below && g.has_above) {
        e2 = std::exp(ik * (2.0 * g.L + g.zbar - g.zbarp));
        e4 = std::exp(ik * (2.0 * g.L - g.zbar + g.zbarp));
        eL2 = std::exp(ik * (2.0 * g.L));
    }

    Dyadic33 m = Dyadic33::Zero();

    // s polarization: same transverse dyad for every bounce family
    {
        const complexd rd = refl.rd_s, ru = refl.ru_s;
        const complexd D = 1.0 - rd * ru * eL2;
        const complexd cs =
            (rd * e1 + ru * e3 + rd * ru * (e2 + e4)) / D;
        m(0, 0) += cs * pi * (j0 + g.c2 * j2);
        m(0, 1) += cs * (-pi * g.s2 * j2);
        m(1, 0) += cs * (-pi * g.s2 * j2);
        m(1, 1) += cs * pi * (j0 - g.c2 * j2);
    }

    // p polarization: bounce families carry (a,b) signs from the up/down
    // unit vectors e_p(+-) = (-a kz cos, -a kz sin, krho)/k
    {
        const complexd rd = refl.rd_p, ru = refl.ru_p;
        const complexd D = 1.0 - rd * ru * eL2;
        const complexd cm = (rd * e1 + ru * e3) / D;          // ab = -1
        const complexd cp = rd * ru * (e2 + e4) / D;          // ab = +1
        const complexd ca = (rd * e1 + rd * ru * e2 - ru * e3 - ru * rd * e4) / D;
        const complexd cb = (-rd * e1 + rd * ru * e2 + ru * e3 - ru * rd * e4) / D;
        const complexd cz = (rd * e1 + rd * ru * e2 + ru * e3 + ru * rd * e4) / D;

        const double k2 = s.k * s.k;
        const complexd kz2 = kz * kz;
        const complexd tfac = kz2 / k2;
        const complexd ab = cp - cm;
        m(0, 0) += ab * tfac * pi * (j0 - g.c2 * j2);
        m(0, 1) += ab * tfac * (-pi * g.s2 * j2);
        m(1, 0) += ab * tfac * (-pi * g.s2 * j2);
        m(1, 1) += ab * tfac * pi * (j0 + g.c2 * j2);

        const complexd zfac = kz * krho / k2 * complexd(0.0, 2.0 * pi) * j1;
        m(0, 2) += -ca * zfac * g.c1;
        m(1, 2) += -ca * zfac * g.s1;
        m(2, 0) += -cb * zfac * g.c1;
        m(2, 1) += -cb * zfac * g.s1;

        m(2, 2) += cz * krho * krho / k2 * 2.0 * pi * j0;
    }
    return m;
}

SommerfeldGeometry make_geometry(const LayerStack& stack, const Vec3& r,
                                 const Vec3& rp) {
    SommerfeldGeometry g;
    g.zb = stack.layer_bottom(stack.emitter_layer);
    g.zt = stack.layer_top(stack.emitter_layer);
    g.has_below = stack.emitter_layer > 0;
    g.has_above = stack.emitter_layer + 1 < stack.layers.size();
    g.L = (g.has_below && g.has_above) ? (g.zt - g.zb) : kInf;
    g.zbar = g.has_below ? (r.z() - g.zb) : 0.0;
    g.zbarp = g.has_below ? (rp.z() - g.zb) : 0.0;
    g.ubar = g.has_above ? (g.zt - r.z()) : 0.0;
    g.ubarp = g.has_above ? (g.zt - rp.z()) : 0.0;

    const double dx = r.x() - rp.x();
    const double dy = r.y() - rp.y();
    g.R = std::hypot(dx, dy);
    if (g.R > 0.0) {
        const double psi = std::atan2(dy, dx);
        g.c1 = std::cos(psi);
        g.s1 = std::sin(psi);
        g.c2 = std::cos(2.0 * psi);
        g.s2 = std::sin(2.0 * psi);
    }
    return g;
}

// Smallest vertical decay distance among the active bounce families.
double min_decay_distance(const SommerfeldGeometry& g) {
    double zmin = kInf;
    if (g.has_below) zmin = std::min(zmin, g.zbar + g.zbarp);
    if (g.has_above) zmin = std::min(zmin, g.ubar + g.ubarp);
    if (g.has_below && g.has_above)
        zmin = std::min(zmin, 2.0 * g.L - std::abs(g.zbar - g.zbarp));
    return zmin;
}

} // namespace

Dyadic33 layered_scattered_g(const LayerStack& stack, const Vec3& r,
                             const Vec3& rp, double omega,
                             const SommerfeldOptions& opt) {
    stack.validate();
    if (!stack.in_emitter_layer(r) || !stack.in_emitter_layer(rp))
        throw GeometryError(
            "layered_scattered_g: point outside the emitter layer");
    if (!(omega > 0.0))
        throw Error("layered_scattered_g: omega must be > 0 "
                    "(static values go through the residue route)");

    // all-vacuum stack scatters nothing
    bool all_vacuum = true;
    for (const auto& lay : stack.layers)
        if (!lay.permittivity.is_vacuum()) all_vacuum = false;
    if (all_vacuum) return Dyadic33::Zero();

    StackAtOmega s;
    s.k = omega;
    s.j = stack.emitter_layer;
    s.eps.resize(stack.layers.size());
    s.thickness.resize(stack.layers.size(), 0.0);
    for (std::size_t l = 0; l < stack.layers.size(); ++l) {
        s.eps[l] = stack.layers[l].permittivity.eps(omega);
        if (l > 0 && l + 1 < stack.layers.size())
            s.thickness[l] = stack.layers[l].thickness;
    }

    const SommerfeldGeometry g = make_geometry(stack, r, rp);
    const double zmin = min_decay_distance(g);
    if (!(zmin > 0.0))
        throw GeometryError("layered_scattered_g: point on an interface");

    const double k = omega;

    // propagating part: krho = k sin t, measure (krho/kz) dkrho = k sin t dt
    auto fprop = [&](double t) -> Dyadic33 {
        const double krho = k * std::sin(t);
        const complexd kz(k * std::cos(t), 0.0);
        return (k * std::sin(t)) * integrand_bracket(s, g, krho, kz);
    };
    // resolve the e^{i k cos t Z} / J_n(k sin t R) oscillations
    const double osc = k * (zmin + g.R + (std::isfinite(g.L) ? 2.0 * g.L : 0.0));
    const int nseg = std::max(1, static_cast<int>(osc / 3.0));
    std::vector<double> breaks;
    for (int i = 0; i <= nseg; ++i)
        breaks.push_back(0.5 * pi * static_cast<double>(i) / nseg);

    double err_p = 0.0, err_e = 0.0;
    Dyadic33 ip = quad::integrate_segments<Dyadic33>(fprop, breaks,
                                                     Dyadic33::Zero(), opt.tol,
                                                     &err_p);

    // evanescent part: krho = k cosh t, measure -> -i k cosh t dt
    const double tmax = std::asinh(opt.evanescent_decay / (k * zmin));
    auto fevan = [&](double t) -> Dyadic33 {
        const double krho = k * std::cosh(t);
        const complexd kz(0.0, k * std::sinh(t));
        return complexd(0.0, -k * std::cosh(t)) *
               integrand_bracket(s, g, krho, kz);
    };
    const double osc_e = std::max(1.0, opt.evanescent_decay * g.R / zmin / 3.0);
    const int nseg_e = std::max(2, static_cast<int>(osc_e));
    std::vector<double> breaks_e;
    for (int i = 0; i <= nseg_e; ++i)
        breaks_e.push_back(tmax * static_cast<double>(i) / nseg_e);
    Dyadic33 ie = quad::integrate_segments<Dyadic33>(fevan, breaks_e,
                                                     Dyadic33::Zero(), opt.tol,
                                                     &err_e);

    return complexd(0.0, 1.0 / (8.0 * pi * pi)) * (ip + ie);
}

// ---------------------------------------------------------------------------
// LayeredGreens evaluator

LayeredGreens::LayeredGreens(LayerStack stack, SommerfeldOptions opt)
    : stack_(std::move(stack)), opt_(opt) {
    stack_.validate();
}

Dyadic33 LayeredGreens::full(const Vec3& r, const Vec3& rp,
                             double omega) const {
    return free_space_g(r, rp, omega) + layered_scattered_g(stack_, r, rp,
                                                            omega, opt_);
}

Dyadic33 LayeredGreens::scattered(const Vec3& r, const Vec3& rp,
                                  double omega) const {
    return layered_scattered_g(stack_, r, rp, omega, opt_);
}

Dyadic33 LayeredGreens::static_lambda_scattered(const Vec3& r,
                                                const Vec3& rp) const {
    // small-omega evaluation with one Richardson step in omega^2
    const SommerfeldGeometry g = make_geometry(stack_, r, rp);
    const double zmin = min_decay_distance(g);
    const double dchar = std::max({g.R, zmin, (r - rp).norm()});
    if (!(dchar > 0.0) || !std::isfinite(dchar))
        throw StaticLimitError("static extrapolation: degenerate geometry");
    const double w1 = 1e-4 / dchar;
    const double w2 = 2.0 * w1;

    auto lam = [&](double w) -> Eigen::Matrix3d {
        const Dyadic33 gs = layered_scattered_g(stack_, r, rp, w, opt_);
        return (0.5 * w * w) * gs.real();
    };
    Eigen::Matrix3d l1 = lam(w1);
    Eigen::Matrix3d l2 = lam(w2);
    Eigen::Matrix3d l0 = (4.0 * l1 - l2) / 3.0;
    if (!l0.allFinite())
        throw StaticLimitError("static extrapolation produced non-finite values");
    return l0.cast<complexd>();
}

Dyadic33 LayeredGreens::static_lambda(const Vec3& r, const Vec3& rp) const {
    Dyadic33 s = static_lambda_scattered(r, rp);
    if ((r - rp).norm() > 0.0) s += electrostatic_kernel(r, rp);
    return s;
}

} // namespace vcoup
