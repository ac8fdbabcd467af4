// greens.hpp — classical dyadic EM Green's functions: free space, a single
// static mirror, and planar multilayer stacks via Sommerfeld integrals.
// Internal units: hbar = c = eps0 = 1.

#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "vcoup/core.hpp"
#include "vcoup/quadrature.hpp"

namespace vcoup {

// ---------------------------------------------------------------------------
// Closed-form kernels

// Free-space dyadic Green's function at omega > 0. Throws
// UseStaticKernelError at omega == 0 (the static physics is exposed through
// electrostatic_kernel and the residue route only) and GeometryError for
// coincident points.
Dyadic33 free_space_g(const Vec3& r, const Vec3& rp, double omega);

// Static coupling kernel (1/2)(3 n n - I)/(4 pi rho^3), i.e. the residue
// (1/2)[w^2 G0]_{w=0} including the pair-counting factor 1/2.
Dyadic33 electrostatic_kernel(const Vec3& r, const Vec3& rp);

// Dipole kernel without the 1/2: (3 n n - I)/(4 pi rho^3).
Dyadic33 dipole_kernel(const Vec3& r, const Vec3& rp);

// ---------------------------------------------------------------------------
// Single static mirror

// A mirror plane with unit normal and a static reflection strength f.
// f = 1 models a perfect electric conductor; f = (eps-1)/(eps+1) a
// dielectric half space.
struct MirrorSpec {
    Vec3 point{Vec3::Zero()};  // any point on the plane
    Vec3 normal{0.0, 0.0, 1.0};
    double strength{1.0}; // |f| <= 1

    void validate() const;
    // Signed distance of r from the plane, positive on the emitter side.
    double side(const Vec3& r) const { return normal.dot(r - point); }
    Vec3 image(const Vec3& r) const { return r - 2.0 * side(r) * normal; }
};

// Static scattered coupling kernel for a single mirror:
// (1/2) K(r, image(rp)) S_f with S_f = f diag(-1,-1,+1) in mirror-adapted
// coordinates. Both points must lie strictly on the same side.
Dyadic33 mirror_static_g(const MirrorSpec& mirror, const Vec3& r,
                         const Vec3& rp);

// ---------------------------------------------------------------------------
// Layered stacks

struct DrudeModel {
    double omega_p{1.0};
    double gamma{0.0}; // clamped to >= 1e-6 * omega_p during evaluation
};

// Permittivity of a layer: constant (possibly complex) or Drude.
struct PermittivityModel {
    std::variant<complexd, DrudeModel> model{complexd{1.0, 0.0}};

    complexd eps(double omega) const;
    bool is_vacuum() const;
};

struct Layer {
    PermittivityModel permittivity{};
    double thickness{0.0}; // ignored for the two outermost layers
};

// Planar stack along z. layers.front() is the semi-infinite bottom layer,
// layers.back() the semi-infinite top one. z0 is the z coordinate of the
// interface between layers[0] and layers[1]; interior interfaces follow
// from the thicknesses. Emitters live in the designated layer, which must
// be vacuum.
struct LayerStack {
    std::vector<Layer> layers;
    double z0{0.0};
    std::size_t emitter_layer{1};

    void validate() const;
    // z of the bottom/top interface of layer l (+-inf for the outer ones).
    double layer_bottom(std::size_t l) const;
    double layer_top(std::size_t l) const;
    bool in_emitter_layer(const Vec3& r) const;
};

struct SommerfeldOptions {
    quad::Tolerance tol{1e-8, 1e-14, 28};
    double evanescent_decay{46.0}; // truncate when exp(-decay) is reached
};

// Scattered part G_S of the layered Green's function for both points in
// the emitter layer, by Sommerfeld integration of generalized s/p
// reflection coefficients. omega > 0.
Dyadic33 layered_scattered_g(const LayerStack& stack, const Vec3& r,
                             const Vec3& rp, double omega,
                             const SommerfeldOptions& opt = {});

// ---------------------------------------------------------------------------
// Evaluator interface

// Abstract evaluator of G(r,r',w) = G0 + G_S. Implementations are immutable
// after construction and safe to call concurrently.
class GreensEvaluator {
public:
    virtual ~GreensEvaluator() = default;

    // Full Green's function at omega > 0.
    virtual Dyadic33 full(const Vec3& r, const Vec3& rp, double omega) const = 0;
    // Scattered part only (zero for free space). Defined for r == rp.
    virtual Dyadic33 scattered(const Vec3& r, const Vec3& rp,
                               double omega) const = 0;
    virtual bool has_analytic_static() const = 0;
    // Residue kernel (1/2)[w^2 G]_{w=0} (analytic or extrapolated).
    virtual Dyadic33 static_lambda(const Vec3& r, const Vec3& rp) const = 0;
    // Scattered contribution to the residue kernel; used for self-blocks.
    virtual Dyadic33 static_lambda_scattered(const Vec3& r,
                                             const Vec3& rp) const = 0;
};

class FreeSpaceGreens final : public GreensEvaluator {
public:
    Dyadic33 full(const Vec3& r, const Vec3& rp, double omega) const override {
        return free_space_g(r, rp, omega);
    }
    Dyadic33 scattered(const Vec3&, const Vec3&, double) const override {
        return Dyadic33::Zero();
    }
    bool has_analytic_static() const override { return true; }
    Dyadic33 static_lambda(const Vec3& r, const Vec3& rp) const override {
        return electrostatic_kernel(r, rp);
    }
    Dyadic33 static_lambda_scattered(const Vec3&, const Vec3&) const override {
        return Dyadic33::Zero();
    }
};

// Layered environment: free-space part plus Sommerfeld scattered part.
// The static limit of G_S is obtained by Richardson extrapolation from two
// small evaluation frequencies.
class LayeredGreens final : public GreensEvaluator {
public:
    explicit LayeredGreens(LayerStack stack, SommerfeldOptions opt = {});

    Dyadic33 full(const Vec3& r, const Vec3& rp, double omega) const override;
    Dyadic33 scattered(const Vec3& r, const Vec3& rp,
                       double omega) const override;
    bool has_analytic_static() const override { return false; }
    Dyadic33 static_lambda(const Vec3& r, const Vec3& rp) const override;
    Dyadic33 static_lambda_scattered(const Vec3& r,
                                     const Vec3& rp) const override;

    const LayerStack& stack() const { return stack_; }

private:
    LayerStack stack_;
    SommerfeldOptions opt_;
};

} // namespace vcoup
