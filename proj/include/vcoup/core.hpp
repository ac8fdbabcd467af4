// core.hpp — geometry, tensor algebra and shared containers

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vcoup {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Dyadic33 = Eigen::Matrix3cd;
using complexd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Error hierarchy. Everything the library throws derives from Error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GeometryError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct InvalidCouplingError : Error {
    using Error::Error;
};
struct ConvergenceError : Error {
    double achieved_error{0.0};
    ConvergenceError(const std::string& msg, double achieved)
        : Error(msg), achieved_error(achieved) {}
};
struct StaticLimitError : Error {
    using Error::Error;
};
struct UseStaticKernelError : Error {
    using Error::Error;
};
struct InstabilityError : Error {
    using Error::Error;
};
struct UnsupportedConfigurationError : Error {
    using Error::Error;
};

// Dipole at a fixed position. Dipole moments are real vectors.
struct Emitter {
    Vec3 position{Vec3::Zero()};
    Vec3 dipole{Vec3::Zero()};
};

using EmitterRoster = std::vector<Emitter>;

// Throws if two emitters coincide (pairwise rho must stay > 0).
void check_roster(const EmitterRoster& roster);

// Conversion factors to/from internal natural units (hbar = c = eps0 = 1).
struct UnitSystem {
    double hbar_scale{1.0};
    double c_scale{1.0};
    double eps0_scale{1.0};

    void validate() const {
        if (!(hbar_scale > 0.0) || !(c_scale > 0.0) || !(eps0_scale > 0.0))
            throw Error("unit system scales must be positive");
    }
};

// Contraction mu_i . Re(lambda) . mu_j. The block must be real up to
// a 1e-12 relative imaginary residue, otherwise the coupling is invalid.
double interaction_energy(const Vec3& mu_i, const Dyadic33& lambda_block,
                          const Vec3& mu_j);

inline bool is_finite(const Vec3& v) { return v.allFinite(); }
inline bool is_finite(const Dyadic33& d) { return d.allFinite(); }

} // namespace vcoup
