#include "vcoup/core.hpp"

#include <cmath>
#include <sstream>

namespace vcoup {

void check_roster(const EmitterRoster& roster) {
    for (std::size_t i = 0; i < roster.size(); ++i) {
        if (!is_finite(roster[i].position) || !is_finite(roster[i].dipole))
            throw GeometryError("emitter " + std::to_string(i) +
                                " has non-finite position or dipole");
        for (std::size_t j = i + 1; j < roster.size(); ++j) {
            if ((roster[i].position - roster[j].position).norm() == 0.0) {
                std::ostringstream os;
                os << "emitters " << i << " and " << j
                   << " occupy the same position";
                throw GeometryError(os.str());
            }
        }
    }
}

double interaction_energy(const Vec3& mu_i, const Dyadic33& lambda_block,
                          const Vec3& mu_j) {
    const double re_norm = lambda_block.real().cwiseAbs().maxCoeff();
    const double im_norm = lambda_block.imag().cwiseAbs().maxCoeff();
    if (im_norm > 1e-12 * std::max(re_norm, 1e-300) && im_norm > 1e-300)
        throw InvalidCouplingError(
            "coupling block has a non-negligible imaginary part");
    return mu_i.dot(lambda_block.real() * mu_j);
}

} // namespace vcoup
