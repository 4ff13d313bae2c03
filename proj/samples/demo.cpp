// Builds the two-well recovery profile for W = (s+1)^2 (s-1/3)^2 (s-1)^2 on a
// short eps ladder and compares its energy with the limit A0 / z21.
#include <cmath>
#include <cstdio>

#include "tripwell/tripwell.hpp"

int main() {
    using namespace tripwell;
    const auto sp = PotentialSpec::triple_well(-1.0, 1.0 / 3.0, 1.0);
    const auto c = limit_constants(sp);
    std::printf("E0 = %.6f  E1 = %.6f  A0 = %.6f  B0 = %.6f\n", c.E0, c.E1, c.A0, c.B0);
    std::printf("two-well limit A0/z21 = %.6f\n", c.A0 / c.z21);

    for (double eps : {0.1, 0.07, 0.05}) {
        GridFunction u = build_two_well_sawtooth(sp, eps, {0.0, 1.0}, c);
        EnergyBreakdown e = energy_Ieps(u, eps, sp);
        double eta = std::cbrt(eps);
        VolumeFractions vf = volume_fractions(u, sp, eta, /*allow_overlap=*/true);
        std::printf("eps = %.3f  teeth = %2.0f  nodes = %6zu  I = %.6f  lambda = (%.4f, %.4f, %.4f)\n", eps,
                    u.meta.at("N"), u.size(), e.total, vf.lambda[0], vf.lambda[1], vf.lambda[2]);
    }
    return 0;
}
