#ifndef RUINLAB_SURVIVAL_TABLE_HPP
#define RUINLAB_SURVIVAL_TABLE_HPP

#include <cstddef>
#include <vector>

namespace ruinlab {

// Weak counts W(t) < 0 as ruin; Strict counts W(t) <= 0 at some t >= 1.
// Tables under the two conventions are linked by phi(u) = phi_hat(u+1).
enum class RuinConvention { Weak, Strict };

struct SurvivalTable {
    RuinConvention convention = RuinConvention::Weak;
    std::vector<double> phi;  // phi[u] for u = 0..u_max

    double psi(std::size_t u) const { return 1.0 - phi.at(u); }
    std::size_t u_max() const { return phi.empty() ? 0 : phi.size() - 1; }
};

}  // namespace ruinlab

#endif
