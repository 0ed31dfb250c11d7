#include "dperc/meanfield.hpp"

#include <cmath>
#include <stdexcept>

namespace dperc {

void MeanFieldInput::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
    if (!(sigma_c > 0.0 && sigma_c < 1.0)) throw std::invalid_argument("sigma_c must lie in (0, 1)");
    if (s < 2 || s >= d) throw std::invalid_argument("mean-field curve needs 2 <= s < d");
}

MeanFieldResult sigma_star_mf(const MeanFieldInput& in) {
    in.validate();
    const double bridges_closed = std::pow(1.0 - in.p * in.p * in.p, 2.0 * (in.d - in.s));
    if (!(bridges_closed > 1.0 - in.sigma_c)) return {0.0, false};
    return {(in.sigma_c + bridges_closed - 1.0) / bridges_closed, true};
}

double sigma_star_mf_cubic(const MeanFieldInput& in) {
    in.validate();
    return in.sigma_c - 2.0 * (in.d - in.s) * (1.0 - in.sigma_c) * in.p * in.p * in.p;
}

double default_sigma_c(int s) {
    return s == 2 ? 0.5 : 0.0;
}

}  // namespace dperc
