#include "evitsim/tensor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace evitsim {

std::string TensorShape::str() const {
    std::ostringstream os;
    os << batch << "x" << channels << "x" << height << "x" << width;
    return os.str();
}

double Rng::gaussian(double mean, double stddev) {
    if (have_spare_) {
        have_spare_ = false;
        return mean + stddev * spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return mean + stddev * r * std::cos(a);
}

FloatTensor random_tensor(TensorShape s, Rng& rng, double lo, double hi) {
    FloatTensor t(s);
    for (auto& v : t.data) v = rng.uniform(lo, hi);
    return t;
}

}  // namespace evitsim
