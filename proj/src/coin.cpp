#include "typlab/coin.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace typlab {

Coin Coin::make(std::complex<double> a, std::complex<double> b) {
    const double n2 = std::norm(a) + std::norm(b);
    if (!(n2 >= 1e-12) || !std::isfinite(n2))
        throw std::invalid_argument("Coin::make: amplitude norm vanishes");
    const double inv = 1.0 / std::sqrt(n2);
    return Coin(a * inv, b * inv);
}

double Unitary2::unitarity_defect() const {
    // U U^dagger - I, entrywise max magnitude
    const std::complex<double> d00 =
        uaa * std::conj(uaa) + uab * std::conj(uab) - 1.0;
    const std::complex<double> d01 = uaa * std::conj(uba) + uab * std::conj(ubb);
    const std::complex<double> d11 =
        uba * std::conj(uba) + ubb * std::conj(ubb) - 1.0;
    return std::max({std::abs(d00), std::abs(d01), std::abs(d11)});
}

Unitary2 hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return Unitary2{{s, 0.0}, {s, 0.0}, {s, 0.0}, {-s, 0.0}};
}

Coin apply_unitary(const Coin& coin, const Unitary2& u) {
    const double defect = u.unitarity_defect();
    if (defect > 1e-10) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "apply_unitary: matrix is not unitary (defect %.3e)", defect);
        throw std::invalid_argument(buf);
    }
    const std::complex<double> a = u.uaa * coin.a() + u.uab * coin.b();
    const std::complex<double> b = u.uba * coin.a() + u.ubb * coin.b();
    return Coin::make(a, b);
}

} // namespace typlab
