#pragma once

#include <complex>

namespace typlab {

// One quantum coin: spade amplitude a, heart amplitude b, |a|^2+|b|^2 = 1.
// Inputs are renormalized on construction (callers routinely hand in
// truncated decimals like 0.7072); only a vanishing norm is an error.
class Coin {
public:
    static Coin make(std::complex<double> a, std::complex<double> b);

    std::complex<double> a() const { return a_; }
    std::complex<double> b() const { return b_; }
    double p_spade() const { return std::norm(a_); }
    double p_heart() const { return std::norm(b_); }

private:
    Coin(std::complex<double> a, std::complex<double> b) : a_(a), b_(b) {}
    std::complex<double> a_;
    std::complex<double> b_;
};

// Row-major 2x2 complex matrix acting on (a, b).
struct Unitary2 {
    std::complex<double> uaa, uab, uba, ubb;
    // max-norm distance of U U^dagger from the identity
    double unitarity_defect() const;
};

Unitary2 hadamard();

// Throws std::invalid_argument quoting the defect when U U^dagger strays
// from the identity by more than 1e-10.
Coin apply_unitary(const Coin& coin, const Unitary2& u);

} // namespace typlab
