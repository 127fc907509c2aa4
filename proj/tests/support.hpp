#pragma once

#include <cmath>
#include <random>

#include "covertq/config.hpp"

namespace covertq::testing {

inline double max_abs(const Matrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix random_hermitian(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = Complex(g(rng), g(rng));
        }
    }
    return (a + a.adjoint()) / 2.0;
}

// Ginibre-style random density matrix; rank < n gives rank-deficient states.
inline Matrix random_density(int n, std::mt19937_64& rng, int rank = -1)
{
    std::normal_distribution<double> g;
    const int k = rank < 0 ? n : rank;
    Matrix a(n, k);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) {
            a(i, j) = Complex(g(rng), g(rng));
        }
    }
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

}  // namespace covertq::testing
