// Copyright 2026 The qcompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file sampling.hpp
 * Seeded random instances: unitaries, antisymmetric forms of chosen rank,
 * full-rank states inside an algebra.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "qcompat/state.hpp"

namespace qcompat::sampling {

using Rng = std::mt19937_64;

inline double gauss(Rng &rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng &rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline RVector gaussian_vector(Rng &rng, Eigen::Index n) {
    RVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
}

inline RMatrix gaussian_matrix(Rng &rng, Eigen::Index r, Eigen::Index c) {
    RMatrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = gauss(rng);
    return m;
}

/// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
inline CMatrix unitary(Rng &rng, Eigen::Index n) {
    CMatrix z(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0);
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = std::abs(r(i, i));
        if (a > 0.0) q.col(i) *= r(i, i) / a;
    }
    return q;
}

/// g x g antisymmetric matrix of the given even rank: U J U^T with U a
/// Gaussian g x rank matrix and J the standard symplectic block.
inline RMatrix antisymmetric(Rng &rng, Eigen::Index g, Eigen::Index rank) {
    if (rank == 0) return RMatrix::Zero(g, g);
    const RMatrix u = gaussian_matrix(rng, g, rank);
    RMatrix j = RMatrix::Zero(rank, rank);
    for (Eigen::Index k = 0; k + 1 < rank; k += 2) {
        j(k, k + 1) = 1.0;
        j(k + 1, k) = -1.0;
    }
    RMatrix x = u * j * u.transpose();
    return 0.5 * (x - x.transpose());
}

/**
 * @brief Random beta whose state has every eigenvalue >= floor.
 *
 * A Gaussian direction is scaled by a uniform fraction in [0.05, 1] of the
 * largest admissible step.
 */
inline RVector full_rank_beta(Rng &rng, const GeneratorSet &g, double floor) {
    const Eigen::Index n = g.dim_hilbert();
    const RVector dir = gaussian_vector(rng, static_cast<Eigen::Index>(g.g()));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g.combine(dir), Eigen::EigenvaluesOnly);
    const double mu_min = es.eigenvalues().minCoeff();
    // lambda_min(rho) = (1 + c_N t mu_min) / N >= floor
    double t_max = 1.0;
    if (mu_min < 0.0) t_max = (1.0 - static_cast<double>(n) * floor) / (-kStateScale * mu_min);
    return uniform(rng, 0.05, 1.0) * t_max * dir;
}

}  // namespace qcompat::sampling
