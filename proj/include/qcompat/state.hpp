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
 * @file state.hpp
 * Density matrices expanded in a generator basis,
 * rho = (1/N)(I + c_N sum_a beta_a S_a), with a cached eigendecomposition.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Eigenvalues>

#include "qcompat/algebra.hpp"

namespace qcompat {

/// c_N in rho = (1/N)(I + c_N beta.S). Fixed for every basis.
inline constexpr double kStateScale = 2.0;

/// A unit-trace Hermitian matrix in I_N + span(S) together with its
/// coefficients and spectrum. Immutable.
class DensityMatrix {
  public:
    [[nodiscard]] const HermitianMatrix &matrix() const noexcept { return rho_; }
    [[nodiscard]] const CMatrix &mat() const noexcept { return rho_.matrix(); }
    [[nodiscard]] const RVector &beta() const noexcept { return beta_; }
    [[nodiscard]] const GeneratorSet &generators() const noexcept { return *gens_; }
    [[nodiscard]] const GeneratorSetPtr &generators_ptr() const noexcept { return gens_; }
    /// Descending.
    [[nodiscard]] const RVector &eigenvalues() const noexcept { return evals_; }
    /// Columns are eigenvectors, ordered like eigenvalues().
    [[nodiscard]] const CMatrix &eigenvectors() const noexcept { return evecs_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return rho_.dim(); }
    [[nodiscard]] double min_eigenvalue() const { return evals_[evals_.size() - 1]; }

    friend DensityMatrix assemble_rho(GeneratorSetPtr g, const RVector &beta);

  private:
    DensityMatrix() = default;

    HermitianMatrix rho_;
    RVector beta_;
    GeneratorSetPtr gens_;
    RVector evals_;
    CMatrix evecs_;
};

/// Builds rho from coefficients. Positivity is not enforced.
inline DensityMatrix assemble_rho(GeneratorSetPtr g, const RVector &beta) {
    if (!g) throw InputError("no generator set");
    const Eigen::Index n = g->dim_hilbert();
    const double inv_n = 1.0 / static_cast<double>(n);
    CMatrix m = inv_n * (CMatrix::Identity(n, n) + kStateScale * g->combine(beta));
    DensityMatrix rho;
    rho.rho_ = HermitianMatrix::hermitian_part(m);
    rho.beta_ = beta;
    rho.gens_ = std::move(g);

    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.rho_.matrix());
    if (es.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
    rho.evals_ = es.eigenvalues().reverse();
    rho.evecs_ = es.eigenvectors().rowwise().reverse();
    return rho;
}

/// d rho = (c_N / N) sum_a dbeta_a S_a
inline HermitianMatrix drho_from_dbeta(const GeneratorSet &g, const RVector &dbeta) {
    const double s = kStateScale / static_cast<double>(g.dim_hilbert());
    return HermitianMatrix::hermitian_part(s * g.combine(dbeta));
}

struct StateValidity {
    bool physical = false;
    double min_eigenvalue = 0.0;
    double trace_deviation = 0.0;
};

inline StateValidity validate_state(const DensityMatrix &rho, double tol = 1e-10) {
    StateValidity v;
    v.min_eigenvalue = rho.min_eigenvalue();
    v.trace_deviation = std::abs(rho.mat().trace() - Complex(1.0, 0.0));
    v.physical = v.min_eigenvalue >= -tol && v.trace_deviation <= tol;
    return v;
}

struct Decomposition {
    RVector beta;
    double residual = 0.0;  ///< ||rho - reconstruction||_F
};

/// Hilbert-Schmidt projection of a unit-trace Hermitian matrix onto the
/// generators: beta_a = N tr(rho S_a) / c_N.
inline Decomposition decompose(const GeneratorSet &g, const HermitianMatrix &rho, double tol = 1e-10) {
    const Eigen::Index n = g.dim_hilbert();
    if (rho.dim() != n) throw InputError("state dimension does not match the algebra");
    if (std::abs(rho.matrix().trace() - Complex(1.0, 0.0)) > tol) {
        throw InputError("state does not have unit trace");
    }
    Decomposition d;
    d.beta.resize(static_cast<Eigen::Index>(g.g()));
    const double s = static_cast<double>(n) / kStateScale;
    for (std::size_t a = 0; a < g.g(); ++a) {
        d.beta[static_cast<Eigen::Index>(a)] = s * hs(rho.matrix(), g[a]).real();
    }
    const CMatrix rebuilt =
        (CMatrix::Identity(n, n) + kStateScale * g.combine(d.beta)) / static_cast<double>(n);
    d.residual = frob(rho.matrix() - rebuilt);
    return d;
}

/// Density matrix for an arbitrary Hermitian unit-trace matrix lying in
/// I_N + span(g). Throws InputError when it does not.
inline DensityMatrix density_from_matrix(GeneratorSetPtr g, const HermitianMatrix &m, double tol = 1e-10) {
    if (!g) throw InputError("no generator set");
    const Decomposition d = decompose(*g, m, tol);
    if (d.residual > tol) {
        throw InputError("matrix lies outside the algebra (residual " + std::to_string(d.residual) + ")");
    }
    return assemble_rho(std::move(g), d.beta);
}

}  // namespace qcompat
