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

// Reference computations that take a different route from the library.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "qcompat/model.hpp"
#include "qcompat/state.hpp"

namespace oracle {

using namespace qcompat;

/// Central differences of beta(x) with step h.
inline RMatrix fd_jacobian(const Model &model, std::vector<double> x, double h = 1e-6) {
    RMatrix jac(static_cast<Eigen::Index>(model.g()), static_cast<Eigen::Index>(model.m()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const RVector hi = eval_beta(model, x);
        x[i] = x0 - h;
        const RVector lo = eval_beta(model, x);
        x[i] = x0;
        jac.col(static_cast<Eigen::Index>(i)) = (hi - lo) / (2.0 * h);
    }
    return jac;
}

/// Coefficients c with M = sum_c c_k G_k, from a least-squares solve over
/// the real and imaginary parts of all entries.
inline RVector expand(const std::vector<CMatrix> &basis, const CMatrix &m) {
    const Eigen::Index len = m.size();
    RMatrix a(2 * len, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const Eigen::Map<const CVector> v(basis[k].data(), len);
        a.col(static_cast<Eigen::Index>(k)) << v.real(), v.imag();
    }
    const Eigen::Map<const CVector> t(m.data(), len);
    RVector rhs(2 * len);
    rhs << t.real(), t.imag();
    return a.colPivHouseholderQr().solve(rhs);
}

/// f_abc by solving -i[S_a, S_b] = sum_c f_abc S_c as a linear system.
inline std::vector<double> structure_constants_by_solve(const GeneratorSet &g) {
    std::vector<CMatrix> basis;
    for (std::size_t a = 0; a < g.g(); ++a) basis.push_back(g[a]);
    std::vector<double> f(g.g() * g.g() * g.g());
    for (std::size_t a = 0; a < g.g(); ++a)
        for (std::size_t b = 0; b < g.g(); ++b) {
            const CMatrix c = Complex(0, -1) * (g[a] * g[b] - g[b] * g[a]);
            const RVector k = expand(basis, c);
            for (std::size_t c3 = 0; c3 < g.g(); ++c3) f[(a * g.g() + b) * g.g() + c3] = k[static_cast<Eigen::Index>(c3)];
        }
    return f;
}

/// det(lambda I - X) from the eigenvalues of X, highest power first.
inline RVector char_poly_from_eigenvalues(const RMatrix &x) {
    Eigen::EigenSolver<RMatrix> es(x, false);
    const Eigen::VectorXcd mu = es.eigenvalues();
    std::vector<Complex> c{Complex(1.0)};
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        std::vector<Complex> next(c.size() + 1, Complex(0.0));
        for (std::size_t j = 0; j < c.size(); ++j) {
            next[j] += c[j];
            next[j + 1] -= mu[i] * c[j];
        }
        c = std::move(next);
    }
    RVector out(static_cast<Eigen::Index>(c.size()));
    for (std::size_t j = 0; j < c.size(); ++j) out[static_cast<Eigen::Index>(j)] = c[j].real();
    return out;
}

inline CMatrix psd_sqrt(const CMatrix &m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    const RVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/// Root fidelity tr sqrt(sqrt(a) b sqrt(a)).
inline double root_fidelity(const CMatrix &a, const CMatrix &b) {
    const CMatrix s = psd_sqrt(a);
    const CMatrix inner = s * b * s;
    return psd_sqrt(0.5 * (inner + inner.adjoint())).trace().real();
}

/// Single-parameter QFI from the Bures distance of rho(t -+ h/2):
/// F = 8 (1 - sqrtF) / h^2.
template <class RhoFn>
double fidelity_qfi(RhoFn rho_at, double t, double h = 1e-3) {
    const double fid = root_fidelity(rho_at(t - 0.5 * h), rho_at(t + 0.5 * h));
    return 8.0 * (1.0 - fid) / (h * h);
}

/// Qubit QFI from Bloch vectors: |dn|^2 + (n.dn)^2 / (1 - |n|^2).
inline double bloch_qfi(const Eigen::Vector3d &n, const Eigen::Vector3d &dn) {
    return dn.squaredNorm() + std::pow(n.dot(dn), 2) / (1.0 - n.squaredNorm());
}

inline CMatrix sigma(int k) {
    CMatrix s(2, 2);
    if (k == 1) s << 0, 1, 1, 0;
    if (k == 2) s << 0, Complex(0, -1), Complex(0, 1), 0;
    if (k == 3) s << 1, 0, 0, -1;
    return s;
}

/// (I + n.sigma)/2
inline CMatrix bloch_state(const Eigen::Vector3d &n) {
    return 0.5 * (CMatrix::Identity(2, 2) + n[0] * sigma(1) + n[1] * sigma(2) + n[2] * sigma(3));
}

}  // namespace oracle
