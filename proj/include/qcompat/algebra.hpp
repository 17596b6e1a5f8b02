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
 * @file algebra.hpp
 * Jordan-Lie subalgebras I_N + g of the Hermitian N x N matrices:
 * generator presets, Hilbert-Schmidt orthonormalization, structure
 * constants and closure checks.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qcompat/core.hpp"

namespace qcompat {

/// Square complex matrix equal to its conjugate transpose.
class HermitianMatrix {
  public:
    HermitianMatrix() = default;

    /// Validates Hermiticity within `tol` (absolute, entrywise) and then
    /// stores the exactly Hermitian part.
    explicit HermitianMatrix(const CMatrix &m, double tol = 1e-10) {
        if (m.rows() != m.cols()) {
            throw InputError("Hermitian matrix must be square");
        }
        if (m.rows() < 2) {
            throw InputError("Hermitian matrix dimension must be at least 2");
        }
        const double skew = (m - m.adjoint()).cwiseAbs().maxCoeff();
        if (skew > tol) {
            throw InputError("matrix is not Hermitian (max |A - A^H| = " +
                             std::to_string(skew) + ")");
        }
        m_ = 0.5 * (m + m.adjoint());
    }

    /// Takes the Hermitian part of `m` without checking.
    static HermitianMatrix hermitian_part(const CMatrix &m) {
        HermitianMatrix h;
        h.m_ = 0.5 * (m + m.adjoint());
        return h;
    }

    [[nodiscard]] const CMatrix &matrix() const noexcept { return m_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return m_.rows(); }

  private:
    CMatrix m_;
};

/// Real 3-index array f[a][b][c], zero-based.
class StructureConstants {
  public:
    StructureConstants() = default;
    explicit StructureConstants(std::size_t g) : g_(g), data_(g * g * g, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return g_; }
    double &operator()(std::size_t a, std::size_t b, std::size_t c) {
        return data_[(a * g_ + b) * g_ + c];
    }
    [[nodiscard]] double operator()(std::size_t a, std::size_t b, std::size_t c) const {
        return data_[(a * g_ + b) * g_ + c];
    }
    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }
    /// Returns c * f.
    [[nodiscard]] StructureConstants scaled(double c) const {
        StructureConstants out = *this;
        for (double &v : out.data_) v *= c;
        return out;
    }

  private:
    std::size_t g_ = 0;
    std::vector<double> data_;
};

/// Lie product -i[A, B].
inline CMatrix lie_product(const CMatrix &a, const CMatrix &b) {
    return Complex(0.0, -1.0) * (a * b - b * a);
}

/// Jordan product {A, B}.
inline CMatrix jordan_product(const CMatrix &a, const CMatrix &b) { return a * b + b * a; }

struct StructureConstantsResult {
    StructureConstants f;
    double residual = 0.0;  ///< max_ab ||-i[S_a,S_b] - sum_c f_abc S_c||_F
};

namespace detail {

inline void require_orthonormal(std::span<const HermitianMatrix> gens, double tol) {
    if (gens.empty()) throw InputError("generator list is empty");
    const Eigen::Index n = gens.front().dim();
    for (std::size_t a = 0; a < gens.size(); ++a) {
        if (gens[a].dim() != n) throw InputError("generators have mixed dimensions");
        if (std::abs(gens[a].matrix().trace()) > tol) {
            throw InputError("generator " + std::to_string(a + 1) + " is not traceless");
        }
        for (std::size_t b = a; b < gens.size(); ++b) {
            const double target = a == b ? 1.0 : 0.0;
            if (std::abs(hs(gens[a].matrix(), gens[b].matrix()) - target) > tol) {
                throw InputError("generators " + std::to_string(a + 1) + "," +
                                 std::to_string(b + 1) +
                                 " are not Hilbert-Schmidt orthonormal");
            }
        }
    }
}

}  // namespace detail

/**
 * @brief Structure constants f_abc = tr(-i[S_a,S_b] S_c) of an orthonormal,
 * traceless generator list.
 *
 * The returned tensor is exactly antisymmetric in (a, b). Throws
 * ClosureError when some Lie product leaves the span by more than `tol`.
 */
inline StructureConstantsResult structure_constants(std::span<const HermitianMatrix> gens,
                                                    double tol = 1e-10) {
    detail::require_orthonormal(gens, tol);
    const std::size_t g = gens.size();
    StructureConstantsResult out{StructureConstants(g), 0.0};
    for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t b = a + 1; b < g; ++b) {
            const CMatrix c = lie_product(gens[a].matrix(), gens[b].matrix());
            CMatrix rebuilt = CMatrix::Zero(c.rows(), c.cols());
            for (std::size_t k = 0; k < g; ++k) {
                const double v = hs(c, gens[k].matrix()).real();
                out.f(a, b, k) = v;
                out.f(b, a, k) = -v;
                rebuilt += v * gens[k].matrix();
            }
            out.residual = std::max(out.residual, frob(c - rebuilt));
        }
    }
    if (out.residual > tol) {
        throw ClosureError("Lie product leaves the generator span (residual " +
                           std::to_string(out.residual) + ")");
    }
    return out;
}

/**
 * @brief Hilbert-Schmidt Gram-Schmidt over traceless projections.
 *
 * The identity component tr(A)/N I of each input is discarded first.
 * Throws LinearDependenceError when a pivot norm drops below `tol`.
 */
inline std::vector<HermitianMatrix> orthonormalize(std::span<const HermitianMatrix> raw,
                                                   double tol = 1e-10) {
    if (raw.empty()) throw InputError("generator list is empty");
    const Eigen::Index n = raw.front().dim();
    std::vector<CMatrix> basis;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].dim() != n) throw InputError("generators have mixed dimensions");
        CMatrix v = raw[i].matrix();
        v -= (v.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);
        // Two passes keep the result orthonormal to ~machine precision.
        for (int pass = 0; pass < 2; ++pass) {
            for (const CMatrix &q : basis) v -= hs(q, v).real() * q;
        }
        const double norm = std::sqrt(std::max(0.0, hs(v, v).real()));
        if (norm <= tol) {
            throw LinearDependenceError("generator " + std::to_string(i + 1) +
                                        " is linearly dependent on the previous ones");
        }
        basis.emplace_back(v / norm);
    }
    std::vector<HermitianMatrix> out;
    out.reserve(basis.size());
    for (const CMatrix &q : basis) out.push_back(HermitianMatrix::hermitian_part(q));
    return out;
}

/// Orthonormal generators of a Lie subalgebra g of su(N) with their
/// structure constants. Immutable after construction.
class GeneratorSet {
  public:
    /// Builds from generators that are already orthonormal and traceless.
    static GeneratorSet from_orthonormal(std::vector<HermitianMatrix> gens, std::string name = {},
                                         double tol = 1e-10) {
        auto sc = structure_constants(gens, tol);
        GeneratorSet g;
        g.n_ = gens.front().dim();
        g.gens_ = std::move(gens);
        g.f_ = std::move(sc.f);
        g.residual_ = sc.residual;
        g.name_ = std::move(name);
        return g;
    }

    /// Orthonormalizes arbitrary Hermitian matrices, then builds.
    static GeneratorSet from_raw(std::span<const HermitianMatrix> raw, std::string name = {},
                                 double tol = 1e-10) {
        return from_orthonormal(orthonormalize(raw, tol), std::move(name), tol);
    }

    [[nodiscard]] Eigen::Index dim_hilbert() const noexcept { return n_; }
    [[nodiscard]] std::size_t g() const noexcept { return gens_.size(); }
    [[nodiscard]] const std::vector<HermitianMatrix> &generators() const noexcept { return gens_; }
    [[nodiscard]] const CMatrix &operator[](std::size_t a) const { return gens_[a].matrix(); }
    [[nodiscard]] const StructureConstants &f() const noexcept { return f_; }
    [[nodiscard]] const std::string &name() const noexcept { return name_; }
    [[nodiscard]] double reconstruction_residual() const noexcept { return residual_; }

    /// sum_a c_a S_a
    [[nodiscard]] CMatrix combine(const RVector &coeffs) const {
        if (static_cast<std::size_t>(coeffs.size()) != g()) {
            throw InputError("coefficient vector has length " + std::to_string(coeffs.size()) +
                             ", expected " + std::to_string(g()));
        }
        CMatrix out = CMatrix::Zero(n_, n_);
        for (std::size_t a = 0; a < g(); ++a) out += coeffs[static_cast<Eigen::Index>(a)] * gens_[a].matrix();
        return out;
    }

  private:
    GeneratorSet() = default;

    Eigen::Index n_ = 0;
    std::vector<HermitianMatrix> gens_;
    StructureConstants f_;
    double residual_ = 0.0;
    std::string name_;
};

using GeneratorSetPtr = std::shared_ptr<const GeneratorSet>;

// --- raw matrices -------------------------------------------------------

/// sigma_x, sigma_y, sigma_z.
inline std::vector<CMatrix> pauli_matrices() {
    const Complex i(0.0, 1.0);
    CMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    sy << 0.0, -i, i, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    return {sx, sy, sz};
}

/// The seven Pauli strings spanning the two-qubit X-state algebra, in the
/// order I z, z I, z z, x x, x y, y x, y y.
inline std::vector<CMatrix> xstate_pauli_strings() {
    const auto p = pauli_matrices();
    const CMatrix id = CMatrix::Identity(2, 2);
    auto kron = [](const CMatrix &a, const CMatrix &b) {
        CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            for (Eigen::Index c = 0; c < a.cols(); ++c)
                out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        return out;
    };
    const CMatrix &x = p[0], &y = p[1], &z = p[2];
    return {kron(id, z), kron(z, id), kron(z, z), kron(x, x), kron(x, y), kron(y, x), kron(y, y)};
}

/// Generalized Gell-Mann matrices (tr = 0, tr(l_a l_b) = 2 delta_ab):
/// symmetric pairs, then antisymmetric pairs, then diagonal, each in
/// lexicographic index order.
inline std::vector<CMatrix> gellmann_matrices(Eigen::Index n) {
    if (n < 2) throw InputError("Gell-Mann basis needs N >= 2");
    std::vector<CMatrix> out;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            CMatrix m = CMatrix::Zero(n, n);
            m(j, k) = m(k, j) = 1.0;
            out.push_back(m);
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            CMatrix m = CMatrix::Zero(n, n);
            m(j, k) = Complex(0.0, -1.0);
            m(k, j) = Complex(0.0, 1.0);
            out.push_back(m);
        }
    }
    for (Eigen::Index l = 1; l < n; ++l) {
        CMatrix m = CMatrix::Zero(n, n);
        const double s = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        for (Eigen::Index j = 0; j < l; ++j) m(j, j) = s;
        m(l, l) = -s * static_cast<double>(l);
        out.push_back(m);
    }
    return out;
}

inline std::vector<std::string> preset_names() { return {"pauli", "gellmann", "xstate2q"}; }

/**
 * @brief Built-in generator sets, rescaled to tr(S_a S_b) = delta_ab.
 *
 *  - pauli (N = 2): sigma_a / sqrt(2)
 *  - gellmann (any N >= 2): lambda_a / sqrt(2)
 *  - xstate2q (N = 4): the seven X-state Pauli strings / 2
 */
inline GeneratorSet make_preset(const std::string &name, Eigen::Index n) {
    std::vector<CMatrix> raw;
    double scale = 0.0;
    if (name == "pauli") {
        if (n != 2) throw InputError("preset pauli requires N = 2");
        raw = pauli_matrices();
        scale = 1.0 / std::sqrt(2.0);
    } else if (name == "gellmann") {
        raw = gellmann_matrices(n);
        scale = 1.0 / std::sqrt(2.0);
    } else if (name == "xstate2q") {
        if (n != 4) throw InputError("preset xstate2q requires N = 4");
        raw = xstate_pauli_strings();
        scale = 0.5;
    } else {
        throw InputError("unknown preset '" + name + "'");
    }
    std::vector<HermitianMatrix> gens;
    gens.reserve(raw.size());
    for (const CMatrix &m : raw) gens.emplace_back(scale * m);
    return GeneratorSet::from_orthonormal(std::move(gens), name);
}

/// Default Hilbert dimension of a preset (0 when the preset takes any N).
inline Eigen::Index preset_default_dim(const std::string &name) {
    if (name == "pauli") return 2;
    if (name == "xstate2q") return 4;
    if (name == "gellmann") return 3;
    throw InputError("unknown preset '" + name + "'");
}

/// Generators at the given zero-based indices, as a new set. Throws
/// ClosureError if they do not close under the Lie product.
inline GeneratorSet subalgebra(const GeneratorSet &g, std::span<const std::size_t> indices,
                               std::string name = {}) {
    std::vector<HermitianMatrix> gens;
    for (std::size_t i : indices) {
        if (i >= g.g()) throw InputError("subalgebra index out of range");
        gens.push_back(g.generators()[i]);
    }
    return GeneratorSet::from_orthonormal(std::move(gens), std::move(name));
}

// --- closure ---------------------------------------------------------------

enum class ProductKind { Lie, Jordan };

struct ClosureViolation {
    ProductKind kind;
    std::size_t a;  ///< zero-based
    std::size_t b;
    double residual;
};

struct ClosureReport {
    bool closed_lie = true;
    bool closed_jordan = true;
    double max_lie_residual = 0.0;
    double max_jordan_residual = 0.0;
    std::vector<ClosureViolation> violations;
};

/// Checks -i[S_a,S_b] in span(S) and {S_a,S_b} in span(I, S) for all
/// pairs of an orthonormal traceless list. Violations are data.
inline ClosureReport closure_check(std::span<const HermitianMatrix> gens, double tol = 1e-10) {
    detail::require_orthonormal(gens, tol);
    const Eigen::Index n = gens.front().dim();
    const CMatrix unit = CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n));
    auto residual = [&](const CMatrix &c, bool with_identity) {
        CMatrix r = c;
        if (with_identity) r -= hs(unit, c).real() * unit;
        for (const auto &s : gens) r -= hs(s.matrix(), c).real() * s.matrix();
        return frob(r);
    };
    ClosureReport rep;
    for (std::size_t a = 0; a < gens.size(); ++a) {
        for (std::size_t b = a; b < gens.size(); ++b) {
            const CMatrix &sa = gens[a].matrix();
            const CMatrix &sb = gens[b].matrix();
            if (a != b) {
                const double r = residual(lie_product(sa, sb), false);
                rep.max_lie_residual = std::max(rep.max_lie_residual, r);
                if (r > tol) {
                    rep.closed_lie = false;
                    rep.violations.push_back({ProductKind::Lie, a, b, r});
                }
            }
            const double r = residual(jordan_product(sa, sb), true);
            rep.max_jordan_residual = std::max(rep.max_jordan_residual, r);
            if (r > tol) {
                rep.closed_jordan = false;
                rep.violations.push_back({ProductKind::Jordan, a, b, r});
            }
        }
    }
    return rep;
}

inline ClosureReport closure_check(const GeneratorSet &g, double tol = 1e-10) {
    return closure_check(std::span<const HermitianMatrix>(g.generators()), tol);
}

inline bool is_commutative(const GeneratorSet &g, double tol = 1e-10) {
    return g.f().max_abs() <= tol;
}

/// max_{a,b,c,e} |sum_d (f_abd f_dce + f_bcd f_dae + f_cad f_dbe)|
inline double jacobi_residual(const StructureConstants &f) {
    const std::size_t g = f.size();
    double worst = 0.0;
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b)
            for (std::size_t c = 0; c < g; ++c)
                for (std::size_t e = 0; e < g; ++e) {
                    double s = 0.0;
                    for (std::size_t d = 0; d < g; ++d) {
                        s += f(a, b, d) * f(d, c, e) + f(b, c, d) * f(d, a, e) +
                             f(c, a, d) * f(d, b, e);
                    }
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

}  // namespace qcompat
