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
 * @file estimation.hpp
 * Symmetric logarithmic derivatives, quantum and classical Fisher
 * information, and the commutation matrix of a parameterized state.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "qcompat/model.hpp"
#include "qcompat/state.hpp"

namespace qcompat {

/// Coefficients of a Hermitian L in the basis I_N, S_1..S_g.
struct SldCoefficients {
    double alpha0 = 0.0;
    RVector alpha;
    double span_residual = 0.0;  ///< ||L - alpha0 I - alpha.S||_F
    double trace_rho_L = 0.0;    ///< tr(L rho); vanishes for a genuine SLD
};

/// alpha0 = tr(L)/N, alpha_a = tr(L S_a).
inline SldCoefficients sld_coefficients(const GeneratorSet &g, const DensityMatrix &rho,
                                        const HermitianMatrix &l) {
    const Eigen::Index n = g.dim_hilbert();
    if (l.dim() != n || rho.dim() != n) throw InputError("SLD dimension does not match the algebra");
    SldCoefficients c;
    c.alpha0 = l.matrix().trace().real() / static_cast<double>(n);
    c.alpha.resize(static_cast<Eigen::Index>(g.g()));
    for (std::size_t a = 0; a < g.g(); ++a) c.alpha[static_cast<Eigen::Index>(a)] = hs(l.matrix(), g[a]).real();
    const CMatrix rebuilt = c.alpha0 * CMatrix::Identity(n, n) + g.combine(c.alpha);
    c.span_residual = frob(l.matrix() - rebuilt);
    c.trace_rho_L = hs(l.matrix(), rho.mat()).real();
    return c;
}

struct SldResult {
    HermitianMatrix L;
    double alpha0 = 0.0;
    RVector alpha;
    double residual = 0.0;       ///< ||(rho L + L rho)/2 - d rho||_F
    double span_residual = 0.0;  ///< component of L outside I_N + span(S)
    double trace_rho_L = 0.0;
};

namespace detail {

inline void check_derivative(const DensityMatrix &rho, const HermitianMatrix &drho, double tol) {
    if (drho.dim() != rho.dim()) throw InputError("derivative dimension does not match the state");
    if (std::abs(drho.matrix().trace()) > tol) throw InputError("state derivative is not traceless");
}

inline SldResult finish_sld(const DensityMatrix &rho, const HermitianMatrix &drho, CMatrix l) {
    SldResult r;
    r.L = HermitianMatrix::hermitian_part(l);
    const CMatrix &lm = r.L.matrix();
    r.residual = frob(0.5 * (rho.mat() * lm + lm * rho.mat()) - drho.matrix());
    const SldCoefficients c = sld_coefficients(rho.generators(), rho, r.L);
    r.alpha0 = c.alpha0;
    r.alpha = c.alpha;
    r.span_residual = c.span_residual;
    r.trace_rho_L = c.trace_rho_L;
    return r;
}

}  // namespace detail

/**
 * @brief SLD from the eigenbasis of rho: L_jk = 2 (d rho)_jk / (l_j + l_k).
 *
 * Entries with l_j + l_k <= null_tol are set to 0; if d rho has weight
 * above `tol` there the derivative leaves the support and DomainError is
 * thrown.
 */
inline SldResult sld_eigen(const DensityMatrix &rho, const HermitianMatrix &drho, double null_tol = 1e-10,
                           double tol = 1e-10) {
    detail::check_derivative(rho, drho, tol);
    const CMatrix &v = rho.eigenvectors();
    const RVector &lam = rho.eigenvalues();
    const CMatrix d = v.adjoint() * drho.matrix() * v;
    CMatrix l = CMatrix::Zero(d.rows(), d.cols());
    for (Eigen::Index j = 0; j < d.rows(); ++j) {
        for (Eigen::Index k = 0; k < d.cols(); ++k) {
            const double s = lam[j] + lam[k];
            if (s > null_tol) {
                l(j, k) = 2.0 * d(j, k) / s;
            } else if (std::abs(d(j, k)) > tol) {
                throw DomainError("state derivative has weight on the kernel of rho; no SLD exists");
            }
        }
    }
    return detail::finish_sld(rho, drho, v * l * v.adjoint());
}

enum class IntegralMode { Analytic, Quadrature };

/// Nodes and weights of the p-point Gauss-Legendre rule on [-1, 1]
/// (Golub-Welsch).
inline std::pair<RVector, RVector> gauss_legendre(int p) {
    RMatrix jac = RMatrix::Zero(p, p);
    for (int k = 1; k < p; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jac(k, k - 1) = jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(jac);
    RVector w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return {es.eigenvalues(), w};
}

/// Zero t_max or n_steps are chosen from the spectrum: the tail is cut at
/// 1e-3 * convergence_tol and each panel spans at most 1/(2 lambda_max).
struct QuadratureSettings {
    double t_max = 0.0;
    int n_steps = 0;
    int order = 8;                ///< Gauss-Legendre points per panel
    double convergence_tol = 1e-6;
};

namespace detail {

/// 2 int_0^t_max e^{-rho t} D e^{-rho t} dt by composite Gauss-Legendre,
/// with e^{-rho t} from the matrix exponential (no eigendecomposition).
inline CMatrix sld_quadrature_sum(const CMatrix &rho, const CMatrix &d, double t_max, int n_steps, int order) {
    const auto [nodes, weights] = gauss_legendre(order);
    const double h = t_max / n_steps;
    const CMatrix step = (-h * rho).exp();
    std::vector<CMatrix> inner;
    inner.reserve(static_cast<std::size_t>(order));
    for (int k = 0; k < order; ++k) inner.emplace_back((-(0.5 * h * (nodes[k] + 1.0)) * rho).exp());
    CMatrix panel = CMatrix::Identity(rho.rows(), rho.cols());
    CMatrix acc = CMatrix::Zero(rho.rows(), rho.cols());
    for (int p = 0; p < n_steps; ++p) {
        for (int k = 0; k < order; ++k) {
            const CMatrix e = panel * inner[static_cast<std::size_t>(k)];
            acc += (0.5 * h * weights[k]) * (e * d * e);
        }
        panel = panel * step;
    }
    return 2.0 * acc;
}

}  // namespace detail

/**
 * @brief SLD from L = 2 int_0^inf e^{-rho t} d rho e^{-rho t} dt.
 *
 * Analytic mode integrates each eigenbasis entry in closed form.
 * Quadrature mode integrates on [0, t_max] directly and compares against a
 * run with half the panels; it throws ConvergenceError when the two differ
 * by more than `convergence_tol` entrywise or the neglected tail exceeds it.
 * rho must be strictly positive.
 */
inline SldResult sld_integral(const DensityMatrix &rho, const HermitianMatrix &drho,
                              IntegralMode mode = IntegralMode::Analytic, const QuadratureSettings &q = {},
                              double null_tol = 1e-10, double tol = 1e-10) {
    detail::check_derivative(rho, drho, tol);
    const double lmin = rho.min_eigenvalue();
    if (lmin <= null_tol) throw DomainError("integral SLD needs a full-rank state");
    if (mode == IntegralMode::Analytic) {
        const CMatrix &v = rho.eigenvectors();
        const RVector &lam = rho.eigenvalues();
        CMatrix l = v.adjoint() * drho.matrix() * v;
        for (Eigen::Index j = 0; j < l.rows(); ++j)
            for (Eigen::Index k = 0; k < l.cols(); ++k) l(j, k) *= 2.0 / (lam[j] + lam[k]);
        return detail::finish_sld(rho, drho, v * l * v.adjoint());
    }
    if (q.t_max < 0.0 || q.n_steps < 0 || q.order < 1) throw InputError("invalid quadrature settings");
    const double dnorm = frob(drho.matrix());
    double t_max = q.t_max;
    if (t_max == 0.0) {
        t_max = std::max(1.0, std::log(std::max(dnorm, 1e-300) / (lmin * 1e-3 * q.convergence_tol)) / (2.0 * lmin));
    }
    int n_steps = q.n_steps;
    if (n_steps == 0) n_steps = std::max(16, static_cast<int>(std::ceil(2.0 * t_max * rho.eigenvalues()[0])));
    if (n_steps < 2) throw InputError("invalid quadrature settings");
    const double tail = dnorm * std::exp(-2.0 * lmin * t_max) / lmin;
    if (tail > q.convergence_tol) {
        throw ConvergenceError("quadrature tail beyond t_max is " + std::to_string(tail) + "; increase t_max");
    }
    const CMatrix fine = detail::sld_quadrature_sum(rho.mat(), drho.matrix(), t_max, n_steps, q.order);
    const CMatrix coarse = detail::sld_quadrature_sum(rho.mat(), drho.matrix(), t_max, n_steps / 2, q.order);
    const double change = (fine - coarse).cwiseAbs().maxCoeff();
    if (change > q.convergence_tol) {
        throw ConvergenceError("quadrature changed by " + std::to_string(change) + " between refinements");
    }
    return detail::finish_sld(rho, drho, fine);
}

/// F_ij = (1/2) tr(rho {L_i, L_j})
inline RMatrix qfim(const DensityMatrix &rho, std::span<const SldResult> slds) {
    const auto m = static_cast<Eigen::Index>(slds.size());
    RMatrix f(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const CMatrix &li = slds[static_cast<std::size_t>(i)].L.matrix();
        if (li.rows() != rho.dim()) throw InputError("SLD dimension does not match the state");
        for (Eigen::Index j = i; j < m; ++j) {
            const CMatrix &lj = slds[static_cast<std::size_t>(j)].L.matrix();
            const double v = 0.5 * hs(rho.mat(), li * lj + lj * li).real();
            f(i, j) = f(j, i) = v;
        }
    }
    return f;
}

/// D_ij = (1/i) tr(rho [L_i, L_j]); exactly antisymmetric.
inline RMatrix commutation_matrix(const DensityMatrix &rho, std::span<const SldResult> slds) {
    const auto m = static_cast<Eigen::Index>(slds.size());
    RMatrix d = RMatrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const CMatrix &li = slds[static_cast<std::size_t>(i)].L.matrix();
        if (li.rows() != rho.dim()) throw InputError("SLD dimension does not match the state");
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const CMatrix &lj = slds[static_cast<std::size_t>(j)].L.matrix();
            const double v = hs(rho.mat(), li * lj - lj * li).imag();
            d(i, j) = v;
            d(j, i) = -v;
        }
    }
    return d;
}

inline bool is_compatible(const RMatrix &commutation, double compat_tol = 1e-9) {
    return commutation.size() == 0 || commutation.cwiseAbs().maxCoeff() <= compat_tol;
}

/// Positive operator-valued measure; elements are PSD and sum to I_N.
class Povm {
  public:
    explicit Povm(std::vector<HermitianMatrix> elements, double tol = 1e-10) : elements_(std::move(elements)) {
        if (elements_.empty()) throw InputError("POVM has no elements");
        const Eigen::Index n = elements_.front().dim();
        CMatrix sum = CMatrix::Zero(n, n);
        for (std::size_t k = 0; k < elements_.size(); ++k) {
            const auto &e = elements_[k];
            if (e.dim() != n) throw InputError("POVM elements have mixed dimensions");
            Eigen::SelfAdjointEigenSolver<CMatrix> es(e.matrix(), Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -tol) {
                throw InputError("POVM element " + std::to_string(k + 1) + " is not positive semidefinite");
            }
            sum += e.matrix();
        }
        if ((sum - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > tol) {
            throw InputError("POVM elements do not sum to the identity");
        }
    }

    [[nodiscard]] const std::vector<HermitianMatrix> &elements() const noexcept { return elements_; }
    [[nodiscard]] Eigen::Index dim() const { return elements_.front().dim(); }

  private:
    std::vector<HermitianMatrix> elements_;
};

/// Rank-one projectors onto the columns of a unitary.
inline Povm projective_povm(const CMatrix &unitary, double tol = 1e-10) {
    std::vector<HermitianMatrix> els;
    for (Eigen::Index k = 0; k < unitary.cols(); ++k) {
        const CVector u = unitary.col(k);
        els.push_back(HermitianMatrix::hermitian_part(u * u.adjoint()));
    }
    return Povm(std::move(els), tol);
}

struct CfimThresholds {
    double prob_floor = 1e-14;
    double dprob_floor = 1e-12;
};

/**
 * @brief F^C_ij = sum_k d_i p_k d_j p_k / p_k with p_k = tr(Pi_k rho).
 *
 * Outcomes with p_k <= prob_floor and every |d_i p_k| <= dprob_floor are
 * dropped; a vanishing probability with a non-vanishing derivative makes
 * the information diverge and raises DomainError.
 */
inline RMatrix classical_fisher(const DensityMatrix &rho, std::span<const HermitianMatrix> drhos, const Povm &povm,
                                const CfimThresholds &th = {}) {
    if (povm.dim() != rho.dim()) throw InputError("POVM dimension does not match the state");
    const auto m = static_cast<Eigen::Index>(drhos.size());
    RMatrix f = RMatrix::Zero(m, m);
    RVector dp(m);
    for (std::size_t k = 0; k < povm.elements().size(); ++k) {
        const CMatrix &pi = povm.elements()[k].matrix();
        const double p = hs(pi, rho.mat()).real();
        for (Eigen::Index i = 0; i < m; ++i) dp[i] = hs(pi, drhos[static_cast<std::size_t>(i)].matrix()).real();
        if (p <= th.prob_floor) {
            if (m > 0 && dp.cwiseAbs().maxCoeff() > th.dprob_floor) {
                throw DomainError("outcome " + std::to_string(k + 1) +
                                  " has zero probability but non-zero derivative; classical Fisher information diverges");
            }
            continue;
        }
        f += (dp * dp.transpose()) / p;
    }
    return 0.5 * (f + f.transpose());
}

/// Everything computed at one point of a model.
struct FisherBundle {
    std::vector<double> point;
    RVector beta;
    RMatrix jacobian;
    StateValidity validity;
    std::vector<HermitianMatrix> drhos;
    std::vector<SldResult> slds;
    RMatrix qfim;
    RMatrix commutation;
    bool compatible = false;
};

/// d_i rho at a point, one per parameter.
inline std::vector<HermitianMatrix> state_derivatives(const GeneratorSet &g, const RMatrix &jacobian) {
    std::vector<HermitianMatrix> out;
    for (Eigen::Index i = 0; i < jacobian.cols(); ++i) out.push_back(drho_from_dbeta(g, jacobian.col(i)));
    return out;
}

inline FisherBundle fisher_bundle(const Model &model, std::span<const double> x) {
    const Tolerances &t = model.tolerances();
    FisherBundle b;
    b.point.assign(x.begin(), x.end());
    auto bj = eval_beta_and_jacobian(model, x);
    b.beta = std::move(bj.beta);
    b.jacobian = std::move(bj.jacobian);
    const DensityMatrix rho = assemble_rho(model.generators_ptr(), b.beta);
    b.validity = validate_state(rho, t.psd);
    b.drhos = state_derivatives(model.generators(), b.jacobian);
    for (const auto &d : b.drhos) b.slds.push_back(sld_eigen(rho, d, t.null, t.tol));
    b.qfim = qfim(rho, b.slds);
    b.commutation = commutation_matrix(rho, b.slds);
    b.compatible = is_compatible(b.commutation, t.compat);
    return b;
}

/// Classical Fisher information of `povm` at a model point.
inline RMatrix cfim(const Model &model, const Povm &povm, std::span<const double> x) {
    const auto bj = eval_beta_and_jacobian(model, x);
    const DensityMatrix rho = assemble_rho(model.generators_ptr(), bj.beta);
    const auto drhos = state_derivatives(model.generators(), bj.jacobian);
    const Tolerances &t = model.tolerances();
    return classical_fisher(rho, drhos, povm, {t.prob_floor, t.dprob_floor});
}

struct EquivalenceReport {
    double qfim_min_eigenvalue = 0.0;
    std::size_t calL_rank = 0;  ///< rank of the (rho L_i + L_i rho)/2
    std::size_t sld_rank = 0;   ///< rank of the L_i themselves
    std::size_t m = 0;
    bool qfim_invertible = false;
    bool calL_independent = false;
    bool both_sides_agree = false;
};

namespace detail {

/// Rank of matrices viewed as real vectors (Re and Im parts stacked).
inline std::size_t real_span_rank(const std::vector<CMatrix> &ms, double tol) {
    if (ms.empty()) return 0;
    const Eigen::Index len = ms.front().size();
    RMatrix a(2 * len, static_cast<Eigen::Index>(ms.size()));
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const Eigen::Map<const CVector> v(ms[i].data(), len);
        a.col(col).head(len) = v.real();
        a.col(col).tail(len) = v.imag();
    }
    Eigen::JacobiSVD<RMatrix> svd(a);
    const RVector &s = svd.singularValues();
    return static_cast<std::size_t>((s.array() > tol).count());
}

}  // namespace detail

/**
 * @brief Compares QFIM invertibility with linear independence of the
 * symmetrized products (rho L_i + L_i rho)/2, under one shared tolerance.
 */
inline EquivalenceReport check_invertibility_equivalence(const DensityMatrix &rho, std::span<const SldResult> slds,
                                                         double tol = 1e-9) {
    EquivalenceReport r;
    r.m = slds.size();
    if (r.m == 0) {
        r.qfim_invertible = r.calL_independent = r.both_sides_agree = true;
        return r;
    }
    const RMatrix f = qfim(rho, slds);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(f, Eigen::EigenvaluesOnly);
    r.qfim_min_eigenvalue = es.eigenvalues().minCoeff();
    std::vector<CMatrix> sym, ls;
    for (const auto &s : slds) {
        const CMatrix &l = s.L.matrix();
        sym.emplace_back(0.5 * (rho.mat() * l + l * rho.mat()));
        ls.push_back(l);
    }
    r.calL_rank = detail::real_span_rank(sym, tol);
    r.sld_rank = detail::real_span_rank(ls, tol);
    r.qfim_invertible = r.qfim_min_eigenvalue > tol;
    r.calL_independent = r.calL_rank == r.m;
    r.both_sides_agree = r.qfim_invertible == r.calL_independent;
    return r;
}

}  // namespace qcompat
