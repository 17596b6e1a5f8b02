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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcompat/bound.hpp"
#include "qcompat/estimation.hpp"
#include "qcompat/sampling.hpp"

using namespace qcompat;

namespace {

GeneratorSetPtr preset(const std::string &name, Eigen::Index n = 0) {
    return std::make_shared<const GeneratorSet>(make_preset(name, n ? n : preset_default_dim(name)));
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

DensityMatrix qubit(const Eigen::Vector3d &n) { return assemble_rho(preset("pauli"), kInvSqrt2 * RVector(n)); }

HermitianMatrix herm(const CMatrix &m) { return HermitianMatrix(m); }

/// Radial qubit model beta = (0, 0, r) in Bloch units.
Model radial_model() {
    return Model(preset("pauli"), {"r"}, {"0", "0", "r"}, Convention::PaperPauli);
}

Povm sigma_povm(int k) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(oracle::sigma(k));
    return projective_povm(es.eigenvectors());
}

}  // namespace

TEST(SldEigen, MaximallyMixedQubit) {
    const SldResult r = sld_eigen(qubit({0, 0, 0}), herm(0.5 * oracle::sigma(3)));
    EXPECT_LT(frob(r.L.matrix() - oracle::sigma(3)), 1e-15);
}

TEST(SldEigen, CommutingDerivative) {
    // rho = (I + sigma3/2)/2, d rho = (3/8) sigma3  ->  L = sigma3 - I/2
    const DensityMatrix rho = qubit({0, 0, 0.5});
    const SldResult r = sld_eigen(rho, herm(0.375 * oracle::sigma(3)));
    EXPECT_LT(frob(r.L.matrix() - (oracle::sigma(3) - 0.5 * CMatrix::Identity(2, 2))), 1e-14);
    EXPECT_LT(r.residual, 1e-15);
}

TEST(SldEigen, TransverseDerivative) {
    // rho = (I + sigma3/2)/2, d rho = sigma1/2  ->  L = sigma1
    const DensityMatrix rho = qubit({0, 0, 0.5});
    const SldResult r = sld_eigen(rho, herm(0.5 * oracle::sigma(1)));
    EXPECT_LT(frob(r.L.matrix() - oracle::sigma(1)), 1e-14);
    EXPECT_NEAR(r.alpha[0], std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(r.alpha0, 0.0, 1e-15);
}

TEST(SldEigen, DerivativeOffSupportIsDomainError) {
    const DensityMatrix pure = qubit({0, 0, 1});
    EXPECT_THROW(sld_eigen(pure, herm(0.5 * oracle::sigma(3))), DomainError);
    // Rotating a pure state keeps the derivative off the kernel block.
    const SldResult r = sld_eigen(pure, herm(0.5 * oracle::sigma(1)));
    EXPECT_LT(r.residual, 1e-15);
    EXPECT_LT(frob(r.L.matrix() - oracle::sigma(1)), 1e-15);
}

TEST(SldEigen, RejectsTracefulDerivative) {
    EXPECT_THROW(sld_eigen(qubit({0, 0, 0.5}), herm(CMatrix::Identity(2, 2))), InputError);
}

// Property: L solves the Lyapunov equation on random full-rank states.
TEST(SldProperty, ResidualSmallOnRandomStates) {
    sampling::Rng rng(41);
    for (const auto &g : {preset("gellmann", 3), preset("gellmann", 4), preset("xstate2q")}) {
        for (int t = 0; t < 100; ++t) {
            const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.02));
            const HermitianMatrix d = drho_from_dbeta(*g, sampling::gaussian_vector(rng, static_cast<Eigen::Index>(g->g())));
            const SldResult r = sld_eigen(rho, d);
            EXPECT_LT(r.residual, 1e-10);
            EXPECT_LT(std::abs(r.trace_rho_L), 1e-10);
            EXPECT_LT(r.span_residual, 1e-9);
        }
    }
}

// Property: alpha0 = -(c_N/N) sum_a beta_a alpha_a, which is tr(rho L) = 0.
TEST(SldProperty, Alpha0Relation) {
    sampling::Rng rng(42);
    const auto g = preset("gellmann", 3);
    for (int t = 0; t < 100; ++t) {
        const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.02));
        const SldResult r = sld_eigen(rho, drho_from_dbeta(*g, sampling::gaussian_vector(rng, 8)));
        EXPECT_NEAR(r.alpha0, -(kStateScale / 3.0) * rho.beta().dot(r.alpha), 1e-10);
    }
}

TEST(SldIntegral, AnalyticAndQuadratureAgreeWithEigen) {
    sampling::Rng rng(43);
    const auto g = preset("gellmann", 3);
    for (int t = 0; t < 10; ++t) {
        const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.05));
        const HermitianMatrix d = drho_from_dbeta(*g, sampling::gaussian_vector(rng, 8));
        const CMatrix ref = sld_eigen(rho, d).L.matrix();
        EXPECT_LT((sld_integral(rho, d).L.matrix() - ref).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((sld_integral(rho, d, IntegralMode::Quadrature).L.matrix() - ref).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(SldIntegral, ExplicitQuadratureSettings) {
    const DensityMatrix mixed = qubit({0, 0, 0});
    EXPECT_LT(frob(sld_integral(mixed, herm(0.5 * oracle::sigma(3))).L.matrix() - oracle::sigma(3)), 1e-15);
    QuadratureSettings q60;
    q60.t_max = 60;
    q60.n_steps = 2000;
    const SldResult m = sld_integral(mixed, herm(0.5 * oracle::sigma(3)), IntegralMode::Quadrature, q60);
    EXPECT_LT(frob(m.L.matrix() - oracle::sigma(3)), 1e-6);

    const DensityMatrix rho = qubit({0, 0, 0.5});
    QuadratureSettings q;
    q.t_max = 60;
    q.n_steps = 2000;
    const SldResult r = sld_integral(rho, herm(0.5 * oracle::sigma(1)), IntegralMode::Quadrature, q);
    EXPECT_LT((r.L.matrix() - oracle::sigma(1)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SldIntegral, Errors) {
    EXPECT_THROW(sld_integral(qubit({0, 0, 1}), herm(0.5 * oracle::sigma(3) * 0.0)), DomainError);
    QuadratureSettings shortq;
    shortq.t_max = 1.0;
    shortq.n_steps = 10;
    EXPECT_THROW(sld_integral(qubit({0, 0, 0.5}), herm(0.5 * oracle::sigma(1)), IntegralMode::Quadrature, shortq),
                 ConvergenceError);
    QuadratureSettings bad;
    bad.order = 0;
    EXPECT_THROW(sld_integral(qubit({0, 0, 0.5}), herm(0.5 * oracle::sigma(1)), IntegralMode::Quadrature, bad),
                 InputError);
}

TEST(SldCoefficients, Sigma3AndOutsideSpan) {
    const auto g = preset("pauli");
    const DensityMatrix rho = qubit({0, 0, 0});
    const SldCoefficients c = sld_coefficients(*g, rho, herm(oracle::sigma(3)));
    EXPECT_NEAR(c.alpha[0], 0.0, 1e-16);
    EXPECT_NEAR(c.alpha[1], 0.0, 1e-16);
    EXPECT_NEAR(c.alpha[2], std::sqrt(2.0), 1e-15);
    EXPECT_LT(c.span_residual, 1e-15);

    // The diagonal subalgebra of su(3) cannot express off-diagonal terms.
    auto diag = std::make_shared<const GeneratorSet>(subalgebra(make_preset("gellmann", 3), std::vector<std::size_t>{6, 7}));
    const DensityMatrix mixed = assemble_rho(diag, RVector::Zero(2));
    CMatrix off = CMatrix::Zero(3, 3);
    off(0, 1) = off(1, 0) = 1.0;
    EXPECT_GT(sld_coefficients(*diag, mixed, herm(off)).span_residual, 1.0);
}

TEST(Qfim, RadialQubitMatchesOracles) {
    const Model m = radial_model();
    const FisherBundle b = fisher_bundle(m, std::vector<double>{0.5});
    EXPECT_NEAR(b.qfim(0, 0), 4.0 / 3.0, 1e-12);
    const double fid = oracle::fidelity_qfi(
        [&](double r) { return assemble_rho(m.generators_ptr(), eval_beta(m, std::vector<double>{r})).mat(); }, 0.5);
    EXPECT_NEAR(b.qfim(0, 0), fid, 1e-5);
}

TEST(Qfim, PureStateRotation) {
    const Model m(preset("pauli"), {"t"}, {"sin(t)", "0", "cos(t)"}, Convention::PaperPauli);
    const FisherBundle b = fisher_bundle(m, std::vector<double>{0.3});
    EXPECT_NEAR(b.qfim(0, 0), 1.0, 1e-12);
}

TEST(Qfim, ZeroDerivativeGivesZero) {
    const Model m(preset("pauli"), {"t"}, {"0", "0", "0.5"}, Convention::PaperPauli);
    EXPECT_EQ(fisher_bundle(m, std::vector<double>{0.3}).qfim(0, 0), 0.0);
}

// Property: QFIM of one-parameter qubit models matches the Bloch formula.
TEST(QfimProperty, MatchesBlochFormula) {
    sampling::Rng rng(44);
    for (int t = 0; t < 200; ++t) {
        Eigen::Vector3d n = sampling::gaussian_vector(rng, 3);
        n *= sampling::uniform(rng, 0.0, 0.95) / n.norm();
        const Eigen::Vector3d dn = sampling::gaussian_vector(rng, 3);
        const DensityMatrix rho = qubit(n);
        const SldResult r = sld_eigen(rho, herm(0.5 * (dn[0] * oracle::sigma(1) + dn[1] * oracle::sigma(2) +
                                                       dn[2] * oracle::sigma(3))));
        const std::vector<SldResult> slds{r};
        EXPECT_NEAR(qfim(rho, slds)(0, 0), oracle::bloch_qfi(n, dn), 1e-9 * oracle::bloch_qfi(n, dn) + 1e-12);
    }
}

// In-plane Bloch parameters: both SLD vectors and n lie in the xy-plane, so
// n . (a1 x a2) = 0 and the pair is compatible at every point.
TEST(Commutation, InPlaneQubitPairCommutes) {
    const Model m(preset("pauli"), {"x1", "x2"}, {"x1", "x2", "0"});
    const FisherBundle b = fisher_bundle(m, std::vector<double>{0.3, 0.2});
    EXPECT_LT(std::abs(b.commutation(0, 1)), 1e-15);
    EXPECT_TRUE(b.compatible);
}

TEST(Commutation, NonCommutingQubitPair) {
    const Model m(preset("pauli"), {"x1", "x2"}, {"x1", "x2", "0.3"});
    const FisherBundle b = fisher_bundle(m, std::vector<double>{0.3, 0.2});
    EXPECT_GT(std::abs(b.commutation(0, 1)), 1e-3);
    EXPECT_FALSE(b.compatible);
    EXPECT_EQ(b.commutation(0, 1), -b.commutation(1, 0));
    EXPECT_EQ(b.commutation(0, 0), 0.0);
}

TEST(Commutation, CommutingDirectionsAreCompatible) {
    const Model m(preset("pauli"), {"x1"}, {"0", "0", "x1"});
    EXPECT_TRUE(fisher_bundle(m, std::vector<double>{0.3}).compatible);
}

// Property: D_ij = (c_N/N) alpha_i^T X alpha_j for every algebra.
TEST(CommutationProperty, CrossRouteIdentity) {
    sampling::Rng rng(45);
    for (const auto &g : {preset("pauli"), preset("gellmann", 3), preset("xstate2q")}) {
        for (int t = 0; t < 50; ++t) {
            const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.02));
            std::vector<SldResult> slds;
            for (int i = 0; i < 3; ++i)
                slds.push_back(sld_eigen(rho, drho_from_dbeta(*g, sampling::gaussian_vector(rng, static_cast<Eigen::Index>(g->g())))));
            const RMatrix d = commutation_matrix(rho, slds);
            const RMatrix x = x_matrix(g->f(), rho.beta()).entries;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    const double via_x = kStateScale / static_cast<double>(g->dim_hilbert()) *
                                         slds[static_cast<std::size_t>(i)].alpha.dot(x * slds[static_cast<std::size_t>(j)].alpha);
                    EXPECT_NEAR(d(i, j), via_x, 1e-9);
                }
            }
        }
    }
}

TEST(Cfim, RadialQubit) {
    const Model m = radial_model();
    const std::vector<double> x{0.5};
    EXPECT_NEAR(cfim(m, sigma_povm(3), x)(0, 0), 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(cfim(m, sigma_povm(1), x)(0, 0), 0.0, 1e-15);
}

TEST(Cfim, DivergenceIsDomainError) {
    const Model m = radial_model();
    EXPECT_THROW(cfim(m, sigma_povm(3), std::vector<double>{1.0}), DomainError);
}

// Property: classical information never exceeds the quantum one.
TEST(CfimProperty, BoundedByQfim) {
    sampling::Rng rng(46);
    const Model m(preset("gellmann", 3), {"t"},
                  {"0.1*cos(t)", "0.1*sin(t)", "0.05", "0.1*t", "0", "0.02", "0", "0.1"});
    for (int t = 0; t < 50; ++t) {
        const std::vector<double> x{sampling::uniform(rng, -1, 1)};
        const double q = fisher_bundle(m, x).qfim(0, 0);
        EXPECT_LE(cfim(m, projective_povm(sampling::unitary(rng, 3)), x)(0, 0), q + 1e-10);
    }
}

TEST(Povm, Validation) {
    EXPECT_THROW(Povm({}), InputError);
    EXPECT_THROW(Povm({herm(CMatrix::Identity(2, 2) * 0.5)}), InputError);
    EXPECT_THROW(Povm({herm(CMatrix::Identity(2, 2)), herm(CMatrix::Identity(3, 3))}), InputError);
    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = 1.0;
    CMatrix comp = CMatrix::Identity(2, 2) - neg;
    EXPECT_THROW(Povm({herm(neg), herm(comp)}), InputError);
    EXPECT_NO_THROW(Povm({herm(CMatrix::Identity(2, 2))}));
}

TEST(Equivalence, Examples) {
    const DensityMatrix rho = qubit({0.1, 0.2, 0.3});
    const SldResult a = sld_eigen(rho, herm(0.5 * oracle::sigma(1)));
    const SldResult b = sld_eigen(rho, herm(0.5 * oracle::sigma(2)));
    const SldResult a2 = sld_eigen(rho, herm(oracle::sigma(1)));

    const std::vector<SldResult> independent{a, b};
    const EquivalenceReport ok = check_invertibility_equivalence(rho, independent);
    EXPECT_TRUE(ok.qfim_invertible);
    EXPECT_TRUE(ok.calL_independent);
    EXPECT_TRUE(ok.both_sides_agree);
    EXPECT_EQ(ok.sld_rank, 2u);

    const std::vector<SldResult> parallel{a, a2};
    const EquivalenceReport dep = check_invertibility_equivalence(rho, parallel);
    EXPECT_FALSE(dep.qfim_invertible);
    EXPECT_FALSE(dep.calL_independent);
    EXPECT_TRUE(dep.both_sides_agree);
    EXPECT_EQ(dep.calL_rank, 1u);
}

// Property: invertibility of the QFIM and independence of the symmetrized
// products always agree on full-rank states.
TEST(EquivalenceProperty, AgreesOnRandomFamilies) {
    sampling::Rng rng(47);
    const auto g = preset("xstate2q");
    for (int t = 0; t < 100; ++t) {
        const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.02));
        const int m = sampling::uniform_int(rng, 1, 4);
        const RMatrix basis = sampling::gaussian_matrix(rng, 7, sampling::uniform_int(rng, 1, m));
        std::vector<SldResult> slds;
        for (int i = 0; i < m; ++i)
            slds.push_back(sld_eigen(rho, drho_from_dbeta(*g, basis * sampling::gaussian_vector(rng, basis.cols()))));
        EXPECT_TRUE(check_invertibility_equivalence(rho, slds).both_sides_agree);
    }
}
