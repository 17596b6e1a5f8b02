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
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcompat/bound.hpp"
#include "qcompat/sampling.hpp"

using namespace qcompat;

namespace {

GeneratorSetPtr preset(const std::string &name, Eigen::Index n = 0) {
    return std::make_shared<const GeneratorSet>(make_preset(name, n ? n : preset_default_dim(name)));
}

RVector vec(std::initializer_list<double> v) {
    RVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) out[i++] = d;
    return out;
}

StratumClass classify(const GeneratorSet &g, const RVector &beta) {
    const JProfile prof = j_profile(g.f());
    const auto js = j_values(x_matrix(g.f(), beta), prof);
    return classify_stratum(js);
}

double max_isotropy(const RMatrix &x, const std::vector<RVector> &vs) {
    double worst = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) worst = std::max(worst, std::abs(vs[i].dot(x * vs[j])));
    return worst;
}

int column_rank(const std::vector<RVector> &vs) {
    if (vs.empty()) return 0;
    RMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
    for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
    Eigen::JacobiSVD<RMatrix> svd(m);
    return static_cast<int>((svd.singularValues().array() > 1e-9 * svd.singularValues()[0]).count());
}

}  // namespace

TEST(XMatrix, QubitBlochVector) {
    // Bloch vector (0, 0, n_z) in internal units is n_z / sqrt(2).
    const auto g = preset("pauli");
    const double nz = 0.6;
    const XMatrix x = x_matrix(g->f(), vec({0, 0, nz / std::sqrt(2.0)}));
    RMatrix expect = RMatrix::Zero(3, 3);
    expect(0, 1) = nz;
    expect(1, 0) = -nz;
    EXPECT_LT((x.entries - expect).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(x.rank, 2);
    EXPECT_EQ(x_matrix(g->f(), RVector::Zero(3)).rank, 0);
}

TEST(XMatrix, LengthMismatch) { EXPECT_THROW(x_matrix(preset("pauli")->f(), RVector::Zero(2)), InputError); }

// Property: X is antisymmetric with even rank, and the rank is scale invariant.
TEST(XMatrixProperty, EvenRankAndScaleInvariance) {
    sampling::Rng rng(51);
    const auto g = preset("xstate2q");
    std::set<int> seen;
    for (int t = 0; t < 100; ++t) {
        RVector b = sampling::gaussian_vector(rng, 7);
        const int kind = t % 3;
        if (kind == 0) b = vec({0, 0, 1, 0, 0, 0, 0}) * b[2];
        if (kind == 1) b = vec({b[0], -b[0], 0, b[3], b[4], -b[4], b[3]});
        const XMatrix x = x_matrix(g->f(), b);
        EXPECT_EQ(x.entries, -x.entries.transpose());
        EXPECT_EQ(x.rank % 2, 0);
        seen.insert(x.rank);
        for (double c : {0.5, 2.0, 10.0}) EXPECT_EQ(x_matrix(g->f(), c * b).rank, x.rank);
    }
    EXPECT_EQ(seen, (std::set<int>{0, 2, 4}));
}

TEST(RankAntisymmetric, RejectsSymmetricInput) {
    EXPECT_THROW(rank_antisymmetric(RMatrix::Identity(3, 3)), InputError);
    EXPECT_THROW(rank_antisymmetric(RMatrix::Zero(2, 3)), InputError);
}

TEST(RankAntisymmetricProperty, MatchesConstruction) {
    sampling::Rng rng(52);
    for (int t = 0; t < 200; ++t) {
        const int g = sampling::uniform_int(rng, 1, 9);
        const int r = 2 * sampling::uniform_int(rng, 0, g / 2);
        EXPECT_EQ(rank_antisymmetric(sampling::antisymmetric(rng, g, r)).rank, r);
    }
}

TEST(SharpL, Examples) {
    EXPECT_EQ(sharp_L(3, 2), 2u);
    EXPECT_EQ(sharp_L(7, 4), 5u);
    EXPECT_EQ(sharp_L(7, 2), 6u);
    EXPECT_EQ(sharp_L(7, 0), 7u);
    EXPECT_EQ(sharp_L(8, 8), 4u);
    EXPECT_THROW(sharp_L(3, 3), InputError);
    EXPECT_THROW(sharp_L(3, 4), InputError);
}

TEST(CharPoly, KnownMatrix) {
    // det(l I - X) for the qubit form with n_z = 2 is l^3 + 4 l.
    RMatrix x = RMatrix::Zero(3, 3);
    x(0, 1) = 2;
    x(1, 0) = -2;
    const CharPoly p = char_poly_coeffs(x);
    EXPECT_EQ(p.coeffs, vec({1, 0, 4, 0}));
    EXPECT_EQ(p.power(1), 4.0);
    EXPECT_EQ(p.parity_residual, 0.0);
}

// Property: Faddeev-LeVerrier agrees with expanded eigenvalues and the odd
// coefficients vanish.
TEST(CharPolyProperty, MatchesEigenvalueOracle) {
    sampling::Rng rng(53);
    for (int t = 0; t < 500; ++t) {
        const int g = sampling::uniform_int(rng, 2, 8);
        const RMatrix x = sampling::antisymmetric(rng, g, 2 * sampling::uniform_int(rng, 0, g / 2));
        const CharPoly p = char_poly_coeffs(x);
        const RVector ref = oracle::char_poly_from_eigenvalues(x);
        for (Eigen::Index j = 0; j <= g; ++j) {
            const double scale = std::pow(std::max(1.0, x.norm()), static_cast<double>(j));
            EXPECT_NEAR(p.coeffs[j], ref[j], 1e-8 * scale) << "g=" << g << " j=" << j;
        }
        EXPECT_LE(p.parity_residual, 1e-10 * std::pow(std::max(1.0, x.norm()), g));
    }
}

TEST(JProfile, Presets) {
    EXPECT_EQ(j_profile(preset("pauli")->f()).ks, (std::vector<std::size_t>{1}));
    EXPECT_EQ(j_profile(preset("xstate2q")->f()).ks, (std::vector<std::size_t>{5, 3}));
    EXPECT_EQ(j_profile(preset("gellmann", 3)->f()).ks, (std::vector<std::size_t>{6, 4, 2}));
}

TEST(Stratum, ClassifyPresets) {
    const auto x = preset("xstate2q");
    EXPECT_EQ(classify(*x, RVector::Zero(7)).index, 0u);
    EXPECT_EQ(classify(*x, vec({0, 0, 1, 0, 0, 0, 0})).index, 0u);
    EXPECT_EQ(classify(*x, vec({1, -1, 0, 1, 1, -1, 1})).index, 1u);
    EXPECT_EQ(classify(*x, vec({0.3, -0.7, 0.2, 0.5, -0.1, 0.4, 0.6})).index, 2u);
    const auto p = preset("pauli");
    EXPECT_EQ(classify(*p, RVector::Zero(3)).index, 0u);
    EXPECT_EQ(classify(*p, vec({0.1, 0, 0})).index, 1u);
    EXPECT_EQ(stratum_rank(j_profile(x->f()), 2), 4);
    EXPECT_EQ(stratum_rank(j_profile(x->f()), 1), 2);
    EXPECT_THROW(stratum_rank(j_profile(x->f()), 3), InputError);
}

TEST(Stratum, OffPatternList) {
    const std::vector<JValue> js{{5, 0.0, 1.0}, {3, 2.0, 1.0}};
    const StratumClass c = classify_stratum(js);
    EXPECT_TRUE(c.off_pattern);
    EXPECT_EQ(c.nearest, 2u);
    EXPECT_EQ(c.index, 2u);
    const std::vector<JValue> clean{{5, 1.0, 1.0}, {3, 1e-12, 1.0}};
    EXPECT_FALSE(classify_stratum(clean).off_pattern);
    EXPECT_EQ(classify_stratum(clean).index, 1u);
}

// Property: the stratum index determines rank(X) through the profile.
TEST(StratumProperty, RankFollowsStratum) {
    sampling::Rng rng(54);
    for (const auto &g : {preset("pauli"), preset("gellmann", 3), preset("xstate2q")}) {
        const JProfile prof = j_profile(g->f());
        for (int t = 0; t < 100; ++t) {
            RVector b = sampling::gaussian_vector(rng, static_cast<Eigen::Index>(g->g()));
            if (t % 4 == 0) b.setZero();
            const XMatrix x = x_matrix(g->f(), b);
            const auto js = j_values(x, prof);
            const StratumClass c = classify_stratum(js);
            ASSERT_FALSE(c.off_pattern);
            EXPECT_EQ(stratum_rank(prof, c.index), x.rank);
        }
    }
}

TEST(Bound, PresetValues) {
    const auto p = preset_strata("pauli");
    ASSERT_TRUE(p);
    const BoundReport rp = sharp_x_bound(*preset("pauli"), *p);
    EXPECT_EQ(rp.overall, 2u);
    ASSERT_EQ(rp.rows.size(), 2u);
    EXPECT_EQ(rp.rows[1].sharp_L, 2u);
    EXPECT_EQ(rp.rows[1].sharp_calL, 3u);

    const auto x = preset_strata("xstate2q");
    ASSERT_TRUE(x);
    const BoundReport rx = sharp_x_bound(*preset("xstate2q"), *x);
    EXPECT_EQ(rx.overall, 5u);
    ASSERT_EQ(rx.rows.size(), 3u);
    EXPECT_EQ(rx.rows[0].bound, 1u);
    EXPECT_EQ(rx.rows[1].bound, 4u);
    EXPECT_EQ(rx.rows[2].bound, 5u);
    EXPECT_FALSE(preset_strata("gellmann"));
}

TEST(Bound, MissingDataNamesEveryStratum) {
    const auto g = preset("xstate2q");
    const std::vector<StratumSpec> s{{0, 0, std::nullopt, {}}, {1, std::nullopt, 4, {}}, {2, 4, 7, {}}};
    try {
        sharp_x_bound(*g, s);
        FAIL();
    } catch (const MissingStratumData &e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("B0 (dimension)"), std::string::npos) << msg;
        EXPECT_NE(msg.find("B1 (rank)"), std::string::npos) << msg;
        EXPECT_EQ(msg.find("B2"), std::string::npos) << msg;
    }
    EXPECT_THROW(sharp_x_bound(*g, std::vector<StratumSpec>{}), MissingStratumData);
}

TEST(Bound, InconsistentSamples) {
    const auto g = preset("xstate2q");
    const std::vector<StratumSpec> wrong_index{{1, std::nullopt, 4, {vec({0.3, -0.7, 0.2, 0.5, -0.1, 0.4, 0.6})}}};
    EXPECT_THROW(sharp_x_bound(*g, wrong_index), InputError);
    const std::vector<StratumSpec> wrong_rank{{2, 2, 7, {vec({0.3, -0.7, 0.2, 0.5, -0.1, 0.4, 0.6})}}};
    EXPECT_THROW(sharp_x_bound(*g, wrong_rank), InputError);
}

TEST(Bound, CommutativeAlgebraReachesG) {
    auto diag = std::make_shared<const GeneratorSet>(subalgebra(make_preset("xstate2q", 4), std::vector<std::size_t>{0, 1, 2}));
    const std::vector<StratumSpec> s{{0, 0, 3, {}}};
    const BoundReport r = sharp_x_bound(*diag, s);
    EXPECT_TRUE(r.commutative);
    EXPECT_EQ(r.overall, 3u);
    EXPECT_TRUE(full_state_check(*diag).saturable_full_state);
    EXPECT_FALSE(full_state_check(*preset("pauli")).saturable_full_state);
    EXPECT_FALSE(full_state_check(*preset("xstate2q")).saturable_full_state);
}

TEST(Bound, CustomCountFunction) {
    const auto p = preset_strata("pauli");
    const BoundReport r = sharp_x_bound(*preset("pauli"), *p, {}, [](std::size_t g, std::size_t) { return g; });
    EXPECT_EQ(r.overall, 3u);
}

TEST(Symplectic, QubitForm) {
    RMatrix x = RMatrix::Zero(3, 3);
    x(0, 1) = 0.6;
    x(1, 0) = -0.6;
    const SymplecticBasis sb = symplectic_basis(x);
    ASSERT_EQ(sb.pairs.size(), 1u);
    ASSERT_EQ(sb.kernel.size(), 1u);
    EXPECT_NEAR(sb.pairs[0].first.dot(x * sb.pairs[0].second), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(sb.kernel[0][2]), 1.0, 1e-15);
    const auto set = max_compatible_set(x);
    EXPECT_EQ(set.size(), 2u);
    EXPECT_LT(max_isotropy(x, set), 1e-15);
}

TEST(Symplectic, ZeroForm) {
    const SymplecticBasis sb = symplectic_basis(RMatrix::Zero(4, 4));
    EXPECT_TRUE(sb.pairs.empty());
    EXPECT_EQ(sb.kernel.size(), 4u);
    EXPECT_EQ(max_compatible_set(RMatrix::Zero(4, 4)).size(), 4u);
}

// Property: canonical form relations hold for random antisymmetric forms.
TEST(SymplecticProperty, CanonicalRelations) {
    sampling::Rng rng(55);
    for (int t = 0; t < 50; ++t) {
        const int r = 2 * sampling::uniform_int(rng, 0, 3);
        const RMatrix x = sampling::antisymmetric(rng, 6, r);
        const SymplecticBasis sb = symplectic_basis(x);
        ASSERT_EQ(static_cast<int>(sb.pairs.size()), r / 2);
        ASSERT_EQ(static_cast<int>(sb.kernel.size()), 6 - r);
        for (std::size_t i = 0; i < sb.pairs.size(); ++i) {
            for (std::size_t j = 0; j < sb.pairs.size(); ++j) {
                const auto &[ui, vi] = sb.pairs[i];
                const auto &[uj, vj] = sb.pairs[j];
                EXPECT_NEAR(ui.dot(x * vj), i == j ? 1.0 : 0.0, 1e-9);
                EXPECT_NEAR(ui.dot(x * uj), 0.0, 1e-9);
                EXPECT_NEAR(vi.dot(x * vj), 0.0, 1e-9);
            }
        }
        for (const RVector &k : sb.kernel) EXPECT_LT((x * k).norm(), 1e-9 * std::max(1.0, x.norm()));
        std::vector<RVector> all = sb.kernel;
        for (const auto &[u, v] : sb.pairs) {
            all.push_back(u);
            all.push_back(v);
        }
        EXPECT_EQ(column_rank(all), 6);
    }
}

// Property: the compatible set has #L members, is independent, isotropic,
// and its non-kernel members have independent images under X.
TEST(SymplecticProperty, MaxCompatibleSet) {
    sampling::Rng rng(56);
    for (int t = 0; t < 100; ++t) {
        const int g = sampling::uniform_int(rng, 2, 8);
        const int r = 2 * sampling::uniform_int(rng, 0, g / 2);
        const RMatrix x = sampling::antisymmetric(rng, g, r);
        const auto set = max_compatible_set(x);
        ASSERT_EQ(set.size(), sharp_L(static_cast<std::size_t>(g), static_cast<std::size_t>(r)));
        EXPECT_EQ(column_rank(set), static_cast<int>(set.size()));
        EXPECT_LT(max_isotropy(x, set), 1e-9 * std::max(1.0, x.norm()));
        std::vector<RVector> images;
        for (std::size_t i = static_cast<std::size_t>(g - r); i < set.size(); ++i) images.emplace_back(x * set[i]);
        EXPECT_EQ(column_rank(images), r / 2);
    }
}

// Property: no isotropic independent family exceeds #L.
TEST(SymplecticProperty, NoLargerIsotropicFamily) {
    sampling::Rng rng(57);
    for (int t = 0; t < 50; ++t) {
        const int g = sampling::uniform_int(rng, 2, 7);
        const int r = 2 * sampling::uniform_int(rng, 1, g / 2);
        const RMatrix x = sampling::antisymmetric(rng, g, r);
        auto set = max_compatible_set(x);
        // Any extra direction breaks isotropy or independence.
        for (int k = 0; k < 10; ++k) {
            auto bigger = set;
            bigger.push_back(sampling::gaussian_vector(rng, g));
            EXPECT_TRUE(column_rank(bigger) < static_cast<int>(bigger.size()) || max_isotropy(x, bigger) > 1e-6);
        }
    }
}

TEST(Scan, DeterministicAndMixed) {
    const Model m(preset("pauli"), {"x1", "x2"}, {"x1", "x2", "0"});
    const std::vector<std::pair<double, double>> region{{-1, 1}, {-1, 1}};
    const ScanReport a = stratum_scan(m, region, 50, 9);
    const ScanReport b = stratum_scan(m, region, 50, 9);
    ASSERT_EQ(a.samples.size(), 50u);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        EXPECT_EQ(a.samples[i].x, b.samples[i].x);
        EXPECT_EQ(a.samples[i].rank, b.samples[i].rank);
    }
    EXPECT_FALSE(a.mixed_ranks);
    EXPECT_EQ(a.rank_histogram.at(2), 50u);

    ScanOptions opt;
    opt.include_center = true;
    const ScanReport c = stratum_scan(m, region, 50, 9, opt);
    EXPECT_TRUE(c.mixed_ranks);
    EXPECT_EQ(c.samples.front().rank, 0);
}

TEST(Scan, DomainErrorCarriesCoordinates) {
    const Model m(preset("pauli"), {"x"}, {"sqrt(x)", "0", "0"});
    const std::vector<std::pair<double, double>> region{{-2, -1}};
    try {
        stratum_scan(m, region, 5, 1);
        FAIL();
    } catch (const DomainError &e) {
        EXPECT_NE(std::string(e.what()).find("x = "), std::string::npos) << e.what();
    }
}

TEST(Scan, InputErrors) {
    const Model m(preset("pauli"), {"x"}, {"x", "0", "0"});
    const std::vector<std::pair<double, double>> ok{{0, 1}};
    const std::vector<std::pair<double, double>> two{{0, 1}, {0, 1}};
    const std::vector<std::pair<double, double>> flipped{{1, 0}};
    EXPECT_THROW(stratum_scan(m, ok, 0, 1), InputError);
    EXPECT_THROW(stratum_scan(m, two, 5, 1), InputError);
    EXPECT_THROW(stratum_scan(m, flipped, 5, 1), InputError);
}
