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
 * @file bound.hpp
 * Upper bound on the number of simultaneously compatible and independent
 * parameters.
 *
 * The commutation condition on SLD coefficient vectors alpha reads
 * alpha_i . X . alpha_j = 0 with the antisymmetric X_ab = sum_c f_abc beta_c.
 * At most floor(r/2) + (g - r) independent vectors satisfy it (r = rank X);
 * combining that count with the dimension of the rank stratum that holds
 * the encode space gives the bound max_k min(#L(B_k), dim B_k).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "qcompat/algebra.hpp"
#include "qcompat/model.hpp"

namespace qcompat {

struct RankInfo {
    int rank = 0;
    RVector singular_values;  ///< descending
    double threshold = 0.0;   ///< singular values above this count
    bool odd_corrected = false;
};

/**
 * @brief Even rank of an antisymmetric matrix from its singular values.
 *
 * Singular values above rel_tol * max(sigma_max, 1e-300) count. An odd
 * count is rounded down and flagged; antisymmetric real matrices have even
 * rank, so this only happens when the cut straddles a tiny pair.
 */
inline RankInfo rank_antisymmetric(const RMatrix &x, double rel_tol = 1e-9) {
    if (x.rows() != x.cols()) throw InputError("matrix is not square");
    const double scale = x.size() ? std::max(1.0, x.cwiseAbs().maxCoeff()) : 1.0;
    if (x.size() && (x + x.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InputError("matrix is not antisymmetric");
    }
    RankInfo r;
    if (x.size() == 0) return r;
    Eigen::JacobiSVD<RMatrix> svd(x);
    r.singular_values = svd.singularValues();
    r.threshold = rel_tol * std::max(r.singular_values[0], 1e-300);
    r.rank = static_cast<int>((r.singular_values.array() > r.threshold).count());
    if (r.rank % 2 != 0) {
        r.rank -= 1;
        r.odd_corrected = true;
    }
    return r;
}

/// X^beta with its even rank.
struct XMatrix {
    RMatrix entries;
    int rank = 0;
    RVector singular_values;
    double tol_used = 0.0;
    bool odd_corrected = false;

    [[nodiscard]] std::size_t g() const { return static_cast<std::size_t>(entries.rows()); }
};

/// X_ab = sum_c f_abc beta_c, built from the upper triangle so X^T = -X
/// holds bit for bit.
inline XMatrix x_matrix(const StructureConstants &f, const RVector &beta, double rel_tol = 1e-9) {
    const std::size_t g = f.size();
    if (static_cast<std::size_t>(beta.size()) != g) {
        throw InputError("beta has length " + std::to_string(beta.size()) + ", expected g = " + std::to_string(g));
    }
    XMatrix x;
    x.entries = RMatrix::Zero(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(g));
    for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t b = a + 1; b < g; ++b) {
            double s = 0.0;
            for (std::size_t c = 0; c < g; ++c) s += 0.5 * (f(a, b, c) - f(b, a, c)) * beta[static_cast<Eigen::Index>(c)];
            x.entries(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
            x.entries(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = -s;
        }
    }
    const RankInfo r = rank_antisymmetric(x.entries, rel_tol);
    x.rank = r.rank;
    x.singular_values = r.singular_values;
    x.tol_used = r.threshold;
    x.odd_corrected = r.odd_corrected;
    return x;
}

/// floor(rank/2) + (g - rank): the most linearly independent vectors that
/// are pairwise isotropic for a form of the given rank.
inline std::size_t sharp_L(std::size_t g, std::size_t rank) {
    if (rank > g) throw InputError("rank exceeds g");
    if (rank % 2 != 0) throw InputError("antisymmetric rank must be even");
    return rank / 2 + (g - rank);
}

using SharpLFunction = std::function<std::size_t(std::size_t, std::size_t)>;

struct CharPoly {
    /// det(lambda I - X) = sum_j coeffs[j] lambda^(g - j); coeffs[0] = 1.
    RVector coeffs;
    /// max |c| over coefficients that must vanish for antisymmetric X
    /// (odd powers for even g, even powers for odd g).
    double parity_residual = 0.0;

    /// Coefficient of lambda^k.
    [[nodiscard]] double power(std::size_t k) const {
        return coeffs[coeffs.size() - 1 - static_cast<Eigen::Index>(k)];
    }
};

/// Characteristic polynomial by the Faddeev-LeVerrier recurrence.
inline CharPoly char_poly_coeffs(const RMatrix &x) {
    const Eigen::Index g = x.rows();
    if (x.cols() != g) throw InputError("matrix is not square");
    CharPoly p;
    p.coeffs = RVector::Zero(g + 1);
    p.coeffs[0] = 1.0;
    RMatrix m = RMatrix::Zero(g, g);
    const RMatrix id = RMatrix::Identity(g, g);
    for (Eigen::Index k = 1; k <= g; ++k) {
        m = x * m + p.coeffs[k - 1] * id;
        p.coeffs[k] = -(x * m).trace() / static_cast<double>(k);
    }
    // coeffs[j] multiplies lambda^(g-j); it must vanish when j is odd.
    for (Eigen::Index j = 1; j <= g; j += 2) p.parity_residual = std::max(p.parity_residual, std::abs(p.coeffs[j]));
    return p;
}

// --- strata -------------------------------------------------------------

/// One characteristic coefficient J_k(beta) (coefficient of lambda^k) and
/// the natural magnitude of a degree-(g-k) invariant at this beta.
struct JValue {
    std::size_t k = 0;
    double value = 0.0;
    double scale = 0.0;
};

/// Powers k < g whose coefficients J_k are not identically zero on the
/// algebra, in decreasing order.
struct JProfile {
    std::size_t g = 0;
    std::vector<std::size_t> ks;
};

namespace detail {

/// (sum_i sigma_i^2)^p with sum sigma^2 = ||X||_F^2 / 2 and p = (g-k)/2.
inline double j_scale(const RMatrix &x, std::size_t g, std::size_t k) {
    const double s2 = 0.5 * x.squaredNorm();
    return std::pow(s2, 0.5 * static_cast<double>(g - k));
}

}  // namespace detail

/**
 * @brief Finds the J_k that are not identically zero by evaluating at
 * seeded random beta (polynomial identity testing).
 *
 * J_k counts as identically zero when |J_k| <= rel_tol * scale at every
 * sample.
 */
inline JProfile j_profile(const StructureConstants &f, std::uint64_t seed = 0x5eedULL, int samples = 64,
                          double rel_tol = 1e-9) {
    JProfile prof;
    prof.g = f.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<bool> alive(prof.g, false);
    RVector beta(static_cast<Eigen::Index>(prof.g));
    for (int s = 0; s < samples; ++s) {
        for (Eigen::Index c = 0; c < beta.size(); ++c) beta[c] = gauss(rng);
        const XMatrix x = x_matrix(f, beta);
        const CharPoly p = char_poly_coeffs(x.entries);
        for (std::size_t k = 0; k < prof.g; ++k) {
            if ((prof.g - k) % 2 != 0) continue;
            if (std::abs(p.power(k)) > rel_tol * detail::j_scale(x.entries, prof.g, k)) alive[k] = true;
        }
    }
    for (std::size_t k = prof.g; k-- > 0;) {
        if (alive[k]) prof.ks.push_back(k);
    }
    return prof;
}

/// J_k(beta) for every k in the profile, highest k first.
inline std::vector<JValue> j_values(const XMatrix &x, const JProfile &prof) {
    const CharPoly p = char_poly_coeffs(x.entries);
    std::vector<JValue> out;
    out.reserve(prof.ks.size());
    for (std::size_t k : prof.ks) out.push_back({k, p.power(k), detail::j_scale(x.entries, prof.g, k)});
    return out;
}

struct StratumClass {
    std::size_t index = 0;    ///< B_index
    bool off_pattern = false; ///< a vanishing J sits between non-vanishing ones
    std::size_t nearest = 0;  ///< position of the last non-vanishing J, plus one
};

/**
 * @brief Stratum B_j of an ordered J list: the first j entries are
 * non-zero and the rest vanish.
 *
 * J_k vanishes when |value| <= rel_tol * scale. Off-pattern lists report
 * the stratum of their last non-vanishing entry.
 */
inline StratumClass classify_stratum(std::span<const JValue> js, double rel_tol = 1e-9) {
    StratumClass c;
    std::size_t leading = 0;
    bool seen_zero = false;
    for (std::size_t i = 0; i < js.size(); ++i) {
        const bool zero = std::abs(js[i].value) <= rel_tol * js[i].scale;
        if (zero) {
            seen_zero = true;
        } else {
            if (seen_zero) c.off_pattern = true;
            else ++leading;
            c.nearest = i + 1;
        }
    }
    c.index = c.off_pattern ? c.nearest : leading;
    return c;
}

/// rank(X) on stratum B_j implied by the profile.
inline int stratum_rank(const JProfile &prof, std::size_t index) {
    if (index == 0) return 0;
    if (index > prof.ks.size()) throw InputError("stratum index out of range");
    return static_cast<int>(prof.g - prof.ks[index - 1]);
}

/// A stratum B_k with optional rank, dimension and representative points
/// (internal beta).
struct StratumSpec {
    std::size_t index = 0;
    std::optional<int> expected_rank;
    std::optional<int> dimension;
    std::vector<RVector> samples;
};

struct StratumRow {
    std::size_t index = 0;
    int rank = 0;
    std::size_t sharp_L = 0;
    std::size_t sharp_calL = 0;  ///< = dim B_k
    std::size_t bound = 0;       ///< min of the two
};

struct BoundReport {
    std::size_t g = 0;
    std::vector<StratumRow> rows;
    std::size_t overall = 0;
    bool commutative = false;
};

/**
 * @brief max_k min(#L(B_k), dim B_k).
 *
 * A stratum's rank comes from its samples (which must agree with each
 * other, with `expected_rank` and with their classified stratum) or from
 * `expected_rank`. Throws MissingStratumData naming every stratum lacking
 * a dimension or a rank.
 */
inline BoundReport sharp_x_bound(const GeneratorSet &gens, std::span<const StratumSpec> strata,
                                 const Tolerances &tol = {}, const SharpLFunction &count = sharp_L) {
    if (strata.empty()) throw MissingStratumData("no strata declared");
    const JProfile prof = j_profile(gens.f(), 0x5eedULL, 64, tol.j_vanish);
    BoundReport rep;
    rep.g = gens.g();
    rep.commutative = is_commutative(gens, tol.tol);
    std::string missing;
    for (const StratumSpec &s : strata) {
        std::optional<int> rank = s.expected_rank;
        for (const RVector &b : s.samples) {
            const XMatrix x = x_matrix(gens.f(), b, tol.rank_rel);
            const auto js = j_values(x, prof);
            const StratumClass cls = classify_stratum(js, tol.j_vanish);
            if (cls.index != s.index) {
                throw InputError("sample for stratum B" + std::to_string(s.index) + " classifies as B" +
                                 std::to_string(cls.index));
            }
            if (rank && *rank != x.rank) {
                throw InputError("stratum B" + std::to_string(s.index) + " has samples of rank " +
                                 std::to_string(x.rank) + " and " + std::to_string(*rank));
            }
            rank = x.rank;
        }
        if (!rank || !s.dimension) {
            missing += (missing.empty() ? "" : ", ") + std::string("B") + std::to_string(s.index) +
                       (!s.dimension ? " (dimension)" : " (rank)");
            continue;
        }
        if (*rank < 0 || *rank % 2 != 0 || static_cast<std::size_t>(*rank) > rep.g) {
            throw InputError("stratum B" + std::to_string(s.index) + " has invalid rank");
        }
        if (*s.dimension < 0 || static_cast<std::size_t>(*s.dimension) > rep.g) {
            throw InputError("stratum B" + std::to_string(s.index) + " has invalid dimension");
        }
        StratumRow row;
        row.index = s.index;
        row.rank = *rank;
        row.sharp_L = count(rep.g, static_cast<std::size_t>(*rank));
        row.sharp_calL = static_cast<std::size_t>(*s.dimension);
        row.bound = std::min(row.sharp_L, row.sharp_calL);
        rep.rows.push_back(row);
    }
    if (!missing.empty()) throw MissingStratumData("missing stratum data: " + missing);
    for (const auto &r : rep.rows) rep.overall = std::max(rep.overall, r.bound);
    return rep;
}

/// Built-in strata of the presets whose dimensions are known:
/// pauli (dim B0, B1) = (0, 3); xstate2q (dim B0, B1, B2) = (1, 4, 7).
inline std::optional<std::vector<StratumSpec>> preset_strata(const std::string &name) {
    auto vec = [](std::initializer_list<double> v) {
        RVector out(static_cast<Eigen::Index>(v.size()));
        Eigen::Index i = 0;
        for (double d : v) out[i++] = d;
        return out;
    };
    if (name == "pauli") {
        const double n = 1.0 / std::sqrt(2.0);  // Bloch vector e_z
        return std::vector<StratumSpec>{
            {0, 0, 0, {vec({0.0, 0.0, 0.0})}},
            {1, 2, 3, {vec({0.0, 0.0, n})}},
        };
    }
    if (name == "xstate2q") {
        return std::vector<StratumSpec>{
            {0, 0, 1, {vec({0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0})}},
            {1, 2, 4, {vec({1.0, -1.0, 0.0, 1.0, 1.0, -1.0, 1.0})}},
            {2, 4, 7, {vec({0.3, -0.7, 0.2, 0.5, -0.1, 0.4, 0.6})}},
        };
    }
    return std::nullopt;
}

struct FullStateReport {
    bool saturable_full_state = false;
    bool commutative = false;
    std::size_t g = 0;
    std::string explanation;
};

/// Estimating all g coefficients at the quantum Cramer-Rao bound needs
/// #x = g, which requires B0 to be g-dimensional, i.e. a commutative g.
inline FullStateReport full_state_check(const GeneratorSet &g, double tol = 1e-10) {
    FullStateReport r;
    r.g = g.g();
    r.commutative = is_commutative(g, tol);
    r.saturable_full_state = r.commutative;
    r.explanation = r.commutative
                        ? "all structure constants vanish: X = 0 everywhere, B0 is the whole g-dimensional space"
                        : "non-commutative algebra: #x = " + std::to_string(r.g) +
                              " would need B0 to be " + std::to_string(r.g) +
                              "-dimensional, but X(beta) != 0 away from a proper subvariety";
    return r;
}

// --- symplectic reduction ---------------------------------------------------

struct SymplecticBasis {
    std::vector<RVector> kernel;                   ///< X w = 0
    std::vector<std::pair<RVector, RVector>> pairs; ///< u_i X v_j = delta_ij
    int rank = 0;
};

/**
 * @brief Canonical form of an antisymmetric X: an orthonormal kernel basis
 * plus rank/2 pairs with u_i.X.v_j = delta_ij and u.X.u = v.X.v = 0.
 *
 * Pairs are peeled off by largest-entry pivoting on the form restricted to
 * the remaining candidates, which are then made form-orthogonal to the
 * pair. The kernel is the SVD null space.
 */
inline SymplecticBasis symplectic_basis(const RMatrix &x, double rel_tol = 1e-9) {
    const RankInfo info = rank_antisymmetric(x, rel_tol);
    const Eigen::Index g = x.rows();
    SymplecticBasis out;
    out.rank = info.rank;
    std::vector<RVector> cand;
    for (Eigen::Index i = 0; i < g; ++i) cand.push_back(RVector::Unit(g, i));
    auto form = [&](const RVector &a, const RVector &b) { return a.dot(x * b); };
    for (int p = 0; p < info.rank / 2; ++p) {
        std::size_t bi = 0, bj = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            for (std::size_t j = i + 1; j < cand.size(); ++j) {
                const double v = std::abs(form(cand[i], cand[j]));
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best <= info.threshold) {
            throw InputError("rank/tolerance inconsistency: form vanishes after " + std::to_string(p) +
                             " of " + std::to_string(info.rank / 2) + " pairs");
        }
        RVector u = cand[bi];
        RVector v = cand[bj] / form(u, cand[bj]);
        std::vector<RVector> rest;
        for (std::size_t k = 0; k < cand.size(); ++k) {
            if (k == bi || k == bj) continue;
            RVector c = cand[k] - form(cand[k], v) * u + form(cand[k], u) * v;
            const double nrm = c.norm();
            if (nrm > 0.0) c /= nrm;
            rest.push_back(std::move(c));
        }
        cand = std::move(rest);
        out.pairs.emplace_back(std::move(u), std::move(v));
    }
    Eigen::JacobiSVD<RMatrix> svd(x, Eigen::ComputeFullV);
    const RMatrix &vmat = svd.matrixV();
    for (Eigen::Index i = info.rank; i < g; ++i) out.kernel.emplace_back(vmat.col(i));
    return out;
}

/**
 * @brief floor(r/2) + (g - r) unit vectors, linearly independent and
 * pairwise isotropic (alpha_i.X.alpha_j = 0).
 *
 * The kernel basis is extended by the first halves of the symplectic
 * pairs; those span an isotropic subspace, so they are projected off the
 * kernel and orthonormalized without breaking isotropy.
 */
inline std::vector<RVector> max_compatible_set(const RMatrix &x, double rel_tol = 1e-9) {
    const SymplecticBasis sb = symplectic_basis(x, rel_tol);
    const Eigen::Index g = x.rows();
    std::vector<RVector> out = sb.kernel;
    if (!sb.pairs.empty()) {
        RMatrix u(g, static_cast<Eigen::Index>(sb.pairs.size()));
        for (std::size_t i = 0; i < sb.pairs.size(); ++i) {
            RVector v = sb.pairs[i].first;
            for (const RVector &k : sb.kernel) v -= k.dot(v) * k;
            u.col(static_cast<Eigen::Index>(i)) = v;
        }
        Eigen::HouseholderQR<RMatrix> qr(u);
        const RMatrix q = qr.householderQ() * RMatrix::Identity(g, u.cols());
        for (Eigen::Index i = 0; i < q.cols(); ++i) out.emplace_back(q.col(i));
    }
    return out;
}

// --- scanning --------------------------------------------------------------

struct ScanSample {
    std::vector<double> x;
    RVector beta;
    int rank = 0;
    std::size_t stratum = 0;
    bool off_pattern = false;
    std::size_t sharp_L = 0;
};

struct ScanReport {
    std::vector<ScanSample> samples;
    std::map<int, std::size_t> rank_histogram;
    std::map<std::size_t, std::size_t> stratum_histogram;
    std::size_t off_pattern_count = 0;
    bool mixed_ranks = false;  ///< encode space crosses strata
    std::uint64_t seed = 0;
};

struct ScanOptions {
    bool include_center = false;  ///< evaluate the box midpoint first
};

/**
 * @brief Seeded uniform sampling of a box in parameter space, recording
 * rank(X) and the stratum at each sample.
 *
 * Domain errors are rethrown with the offending coordinates.
 */
inline ScanReport stratum_scan(const Model &model, std::span<const std::pair<double, double>> region,
                               std::size_t n_samples, std::uint64_t seed, const ScanOptions &opt = {}) {
    if (n_samples < 1) throw InputError("scan needs at least one sample");
    if (region.size() != model.m()) {
        throw InputError("region has " + std::to_string(region.size()) + " intervals, model has " +
                         std::to_string(model.m()) + " parameters");
    }
    for (const auto &[lo, hi] : region) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw InputError("region bounds must be finite with lo <= hi");
    }
    const Tolerances &tol = model.tolerances();
    const GeneratorSet &gens = model.generators();
    const JProfile prof = j_profile(gens.f(), 0x5eedULL, 64, tol.j_vanish);
    ScanReport rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto visit = [&](std::vector<double> x) {
        ScanSample s;
        try {
            s.beta = eval_beta(model, x);
        } catch (const DomainError &e) {
            std::string where;
            for (double v : x) where += (where.empty() ? "" : ",") + format_double(v);
            throw DomainError(std::string(e.what()) + " at x = (" + where + ")");
        }
        const XMatrix xm = x_matrix(gens.f(), s.beta, tol.rank_rel);
        const auto js = j_values(xm, prof);
        const StratumClass cls = classify_stratum(js, tol.j_vanish);
        s.x = std::move(x);
        s.rank = xm.rank;
        s.stratum = cls.index;
        s.off_pattern = cls.off_pattern;
        s.sharp_L = sharp_L(gens.g(), static_cast<std::size_t>(xm.rank));
        rep.rank_histogram[s.rank] += 1;
        rep.stratum_histogram[s.stratum] += 1;
        if (s.off_pattern) ++rep.off_pattern_count;
        rep.samples.push_back(std::move(s));
    };

    if (opt.include_center) {
        std::vector<double> x;
        for (const auto &[lo, hi] : region) x.push_back(0.5 * (lo + hi));
        visit(std::move(x));
    }
    for (std::size_t n = 0; n < n_samples; ++n) {
        std::vector<double> x;
        x.reserve(region.size());
        for (const auto &[lo, hi] : region) {
            const double u = unit(rng);
            x.push_back(lo == hi ? lo : lo + (hi - lo) * u);
        }
        visit(std::move(x));
    }
    rep.mixed_ranks = rep.rank_histogram.size() > 1;
    return rep;
}

}  // namespace qcompat
