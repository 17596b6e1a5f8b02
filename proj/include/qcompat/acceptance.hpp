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
 * @file acceptance.hpp
 * The acceptance suite run by `qcompat verify` and the acceptance test.
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcompat/commands.hpp"
#include "qcompat/sampling.hpp"

namespace qcompat {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;        ///< deterministic for a fixed seed
    double seconds = 0.0;
    double limit_seconds = 0.0;  ///< 0 when no limit applies
};

struct AcceptanceOptions {
    std::uint64_t seed = 20260611;
    /// Replaceable for mutation testing.
    SharpLFunction count = sharp_L;
    /// Directory for the determinism check; a temporary one when empty.
    std::filesystem::path scratch;
};

namespace acceptance {

using sampling::Rng;

inline std::string show(double v) { return detail::fixed(v, 3); }

inline ModelFile bundled(const std::string &name) { return load_model_source("bundled:" + name); }

// 1
inline std::pair<bool, std::string> qubit_bound(const AcceptanceOptions &opt) {
    const ModelFile mf = bundled("qubit");
    const BoundReport r = sharp_x_bound(mf.model->generators(), *mf.effective_strata(), mf.model->tolerances(), opt.count);
    const bool shape = r.rows.size() == 2 && r.rows[0].rank == 0 && r.rows[0].sharp_calL == 0 && r.rows[1].rank == 2 &&
                       r.rows[1].sharp_calL == 3;
    const bool ok = shape && r.rows[1].sharp_L == 2 && r.rows[0].bound == 0 && r.rows[1].bound == 2 && r.overall == 2;
    std::ostringstream s;
    s << "strata";
    for (const auto &row : r.rows) s << " (rank " << row.rank << ", #L " << row.sharp_L << ", dim " << row.sharp_calL << ")";
    s << ", overall " << r.overall << " (expected 2)";
    return {ok, s.str()};
}

// 2
inline std::pair<bool, std::string> xstate_bound(const AcceptanceOptions &opt) {
    const ModelFile mf = bundled("xstate");
    const BoundReport r = sharp_x_bound(mf.model->generators(), *mf.effective_strata(), mf.model->tolerances(), opt.count);
    const std::vector<int> ranks{0, 2, 4};
    const std::vector<std::size_t> dims{1, 4, 7}, sharp{7, 6, 5}, mins{1, 4, 5};
    bool ok = r.rows.size() == 3 && r.overall == 5;
    std::ostringstream s;
    for (std::size_t k = 0; ok && k < 3; ++k) {
        ok = r.rows[k].rank == ranks[k] && r.rows[k].sharp_calL == dims[k] && r.rows[k].sharp_L == sharp[k] &&
             r.rows[k].bound == mins[k];
    }
    s << "mins";
    for (const auto &row : r.rows) s << " " << row.bound;
    s << ", overall " << r.overall << " (expected 1 4 5, 5)";
    return {ok, s.str()};
}

// 3
inline std::pair<bool, std::string> char_poly_forms(const AcceptanceOptions &opt) {
    Rng rng(opt.seed + 3);
    const GeneratorSet pauli = make_preset("pauli", 2);
    const GeneratorSet xs = make_preset("xstate2q", 4);
    const double pauli_scale = convention_scale(Convention::PaperPauli);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const RVector n = sampling::gaussian_vector(rng, 3);
        const CharPoly p = char_poly_coeffs(x_matrix(pauli.f(), pauli_scale * n).entries);
        const double nn = n.squaredNorm();
        const double len = std::sqrt(nn);
        // lambda^3 + |n|^2 lambda
        worst = std::max({worst, std::abs(p.power(3) - 1.0), std::abs(p.power(2)) / len, std::abs(p.power(1) - nn) / nn,
                          std::abs(p.power(0)) / (nn * len)});

        const RVector b = sampling::gaussian_vector(rng, 7);
        const CharPoly q = char_poly_coeffs(x_matrix(xs.f(), b).entries);
        const double bl = b.norm();
        const double j5 = 2.0 * (b.squaredNorm() - b[2] * b[2]);
        const double j3 = (std::pow(b[0] + b[1], 2) + std::pow(b[4] + b[5], 2) + std::pow(b[3] - b[6], 2)) *
                          (std::pow(b[0] - b[1], 2) + std::pow(b[4] - b[5], 2) + std::pow(b[3] + b[6], 2));
        // lambda^3 (lambda^4 + J5 lambda^2 + J3)
        RVector expect = RVector::Zero(8);
        expect[7] = 1.0;
        expect[5] = j5;
        expect[3] = j3;
        for (int k = 0; k <= 7; ++k) {
            const double scale = std::pow(bl, 7 - k);
            worst = std::max(worst, std::abs(q.power(static_cast<std::size_t>(k)) - expect[k]) / scale);
        }
    }
    return {worst <= 1e-9, "500 qubit + 500 X-state samples, worst relative deviation " + show(worst)};
}

/// Largest |a_i . X . a_j| over a set.
inline double max_pairwise(const std::vector<RVector> &set, const RMatrix &x) {
    double w = 0.0;
    for (const auto &a : set)
        for (const auto &b : set) w = std::max(w, std::abs(a.dot(x * b)));
    return w;
}

inline double gram_min_sv(const std::vector<RVector> &set) {
    if (set.empty()) return 0.0;
    RMatrix a(set.front().size(), static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = set[i];
    const RMatrix gram = a.transpose() * a;
    Eigen::JacobiSVD<RMatrix> svd(gram);
    return svd.singularValues().minCoeff();
}

/**
 * @brief Greedy candidate of `size` vectors, each drawn orthogonal to the
 * images X a_j of those already picked, so every pair satisfies a.X.b = 0.
 */
inline std::vector<RVector> greedy_isotropic(Rng &rng, const RMatrix &x, std::size_t size) {
    const Eigen::Index g = x.rows();
    std::vector<RVector> set;
    while (set.size() < size) {
        RVector v = sampling::gaussian_vector(rng, g);
        if (!set.empty()) {
            RMatrix img(g, static_cast<Eigen::Index>(set.size()));
            for (std::size_t j = 0; j < set.size(); ++j) img.col(static_cast<Eigen::Index>(j)) = x * set[j];
            Eigen::JacobiSVD<RMatrix> svd(img, Eigen::ComputeFullU);
            const RVector &s = svd.singularValues();
            const double cut = 1e-12 * std::max(1.0, s.size() ? s[0] : 0.0);
            for (Eigen::Index k = 0; k < s.size(); ++k) {
                if (s[k] > cut) {
                    const RVector u = svd.matrixU().col(k);
                    v -= u.dot(v) * u;
                }
            }
        }
        v.normalize();
        set.push_back(std::move(v));
    }
    return set;
}

// 4
inline std::pair<bool, std::string> witness(const AcceptanceOptions &opt) {
    Rng rng(opt.seed + 4);
    double worst_pair = 0.0, worst_gram = 1e300, probe_closest = 0.0;
    int size_fail = 0, probe_pass = 0;
    for (int t = 0; t < 200; ++t) {
        const int g = sampling::uniform_int(rng, 1, 8);
        const int rank = 2 * sampling::uniform_int(rng, 0, g / 2);
        const RMatrix x = sampling::antisymmetric(rng, g, rank);
        const int found = rank_antisymmetric(x).rank;
        const auto set = max_compatible_set(x);
        const std::size_t expect = opt.count(static_cast<std::size_t>(g), static_cast<std::size_t>(found));
        if (set.size() != expect || found != rank) ++size_fail;
        worst_pair = std::max(worst_pair, max_pairwise(set, x));
        worst_gram = std::min(worst_gram, gram_min_sv(set));

        const auto probe = greedy_isotropic(rng, x, sharp_L(static_cast<std::size_t>(g), static_cast<std::size_t>(rank)) + 1);
        const double sv = gram_min_sv(probe);
        probe_closest = std::max(probe_closest, sv);
        if (sv > 1e-8 && max_pairwise(probe, x) <= 1e-9) ++probe_pass;
    }
    const bool ok = size_fail == 0 && worst_pair <= 1e-9 && worst_gram > 1e-8 && probe_pass == 0;
    std::ostringstream s;
    s << "200 forms: size mismatches " << size_fail << ", max |a.X.b| " << show(worst_pair) << ", min Gram sv "
      << show(worst_gram) << "; probes passing " << probe_pass << "/200 (largest probe Gram sv " << show(probe_closest) << ")";
    return {ok, s.str()};
}

/// Presets used for random state instances with N <= 4.
inline std::vector<GeneratorSet> small_algebras() {
    return {make_preset("pauli", 2), make_preset("gellmann", 3), make_preset("gellmann", 4), make_preset("xstate2q", 4)};
}

// 5
inline std::pair<bool, std::string> sld_dual_solvers(const AcceptanceOptions &opt) {
    Rng rng(opt.seed + 5);
    std::vector<GeneratorSetPtr> algs;
    for (auto &g : small_algebras()) algs.push_back(std::make_shared<const GeneratorSet>(std::move(g)));
    double worst_res = 0.0, worst_diff = 0.0;
    int errors = 0;
    for (int t = 0; t < 500; ++t) {
        // the su(N) presets cover every full-rank state for N <= 4
        const GeneratorSetPtr &g = algs[static_cast<std::size_t>(sampling::uniform_int(rng, 0, 2))];
        const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.02));
        const HermitianMatrix d = drho_from_dbeta(*g, sampling::gaussian_vector(rng, static_cast<Eigen::Index>(g->g())));
        try {
            const SldResult a = sld_eigen(rho, d);
            const SldResult b = sld_integral(rho, d, IntegralMode::Quadrature);
            worst_res = std::max(worst_res, a.residual);
            worst_diff = std::max(worst_diff, frob(a.L.matrix() - b.L.matrix()));
        } catch (const DomainError &) {
            ++errors;
        }
    }
    const bool ok = errors == 0 && worst_res <= 1e-10 && worst_diff <= 1e-6;
    return {ok, "500 states: max residual " + show(worst_res) + ", max |L_eig - L_quad| " + show(worst_diff) +
                    ", failures " + std::to_string(errors)};
}

// 6
inline std::pair<bool, std::string> sld_membership(const AcceptanceOptions &opt) {
    Rng rng(opt.seed + 6);
    double worst = 0.0;
    int count = 0;
    for (auto &gs : small_algebras()) {
        const auto g = std::make_shared<const GeneratorSet>(std::move(gs));
        for (int t = 0; t < 200; ++t) {
            const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.01));
            const HermitianMatrix d = drho_from_dbeta(*g, sampling::gaussian_vector(rng, static_cast<Eigen::Index>(g->g())));
            worst = std::max(worst, sld_eigen(rho, d).span_residual);
            ++count;
        }
    }
    return {worst <= 1e-8, std::to_string(count) + " points over 4 presets, max projection residual " + show(worst)};
}

// 7
inline std::pair<bool, std::string> invertibility_equivalence(const AcceptanceOptions &opt) {
    Rng rng(opt.seed + 7);
    std::vector<GeneratorSetPtr> algs;
    for (auto &g : small_algebras()) algs.push_back(std::make_shared<const GeneratorSet>(std::move(g)));
    int disagreements = 0, singular = 0, regular = 0;
    for (int t = 0; t < 500; ++t) {
        const GeneratorSetPtr &g = algs[static_cast<std::size_t>(sampling::uniform_int(rng, 0, 3))];
        const auto gdim = static_cast<int>(g->g());
        const int m = sampling::uniform_int(rng, 1, std::min(4, gdim));
        RMatrix jac = sampling::gaussian_matrix(rng, gdim, m);
        const int kind = t % 4;
        if (kind == 1 && m >= 2) {
            // a parameter that moves the state like a combination of the others
            jac.col(m - 1) = jac.leftCols(m - 1) * sampling::gaussian_vector(rng, m - 1);
        } else if (kind == 2) {
            // a parameter the state does not depend on
            jac.col(sampling::uniform_int(rng, 0, m - 1)).setZero();
        }
        const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.02));
        std::vector<SldResult> slds;
        for (const auto &d : state_derivatives(*g, jac)) slds.push_back(sld_eigen(rho, d));
        const EquivalenceReport r = check_invertibility_equivalence(rho, slds, 1e-9);
        if (!r.both_sides_agree) ++disagreements;
        (r.qfim_invertible ? regular : singular) += 1;
    }
    // Degeneracy written into the expressions themselves.
    const auto pauli = std::make_shared<const GeneratorSet>(make_preset("pauli", 2));
    const Model degenerate(pauli, {"u", "v"}, {"0.3*(u+v)", "0.2*sin(u+v)", "0.1"});
    for (int t = 0; t < 20; ++t) {
        const std::vector<double> x{sampling::uniform(rng, -1, 1), sampling::uniform(rng, -1, 1)};
        const FisherBundle fb = fisher_bundle(degenerate, x);
        const EquivalenceReport r =
            check_invertibility_equivalence(assemble_rho(pauli, fb.beta), fb.slds, 1e-9);
        if (!r.both_sides_agree) ++disagreements;
        (r.qfim_invertible ? regular : singular) += 1;
    }
    return {disagreements == 0 && singular > 0 && regular > 0,
            "520 instances (" + std::to_string(regular) + " regular, " + std::to_string(singular) +
                " degenerate), disagreements " + std::to_string(disagreements)};
}

// 8
inline std::pair<bool, std::string> cramer_rao_chain(const AcceptanceOptions &opt) {
    Rng rng(opt.seed + 8);
    std::vector<GeneratorSetPtr> algs;
    for (auto &g : small_algebras()) algs.push_back(std::make_shared<const GeneratorSet>(std::move(g)));
    double worst = 1e300;
    for (int t = 0; t < 200; ++t) {
        const GeneratorSetPtr &g = algs[static_cast<std::size_t>(sampling::uniform_int(rng, 0, 3))];
        const int m = sampling::uniform_int(rng, 1, std::min(3, static_cast<int>(g->g())));
        const RMatrix jac = sampling::gaussian_matrix(rng, static_cast<Eigen::Index>(g->g()), m);
        const DensityMatrix rho = assemble_rho(g, sampling::full_rank_beta(rng, *g, 0.02));
        const auto drhos = state_derivatives(*g, jac);
        std::vector<SldResult> slds;
        for (const auto &d : drhos) slds.push_back(sld_eigen(rho, d));
        const RMatrix fq = qfim(rho, slds);
        const RMatrix fc = classical_fisher(rho, drhos, projective_povm(sampling::unitary(rng, g->dim_hilbert())));
        Eigen::SelfAdjointEigenSolver<RMatrix> es(fq - fc, Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues().minCoeff());
    }
    const ModelFile mf = bundled("qubit_z");
    const std::vector<double> x{0.5};
    const FisherBundle fb = fisher_bundle(*mf.model, x);
    const RMatrix fc = cfim(*mf.model, *mf.povm, x);
    const double expect = 4.0 / 3.0;
    const double dev = std::max(std::abs(fb.qfim(0, 0) - expect), std::abs(fc(0, 0) - expect));
    return {worst >= -1e-8 && dev <= 1e-10,
            "200 pairs: min eig(F_Q - F_C) " + show(worst) + "; sigma_z fixture at r = 0.5 off 4/3 by " + show(dev)};
}

// 9
inline std::pair<bool, std::string> corollary(const AcceptanceOptions &) {
    const bool pauli = full_state_check(make_preset("pauli", 2)).saturable_full_state;
    const bool xs = full_state_check(make_preset("xstate2q", 4)).saturable_full_state;
    const bool diag = full_state_check(*bundled("diagonal").model->generators_ptr()).saturable_full_state;
    return {!pauli && !xs && diag, std::string("pauli ") + (pauli ? "true" : "false") + ", xstate2q " +
                                       (xs ? "true" : "false") + ", diagonal subalgebra " + (diag ? "true" : "false")};
}

// 10
inline std::pair<bool, std::string> determinism(const AcceptanceOptions &opt) {
    namespace fs = std::filesystem;
    fs::path dir = opt.scratch;
    bool own = false;
    if (dir.empty()) {
        dir = fs::temp_directory_path() / ("qcompat-verify-" + std::to_string(opt.seed) + "-" +
                                           std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
        own = true;
    }
    fs::create_directories(dir);
    std::ostringstream sink;
    std::string csv[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
        ScanCommandOptions so;
        so.model = "bundled:xstate";
        so.n = 2000;
        so.seed = opt.seed;
        so.csv_out = (dir / ("scan" + std::to_string(k) + ".csv")).string();
        codes[k] = cmd_scan(so, sink, sink);
        csv[k] = codes[k] == 0 ? read_text(*so.csv_out) : std::string();
    }
    if (own) fs::remove_all(dir);
    const bool ok = codes[0] == 0 && codes[1] == 0 && !csv[0].empty() && csv[0] == csv[1];
    return {ok, "two 2000-sample scans, " + std::to_string(csv[0].size()) + " bytes, " +
                    (csv[0] == csv[1] ? "identical" : "different")};
}

struct Criterion {
    int id;
    const char *name;
    double limit;
    std::function<std::pair<bool, std::string>(const AcceptanceOptions &)> run;
};

inline const std::vector<Criterion> &criteria() {
    static const std::vector<Criterion> list = {
        {1, "single-qubit bound", 1.0, qubit_bound},
        {2, "X-state bound", 5.0, xstate_bound},
        {3, "characteristic-polynomial forms", 10.0, char_poly_forms},
        {4, "compatible-set witness", 30.0, witness},
        {5, "SLD dual-solver agreement", 30.0, sld_dual_solvers},
        {6, "SLD membership in closed algebras", 0.0, sld_membership},
        {7, "QFIM invertibility equivalence", 0.0, invertibility_equivalence},
        {8, "Cramer-Rao chain", 0.0, cramer_rao_chain},
        {9, "full-state corollary", 0.0, corollary},
        {10, "scan determinism", 0.0, determinism},
    };
    return list;
}

}  // namespace acceptance

/// Runs every criterion; a criterion that throws or exceeds its time limit
/// fails.
inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions &opt = {}) {
    std::vector<CriterionResult> out;
    for (const auto &c : acceptance::criteria()) {
        CriterionResult r;
        r.id = c.id;
        r.name = c.name;
        r.limit_seconds = c.limit;
        const auto start = std::chrono::steady_clock::now();
        try {
            auto [ok, detail] = c.run(opt);
            r.passed = ok;
            r.detail = std::move(detail);
        } catch (const std::exception &e) {
            r.passed = false;
            r.detail = std::string("threw: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (r.limit_seconds > 0.0 && r.seconds > r.limit_seconds) {
            r.passed = false;
            r.detail += "; over the " + detail::fixed(r.limit_seconds) + " s limit";
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// "PASS  3  characteristic-polynomial forms: ..." per criterion.
inline std::string format_criterion(const CriterionResult &r) {
    return std::string(r.passed ? "PASS" : "FAIL") + "  " + (r.id < 10 ? " " : "") + std::to_string(r.id) + "  " +
           r.name + ": " + r.detail;
}

struct VerifyOptions {
    std::uint64_t seed = AcceptanceOptions{}.seed;
    std::optional<std::string> json_out;
};

/// Summary lines go to `out` (seed-deterministic); timings go to `err`.
inline int cmd_verify(const VerifyOptions &opt, std::ostream &out, std::ostream &err,
                      const SharpLFunction &count = sharp_L) {
    return detail::guarded(err, [&] {
        AcceptanceOptions ao;
        ao.seed = opt.seed;
        ao.count = count;
        const auto results = run_acceptance(ao);
        std::size_t passed = 0;
        Json rep = report_header("verify", "");
        rep["seed"] = opt.seed;
        Json list = Json::array();
        for (const auto &r : results) {
            if (!opt.json_out || *opt.json_out != "-") out << format_criterion(r) << "\n";
            err << "  criterion " << r.id << ": " << detail::fixed(r.seconds, 3) << " s\n";
            passed += r.passed ? 1 : 0;
            list.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        }
        rep["criteria"] = std::move(list);
        rep["passed"] = passed;
        rep["total"] = results.size();
        if (!opt.json_out || *opt.json_out != "-") out << passed << "/" << results.size() << " criteria passed\n";
        detail::emit(opt.json_out, dump_report(rep), out);
        return passed == results.size() ? kExitOk : kExitFailure;
    });
}

}  // namespace qcompat
