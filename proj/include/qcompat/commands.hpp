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
 * @file commands.hpp
 * Batch commands behind the qcompat executable. Each returns a process
 * exit code: 0 ok, 2 domain error, 3 invalid input, 4 missing stratum data.
 */
#pragma once

#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qcompat/bundled.hpp"
#include "qcompat/io.hpp"

namespace qcompat {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitDomain = 2,
    kExitInput = 3,
    kExitMissingStrata = 4,
};

/// "bundled:NAME" selects a shipped model; anything else is a file path.
inline ModelFile load_model_source(const std::string &source, const std::optional<double> &tol = std::nullopt) {
    constexpr std::string_view prefix = "bundled:";
    if (source.rfind(prefix, 0) == 0) {
        const std::string name = source.substr(prefix.size());
        const auto text = bundled_model(name);
        if (!text) throw InputError("no bundled model named '" + name + "'");
        return load_model_text(std::string(*text), tol);
    }
    return load_model_file(source, tol);
}

namespace detail {

/// Runs `body`, mapping library errors onto exit codes and messages.
template <class F>
int guarded(std::ostream &err, F &&body) {
    try {
        return body();
    } catch (const ParseError &e) {
        err << "error: parse: " << e.what() << "\n";
        return kExitInput;
    } catch (const InputError &e) {
        err << "error: invalid input: " << e.what() << "\n";
        return kExitInput;
    } catch (const MissingStratumData &e) {
        err << "error: " << e.what() << "\n";
        return kExitMissingStrata;
    } catch (const DomainError &e) {
        err << "error: domain: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

/// Sends a report to `path`, or to `out` when path is "-".
inline void emit(const std::optional<std::string> &path, const std::string &text, std::ostream &out) {
    if (!path) return;
    if (*path == "-") out << text;
    else write_atomic(*path, text);
}

inline std::vector<double> parse_number_row(const std::string &line, const std::string &where) {
    std::vector<double> row;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        if (b == std::string::npos) throw InputError(where + ": empty value");
        const std::string t = cell.substr(b, e - b + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != t.size()) throw InputError(where + ": '" + t + "' is not a number");
        row.push_back(v);
    }
    return row;
}

/// Points as a JSON array of arrays, or one comma-separated row per line
/// ('#' starts a comment line).
inline std::vector<std::vector<double>> parse_points_text(const std::string &text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    std::vector<std::vector<double>> pts;
    if (first != std::string::npos && text[first] == '[') {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const Json::parse_error &e) {
            throw InputError(std::string("points file is not valid JSON: ") + e.what());
        }
        if (!j.is_array()) throw InputError("points file must hold an array of points");
        for (std::size_t k = 0; k < j.size(); ++k) pts.push_back(number_list(j[k], "points[" + std::to_string(k) + "]"));
        return pts;
    }
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t\r")] == '#') continue;
        pts.push_back(parse_number_row(line, "points line " + std::to_string(lineno)));
    }
    return pts;
}

/// "lo:hi,lo:hi,..."
inline std::vector<std::pair<double, double>> parse_region(const std::string &text) {
    std::vector<std::pair<double, double>> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw InputError("region item '" + item + "' is not lo:hi");
        std::string both = item.substr(0, colon) + "," + item.substr(colon + 1);
        const auto v = parse_number_row(both, "region");
        if (v.size() != 2 || !std::isfinite(v[0]) || !std::isfinite(v[1]) || v[0] > v[1]) {
            throw InputError("region item '" + item + "' must be finite with lo <= hi");
        }
        out.emplace_back(v[0], v[1]);
    }
    if (out.empty()) throw InputError("empty region");
    return out;
}

inline std::string fixed(double v, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

}  // namespace detail

// --- analyze -----------------------------------------------------------------

struct AnalyzeOptions {
    std::string model;
    std::optional<std::string> points_file;
    std::optional<std::string> at;  ///< "x1,x2,..."
    std::optional<std::string> json_out;
    std::optional<double> tol;
};

struct PointAnalysis {
    Json json;
    bool domain_error = false;
};

/// Everything known at one point; domain failures are recorded, not thrown.
inline PointAnalysis analyze_point(const ModelFile &mf, const JProfile &prof, const std::vector<double> &x) {
    const Model &model = *mf.model;
    const Tolerances &t = model.tolerances();
    const GeneratorSet &gens = model.generators();
    PointAnalysis pa;
    Json &o = pa.json;
    o["x"] = to_json(x);
    BetaWithJacobian bj;
    try {
        bj = eval_beta_and_jacobian(model, x);
    } catch (const DomainError &e) {
        o["status"] = "domain_error";
        o["error"] = e.what();
        pa.domain_error = true;
        return pa;
    }
    o["beta"] = to_json(bj.beta);
    o["jacobian"] = to_json(bj.jacobian);
    const XMatrix xm = x_matrix(gens.f(), bj.beta, t.rank_rel);
    const auto js = j_values(xm, prof);
    const StratumClass cls = classify_stratum(js, t.j_vanish);
    Json jv = Json::array();
    for (const auto &v : js) jv.push_back({{"k", v.k}, {"value", v.value}, {"scale", v.scale}});
    o["x_matrix"] = x_summary(xm, cls.index, cls.off_pattern);
    o["x_matrix"]["j_values"] = std::move(jv);

    const DensityMatrix rho = assemble_rho(model.generators_ptr(), bj.beta);
    const StateValidity val = validate_state(rho, t.psd);
    o["state"] = {{"physical", val.physical},
                  {"min_eigenvalue", val.min_eigenvalue},
                  {"trace_deviation", val.trace_deviation},
                  {"eigenvalues", to_json(rho.eigenvalues())}};
    if (!val.physical) {
        o["status"] = "unphysical";
        return pa;
    }
    try {
        const auto drhos = state_derivatives(gens, bj.jacobian);
        std::vector<SldResult> slds;
        for (const auto &d : drhos) slds.push_back(sld_eigen(rho, d, t.null, t.tol));
        const RMatrix f = qfim(rho, slds);
        const RMatrix d = commutation_matrix(rho, slds);
        Json sl = Json::array();
        RMatrix alphas(static_cast<Eigen::Index>(gens.g()), static_cast<Eigen::Index>(slds.size()));
        for (std::size_t i = 0; i < slds.size(); ++i) {
            const auto &s = slds[i];
            alphas.col(static_cast<Eigen::Index>(i)) = s.alpha;
            sl.push_back({{"alpha0", s.alpha0},
                          {"alpha", to_json(s.alpha)},
                          {"residual", s.residual},
                          {"span_residual", s.span_residual},
                          {"matrix", to_json(s.L.matrix())}});
        }
        const RMatrix d_via_x = (kStateScale / static_cast<double>(gens.dim_hilbert())) *
                                (alphas.transpose() * xm.entries * alphas);
        o["slds"] = std::move(sl);
        o["qfim"] = to_json(f);
        o["commutation"] = to_json(d);
        o["commutation_via_x_residual"] = d.size() ? (d - d_via_x).cwiseAbs().maxCoeff() : 0.0;
        o["compatible"] = is_compatible(d, t.compat);
        const EquivalenceReport eq = check_invertibility_equivalence(rho, slds, t.equivalence);
        o["invertibility"] = {{"qfim_min_eigenvalue", eq.qfim_min_eigenvalue},
                              {"symmetrized_rank", eq.calL_rank},
                              {"sld_rank", eq.sld_rank},
                              {"m", eq.m},
                              {"qfim_invertible", eq.qfim_invertible},
                              {"agree", eq.both_sides_agree}};
        if (mf.povm) {
            const RMatrix fc = classical_fisher(rho, drhos, *mf.povm, {t.prob_floor, t.dprob_floor});
            o["cfim"] = to_json(fc);
        }
        o["status"] = "ok";
    } catch (const DomainError &e) {
        o["status"] = "domain_error";
        o["error"] = e.what();
        pa.domain_error = true;
    }
    return pa;
}

inline int cmd_analyze(const AnalyzeOptions &opt, std::ostream &out, std::ostream &err) {
    return detail::guarded(err, [&] {
        const ModelFile mf = load_model_source(opt.model, opt.tol);
        const Model &model = *mf.model;
        std::vector<std::vector<double>> points;
        if (opt.at) points.push_back(detail::parse_number_row(*opt.at, "--at"));
        if (opt.points_file) {
            auto more = detail::parse_points_text(read_text(*opt.points_file));
            points.insert(points.end(), more.begin(), more.end());
        }
        if (!opt.at && !opt.points_file) points = mf.points;
        if (points.empty()) throw InputError("no evaluation points (use --at, --points or the model's 'points')");
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (points[k].size() != model.m()) {
                throw InputError("point " + std::to_string(k + 1) + " has " + std::to_string(points[k].size()) +
                                 " coordinates, model has " + std::to_string(model.m()));
            }
        }
        const JProfile prof = j_profile(model.generators().f(), 0x5eedULL, 64, model.tolerances().j_vanish);
        Json rep = report_header("analyze", mf.digest);
        rep["model"] = {{"algebra", model.generators().name()},
                        {"N", model.generators().dim_hilbert()},
                        {"g", model.g()},
                        {"m", model.m()},
                        {"convention", convention_name(model.convention())},
                        {"params", model.params()}};
        Json pts = Json::array();
        bool any_domain = false;
        for (std::size_t k = 0; k < points.size(); ++k) {
            PointAnalysis pa = analyze_point(mf, prof, points[k]);
            any_domain = any_domain || pa.domain_error;
            const Json &p = pa.json;
            if (!opt.json_out || *opt.json_out != "-") {
                out << "point " << k + 1 << ": " << p["status"].get<std::string>();
                if (p.contains("x_matrix")) {
                    out << "  rank(X) = " << p["x_matrix"]["rank"].get<int>()
                        << "  #L = " << p["x_matrix"]["sharp_L"].get<std::size_t>()
                        << "  stratum B" << p["x_matrix"]["stratum"].get<std::size_t>();
                }
                if (p.contains("compatible")) out << "  compatible = " << (p["compatible"].get<bool>() ? "yes" : "no");
                if (p.contains("error")) out << "  (" << p["error"].get<std::string>() << ")";
                out << "\n";
            }
            pts.push_back(std::move(pa.json));
        }
        rep["points"] = std::move(pts);
        detail::emit(opt.json_out, dump_report(rep), out);
        return any_domain ? kExitDomain : kExitOk;
    });
}

// --- scan --------------------------------------------------------------------

struct ScanCommandOptions {
    std::string model;
    std::size_t n = 1000;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> region;
    std::optional<std::string> json_out;
    std::optional<std::string> csv_out;
    std::optional<double> tol;
    bool include_center = false;
};

/// --seed, then QCOMPAT_SEED, then the model's seed, then 0.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t> &flag, const ModelFile &mf) {
    if (flag) return *flag;
    if (const char *env = std::getenv("QCOMPAT_SEED"); env && *env) {
        std::string s(env);
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != s.size()) throw InputError("QCOMPAT_SEED must be a non-negative integer");
        return v;
    }
    return mf.seed.value_or(0);
}

inline int cmd_scan(const ScanCommandOptions &opt, std::ostream &out, std::ostream &err) {
    return detail::guarded(err, [&] {
        const ModelFile mf = load_model_source(opt.model, opt.tol);
        const Model &model = *mf.model;
        if (opt.n < 1) throw InputError("--n must be at least 1");
        const auto region = opt.region ? detail::parse_region(*opt.region) : mf.region;
        if (region.empty()) throw InputError("no region (use --region or the model's 'region')");
        const std::uint64_t seed = resolve_seed(opt.seed, mf);
        const ScanReport scan = stratum_scan(model, region, opt.n, seed, {opt.include_center});

        Json rep = report_header("scan", mf.digest);
        rep["seed"] = seed;
        rep["n"] = scan.samples.size();
        Json rg = Json::array();
        for (const auto &[lo, hi] : region) rg.push_back({lo, hi});
        rep["region"] = std::move(rg);
        Json rh = Json::object(), sh = Json::object();
        for (const auto &[r, c] : scan.rank_histogram) rh[std::to_string(r)] = c;
        for (const auto &[s, c] : scan.stratum_histogram) sh["B" + std::to_string(s)] = c;
        rep["rank_histogram"] = std::move(rh);
        rep["stratum_histogram"] = std::move(sh);
        rep["off_pattern"] = scan.off_pattern_count;
        rep["mixed_ranks"] = scan.mixed_ranks;

        if (!opt.json_out || *opt.json_out != "-") {
            out << "samples: " << scan.samples.size() << "  seed: " << seed << "\n";
            for (const auto &[r, c] : scan.rank_histogram) {
                out << "  rank " << r << ": " << c << " ("
                    << detail::fixed(100.0 * static_cast<double>(c) / static_cast<double>(scan.samples.size()), 4)
                    << "%)\n";
            }
            for (const auto &[s, c] : scan.stratum_histogram) out << "  B" << s << ": " << c << "\n";
            if (scan.off_pattern_count) out << "  off-pattern samples: " << scan.off_pattern_count << "\n";
            if (scan.mixed_ranks) out << "warning: rank(X) is not constant on the encode space\n";
        }
        detail::emit(opt.json_out, dump_report(rep), out);
        if (opt.csv_out) detail::emit(opt.csv_out, scan_csv(model, scan), out);
        return kExitOk;
    });
}

// --- bound -------------------------------------------------------------------

struct BoundCommandOptions {
    std::string model;
    std::optional<std::string> json_out;
    std::optional<double> tol;
};

inline int cmd_bound(const BoundCommandOptions &opt, std::ostream &out, std::ostream &err,
                     const SharpLFunction &count = sharp_L) {
    return detail::guarded(err, [&] {
        const ModelFile mf = load_model_source(opt.model, opt.tol);
        const Model &model = *mf.model;
        const auto strata = mf.effective_strata();
        if (!strata) {
            throw MissingStratumData("algebra '" + model.generators().name() +
                                     "' has no built-in strata; declare them under 'strata' with dimensions");
        }
        const BoundReport br = sharp_x_bound(model.generators(), *strata, model.tolerances(), count);
        const FullStateReport fs = full_state_check(model.generators(), model.tolerances().tol);
        Json rep = report_header("bound", mf.digest);
        rep["bound"] = to_json(br);
        rep["full_state"] = {{"saturable", fs.saturable_full_state}, {"explanation", fs.explanation}};
        if (!opt.json_out || *opt.json_out != "-") {
            out << "stratum  rank  #L  dim  min\n";
            for (const auto &r : br.rows) {
                out << "  B" << std::left << std::setw(5) << r.index << std::right << std::setw(5) << r.rank
                    << std::setw(4) << r.sharp_L << std::setw(5) << r.sharp_calL << std::setw(5) << r.bound << "\n";
            }
            out << "#x <= " << br.overall << "\n";
            out << "full-state estimation at the quantum bound: " << (fs.saturable_full_state ? "possible" : "impossible")
                << " (" << fs.explanation << ")\n";
        }
        detail::emit(opt.json_out, dump_report(rep), out);
        return kExitOk;
    });
}

// --- presets -----------------------------------------------------------------

inline int cmd_presets(std::ostream &out, std::ostream &err, const std::optional<std::string> &json_out = {}) {
    return detail::guarded(err, [&] {
        Json rep = report_header("presets", "");
        Json list = Json::array();
        for (const auto &name : preset_names()) {
            const GeneratorSet g = make_preset(name, preset_default_dim(name));
            Json e;
            e["name"] = name;
            e["N"] = g.dim_hilbert();
            e["g"] = g.g();
            e["commutative"] = is_commutative(g);
            if (const auto st = preset_strata(name)) {
                Json dims = Json::array();
                for (const auto &s : *st) dims.push_back(*s.dimension);
                e["stratum_dimensions"] = std::move(dims);
            } else {
                e["stratum_dimensions"] = nullptr;
            }
            list.push_back(std::move(e));
        }
        rep["presets"] = list;
        Json bm = Json::array();
        for (const auto &[n, text] : bundled_models()) bm.push_back("bundled:" + std::string(n));
        rep["bundled_models"] = std::move(bm);
        if (!json_out || *json_out != "-") {
            for (const auto &e : list) {
                out << std::left << std::setw(10) << e["name"].get<std::string>() << std::right << " N = " << e["N"]
                    << "  g = " << e["g"];
                if (!e["stratum_dimensions"].is_null()) out << "  strata dims " << e["stratum_dimensions"].dump();
                out << "\n";
            }
            for (const auto &[n, text] : bundled_models()) out << "bundled:" << n << "\n";
        }
        detail::emit(json_out, dump_report(rep), out);
        return kExitOk;
    });
}

}  // namespace qcompat
