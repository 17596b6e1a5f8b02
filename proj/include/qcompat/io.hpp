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
 * @file io.hpp
 * Model files, JSON reports and CSV tables.
 *
 * Model file keys: algebra, convention, params, beta, povm, strata, points,
 * region, tolerances, seed. Unknown keys at any level are rejected.
 * Complex entries are written as [re, im].
 */
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcompat/bound.hpp"
#include "qcompat/estimation.hpp"

namespace qcompat {

using Json = nlohmann::ordered_json;

/// A parsed and validated model file.
struct ModelFile {
    std::shared_ptr<const Model> model;
    std::string algebra_key;  ///< preset name when the algebra is a whole preset, else empty
    std::optional<Povm> povm;
    std::optional<std::vector<StratumSpec>> strata;  ///< declared in the file
    std::vector<std::vector<double>> points;
    std::vector<std::pair<double, double>> region;
    std::optional<std::uint64_t> seed;
    std::string digest;  ///< FNV-1a of the source text

    /// Declared strata, else the preset table, else none.
    [[nodiscard]] std::optional<std::vector<StratumSpec>> effective_strata() const {
        if (strata) return strata;
        if (!algebra_key.empty()) return preset_strata(algebra_key);
        return std::nullopt;
    }
};

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline void require_keys(const Json &obj, std::initializer_list<const char *> allowed, const std::string &where) {
    if (!obj.is_object()) throw InputError(where + " must be an object");
    for (const auto &item : obj.items()) {
        bool ok = false;
        for (const char *k : allowed) ok = ok || item.key() == k;
        if (!ok) throw InputError("unknown key '" + item.key() + "' in " + where);
    }
}

inline double number(const Json &j, const std::string &where) {
    if (!j.is_number()) throw InputError(where + " must be a number");
    return j.get<double>();
}

inline std::vector<double> number_list(const Json &j, const std::string &where) {
    if (!j.is_array()) throw InputError(where + " must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline Complex complex_entry(const Json &j, const std::string &where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw InputError(where + " must be a number or [re, im]");
}

inline CMatrix complex_matrix(const Json &j, const std::string &where) {
    if (!j.is_array() || j.empty()) throw InputError(where + " must be a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    CMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Json &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw InputError(where + " must be square");
        }
        for (Eigen::Index c = 0; c < n; ++c) {
            m(r, c) = complex_entry(row[static_cast<std::size_t>(c)],
                                    where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    return m;
}

inline std::string string_value(const Json &j, const std::string &where) {
    if (!j.is_string()) throw InputError(where + " must be a string");
    return j.get<std::string>();
}

inline Tolerances parse_tolerances(const Json &j, Tolerances t) {
    require_keys(j, {"tol", "rank_rel", "compat", "null", "psd", "prob_floor", "dprob_floor", "j_vanish", "equivalence"},
                 "tolerances");
    auto set = [&](const char *key, double &field) {
        if (!j.contains(key)) return;
        const double v = number(j.at(key), std::string("tolerances.") + key);
        if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string("tolerances.") + key + " must be positive");
        field = v;
    };
    set("tol", t.tol);
    set("rank_rel", t.rank_rel);
    set("compat", t.compat);
    set("null", t.null);
    set("psd", t.psd);
    set("prob_floor", t.prob_floor);
    set("dprob_floor", t.dprob_floor);
    set("j_vanish", t.j_vanish);
    set("equivalence", t.equivalence);
    return t;
}

struct AlgebraChoice {
    GeneratorSetPtr gens;
    std::string key;
};

inline AlgebraChoice parse_algebra(const Json &j, double tol) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        return {std::make_shared<const GeneratorSet>(make_preset(name, preset_default_dim(name))), name};
    }
    require_keys(j, {"preset", "N", "subset", "generators", "name"}, "algebra");
    if (j.contains("preset") == j.contains("generators")) {
        throw InputError("algebra needs exactly one of 'preset' and 'generators'");
    }
    if (j.contains("preset")) {
        const std::string name = string_value(j.at("preset"), "algebra.preset");
        Eigen::Index n = preset_default_dim(name);
        if (j.contains("N")) {
            if (!j.at("N").is_number_integer()) throw InputError("algebra.N must be an integer");
            n = j.at("N").get<Eigen::Index>();
        }
        GeneratorSet full = make_preset(name, n);
        std::string key = (name == "gellmann" && n == 2) ? std::string() : name;
        if (j.contains("subset")) {
            const Json &s = j.at("subset");
            if (!s.is_array() || s.empty()) throw InputError("algebra.subset must be a non-empty array");
            std::vector<std::size_t> idx;
            for (const Json &v : s) {
                if (!v.is_number_integer() || v.get<long long>() < 1) {
                    throw InputError("algebra.subset entries are 1-based generator indices");
                }
                idx.push_back(static_cast<std::size_t>(v.get<long long>() - 1));
            }
            std::string label = j.contains("name") ? string_value(j.at("name"), "algebra.name") : name + "-subset";
            return {std::make_shared<const GeneratorSet>(subalgebra(full, idx, label)), std::string()};
        }
        return {std::make_shared<const GeneratorSet>(std::move(full)), key};
    }
    if (j.contains("N") || j.contains("subset")) throw InputError("'N' and 'subset' apply to presets only");
    const Json &g = j.at("generators");
    if (!g.is_array() || g.empty()) throw InputError("algebra.generators must be a non-empty array");
    std::vector<HermitianMatrix> raw;
    for (std::size_t a = 0; a < g.size(); ++a) {
        const std::string where = "algebra.generators[" + std::to_string(a) + "]";
        raw.emplace_back(complex_matrix(g[a], where), tol);
    }
    const std::string label = j.contains("name") ? string_value(j.at("name"), "algebra.name") : "custom";
    return {std::make_shared<const GeneratorSet>(GeneratorSet::from_raw(raw, label, tol)), std::string()};
}

}  // namespace detail

/// Validates and builds a model from parsed JSON. Throws InputError
/// (ParseError for expressions) on any schema or consistency violation.
inline ModelFile load_model(const Json &j, const std::optional<double> &tol_override = std::nullopt) {
    using namespace detail;
    require_keys(j, {"algebra", "convention", "params", "beta", "povm", "strata", "points", "region", "tolerances", "seed"},
                 "model");
    for (const char *k : {"algebra", "params", "beta"}) {
        if (!j.contains(k)) throw InputError(std::string("model is missing '") + k + "'");
    }
    Tolerances tol;
    if (j.contains("tolerances")) tol = parse_tolerances(j.at("tolerances"), tol);
    if (tol_override) {
        if (!(*tol_override > 0.0)) throw InputError("--tol must be positive");
        tol.tol = *tol_override;
    }

    ModelFile mf;
    auto alg = parse_algebra(j.at("algebra"), tol.tol);
    mf.algebra_key = alg.key;

    Convention conv = Convention::Orthonormal;
    if (j.contains("convention")) conv = parse_convention(string_value(j.at("convention"), "convention"));

    const Json &pj = j.at("params");
    if (!pj.is_array()) throw InputError("params must be an array of names");
    std::vector<std::string> params;
    for (std::size_t i = 0; i < pj.size(); ++i) params.push_back(string_value(pj[i], "params[" + std::to_string(i) + "]"));

    const Json &bj = j.at("beta");
    if (!bj.is_array()) throw InputError("beta must be an array of expressions");
    std::vector<std::string> beta;
    for (std::size_t a = 0; a < bj.size(); ++a) {
        if (bj[a].is_number()) beta.push_back(format_double(bj[a].get<double>()));
        else beta.push_back(string_value(bj[a], "beta[" + std::to_string(a) + "]"));
    }
    const GeneratorSetPtr gens = alg.gens;
    mf.model = std::make_shared<const Model>(gens, params, beta, conv, tol);
    const Model &model = *mf.model;

    if (j.contains("povm")) {
        const Json &pv = j.at("povm");
        if (!pv.is_array() || pv.empty()) throw InputError("povm must be a non-empty array of matrices");
        std::vector<HermitianMatrix> els;
        for (std::size_t k = 0; k < pv.size(); ++k) {
            const std::string where = "povm[" + std::to_string(k) + "]";
            els.emplace_back(complex_matrix(pv[k], where), tol.tol);
            if (els.back().dim() != gens->dim_hilbert()) throw InputError(where + " has the wrong dimension");
        }
        mf.povm.emplace(std::move(els), tol.tol);
    }

    if (j.contains("strata")) {
        const Json &sj = j.at("strata");
        if (!sj.is_array() || sj.empty()) throw InputError("strata must be a non-empty array");
        std::vector<StratumSpec> strata;
        std::set<std::size_t> seen;
        for (std::size_t s = 0; s < sj.size(); ++s) {
            const std::string where = "strata[" + std::to_string(s) + "]";
            require_keys(sj[s], {"index", "rank", "dimension", "samples"}, where);
            StratumSpec spec;
            if (!sj[s].contains("index") || !sj[s].at("index").is_number_unsigned()) {
                throw InputError(where + ".index must be a non-negative integer");
            }
            spec.index = sj[s].at("index").get<std::size_t>();
            if (!seen.insert(spec.index).second) throw InputError(where + " repeats stratum index");
            if (sj[s].contains("rank")) {
                if (!sj[s].at("rank").is_number_integer()) throw InputError(where + ".rank must be an integer");
                spec.expected_rank = sj[s].at("rank").get<int>();
            }
            if (sj[s].contains("dimension")) {
                if (!sj[s].at("dimension").is_number_integer()) throw InputError(where + ".dimension must be an integer");
                spec.dimension = sj[s].at("dimension").get<int>();
            }
            if (sj[s].contains("samples")) {
                const Json &smp = sj[s].at("samples");
                if (!smp.is_array()) throw InputError(where + ".samples must be an array of beta vectors");
                for (std::size_t k = 0; k < smp.size(); ++k) {
                    const auto v = number_list(smp[k], where + ".samples[" + std::to_string(k) + "]");
                    if (v.size() != gens->g()) throw InputError(where + ".samples entries need g values");
                    spec.samples.push_back(model.scale() * Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size())));
                }
            }
            strata.push_back(std::move(spec));
        }
        mf.strata = std::move(strata);
    }

    if (j.contains("points")) {
        const Json &pts = j.at("points");
        if (!pts.is_array()) throw InputError("points must be an array");
        for (std::size_t k = 0; k < pts.size(); ++k) {
            auto v = number_list(pts[k], "points[" + std::to_string(k) + "]");
            if (v.size() != model.m()) throw InputError("points[" + std::to_string(k) + "] needs m values");
            mf.points.push_back(std::move(v));
        }
    }
    if (j.contains("region")) {
        const Json &rg = j.at("region");
        if (!rg.is_array() || rg.size() != model.m()) throw InputError("region needs one [lo, hi] per parameter");
        for (std::size_t k = 0; k < rg.size(); ++k) {
            const auto v = number_list(rg[k], "region[" + std::to_string(k) + "]");
            if (v.size() != 2 || !std::isfinite(v[0]) || !std::isfinite(v[1]) || v[0] > v[1]) {
                throw InputError("region[" + std::to_string(k) + "] must be finite [lo, hi] with lo <= hi");
            }
            mf.region.emplace_back(v[0], v[1]);
        }
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw InputError("seed must be a non-negative integer");
        mf.seed = j.at("seed").get<std::uint64_t>();
    }
    return mf;
}

/// Parses model text. JSON syntax errors become InputError.
inline ModelFile load_model_text(const std::string &text, const std::optional<double> &tol_override = std::nullopt) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw InputError(std::string("model is not valid JSON: ") + e.what());
    }
    ModelFile mf = load_model(j, tol_override);
    mf.digest = fnv1a64(text);
    return mf;
}

inline std::string read_text(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ModelFile load_model_file(const std::filesystem::path &path,
                                 const std::optional<double> &tol_override = std::nullopt) {
    return load_model_text(read_text(path), tol_override);
}

/// Writes through a temporary sibling and renames it over the target.
inline void write_atomic(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw InputError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw InputError("cannot move output into '" + path.string() + "': " + ec.message());
    }
}

// --- JSON encoders -----------------------------------------------------------

inline Json to_json(const RVector &v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Json to_json(const std::vector<double> &v) {
    Json a = Json::array();
    for (double d : v) a.push_back(d);
    return a;
}

inline Json to_json(const RMatrix &m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(RVector(m.row(r).transpose())));
    return a;
}

inline Json to_json(const CMatrix &m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        a.push_back(std::move(row));
    }
    return a;
}

inline RVector rvector_from_json(const Json &j) {
    const auto v = detail::number_list(j, "vector");
    return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline RMatrix rmatrix_from_json(const Json &j) {
    if (!j.is_array()) throw InputError("matrix must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return RMatrix(0, 0);
    const RVector first = rvector_from_json(j[0]);
    RMatrix m(rows, first.size());
    for (Eigen::Index r = 0; r < rows; ++r) {
        const RVector row = rvector_from_json(j[static_cast<std::size_t>(r)]);
        if (row.size() != m.cols()) throw InputError("ragged matrix");
        m.row(r) = row.transpose();
    }
    return m;
}

inline CMatrix cmatrix_from_json(const Json &j) { return detail::complex_matrix(j, "matrix"); }

inline Json x_summary(const XMatrix &x, std::size_t stratum, bool off_pattern) {
    Json o;
    o["rank"] = x.rank;
    o["sharp_L"] = sharp_L(x.g(), static_cast<std::size_t>(x.rank));
    o["stratum"] = stratum;
    o["off_pattern"] = off_pattern;
    o["singular_values"] = to_json(x.singular_values);
    o["rank_threshold"] = x.tol_used;
    o["odd_rank_corrected"] = x.odd_corrected;
    o["entries"] = to_json(x.entries);
    return o;
}

inline Json to_json(const BoundReport &r) {
    Json o;
    o["g"] = r.g;
    Json rows = Json::array();
    for (const auto &row : r.rows) {
        Json e;
        e["stratum"] = row.index;
        e["rank"] = row.rank;
        e["sharp_L"] = row.sharp_L;
        e["dim"] = row.sharp_calL;
        e["bound"] = row.bound;
        rows.push_back(std::move(e));
    }
    o["strata"] = std::move(rows);
    o["overall"] = r.overall;
    o["commutative"] = r.commutative;
    return o;
}

/// Report envelope shared by every command.
inline Json report_header(const std::string &command, const std::string &digest) {
    Json o;
    o["tool"] = "qcompat";
#ifdef QCOMPAT_VERSION
    o["version"] = QCOMPAT_VERSION;
#else
    o["version"] = "unknown";
#endif
    o["command"] = command;
    o["input_digest"] = digest.empty() ? Json(nullptr) : Json("fnv1a64:" + digest);
    return o;
}

/// Serialized report text: two-space indent, trailing newline.
/// Doubles use the shortest representation that parses back to the same value.
inline std::string dump_report(const Json &j) { return j.dump(2) + "\n"; }

// --- CSV ---------------------------------------------------------------------

/// x..., beta..., rank, stratum, sharpL; beta in internal units.
inline std::string scan_csv(const Model &model, const ScanReport &scan) {
    std::string out;
    for (const auto &p : model.params()) out += "x_" + p + ",";
    for (std::size_t a = 0; a < model.g(); ++a) out += "beta_" + std::to_string(a + 1) + ",";
    out += "rank,stratum,sharpL\n";
    for (const auto &s : scan.samples) {
        for (double v : s.x) out += format_double(v) + ",";
        for (Eigen::Index a = 0; a < s.beta.size(); ++a) out += format_double(s.beta[a]) + ",";
        out += std::to_string(s.rank) + "," + std::to_string(s.stratum) + "," + std::to_string(s.sharp_L) + "\n";
    }
    return out;
}

}  // namespace qcompat
