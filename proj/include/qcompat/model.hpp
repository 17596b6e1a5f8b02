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
 * @file model.hpp
 * Encode maps x -> beta(x) built from parsed expressions, with exact
 * forward-mode Jacobians.
 */
#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qcompat/algebra.hpp"
#include "qcompat/expr.hpp"

namespace qcompat {

/**
 * How user-facing beta values relate to the internal coefficients.
 *
 * Internally rho = (1/N)(I + 2 sum_a beta_a S_a) with tr(S_a S_b) = delta_ab.
 * `PaperPauli` accepts the Bloch vector n of rho = (I + n.sigma)/2;
 * `PaperXState` accepts beta of rho = (I + sum_a beta_a P_a)/4 with P_a the
 * X-state Pauli strings, which coincides with the internal convention.
 */
enum class Convention { Orthonormal, PaperPauli, PaperXState };

inline double convention_scale(Convention c) {
    switch (c) {
    case Convention::Orthonormal: return 1.0;
    case Convention::PaperPauli: return 1.0 / std::sqrt(2.0);
    case Convention::PaperXState: return 1.0;
    }
    return 1.0;
}

inline Convention parse_convention(const std::string &s) {
    if (s == "orthonormal") return Convention::Orthonormal;
    if (s == "paper-pauli") return Convention::PaperPauli;
    if (s == "paper-xstate") return Convention::PaperXState;
    throw InputError("unknown convention '" + s + "'");
}

inline std::string convention_name(Convention c) {
    switch (c) {
    case Convention::Orthonormal: return "orthonormal";
    case Convention::PaperPauli: return "paper-pauli";
    case Convention::PaperXState: return "paper-xstate";
    }
    return "?";
}

/// A parameterized state family: generators, parameter names and one
/// expression per generator. Immutable; evaluation is pure.
class Model {
  public:
    Model(GeneratorSetPtr generators, std::vector<std::string> params,
          std::vector<std::string> beta_text, Convention convention = Convention::Orthonormal,
          Tolerances tolerances = {})
        : generators_(std::move(generators)), params_(std::move(params)),
          beta_text_(std::move(beta_text)), convention_(convention), tol_(tolerances) {
        if (!generators_) throw InputError("model has no generator set");
        if (params_.empty()) throw InputError("model needs at least one parameter");
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (params_[i].empty()) throw InputError("empty parameter name");
            for (std::size_t j = 0; j < i; ++j) {
                if (params_[i] == params_[j]) throw InputError("duplicate parameter '" + params_[i] + "'");
            }
        }
        if (beta_text_.size() != generators_->g()) {
            throw InputError("beta has " + std::to_string(beta_text_.size()) +
                             " components but the algebra has g = " + std::to_string(generators_->g()));
        }
        if (convention_ == Convention::PaperPauli && generators_->dim_hilbert() != 2) {
            throw InputError("convention paper-pauli needs a qubit algebra");
        }
        if (convention_ == Convention::PaperXState && generators_->dim_hilbert() != 4) {
            throw InputError("convention paper-xstate needs a two-qubit algebra");
        }
        beta_.reserve(beta_text_.size());
        for (std::size_t a = 0; a < beta_text_.size(); ++a) {
            try {
                beta_.push_back(parse_expression(beta_text_[a], params_));
            } catch (const ParseError &e) {
                throw ParseError("beta[" + std::to_string(a + 1) + "]: " + e.message(), e.offset());
            }
        }
    }

    [[nodiscard]] const GeneratorSet &generators() const noexcept { return *generators_; }
    [[nodiscard]] const GeneratorSetPtr &generators_ptr() const noexcept { return generators_; }
    [[nodiscard]] const std::vector<std::string> &params() const noexcept { return params_; }
    [[nodiscard]] std::size_t m() const noexcept { return params_.size(); }
    [[nodiscard]] std::size_t g() const noexcept { return beta_.size(); }
    [[nodiscard]] const std::vector<Expr> &beta() const noexcept { return beta_; }
    [[nodiscard]] const std::vector<std::string> &beta_text() const noexcept { return beta_text_; }
    [[nodiscard]] Convention convention() const noexcept { return convention_; }
    [[nodiscard]] double scale() const noexcept { return convention_scale(convention_); }
    [[nodiscard]] const Tolerances &tolerances() const noexcept { return tol_; }

    /// Same model with different tolerances.
    [[nodiscard]] Model with_tolerances(const Tolerances &t) const {
        Model copy = *this;
        copy.tol_ = t;
        return copy;
    }

  private:
    GeneratorSetPtr generators_;
    std::vector<std::string> params_;
    std::vector<std::string> beta_text_;
    std::vector<Expr> beta_;
    Convention convention_;
    Tolerances tol_;
};

namespace detail {

inline void check_point(const Model &model, std::span<const double> x) {
    if (x.size() != model.m()) {
        throw InputError("point has " + std::to_string(x.size()) + " coordinates, model has " +
                         std::to_string(model.m()) + " parameters");
    }
}

inline std::string component_error(std::size_t a, const std::exception &e) {
    return "beta[" + std::to_string(a + 1) + "]: " + e.what();
}

}  // namespace detail

/// Internal beta(x) (convention scale applied).
inline RVector eval_beta(const Model &model, std::span<const double> x) {
    detail::check_point(model, x);
    RVector out(static_cast<Eigen::Index>(model.g()));
    for (std::size_t a = 0; a < model.g(); ++a) {
        try {
            out[static_cast<Eigen::Index>(a)] = model.scale() * model.beta()[a].eval(x);
        } catch (const DomainError &e) {
            throw DomainError(detail::component_error(a, e));
        }
    }
    return out;
}

struct BetaWithJacobian {
    RVector beta;      ///< length g
    RMatrix jacobian;  ///< g x m, d beta_a / d x_i
};

/// beta(x) and its exact Jacobian from one dual-number sweep.
inline BetaWithJacobian eval_beta_and_jacobian(const Model &model, std::span<const double> x) {
    detail::check_point(model, x);
    const auto m = static_cast<Eigen::Index>(model.m());
    std::vector<Dual> args;
    args.reserve(x.size());
    for (Eigen::Index i = 0; i < m; ++i) args.push_back(Dual::variable(x[static_cast<std::size_t>(i)], m, i));
    BetaWithJacobian out{RVector(static_cast<Eigen::Index>(model.g())),
                         RMatrix(static_cast<Eigen::Index>(model.g()), m)};
    for (std::size_t a = 0; a < model.g(); ++a) {
        const auto row = static_cast<Eigen::Index>(a);
        try {
            const Dual d = model.beta()[a].eval(std::span<const Dual>(args));
            out.beta[row] = model.scale() * d.value;
            out.jacobian.row(row) = model.scale() * d.partials.transpose();
        } catch (const DomainError &e) {
            throw DomainError(detail::component_error(a, e));
        }
    }
    return out;
}

inline RMatrix eval_beta_jacobian(const Model &model, std::span<const double> x) {
    return eval_beta_and_jacobian(model, x).jacobian;
}

}  // namespace qcompat
