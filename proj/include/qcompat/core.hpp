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
 * @file core.hpp
 * Shared numeric types, error hierarchy and tolerance defaults.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace qcompat {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (schema, parse, dimension mismatch).
class InputError : public Error {
  public:
    using Error::Error;
};

/// Syntax or name-resolution failure in an expression.
class ParseError : public InputError {
  public:
    ParseError(const std::string &what, std::size_t offset)
        : InputError(what + " at offset " + std::to_string(offset)), message_(what),
          offset_(offset) {}
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    /// The message without the offset suffix.
    [[nodiscard]] const std::string &message() const noexcept { return message_; }

  private:
    std::string message_;
    std::size_t offset_;
};

/// Generators whose Lie product leaves their span.
class ClosureError : public InputError {
  public:
    using InputError::InputError;
};

/// Gram-Schmidt pivot fell below tolerance.
class LinearDependenceError : public InputError {
  public:
    using InputError::InputError;
};

/// A well-formed input hit a point where the mathematics is undefined.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Quadrature did not settle within tolerance.
class ConvergenceError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Stratum dimensions or representatives are unavailable for a bound.
class MissingStratumData : public Error {
  public:
    using Error::Error;
};

/// Numerical thresholds used across modules. Defaults are absolute unless
/// the field name says otherwise.
struct Tolerances {
    double tol = 1e-10;          ///< traces, residuals, Hermiticity
    double rank_rel = 1e-9;      ///< singular value cut, relative to the largest
    double compat = 1e-9;        ///< max |D_ij| for compatibility
    double null = 1e-10;         ///< eigenvalue-sum cut in the SLD solver
    double psd = 1e-10;          ///< min eigenvalue allowed for physical states
    double prob_floor = 1e-14;   ///< outcome probability treated as zero
    double dprob_floor = 1e-12;  ///< derivative magnitude allowed at p = 0
    double j_vanish = 1e-9;      ///< relative cut for characteristic coefficients
    double equivalence = 1e-9;   ///< shared cut for the QFIM/span-rank comparison
};

/// Frobenius norm of a complex matrix difference.
inline double frob(const CMatrix &a) { return a.norm(); }

/// Hilbert-Schmidt inner product tr(A B) for Hermitian A, B.
inline Complex hs(const CMatrix &a, const CMatrix &b) {
    // tr(AB) = sum_jk A_jk B_kj
    return (a.array() * b.transpose().array()).sum();
}

}  // namespace qcompat
