/*
 *  Copyright (C) 2026  The overground authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 *
 */

#ifndef OVERGROUND_ERROR_HPP
#define OVERGROUND_ERROR_HPP

#include <stdexcept>
#include <string>

namespace overground {

/// Whether a failure is the caller's fault (bad input) or ours (a broken
/// invariant). The command line maps these onto exit codes 1 and 2.
enum class ErrorKind { input, internal };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Arithmetic failure while evaluating a comparison during instantiation.
class GroundingError : public Error {
public:
    explicit GroundingError(const std::string& message) : Error(ErrorKind::input, message) {}
};

/// A precondition of an operation was violated by the caller.
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& message) : Error(ErrorKind::internal, message) {}
};

/// Raised for malformed input that is not program text (fact arity clashes,
/// state files, infeasible configuration).
class InputError : public Error {
public:
    explicit InputError(const std::string& message) : Error(ErrorKind::input, message) {}
};

/// The brute-force oracle refused an instance over its atom limit.
class OracleInfeasible : public Error {
public:
    explicit OracleInfeasible(const std::string& message) : Error(ErrorKind::input, message) {}
};

/// Two evaluation routes that must agree did not.
class InvariantFailure : public Error {
public:
    explicit InvariantFailure(const std::string& message) : Error(ErrorKind::internal, message) {}
};

} // namespace overground

#endif
