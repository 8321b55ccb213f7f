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

#ifndef OVERGROUND_SOLVER_HPP
#define OVERGROUND_SOLVER_HPP

#include "overground/model.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

namespace overground {

struct SolveStats {
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t stability_rejections = 0;
    std::chrono::nanoseconds elapsed{0};
};

struct SolveResult {
    std::vector<AnswerSet> answer_sets;
    /// False when the search stopped at max_models with branches left.
    bool exhausted = true;
    SolveStats stats;
};

/// Enumerates the stable models of `program`.
///
/// Classical models of the Clark completion are generated by a DPLL search
/// that branches on the lowest unassigned atom id, true first; candidates
/// failing the reduct test are rejected and blocked. Atoms settled by the
/// well-founded bounds are fixed before search, which prunes only branches
/// without stable models and so leaves the enumeration order unchanged.
/// `max_models` of nullopt means all models.
SolveResult solve(const GroundProgram& program, std::optional<std::size_t> max_models = std::nullopt);

/// The program with rules blocked by `candidate` removed and negative
/// literals stripped from the rest.
GroundProgram reduct(const GroundProgram& program, const AnswerSet& candidate);

/// Least model of a program without negative literals; constraints are
/// ignored. Throws ContractViolation if a negative literal is present.
AnswerSet least_model(const GroundProgram& positive_program);

/// Candidate equals the least model of its reduct, contains every fact and
/// violates no integrity constraint.
bool is_stable_model(const GroundProgram& program, const AnswerSet& candidate);

inline constexpr std::size_t default_oracle_limit = 20;

/// Exhaustive test oracle: checks every superset of the facts within the
/// atom universe. Throws OracleInfeasible above `limit` atoms.
std::set<AnswerSet> brute_force_answer_sets(const GroundProgram& program,
                                            std::size_t limit = default_oracle_limit);

} // namespace overground

#endif
