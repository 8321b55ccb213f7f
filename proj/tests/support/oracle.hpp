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

#ifndef OVERGROUND_TESTS_ORACLE_HPP
#define OVERGROUND_TESTS_ORACLE_HPP

#include "overground/model.hpp"

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace overground::testing {

/// An answer set as printed atoms.
using Model = std::set<std::string>;

struct OracleResult {
    std::set<Model> answer_sets;
    /// False when the possibly-true atoms exceeded the limit; answer_sets is
    /// then empty.
    bool feasible = true;
    std::size_t universe = 0;
};

/// Reference semantics by exhaustive search. Every rule is instantiated
/// over all values occurring in the program and the facts, restricted to
/// the least model of the program with negation ignored; then every
/// superset of the facts within that set is tested for stability.
OracleResult oracle_answer_sets(const NonGroundProgram& program, const FactSet& facts, std::size_t limit = 20);

struct RandomInstance {
    std::string program;
    std::vector<std::string> shots;
};

/// Small random programs over inputs e, f and derived p, q, r, s with the
/// constants 1..4 and the variables X, Y; three shots of input facts.
RandomInstance random_instance(std::mt19937_64& rng);

} // namespace overground::testing

#endif
