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

#ifndef OVERGROUND_DEPENDENCY_GRAPH_HPP
#define OVERGROUND_DEPENDENCY_GRAPH_HPP

#include "overground/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace overground {

/// Predicate dependency graph. Nodes are indices into
/// NonGroundProgram::predicates(); an edge head -> body predicate is added
/// per body occurrence and flagged when that occurrence is negated.
struct PredicateDependencyGraph {
    struct Edge {
        std::size_t from = 0;
        std::size_t to = 0;
        bool negative = false;
    };

    std::vector<std::string> predicates;
    std::vector<Edge> edges;
    /// Strongly connected components; a component only depends on itself
    /// and on components that come before it.
    std::vector<std::vector<std::size_t>> components;
    std::vector<std::size_t> component_of;
    /// A component is recursive when it has an internal edge.
    std::vector<bool> recursive;

    std::size_t component_of_predicate(std::string_view name) const;
};

PredicateDependencyGraph build_dependency_graph(const NonGroundProgram& program);

} // namespace overground

#endif
