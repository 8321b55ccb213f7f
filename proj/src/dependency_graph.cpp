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

#include "overground/dependency_graph.hpp"

#include "overground/error.hpp"

#include <algorithm>
#include <limits>

namespace overground {

namespace {

constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();

// Iterative Tarjan. Components are emitted once everything reachable from
// them has been emitted, i.e. dependencies first.
class Tarjan {
public:
    explicit Tarjan(const std::vector<std::vector<std::size_t>>& successors)
        : successors_(successors), index_(successors.size(), unvisited),
          low_(successors.size(), 0), on_stack_(successors.size(), false) {}

    std::vector<std::vector<std::size_t>> run() {
        for (std::size_t v = 0; v < successors_.size(); ++v)
            if (index_[v] == unvisited)
                visit(v);
        return std::move(components_);
    }

private:
    void visit(std::size_t root) {
        std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
        open(root);
        while (!frames.empty()) {
            auto& [v, next] = frames.back();
            if (next < successors_[v].size()) {
                std::size_t w = successors_[v][next++];
                if (index_[w] == unvisited) {
                    open(w);
                    frames.emplace_back(w, 0);
                } else if (on_stack_[w]) {
                    low_[v] = std::min(low_[v], index_[w]);
                }
                continue;
            }
            std::size_t done = v;
            frames.pop_back();
            if (!frames.empty())
                low_[frames.back().first] = std::min(low_[frames.back().first], low_[done]);
            if (low_[done] == index_[done])
                close(done);
        }
    }

    void open(std::size_t v) {
        index_[v] = low_[v] = counter_++;
        stack_.push_back(v);
        on_stack_[v] = true;
    }

    void close(std::size_t v) {
        std::vector<std::size_t> component;
        std::size_t w = 0;
        do {
            w = stack_.back();
            stack_.pop_back();
            on_stack_[w] = false;
            component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components_.push_back(std::move(component));
    }

    const std::vector<std::vector<std::size_t>>& successors_;
    std::vector<std::size_t> index_;
    std::vector<std::size_t> low_;
    std::vector<bool> on_stack_;
    std::vector<std::size_t> stack_;
    std::size_t counter_ = 0;
    std::vector<std::vector<std::size_t>> components_;
};

} // namespace

std::size_t PredicateDependencyGraph::component_of_predicate(std::string_view name) const {
    for (std::size_t i = 0; i < predicates.size(); ++i)
        if (predicates[i] == name)
            return component_of[i];
    throw ContractViolation("unknown predicate " + std::string(name));
}

PredicateDependencyGraph build_dependency_graph(const NonGroundProgram& program) {
    PredicateDependencyGraph graph;
    std::map<std::string, std::size_t, std::less<>> index;
    for (const auto& info : program.predicates()) {
        index.emplace(info.name, graph.predicates.size());
        graph.predicates.push_back(info.name);
    }

    std::vector<std::vector<std::size_t>> successors(graph.predicates.size());
    for (const auto& rule : program.rules()) {
        if (!rule.head)
            continue;
        std::size_t from = index.at(rule.head->predicate);
        for (const auto& literal : rule.body) {
            const auto* atom = std::get_if<AtomLiteral>(&literal);
            if (!atom)
                continue;
            std::size_t to = index.at(atom->atom.predicate);
            graph.edges.push_back({from, to, atom->negated});
            successors[from].push_back(to);
        }
    }

    graph.components = Tarjan(successors).run();
    graph.component_of.assign(graph.predicates.size(), 0);
    for (std::size_t c = 0; c < graph.components.size(); ++c)
        for (auto v : graph.components[c])
            graph.component_of[v] = c;

    graph.recursive.assign(graph.components.size(), false);
    for (const auto& edge : graph.edges)
        if (graph.component_of[edge.from] == graph.component_of[edge.to])
            graph.recursive[graph.component_of[edge.from]] = true;
    return graph;
}

} // namespace overground
