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

#include "overground/bench.hpp"

#include "overground/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <utility>

namespace overground {

namespace {

constexpr const char* reach_program =
    "reach(X,Y) :- edge(X,Y).\n"
    "reach(X,Z) :- reach(X,Y), edge(Y,Z).\n"
    "has_out(X) :- edge(X,Y).\n"
    "sink(X) :- edge(Y,X), not has_out(X).\n";

constexpr const char* grid_program =
    "adj(X,Y,X1,Y) :- free(X,Y), free(X1,Y), X1 = X+1.\n"
    "adj(X,Y,X1,Y) :- free(X,Y), free(X1,Y), X1 = X-1.\n"
    "adj(X,Y,X,Y1) :- free(X,Y), free(X,Y1), Y1 = Y+1.\n"
    "adj(X,Y,X,Y1) :- free(X,Y), free(X,Y1), Y1 = Y-1.\n"
    "reach(X,Y) :- at(X,Y).\n"
    "reach(X1,Y1) :- reach(X,Y), adj(X,Y,X1,Y1).\n"
    "goal_reachable :- goal(X,Y), reach(X,Y).\n"
    "blocked :- not goal_reachable.\n";

using Edge = std::pair<std::size_t, std::size_t>;
using Cell = std::pair<std::size_t, std::size_t>;

std::size_t pick(std::mt19937_64& rng, std::size_t bound) {
    return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
}

double overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t common = 0;
    for (const auto& fact : a)
        common += b.count(fact);
    const std::size_t larger = std::max(a.size(), b.size());
    return larger == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(larger);
}

std::string render(const std::set<std::string>& facts) {
    std::string out;
    for (const auto& fact : facts)
        out += fact + ".\n";
    return out;
}

std::string pair_fact(const char* predicate, std::size_t a, std::size_t b) {
    return std::string(predicate) + "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

std::vector<std::set<std::string>> reach_stream(const BenchSpec& spec, std::mt19937_64& rng) {
    const std::size_t k = spec.edges_per_shot;
    std::vector<Edge> edges;
    std::set<Edge> present;
    auto add_random = [&](std::size_t count) {
        while (count > 0) {
            Edge e{pick(rng, spec.nodes) + 1, pick(rng, spec.nodes) + 1};
            if (e.first == e.second || present.count(e))
                continue;
            present.insert(e);
            edges.push_back(e);
            --count;
        }
    };

    std::vector<std::set<std::string>> shots;
    auto snapshot = [&] {
        std::set<std::string> facts;
        for (const auto& [from, to] : edges)
            facts.insert(pair_fact("edge", from, to));
        shots.push_back(std::move(facts));
    };

    add_random(5 * k);
    snapshot();
    for (std::size_t shot = 1; shot < spec.shots; ++shot) {
        for (std::size_t d = 0; d < k / 5 && !edges.empty(); ++d) {
            std::size_t index = pick(rng, edges.size());
            present.erase(edges[index]);
            edges[index] = edges.back();
            edges.pop_back();
        }
        add_random(k);
        snapshot();
    }
    return shots;
}

std::vector<std::set<std::string>> grid_agent(const BenchSpec& spec, std::mt19937_64& rng) {
    const std::size_t n = spec.grid_side;
    const Cell goal{n, n};
    Cell agent{1, 1};
    std::set<Cell> obstacles;
    std::bernoulli_distribution blocked(0.15);
    for (std::size_t x = 1; x <= n; ++x)
        for (std::size_t y = 1; y <= n; ++y)
            if (Cell{x, y} != goal && Cell{x, y} != agent && blocked(rng))
                obstacles.insert({x, y});

    std::vector<std::set<std::string>> shots;
    auto snapshot = [&] {
        std::set<std::string> facts;
        for (std::size_t x = 1; x <= n; ++x)
            for (std::size_t y = 1; y <= n; ++y)
                if (!obstacles.count({x, y}))
                    facts.insert(pair_fact("free", x, y));
        facts.insert(pair_fact("at", agent.first, agent.second));
        facts.insert(pair_fact("goal", goal.first, goal.second));
        shots.push_back(std::move(facts));
    };

    snapshot();
    for (std::size_t step = 1; step < spec.steps; ++step) {
        for (std::size_t t = 0; t < 2; ++t) {
            Cell cell{pick(rng, n) + 1, pick(rng, n) + 1};
            if (cell == goal || cell == agent)
                continue;
            if (!obstacles.erase(cell))
                obstacles.insert(cell);
        }
        std::vector<Cell> moves;
        const Cell candidates[] = {{agent.first + 1, agent.second},
                                   {agent.first - 1, agent.second},
                                   {agent.first, agent.second + 1},
                                   {agent.first, agent.second - 1}};
        for (const auto& c : candidates)
            if (c.first >= 1 && c.first <= n && c.second >= 1 && c.second <= n && !obstacles.count(c))
                moves.push_back(c);
        if (!moves.empty())
            agent = moves[pick(rng, moves.size())];
        snapshot();
    }
    return shots;
}

} // namespace

std::string_view to_string(Generator generator) {
    return generator == Generator::reach_stream ? "reach-stream" : "grid-agent";
}

void validate(const BenchSpec& spec) {
    if (spec.generator == Generator::reach_stream) {
        if (spec.nodes < 2 || spec.shots < 1 || spec.edges_per_shot < 1)
            throw InputError("reach-stream needs nodes >= 2, shots >= 1 and edges-per-shot >= 1");
        const std::size_t capacity = spec.nodes * (spec.nodes - 1);
        if ((5 + spec.shots) * spec.edges_per_shot > capacity / 2)
            throw InputError("reach-stream: too many edges for " + std::to_string(spec.nodes) + " nodes");
    } else {
        if (spec.grid_side < 2 || spec.steps < 1)
            throw InputError("grid-agent needs grid-side >= 2 and steps >= 1");
    }
}

BenchInstance generate(const BenchSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    auto shots = spec.generator == Generator::reach_stream ? reach_stream(spec, rng) : grid_agent(spec, rng);

    BenchInstance instance;
    instance.program = spec.generator == Generator::reach_stream ? reach_program : grid_program;
    for (std::size_t i = 0; i < shots.size(); ++i) {
        instance.shots.push_back(render(shots[i]));
        if (i > 0)
            instance.min_overlap = std::min(instance.min_overlap, overlap(shots[i - 1], shots[i]));
    }
    return instance;
}

void write_instance(const BenchInstance& instance, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out)
            throw InputError("cannot write " + path.string());
    };
    write(directory / "program.lp", instance.program);
    for (std::size_t i = 0; i < instance.shots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "shot_%03zu.facts", i + 1);
        write(directory / name, instance.shots[i]);
    }
}

nlohmann::json bench_report(const BenchSpec& spec, const BenchInstance& instance, const ComparisonReport& report) {
    auto ms = [](std::chrono::nanoseconds d) { return static_cast<double>(d.count()) / 1e6; };
    nlohmann::json params;
    if (spec.generator == Generator::reach_stream) {
        params = {{"nodes", spec.nodes}, {"shots", spec.shots}, {"edges_per_shot", spec.edges_per_shot}};
    } else {
        params = {{"grid_side", spec.grid_side}, {"steps", spec.steps}};
    }

    nlohmann::json shots = nlohmann::json::array();
    nlohmann::json growth = nlohmann::json::array();
    for (const auto& shot : report.shots) {
        shots.push_back({{"shot", shot.shot_index},
                         {"incremental_grounding_ms", ms(shot.incremental_grounding)},
                         {"scratch_grounding_ms", ms(shot.scratch_grounding)},
                         {"incremental_total_ms", ms(shot.incremental_total)},
                         {"scratch_total_ms", ms(shot.scratch_total)},
                         {"new_rules", shot.new_rules},
                         {"cache_size_rules", shot.cache_size_rules},
                         {"scratch_rules", shot.scratch_rules},
                         {"answer_sets", shot.answer_sets}});
        growth.push_back(shot.cache_size_rules);
    }

    return {{"schema", 1},
            {"generator", std::string(to_string(spec.generator))},
            {"params", params},
            {"seed", spec.seed},
            {"min_overlap", instance.min_overlap},
            {"shots", shots},
            {"cumulative",
             {{"incremental_grounding_ms", ms(report.cumulative_incremental_grounding)},
              {"scratch_grounding_ms", ms(report.cumulative_scratch_grounding)},
              {"incremental_total_ms", ms(report.cumulative_incremental_total)},
              {"scratch_total_ms", ms(report.cumulative_scratch_total)}}},
            {"speedup", report.grounding_speedup()},
            {"cache_growth", growth},
            {"answer_sets_equal", report.answer_sets_equal}};
}

} // namespace overground
