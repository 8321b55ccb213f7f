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

#ifndef OVERGROUND_BENCH_HPP
#define OVERGROUND_BENCH_HPP

#include "overground/engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace overground {

enum class Generator { reach_stream, grid_agent };

struct BenchSpec {
    Generator generator = Generator::reach_stream;
    std::size_t nodes = 500;
    std::size_t shots = 50;
    std::size_t edges_per_shot = 10;
    std::size_t grid_side = 8;
    std::size_t steps = 20;
    std::uint64_t seed = 1;
};

/// Throws InputError for sizes the generator cannot honour.
void validate(const BenchSpec& spec);

struct BenchInstance {
    std::string program;
    /// One complete fact file per shot.
    std::vector<std::string> shots;
    /// Smallest |F_i ∩ F_(i+1)| / max(|F_i|, |F_(i+1)|) over consecutive shots.
    double min_overlap = 1.0;
};

/// reach-stream: transitive closure over a growing random edge set. The
/// first shot has 5 * edges_per_shot edges; every later shot drops
/// edges_per_shot / 5 of them and adds edges_per_shot new ones.
///
/// grid-agent: an agent walking an N x N grid with shifting obstacles,
/// asking whether a goal cell is still reachable.
///
/// Same spec, same bytes.
BenchInstance generate(const BenchSpec& spec);

/// Writes program.lp and shot_NNN.facts into `directory`, creating it.
void write_instance(const BenchInstance& instance, const std::filesystem::path& directory);

/// Versioned JSON report (`"schema": 1`) of a comparison run.
nlohmann::json bench_report(const BenchSpec& spec, const BenchInstance& instance, const ComparisonReport& report);

std::string_view to_string(Generator generator);

} // namespace overground

#endif
