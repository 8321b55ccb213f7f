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

#ifndef OVERGROUND_ENGINE_HPP
#define OVERGROUND_ENGINE_HPP

#include "overground/error.hpp"
#include "overground/grounder.hpp"
#include "overground/interner.hpp"
#include "overground/model.hpp"
#include "overground/solver.hpp"

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace overground {

enum class Mode { incremental, scratch };

struct EvictionConfig {
    EvictionPolicy policy = EvictionPolicy::oldest;
    EvictionBudget budget;
};

struct SessionConfig {
    Mode mode = Mode::incremental;
    /// nullopt enumerates all answer sets.
    std::optional<std::size_t> max_models;
    std::optional<EvictionConfig> eviction;
    /// Cross-check every shot against the brute-force oracle.
    bool oracle_check = false;
    std::size_t oracle_limit = default_oracle_limit;
};

struct StageTimings {
    std::chrono::nanoseconds eviction{0};
    std::chrono::nanoseconds grounding{0};
    std::chrono::nanoseconds projection{0};
    std::chrono::nanoseconds solving{0};
};

struct ShotResult {
    std::size_t shot_index = 0;
    std::vector<AnswerSet> answer_sets;
    bool exhausted = true;
    GroundingReport grounding;
    std::size_t evicted = 0;
    SolveStats solve_stats;
    StageTimings stages;
    std::chrono::nanoseconds wall_time_total{0};
};

/// A failure inside one shot; the message is prefixed with the shot index.
class ShotError : public Error {
public:
    ShotError(ErrorKind kind, std::size_t shot_index, const std::string& message)
        : Error(kind, "shot " + std::to_string(shot_index) + ": " + message), shot_index_(shot_index) {}

    std::size_t shot_index() const noexcept { return shot_index_; }

private:
    std::size_t shot_index_;
};

/// FNV-1a 64 of the canonical program text, as 16 hex digits.
std::string program_digest(const NonGroundProgram& program);

/// One fixed program evaluated over a sequence of shots. Each shot is a
/// complete fact set; in incremental mode the overgrounded cache carries
/// over from shot to shot.
class Session {
public:
    /// Throws InputError("budget infeasible") for an unusable eviction budget.
    Session(NonGroundProgram program, SessionConfig config);

    ShotResult process_shot(const FactSet& facts);

    const NonGroundProgram& program() const { return grounder_.program(); }
    const Grounder& grounder() const { return grounder_; }
    const SessionConfig& config() const { return config_; }
    const Interner& interner() const { return interner_; }
    Interner& interner() { return interner_; }
    const OvergroundedState& state() const { return state_; }
    std::size_t shots_processed() const { return state_.shot_counter(); }

    std::string render(const AnswerSet& answer_set) const { return render_answer_set(answer_set, interner_); }

    /// Line-oriented text; identical sessions write identical bytes.
    void save_state(std::ostream& out) const;
    /// Throws InputError on a malformed file, "unsupported state version"
    /// or "program changed".
    static Session load_state(NonGroundProgram program, std::istream& in, SessionConfig config);

private:
    void check_arities(const FactSet& facts) const;
    GroundProgram ground_shot(const FactSet& facts, ShotResult& result);
    void oracle_check(const FactSet& facts, const std::vector<AnswerSet>& answer_sets);

    Grounder grounder_;
    SessionConfig config_;
    Interner interner_;
    OvergroundedState state_;
};

struct ShotComparison {
    std::size_t shot_index = 0;
    std::chrono::nanoseconds incremental_grounding{0};
    std::chrono::nanoseconds scratch_grounding{0};
    std::chrono::nanoseconds incremental_total{0};
    std::chrono::nanoseconds scratch_total{0};
    std::size_t new_rules = 0;
    std::size_t cache_size_rules = 0;
    std::size_t scratch_rules = 0;
    std::size_t answer_sets = 0;
};

struct ComparisonReport {
    std::vector<ShotComparison> shots;
    std::chrono::nanoseconds cumulative_incremental_grounding{0};
    std::chrono::nanoseconds cumulative_scratch_grounding{0};
    std::chrono::nanoseconds cumulative_incremental_total{0};
    std::chrono::nanoseconds cumulative_scratch_total{0};
    bool answer_sets_equal = true;

    /// Cumulative scratch grounding time over cumulative incremental.
    double grounding_speedup() const;
};

/// Runs an incremental and a scratch session over the same shots. Throws
/// InvariantFailure naming the first shot whose answer sets differ, with
/// the symmetric difference.
ComparisonReport compare_modes(const NonGroundProgram& program, const std::vector<FactSet>& shots,
                               std::optional<EvictionConfig> eviction = std::nullopt);

} // namespace overground

#endif
