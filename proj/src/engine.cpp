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

#include "overground/engine.hpp"

#include "overground/syntax.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace overground {

namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* state_magic = "overground-state";
constexpr const char* state_version = "v1";

std::chrono::nanoseconds since(Clock::time_point start) { return Clock::now() - start; }

std::set<std::string> rendered(const std::vector<AnswerSet>& answer_sets, const Interner& interner) {
    std::set<std::string> out;
    for (const auto& answer_set : answer_sets)
        out.insert(render_answer_set(answer_set, interner));
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty())
            out += ' ';
        out += item;
    }
    return out;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
    throw InputError("malformed state file at line " + std::to_string(line) + ": " + what);
}

std::vector<GroundAtomId> parse_ids(const std::string& text, std::size_t line, const Interner& interner) {
    std::istringstream in(text);
    std::vector<GroundAtomId> out;
    std::uint64_t value = 0;
    while (in >> value) {
        if (value == 0 || value > interner.size())
            malformed(line, "unknown atom id " + std::to_string(value));
        out.push_back(GroundAtomId{static_cast<std::uint32_t>(value)});
    }
    if (!in.eof())
        malformed(line, "expected atom ids");
    return out;
}

std::vector<std::string> split(const std::string& text, char separator) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == separator) {
            out.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    out.push_back(current);
    return out;
}

} // namespace

std::string program_digest(const NonGroundProgram& program) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : to_string(program)) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return buffer;
}

Session::Session(NonGroundProgram program, SessionConfig config)
    : grounder_(std::move(program)), config_(std::move(config)) {
    if (config_.eviction)
        validate_budget(config_.eviction->budget);
    state_ = grounder_.make_state();
}

void Session::check_arities(const FactSet& facts) const {
    for (const auto& fact : facts) {
        auto arity = program().arity_of(fact.predicate);
        if (arity && *arity != fact.args.size())
            throw InputError("fact " + to_string(fact) + " has arity " + std::to_string(fact.args.size()) +
                             " but " + fact.predicate + " has arity " + std::to_string(*arity));
    }
}

GroundProgram Session::ground_shot(const FactSet& facts, ShotResult& result) {
    if (config_.mode == Mode::scratch) {
        result.shot_index = state_.begin_shot();
        auto started = Clock::now();
        GroundProgram ground = grounder_.ground_from_scratch(facts, interner_);
        result.stages.grounding = since(started);
        result.grounding.elapsed = result.stages.grounding;
        result.grounding.new_rules = ground.rules.size();
        result.grounding.rule_firings_attempted = ground.rules.size();
        result.grounding.cache_size_rules = ground.rules.size();
        for (const auto& rule : ground.rules)
            result.grounding.cache_size_bytes_estimate += byte_estimate(rule);
        return ground;
    }

    result.shot_index = state_.shot_counter() + 1;
    if (config_.eviction) {
        auto started = Clock::now();
        result.evicted = grounder_.evict(state_, interner_, config_.eviction->policy, config_.eviction->budget);
        result.stages.eviction = since(started);
    }
    result.grounding = grounder_.ground_incremental(state_, facts, interner_);
    result.stages.grounding = result.grounding.elapsed;

    auto started = Clock::now();
    GroundProgram projected = grounder_.project_for_shot(state_, facts, interner_);
    result.stages.projection = since(started);
    return projected;
}

void Session::oracle_check(const FactSet& facts, const std::vector<AnswerSet>& answer_sets) {
    GroundProgram reference = grounder_.ground_from_scratch(facts, interner_);
    auto expected = brute_force_answer_sets(reference, config_.oracle_limit);
    std::set<AnswerSet> actual(answer_sets.begin(), answer_sets.end());
    if (config_.max_models && answer_sets.size() >= *config_.max_models) {
        bool subset = std::includes(expected.begin(), expected.end(), actual.begin(), actual.end());
        if (subset)
            return;
    } else if (actual == expected) {
        return;
    }
    std::vector<std::string> missing;
    std::vector<std::string> extra;
    for (const auto& a : expected)
        if (!actual.count(a))
            missing.push_back(render_answer_set(a, interner_));
    for (const auto& a : actual)
        if (!expected.count(a))
            extra.push_back(render_answer_set(a, interner_));
    throw InvariantFailure("answer sets differ from the oracle; missing [" + join(missing) + "] unexpected [" +
                           join(extra) + "]");
}

ShotResult Session::process_shot(const FactSet& facts) {
    const auto started = Clock::now();
    ShotResult result;
    result.shot_index = state_.shot_counter() + 1;
    try {
        check_arities(facts);
        GroundProgram ground = ground_shot(facts, result);

        auto solve_started = Clock::now();
        SolveResult solved = solve(ground, config_.max_models);
        result.stages.solving = since(solve_started);
        result.answer_sets = std::move(solved.answer_sets);
        result.exhausted = solved.exhausted;
        result.solve_stats = solved.stats;

        if (config_.oracle_check)
            oracle_check(facts, result.answer_sets);
    } catch (const ShotError&) {
        throw;
    } catch (const Error& e) {
        throw ShotError(e.kind(), result.shot_index, e.what());
    }
    result.wall_time_total = since(started);
    return result;
}

void Session::save_state(std::ostream& out) const {
    out << state_magic << ' ' << state_version << '\n';
    out << "digest " << program_digest(program()) << '\n';
    out << "shots " << state_.shot_counter() << '\n';
    out << "reseed " << (state_.reseed_pending() ? 1 : 0) << '\n';
    for (std::uint32_t id = 1; id <= interner_.size(); ++id)
        out << "atom " << id << ' ' << interner_.render(GroundAtomId{id}) << '\n';
    for (const auto& entry : state_.rules()) {
        const auto& rule = entry.rule;
        out << "rule " << (rule.head ? rule.head->value : 0) << " |";
        for (auto id : rule.positive)
            out << ' ' << id.value;
        out << " |";
        for (auto id : rule.negative)
            out << ' ' << id.value;
        out << " | " << entry.shot_added << ' ' << entry.trigger_count << '\n';
    }
    for (auto id : state_.domain().atoms())
        out << "domain " << id.value << '\n';
    const auto& once = state_.once_flags();
    for (std::size_t r = 0; r < once.size(); ++r)
        if (once[r])
            out << "once " << r << '\n';
    out << "end\n";
}

Session Session::load_state(NonGroundProgram program, std::istream& in, SessionConfig config) {
    Session session(std::move(program), std::move(config));
    auto& interner = session.interner_;
    auto& state = session.state_;

    std::string line;
    std::size_t number = 0;
    auto next = [&]() -> bool {
        if (!std::getline(in, line))
            return false;
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return true;
    };

    if (!next())
        malformed(1, "empty file");
    {
        std::istringstream header(line);
        std::string magic;
        std::string version;
        header >> magic >> version;
        if (magic != state_magic)
            malformed(number, "missing header");
        if (version != state_version)
            throw InputError("unsupported state version " + version);
    }

    auto expect_field = [&](const std::string& key) {
        if (!next())
            malformed(number + 1, "missing " + key);
        std::istringstream fields(line);
        std::string name;
        std::string value;
        fields >> name >> value;
        if (name != key || value.empty())
            malformed(number, "expected " + key);
        return value;
    };

    if (expect_field("digest") != program_digest(session.program()))
        throw InputError("program changed since the state was saved");
    std::size_t shots = 0;
    bool reseed = false;
    try {
        shots = std::stoull(expect_field("shots"));
        reseed = std::stoi(expect_field("reseed")) != 0;
    } catch (const std::logic_error&) {
        malformed(number, "expected a number");
    }
    state.set_shot_counter(shots);
    state.set_reseed_pending(reseed);

    // Restored domain atoms all share the first stamp.
    const Stamp stamp = state.next_stamp();
    bool ended = false;
    while (next()) {
        if (line.empty())
            continue;
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (key == "atom") {
            std::uint64_t id = 0;
            if (!(fields >> id))
                malformed(number, "expected an atom id");
            std::string text;
            std::getline(fields >> std::ws, text);
            GroundAtom atom;
            try {
                atom = parse_ground_atom(text);
            } catch (const Error& e) {
                malformed(number, e.what());
            }
            if (interner.intern(atom).value != id)
                malformed(number, "atom ids out of order");
        } else if (key == "rule") {
            auto parts = split(line.substr(4), '|');
            if (parts.size() != 4)
                malformed(number, "expected four rule fields");
            GroundRule rule;
            std::istringstream head_field(parts[0]);
            std::uint64_t head_id = 0;
            std::string rest;
            if (!(head_field >> head_id) || (head_field >> rest) || head_id > interner.size())
                malformed(number, "expected a head id");
            if (head_id != 0)
                rule.head = GroundAtomId{static_cast<std::uint32_t>(head_id)};
            rule.positive = parse_ids(parts[1], number, interner);
            rule.negative = parse_ids(parts[2], number, interner);
            std::istringstream meta(parts[3]);
            std::size_t shot_added = 0;
            std::size_t triggers = 0;
            if (!(meta >> shot_added >> triggers))
                malformed(number, "expected rule metadata");
            GroundRule canonical = rule;
            canonical.canonicalize();
            if (!(canonical == rule) || !state.add_rule(rule, shot_added, triggers))
                malformed(number, "rule is not canonical or repeats an earlier one");
        } else if (key == "domain") {
            std::uint64_t id = 0;
            if (!(fields >> id) || id == 0 || id > interner.size())
                malformed(number, "unknown domain atom");
            GroundAtomId atom{static_cast<std::uint32_t>(id)};
            if (!state.domain().add(atom, interner.lookup(atom), stamp))
                malformed(number, "repeated domain atom");
        } else if (key == "once") {
            std::size_t index = 0;
            if (!(fields >> index) || index >= state.once_flags().size())
                malformed(number, "once flag out of range");
            state.once_flags()[index] = true;
        } else if (key == "end") {
            ended = true;
            break;
        } else {
            malformed(number, "unknown entry '" + key + "'");
        }
    }
    if (!ended)
        malformed(number + 1, "missing end marker");
    return session;
}

double ComparisonReport::grounding_speedup() const {
    if (cumulative_incremental_grounding.count() == 0)
        return 0.0;
    return static_cast<double>(cumulative_scratch_grounding.count()) /
           static_cast<double>(cumulative_incremental_grounding.count());
}

ComparisonReport compare_modes(const NonGroundProgram& program, const std::vector<FactSet>& shots,
                               std::optional<EvictionConfig> eviction) {
    SessionConfig incremental_config;
    incremental_config.eviction = eviction;
    SessionConfig scratch_config;
    scratch_config.mode = Mode::scratch;
    Session incremental(program, incremental_config);
    Session scratch(program, scratch_config);

    ComparisonReport report;
    for (const auto& facts : shots) {
        ShotResult a = incremental.process_shot(facts);
        ShotResult b = scratch.process_shot(facts);
        auto left = rendered(a.answer_sets, incremental.interner());
        auto right = rendered(b.answer_sets, scratch.interner());
        if (left != right) {
            std::vector<std::string> only_incremental;
            std::vector<std::string> only_scratch;
            std::set_difference(left.begin(), left.end(), right.begin(), right.end(),
                                std::back_inserter(only_incremental));
            std::set_difference(right.begin(), right.end(), left.begin(), left.end(),
                                std::back_inserter(only_scratch));
            throw InvariantFailure("answer sets differ at shot " + std::to_string(a.shot_index) +
                                   "; incremental only [" + join(only_incremental) + "] scratch only [" +
                                   join(only_scratch) + "]");
        }
        ShotComparison shot;
        shot.shot_index = a.shot_index;
        shot.incremental_grounding = a.stages.eviction + a.stages.grounding;
        shot.scratch_grounding = b.stages.grounding;
        shot.incremental_total = a.wall_time_total;
        shot.scratch_total = b.wall_time_total;
        shot.new_rules = a.grounding.new_rules;
        shot.cache_size_rules = a.grounding.cache_size_rules;
        shot.scratch_rules = b.grounding.new_rules;
        shot.answer_sets = a.answer_sets.size();
        report.cumulative_incremental_grounding += shot.incremental_grounding;
        report.cumulative_scratch_grounding += shot.scratch_grounding;
        report.cumulative_incremental_total += shot.incremental_total;
        report.cumulative_scratch_total += shot.scratch_total;
        report.shots.push_back(shot);
    }
    return report;
}

} // namespace overground
