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

#include "helpers.hpp"
#include "oracle.hpp"

#include "overground/bench.hpp"
#include "overground/cli.hpp"
#include "overground/engine.hpp"
#include "overground/syntax.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace overground;
using namespace overground::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the first few violations; the rest are only counted.
struct Violations {
    std::size_t count = 0;
    std::string first;

    void add(const std::string& what) {
        if (count++ == 0)
            first = what;
    }
    Outcome outcome(const std::string& summary) const {
        if (count == 0)
            return {true, summary};
        return {false, std::to_string(count) + " violations, first: " + first};
    }
};

std::string show(const std::set<Model>& models) {
    std::string out = "[";
    for (const auto& m : models) {
        out += "{";
        bool first = true;
        for (const auto& a : m) {
            out += (first ? "" : ",") + a;
            first = false;
        }
        out += "}";
    }
    return out + "]";
}

struct SweepCase {
    std::size_t index = 0;
    NonGroundProgram program;
    std::vector<FactSet> shots;
    std::vector<std::set<Model>> expected;
};

// Random instances whose every shot is small enough for the oracle.
std::vector<SweepCase> sweep_cases(std::uint64_t seed, std::size_t count, std::size_t& skipped) {
    std::mt19937_64 rng(seed);
    std::vector<SweepCase> cases;
    skipped = 0;
    while (cases.size() < count) {
        auto instance = random_instance(rng);
        SweepCase c;
        c.index = cases.size();
        c.program = parse_program(instance.program);
        bool feasible = true;
        for (const auto& text : instance.shots) {
            c.shots.push_back(parse_facts(text));
            auto oracle = oracle_answer_sets(c.program, c.shots.back());
            if (!oracle.feasible) {
                feasible = false;
                break;
            }
            c.expected.push_back(std::move(oracle.answer_sets));
        }
        if (feasible)
            cases.push_back(std::move(c));
        else
            ++skipped;
    }
    return cases;
}

std::string where(const SweepCase& c, std::size_t shot) {
    return "instance " + std::to_string(c.index) + " shot " + std::to_string(shot + 1) + " (" +
           to_string(c.program) + ")";
}

// Criteria 1, 2 and 5 share the sweep.
struct SweepOutcomes {
    Outcome equivalence;
    Outcome monotone;
    Outcome scratch_subset;
};

SweepOutcomes sweep(const std::vector<SweepCase>& cases, std::size_t skipped) {
    Violations equivalence;
    Violations monotone;
    Violations subset;
    std::size_t shots = 0;
    std::size_t replays = 0;
    std::size_t checked_rules = 0;
    std::size_t unsatisfiable = 0;
    std::size_t several = 0;

    for (const auto& c : cases) {
        try {
            Session incremental(c.program, {});
            SessionConfig scratch_config;
            scratch_config.mode = Mode::scratch;
            Session scratch(c.program, scratch_config);
            std::size_t previous_cache = 0;

            for (std::size_t i = 0; i < c.shots.size(); ++i) {
                ++shots;
                unsatisfiable += c.expected[i].empty();
                several += c.expected[i].size() > 1;
                auto inc = incremental.process_shot(c.shots[i]);
                auto scr = scratch.process_shot(c.shots[i]);
                auto inc_models = models_of(inc.answer_sets, incremental.interner());
                auto scr_models = models_of(scr.answer_sets, scratch.interner());
                if (inc_models != c.expected[i] || scr_models != c.expected[i])
                    equivalence.add(where(c, i) + ": incremental " + show(inc_models) + " scratch " +
                                    show(scr_models) + " oracle " + show(c.expected[i]));

                const std::size_t cache = incremental.state().size();
                if (cache < previous_cache || inc.grounding.cache_size_rules != cache)
                    monotone.add(where(c, i) + ": cache went from " + std::to_string(previous_cache) + " to " +
                                 std::to_string(cache));
                previous_cache = cache;

                Session replay = incremental;
                auto again = replay.process_shot(c.shots[i]);
                ++replays;
                if (again.grounding.new_rules != 0)
                    monotone.add(where(c, i) + ": replay added " + std::to_string(again.grounding.new_rules) +
                                 " rules");

                Interner interner = incremental.interner();
                auto from_scratch = incremental.grounder().ground_from_scratch(c.shots[i], interner);
                for (const auto& rule : from_scratch.rules) {
                    ++checked_rules;
                    if (!incremental.state().contains(rule))
                        subset.add(where(c, i) + ": missing " + render_rule(rule, interner));
                }
                for (auto fact : from_scratch.facts) {
                    if (c.shots[i].count(interner.lookup(fact)))
                        continue;
                    ++checked_rules;
                    GroundRule rule;
                    rule.head = fact;
                    if (!incremental.state().contains(rule))
                        subset.add(where(c, i) + ": missing " + render_rule(rule, interner));
                }
            }
        } catch (const std::exception& e) {
            equivalence.add("instance " + std::to_string(c.index) + ": " + e.what());
        }
    }

    SweepOutcomes out;
    out.equivalence = equivalence.outcome(std::to_string(cases.size()) + " programs, " + std::to_string(shots) +
                                          " shots (" + std::to_string(unsatisfiable) + " without answer sets, " +
                                          std::to_string(several) + " with several), " + std::to_string(skipped) +
                                          " over-limit programs regenerated");
    out.monotone = monotone.outcome(std::to_string(shots) + " shots, " + std::to_string(replays) +
                                    " replays with no new rules");
    out.scratch_subset = subset.outcome(std::to_string(checked_rules) + " scratch rules found in the cache");
    return out;
}

Outcome retraction() {
    auto program = parse_program("r(X) :- e(X), not s(X). s(X) :- e(X), f(X).");
    const std::vector<FactSet> shots{parse_facts("e(1)."), parse_facts("e(1). f(1)."), parse_facts("e(1).")};
    const std::vector<std::set<Model>> expected{
        {{"e(1)", "r(1)"}}, {{"e(1)", "f(1)", "s(1)"}}, {{"e(1)", "r(1)"}}};
    const std::vector<std::size_t> caches{1, 2, 2};

    Session session(program, {});
    std::string observed;
    bool ok = true;
    for (std::size_t i = 0; i < shots.size(); ++i) {
        auto result = session.process_shot(shots[i]);
        auto models = models_of(result.answer_sets, session.interner());
        const std::size_t cache = result.grounding.cache_size_rules;
        ok = ok && models == expected[i] && cache == caches[i];
        observed += " " + show(models) + " cache " + std::to_string(cache);
    }
    return {ok, "observed" + observed};
}

Outcome eviction(const std::vector<SweepCase>& cases) {
    Violations violations;
    std::size_t evicted = 0;
    SessionConfig config;
    EvictionConfig eviction;
    eviction.policy = EvictionPolicy::oldest;
    eviction.budget.max_rules = 2;
    config.eviction = eviction;

    for (std::size_t k = 0; k < 50 && k < cases.size(); ++k) {
        const auto& c = cases[k];
        try {
            Session session(c.program, config);
            for (std::size_t i = 0; i < c.shots.size(); ++i) {
                auto result = session.process_shot(c.shots[i]);
                evicted += result.evicted;
                auto models = models_of(result.answer_sets, session.interner());
                if (models != c.expected[i])
                    violations.add(where(c, i) + ": got " + show(models) + " oracle " + show(c.expected[i]));
            }
        } catch (const std::exception& e) {
            violations.add("instance " + std::to_string(c.index) + ": " + e.what());
        }
    }
    return violations.outcome("50 programs, " + std::to_string(evicted) + " rules evicted");
}

Outcome performance() {
    BenchSpec spec;
    spec.generator = Generator::reach_stream;
    spec.nodes = 500;
    spec.shots = 50;
    spec.edges_per_shot = 10;
    auto instance = generate(spec);
    std::vector<FactSet> shots;
    for (const auto& text : instance.shots)
        shots.push_back(parse_facts(text));
    auto report = compare_modes(parse_program(instance.program), shots);

    auto ms = [](std::chrono::nanoseconds d) { return static_cast<double>(d.count()) / 1e6; };
    const double incremental = ms(report.cumulative_incremental_grounding);
    const double scratch = ms(report.cumulative_scratch_grounding);
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "incremental %.1f ms, scratch %.1f ms, ratio %.3f, min overlap %.3f, answer sets %s", incremental,
                  scratch, scratch > 0 ? incremental / scratch : 0.0, instance.min_overlap,
                  report.answer_sets_equal ? "equal" : "differ");
    const bool ok = report.answer_sets_equal && instance.min_overlap >= 0.8 && incremental <= 0.5 * scratch;
    return {ok, detail};
}

struct TempDir {
    std::filesystem::path dir;

    TempDir() {
        std::random_device device;
        dir = std::filesystem::temp_directory_path() /
              ("overground_acceptance_" + std::to_string(device()) + std::to_string(device()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }

    std::string file(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name, std::ios::binary) << text;
        return (dir / name).string();
    }
};

Outcome determinism() {
    TempDir tmp;
    const std::string program_text = "r(X) :- e(X), not s(X).\ns(X) :- e(X), f(X).\n";
    const std::vector<std::string> shot_texts{"e(1).\n", "e(1).\nf(1).\n", "e(1).\n"};
    std::vector<std::string> args{"run", "--program", tmp.file("p.lp", program_text), "--shots"};
    for (std::size_t i = 0; i < shot_texts.size(); ++i)
        args.push_back(tmp.file(std::to_string(i + 1) + ".facts", shot_texts[i]));
    args.push_back("--no-timings");

    auto invoke = [&args] {
        std::istringstream in;
        std::ostringstream out;
        std::ostringstream err;
        int code = run_cli(args, in, out, err);
        return std::make_pair(code, out.str());
    };
    auto first = invoke();
    auto second = invoke();
    if (first.first != 0 || first != second)
        return {false, "two runs differ or failed"};

    auto program = parse_program(program_text);
    Session straight(program, {});
    std::ostringstream resumed_state;
    for (std::size_t i = 0; i < shot_texts.size(); ++i) {
        auto facts = parse_facts(shot_texts[i]);
        auto expected = straight.process_shot(facts);

        std::ostringstream saved;
        if (i == 0) {
            Session fresh(program, {});
            fresh.save_state(saved);
        } else {
            saved << resumed_state.str();
        }
        std::istringstream in(saved.str());
        Session resumed = Session::load_state(program, in, {});
        auto got = resumed.process_shot(facts);

        std::vector<std::string> a;
        std::vector<std::string> b;
        for (const auto& m : expected.answer_sets)
            a.push_back(straight.render(m));
        for (const auto& m : got.answer_sets)
            b.push_back(resumed.render(m));
        std::ostringstream straight_state;
        straight.save_state(straight_state);
        resumed_state.str("");
        resumed.save_state(resumed_state);
        if (a != b || got.grounding.cache_size_rules != expected.grounding.cache_size_rules ||
            straight_state.str() != resumed_state.str())
            return {false, "save/load before shot " + std::to_string(i + 1) + " changed the result"};
    }
    return {true, std::to_string(first.second.size()) + " identical output bytes, state round trip at " +
                      std::to_string(shot_texts.size()) + " boundaries"};
}

Outcome guarded(const std::function<Outcome()>& check) {
    try {
        return check();
    } catch (const std::exception& e) {
        return {false, e.what()};
    }
}

} // namespace

int main() {
    std::size_t skipped = 0;
    std::vector<SweepCase> cases;
    SweepOutcomes swept;
    try {
        cases = sweep_cases(20260101, 200, skipped);
        swept = sweep(cases, skipped);
    } catch (const std::exception& e) {
        swept.equivalence = swept.monotone = swept.scratch_subset = {false, e.what()};
    }

    const std::vector<std::pair<std::string, Outcome>> results{
        {"oracle equivalence sweep", swept.equivalence},
        {"monotone cache and idempotent replay", swept.monotone},
        {"retraction inertness", guarded(retraction)},
        {"eviction safety", guarded([&] { return eviction(cases); })},
        {"scratch rules contained in the cache", swept.scratch_subset},
        {"incremental grounding at most half of scratch", guarded(performance)},
        {"deterministic output and state round trip", guarded(determinism)},
    };

    bool all = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [name, outcome] = results[i];
        all = all && outcome.pass;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << name
                  << "): " << outcome.detail << "\n";
    }
    return all ? 0 : 1;
}
