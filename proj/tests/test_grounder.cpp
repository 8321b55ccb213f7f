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

#include "overground/grounder.hpp"
#include "overground/solver.hpp"
#include "overground/syntax.hpp"

#include <doctest.h>

#include <algorithm>

using namespace overground;
using namespace overground::testing;

namespace {

const char* ef_program = "r(X) :- e(X), not s(X). s(X) :- e(X), f(X).";
const char* reach_program = "reach(X,Y) :- edge(X,Y). reach(X,Z) :- reach(X,Y), edge(Y,Z).";

std::set<Model> solved(const GroundProgram& program, const Interner& interner) {
    return models_of(solve(program).answer_sets, interner);
}

std::set<std::string> cache_texts(const OvergroundedState& state, const Interner& interner) {
    std::vector<GroundRule> rules;
    for (const auto& entry : state.rules())
        rules.push_back(entry.rule);
    return rule_texts(rules, interner);
}

} // namespace

TEST_SUITE("grounder") {

TEST_CASE("a fact program grounds to its fact") {
    Grounder grounder(parse_program("a."));
    Interner interner;
    auto g = grounder.ground_from_scratch({}, interner);
    CHECK(g.rules.empty());
    CHECK(atom_texts(g.facts, interner) == std::set<std::string>{"a"});
}

TEST_CASE("scratch grounding keeps negation and skips unsupported rules") {
    auto program = parse_program(ef_program);
    Grounder grounder(program);
    Interner interner;
    auto f = facts("e(1).");
    auto g = grounder.ground_from_scratch(f, interner);
    CHECK(rule_texts(g.rules, interner) == std::set<std::string>{"r(1) :- e(1), not s(1)."});
    CHECK(solved(g, interner) == oracle_answer_sets(program, f).answer_sets);
}

TEST_CASE("comparisons filter instances and disappear") {
    auto program = parse_program("p(X) :- e(X), X < 2.");
    Grounder grounder(program);
    Interner interner;
    auto f = facts("e(1). e(5).");
    auto g = grounder.ground_from_scratch(f, interner);
    CHECK(rule_texts(g.rules, interner) == std::set<std::string>{"p(1) :- e(1)."});
    CHECK(solved(g, interner) == oracle_answer_sets(program, f).answer_sets);
}

TEST_CASE("arithmetic comparisons join bound variables") {
    auto program = parse_program("succ(X,Y) :- n(X), n(Y), Y = X+1. top(X) :- n(X), not has_succ(X). "
                                 "has_succ(X) :- succ(X,Y).");
    Grounder grounder(program);
    Interner interner;
    auto f = facts("n(1). n(2). n(3). n(5).");
    auto g = grounder.ground_from_scratch(f, interner);
    std::size_t succ_rules = std::count_if(g.rules.begin(), g.rules.end(), [&](const GroundRule& r) {
        return r.head && interner.lookup(*r.head).predicate == "succ";
    });
    CHECK(succ_rules == 2);
    CHECK(solved(g, interner) == oracle_answer_sets(program, f).answer_sets);
}

TEST_CASE("arithmetic errors name the rule and binding") {
    Grounder grounder(parse_program("p(X) :- e(X), 10/X > 1."));
    Interner interner;
    CHECK_THROWS_WITH_AS(grounder.ground_from_scratch(facts("e(0)."), interner),
                         doctest::Contains("division by zero"), GroundingError);
    try {
        grounder.ground_from_scratch(facts("e(0)."), interner);
    } catch (const GroundingError& e) {
        std::string message = e.what();
        CHECK(message.find("p(X) :- e(X), 10/X > 1.") != std::string::npos);
        CHECK(message.find("{X=0}") != std::string::npos);
    }
}

TEST_CASE("a failed incremental shot leaves the state untouched") {
    auto program = parse_program("p(X) :- e(X), 6/X > 1. q(X) :- e(X). z :- not w.");
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();
    grounder.ground_incremental(state, facts("e(2)."), interner);
    const auto rules_before = cache_texts(state, interner);
    const auto domain_before = state.domain().atoms();
    const auto once_before = state.once_flags();

    CHECK_THROWS_AS(grounder.ground_incremental(state, facts("e(2). e(0). e(3)."), interner), GroundingError);
    CHECK(cache_texts(state, interner) == rules_before);
    CHECK(state.domain().atoms() == domain_before);
    CHECK(state.once_flags() == once_before);
    CHECK(state.bytes_estimate() == 3 * 2 * id_width);

    auto f = facts("e(2). e(3).");
    auto report = grounder.ground_incremental(state, f, interner);
    CHECK(report.new_rules == 2);
    auto projected = grounder.project_for_shot(state, f, interner);
    CHECK(solved(projected, interner) == oracle_answer_sets(program, f).answer_sets);
}

TEST_CASE("recursive components reach a fixpoint") {
    auto program = parse_program(reach_program);
    Grounder grounder(program);
    Interner interner;
    auto f = facts("edge(1,2). edge(2,3). edge(3,1). edge(3,4).");
    auto g = grounder.ground_from_scratch(f, interner);
    std::set<std::string> heads;
    for (const auto& r : g.rules)
        heads.insert(interner.render(*r.head));
    // every node of the cycle reaches 1..4
    CHECK(heads.size() == 12);
    CHECK(heads.count("reach(4,1)") == 0);
    CHECK(solved(g, interner) == oracle_answer_sets(program, f, 64).answer_sets);
}

TEST_CASE("incremental shots grow the cache monotonically") {
    auto program = parse_program(ef_program);
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();

    auto r1 = grounder.ground_incremental(state, facts("e(1)."), interner);
    CHECK(r1.new_rules == 1);
    CHECK(r1.cache_size_rules == 1);
    CHECK(cache_texts(state, interner) == std::set<std::string>{"r(1) :- e(1), not s(1)."});

    auto r2 = grounder.ground_incremental(state, facts("e(1). f(1)."), interner);
    CHECK(r2.new_rules == 1);
    CHECK(r2.new_domain_atoms == 2);
    CHECK(cache_texts(state, interner) ==
          std::set<std::string>{"r(1) :- e(1), not s(1).", "s(1) :- e(1), f(1)."});

    auto r3 = grounder.ground_incremental(state, facts("e(1)."), interner);
    CHECK(r3.new_rules == 0);
    CHECK(r3.new_domain_atoms == 0);
    CHECK(r3.rule_firings_attempted == 0);
    CHECK(r3.cache_size_rules == 2);
    CHECK(state.shot_counter() == 3);
    CHECK(state.rules()[0].shot_added == 1);
    CHECK(state.rules()[1].shot_added == 2);
}

TEST_CASE("projection drops contradicted rules and satisfied input literals") {
    auto program = parse_program(ef_program);
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();
    grounder.ground_incremental(state, facts("e(1)."), interner);
    grounder.ground_incremental(state, facts("e(1). f(1)."), interner);

    auto f2 = facts("e(1). f(1).");
    auto p2 = grounder.project_for_shot(state, f2, interner);
    CHECK(rule_texts(p2.rules, interner) == std::set<std::string>{"r(1) :- not s(1).", "s(1)."});
    CHECK(solved(p2, interner) == oracle_answer_sets(program, f2).answer_sets);
    CHECK(solved(p2, interner) == std::set<Model>{{"e(1)", "f(1)", "s(1)"}});

    auto f3 = facts("e(1).");
    auto p3 = grounder.project_for_shot(state, f3, interner);
    CHECK(rule_texts(p3.rules, interner) == std::set<std::string>{"r(1) :- not s(1)."});
    CHECK(solved(p3, interner) == oracle_answer_sets(program, f3).answer_sets);
    CHECK(solved(p3, interner) == std::set<Model>{{"e(1)", "r(1)"}});

    CHECK(state.rules()[0].trigger_count == 2);
    CHECK(state.rules()[1].trigger_count == 1);
    CHECK(state.size() == 2);
}

TEST_CASE("an empty cache projects to an empty program") {
    Grounder grounder(parse_program(ef_program));
    Interner interner;
    auto state = grounder.make_state();
    auto p = grounder.project_for_shot(state, {}, interner);
    CHECK(p.rules.empty());
    CHECK(p.facts.empty());
    auto result = solve(p);
    REQUIRE(result.answer_sets.size() == 1);
    CHECK(result.answer_sets[0].atoms.empty());
}

TEST_CASE("semi-naive instantiation joins one delta atom") {
    Grounder grounder(parse_program(reach_program));
    Interner interner;
    InstantiationDomain domain;
    auto old_atom = parse_ground_atom("reach(1,2)");
    auto new_atom = parse_ground_atom("edge(2,3)");
    domain.add(interner.intern(old_atom), old_atom, 1);
    domain.add(interner.intern(new_atom), new_atom, 2);
    std::vector<bool> once(2, false);

    auto rules = grounder.instantiate_rule_seminaive(1, domain, DeltaWindow{2, 3}, interner, once);
    CHECK(rule_texts(rules, interner) == std::set<std::string>{"reach(1,3) :- edge(2,3), reach(1,2)."});
    CHECK(grounder.instantiate_rule_seminaive(1, domain, DeltaWindow{3, 3}, interner, once).empty());
    // atoms stamped at or after the window's end are invisible
    CHECK(grounder.instantiate_rule_seminaive(1, domain, DeltaWindow{1, 2}, interner, once).empty());
}

TEST_CASE("rules without positive body are instantiated once") {
    Grounder grounder(parse_program("a :- not b. b :- not a."));
    Interner interner;
    InstantiationDomain domain;
    std::vector<bool> once(2, false);
    auto first = grounder.instantiate_rule_seminaive(0, domain, DeltaWindow{1, 2}, interner, once);
    CHECK(rule_texts(first, interner) == std::set<std::string>{"a :- not b."});
    CHECK(once[0]);
    CHECK(grounder.instantiate_rule_seminaive(0, domain, DeltaWindow{2, 3}, interner, once).empty());

    auto state = grounder.make_state();
    CHECK(grounder.ground_incremental(state, {}, interner).new_rules == 2);
    CHECK(grounder.ground_incremental(state, {}, interner).new_rules == 0);
}

TEST_CASE("replayed shots add nothing") {
    auto program = parse_program(reach_program);
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();
    auto f = facts("edge(1,2). edge(2,3).");
    auto first = grounder.ground_incremental(state, f, interner);
    CHECK(first.new_rules == 3);
    CHECK(first.new_rules <= first.rule_firings_attempted);
    auto again = grounder.ground_incremental(state, f, interner);
    CHECK(again.new_rules == 0);
    CHECK(again.new_domain_atoms == 0);
    auto subset = grounder.ground_incremental(state, facts("edge(2,3)."), interner);
    CHECK(subset.new_rules == 0);
}

TEST_CASE("incremental reach matches scratch and oracle") {
    auto program = parse_program(reach_program);
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();
    const char* shots[] = {"edge(1,2).", "edge(1,2). edge(2,3).", "edge(2,3). edge(3,1).", "edge(1,2)."};
    for (const char* text : shots) {
        auto f = facts(text);
        grounder.ground_incremental(state, f, interner);
        auto projected = grounder.project_for_shot(state, f, interner);
        Interner scratch_interner = interner;
        auto scratch = grounder.ground_from_scratch(f, scratch_interner);
        for (const auto& rule : scratch.rules)
            CHECK(state.contains(rule));
        CHECK(solved(projected, interner) == solved(scratch, scratch_interner));
        CHECK(solved(projected, interner) == oracle_answer_sets(program, f).answer_sets);
    }
}

TEST_CASE("shot order does not change the final cache") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        auto instance = random_instance(rng);
        auto program = parse_program(instance.program);
        Grounder grounder(program);
        auto run = [&](bool reversed) {
            Interner interner;
            auto state = grounder.make_state();
            auto shots = instance.shots;
            if (reversed)
                std::reverse(shots.begin(), shots.end());
            for (const auto& shot : shots)
                grounder.ground_incremental(state, parse_facts(shot), interner);
            return cache_texts(state, interner);
        };
        CHECK(run(false) == run(true));
    }
}

TEST_CASE("facts of derived predicates are accepted") {
    auto program = parse_program(ef_program);
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();
    auto f = facts("e(1). s(1).");
    grounder.ground_incremental(state, f, interner);
    auto projected = grounder.project_for_shot(state, f, interner);
    CHECK(solved(projected, interner) == oracle_answer_sets(program, f).answer_sets);
    CHECK(solved(projected, interner) == std::set<Model>{{"e(1)", "s(1)"}});
}

TEST_CASE("byte estimate counts ids") {
    GroundRule rule{GroundAtomId{1}, {GroundAtomId{2}, GroundAtomId{3}}, {GroundAtomId{4}}};
    CHECK(byte_estimate(rule) == 4 * id_width);
    Grounder grounder(parse_program(ef_program));
    Interner interner;
    auto state = grounder.make_state();
    auto report = grounder.ground_incremental(state, facts("e(1). f(1)."), interner);
    CHECK(report.cache_size_bytes_estimate == (3 + 3) * id_width);
}

TEST_CASE("eviction keeps the newest rules and repairs the domain") {
    auto program = parse_program(ef_program);
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();
    grounder.ground_incremental(state, facts("e(1)."), interner);
    grounder.ground_incremental(state, facts("e(1). f(1)."), interner);

    EvictionBudget budget;
    budget.max_rules = 1;
    CHECK(grounder.evict(state, interner, EvictionPolicy::oldest, budget) == 1);
    CHECK(cache_texts(state, interner) == std::set<std::string>{"s(1) :- e(1), f(1)."});
    CHECK(atom_texts(state.domain().atoms(), interner) == std::set<std::string>{"s(1)"});
    CHECK(state.reseed_pending());

    auto f = facts("e(1).");
    grounder.ground_incremental(state, f, interner);
    CHECK_FALSE(state.reseed_pending());
    CHECK(cache_texts(state, interner).count("r(1) :- e(1), not s(1).") == 1);
    auto projected = grounder.project_for_shot(state, f, interner);
    CHECK(solved(projected, interner) == oracle_answer_sets(program, f).answer_sets);
}

TEST_CASE("a budget the cache fits leaves the state alone") {
    Grounder grounder(parse_program(ef_program));
    Interner interner;
    auto state = grounder.make_state();
    grounder.ground_incremental(state, facts("e(1). f(1)."), interner);
    EvictionBudget budget;
    budget.max_rules = 5;
    CHECK(grounder.evict(state, interner, EvictionPolicy::least_triggered, budget) == 0);
    CHECK(state.size() == 2);
    CHECK_FALSE(state.reseed_pending());
}

TEST_CASE("least-triggered eviction breaks ties by rule id") {
    Grounder grounder(parse_program("p(X) :- e(X). q(X) :- e(X)."));
    Interner interner;
    auto state = grounder.make_state();
    grounder.ground_incremental(state, facts("e(1)."), interner);
    REQUIRE(state.size() == 2);
    const auto survivor = state.rules()[1].rule;
    EvictionBudget budget;
    budget.max_rules = 1;
    CHECK(grounder.evict(state, interner, EvictionPolicy::least_triggered, budget) == 1);
    REQUIRE(state.size() == 1);
    CHECK(state.rules()[0].rule == survivor);
}

TEST_CASE("least-triggered eviction keeps used rules") {
    auto program = parse_program(ef_program);
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();
    grounder.ground_incremental(state, facts("e(1). f(1)."), interner);
    grounder.project_for_shot(state, facts("e(1)."), interner);
    EvictionBudget budget;
    budget.max_rules = 1;
    grounder.evict(state, interner, EvictionPolicy::least_triggered, budget);
    CHECK(cache_texts(state, interner) == std::set<std::string>{"r(1) :- e(1), not s(1)."});
}

TEST_CASE("byte budgets evict until the estimate fits") {
    Grounder grounder(parse_program(ef_program));
    Interner interner;
    auto state = grounder.make_state();
    grounder.ground_incremental(state, facts("e(1). f(1)."), interner);
    EvictionBudget budget;
    budget.max_bytes = 3 * id_width;
    CHECK(grounder.evict(state, interner, EvictionPolicy::oldest, budget) == 1);
    CHECK(state.bytes_estimate() <= 3 * id_width);
}

TEST_CASE("infeasible budgets are rejected") {
    EvictionBudget rules;
    rules.max_rules = 0;
    CHECK_THROWS_WITH_AS(validate_budget(rules), doctest::Contains("budget infeasible"), InputError);
    EvictionBudget bytes;
    bytes.max_bytes = id_width - 1;
    CHECK_THROWS_AS(validate_budget(bytes), InputError);
    EvictionBudget ok;
    ok.max_rules = 1;
    CHECK_NOTHROW(validate_budget(ok));
}

TEST_CASE("evicted once-rules come back") {
    auto program = parse_program("a :- not b. b :- not a. c(X) :- e(X).");
    Grounder grounder(program);
    Interner interner;
    auto state = grounder.make_state();
    grounder.ground_incremental(state, facts("e(1)."), interner);
    REQUIRE(state.size() == 3);
    EvictionBudget budget;
    budget.max_rules = 1;
    grounder.evict(state, interner, EvictionPolicy::oldest, budget);
    auto f = facts("e(2).");
    grounder.ground_incremental(state, f, interner);
    auto projected = grounder.project_for_shot(state, f, interner);
    CHECK(solved(projected, interner) == oracle_answer_sets(program, f).answer_sets);
}

TEST_CASE("random programs agree with the oracle across shots") {
    std::mt19937_64 rng(2026);
    int checked = 0;
    while (checked < 60) {
        auto instance = random_instance(rng);
        auto program = parse_program(instance.program);
        std::vector<FactSet> shots;
        bool feasible = true;
        std::vector<OracleResult> expected;
        for (const auto& text : instance.shots) {
            shots.push_back(parse_facts(text));
            expected.push_back(oracle_answer_sets(program, shots.back()));
            feasible = feasible && expected.back().feasible;
        }
        if (!feasible)
            continue;
        ++checked;
        Grounder grounder(program);
        Interner interner;
        auto state = grounder.make_state();
        for (std::size_t i = 0; i < shots.size(); ++i) {
            grounder.ground_incremental(state, shots[i], interner);
            auto projected = grounder.project_for_shot(state, shots[i], interner);
            INFO(instance.program, "shot ", i + 1, ": ", instance.shots[i]);
            CHECK(solved(projected, interner) == expected[i].answer_sets);
        }
    }
}

}
