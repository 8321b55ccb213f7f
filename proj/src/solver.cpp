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

#include "overground/solver.hpp"

#include "overground/error.hpp"

#include <algorithm>
#include <limits>

namespace overground {

namespace {

constexpr std::uint32_t no_atom = std::numeric_limits<std::uint32_t>::max();

// A ground program over dense local indices 0..n-1, ordered by atom id.
class LocalProgram {
public:
    struct Rule {
        std::uint32_t head = no_atom;
        std::vector<std::uint32_t> positive;
        std::vector<std::uint32_t> negative;
    };

    explicit LocalProgram(const GroundProgram& program) : atoms_(program.atoms()) {
        std::uint32_t max_id = atoms_.empty() ? 0 : atoms_.back().value;
        local_.assign(max_id + 1, no_atom);
        for (std::uint32_t i = 0; i < atoms_.size(); ++i)
            local_[atoms_[i].value] = i;
        for (auto id : program.facts)
            facts_.push_back(local_[id.value]);
        rules_.reserve(program.rules.size());
        occurrences_.resize(atoms_.size());
        for (const auto& rule : program.rules) {
            Rule local;
            if (rule.head)
                local.head = local_[rule.head->value];
            for (auto id : rule.positive)
                local.positive.push_back(local_[id.value]);
            for (auto id : rule.negative)
                local.negative.push_back(local_[id.value]);
            for (auto a : local.positive)
                occurrences_[a].push_back(static_cast<std::uint32_t>(rules_.size()));
            rules_.push_back(std::move(local));
        }
    }

    std::size_t size() const { return atoms_.size(); }
    GroundAtomId id(std::uint32_t local) const { return atoms_[local]; }
    std::uint32_t local(GroundAtomId id) const {
        return id.value < local_.size() ? local_[id.value] : no_atom;
    }
    const std::vector<Rule>& rules() const { return rules_; }
    const std::vector<std::uint32_t>& facts() const { return facts_; }

    // Least fixpoint of the facts and the rules accepted by `allowed`,
    // with negative literals ignored.
    template <class Allowed>
    std::vector<bool> least_fixpoint(Allowed&& allowed) const {
        std::vector<bool> derived(atoms_.size(), false);
        std::vector<std::uint32_t> missing(rules_.size(), 0);
        std::vector<std::uint32_t> queue;
        auto derive = [&](std::uint32_t atom) {
            if (!derived[atom]) {
                derived[atom] = true;
                queue.push_back(atom);
            }
        };
        for (auto f : facts_)
            derive(f);
        for (std::uint32_t r = 0; r < rules_.size(); ++r) {
            const Rule& rule = rules_[r];
            if (rule.head == no_atom || !allowed(rule)) {
                missing[r] = no_atom;
                continue;
            }
            missing[r] = static_cast<std::uint32_t>(rule.positive.size());
            if (missing[r] == 0)
                derive(rule.head);
        }
        for (std::size_t q = 0; q < queue.size(); ++q) {
            for (auto r : occurrences_[queue[q]]) {
                if (missing[r] == no_atom)
                    continue;
                if (--missing[r] == 0)
                    derive(rules_[r].head);
            }
        }
        return derived;
    }

    bool stable(const std::vector<bool>& candidate) const {
        for (auto f : facts_)
            if (!candidate[f])
                return false;
        auto body_true = [&](const Rule& rule) {
            for (auto a : rule.positive)
                if (!candidate[a])
                    return false;
            for (auto a : rule.negative)
                if (candidate[a])
                    return false;
            return true;
        };
        for (const auto& rule : rules_)
            if (rule.head == no_atom && body_true(rule))
                return false;
        auto model = least_fixpoint([&](const Rule& rule) {
            return std::none_of(rule.negative.begin(), rule.negative.end(),
                                [&](std::uint32_t a) { return candidate[a]; });
        });
        return model == candidate;
    }

private:
    std::vector<GroundAtomId> atoms_;
    std::vector<std::uint32_t> local_;
    std::vector<std::uint32_t> facts_;
    std::vector<Rule> rules_;
    std::vector<std::vector<std::uint32_t>> occurrences_;
};

using Lit = std::uint32_t;

constexpr Lit positive(std::uint32_t var) { return var << 1; }
constexpr Lit negative(std::uint32_t var) { return (var << 1) | 1; }
constexpr std::uint32_t var_of(Lit lit) { return lit >> 1; }
constexpr Lit negate(Lit lit) { return lit ^ 1; }

// DPLL over the completion: atom variables 0..n-1, one body variable per
// rule after them. Only atom variables are branched on; body variables
// follow by propagation once every atom is assigned.
class CompletionSearch {
public:
    CompletionSearch(const LocalProgram& program, SolveStats& stats)
        : program_(program), stats_(stats), atoms_(static_cast<std::uint32_t>(program.size())) {
        const auto vars = atoms_ + program.rules().size();
        value_.assign(vars, 0);
        level_.assign(vars, 0);
        watches_.resize(2 * vars);
        encode();
        if (!unsat_)
            fix_well_founded();
    }

    SolveResult run(std::optional<std::size_t> max_models) {
        SolveResult result;
        if (unsat_ || !propagate())
            return result;
        bool ok = true;
        while (true) {
            if (!ok) {
                if (!backtrack())
                    break;
                ok = propagate();
                continue;
            }
            std::optional<std::uint32_t> branch = next_unassigned();
            if (!branch) {
                std::vector<bool> candidate(atoms_);
                for (std::uint32_t a = 0; a < atoms_; ++a)
                    candidate[a] = value_[a] > 0;
                if (program_.stable(candidate)) {
                    result.answer_sets.push_back(to_answer_set(candidate));
                    if (max_models && result.answer_sets.size() >= *max_models) {
                        result.exhausted = !has_open_branch();
                        return result;
                    }
                } else {
                    ++stats_.stability_rejections;
                }
                if (frames_.empty())
                    break;
                std::vector<Lit> blocking;
                blocking.reserve(atoms_);
                for (std::uint32_t a = 0; a < atoms_; ++a)
                    blocking.push_back(candidate[a] ? negative(a) : positive(a));
                if (!backtrack())
                    break;
                // A single-literal block is already enforced by the flip.
                if (blocking.size() >= 2)
                    attach(std::move(blocking));
                ok = propagate();
                continue;
            }
            ++stats_.decisions;
            frames_.push_back({trail_.size(), positive(*branch), false});
            assign(positive(*branch));
            ok = propagate();
        }
        return result;
    }

private:
    struct Frame {
        std::size_t trail_start;
        Lit decision;
        bool flipped;
    };

    std::uint32_t body_var(std::size_t rule) const { return atoms_ + static_cast<std::uint32_t>(rule); }

    void encode() {
        const auto& rules = program_.rules();
        std::vector<std::vector<Lit>> supports(atoms_);
        for (std::size_t r = 0; r < rules.size(); ++r) {
            const auto& rule = rules[r];
            const Lit body = positive(body_var(r));
            std::vector<Lit> converse{body};
            for (auto a : rule.positive) {
                add_clause({negate(body), positive(a)});
                converse.push_back(negative(a));
            }
            for (auto a : rule.negative) {
                add_clause({negate(body), negative(a)});
                converse.push_back(positive(a));
            }
            add_clause(std::move(converse));
            if (rule.head == no_atom) {
                add_clause({negate(body)});
            } else {
                add_clause({negate(body), positive(rule.head)});
                supports[rule.head].push_back(body);
            }
        }
        std::vector<bool> is_fact(atoms_, false);
        for (auto f : program_.facts()) {
            is_fact[f] = true;
            add_clause({positive(f)});
        }
        for (std::uint32_t a = 0; a < atoms_; ++a) {
            if (is_fact[a])
                continue;
            std::vector<Lit> completion{negative(a)};
            completion.insert(completion.end(), supports[a].begin(), supports[a].end());
            add_clause(std::move(completion));
        }
    }

    // Well-founded bounds by alternating fixpoint: atoms outside the upper
    // bound are false and atoms in the lower bound are true in every
    // stable model.
    void fix_well_founded() {
        std::vector<bool> lower(atoms_, false);
        std::vector<bool> upper;
        while (true) {
            upper = program_.least_fixpoint([&](const LocalProgram::Rule& rule) {
                return std::none_of(rule.negative.begin(), rule.negative.end(),
                                    [&](std::uint32_t a) { return lower[a]; });
            });
            auto next = program_.least_fixpoint([&](const LocalProgram::Rule& rule) {
                return std::none_of(rule.negative.begin(), rule.negative.end(),
                                    [&](std::uint32_t a) { return upper[a]; });
            });
            if (next == lower)
                break;
            lower = std::move(next);
        }
        for (std::uint32_t a = 0; a < atoms_ && !unsat_; ++a) {
            if (lower[a])
                root_unit(positive(a));
            else if (!upper[a])
                root_unit(negative(a));
        }
    }

    void add_clause(std::vector<Lit> clause) {
        std::sort(clause.begin(), clause.end());
        clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
        for (std::size_t i = 1; i < clause.size(); ++i)
            if (clause[i] == negate(clause[i - 1]))
                return;
        if (clause.empty()) {
            unsat_ = true;
            return;
        }
        if (clause.size() == 1) {
            root_unit(clause[0]);
            return;
        }
        attach(std::move(clause));
    }

    void root_unit(Lit lit) {
        int v = value(lit);
        if (v < 0)
            unsat_ = true;
        else if (v == 0)
            assign(lit);
    }

    // Watches go on the two literals that are best for the current
    // assignment: non-false first, then false at the highest level.
    void attach(std::vector<Lit> clause) {
        auto rank = [&](Lit lit) -> std::pair<int, std::size_t> {
            return {value(lit) >= 0 ? 1 : 0, level_[var_of(lit)]};
        };
        for (std::size_t w = 0; w < 2; ++w) {
            std::size_t best = w;
            for (std::size_t i = w + 1; i < clause.size(); ++i)
                if (rank(clause[i]) > rank(clause[best]))
                    best = i;
            std::swap(clause[w], clause[best]);
        }
        const auto index = static_cast<std::uint32_t>(clauses_.size());
        watches_[clause[0]].push_back(index);
        watches_[clause[1]].push_back(index);
        clauses_.push_back(std::move(clause));
    }

    int value(Lit lit) const {
        int v = value_[var_of(lit)];
        return (lit & 1) ? -v : v;
    }

    void assign(Lit lit) {
        auto var = var_of(lit);
        value_[var] = (lit & 1) ? -1 : 1;
        level_[var] = frames_.size();
        trail_.push_back(lit);
    }

    bool propagate() {
        while (head_ < trail_.size()) {
            const Lit falsified = negate(trail_[head_++]);
            auto& watching = watches_[falsified];
            std::size_t keep = 0;
            for (std::size_t i = 0; i < watching.size(); ++i) {
                const auto index = watching[i];
                auto& clause = clauses_[index];
                if (clause[0] == falsified)
                    std::swap(clause[0], clause[1]);
                if (value(clause[0]) > 0) {
                    watching[keep++] = index;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < clause.size(); ++k) {
                    if (value(clause[k]) >= 0) {
                        std::swap(clause[1], clause[k]);
                        watches_[clause[1]].push_back(index);
                        moved = true;
                        break;
                    }
                }
                if (moved)
                    continue;
                watching[keep++] = index;
                if (value(clause[0]) < 0) {
                    for (std::size_t j = i + 1; j < watching.size(); ++j)
                        watching[keep++] = watching[j];
                    watching.resize(keep);
                    return false;
                }
                ++stats_.propagations;
                assign(clause[0]);
            }
            watching.resize(keep);
        }
        return true;
    }

    void undo_to(std::size_t trail_size) {
        while (trail_.size() > trail_size) {
            auto var = var_of(trail_.back());
            value_[var] = 0;
            if (var < atoms_)
                hint_ = std::min(hint_, var);
            trail_.pop_back();
        }
        head_ = std::min(head_, trail_.size());
    }

    // Chronological: flip the deepest decision not flipped yet.
    bool backtrack() {
        while (!frames_.empty() && frames_.back().flipped) {
            undo_to(frames_.back().trail_start);
            frames_.pop_back();
        }
        if (frames_.empty())
            return false;
        Frame& frame = frames_.back();
        undo_to(frame.trail_start);
        frame.flipped = true;
        assign(negate(frame.decision));
        return true;
    }

    bool has_open_branch() const {
        return std::any_of(frames_.begin(), frames_.end(), [](const Frame& f) { return !f.flipped; });
    }

    std::optional<std::uint32_t> next_unassigned() {
        while (hint_ < atoms_ && value_[hint_] != 0)
            ++hint_;
        if (hint_ == atoms_)
            return std::nullopt;
        return hint_;
    }

    AnswerSet to_answer_set(const std::vector<bool>& candidate) const {
        AnswerSet out;
        for (std::uint32_t a = 0; a < atoms_; ++a)
            if (candidate[a])
                out.atoms.push_back(program_.id(a));
        return out;
    }

    const LocalProgram& program_;
    SolveStats& stats_;
    std::uint32_t atoms_;
    std::vector<int> value_;
    std::vector<std::size_t> level_;
    std::vector<Lit> trail_;
    std::size_t head_ = 0;
    std::vector<Frame> frames_;
    std::vector<std::vector<Lit>> clauses_;
    std::vector<std::vector<std::uint32_t>> watches_;
    std::uint32_t hint_ = 0;
    bool unsat_ = false;
};

} // namespace

SolveResult solve(const GroundProgram& program, std::optional<std::size_t> max_models) {
    const auto started = std::chrono::steady_clock::now();
    SolveResult result;
    if (max_models && *max_models == 0) {
        result.exhausted = false;
        return result;
    }
    LocalProgram local(program);
    SolveStats stats;
    CompletionSearch search(local, stats);
    result = search.run(max_models);
    result.stats = stats;
    result.stats.elapsed = std::chrono::steady_clock::now() - started;
    return result;
}

GroundProgram reduct(const GroundProgram& program, const AnswerSet& candidate) {
    GroundProgram out;
    out.facts = program.facts;
    for (const auto& rule : program.rules) {
        bool blocked = std::any_of(rule.negative.begin(), rule.negative.end(),
                                   [&](GroundAtomId id) { return candidate.contains(id); });
        if (blocked)
            continue;
        out.rules.push_back({rule.head, rule.positive, {}});
    }
    return out;
}

AnswerSet least_model(const GroundProgram& positive_program) {
    for (const auto& rule : positive_program.rules)
        if (!rule.negative.empty())
            throw ContractViolation("least_model requires a program without negative literals");
    LocalProgram local(positive_program);
    auto derived = local.least_fixpoint([](const LocalProgram::Rule&) { return true; });
    AnswerSet out;
    for (std::uint32_t a = 0; a < local.size(); ++a)
        if (derived[a])
            out.atoms.push_back(local.id(a));
    return out;
}

bool is_stable_model(const GroundProgram& program, const AnswerSet& candidate) {
    AnswerSet sorted = candidate;
    std::sort(sorted.atoms.begin(), sorted.atoms.end());
    for (const auto& fact : program.facts)
        if (!sorted.contains(fact))
            return false;
    for (const auto& rule : program.rules) {
        if (rule.head)
            continue;
        bool body = std::all_of(rule.positive.begin(), rule.positive.end(),
                                [&](GroundAtomId id) { return sorted.contains(id); }) &&
                    std::none_of(rule.negative.begin(), rule.negative.end(),
                                 [&](GroundAtomId id) { return sorted.contains(id); });
        if (body)
            return false;
    }
    return least_model(reduct(program, sorted)) == sorted;
}

std::set<AnswerSet> brute_force_answer_sets(const GroundProgram& program, std::size_t limit) {
    const auto universe = program.atoms();
    if (universe.size() > limit)
        throw OracleInfeasible("oracle infeasible: " + std::to_string(universe.size()) +
                               " atoms exceed the limit of " + std::to_string(limit));
    std::vector<GroundAtomId> facts = program.facts;
    std::sort(facts.begin(), facts.end());
    facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
    std::vector<GroundAtomId> free;
    for (auto id : universe)
        if (!std::binary_search(facts.begin(), facts.end(), id))
            free.push_back(id);

    std::set<AnswerSet> out;
    const std::uint64_t subsets = std::uint64_t{1} << free.size();
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        AnswerSet candidate{facts};
        for (std::size_t i = 0; i < free.size(); ++i)
            if (mask & (std::uint64_t{1} << i))
                candidate.atoms.push_back(free[i]);
        std::sort(candidate.atoms.begin(), candidate.atoms.end());
        if (is_stable_model(program, candidate))
            out.insert(std::move(candidate));
    }
    return out;
}

} // namespace overground
