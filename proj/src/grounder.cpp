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

#include "overground/grounder.hpp"

#include "overground/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace overground {

// ---------------------------------------------------------------------------
// InstantiationDomain
// ---------------------------------------------------------------------------

bool InstantiationDomain::add(GroundAtomId id, const GroundAtom& atom, Stamp stamp) {
    if (stamp < last_stamp_ || stamp == 0)
        throw ContractViolation("domain stamps must be positive and non-decreasing");
    if (id.value >= stamps_.size())
        stamps_.resize(id.value + 1, 0);
    if (stamps_[id.value] != 0)
        return false;
    stamps_[id.value] = stamp;
    last_stamp_ = stamp;
    order_.push_back(id);
    auto& extent = extents_[atom.predicate];
    extent.atoms.push_back(id);
    if (extent.by_argument.size() < atom.args.size())
        extent.by_argument.resize(atom.args.size());
    for (std::size_t i = 0; i < atom.args.size(); ++i)
        extent.by_argument[i][atom.args[i]].push_back(id);
    return true;
}

void InstantiationDomain::clear() {
    stamps_.clear();
    order_.clear();
    extents_.clear();
    last_stamp_ = 0;
}

void InstantiationDomain::truncate(std::size_t size, const Interner& interner) {
    while (order_.size() > size) {
        const GroundAtomId id = order_.back();
        const GroundAtom& atom = interner.lookup(id);
        auto& extent = extents_.at(atom.predicate);
        extent.atoms.pop_back();
        for (std::size_t i = 0; i < atom.args.size(); ++i) {
            auto& ids = extent.by_argument[i][atom.args[i]];
            ids.pop_back();
            if (ids.empty())
                extent.by_argument[i].erase(atom.args[i]);
        }
        stamps_[id.value] = 0;
        order_.pop_back();
    }
    last_stamp_ = order_.empty() ? 0 : stamps_[order_.back().value];
}

const InstantiationDomain::Extent* InstantiationDomain::extent(const std::string& predicate) const {
    auto it = extents_.find(predicate);
    return it == extents_.end() ? nullptr : &it->second;
}

std::vector<GroundAtomId> InstantiationDomain::atoms_of(const std::string& predicate) const {
    const Extent* found = extent(predicate);
    if (!found)
        return {};
    std::vector<GroundAtomId> out = found->atoms;
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// OvergroundedState
// ---------------------------------------------------------------------------

std::size_t byte_estimate(const GroundRule& rule) {
    return (1 + rule.positive.size() + rule.negative.size()) * id_width;
}

bool OvergroundedState::add_rule(const GroundRule& rule, std::size_t shot_added,
                                 std::size_t trigger_count) {
    if (!index_.insert(rule).second)
        return false;
    rules_.push_back({next_rule_id_++, rule, shot_added, trigger_count});
    bytes_ += byte_estimate(rule);
    return true;
}

void OvergroundedState::retain(const std::vector<bool>& keep) {
    std::vector<CachedRule> kept;
    kept.reserve(rules_.size());
    index_.clear();
    bytes_ = 0;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (i < keep.size() && keep[i]) {
            index_.insert(rules_[i].rule);
            bytes_ += byte_estimate(rules_[i].rule);
            kept.push_back(std::move(rules_[i]));
        }
    }
    rules_ = std::move(kept);
}

void OvergroundedState::truncate(std::size_t size) {
    while (rules_.size() > size) {
        index_.erase(rules_.back().rule);
        bytes_ -= byte_estimate(rules_.back().rule);
        rules_.pop_back();
    }
}

void validate_budget(const EvictionBudget& budget) {
    if ((budget.max_rules && *budget.max_rules < 1) || (budget.max_bytes && *budget.max_bytes < id_width))
        throw InputError("budget infeasible");
}

// ---------------------------------------------------------------------------
// Grounder
// ---------------------------------------------------------------------------

struct Grounder::Pass {
    const InstantiationDomain* domain = nullptr;
    Interner* interner = nullptr;
    std::vector<bool>* once = nullptr;
    std::function<void(const GroundRule&)> on_rule;
    /// Heads not yet in the domain, collected during a round.
    std::vector<GroundAtomId>* pending = nullptr;
    std::unordered_set<GroundAtomId>* pending_set = nullptr;
    std::size_t attempted = 0;

    void emit(GroundRule rule) {
        ++attempted;
        rule.canonicalize();
        if (pending && rule.head && !domain->contains(*rule.head) && pending_set->insert(*rule.head).second)
            pending->push_back(*rule.head);
        on_rule(rule);
    }
};

namespace {

void collect_variables(const Term& term, std::set<std::size_t>& out) {
    if (const auto* var = std::get_if<Variable>(&term.node)) {
        out.insert(var->index);
    } else if (const auto* arith = std::get_if<Arithmetic>(&term.node)) {
        collect_variables(*arith->lhs, out);
        collect_variables(*arith->rhs, out);
    }
}

std::string describe(const Substitution& subst, const std::vector<std::string>& names) {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (const Value* value = subst.get(i)) {
            out += first ? "" : ", ";
            out += names[i] + "=" + to_string(*value);
            first = false;
        }
    }
    return out + "}";
}

} // namespace

Grounder::Grounder(NonGroundProgram program)
    : program_(std::move(program)), graph_(build_dependency_graph(program_)) {
    const auto& rules = program_.rules();
    joined_by_component_.resize(graph_.components.size());
    once_by_component_.resize(graph_.components.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        rules_.push_back(compile(i, rules[i]));
        const bool joined = !rules_.back().positive.empty();
        if (!joined)
            once_rules_.push_back(i);
        if (!rules[i].head) {
            (joined ? joined_constraints_ : once_constraints_).push_back(i);
            continue;
        }
        std::size_t component = graph_.component_of_predicate(rules[i].head->predicate);
        (joined ? joined_by_component_ : once_by_component_)[component].push_back(i);
    }
}

Grounder::CompiledRule Grounder::compile(std::size_t source, const Rule& rule) {
    CompiledRule out;
    out.source = source;
    out.head = rule.head;
    out.slots = rule.variables.size();
    for (const auto& literal : rule.body) {
        if (const auto* atom = std::get_if<AtomLiteral>(&literal))
            (atom->negated ? out.negative : out.positive).push_back(atom->atom);
        else
            out.comparisons.push_back(std::get<Comparison>(literal));
    }

    std::vector<std::set<std::size_t>> comparison_vars(out.comparisons.size());
    for (std::size_t c = 0; c < out.comparisons.size(); ++c) {
        collect_variables(out.comparisons[c].lhs, comparison_vars[c]);
        collect_variables(out.comparisons[c].rhs, comparison_vars[c]);
        if (comparison_vars[c].empty())
            out.ground_comparisons.push_back(c);
    }

    // Greedy join order per delta literal: next pick the literal with the
    // most arguments already fixed, lowest index on ties.
    for (std::size_t k = 0; k < out.positive.size(); ++k) {
        std::vector<JoinStep> plan;
        std::set<std::size_t> bound;
        std::vector<bool> used(out.positive.size(), false);
        std::vector<bool> scheduled(out.comparisons.size(), false);
        for (auto c : out.ground_comparisons)
            scheduled[c] = true;
        auto fixed_args = [&](const Atom& atom) {
            std::size_t n = 0;
            for (const auto& arg : atom.args) {
                const auto* var = std::get_if<Variable>(&arg.node);
                if (!var || bound.count(var->index))
                    ++n;
            }
            return n;
        };
        std::size_t next = k;
        for (std::size_t step = 0; step < out.positive.size(); ++step) {
            if (step > 0) {
                std::optional<std::size_t> best;
                for (std::size_t i = 0; i < out.positive.size(); ++i)
                    if (!used[i] && (!best || fixed_args(out.positive[i]) > fixed_args(out.positive[*best])))
                        best = i;
                next = *best;
            }
            used[next] = true;
            JoinStep join_step;
            join_step.literal = next;
            const Atom& atom = out.positive[next];
            for (std::size_t a = 0; a < atom.args.size(); ++a) {
                const auto* var = std::get_if<Variable>(&atom.args[a].node);
                if (!var || bound.count(var->index)) {
                    join_step.probe = a;
                    break;
                }
            }
            for (const auto& arg : atom.args)
                if (const auto* var = std::get_if<Variable>(&arg.node))
                    bound.insert(var->index);
            for (std::size_t c = 0; c < out.comparisons.size(); ++c) {
                if (scheduled[c])
                    continue;
                if (std::includes(bound.begin(), bound.end(), comparison_vars[c].begin(),
                                  comparison_vars[c].end())) {
                    join_step.comparisons.push_back(c);
                    scheduled[c] = true;
                }
            }
            plan.push_back(std::move(join_step));
        }
        out.plans.push_back(std::move(plan));
    }
    return out;
}

bool Grounder::comparison_holds(const CompiledRule& rule, std::size_t index,
                                const Substitution& subst) const {
    try {
        return eval_comparison(rule.comparisons[index], subst);
    } catch (const GroundingError& error) {
        const Rule& source = program_.rules()[rule.source];
        throw GroundingError(std::string(error.what()) + " in rule '" + to_string(source) + "' with " +
                             describe(subst, source.variables));
    }
}

void Grounder::join(const CompiledRule& rule, std::size_t delta_literal, DeltaWindow window,
                    Pass& pass) const {
    const auto& plan = rule.plans[delta_literal];
    const InstantiationDomain& domain = *pass.domain;
    Substitution subst(rule.slots);
    for (auto c : rule.ground_comparisons)
        if (!comparison_holds(rule, c, subst))
            return;

    std::vector<std::size_t> trail;
    std::vector<GroundAtomId> matched(rule.positive.size());

    auto before = [&](const std::vector<GroundAtomId>& list, Stamp limit) {
        return static_cast<std::size_t>(
            std::partition_point(list.begin(), list.end(),
                                 [&](GroundAtomId id) { return domain.stamp(id) < limit; }) -
            list.begin());
    };

    auto step = [&](auto& self, std::size_t depth) -> void {
        if (depth == plan.size()) {
            GroundRule instance;
            if (rule.head)
                instance.head = pass.interner->intern(ground(*rule.head, subst));
            instance.positive = matched;
            for (const auto& negative : rule.negative)
                instance.negative.push_back(pass.interner->intern(ground(negative, subst)));
            pass.emit(std::move(instance));
            return;
        }
        const JoinStep& join_step = plan[depth];
        const Atom& literal = rule.positive[join_step.literal];
        const auto* extent = domain.extent(literal.predicate);
        if (!extent)
            return;
        const std::vector<GroundAtomId>* candidates = &extent->atoms;
        if (join_step.probe) {
            std::size_t arg = *join_step.probe;
            if (arg >= extent->by_argument.size())
                return;
            const auto& index = extent->by_argument[arg];
            auto found = index.find(evaluate(literal.args[arg], subst));
            if (found == index.end())
                return;
            candidates = &found->second;
        }
        std::size_t begin = 0;
        std::size_t end = 0;
        if (join_step.literal == delta_literal) {
            begin = before(*candidates, window.lo);
            end = before(*candidates, window.hi);
        } else {
            end = before(*candidates, join_step.literal < delta_literal ? window.lo : window.hi);
        }
        for (std::size_t i = begin; i < end; ++i) {
            GroundAtomId id = (*candidates)[i];
            std::size_t mark = trail.size();
            if (!match_in_place(literal, pass.interner->lookup(id), subst, trail))
                continue;
            bool holds = true;
            for (auto c : join_step.comparisons) {
                if (!comparison_holds(rule, c, subst)) {
                    holds = false;
                    break;
                }
            }
            if (holds) {
                matched[join_step.literal] = id;
                self(self, depth + 1);
            }
            while (trail.size() > mark) {
                subst.unbind(trail.back());
                trail.pop_back();
            }
        }
    };
    step(step, 0);
}

void Grounder::emit_once(const CompiledRule& rule, Pass& pass) const {
    Substitution empty;
    for (std::size_t c = 0; c < rule.comparisons.size(); ++c) {
        if (!comparison_holds(rule, c, empty)) {
            (*pass.once)[rule.source] = true;
            return;
        }
    }
    GroundRule instance;
    if (rule.head)
        instance.head = pass.interner->intern(to_ground_atom(*rule.head));
    for (const auto& negative : rule.negative)
        instance.negative.push_back(pass.interner->intern(to_ground_atom(negative)));
    (*pass.once)[rule.source] = true;
    pass.emit(std::move(instance));
}

void Grounder::run_fixpoint(Pass& pass, InstantiationDomain& domain, Stamp shot_start,
                            const std::function<Stamp()>& next_stamp) const {
    std::vector<GroundAtomId> pending;
    std::unordered_set<GroundAtomId> pending_set;
    pass.domain = &domain;
    pass.pending = &pending;
    pass.pending_set = &pending_set;

    auto has_delta = [&](const Atom& literal, DeltaWindow window) {
        const auto* extent = domain.extent(literal.predicate);
        if (!extent || extent->atoms.empty())
            return false;
        // Stamps grow along the extent, so the newest atom decides.
        Stamp newest = domain.stamp(extent->atoms.back());
        if (newest < window.lo)
            return false;
        auto first = std::partition_point(extent->atoms.begin(), extent->atoms.end(),
                                          [&](GroundAtomId id) { return domain.stamp(id) < window.lo; });
        return first != extent->atoms.end() && domain.stamp(*first) < window.hi;
    };

    auto round = [&](const std::vector<std::size_t>& joined, const std::vector<std::size_t>& once,
                     DeltaWindow window, bool first) {
        if (first)
            for (auto r : once)
                if (!(*pass.once)[r])
                    emit_once(rules_[r], pass);
        for (auto r : joined) {
            const CompiledRule& rule = rules_[r];
            for (std::size_t k = 0; k < rule.positive.size(); ++k)
                if (has_delta(rule.positive[k], window))
                    join(rule, k, window, pass);
        }
    };

    for (std::size_t c = 0; c < graph_.components.size(); ++c) {
        const auto& joined = joined_by_component_[c];
        const auto& once = once_by_component_[c];
        if (joined.empty() && once.empty())
            continue;
        DeltaWindow window{shot_start, 0};
        for (bool first = true;; first = false) {
            window.hi = next_stamp();
            pending.clear();
            pending_set.clear();
            round(joined, once, window, first);
            for (auto id : pending)
                domain.add(id, pass.interner->lookup(id), window.hi);
            if (pending.empty() || !graph_.recursive[c])
                break;
            window.lo = window.hi;
        }
    }

    pending.clear();
    pending_set.clear();
    round(joined_constraints_, once_constraints_, DeltaWindow{shot_start, next_stamp()}, true);
    pass.pending = nullptr;
    pass.pending_set = nullptr;
}

GroundProgram Grounder::ground_from_scratch(const FactSet& facts, Interner& interner) const {
    InstantiationDomain domain;
    Stamp next = 1;
    auto next_stamp = [&next] { return next++; };
    std::vector<bool> once(program_.rules().size(), false);

    std::vector<GroundAtomId> fact_ids;
    Stamp start = next_stamp();
    for (const auto& fact : facts) {
        GroundAtomId id = interner.intern(fact);
        fact_ids.push_back(id);
        domain.add(id, fact, start);
    }

    std::vector<GroundRule> rules;
    std::unordered_set<GroundRule, GroundRuleHash> seen;
    Pass pass;
    pass.interner = &interner;
    pass.once = &once;
    pass.on_rule = [&](const GroundRule& rule) {
        if (seen.insert(rule).second)
            rules.push_back(rule);
    };
    run_fixpoint(pass, domain, start, next_stamp);

    GroundProgram out;
    out.facts = std::move(fact_ids);
    for (auto& rule : rules) {
        if (rule.head && rule.positive.empty() && rule.negative.empty())
            out.facts.push_back(*rule.head);
        else
            out.rules.push_back(std::move(rule));
    }
    std::sort(out.facts.begin(), out.facts.end());
    out.facts.erase(std::unique(out.facts.begin(), out.facts.end()), out.facts.end());
    return out;
}

GroundingReport Grounder::ground_incremental(OvergroundedState& state, const FactSet& facts,
                                             Interner& interner) const {
    const auto started = std::chrono::steady_clock::now();
    GroundingReport report;
    const std::size_t shot = state.begin_shot();
    auto& domain = state.domain();
    if (state.once_flags().size() != program_.rules().size())
        throw ContractViolation("grounding state belongs to a different program");

    auto finish = [&] {
        report.cache_size_rules = state.size();
        report.cache_size_bytes_estimate = state.bytes_estimate();
        report.elapsed = std::chrono::steady_clock::now() - started;
        return report;
    };

    const std::size_t domain_before = domain.size();
    const std::size_t rules_before = state.size();
    const std::vector<bool> once_before = state.once_flags();
    const bool reseed_before = state.reseed_pending();
    Stamp shot_start = 0;
    if (state.reseed_pending()) {
        std::vector<GroundAtomId> previous = domain.atoms();
        domain.clear();
        shot_start = state.next_stamp();
        for (auto id : previous)
            domain.add(id, interner.lookup(id), shot_start);
        for (const auto& fact : facts)
            domain.add(interner.intern(fact), fact, shot_start);
        state.set_reseed_pending(false);
    } else {
        std::vector<std::pair<GroundAtomId, const GroundAtom*>> delta;
        for (const auto& fact : facts) {
            GroundAtomId id = interner.intern(fact);
            if (!domain.contains(id))
                delta.emplace_back(id, &fact);
        }
        const bool once_pending = std::any_of(once_rules_.begin(), once_rules_.end(),
                                              [&](std::size_t r) { return !state.once_flags()[r]; });
        if (delta.empty() && !once_pending)
            return finish();
        shot_start = state.next_stamp();
        for (const auto& [id, atom] : delta)
            domain.add(id, *atom, shot_start);
    }

    Pass pass;
    pass.interner = &interner;
    pass.once = &state.once_flags();
    pass.on_rule = [&](const GroundRule& rule) {
        if (state.add_rule(rule, shot))
            ++report.new_rules;
    };
    try {
        run_fixpoint(pass, domain, shot_start, [&state] { return state.next_stamp(); });
    } catch (...) {
        // Atoms and rules are only ever appended during a pass, and a
        // reseed re-adds the previous domain first in its old order.
        domain.truncate(domain_before, interner);
        state.truncate(rules_before);
        state.once_flags() = once_before;
        state.set_reseed_pending(reseed_before);
        throw;
    }
    report.rule_firings_attempted = pass.attempted;
    report.new_domain_atoms = domain.size() - domain_before;
    return finish();
}

GroundProgram Grounder::project_for_shot(OvergroundedState& state, const FactSet& facts,
                                         Interner& interner) const {
    GroundProgram out;
    for (const auto& fact : facts)
        out.facts.push_back(interner.intern(fact));
    std::sort(out.facts.begin(), out.facts.end());

    std::vector<bool> in_shot(interner.size() + 1, false);
    for (auto id : out.facts)
        in_shot[id.value] = true;

    // 0 unknown, 1 input, 2 derived
    std::vector<std::uint8_t> input_kind(interner.size() + 1, 0);
    auto is_input = [&](GroundAtomId id) {
        auto& kind = input_kind[id.value];
        if (kind == 0)
            kind = program_.is_input(interner.lookup(id).predicate) ? 1 : 2;
        return kind == 1;
    };

    const auto& cached = state.rules();
    for (std::size_t i = 0; i < cached.size(); ++i) {
        const GroundRule& rule = cached[i].rule;
        GroundRule projected;
        projected.head = rule.head;
        bool survives = true;
        for (auto id : rule.positive) {
            if (!is_input(id))
                projected.positive.push_back(id);
            else if (!in_shot[id.value]) {
                survives = false;
                break;
            }
        }
        if (!survives)
            continue;
        for (auto id : rule.negative) {
            if (!is_input(id))
                projected.negative.push_back(id);
            else if (in_shot[id.value]) {
                survives = false;
                break;
            }
        }
        if (!survives)
            continue;
        state.record_trigger(i);
        out.rules.push_back(std::move(projected));
    }
    return out;
}

std::vector<GroundRule> Grounder::instantiate_rule_seminaive(std::size_t rule_index,
                                                             const InstantiationDomain& domain,
                                                             DeltaWindow window, Interner& interner,
                                                             std::vector<bool>& once_flags) const {
    if (rule_index >= rules_.size())
        throw ContractViolation("rule index out of range");
    if (once_flags.size() < rules_.size())
        once_flags.resize(rules_.size(), false);
    std::vector<GroundRule> out;
    std::unordered_set<GroundRule, GroundRuleHash> seen;
    Pass pass;
    pass.domain = &domain;
    pass.interner = &interner;
    pass.once = &once_flags;
    pass.on_rule = [&](const GroundRule& rule) {
        if (seen.insert(rule).second)
            out.push_back(rule);
    };
    const CompiledRule& rule = rules_[rule_index];
    if (rule.positive.empty()) {
        if (!once_flags[rule_index])
            emit_once(rule, pass);
        return out;
    }
    for (std::size_t k = 0; k < rule.positive.size(); ++k)
        join(rule, k, window, pass);
    return out;
}

bool Grounder::once_represented(const CompiledRule& rule, const OvergroundedState& state,
                                const Interner& interner) const {
    Substitution empty;
    for (std::size_t c = 0; c < rule.comparisons.size(); ++c)
        if (!eval_comparison(rule.comparisons[c], empty))
            return true;
    GroundRule instance;
    if (rule.head) {
        auto head = interner.find(to_ground_atom(*rule.head));
        if (!head)
            return false;
        instance.head = *head;
    }
    for (const auto& negative : rule.negative) {
        auto id = interner.find(to_ground_atom(negative));
        if (!id)
            return false;
        instance.negative.push_back(*id);
    }
    instance.canonicalize();
    return state.contains(instance);
}

std::size_t Grounder::evict(OvergroundedState& state, const Interner& interner, EvictionPolicy policy,
                            const EvictionBudget& budget) const {
    validate_budget(budget);
    const auto& cached = state.rules();
    std::size_t rules = cached.size();
    std::size_t bytes = state.bytes_estimate();
    auto over = [&] {
        return (budget.max_rules && rules > *budget.max_rules) || (budget.max_bytes && bytes > *budget.max_bytes);
    };
    if (!over())
        return 0;

    std::vector<std::size_t> ranked(cached.size());
    std::iota(ranked.begin(), ranked.end(), std::size_t{0});
    auto key = [&](std::size_t i) {
        const auto& entry = cached[i];
        std::size_t primary = policy == EvictionPolicy::oldest ? entry.shot_added : entry.trigger_count;
        return std::pair{primary, entry.id};
    };
    std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

    std::vector<bool> keep(cached.size(), true);
    std::size_t evicted = 0;
    for (auto i : ranked) {
        if (!over())
            break;
        keep[i] = false;
        --rules;
        bytes -= byte_estimate(cached[i].rule);
        ++evicted;
    }
    state.retain(keep);

    // Repair: the domain shrinks to what the remaining rules can derive,
    // and the next shot reseeds from its complete input.
    auto& domain = state.domain();
    domain.clear();
    Stamp stamp = state.next_stamp();
    for (const auto& entry : state.rules())
        if (entry.rule.head)
            domain.add(*entry.rule.head, interner.lookup(*entry.rule.head), stamp);
    for (auto r : once_rules_)
        if (state.once_flags()[r] && !once_represented(rules_[r], state, interner))
            state.once_flags()[r] = false;
    state.set_reseed_pending(true);
    return evicted;
}

} // namespace overground
