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

#ifndef OVERGROUND_GROUNDER_HPP
#define OVERGROUND_GROUNDER_HPP

#include "overground/dependency_graph.hpp"
#include "overground/interner.hpp"
#include "overground/model.hpp"

#include <chrono>
#include <functional>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace overground {

/// Generation counter for domain atoms. Semi-naive evaluation tells old
/// atoms from delta atoms by comparing stamps against a DeltaWindow.
using Stamp = std::uint64_t;

/// Atoms with stamp in [lo, hi) are the delta; stamps below lo are old;
/// atoms stamped hi or later are invisible to the round.
struct DeltaWindow {
    Stamp lo = 0;
    Stamp hi = 0;
};

/// Per-predicate sets of atoms judged possibly true, with argument indexes
/// for joins. Atoms are kept in insertion order, which is stamp order.
class InstantiationDomain {
public:
    struct Extent {
        std::vector<GroundAtomId> atoms;
        std::vector<std::unordered_map<Value, std::vector<GroundAtomId>>> by_argument;
    };

    bool contains(GroundAtomId id) const { return stamp(id) != 0; }
    /// 0 when absent.
    Stamp stamp(GroundAtomId id) const {
        return id.value < stamps_.size() ? stamps_[id.value] : 0;
    }
    /// Returns false if the atom is already present. Stamps must be
    /// non-decreasing across calls.
    bool add(GroundAtomId id, const GroundAtom& atom, Stamp stamp);
    void clear();
    /// Drops the most recently added atoms until `size` remain.
    void truncate(std::size_t size, const Interner& interner);

    std::size_t size() const { return order_.size(); }
    /// All atoms in insertion order.
    const std::vector<GroundAtomId>& atoms() const { return order_; }
    const Extent* extent(const std::string& predicate) const;
    /// Ids of one predicate, ascending.
    std::vector<GroundAtomId> atoms_of(const std::string& predicate) const;

private:
    std::vector<Stamp> stamps_;
    std::vector<GroundAtomId> order_;
    std::unordered_map<std::string, Extent> extents_;
    Stamp last_stamp_ = 0;
};

struct CachedRule {
    std::uint64_t id = 0;
    GroundRule rule;
    std::size_t shot_added = 0;
    /// Shots in which the rule survived projection.
    std::size_t trigger_count = 0;
};

/// Bytes per stored atom id in the cache size estimate.
inline constexpr std::size_t id_width = sizeof(std::uint32_t);

/// (1 + |positive| + |negative|) * id_width
std::size_t byte_estimate(const GroundRule& rule);

/// The overgrounded program: a duplicate-free cache of unsimplified ground
/// rules plus the instantiation domain and bookkeeping that lets the next
/// shot ground only what is new.
class OvergroundedState {
public:
    OvergroundedState() = default;
    explicit OvergroundedState(std::size_t program_rules) : once_(program_rules, false) {}

    const std::vector<CachedRule>& rules() const { return rules_; }
    std::size_t size() const { return rules_.size(); }
    std::size_t bytes_estimate() const { return bytes_; }
    bool contains(const GroundRule& rule) const { return index_.count(rule) != 0; }

    /// Returns true when the rule was not cached yet.
    bool add_rule(const GroundRule& rule, std::size_t shot_added, std::size_t trigger_count = 0);
    void record_trigger(std::size_t position) { ++rules_[position].trigger_count; }
    /// Keeps rules whose positions are flagged in `keep`, preserving order.
    void retain(const std::vector<bool>& keep);
    /// Drops the most recently added rules until `size` remain.
    void truncate(std::size_t size);

    InstantiationDomain& domain() { return domain_; }
    const InstantiationDomain& domain() const { return domain_; }

    /// Set once the body-less instance of a rule without positive body
    /// literals has been generated.
    std::vector<bool>& once_flags() { return once_; }
    const std::vector<bool>& once_flags() const { return once_; }

    std::size_t shot_counter() const { return shot_counter_; }
    void set_shot_counter(std::size_t shots) { shot_counter_ = shots; }
    /// Advances the shot counter and returns the new shot index.
    std::size_t begin_shot() { return ++shot_counter_; }

    /// After an eviction the next shot re-derives from its full fact set
    /// and the whole remaining domain.
    bool reseed_pending() const { return reseed_; }
    void set_reseed_pending(bool pending) { reseed_ = pending; }

    Stamp next_stamp() { return next_stamp_++; }

private:
    std::vector<CachedRule> rules_;
    std::unordered_set<GroundRule, GroundRuleHash> index_;
    std::size_t bytes_ = 0;
    std::uint64_t next_rule_id_ = 0;
    InstantiationDomain domain_;
    std::vector<bool> once_;
    std::size_t shot_counter_ = 0;
    bool reseed_ = false;
    Stamp next_stamp_ = 1;
};

struct GroundingReport {
    std::size_t new_rules = 0;
    std::size_t new_domain_atoms = 0;
    /// Instances produced by joins, before deduplication against the cache.
    std::size_t rule_firings_attempted = 0;
    std::chrono::nanoseconds elapsed{0};
    std::size_t cache_size_rules = 0;
    std::size_t cache_size_bytes_estimate = 0;
};

enum class EvictionPolicy { oldest, least_triggered };

struct EvictionBudget {
    std::optional<std::size_t> max_rules;
    std::optional<std::size_t> max_bytes;
};

/// Throws InputError("budget infeasible") if no single rule fits.
void validate_budget(const EvictionBudget& budget);

/// Bottom-up instantiation of one fixed program, from scratch or against an
/// OvergroundedState. Components of the predicate dependency graph are
/// processed in topological order; recursive ones iterate to a fixpoint.
/// Negative literals never restrict instantiation and are kept verbatim.
class Grounder {
public:
    explicit Grounder(NonGroundProgram program);

    const NonGroundProgram& program() const { return program_; }
    const PredicateDependencyGraph& graph() const { return graph_; }

    /// A fresh state sized for this program.
    OvergroundedState make_state() const { return OvergroundedState(program_.rules().size()); }

    /// Grounds P together with `facts` in a fresh domain. Rules with a head
    /// and an empty body come back as facts.
    GroundProgram ground_from_scratch(const FactSet& facts, Interner& interner) const;

    /// Grounds only what `facts` adds to the state's domain and merges the
    /// new instances into the cache. On failure the cache, domain and
    /// once-flags are left as they were before the call.
    GroundingReport ground_incremental(OvergroundedState& state, const FactSet& facts,
                                       Interner& interner) const;

    /// Per-shot view of the cache: rules contradicted by the shot's input
    /// facts are dropped, satisfied input literals are removed. The cache
    /// itself is untouched apart from trigger counts.
    GroundProgram project_for_shot(OvergroundedState& state, const FactSet& facts,
                                   Interner& interner) const;

    /// Instances of program rule `rule_index` with at least one positive
    /// body atom in the window's delta and the rest visible in `domain`.
    /// A rule without positive body literals yields its single instance
    /// only while its once-flag is clear, and sets the flag.
    std::vector<GroundRule> instantiate_rule_seminaive(std::size_t rule_index,
                                                       const InstantiationDomain& domain,
                                                       DeltaWindow window, Interner& interner,
                                                       std::vector<bool>& once_flags) const;

    /// Drops lowest-ranked rules until the cache fits the budget, then
    /// repairs the state so later shots re-derive what they need. Returns
    /// the number of evicted rules.
    std::size_t evict(OvergroundedState& state, const Interner& interner, EvictionPolicy policy,
                      const EvictionBudget& budget) const;

private:
    struct JoinStep {
        std::size_t literal = 0;
        std::optional<std::size_t> probe;
        std::vector<std::size_t> comparisons;
    };

    struct CompiledRule {
        std::size_t source = 0;
        std::optional<Atom> head;
        std::vector<Atom> positive;
        std::vector<Atom> negative;
        std::vector<Comparison> comparisons;
        std::size_t slots = 0;
        /// plans[k] starts from positive literal k, the delta literal.
        std::vector<std::vector<JoinStep>> plans;
        /// Comparisons without variables, checked before joining.
        std::vector<std::size_t> ground_comparisons;
    };

    struct Pass;

    static CompiledRule compile(std::size_t source, const Rule& rule);
    void run_fixpoint(Pass& pass, InstantiationDomain& domain, Stamp shot_start,
                      const std::function<Stamp()>& next_stamp) const;
    void join(const CompiledRule& rule, std::size_t delta_literal, DeltaWindow window,
              Pass& pass) const;
    void emit_once(const CompiledRule& rule, Pass& pass) const;
    bool once_represented(const CompiledRule& rule, const OvergroundedState& state,
                          const Interner& interner) const;
    bool comparison_holds(const CompiledRule& rule, std::size_t index, const Substitution& subst) const;

    NonGroundProgram program_;
    PredicateDependencyGraph graph_;
    std::vector<CompiledRule> rules_;
    /// Per component: compiled rules with and without positive body.
    std::vector<std::vector<std::size_t>> joined_by_component_;
    std::vector<std::vector<std::size_t>> once_by_component_;
    std::vector<std::size_t> joined_constraints_;
    std::vector<std::size_t> once_constraints_;
    std::vector<std::size_t> once_rules_;
};

} // namespace overground

#endif
