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

#ifndef OVERGROUND_MODEL_HPP
#define OVERGROUND_MODEL_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace overground {

// ---------------------------------------------------------------------------
// Ground values
// ---------------------------------------------------------------------------

/// A ground term: an integer or a symbolic constant. The variant order gives
/// the total order used by comparisons: every integer sorts before every
/// constant, integers numerically, constants lexicographically.
using Value = std::variant<std::int64_t, std::string>;

std::string to_string(const Value& value);

// ---------------------------------------------------------------------------
// Non-ground terms, atoms, literals, rules
// ---------------------------------------------------------------------------

enum class ArithOp { add, sub, mul, div };
enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view to_string(ArithOp op);
std::string_view to_string(CompareOp op);

struct Term;

struct Constant {
    std::string name;
    bool operator==(const Constant&) const = default;
};

struct Integer {
    std::int64_t value = 0;
    bool operator==(const Integer&) const = default;
};

/// A rule variable. `index` is the variable's slot in the owning rule's
/// substitution (position of first occurrence).
struct Variable {
    std::string name;
    std::size_t index = 0;
    bool operator==(const Variable&) const = default;
};

struct Arithmetic {
    ArithOp op = ArithOp::add;
    std::shared_ptr<const Term> lhs;
    std::shared_ptr<const Term> rhs;
    bool operator==(const Arithmetic& other) const;
};

struct Term {
    std::variant<Constant, Integer, Variable, Arithmetic> node;

    static Term constant(std::string name);
    static Term integer(std::int64_t value);
    static Term variable(std::string name, std::size_t index = 0);
    static Term arithmetic(ArithOp op, Term lhs, Term rhs);

    bool is_ground() const;
    bool is_variable() const { return std::holds_alternative<Variable>(node); }
    bool is_arithmetic() const { return std::holds_alternative<Arithmetic>(node); }

    bool operator==(const Term&) const = default;
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    std::size_t arity() const { return args.size(); }
    bool is_ground() const;

    bool operator==(const Atom&) const = default;
};

/// A predicate literal, possibly under default negation.
struct AtomLiteral {
    Atom atom;
    bool negated = false;

    bool operator==(const AtomLiteral&) const = default;
};

struct Comparison {
    CompareOp op = CompareOp::eq;
    Term lhs;
    Term rhs;

    bool operator==(const Comparison&) const = default;
};

using Literal = std::variant<AtomLiteral, Comparison>;

/// A normal rule, integrity constraint (no head) or fact (ground head, empty
/// body). `variables` lists variable names by slot index.
struct Rule {
    std::optional<Atom> head;
    std::vector<Literal> body;
    std::vector<std::string> variables;

    bool is_constraint() const { return !head.has_value(); }
    bool is_fact() const { return head && body.empty() && head->is_ground(); }
    /// True when no positive predicate literal occurs in the body.
    bool has_positive_body() const;

    bool operator==(const Rule&) const = default;
};

struct PredicateInfo {
    std::string name;
    std::size_t arity = 0;
};

/// The fixed rule set of a session. Predicates are keyed by name; each name
/// has exactly one arity. Input predicates are those never used in a head.
class NonGroundProgram {
public:
    NonGroundProgram() = default;
    /// Throws InputError on an arity clash.
    explicit NonGroundProgram(std::vector<Rule> rules);

    const std::vector<Rule>& rules() const { return rules_; }
    /// Predicates in order of first use.
    const std::vector<PredicateInfo>& predicates() const { return predicates_; }
    std::optional<std::size_t> arity_of(std::string_view name) const;
    bool is_input(std::string_view name) const;
    bool is_known(std::string_view name) const { return arity_of(name).has_value(); }
    std::set<std::string> input_predicates() const;

    bool operator==(const NonGroundProgram& other) const { return rules_ == other.rules_; }

private:
    std::vector<Rule> rules_;
    std::vector<PredicateInfo> predicates_;
    std::map<std::string, std::size_t, std::less<>> predicate_index_;
    std::vector<bool> is_head_;
};

std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(const Literal& literal);
std::string to_string(const Rule& rule);
/// Canonical text: one rule per line.
std::string to_string(const NonGroundProgram& program);

// ---------------------------------------------------------------------------
// Ground atoms and programs
// ---------------------------------------------------------------------------

struct GroundAtom {
    std::string predicate;
    std::vector<Value> args;

    auto operator<=>(const GroundAtom&) const = default;
    bool operator==(const GroundAtom&) const = default;
};

struct GroundAtomHash {
    std::size_t operator()(const GroundAtom& atom) const noexcept;
};

std::string to_string(const GroundAtom& atom);

/// One shot's input: a set of ground atoms.
using FactSet = std::set<GroundAtom>;

struct GroundAtomId {
    std::uint32_t value = 0;

    auto operator<=>(const GroundAtomId&) const = default;
    bool operator==(const GroundAtomId&) const = default;
};

struct GroundRule {
    std::optional<GroundAtomId> head;
    std::vector<GroundAtomId> positive;
    std::vector<GroundAtomId> negative;

    bool is_constraint() const { return !head.has_value(); }
    /// Sorts and deduplicates both bodies.
    void canonicalize();

    bool operator==(const GroundRule&) const = default;
};

struct GroundRuleHash {
    std::size_t operator()(const GroundRule& rule) const noexcept;
};

struct GroundProgram {
    std::vector<GroundRule> rules;
    std::vector<GroundAtomId> facts;

    /// Every atom id mentioned anywhere, ascending.
    std::vector<GroundAtomId> atoms() const;
};

/// True atoms of a model, ascending by id.
struct AnswerSet {
    std::vector<GroundAtomId> atoms;

    bool contains(GroundAtomId id) const;

    auto operator<=>(const AnswerSet&) const = default;
    bool operator==(const AnswerSet&) const = default;
};

// ---------------------------------------------------------------------------
// Substitutions, matching and evaluation
// ---------------------------------------------------------------------------

/// Variable slots of one rule mapped to ground values.
class Substitution {
public:
    Substitution() = default;
    explicit Substitution(std::size_t slots) : slots_(slots) {}

    const Value* get(std::size_t slot) const;
    bool is_bound(std::size_t slot) const { return get(slot) != nullptr; }
    void bind(std::size_t slot, Value value);
    void unbind(std::size_t slot);
    std::size_t bound_count() const;

    bool operator==(const Substitution&) const = default;

private:
    std::vector<std::optional<Value>> slots_;
};

/// One-sided unification of `pattern` against a ground candidate.
std::optional<Substitution> match(const Atom& pattern, const GroundAtom& candidate,
                                  const Substitution& subst);

/// In-place variant used by the grounder's join loop. Slots bound here are
/// appended to `trail`; on failure the substitution is restored.
bool match_in_place(const Atom& pattern, const GroundAtom& candidate, Substitution& subst,
                    std::vector<std::size_t>& trail);

/// Evaluates a term to a value; arithmetic uses checked 64-bit integers.
Value evaluate(const Term& term, const Substitution& subst);
bool compare_values(CompareOp op, const Value& lhs, const Value& rhs);
bool eval_comparison(const Comparison& cmp, const Substitution& subst);

GroundAtom ground(const Atom& atom, const Substitution& subst);
/// Converts an atom without variables; throws ContractViolation otherwise.
GroundAtom to_ground_atom(const Atom& atom);

} // namespace overground

template <>
struct std::hash<overground::GroundAtomId> {
    std::size_t operator()(overground::GroundAtomId id) const noexcept { return id.value; }
};

#endif
