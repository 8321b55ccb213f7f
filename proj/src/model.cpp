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

#include "overground/model.hpp"

#include "overground/error.hpp"

#include <algorithm>
#include <sstream>

namespace overground {

namespace {

void hash_combine(std::size_t& seed, std::size_t value) {
    seed ^= value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::int64_t checked(ArithOp op, std::int64_t lhs, std::int64_t rhs) {
    std::int64_t result = 0;
    bool overflow = false;
    switch (op) {
    case ArithOp::add: overflow = __builtin_add_overflow(lhs, rhs, &result); break;
    case ArithOp::sub: overflow = __builtin_sub_overflow(lhs, rhs, &result); break;
    case ArithOp::mul: overflow = __builtin_mul_overflow(lhs, rhs, &result); break;
    case ArithOp::div:
        if (rhs == 0)
            throw GroundingError("division by zero");
        if (lhs == INT64_MIN && rhs == -1)
            overflow = true;
        else
            result = lhs / rhs;
        break;
    }
    if (overflow)
        throw GroundingError("integer overflow in arithmetic");
    return result;
}

std::string operand_to_string(const Term& term) {
    if (term.is_arithmetic())
        return "(" + to_string(term) + ")";
    return to_string(term);
}

} // namespace

std::string to_string(const Value& value) {
    if (const auto* number = std::get_if<std::int64_t>(&value))
        return std::to_string(*number);
    return std::get<std::string>(value);
}

std::string_view to_string(ArithOp op) {
    switch (op) {
    case ArithOp::add: return "+";
    case ArithOp::sub: return "-";
    case ArithOp::mul: return "*";
    case ArithOp::div: return "/";
    }
    return "?";
}

std::string_view to_string(CompareOp op) {
    switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
    }
    return "?";
}

bool Arithmetic::operator==(const Arithmetic& other) const {
    return op == other.op && *lhs == *other.lhs && *rhs == *other.rhs;
}

Term Term::constant(std::string name) { return Term{Constant{std::move(name)}}; }
Term Term::integer(std::int64_t value) { return Term{Integer{value}}; }
Term Term::variable(std::string name, std::size_t index) {
    return Term{Variable{std::move(name), index}};
}
Term Term::arithmetic(ArithOp op, Term lhs, Term rhs) {
    return Term{Arithmetic{op, std::make_shared<const Term>(std::move(lhs)),
                           std::make_shared<const Term>(std::move(rhs))}};
}

bool Term::is_ground() const {
    return std::visit(overloaded{
                          [](const Variable&) { return false; },
                          [](const Arithmetic& a) { return a.lhs->is_ground() && a.rhs->is_ground(); },
                          [](const auto&) { return true; },
                      },
                      node);
}

bool Atom::is_ground() const {
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

bool Rule::has_positive_body() const {
    return std::any_of(body.begin(), body.end(), [](const Literal& l) {
        const auto* atom = std::get_if<AtomLiteral>(&l);
        return atom && !atom->negated;
    });
}

NonGroundProgram::NonGroundProgram(std::vector<Rule> rules) : rules_(std::move(rules)) {
    auto declare = [this](const Atom& atom, bool in_head) {
        auto it = predicate_index_.find(atom.predicate);
        if (it == predicate_index_.end()) {
            predicate_index_.emplace(atom.predicate, predicates_.size());
            predicates_.push_back({atom.predicate, atom.arity()});
            is_head_.push_back(in_head);
            return;
        }
        const auto& info = predicates_[it->second];
        if (info.arity != atom.arity()) {
            throw InputError("predicate " + atom.predicate + " used with arity " +
                             std::to_string(atom.arity()) + ", previously with arity " +
                             std::to_string(info.arity));
        }
        if (in_head)
            is_head_[it->second] = true;
    };
    for (const auto& rule : rules_) {
        if (rule.head)
            declare(*rule.head, true);
        for (const auto& literal : rule.body)
            if (const auto* atom = std::get_if<AtomLiteral>(&literal))
                declare(atom->atom, false);
    }
}

std::optional<std::size_t> NonGroundProgram::arity_of(std::string_view name) const {
    auto it = predicate_index_.find(name);
    if (it == predicate_index_.end())
        return std::nullopt;
    return predicates_[it->second].arity;
}

bool NonGroundProgram::is_input(std::string_view name) const {
    auto it = predicate_index_.find(name);
    return it != predicate_index_.end() && !is_head_[it->second];
}

std::set<std::string> NonGroundProgram::input_predicates() const {
    std::set<std::string> result;
    for (std::size_t i = 0; i < predicates_.size(); ++i)
        if (!is_head_[i])
            result.insert(predicates_[i].name);
    return result;
}

std::string to_string(const Term& term) {
    return std::visit(overloaded{
                          [](const Constant& c) { return c.name; },
                          [](const Integer& i) { return std::to_string(i.value); },
                          [](const Variable& v) { return v.name; },
                          [](const Arithmetic& a) {
                              return operand_to_string(*a.lhs) + std::string(to_string(a.op)) +
                                     operand_to_string(*a.rhs);
                          },
                      },
                      term.node);
}

std::string to_string(const Atom& atom) {
    std::string out = atom.predicate;
    if (atom.args.empty())
        return out;
    out += '(';
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (i)
            out += ',';
        out += to_string(atom.args[i]);
    }
    out += ')';
    return out;
}

std::string to_string(const Literal& literal) {
    if (const auto* atom = std::get_if<AtomLiteral>(&literal))
        return (atom->negated ? "not " : "") + to_string(atom->atom);
    const auto& cmp = std::get<Comparison>(literal);
    return to_string(cmp.lhs) + " " + std::string(to_string(cmp.op)) + " " + to_string(cmp.rhs);
}

std::string to_string(const Rule& rule) {
    std::string out;
    if (rule.head)
        out = to_string(*rule.head);
    if (!rule.body.empty()) {
        out += rule.head ? " :- " : ":- ";
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (i)
                out += ", ";
            out += to_string(rule.body[i]);
        }
    }
    out += '.';
    return out;
}

std::string to_string(const NonGroundProgram& program) {
    std::string out;
    for (const auto& rule : program.rules()) {
        out += to_string(rule);
        out += '\n';
    }
    return out;
}

std::size_t GroundAtomHash::operator()(const GroundAtom& atom) const noexcept {
    std::size_t seed = std::hash<std::string>{}(atom.predicate);
    for (const auto& arg : atom.args)
        hash_combine(seed, std::hash<Value>{}(arg));
    return seed;
}

std::string to_string(const GroundAtom& atom) {
    std::string out = atom.predicate;
    if (atom.args.empty())
        return out;
    out += '(';
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (i)
            out += ',';
        out += to_string(atom.args[i]);
    }
    out += ')';
    return out;
}

void GroundRule::canonicalize() {
    for (auto* body : {&positive, &negative}) {
        std::sort(body->begin(), body->end());
        body->erase(std::unique(body->begin(), body->end()), body->end());
    }
}

std::size_t GroundRuleHash::operator()(const GroundRule& rule) const noexcept {
    std::size_t seed = rule.head ? rule.head->value : 0;
    for (auto id : rule.positive)
        hash_combine(seed, id.value);
    hash_combine(seed, 0x51ed27);
    for (auto id : rule.negative)
        hash_combine(seed, id.value);
    return seed;
}

std::vector<GroundAtomId> GroundProgram::atoms() const {
    std::vector<GroundAtomId> out(facts.begin(), facts.end());
    for (const auto& rule : rules) {
        if (rule.head)
            out.push_back(*rule.head);
        out.insert(out.end(), rule.positive.begin(), rule.positive.end());
        out.insert(out.end(), rule.negative.begin(), rule.negative.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool AnswerSet::contains(GroundAtomId id) const {
    return std::binary_search(atoms.begin(), atoms.end(), id);
}

const Value* Substitution::get(std::size_t slot) const {
    if (slot >= slots_.size() || !slots_[slot])
        return nullptr;
    return &*slots_[slot];
}

void Substitution::bind(std::size_t slot, Value value) {
    if (slot >= slots_.size())
        slots_.resize(slot + 1);
    slots_[slot] = std::move(value);
}

void Substitution::unbind(std::size_t slot) {
    if (slot < slots_.size())
        slots_[slot].reset();
}

std::size_t Substitution::bound_count() const {
    return static_cast<std::size_t>(
        std::count_if(slots_.begin(), slots_.end(), [](const auto& s) { return s.has_value(); }));
}

bool match_in_place(const Atom& pattern, const GroundAtom& candidate, Substitution& subst,
                    std::vector<std::size_t>& trail) {
    if (pattern.predicate != candidate.predicate || pattern.args.size() != candidate.args.size())
        return false;
    const std::size_t mark = trail.size();
    auto rollback = [&] {
        while (trail.size() > mark) {
            subst.unbind(trail.back());
            trail.pop_back();
        }
        return false;
    };
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        const Value& target = candidate.args[i];
        const Term& term = pattern.args[i];
        if (const auto* var = std::get_if<Variable>(&term.node)) {
            if (const Value* bound = subst.get(var->index)) {
                if (*bound != target)
                    return rollback();
            } else {
                subst.bind(var->index, target);
                trail.push_back(var->index);
            }
        } else if (evaluate(term, subst) != target) {
            return rollback();
        }
    }
    return true;
}

std::optional<Substitution> match(const Atom& pattern, const GroundAtom& candidate,
                                  const Substitution& subst) {
    Substitution extended = subst;
    std::vector<std::size_t> trail;
    if (!match_in_place(pattern, candidate, extended, trail))
        return std::nullopt;
    return extended;
}

Value evaluate(const Term& term, const Substitution& subst) {
    return std::visit(
        overloaded{
            [](const Constant& c) -> Value { return c.name; },
            [](const Integer& i) -> Value { return i.value; },
            [&](const Variable& v) -> Value {
                const Value* bound = subst.get(v.index);
                if (!bound)
                    throw ContractViolation("variable " + v.name + " is unbound");
                return *bound;
            },
            [&](const Arithmetic& a) -> Value {
                Value lhs = evaluate(*a.lhs, subst);
                Value rhs = evaluate(*a.rhs, subst);
                const auto* l = std::get_if<std::int64_t>(&lhs);
                const auto* r = std::get_if<std::int64_t>(&rhs);
                if (!l || !r)
                    throw GroundingError("arithmetic on non-integer term " + to_string(lhs) +
                                         std::string(to_string(a.op)) + to_string(rhs));
                return checked(a.op, *l, *r);
            },
        },
        term.node);
}

bool compare_values(CompareOp op, const Value& lhs, const Value& rhs) {
    switch (op) {
    case CompareOp::eq: return lhs == rhs;
    case CompareOp::ne: return lhs != rhs;
    case CompareOp::lt: return lhs < rhs;
    case CompareOp::le: return lhs <= rhs;
    case CompareOp::gt: return lhs > rhs;
    case CompareOp::ge: return lhs >= rhs;
    }
    return false;
}

bool eval_comparison(const Comparison& cmp, const Substitution& subst) {
    return compare_values(cmp.op, evaluate(cmp.lhs, subst), evaluate(cmp.rhs, subst));
}

GroundAtom ground(const Atom& atom, const Substitution& subst) {
    GroundAtom out{atom.predicate, {}};
    out.args.reserve(atom.args.size());
    for (const auto& arg : atom.args)
        out.args.push_back(evaluate(arg, subst));
    return out;
}

GroundAtom to_ground_atom(const Atom& atom) {
    if (!atom.is_ground())
        throw ContractViolation("atom " + to_string(atom) + " is not ground");
    return ground(atom, Substitution{});
}

} // namespace overground
