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

#include "overground/interner.hpp"

#include "overground/error.hpp"

#include <algorithm>

namespace overground {

GroundAtomId Interner::intern(const GroundAtom& atom) {
    auto [it, inserted] = ids_.try_emplace(atom, static_cast<std::uint32_t>(atoms_.size() + 1));
    if (inserted)
        atoms_.push_back(atom);
    return GroundAtomId{it->second};
}

GroundAtomId Interner::intern(const Atom& atom) { return intern(to_ground_atom(atom)); }

std::optional<GroundAtomId> Interner::find(const GroundAtom& atom) const {
    auto it = ids_.find(atom);
    if (it == ids_.end())
        return std::nullopt;
    return GroundAtomId{it->second};
}

const GroundAtom& Interner::lookup(GroundAtomId id) const {
    if (!contains(id))
        throw ContractViolation("unknown atom id " + std::to_string(id.value));
    return atoms_[id.value - 1];
}

namespace {

std::vector<std::string> render_sorted(const std::vector<GroundAtomId>& ids, const Interner& interner) {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (auto id : ids)
        out.push_back(interner.render(id));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::string render_rule(const GroundRule& rule, const Interner& interner) {
    std::string out = rule.head ? interner.render(*rule.head) : std::string();
    auto positive = render_sorted(rule.positive, interner);
    auto negative = render_sorted(rule.negative, interner);
    if (!positive.empty() || !negative.empty()) {
        out += rule.head ? " :- " : ":- ";
        bool first = true;
        for (const auto& p : positive) {
            out += first ? "" : ", ";
            out += p;
            first = false;
        }
        for (const auto& n : negative) {
            out += first ? "not " : ", not ";
            out += n;
            first = false;
        }
    }
    out += '.';
    return out;
}

std::vector<std::string> render_atoms(const AnswerSet& answer_set, const Interner& interner) {
    return render_sorted(answer_set.atoms, interner);
}

std::string render_answer_set(const AnswerSet& answer_set, const Interner& interner) {
    std::string out = "{";
    bool first = true;
    for (const auto& atom : render_atoms(answer_set, interner)) {
        if (!first)
            out += ", ";
        out += atom;
        first = false;
    }
    out += '}';
    return out;
}

} // namespace overground
