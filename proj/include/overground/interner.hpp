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

#ifndef OVERGROUND_INTERNER_HPP
#define OVERGROUND_INTERNER_HPP

#include "overground/model.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace overground {

/// Maps ground atoms to dense ids 1, 2, ... in first-interned order.
/// Single writer; const access may be shared.
class Interner {
public:
    GroundAtomId intern(const GroundAtom& atom);
    /// Throws ContractViolation if `atom` has variables.
    GroundAtomId intern(const Atom& atom);

    std::optional<GroundAtomId> find(const GroundAtom& atom) const;
    /// Throws ContractViolation for an id this interner never issued.
    const GroundAtom& lookup(GroundAtomId id) const;
    bool contains(GroundAtomId id) const { return id.value >= 1 && id.value <= atoms_.size(); }
    std::size_t size() const { return atoms_.size(); }

    std::string render(GroundAtomId id) const { return to_string(lookup(id)); }

private:
    std::vector<GroundAtom> atoms_;
    std::unordered_map<GroundAtom, std::uint32_t, GroundAtomHash> ids_;
};

/// `h :- p1, not n1.` with atoms printed canonically and each body part
/// sorted by printed form, so rules from different sessions compare as text.
std::string render_rule(const GroundRule& rule, const Interner& interner);

/// Sorted printed atoms of an answer set.
std::vector<std::string> render_atoms(const AnswerSet& answer_set, const Interner& interner);

/// `{a1, a2, ...}` with atoms sorted by printed form.
std::string render_answer_set(const AnswerSet& answer_set, const Interner& interner);

} // namespace overground

#endif
