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

#ifndef OVERGROUND_TESTS_HELPERS_HPP
#define OVERGROUND_TESTS_HELPERS_HPP

#include "oracle.hpp"

#include "overground/interner.hpp"
#include "overground/model.hpp"
#include "overground/syntax.hpp"

#include <set>
#include <string>
#include <vector>

namespace overground::testing {

inline Model model_of(const AnswerSet& answer_set, const Interner& interner) {
    auto atoms = render_atoms(answer_set, interner);
    return Model(atoms.begin(), atoms.end());
}

inline std::set<Model> models_of(const std::vector<AnswerSet>& answer_sets, const Interner& interner) {
    std::set<Model> out;
    for (const auto& a : answer_sets)
        out.insert(model_of(a, interner));
    return out;
}

inline std::set<std::string> rule_texts(const std::vector<GroundRule>& rules, const Interner& interner) {
    std::set<std::string> out;
    for (const auto& r : rules)
        out.insert(render_rule(r, interner));
    return out;
}

inline std::set<std::string> atom_texts(const std::vector<GroundAtomId>& ids, const Interner& interner) {
    std::set<std::string> out;
    for (auto id : ids)
        out.insert(interner.render(id));
    return out;
}

inline FactSet facts(const char* text) { return parse_facts(text); }

} // namespace overground::testing

#endif
