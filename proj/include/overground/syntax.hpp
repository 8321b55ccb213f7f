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

#ifndef OVERGROUND_SYNTAX_HPP
#define OVERGROUND_SYNTAX_HPP

#include "overground/error.hpp"
#include "overground/model.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace overground {

enum class TokenKind {
    identifier,
    variable,
    integer,
    punctuation,
    comparison_operator,
    arithmetic_operator,
    directive,
};

struct Token {
    TokenKind kind = TokenKind::punctuation;
    std::string lexeme;
    std::size_t line = 1;
    std::size_t column = 1;
    /// Parsed value of integer tokens.
    std::int64_t value = 0;
};

enum class Severity { error, warning };

struct ParseDiagnostic {
    Severity severity = Severity::error;
    std::string message;
    std::size_t line = 1;
    std::size_t column = 1;
};

/// `line:column: error: message`
std::string to_string(const ParseDiagnostic& diagnostic);

class ParseError : public Error {
public:
    explicit ParseError(std::vector<ParseDiagnostic> diagnostics);

    const std::vector<ParseDiagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::vector<ParseDiagnostic> diagnostics_;
};

/// Splits program text into tokens. `%` comments run to end of line.
/// Throws ParseError on an illegal character or an out-of-range integer.
std::vector<Token> tokenize(std::string_view text);

/// Parses rules: facts `h.`, normal rules `h :- l1, ..., ln.` and
/// constraints `:- l1, ..., ln.`. Every accepted rule is safe. All
/// statement-level errors are collected before ParseError is thrown.
NonGroundProgram parse_program(std::string_view text);

/// Parses a shot: ground facts only, duplicates collapsed.
FactSet parse_facts(std::string_view text);

/// Parses one ground atom in canonical form, e.g. `edge(1,2)`.
GroundAtom parse_ground_atom(std::string_view text);

} // namespace overground

#endif
