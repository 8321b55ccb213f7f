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

#include "overground/syntax.hpp"

#include <cctype>
#include <map>
#include <set>

namespace overground {

std::string to_string(const ParseDiagnostic& diagnostic) {
    return std::to_string(diagnostic.line) + ":" + std::to_string(diagnostic.column) + ": " +
           (diagnostic.severity == Severity::error ? "error: " : "warning: ") + diagnostic.message;
}

namespace {

std::string summarize(const std::vector<ParseDiagnostic>& diagnostics) {
    if (diagnostics.empty())
        return "parse error";
    std::string out = to_string(diagnostics.front());
    if (diagnostics.size() > 1)
        out += " (and " + std::to_string(diagnostics.size() - 1) + " more)";
    return out;
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                advance();
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
                continue;
            }
            tokens.push_back(next_token());
        }
        return tokens;
    }

private:
    Token next_token() {
        Token token;
        token.line = line_;
        token.column = column_;
        const std::size_t start = pos_;
        char c = text_[pos_];
        auto take = [&](TokenKind kind, std::size_t length) {
            for (std::size_t i = 0; i < length; ++i)
                advance();
            token.kind = kind;
            token.lexeme = std::string(text_.substr(start, length));
            return token;
        };
        auto next_is = [&](char expected) {
            return pos_ + 1 < text_.size() && text_[pos_ + 1] == expected;
        };

        if (std::islower(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c)) ||
            c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() && is_ident_char(text_[end]))
                ++end;
            return take(std::islower(static_cast<unsigned char>(c)) ? TokenKind::identifier
                                                                    : TokenKind::variable,
                        end - pos_);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            std::int64_t value = 0;
            bool overflow = false;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) {
                int digit = text_[end] - '0';
                if (__builtin_mul_overflow(value, std::int64_t{10}, &value) ||
                    __builtin_add_overflow(value, std::int64_t{digit}, &value))
                    overflow = true;
                ++end;
            }
            if (overflow)
                fail(token, "integer out of range");
            take(TokenKind::integer, end - pos_);
            token.value = value;
            return token;
        }
        switch (c) {
        case '(':
        case ')':
        case ',':
        case '.':
            return take(TokenKind::punctuation, 1);
        case ':':
            if (next_is('-'))
                return take(TokenKind::punctuation, 2);
            break;
        case '=':
            return take(TokenKind::comparison_operator, 1);
        case '!':
            if (next_is('='))
                return take(TokenKind::comparison_operator, 2);
            break;
        case '<':
        case '>':
            return take(TokenKind::comparison_operator, next_is('=') ? 2 : 1);
        case '+':
        case '-':
        case '*':
        case '/':
            return take(TokenKind::arithmetic_operator, 1);
        case '#': {
            std::size_t end = pos_ + 1;
            while (end < text_.size() && is_ident_char(text_[end]))
                ++end;
            if (end > pos_ + 1 && std::islower(static_cast<unsigned char>(text_[pos_ + 1])))
                return take(TokenKind::directive, end - pos_);
            break;
        }
        default:
            break;
        }
        std::string shown = std::isprint(static_cast<unsigned char>(c))
                                ? std::string(1, c)
                                : "\\x" + std::to_string(static_cast<unsigned char>(c));
        fail(token, "illegal character '" + shown + "'");
    }

    [[noreturn]] void fail(const Token& at, std::string message) {
        throw ParseError({{Severity::error, std::move(message), at.line, at.column}});
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

struct StatementFailure {
    ParseDiagnostic diagnostic;
};

enum class Mode { program, facts };

// Per-rule bookkeeping for variable slots and the safety check.
struct VariableScope {
    struct Occurrence {
        std::string name;
        std::size_t line;
        std::size_t column;
    };

    std::map<std::string, std::size_t> slots;
    std::vector<std::string> names;
    std::vector<Occurrence> occurrences;
    std::set<std::string> positively_bound;

    std::size_t slot(const std::string& name) {
        auto [it, inserted] = slots.try_emplace(name, names.size());
        if (inserted)
            names.push_back(name);
        return it->second;
    }
};

class Parser {
public:
    Parser(std::vector<Token> tokens, Mode mode) : tokens_(std::move(tokens)), mode_(mode) {
        // Errors at end of input point at the last token, which lies inside the text.
        if (!tokens_.empty())
            eof_ = tokens_.back();
        eof_.kind = TokenKind::directive;
        eof_.lexeme = "end of input";
    }

    std::vector<Rule> parse() {
        std::vector<Rule> rules;
        while (!at_end()) {
            std::size_t start = pos_;
            try {
                rules.push_back(statement());
            } catch (const StatementFailure& failure) {
                diagnostics_.push_back(failure.diagnostic);
                recover(start);
            }
        }
        if (!diagnostics_.empty())
            throw ParseError(diagnostics_);
        return rules;
    }

private:
    Rule statement() {
        VariableScope scope;
        scope_ = &scope;
        Rule rule;
        const Token& first = peek();
        if (is_punct(":-")) {
            if (mode_ == Mode::facts)
                fail(first, "shots contain facts only");
            advance();
            rule.body = body();
        } else {
            if (peek().kind == TokenKind::directive)
                fail(peek(), "unsupported directive " + peek().lexeme);
            rule.head = atom(false);
            if (is_punct(":-")) {
                if (mode_ == Mode::facts)
                    fail(peek(), "shots contain facts only");
                advance();
                rule.body = body();
            }
        }
        expect(".");
        check_safety(scope);
        rule.variables = scope.names;
        scope_ = nullptr;
        return rule;
    }

    std::vector<Literal> body() {
        std::vector<Literal> literals;
        literals.push_back(literal());
        while (is_punct(",")) {
            advance();
            literals.push_back(literal());
        }
        return literals;
    }

    Literal literal() {
        const Token& token = peek();
        if (token.kind == TokenKind::identifier && token.lexeme == "not") {
            advance();
            return AtomLiteral{atom(false), true};
        }
        if (token.kind == TokenKind::identifier) {
            const Token* following = peek_at(1);
            bool comparison_follows = following && (following->kind == TokenKind::comparison_operator ||
                                                    following->kind == TokenKind::arithmetic_operator);
            if (!comparison_follows)
                return AtomLiteral{atom(true), false};
        }
        Term lhs = expression();
        const Token& op_token = peek();
        if (op_token.kind != TokenKind::comparison_operator)
            fail(op_token, "expected comparison operator, found '" + op_token.lexeme + "'");
        advance();
        Term rhs = expression();
        return Comparison{comparison_op(op_token.lexeme), std::move(lhs), std::move(rhs)};
    }

    Atom atom(bool positive_body) {
        const Token& name = peek();
        if (name.kind != TokenKind::identifier || name.lexeme == "not")
            fail(name, "expected atom, found '" + name.lexeme + "'");
        advance();
        Atom result{name.lexeme, {}};
        if (is_punct("(")) {
            advance();
            result.args.push_back(argument(positive_body));
            while (is_punct(",")) {
                advance();
                result.args.push_back(argument(positive_body));
            }
            expect(")");
        }
        check_arity(result, name);
        return result;
    }

    Term argument(bool positive_body) {
        Term term = simple_term(positive_body);
        if (peek().kind == TokenKind::arithmetic_operator)
            fail(peek(), "arithmetic is only allowed in comparisons");
        return term;
    }

    Term simple_term(bool positive_body) {
        const Token& token = peek();
        switch (token.kind) {
        case TokenKind::identifier:
            advance();
            return Term::constant(token.lexeme);
        case TokenKind::integer:
            advance();
            return Term::integer(token.value);
        case TokenKind::variable:
            return variable(positive_body);
        case TokenKind::arithmetic_operator:
            if (token.lexeme == "-") {
                const Token* next = peek_at(1);
                if (next && next->kind == TokenKind::integer) {
                    advance();
                    advance();
                    return Term::integer(-next->value);
                }
            }
            fail(token, "arithmetic is only allowed in comparisons");
        default:
            fail(token, "expected term, found '" + token.lexeme + "'");
        }
    }

    Term variable(bool positive_body) {
        const Token& token = peek();
        if (token.lexeme == "_")
            fail(token, "anonymous variable not allowed");
        if (mode_ == Mode::facts)
            fail(token, "variable in fact");
        advance();
        scope_->occurrences.push_back({token.lexeme, token.line, token.column});
        if (positive_body)
            scope_->positively_bound.insert(token.lexeme);
        return Term::variable(token.lexeme, scope_->slot(token.lexeme));
    }

    // expression := product {(+|-) product}
    Term expression() {
        Term lhs = product();
        while (peek_arith("+") || peek_arith("-")) {
            ArithOp op = peek().lexeme == "+" ? ArithOp::add : ArithOp::sub;
            advance();
            lhs = Term::arithmetic(op, std::move(lhs), product());
        }
        return lhs;
    }

    Term product() {
        Term lhs = unary();
        while (peek_arith("*") || peek_arith("/")) {
            ArithOp op = peek().lexeme == "*" ? ArithOp::mul : ArithOp::div;
            advance();
            lhs = Term::arithmetic(op, std::move(lhs), unary());
        }
        return lhs;
    }

    Term unary() {
        if (peek_arith("-")) {
            advance();
            if (peek().kind == TokenKind::integer) {
                std::int64_t value = peek().value;
                advance();
                return Term::integer(-value);
            }
            return Term::arithmetic(ArithOp::sub, Term::integer(0), unary());
        }
        return primary();
    }

    Term primary() {
        const Token& token = peek();
        switch (token.kind) {
        case TokenKind::integer:
            advance();
            return Term::integer(token.value);
        case TokenKind::identifier:
            advance();
            return Term::constant(token.lexeme);
        case TokenKind::variable:
            return variable(false);
        case TokenKind::punctuation:
            if (token.lexeme == "(") {
                advance();
                Term inner = expression();
                expect(")");
                return inner;
            }
            [[fallthrough]];
        default:
            fail(token, "expected term, found '" + token.lexeme + "'");
        }
    }

    static CompareOp comparison_op(const std::string& lexeme) {
        if (lexeme == "=")
            return CompareOp::eq;
        if (lexeme == "!=")
            return CompareOp::ne;
        if (lexeme == "<")
            return CompareOp::lt;
        if (lexeme == "<=")
            return CompareOp::le;
        if (lexeme == ">")
            return CompareOp::gt;
        return CompareOp::ge;
    }

    void check_safety(const VariableScope& scope) {
        for (const auto& occ : scope.occurrences)
            if (!scope.positively_bound.count(occ.name))
                throw StatementFailure{{Severity::error, "unsafe variable " + occ.name, occ.line, occ.column}};
    }

    void check_arity(const Atom& atom, const Token& at) {
        auto [it, inserted] = arities_.try_emplace(atom.predicate, atom.arity());
        if (!inserted && it->second != atom.arity())
            fail(at, "predicate " + atom.predicate + " used with arity " + std::to_string(atom.arity()) +
                         ", previously with arity " + std::to_string(it->second));
    }

    // Skip to just past the next '.', always consuming at least one token.
    void recover(std::size_t start) {
        if (pos_ == start)
            ++pos_;
        if (pos_ > start && tokens_[pos_ - 1].lexeme == "." &&
            tokens_[pos_ - 1].kind == TokenKind::punctuation)
            return;
        while (!at_end()) {
            bool stop = is_punct(".");
            ++pos_;
            if (stop)
                return;
        }
    }

    void expect(std::string_view lexeme) {
        if (!is_punct(lexeme))
            fail(peek(), "expected '" + std::string(lexeme) + "', found '" + peek().lexeme + "'");
        advance();
    }

    [[noreturn]] void fail(const Token& at, std::string message) {
        throw StatementFailure{{Severity::error, std::move(message), at.line, at.column}};
    }

    bool at_end() const { return pos_ >= tokens_.size(); }

    const Token& peek() const { return at_end() ? eof_ : tokens_[pos_]; }

    const Token* peek_at(std::size_t offset) const {
        return pos_ + offset < tokens_.size() ? &tokens_[pos_ + offset] : nullptr;
    }

    bool is_punct(std::string_view lexeme) const {
        return !at_end() && tokens_[pos_].kind == TokenKind::punctuation && tokens_[pos_].lexeme == lexeme;
    }

    bool peek_arith(std::string_view lexeme) const {
        return !at_end() && tokens_[pos_].kind == TokenKind::arithmetic_operator &&
               tokens_[pos_].lexeme == lexeme;
    }

    void advance() {
        if (!at_end())
            ++pos_;
    }

    std::vector<Token> tokens_;
    Mode mode_;
    std::size_t pos_ = 0;
    VariableScope* scope_ = nullptr;
    std::map<std::string, std::size_t> arities_;
    std::vector<ParseDiagnostic> diagnostics_;
    Token eof_;
};

} // namespace

ParseError::ParseError(std::vector<ParseDiagnostic> diagnostics)
    : Error(ErrorKind::input, summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

NonGroundProgram parse_program(std::string_view text) {
    return NonGroundProgram(Parser(tokenize(text), Mode::program).parse());
}

FactSet parse_facts(std::string_view text) {
    FactSet facts;
    for (const auto& rule : Parser(tokenize(text), Mode::facts).parse())
        facts.insert(to_ground_atom(*rule.head));
    return facts;
}

GroundAtom parse_ground_atom(std::string_view text) {
    FactSet facts = parse_facts(std::string(text) + ".");
    if (facts.size() != 1)
        throw ParseError({{Severity::error, "expected exactly one atom", 1, 1}});
    return *facts.begin();
}

} // namespace overground
