#pragma once

// Tokenizer shared by the text formats. Words are maximal runs of
// non-space characters outside the punctuation set; numbers are words.
// Comments: '#' and '//' to end of line, '/* ... */' blocks.

#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "delib/errors.hpp"

namespace delib::io {

enum class TokenKind { word, string, punct, end };

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;

    bool is(std::string_view s) const { return (kind == TokenKind::word || kind == TokenKind::punct) && text == s; }
};

inline constexpr std::string_view kPunctuation = "{}()[];,|=";

class Lexer {
public:
    explicit Lexer(std::string_view text) { tokenize(text); }

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    bool at_end() const { return peek().kind == TokenKind::end; }

    Token next() {
        Token t = peek();
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

    bool accept(std::string_view s) {
        if (!peek().is(s)) return false;
        next();
        return true;
    }

    Token expect(std::string_view s) {
        if (!peek().is(s)) fail(peek(), "expected '" + std::string(s) + "', found " + describe(peek()));
        return next();
    }

    // A bare word or a quoted string.
    Token expect_name(std::string_view what) {
        const Token& t = peek();
        if (t.kind != TokenKind::word && t.kind != TokenKind::string)
            fail(t, "expected " + std::string(what) + ", found " + describe(t));
        return next();
    }

    double expect_number(std::string_view what) {
        const Token& t = peek();
        double value = 0.0;
        if (t.kind != TokenKind::word || !parse_double(t.text, value))
            fail(t, "expected " + std::string(what) + ", found " + describe(t));
        next();
        return value;
    }

    bool peek_number() const {
        double ignored = 0.0;
        return peek().kind == TokenKind::word && parse_double(peek().text, ignored);
    }

    // Skip through the next ';' at the current nesting depth.
    void skip_statement() {
        while (!at_end() && !peek().is(";")) next();
        expect(";");
    }

    [[noreturn]] static void fail(const Token& at, const std::string& message) {
        throw ParseError(message, at.line, at.column);
    }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokenKind::end: return "end of input";
            case TokenKind::string: return "string \"" + t.text + "\"";
            default: return "'" + t.text + "'";
        }
    }

    static bool parse_double(std::string_view s, double& out) {
        if (s.empty()) return false;
        if (s.front() == '+') s.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    }

private:
    void tokenize(std::string_view text) {
        std::size_t line = 1, col = 1, i = 0;
        auto advance = [&](std::size_t n) {
            for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
                if (text[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
        };
        while (i < text.size()) {
            const char c = text[i];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance(1);
            } else if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
                while (i < text.size() && text[i] != '\n') advance(1);
            } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
                const std::size_t l0 = line, c0 = col;
                advance(2);
                while (i < text.size() && !(text[i] == '*' && i + 1 < text.size() && text[i + 1] == '/')) advance(1);
                if (i >= text.size()) throw ParseError("unterminated comment", l0, c0);
                advance(2);
            } else if (c == '"') {
                Token t{TokenKind::string, {}, line, col};
                advance(1);
                for (;;) {
                    if (i >= text.size() || text[i] == '\n') throw ParseError("unterminated string", t.line, t.column);
                    if (text[i] == '"') break;
                    if (text[i] == '\\' && i + 1 < text.size()) {
                        advance(1);
                        const char e = text[i];
                        t.text.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
                    } else {
                        t.text.push_back(text[i]);
                    }
                    advance(1);
                }
                advance(1);
                tokens_.push_back(std::move(t));
            } else if (kPunctuation.find(c) != std::string_view::npos) {
                tokens_.push_back({TokenKind::punct, std::string(1, c), line, col});
                advance(1);
            } else {
                Token t{TokenKind::word, {}, line, col};
                while (i < text.size()) {
                    const char d = text[i];
                    if (d == ' ' || d == '\t' || d == '\r' || d == '\n' || d == '"' ||
                        kPunctuation.find(d) != std::string_view::npos)
                        break;
                    if (d == '/' && i + 1 < text.size() && (text[i + 1] == '/' || text[i + 1] == '*')) break;
                    t.text.push_back(d);
                    advance(1);
                }
                tokens_.push_back(std::move(t));
            }
        }
        tokens_.push_back({TokenKind::end, {}, line, col});
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// Shortest decimal text that reads back to the same double.
inline std::string format_exact(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

inline bool is_bare_word(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.' || c == '+' || c == '<' || c == '>';
        if (!ok) return false;
    }
    return true;
}

inline std::string quote_if_needed(std::string_view s) {
    if (is_bare_word(s)) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace delib::io
