#include "polydyn/parser.hpp"

#include <cctype>
#include <optional>

#include "polydyn/errors.hpp"

namespace polydyn {

namespace {

constexpr unsigned kMaxExponent = 4096;

enum class Tok { Number, ImagUnit, Var, Plus, Minus, Star, Caret, LParen, RParen, Comma, Newline, End };

struct Token {
    Tok kind = Tok::End;
    SourceSpan span;
    mpq_class number;
    bool integral = true;
    std::size_t var = 0; // 1-based
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        int depth = 0;
        while (true) {
            skip_blank();
            if (pos_ >= text_.size()) break;
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            if (c == '\n') {
                SourceSpan sp = here(1);
                advance();
                // A newline separates components only at top level after a
                // token that can end an expression.
                if (depth == 0 && !out.empty() && ends_operand(out.back().kind))
                    out.push_back(simple(Tok::Newline, sp));
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                out.push_back(number());
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(identifier());
                continue;
            }
            SourceSpan sp = here(1);
            advance();
            switch (c) {
            case '+': out.push_back(simple(Tok::Plus, sp)); break;
            case '-': out.push_back(simple(Tok::Minus, sp)); break;
            case '*': out.push_back(simple(Tok::Star, sp)); break;
            case '^': out.push_back(simple(Tok::Caret, sp)); break;
            case ',': out.push_back(simple(Tok::Comma, sp)); break;
            case '(':
                ++depth;
                out.push_back(simple(Tok::LParen, sp));
                break;
            case ')':
                --depth;
                out.push_back(simple(Tok::RParen, sp));
                break;
            default:
                throw ParseError(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'",
                                 sp.line, sp.column);
            }
        }
        Token end;
        end.kind = Tok::End;
        end.span = here(0);
        out.push_back(end);
        return out;
    }

  private:
    static bool ends_operand(Tok t) {
        return t == Tok::Number || t == Tok::ImagUnit || t == Tok::Var || t == Tok::RParen;
    }

    static Token simple(Tok kind, SourceSpan sp) {
        Token t;
        t.kind = kind;
        t.span = sp;
        return t;
    }

    SourceSpan here(std::size_t len) const { return {line_, col_, pos_, len}; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v')
                advance();
            else
                break;
        }
    }

    bool at_digit() const {
        return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
    }

    std::string digits() {
        std::string s;
        while (at_digit()) {
            s += text_[pos_];
            advance();
        }
        return s;
    }

    Token number() {
        Token t;
        t.kind = Tok::Number;
        t.span = here(0);
        std::string whole = digits();
        std::string frac;
        bool has_point = false;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            has_point = true;
            advance();
            frac = digits();
        }
        if (whole.empty() && frac.empty())
            throw ParseError(ErrorCode::SyntaxError, "malformed number", t.span.line, t.span.column);
        mpz_class mant(whole + frac, 10);
        long exp10 = -static_cast<long>(frac.size());
        if (pos_ + 1 < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            int save_col = col_;
            advance();
            int sign = 1;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                if (text_[pos_] == '-') sign = -1;
                advance();
            }
            std::string e = digits();
            if (e.empty()) {
                pos_ = save;
                col_ = save_col;
            } else {
                if (e.size() > 6)
                    throw ParseError(ErrorCode::SyntaxError, "decimal exponent too large", t.span.line,
                                     t.span.column);
                exp10 += sign * std::stol(e);
                has_point = true;
            }
        }
        mpq_class value(mant);
        mpz_class p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
        if (exp10 < 0)
            value /= p10;
        else
            value *= p10;
        value.canonicalize();
        bool has_slash = false;
        // Rational literal a/b; the slash binds to the literal only.
        if (pos_ < text_.size() && text_[pos_] == '/') {
            has_slash = true;
            SourceSpan slash = here(1);
            advance();
            skip_blank();
            std::string den = digits();
            if (den.empty())
                throw ParseError(ErrorCode::SyntaxError, "expected integer denominator", slash.line,
                                 slash.column);
            mpz_class d(den, 10);
            if (d == 0)
                throw ParseError(ErrorCode::SyntaxError, "zero denominator", slash.line, slash.column);
            value /= mpq_class(d);
            value.canonicalize();
        }
        t.number = value;
        t.integral = !has_point && !has_slash;
        t.span.length = pos_ - t.span.offset;
        return t;
    }

    Token identifier() {
        Token t;
        t.span = here(0);
        std::string s;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            s += text_[pos_];
            advance();
        }
        t.span.length = s.size();
        if (s == "i") {
            t.kind = Tok::ImagUnit;
            return t;
        }
        bool ok = s.size() >= 2 && s[0] == 'z' && s[1] != '0';
        for (std::size_t j = 1; ok && j < s.size(); ++j)
            ok = std::isdigit(static_cast<unsigned char>(s[j])) != 0;
        if (!ok || s.size() > 8)
            throw ParseError(ErrorCode::UnknownVariable, "unknown variable '" + s + "'", t.span.line,
                             t.span.column);
        t.kind = Tok::Var;
        t.var = std::stoul(s.substr(1));
        return t;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

[[noreturn]] void fail(ErrorCode code, const std::string &msg, const Token &t) {
    throw ParseError(code, msg, t.span.line, t.span.column);
}

class Parser {
  public:
    Parser(const std::vector<Token> &toks, std::size_t begin, std::size_t end, std::size_t k)
        : toks_(toks), pos_(begin), end_(end), k_(k) {}

    Polynomial component() {
        Polynomial p = expression();
        if (pos_ < end_) {
            const Token &t = toks_[pos_];
            if (t.kind == Tok::RParen) fail(ErrorCode::UnbalancedParens, "unmatched ')'", t);
            fail(ErrorCode::SyntaxError, "unexpected token", t);
        }
        return p;
    }

  private:
    const Token &peek() const { return toks_[pos_ < end_ ? pos_ : end_]; }
    bool at(Tok k) const { return pos_ < end_ && toks_[pos_].kind == k; }

    Polynomial expression() {
        bool negate = false;
        if (at(Tok::Plus) || at(Tok::Minus)) {
            negate = at(Tok::Minus);
            ++pos_;
        }
        Polynomial acc = term();
        if (negate) acc = -acc;
        while (at(Tok::Plus) || at(Tok::Minus)) {
            bool minus = at(Tok::Minus);
            ++pos_;
            Polynomial rhs = term();
            if (minus)
                acc -= rhs;
            else
                acc += rhs;
        }
        return acc;
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (true) {
            if (at(Tok::Star)) {
                ++pos_;
                acc = acc * factor();
            } else if (at(Tok::Var)) {
                acc = acc * factor();
            } else if (at(Tok::Number) || at(Tok::ImagUnit) || at(Tok::LParen)) {
                fail(ErrorCode::SyntaxError, "implicit multiplication requires '*'", peek());
            } else {
                return acc;
            }
        }
    }

    Polynomial factor() {
        Polynomial base = primary();
        if (at(Tok::Caret)) {
            const Token &caret = toks_[pos_];
            ++pos_;
            if (pos_ >= end_) fail(ErrorCode::BadExponent, "missing exponent", caret);
            const Token &e = toks_[pos_];
            if (e.kind != Tok::Number || !e.integral || e.number.get_den() != 1 ||
                e.number > kMaxExponent)
                fail(ErrorCode::BadExponent, "exponent must be a nonnegative integer", e);
            ++pos_;
            base = base.pow(static_cast<unsigned>(e.number.get_num().get_ui()));
        }
        return base;
    }

    Polynomial primary() {
        if (pos_ >= end_) {
            const Token &t = toks_[end_];
            fail(ErrorCode::SyntaxError, "unexpected end of expression", t);
        }
        const Token &t = toks_[pos_];
        switch (t.kind) {
        case Tok::Number: {
            ++pos_;
            GaussianRational c(t.number);
            if (at(Tok::ImagUnit)) {
                ++pos_;
                c = GaussianRational(0, t.number);
            }
            return Polynomial::constant(k_, c);
        }
        case Tok::ImagUnit:
            ++pos_;
            return Polynomial::constant(k_, GaussianRational::i());
        case Tok::Var:
            if (t.var > k_)
                fail(ErrorCode::UnknownVariable,
                     "variable z" + std::to_string(t.var) + " exceeds k = " + std::to_string(k_), t);
            ++pos_;
            return Polynomial::variable(k_, t.var - 1);
        case Tok::LParen: {
            ++pos_;
            Polynomial inner = expression();
            if (!at(Tok::RParen)) {
                if (pos_ >= end_) fail(ErrorCode::UnbalancedParens, "unmatched '('", t);
                fail(ErrorCode::SyntaxError, "expected ')'", peek());
            }
            ++pos_;
            return inner;
        }
        case Tok::RParen:
            fail(ErrorCode::UnbalancedParens, "unmatched ')'", t);
        case Tok::Minus:
        case Tok::Plus:
            fail(ErrorCode::SyntaxError, "sign not allowed here; use parentheses", t);
        default:
            fail(ErrorCode::SyntaxError, "expected a number, variable or '('", t);
        }
    }

    const std::vector<Token> &toks_;
    std::size_t pos_;
    std::size_t end_;
    std::size_t k_;
};

// Splits the token stream at top-level separators; returns [begin, end) ranges.
std::vector<std::pair<std::size_t, std::size_t>> split_components(const std::vector<Token> &toks,
                                                                  std::size_t begin) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    int depth = 0;
    std::size_t start = begin;
    std::optional<std::size_t> last_open;
    for (std::size_t j = begin; j < toks.size(); ++j) {
        const Token &t = toks[j];
        if (t.kind == Tok::LParen) {
            if (depth == 0) last_open = j;
            ++depth;
        } else if (t.kind == Tok::RParen) {
            if (depth == 0) fail(ErrorCode::UnbalancedParens, "unmatched ')'", t);
            --depth;
        } else if ((t.kind == Tok::Comma || t.kind == Tok::Newline || t.kind == Tok::End) && depth == 0) {
            if (j > start) out.emplace_back(start, j);
            else if (t.kind == Tok::Comma) fail(ErrorCode::SyntaxError, "empty component", t);
            start = j + 1;
        } else if (t.kind == Tok::End && depth > 0) {
            fail(ErrorCode::UnbalancedParens, "unmatched '('", toks[*last_open]);
        }
    }
    return out;
}

// Consumes an optional "vars:" header line; returns the declared k.
std::optional<std::size_t> read_header(std::string_view &text, int &line_offset) {
    std::size_t p = 0;
    // Skip blank and comment lines.
    while (p < text.size()) {
        std::size_t eol = text.find('\n', p);
        std::string_view line = text.substr(p, eol == std::string_view::npos ? text.size() - p : eol - p);
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') {
            if (eol == std::string_view::npos) return std::nullopt;
            p = eol + 1;
            ++line_offset;
            continue;
        }
        if (line.substr(first, 5) != "vars:") return std::nullopt;
        std::vector<std::size_t> indices;
        std::size_t q = first + 5;
        while (q < line.size()) {
            while (q < line.size() && (line[q] == ' ' || line[q] == '\t' || line[q] == '\r')) ++q;
            if (q >= line.size() || line[q] == '#') break;
            std::size_t s = q;
            while (q < line.size() && std::isalnum(static_cast<unsigned char>(line[q]))) ++q;
            std::string name(line.substr(s, q - s));
            bool ok = name.size() >= 2 && name[0] == 'z' && name[1] != '0' && name.size() <= 8;
            for (std::size_t j = 1; ok && j < name.size(); ++j)
                ok = std::isdigit(static_cast<unsigned char>(name[j])) != 0;
            if (!ok)
                throw ParseError(ErrorCode::UnknownVariable, "bad variable in vars header '" + name + "'",
                                 line_offset + 1, static_cast<int>(s) + 1);
            indices.push_back(std::stoul(name.substr(1)));
        }
        for (std::size_t j = 0; j < indices.size(); ++j)
            if (indices[j] != j + 1)
                throw ParseError(ErrorCode::SyntaxError, "vars header must list z1 ... zk in order",
                                 line_offset + 1, static_cast<int>(first) + 1);
        if (indices.empty())
            throw ParseError(ErrorCode::SyntaxError, "empty vars header", line_offset + 1,
                             static_cast<int>(first) + 1);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_offset;
        return indices.size();
    }
    return std::nullopt;
}

} // namespace

MapDocument parse_document(std::string_view text) {
    int line_offset = 0;
    std::string_view body = text;
    std::optional<std::size_t> declared = read_header(body, line_offset);
    std::size_t body_offset = static_cast<std::size_t>(body.data() - text.data());

    std::vector<Token> toks = Lexer(body).run();
    for (auto &t : toks) {
        t.span.line += line_offset;
        t.span.offset += body_offset;
    }
    auto ranges = split_components(toks, 0);
    if (ranges.empty()) throw ParseError(ErrorCode::MalformedMap, "no components", 1, 1);

    MapDocument doc;
    doc.k = declared.value_or(ranges.size());
    if (doc.k != ranges.size())
        throw ParseError(ErrorCode::MalformedMap,
                         "vars header declares " + std::to_string(doc.k) + " variables but " +
                             std::to_string(ranges.size()) + " components were given",
                         toks[ranges.front().first].span.line, toks[ranges.front().first].span.column);
    for (std::size_t j = 1; j <= doc.k; ++j) doc.variables.push_back("z" + std::to_string(j));

    std::vector<Polynomial> comps;
    for (auto [b, e] : ranges) {
        comps.push_back(Parser(toks, b, e, doc.k).component());
        const Token &first = toks[b];
        const Token &last = toks[e - 1];
        SourceSpan span = first.span;
        span.length = last.span.offset + last.span.length - first.span.offset;
        doc.spans.push_back(span);
        doc.component_text.emplace_back(text.substr(span.offset, span.length));
    }
    doc.map = PolynomialMap(std::move(comps));
    return doc;
}

PolynomialMap parse_map(std::string_view text) { return parse_document(text).map; }

Polynomial parse_polynomial(std::string_view text, std::size_t k) {
    std::vector<Token> toks = Lexer(text).run();
    auto ranges = split_components(toks, 0);
    if (ranges.size() != 1) throw ParseError(ErrorCode::SyntaxError, "expected one expression", 1, 1);
    return Parser(toks, ranges[0].first, ranges[0].second, k).component();
}

std::string format_coefficient(const GaussianRational &c) {
    if (c.is_real()) return c.re().get_str();
    if (sgn(c.re()) == 0) {
        if (c.im() == 1) return "i";
        if (c.im() == -1) return "-i";
        return c.im().get_str() + "i";
    }
    mpq_class b = abs(c.im());
    std::string im = b == 1 ? "i" : b.get_str() + "i";
    return "(" + c.re().get_str() + (sgn(c.im()) < 0 ? " - " : " + ") + im + ")";
}

namespace {

// Sign to hoist in front of a term and the magnitude text of its coefficient.
std::pair<bool, std::string> split_sign(const GaussianRational &c) {
    if (c.is_real()) {
        mpq_class a = abs(c.re());
        return {sgn(c.re()) < 0, a.get_str()};
    }
    if (sgn(c.re()) == 0) {
        mpq_class b = abs(c.im());
        return {sgn(c.im()) < 0, b == 1 ? std::string("i") : b.get_str() + "i"};
    }
    return {false, format_coefficient(c)};
}

} // namespace

std::string format_polynomial(const Polynomial &p) {
    if (p.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto &[e, c] : p.terms()) {
        auto [negative, mag] = split_sign(c);
        std::string mono;
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (e[j] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += "z" + std::to_string(j + 1);
            if (e[j] > 1) mono += "^" + std::to_string(e[j]);
        }
        std::string body;
        if (mono.empty())
            body = mag;
        else if (mag == "1")
            body = mono;
        else
            body = mag + "*" + mono;
        if (first)
            out += (negative ? "-" : "") + body;
        else
            out += (negative ? " - " : " + ") + body;
        first = false;
    }
    return out;
}

std::string format_map(const PolynomialMap &map) {
    std::string out;
    for (std::size_t j = 0; j < map.dim(); ++j) {
        if (j > 0) out += ", ";
        out += format_polynomial(map[j]);
    }
    return out;
}

} // namespace polydyn
