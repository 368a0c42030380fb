#include "qccs/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>

namespace qccs {

namespace {

enum class Tok {
    Ident,
    Keyword,
    Number,
    Imag,      // number immediately followed by 'i'
    Ket,       // |0> |1> |+> |->
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Dot,
    Plus,
    Minus,
    Star,
    Bang,
    Question,
    ParOp,     // ||
    Backslash,
    Eq,        // =
    Neq,       // !=
    Le,        // <=
    Lt,        // <
    Arrow,     // ->
    Assign,    // :=
    End,
};

const std::set<std::string> kKeywords = {
    "nil", "tau", "if", "then", "and", "or", "not",
    "register", "cchan", "qchan", "superop", "measurement", "config", "matrix",
};

struct Token {
    Tok type = Tok::End;
    std::string text;
    double number = 0.0;
    KetPreset ket = KetPreset::Zero;
    SourceSpan span;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skipWhitespaceAndComments();
            if (pos_ >= text_.size()) break;
            out.push_back(next());
        }
        Token end;
        end.type = Tok::End;
        end.span = hereSpan(pos_, pos_);
        out.push_back(end);
        return out;
    }

  private:
    SourceSpan hereSpan(size_t begin, size_t end) const {
        SourceSpan s;
        s.begin = begin;
        s.end = end;
        s.line = line_;
        s.column = column_;
        return s;
    }

    void advance(size_t n) {
        for (size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    void skipWhitespaceAndComments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& message) {
        throw ParseError(message, hereSpan(pos_, pos_ + 1));
    }

    Token next() {
        size_t begin = pos_;
        int startLine = line_, startCol = column_;
        char c = text_[pos_];

        auto finish = [&](Tok type, size_t len) {
            Token t;
            t.type = type;
            t.text = text_.substr(begin, len);
            t.span.begin = begin;
            t.span.end = begin + len;
            t.span.line = startLine;
            t.span.column = startCol;
            advance(len - (pos_ - begin));
            return t;
        };

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            std::string word = text_.substr(begin, end - begin);
            return finish(kKeywords.count(word) ? Tok::Keyword : Tok::Ident, end - begin);
        }

        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t end = pos_;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
            if (end < text_.size() && text_[end] == '.' && end + 1 < text_.size() &&
                std::isdigit(static_cast<unsigned char>(text_[end + 1]))) {
                ++end;
                while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end])))
                    ++end;
            }
            if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
                size_t expEnd = end + 1;
                if (expEnd < text_.size() && (text_[expEnd] == '+' || text_[expEnd] == '-')) ++expEnd;
                if (expEnd < text_.size() && std::isdigit(static_cast<unsigned char>(text_[expEnd]))) {
                    end = expEnd;
                    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end])))
                        ++end;
                }
            }
            bool imaginary = false;
            size_t numEnd = end;
            if (end < text_.size() && text_[end] == 'i' &&
                (end + 1 >= text_.size() ||
                 (!std::isalnum(static_cast<unsigned char>(text_[end + 1])) && text_[end + 1] != '_'))) {
                imaginary = true;
                ++end;
            }
            Token t = finish(imaginary ? Tok::Imag : Tok::Number, end - begin);
            double value = 0.0;
            auto res = std::from_chars(text_.data() + begin, text_.data() + numEnd, value);
            if (res.ec != std::errc()) fail("malformed number");
            t.number = value;
            return t;
        }

        switch (c) {
            case '(': return finish(Tok::LParen, 1);
            case ')': return finish(Tok::RParen, 1);
            case '[': return finish(Tok::LBracket, 1);
            case ']': return finish(Tok::RBracket, 1);
            case '{': return finish(Tok::LBrace, 1);
            case '}': return finish(Tok::RBrace, 1);
            case ',': return finish(Tok::Comma, 1);
            case ';': return finish(Tok::Semi, 1);
            case '.': return finish(Tok::Dot, 1);
            case '+': return finish(Tok::Plus, 1);
            case '*': return finish(Tok::Star, 1);
            case '?': return finish(Tok::Question, 1);
            case '\\': return finish(Tok::Backslash, 1);
            case '=': return finish(Tok::Eq, 1);
            case '!':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') return finish(Tok::Neq, 2);
                return finish(Tok::Bang, 1);
            case '<':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') return finish(Tok::Le, 2);
                return finish(Tok::Lt, 1);
            case '-':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') return finish(Tok::Arrow, 2);
                return finish(Tok::Minus, 1);
            case ':':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') return finish(Tok::Assign, 2);
                return finish(Tok::Colon, 1);
            case '|': {
                if (pos_ + 2 < text_.size() && text_[pos_ + 2] == '>' &&
                    (text_[pos_ + 1] == '0' || text_[pos_ + 1] == '1' || text_[pos_ + 1] == '+' ||
                     text_[pos_ + 1] == '-')) {
                    Token t = finish(Tok::Ket, 3);
                    switch (t.text[1]) {
                        case '0': t.ket = KetPreset::Zero; break;
                        case '1': t.ket = KetPreset::One; break;
                        case '+': t.ket = KetPreset::Plus; break;
                        default: t.ket = KetPreset::Minus; break;
                    }
                    return t;
                }
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '|') return finish(Tok::ParOp, 2);
                fail("stray '|' (expected '||' or a ket like |0>)");
            }
            default: fail(std::string("unexpected character '") + c + "'");
        }
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

// Scopes visible while parsing a process expression.
struct ProcScope {
    std::set<std::string> qubits;     // register + quantum params + input binders
    std::set<std::string> classical;  // classical params + input/measurement binders
};

class Parser {
  public:
    Parser(std::vector<Token> tokens, const Definitions* defs)
        : tokens_(std::move(tokens)), defs_(defs) {}

    // --- token helpers -----------------------------------------------------

    const Token& peek(size_t ahead = 0) const {
        size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    const Token& current() const { return peek(0); }
    bool at(Tok type) const { return current().type == type; }
    bool atKeyword(const std::string& kw) const {
        return current().type == Tok::Keyword && current().text == kw;
    }
    Token eat() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
    Token expect(Tok type, const std::string& what) {
        if (!at(type)) fail("expected " + what);
        return eat();
    }
    void expectKeyword(const std::string& kw) {
        if (!atKeyword(kw)) fail("expected '" + kw + "'");
        eat();
    }
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message + " (found '" +
                             (current().type == Tok::End ? "<end>" : current().text) + "')",
                         current().span);
    }
    bool done() const { return at(Tok::End); }
    size_t position() const { return pos_; }
    void rewind(size_t pos) { pos_ = pos; }

    // --- classical expressions ---------------------------------------------

    Expr parseExpr(const ProcScope& scope) {
        Expr lhs = parseTerm(scope);
        while (at(Tok::Plus) || at(Tok::Minus)) {
            bool add = at(Tok::Plus);
            eat();
            Expr rhs = parseTerm(scope);
            lhs = add ? Expr::add(std::move(lhs), std::move(rhs))
                      : Expr::sub(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Expr parseTerm(const ProcScope& scope) {
        Expr lhs = parseFactor(scope);
        while (at(Tok::Star)) {
            eat();
            lhs = Expr::mul(std::move(lhs), parseFactor(scope));
        }
        return lhs;
    }

    Expr parseFactor(const ProcScope& scope) {
        if (at(Tok::Number)) return Expr::lit(eat().number);
        if (at(Tok::Minus)) {
            eat();
            Expr inner = parseFactor(scope);
            if (inner.kind() == Expr::Kind::Lit) return Expr::lit(-inner.value());
            return Expr::sub(Expr::lit(0.0), std::move(inner));
        }
        if (at(Tok::Ident)) {
            const Token& t = current();
            if (!scope.classical.count(t.text))
                fail("unknown classical variable '" + t.text + "'");
            return Expr::var(eat().text);
        }
        if (at(Tok::LParen)) {
            eat();
            Expr e = parseExpr(scope);
            expect(Tok::RParen, "')'");
            return e;
        }
        fail("expected a classical expression");
    }

    /// Payload position: literals, variables, or a parenthesized expression.
    Expr parseExprAtom(const ProcScope& scope) {
        if (at(Tok::Number) || at(Tok::Minus) || at(Tok::Ident) || at(Tok::LParen))
            return at(Tok::LParen) ? parseParenExpr(scope) : parseFactor(scope);
        fail("expected an output value");
    }

    Expr parseParenExpr(const ProcScope& scope) {
        expect(Tok::LParen, "'('");
        Expr e = parseExpr(scope);
        expect(Tok::RParen, "')'");
        return e;
    }

    BExpr parseBExpr(const ProcScope& scope) {
        BExpr lhs = parseBTerm(scope);
        while (atKeyword("or")) {
            eat();
            lhs = BExpr::disj(std::move(lhs), parseBTerm(scope));
        }
        return lhs;
    }

    BExpr parseBTerm(const ProcScope& scope) {
        BExpr lhs = parseBFactor(scope);
        while (atKeyword("and")) {
            eat();
            lhs = BExpr::conj(std::move(lhs), parseBFactor(scope));
        }
        return lhs;
    }

    BExpr parseBFactor(const ProcScope& scope) {
        if (atKeyword("not")) {
            eat();
            return BExpr::neg(parseBFactor(scope));
        }
        // Either a comparison or a parenthesized boolean; try the comparison
        // first and fall back, since both can start with '('.
        size_t saved = pos_;
        try {
            Expr lhs = parseExpr(scope);
            BExpr::CmpOp op;
            if (at(Tok::Eq)) op = BExpr::CmpOp::Eq;
            else if (at(Tok::Neq)) op = BExpr::CmpOp::Ne;
            else if (at(Tok::Le)) op = BExpr::CmpOp::Le;
            else if (at(Tok::Lt)) op = BExpr::CmpOp::Lt;
            else fail("expected a comparison operator");
            eat();
            Expr rhs = parseExpr(scope);
            return BExpr::cmp(op, std::move(lhs), std::move(rhs));
        } catch (const ParseError&) {
            rewind(saved);
        }
        expect(Tok::LParen, "'(' or a comparison");
        BExpr inner = parseBExpr(scope);
        expect(Tok::RParen, "')'");
        return inner;
    }

    // --- processes -----------------------------------------------------------

    Process parseProcess(ProcScope scope) { return parseSum(scope); }

    Process parseSum(const ProcScope& scope) {
        Process lhs = parsePar(scope);
        while (at(Tok::Plus)) {
            eat();
            lhs = Process::sum(std::move(lhs), parsePar(scope));
        }
        return lhs;
    }

    Process parsePar(const ProcScope& scope) {
        Process lhs = parsePostfix(scope);
        while (at(Tok::ParOp)) {
            eat();
            lhs = Process::par(std::move(lhs), parsePostfix(scope));
        }
        return lhs;
    }

    Process parsePostfix(const ProcScope& scope) {
        Process p = parsePrefix(scope);
        while (true) {
            if (at(Tok::LBracket)) {
                eat();
                RelabelFn fn;
                while (true) {
                    std::string from = expect(Tok::Ident, "channel name").text;
                    expect(Tok::Arrow, "'->'");
                    std::string to = expect(Tok::Ident, "channel name").text;
                    if (fn.count(from)) fail("channel '" + from + "' relabeled twice");
                    fn[from] = to;
                    if (at(Tok::Comma)) {
                        eat();
                        continue;
                    }
                    break;
                }
                expect(Tok::RBracket, "']'");
                p = Process::relabel(std::move(p), std::move(fn));
            } else if (at(Tok::Backslash)) {
                eat();
                expect(Tok::LBrace, "'{'");
                std::set<std::string> channels;
                while (true) {
                    channels.insert(expect(Tok::Ident, "channel name").text);
                    if (at(Tok::Comma)) {
                        eat();
                        continue;
                    }
                    break;
                }
                expect(Tok::RBrace, "'}'");
                p = Process::restrict(std::move(p), std::move(channels));
            } else {
                return p;
            }
        }
    }

    /// Optional '.'-continuation after a prefix head; absent means nil.
    Process parseContinuation(const ProcScope& scope) {
        if (at(Tok::Dot)) {
            eat();
            return parsePrefix(scope);
        }
        return Process::nil();
    }

    Process parsePrefix(const ProcScope& scope) {
        if (atKeyword("nil")) {
            eat();
            return Process::nil();
        }
        if (atKeyword("tau")) {
            eat();
            return Process::tau(parseContinuation(scope));
        }
        if (atKeyword("if")) {
            eat();
            BExpr cond = parseBExpr(scope);
            expectKeyword("then");
            return Process::ifThen(std::move(cond), parsePrefix(scope));
        }
        if (at(Tok::LParen)) {
            eat();
            Process p = parseProcess(scope);
            expect(Tok::RParen, "')'");
            return p;
        }
        if (!at(Tok::Ident)) fail("expected a process");

        Token head = eat();
        const std::string& name = head.text;

        if (at(Tok::LParen)) return parseConstCall(head, scope);

        if (at(Tok::Question) || at(Tok::Bang)) {
            const ChannelDecl* ch = defs_->findChannel(name);
            if (!ch) throw ParseError("channel '" + name + "' is not declared", head.span);
            bool input = at(Tok::Question);
            eat();
            if (ch->kind == ChannelKind::Classical) {
                if (input) {
                    std::string var = expect(Tok::Ident, "variable name").text;
                    ProcScope inner = scope;
                    inner.classical.insert(var);
                    return Process::cin(name, var, parseContinuation(inner));
                }
                Expr value = parseExprAtom(scope);
                return Process::cout(name, std::move(value), parseContinuation(scope));
            }
            std::string qubit = expect(Tok::Ident, "qubit name").text;
            if (input) {
                ProcScope inner = scope;
                inner.qubits.insert(qubit);
                return Process::qin(name, qubit, parseContinuation(inner));
            }
            if (!scope.qubits.count(qubit))
                fail("unknown qubit '" + qubit + "'");
            return Process::qout(name, qubit, parseContinuation(scope));
        }

        if (at(Tok::LBracket)) {
            const SuperOperator* op = defs_->findSuperOp(name);
            const Measurement* meas = defs_->findMeasurement(name);
            if (!op && !meas)
                throw ParseError("'" + name + "' is not a declared super-operator or measurement",
                                 head.span);
            eat();
            std::vector<std::string> qubits;
            while (true) {
                std::string q = expect(Tok::Ident, "qubit name").text;
                if (!scope.qubits.count(q)) fail("unknown qubit '" + q + "'");
                qubits.push_back(std::move(q));
                if (at(Tok::Comma)) {
                    eat();
                    continue;
                }
                break;
            }
            if (op) {
                expect(Tok::RBracket, "']'");
                return Process::superOp(name, std::move(qubits), parseContinuation(scope));
            }
            expect(Tok::Semi, "';' before the outcome variable");
            std::string var = expect(Tok::Ident, "variable name").text;
            expect(Tok::RBracket, "']'");
            ProcScope inner = scope;
            inner.classical.insert(var);
            return Process::measure(name, std::move(qubits), var, parseContinuation(inner));
        }

        throw ParseError("expected a channel operation, operator application, or call after '" +
                             name + "'",
                         head.span);
    }

    Process parseConstCall(const Token& head, const ProcScope& scope) {
        const ProcessDef* def = defs_->findConstant(head.text);
        if (!def) throw ParseError("process constant '" + head.text + "' is not declared", head.span);
        expect(Tok::LParen, "'('");

        // Locate a top-level ';' inside the argument list.
        bool hasSemi = false;
        {
            int depth = 0;
            for (size_t i = pos_; i < tokens_.size(); ++i) {
                Tok t = tokens_[i].type;
                if (t == Tok::LParen || t == Tok::LBracket || t == Tok::LBrace) ++depth;
                else if (t == Tok::RBracket || t == Tok::RBrace) --depth;
                else if (t == Tok::RParen) {
                    if (depth == 0) break;
                    --depth;
                } else if (t == Tok::Semi && depth == 0) {
                    hasSemi = true;
                    break;
                } else if (t == Tok::End) {
                    break;
                }
            }
        }

        size_t nq = def->quantumParams.size(), nc = def->classicalParams.size();
        std::vector<std::string> qargs;
        std::vector<Expr> eargs;

        bool quantumFirst = hasSemi || nc == 0;
        if (!hasSemi && nq > 0 && nc > 0)
            fail("call to '" + head.text + "' mixes quantum and classical arguments; separate them with ';'");

        if (quantumFirst && nq > 0) {
            while (true) {
                std::string q = expect(Tok::Ident, "qubit argument").text;
                if (!scope.qubits.count(q)) fail("unknown qubit '" + q + "'");
                qargs.push_back(std::move(q));
                if (at(Tok::Comma)) {
                    eat();
                    continue;
                }
                break;
            }
        }
        if (hasSemi) expect(Tok::Semi, "';'");
        if (nc > 0 && !at(Tok::RParen)) {
            while (true) {
                eargs.push_back(parseExpr(scope));
                if (at(Tok::Comma)) {
                    eat();
                    continue;
                }
                break;
            }
        }
        expect(Tok::RParen, "')'");

        if (qargs.size() != nq || eargs.size() != nc)
            throw ParseError("call to '" + head.text + "' expects " + std::to_string(nq) +
                                 " quantum and " + std::to_string(nc) + " classical argument(s)",
                             head.span);
        return Process::constCall(head.text, std::move(qargs), std::move(eargs));
    }

    // --- declaration-level pieces -------------------------------------------

    std::vector<std::string> parseIdentList() {
        std::vector<std::string> out;
        while (true) {
            out.push_back(expect(Tok::Ident, "name").text);
            if (at(Tok::Comma)) {
                eat();
                continue;
            }
            break;
        }
        return out;
    }

    double parseSignedNumber() {
        bool negative = false;
        if (at(Tok::Minus)) {
            negative = true;
            eat();
        }
        double v = expect(Tok::Number, "number").number;
        return negative ? -v : v;
    }

    Cplx parseComplex() {
        bool negative = false;
        if (at(Tok::Minus)) {
            negative = true;
            eat();
        }
        if (at(Tok::Imag)) {
            double im = eat().number;
            return Cplx(0.0, negative ? -im : im);
        }
        double re = expect(Tok::Number, "number").number;
        if (negative) re = -re;
        if (at(Tok::Plus) || at(Tok::Minus)) {
            // imaginary part must follow directly, e.g. 0.5 - 0.5i
            if (peek(1).type == Tok::Imag) {
                bool minus = at(Tok::Minus);
                eat();
                double im = eat().number;
                return Cplx(re, minus ? -im : im);
            }
        }
        return Cplx(re, 0.0);
    }

    CMatrix parseMatrix(Eigen::Index dim) {
        Token open = expect(Tok::LBracket, "'['");
        std::vector<Cplx> entries;
        if (!at(Tok::RBracket)) {
            while (true) {
                entries.push_back(parseComplex());
                if (at(Tok::Comma)) {
                    eat();
                    continue;
                }
                break;
            }
        }
        expect(Tok::RBracket, "']'");
        if (dim > 0 && static_cast<Eigen::Index>(entries.size()) != dim * dim)
            throw ParseError("matrix needs " + std::to_string(dim * dim) +
                                 " row-major entries, got " + std::to_string(entries.size()),
                             open.span);
        if (dim == 0) {
            auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(entries.size()))));
            if (n * n != static_cast<Eigen::Index>(entries.size()))
                throw ParseError("matrix entry count is not a perfect square", open.span);
            dim = n;
        }
        CMatrix m(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = entries[r * dim + c];
        return m;
    }

  private:
    std::vector<Token> tokens_;
    const Definitions* defs_;
    size_t pos_ = 0;
};

struct PendingDefinition {
    std::string name;
    SourceSpan span;
    std::vector<std::string> quantumParams;
    std::vector<std::string> classicalParams;
    std::vector<Token> bodyTokens;
};

struct PendingConfig {
    std::string name;
    SourceSpan span;
    std::vector<Token> processTokens;
    std::vector<Token> stateTokens;
};

std::vector<Token> sliceWithEnd(const std::vector<Token>& tokens, size_t begin, size_t end) {
    std::vector<Token> out(tokens.begin() + begin, tokens.begin() + end);
    Token sentinel;
    sentinel.type = Tok::End;
    sentinel.span = end < tokens.size() ? tokens[end].span : SourceSpan{};
    out.push_back(sentinel);
    return out;
}

}  // namespace

ModelFile parseModel(const std::string& text, const ParseOptions& options) {
    std::vector<Token> tokens = Lexer(text).run();

    ModelFile model;
    Definitions& defs = model.defs;
    std::vector<PendingDefinition> pendingDefs;
    std::vector<PendingConfig> pendingConfigs;
    std::set<std::string> declaredNames;

    auto declareName = [&](const std::string& name, const SourceSpan& span) {
        if (!declaredNames.insert(name).second)
            throw ParseError("name '" + name + "' is declared twice", span);
    };

    // Pass 1: simple declarations in full; definition bodies and config
    // payloads as token ranges (so constants may refer to each other).
    size_t i = 0;
    auto findStatementEnd = [&](size_t from) {
        int depth = 0;
        for (size_t j = from; j < tokens.size(); ++j) {
            Tok t = tokens[j].type;
            if (t == Tok::LParen || t == Tok::LBracket || t == Tok::LBrace) ++depth;
            else if (t == Tok::RParen || t == Tok::RBracket || t == Tok::RBrace) --depth;
            else if (t == Tok::Semi && depth == 0) return j;
            else if (t == Tok::End) break;
        }
        throw ParseError("statement is missing its terminating ';'", tokens[from].span);
    };

    while (tokens[i].type != Tok::End) {
        size_t stmtEnd = findStatementEnd(i);
        Parser stmt(sliceWithEnd(tokens, i, stmtEnd), &defs);

        if (tokens[i].type == Tok::Keyword) {
            const std::string& kw = tokens[i].text;
            if (kw == "register") {
                stmt.eat();
                if (!defs.registerNames.empty())
                    throw ParseError("register is declared twice", tokens[i].span);
                defs.registerNames = stmt.parseIdentList();
                for (const auto& q : defs.registerNames) declareName(q, tokens[i].span);
                if (static_cast<int>(defs.registerNames.size()) > options.maxQubits)
                    throw ParseError("register exceeds the configured limit of " +
                                         std::to_string(options.maxQubits) + " qubits",
                                     tokens[i].span);
            } else if (kw == "cchan" || kw == "qchan") {
                stmt.eat();
                auto names = stmt.parseIdentList();
                ChannelDecl decl;
                decl.kind = kw == "cchan" ? ChannelKind::Classical : ChannelKind::Quantum;
                if (stmt.at(Tok::Colon)) {
                    if (decl.kind == ChannelKind::Quantum)
                        throw ParseError("quantum channels take no value domain", tokens[i].span);
                    stmt.eat();
                    stmt.expect(Tok::LBrace, "'{'");
                    std::vector<double> domain;
                    while (true) {
                        domain.push_back(stmt.parseSignedNumber());
                        if (stmt.at(Tok::Comma)) {
                            stmt.eat();
                            continue;
                        }
                        break;
                    }
                    stmt.expect(Tok::RBrace, "'}'");
                    decl.domain = std::move(domain);
                }
                if (!stmt.done()) stmt.fail("unexpected trailing tokens in channel declaration");
                for (const auto& n : names) {
                    declareName(n, tokens[i].span);
                    defs.channels[n] = decl;
                }
            } else if (kw == "superop" || kw == "measurement") {
                stmt.eat();
                Token nameTok = stmt.expect(Tok::Ident, "name");
                declareName(nameTok.text, nameTok.span);
                stmt.expect(Tok::LParen, "'('");
                double arityNum = stmt.parseSignedNumber();
                int arity = static_cast<int>(arityNum);
                if (arity <= 0 || arity != arityNum)
                    throw ParseError("arity must be a positive integer", nameTok.span);
                if (arity > options.maxQubits)
                    throw ParseError("operator arity exceeds the register limit", nameTok.span);
                stmt.expect(Tok::RParen, "')'");
                stmt.expect(Tok::Eq, "'='");
                stmt.expect(Tok::LBrace, "'{'");
                Eigen::Index dim = Eigen::Index(1) << arity;
                try {
                    if (kw == "superop") {
                        SuperOperator op;
                        op.arity = arity;
                        while (true) {
                            op.kraus.push_back(stmt.parseMatrix(dim));
                            if (stmt.at(Tok::Comma)) {
                                stmt.eat();
                                continue;
                            }
                            break;
                        }
                        stmt.expect(Tok::RBrace, "'}'");
                        op.validate(options.tol);
                        defs.superOps[nameTok.text] = std::move(op);
                    } else {
                        Measurement m;
                        m.arity = arity;
                        while (true) {
                            double outcome = stmt.parseSignedNumber();
                            stmt.expect(Tok::Colon, "':'");
                            CMatrix proj = stmt.parseMatrix(dim);
                            m.branches.push_back({outcome, std::move(proj)});
                            if (stmt.at(Tok::Comma)) {
                                stmt.eat();
                                continue;
                            }
                            break;
                        }
                        stmt.expect(Tok::RBrace, "'}'");
                        m.validate(options.tol);
                        defs.measurements[nameTok.text] = std::move(m);
                    }
                } catch (const QStateError& e) {
                    throw ParseError(e.what(), nameTok.span);
                }
                if (!stmt.done()) stmt.fail("unexpected trailing tokens in operator declaration");
            } else if (kw == "config") {
                PendingConfig cfg;
                size_t j = i + 1;
                if (tokens[j].type != Tok::Ident)
                    throw ParseError("expected a configuration name", tokens[j].span);
                cfg.name = tokens[j].text;
                cfg.span = tokens[j].span;
                declareName(cfg.name, cfg.span);
                ++j;
                if (tokens[j].type != Tok::Eq) throw ParseError("expected '='", tokens[j].span);
                ++j;
                if (tokens[j].type != Tok::LParen) throw ParseError("expected '('", tokens[j].span);
                ++j;
                // split "( process , state )" at the top-level comma
                int depth = 0;
                size_t comma = 0, close = 0;
                for (size_t k = j; k < stmtEnd; ++k) {
                    Tok t = tokens[k].type;
                    if (t == Tok::LParen || t == Tok::LBracket || t == Tok::LBrace) ++depth;
                    else if (t == Tok::RParen || t == Tok::RBracket || t == Tok::RBrace) {
                        if (t == Tok::RParen && depth == 0) {
                            close = k;
                            break;
                        }
                        --depth;
                    } else if (t == Tok::Comma && depth == 0 && comma == 0) {
                        comma = k;
                    }
                }
                if (comma == 0 || close == 0 || close != stmtEnd - 1)
                    throw ParseError("configuration must have the form config NAME = ( process , state );",
                                     cfg.span);
                cfg.processTokens = sliceWithEnd(tokens, j, comma);
                cfg.stateTokens = sliceWithEnd(tokens, comma + 1, close);
                pendingConfigs.push_back(std::move(cfg));
            } else {
                throw ParseError("unexpected keyword '" + kw + "' at statement start", tokens[i].span);
            }
        } else if (tokens[i].type == Tok::Ident) {
            // definition: NAME(params) := body
            PendingDefinition def;
            def.name = tokens[i].text;
            def.span = tokens[i].span;
            declareName(def.name, def.span);
            Parser head(sliceWithEnd(tokens, i + 1, stmtEnd), &defs);
            head.expect(Tok::LParen, "'(' after the definition name");
            bool sawSemi = false;
            std::vector<std::string> before, after;
            if (!head.at(Tok::RParen)) {
                while (true) {
                    if (head.at(Tok::Semi)) {
                        if (sawSemi) head.fail("duplicate ';' in parameter list");
                        sawSemi = true;
                        head.eat();
                        if (head.at(Tok::RParen)) break;
                        continue;
                    }
                    std::string param = head.expect(Tok::Ident, "parameter name").text;
                    (sawSemi ? after : before).push_back(param);
                    if (head.at(Tok::Comma)) {
                        head.eat();
                        continue;
                    }
                    if (head.at(Tok::Semi)) continue;
                    break;
                }
            }
            head.expect(Tok::RParen, "')'");
            head.expect(Tok::Assign, "':='");
            if (sawSemi) {
                def.quantumParams = std::move(before);
                def.classicalParams = std::move(after);
            } else {
                // a head without ';' declares classical parameters only
                def.classicalParams = std::move(before);
            }
            size_t bodyBegin = i + 1;
            while (tokens[bodyBegin].type != Tok::Assign) ++bodyBegin;
            ++bodyBegin;
            if (bodyBegin >= stmtEnd) throw ParseError("definition has an empty body", def.span);
            def.bodyTokens = sliceWithEnd(tokens, bodyBegin, stmtEnd);
            pendingDefs.push_back(std::move(def));
        } else {
            throw ParseError("expected a declaration", tokens[i].span);
        }
        i = stmtEnd + 1;
    }

    // Pass 1.5: register the definition signatures so bodies can call any
    // constant, including forward and recursive references.
    for (const auto& def : pendingDefs) {
        ProcessDef d;
        d.quantumParams = def.quantumParams;
        d.classicalParams = def.classicalParams;
        defs.constants[def.name] = std::move(d);
    }

    // Pass 2: definition bodies.
    for (auto& def : pendingDefs) {
        ProcScope scope;
        scope.qubits.insert(defs.registerNames.begin(), defs.registerNames.end());
        scope.qubits.insert(def.quantumParams.begin(), def.quantumParams.end());
        scope.classical.insert(def.classicalParams.begin(), def.classicalParams.end());
        Parser body(def.bodyTokens, &defs);
        Process p = body.parseProcess(scope);
        if (!body.done()) body.fail("unexpected trailing tokens in definition body");
        defs.constants[def.name].body = std::move(p);
    }

    try {
        checkDefinitions(defs);
    } catch (const DefinitionError& e) {
        throw ParseError(e.what(), SourceSpan{});
    }

    // Pass 3: configurations.
    for (auto& cfg : pendingConfigs) {
        ProcScope scope;
        scope.qubits.insert(defs.registerNames.begin(), defs.registerNames.end());
        Parser proc(cfg.processTokens, &defs);
        Process p = proc.parseProcess(scope);
        if (!proc.done()) proc.fail("unexpected trailing tokens in configuration process");

        auto freeVars = p.fv();
        if (!freeVars.empty())
            throw ParseError("configuration process must be closed; '" + *freeVars.begin() +
                                 "' is free",
                             cfg.span);
        auto report = checkLegal(p, defs);
        if (!report.ok)
            throw ParseError("illegal configuration process: " + describeLegality(report), cfg.span);
        for (const auto& q : p.qv(defs))
            if (std::find(defs.registerNames.begin(), defs.registerNames.end(), q) ==
                defs.registerNames.end())
                throw ParseError("configuration uses qubit '" + q + "' outside the register",
                                 cfg.span);

        Parser st(cfg.stateTokens, &defs);
        QState state = [&]() -> QState {
            try {
                if (st.atKeyword("matrix")) {
                    st.eat();
                    Eigen::Index dim = Eigen::Index(1) << defs.registerNames.size();
                    CMatrix m = st.parseMatrix(dim);
                    if (!st.done()) st.fail("unexpected trailing tokens in state");
                    return QState(defs.registerNames, std::move(m));
                }
                std::vector<KetPreset> kets;
                while (true) {
                    if (!st.at(Tok::Ket)) st.fail("expected a ket (|0>, |1>, |+>, |->) or 'matrix'");
                    kets.push_back(st.eat().ket);
                    if (st.at(Tok::Comma)) {
                        st.eat();
                        continue;
                    }
                    break;
                }
                if (!st.done()) st.fail("unexpected trailing tokens in state");
                if (kets.size() != defs.registerNames.size())
                    st.fail("state lists " + std::to_string(kets.size()) + " ket(s) for a register of " +
                            std::to_string(defs.registerNames.size()));
                return QState::fromKets(defs.registerNames, kets);
            } catch (const QStateError& e) {
                throw ParseError(e.what(), cfg.span);
            }
        }();
        state.validate(options.tol);

        model.configs.emplace_back(cfg.name, ConfigDecl{std::move(p), std::move(state), cfg.span});
    }

    return model;
}

Process parseProcessText(const std::string& text, const Definitions& defs) {
    std::vector<Token> tokens = Lexer(text).run();
    Parser parser(std::move(tokens), &defs);
    ProcScope scope;
    scope.qubits.insert(defs.registerNames.begin(), defs.registerNames.end());
    Process p = parser.parseProcess(scope);
    if (!parser.done()) parser.fail("unexpected trailing tokens after process");
    return p;
}

}  // namespace qccs
