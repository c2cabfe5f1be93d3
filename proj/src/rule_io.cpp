#include "rulehier/rule_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

namespace rulehier {

namespace {

bool is_variable_name(std::string_view s) {
    if (s == "X" || s == "Y") return true;
    if (s.size() < 2 || s[0] != 'V') return false;
    return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool needs_quotes(std::string_view s) {
    if (s.empty() || is_variable_name(s)) return true;
    if (std::isspace(static_cast<unsigned char>(s.front())) || std::isspace(static_cast<unsigned char>(s.back())))
        return true;
    if (s.find_first_of("(),`|") != std::string_view::npos) return true;
    return s.find("<-") != std::string_view::npos;
}

void append_name(std::string& out, std::string_view name) {
    if (needs_quotes(name)) {
        out += '`';
        out += name;
        out += '`';
    } else {
        out += name;
    }
}

void append_term(std::string& out, const Term& t, const Vocabulary& vocab) {
    if (t.is_var()) {
        if (t.id == kVarX) out += 'X';
        else if (t.id == kVarY) out += 'Y';
        else out += 'V' + std::to_string(t.id - kFirstBodyVar);
    } else if (t.is_skolem()) {
        out += "sk" + std::to_string(t.id - kSkolemBase);
    } else {
        append_name(out, vocab.entities.name(t.id));
    }
}

void append_atom(std::string& out, const Atom& a, const Vocabulary& vocab) {
    append_name(out, vocab.relations.name(a.pred));
    out += '(';
    append_term(out, a.subject, vocab);
    out += ',';
    append_term(out, a.object, vocab);
    out += ')';
}

class Parser {
public:
    Parser(std::string_view text, Vocabulary& vocab) : text_(text), vocab_(vocab) {}

    Rule parse(std::size_t* consumed) {
        Atom head = atom();
        skip_ws();
        expect("<-");
        std::vector<Atom> body;
        skip_ws();
        if (!at_end() && peek() != '|') {
            body.push_back(atom());
            for (;;) {
                std::size_t save = pos_;
                skip_ws();
                if (at_end() || peek() != ',') {
                    pos_ = save;
                    break;
                }
                ++pos_;
                skip_ws();
                body.push_back(atom());
            }
        }
        std::size_t end = pos_;
        if (consumed) {
            *consumed = end;
        } else {
            skip_ws();
            if (!at_end()) fail("unexpected trailing input");
        }
        try {
            return Rule(head, std::move(body));
        } catch (const RuleError& e) {
            throw RuleParseError(e.what(), end);
        }
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    [[noreturn]] void fail(const std::string& what) const { throw RuleParseError(what, pos_); }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }

    void expect(std::string_view tok) {
        if (text_.substr(pos_, tok.size()) != tok) fail("expected '" + std::string(tok) + "'");
        pos_ += tok.size();
    }

    // Returns the name and whether it was quoted.
    std::pair<std::string_view, bool> name(std::string_view stops) {
        skip_ws();
        if (at_end()) fail("unexpected end of input");
        if (peek() == '`') {
            auto close = text_.find('`', pos_ + 1);
            if (close == std::string_view::npos) fail("unterminated quoted name");
            auto s = text_.substr(pos_ + 1, close - pos_ - 1);
            pos_ = close + 1;
            skip_ws();
            return {s, true};
        }
        auto end = text_.find_first_of(stops, pos_);
        if (end == std::string_view::npos) fail("unexpected end of input");
        auto s = text_.substr(pos_, end - pos_);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        if (s.empty()) fail("empty name");
        pos_ = end;
        return {s, false};
    }

    Term term() {
        auto [s, quoted] = name(",)");
        if (!quoted && is_variable_name(s)) {
            if (s == "X") return Term::x();
            if (s == "Y") return Term::y();
            std::uint32_t n = 0;
            auto res = std::from_chars(s.data() + 1, s.data() + s.size(), n);
            if (res.ec != std::errc() || n > 1'000'000) fail("bad variable index");
            return Term::var(kFirstBodyVar + n);
        }
        return Term::constant(vocab_.entities.intern(s));
    }

    Atom atom() {
        auto [pred, quoted] = name("(");
        (void)quoted;
        expect("(");
        Term s = term();
        expect(",");
        Term o = term();
        expect(")");
        return Atom{vocab_.relations.intern(pred), s, o};
    }

    std::string_view text_;
    Vocabulary& vocab_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string format_atom(const Atom& atom, const Vocabulary& vocab) {
    std::string out;
    append_atom(out, atom, vocab);
    return out;
}

std::string format_rule(const Rule& rule, const Vocabulary& vocab) {
    std::string out;
    append_atom(out, rule.head(), vocab);
    out += " <-";
    for (std::size_t i = 0; i < rule.length(); ++i) {
        out += i == 0 ? " " : ", ";
        append_atom(out, rule.body()[i], vocab);
    }
    return out;
}

Rule parse_rule(std::string_view text, Vocabulary& vocab, std::size_t* consumed) {
    return Parser(text, vocab).parse(consumed);
}

}  // namespace rulehier
