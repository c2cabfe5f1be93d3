#include "rulehier/rule_file.hpp"

#include <charconv>
#include <istream>

#include <fmt/format.h>

#include "rulehier/rule_io.hpp"

namespace rulehier {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
T parse_number(std::string_view text, std::string_view key, std::size_t line_no) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError(fmt::format("line {}: bad value for {}: '{}'", line_no, key, text), line_no);
    return value;
}

}  // namespace

std::string format_rule_line(const Rule& rule, const Measures& m, const Vocabulary& vocab) {
    return fmt::format("{} | supp={} | hc={} | sc={} | kind={}", format_rule(rule, vocab), m.supp, m.hc, m.sc,
                       kind_name(rule.kind()));
}

RuleLine parse_rule_line(std::string_view line, Vocabulary& vocab, std::size_t line_no) {
    std::size_t consumed = 0;
    std::optional<Rule> rule;
    try {
        rule = parse_rule(line, vocab, &consumed);
    } catch (const RuleParseError& e) {
        throw ParseError(fmt::format("line {}: {}", line_no, e.what()), line_no);
    } catch (const RuleError& e) {
        throw ParseError(fmt::format("line {}: {}", line_no, e.what()), line_no);
    }
    RuleLine out{*rule};
    bool have_supp = false, have_hc = false, have_sc = false;
    std::string_view rest = line.substr(consumed);
    while (!(rest = trim(rest)).empty()) {
        if (rest.front() != '|') throw ParseError(fmt::format("line {}: expected '|'", line_no), line_no);
        rest.remove_prefix(1);
        auto end = rest.find('|');
        std::string_view field = trim(rest.substr(0, end));
        rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
        auto eq = field.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(fmt::format("line {}: field without '=': '{}'", line_no, field), line_no);
        auto key = trim(field.substr(0, eq));
        auto value = trim(field.substr(eq + 1));
        if (key == "supp") {
            out.supp = parse_number<std::size_t>(value, key, line_no);
            have_supp = true;
        } else if (key == "hc") {
            out.hc = parse_number<double>(value, key, line_no);
            have_hc = true;
        } else if (key == "sc") {
            out.sc = parse_number<double>(value, key, line_no);
            have_sc = true;
        } else if (key == "kind") {
            RuleKind k;
            try {
                k = parse_kind(value);
            } catch (const std::exception& e) {
                throw ParseError(fmt::format("line {}: {}", line_no, e.what()), line_no);
            }
            if (k != out.rule.kind())
                throw ParseError(fmt::format("line {}: stated kind {} but rule is {}", line_no, value,
                                             kind_name(out.rule.kind())),
                                 line_no);
        } else {
            throw ParseError(fmt::format("line {}: unknown field '{}'", line_no, key), line_no);
        }
    }
    if (!have_supp || !have_hc || !have_sc)
        throw ParseError(fmt::format("line {}: supp, hc and sc are required", line_no), line_no);
    return out;
}

std::vector<RuleLine> read_rule_file(std::istream& in, Vocabulary& vocab) {
    std::vector<RuleLine> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.push_back(parse_rule_line(t, vocab, line_no));
    }
    return out;
}

}  // namespace rulehier
