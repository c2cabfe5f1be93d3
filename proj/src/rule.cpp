#include "rulehier/rule.hpp"

#include <algorithm>
#include <unordered_map>

namespace rulehier {

std::string_view kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::CAR: return "CAR";
        case RuleKind::OAR: return "OAR";
        case RuleKind::HAR: return "HAR";
        case RuleKind::BAR: return "BAR";
        case RuleKind::INSR: return "INSR";
    }
    return "?";
}

RuleKind parse_kind(std::string_view s) {
    for (auto k : {RuleKind::CAR, RuleKind::OAR, RuleKind::HAR, RuleKind::BAR, RuleKind::INSR})
        if (kind_name(k) == s) return k;
    throw RuleError("unknown rule kind: " + std::string(s));
}

Rule::Rule(Atom head, std::vector<Atom> body) : head_(head), body_(std::move(body)) {
    auto head_ok = [](const Term& t, std::uint32_t var) {
        return t.is_const() || t.id == var;
    };
    if (!head_ok(head_.subject, kVarX) || !head_ok(head_.object, kVarY))
        throw RuleError("head must have the form r(X|const, Y|const)");
    for (const auto& a : body_) {
        for (const Term& t : {a.subject, a.object}) {
            if (t.is_var() && t.id == kVarX && !head_.mentions(Term::x()))
                throw RuleError("X occurs in the body but not in the head");
            if (t.is_var() && t.id == kVarY && !head_.mentions(Term::y()))
                throw RuleError("Y occurs in the body but not in the head");
        }
    }
    normalize();
    kind_ = classify();
}

Rule Rule::top(RelationId target) {
    return Rule(Atom{target, Term::x(), Term::y()});
}

void Rule::normalize() {
    std::unordered_map<std::uint32_t, std::uint32_t> rename;
    std::uint32_t next = kFirstBodyVar;
    auto fix = [&](Term& t) {
        if (!t.is_var() || t.id < kFirstBodyVar) return;
        auto [it, fresh] = rename.emplace(t.id, next);
        if (fresh) ++next;
        t.id = it->second;
    };
    for (auto& a : body_) {
        fix(a.subject);
        fix(a.object);
    }
    var_count_ = next;

    std::vector<EntityId> seen;
    auto note = [&](const Term& t) {
        if (t.is_const() && std::find(seen.begin(), seen.end(), t.id) == seen.end()) seen.push_back(t.id);
    };
    note(head_.subject);
    note(head_.object);
    for (const auto& a : body_) {
        note(a.subject);
        note(a.object);
    }
    deduction_level_ = static_cast<std::uint32_t>(seen.size());
}

RuleKind Rule::classify() const {
    if (deduction_level_ == 0) {
        bool closed = false;
        if (!body_.empty()) {
            bool has_x = false, has_y = false;
            for (const auto& a : body_) {
                has_x = has_x || a.mentions(Term::x());
                has_y = has_y || a.mentions(Term::y());
            }
            closed = has_x && has_y;
        }
        return closed ? RuleKind::CAR : RuleKind::OAR;
    }
    const bool head_anchored = head_.subject.is_var() && head_.object.is_const();
    if (head_anchored && deduction_level_ == 1) return RuleKind::HAR;
    if (head_anchored && deduction_level_ == 2) {
        auto dangling = dangling_term(*this);
        if (dangling && dangling->is_const() && *dangling != head_.object && occurrences(*dangling) == 1)
            return RuleKind::BAR;
    }
    return RuleKind::INSR;
}

std::vector<EntityId> Rule::constants() const {
    std::vector<EntityId> out;
    auto note = [&](const Term& t) {
        if (t.is_const() && std::find(out.begin(), out.end(), t.id) == out.end()) out.push_back(t.id);
    };
    note(head_.subject);
    note(head_.object);
    for (const auto& a : body_) {
        note(a.subject);
        note(a.object);
    }
    return out;
}

bool Rule::mentions(const Term& t) const {
    if (head_.mentions(t)) return true;
    return std::any_of(body_.begin(), body_.end(), [&](const Atom& a) { return a.mentions(t); });
}

std::size_t Rule::occurrences(const Term& t) const {
    std::size_t n = (head_.subject == t) + (head_.object == t);
    for (const auto& a : body_) n += (a.subject == t) + (a.object == t);
    return n;
}

std::strong_ordering operator<=>(const Rule& a, const Rule& b) {
    if (auto c = a.head_ <=> b.head_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.body_.begin(), a.body_.end(), b.body_.begin(),
                                                  b.body_.end());
}

std::size_t RuleHash::operator()(const Rule& r) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
        h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    };
    auto mix_atom = [&](const Atom& a) {
        mix(a.pred);
        mix((static_cast<std::uint64_t>(a.subject.kind) << 32) | a.subject.id);
        mix((static_cast<std::uint64_t>(a.object.kind) << 32) | a.object.id);
    };
    mix_atom(r.head());
    for (const auto& a : r.body()) mix_atom(a);
    return static_cast<std::size_t>(h);
}

bool is_connected(const Rule& rule) {
    const Atom* prev = &rule.head();
    for (const auto& a : rule.body()) {
        if (!prev->mentions(a.subject) && !prev->mentions(a.object)) return false;
        prev = &a;
    }
    return true;
}

bool is_straight(const Rule& rule) {
    std::vector<std::pair<Term, int>> counts;
    auto bump = [&](const Term& t) {
        for (auto& [term, n] : counts) {
            if (term == t) return ++n <= 2;
        }
        counts.emplace_back(t, 1);
        return true;
    };
    if (!bump(rule.head().subject) || !bump(rule.head().object)) return false;
    for (const auto& a : rule.body())
        if (!bump(a.subject) || !bump(a.object)) return false;
    return true;
}

std::optional<Term> dangling_term(const Rule& rule) {
    if (rule.length() == 0) return std::nullopt;
    const Atom& last = rule.body().back();
    const Atom& prev = rule.length() == 1 ? rule.head() : rule.body()[rule.length() - 2];
    const bool subj_shared = prev.mentions(last.subject);
    const bool obj_shared = prev.mentions(last.object);
    if (subj_shared == obj_shared) return std::nullopt;
    const Term t = subj_shared ? last.object : last.subject;
    if (rule.occurrences(t) != 1) return std::nullopt;
    return t;
}

std::optional<Rule> generalize(const Path& path) {
    const EntityId e0 = path.head.head;
    const EntityId e1 = path.head.tail;
    if (e0 == e1) return std::nullopt;

    std::unordered_map<EntityId, Term> terms{{e0, Term::x()}, {e1, Term::y()}};
    std::uint32_t next = kFirstBodyVar;
    auto term_of = [&](EntityId e) {
        auto [it, fresh] = terms.emplace(e, Term::var(next));
        if (fresh) ++next;
        return it->second;
    };
    std::vector<Atom> body;
    body.reserve(path.body.size());
    for (const auto& t : path.body) {
        Term s = term_of(t.head);
        Term o = term_of(t.tail);
        body.push_back(Atom{t.rel, s, o});
    }
    Rule rule(Atom{path.head.rel, Term::x(), Term::y()}, std::move(body));
    if (!is_connected(rule) || !is_straight(rule)) return std::nullopt;
    return rule;
}

std::pair<SpecializationTemplate, SpecializationTemplate> specialize_templates(const Rule& oar) {
    if (oar.kind() != RuleKind::OAR) throw RuleError("specialization requires an OAR");
    if (oar.length() == 0) throw RuleError("the top rule has no body atom to anchor a BAR");
    auto dangling = dangling_term(oar);
    if (!dangling || !dangling->is_var() || dangling->id < kFirstBodyVar)
        throw RuleError("OAR has no dangling body variable");
    return {SpecializationTemplate{oar, {kVarY}}, SpecializationTemplate{oar, {kVarY, dangling->id}}};
}

std::optional<Rule> instantiate(const Rule& rule, std::span<const Binding> bindings) {
    if (bindings.empty()) return rule;
    auto existing = rule.constants();
    for (std::size_t i = 0; i < bindings.size(); ++i) {
        const auto& b = bindings[i];
        if (b.var >= rule.variable_count() || !rule.mentions(Term::var(b.var))) return std::nullopt;
        if (std::find(existing.begin(), existing.end(), b.value) != existing.end()) return std::nullopt;
        for (std::size_t j = 0; j < i; ++j)
            if (bindings[j].value == b.value || bindings[j].var == b.var) return std::nullopt;
    }
    auto subst = [&](Term t) {
        if (t.is_var()) {
            for (const auto& b : bindings)
                if (b.var == t.id) return Term::constant(b.value);
        }
        return t;
    };
    Atom head{rule.head().pred, subst(rule.head().subject), subst(rule.head().object)};
    std::vector<Atom> body;
    for (const auto& a : rule.body()) body.push_back(Atom{a.pred, subst(a.subject), subst(a.object)});
    return Rule(head, std::move(body));
}

std::optional<Rule> instantiate(const SpecializationTemplate& tmpl, std::span<const EntityId> values) {
    if (values.size() != tmpl.slots.size()) throw RuleError("binding count does not match template slots");
    std::vector<Binding> bindings;
    for (std::size_t i = 0; i < values.size(); ++i) bindings.push_back({tmpl.slots[i], values[i]});
    return instantiate(tmpl.base, bindings);
}

Rule skolemize(const Rule& rule) {
    auto sk = [](Term t) { return t.is_var() ? Term::constant(kSkolemBase + t.id) : t; };
    Atom head{rule.head().pred, sk(rule.head().subject), sk(rule.head().object)};
    std::vector<Atom> body;
    for (const auto& a : rule.body()) body.push_back(Atom{a.pred, sk(a.subject), sk(a.object)});
    return Rule(head, std::move(body));
}

Rule reverse_body(const Rule& rule) {
    std::vector<Atom> body(rule.body().rbegin(), rule.body().rend());
    return Rule(rule.head(), std::move(body));
}

Rule variabilize(const Rule& rule, EntityId c) {
    const Term constant = Term::constant(c);
    Term replacement = Term::var(rule.variable_count());
    if (rule.head().subject == constant) replacement = Term::x();
    if (rule.head().object == constant) replacement = Term::y();
    auto swap = [&](Term t) { return t == constant ? replacement : t; };
    Atom head{rule.head().pred, swap(rule.head().subject), swap(rule.head().object)};
    std::vector<Atom> body;
    for (const auto& a : rule.body()) body.push_back(Atom{a.pred, swap(a.subject), swap(a.object)});
    return Rule(head, std::move(body));
}

Rule drop_last_atom(const Rule& rule) {
    if (rule.length() == 0) throw RuleError("cannot drop an atom from an empty body");
    std::vector<Atom> body(rule.body().begin(), rule.body().end() - 1);
    return Rule(rule.head(), std::move(body));
}

}  // namespace rulehier
