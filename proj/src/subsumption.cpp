#include "rulehier/subsumption.hpp"

#include <utility>

namespace rulehier {

namespace {

// Substitution from subsumer terms to subsumee terms. With `injective` set,
// a reverse map keeps distinct subsumer terms (variables and constants
// alike) on distinct subsumee terms.
class Unifier {
public:
    explicit Unifier(bool injective) : injective_(injective) {}

    bool bind(const Term& from, const Term& to) {
        if (from.is_const()) {
            if (from != to) return false;
            return !injective_ || reserve(to, from);
        }
        for (const auto& [f, t] : forward_) {
            if (f == from) return t == to;
        }
        if (injective_ && !reserve(to, from)) return false;
        forward_.emplace_back(from, to);
        return true;
    }

    bool unify(const Atom& p, const Atom& q) {
        return p.pred == q.pred && bind(p.subject, q.subject) && bind(p.object, q.object);
    }

private:
    bool reserve(const Term& to, const Term& from) {
        for (const auto& [t, f] : reverse_) {
            if (t == to) return f == from;
        }
        reverse_.emplace_back(to, from);
        return true;
    }

    bool injective_;
    std::vector<std::pair<Term, Term>> forward_;
    std::vector<std::pair<Term, Term>> reverse_;
};

bool eliminate(const Rule& p, const Rule& sq, std::size_t i, const Unifier& u,
               std::vector<EliminationStep>* trace) {
    if (i > p.length()) return true;
    const Atom& pa = p.atom(i);
    for (std::size_t j = 1; j <= sq.length(); ++j) {
        const Atom& qa = sq.atom(j);
        if (qa.pred != pa.pred) continue;
        Unifier next = u;
        bool ok = next.unify(pa, qa);
        if (trace) trace->push_back({i, j, ok});
        if (ok && eliminate(p, sq, i + 1, next, trace)) return true;
    }
    return false;
}

bool positional(const Rule& p, const Rule& q) {
    if (p.length() > q.length()) return false;
    Unifier u(true);
    for (std::size_t i = 0; i <= p.length(); ++i) {
        if (!u.unify(p.atom(i), q.atom(i))) return false;
    }
    return true;
}

}  // namespace

bool theta_subsumes(const Rule& p, const Rule& q) {
    if (p.target() != q.target()) return false;
    const Rule sq = skolemize(q);
    const std::size_t n = p.length();
    const std::size_t m = sq.length();
    if (n > 0 && m == 0) return false;

    // Odometer over every assignment of p's body atoms to S(q)'s body atoms.
    std::vector<std::size_t> choice(n, 1);
    for (;;) {
        Unifier u(false);
        bool ok = u.unify(p.head(), sq.head());
        for (std::size_t i = 0; ok && i < n; ++i) ok = u.unify(p.atom(i + 1), sq.atom(choice[i]));
        if (ok) return true;
        std::size_t k = 0;
        while (k < n && choice[k] == m) choice[k++] = 1;
        if (k == n) return false;
        ++choice[k];
    }
}

bool oi_subsumes(const Rule& p, const Rule& q, std::vector<EliminationStep>* trace) {
    if (p.target() != q.target()) return false;
    const Rule sq = skolemize(q);
    Unifier u(true);
    bool head_ok = u.unify(p.head(), sq.head());
    if (trace) trace->push_back({0, 0, head_ok});
    return head_ok && eliminate(p, sq, 1, u, trace);
}

bool sa_subsumes(const Rule& p, const Rule& q) {
    return positional(p, q);
}

bool sa_subsumes_complete(const Rule& p, const Rule& q) {
    return positional(p, q) || positional(p, reverse_body(q));
}

bool a_subsumes(const Rule& p, const Rule& q) {
    return q.length() == p.length() + 1 && p.deduction_level() == q.deduction_level() && sa_subsumes(p, q);
}

bool i_subsumes(const Rule& p, const Rule& q) {
    return p.length() == q.length() && q.deduction_level() == p.deduction_level() + 1 && sa_subsumes(p, q);
}

bool i_subsumes_as_printed(const Rule& p, const Rule& q) {
    return p.length() == q.length() && p.deduction_level() == q.deduction_level() + 1 && sa_subsumes(p, q);
}

}  // namespace rulehier
