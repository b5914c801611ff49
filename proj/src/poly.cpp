#include "sncres/poly.hpp"
#include "sncres/errors.hpp"

#include <algorithm>
#include <numeric>

namespace sncres {

bool MonoOrder::less(const Exponents& a, const Exponents& b) const {
    if (kind == lex) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    }
    // graded reverse lexicographic
    long da = std::accumulate(a.begin(), a.end(), 0L);
    long db = std::accumulate(b.begin(), b.end(), 0L);
    if (da != db) return da < db;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
}

Poly Poly::constant(const std::vector<std::string>& vars, const Rat& c) {
    Poly p(vars);
    if (c != 0) p.terms_[Exponents(vars.size(), 0)] = c;
    return p;
}

Poly Poly::variable(const std::vector<std::string>& vars, const std::string& name) {
    Poly p(vars);
    auto it = std::find(vars.begin(), vars.end(), name);
    if (it == vars.end()) throw input_error("unknown variable: " + name);
    Exponents e(vars.size(), 0);
    e[static_cast<std::size_t>(it - vars.begin())] = 1;
    p.terms_[e] = 1;
    return p;
}

Poly Poly::monomial(const std::vector<std::string>& vars, Exponents e, const Rat& c) {
    if (e.size() != vars.size()) throw input_error("exponent vector length mismatch");
    Poly p(vars);
    if (c != 0) p.terms_[std::move(e)] = c;
    return p;
}

bool Poly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const Exponents& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](int k) { return k == 0; });
}

Rat Poly::constant_value() const {
    if (terms_.empty()) return Rat(0);
    if (!is_constant()) throw internal_error("constant_value on non-constant");
    return terms_.begin()->second;
}

int Poly::var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    return it == vars_.end() ? -1 : static_cast<int>(it - vars_.begin());
}

bool Poly::uses_var(std::size_t i) const {
    for (const auto& [e, c] : terms_)
        if (e[i] != 0) return true;
    return false;
}

void Poly::add_term(const Exponents& e, const Rat& c) {
    if (e.size() != vars_.size()) throw internal_error("add_term: bad exponent length");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void Poly::check_same_vars(const Poly& o) const {
    if (vars_ != o.vars_) throw input_error("variable-set mismatch");
}

Poly Poly::operator-() const {
    Poly r(vars_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    check_same_vars(o);
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    check_same_vars(o);
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    check_same_vars(o);
    Poly r(vars_);
    Exponents e(vars_.size());
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Poly Poly::scaled(const Rat& c) const {
    Poly r(vars_);
    if (c == 0) return r;
    for (const auto& [e, k] : terms_) r.terms_[e] = k * c;
    return r;
}

Poly Poly::pow(unsigned long e) const {
    Poly out = Poly::constant(vars_, 1);
    Poly b = *this;
    while (e) {
        if (e & 1UL) out = out * b;
        b = b * b;
        e >>= 1;
    }
    return out;
}

Poly Poly::derivative(const std::string& var) const {
    int i = var_index(var);
    if (i < 0) throw input_error("derivative: unknown variable " + var);
    return derivative(static_cast<std::size_t>(i));
}

Poly Poly::derivative(std::size_t v) const {
    Poly r(vars_);
    for (const auto& [e, c] : terms_) {
        if (e[v] == 0) continue;
        Exponents d = e;
        d[v] -= 1;
        r.add_term(d, c * e[v]);
    }
    return r;
}

Rat Poly::evaluate(const Point& p) const {
    if (p.dim() != vars_.size()) throw input_error("evaluate: point dimension mismatch");
    Rat out = 0;
    for (const auto& [e, c] : terms_) {
        Rat t = c;
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i]) t *= rat_pow(p.coords[i], static_cast<unsigned long>(e[i]));
        out += t;
    }
    return out;
}

Poly Poly::substitute(const std::vector<Poly>& images) const {
    if (images.size() != vars_.size()) throw input_error("substitute: wrong image count");
    const std::vector<std::string>* target = nullptr;
    for (const auto& im : images) {
        if (!target) target = &im.vars();
        else if (im.vars() != *target) throw input_error("substitute: images on different variable sets");
    }
    if (!target) throw input_error("substitute: no variables");
    Poly out(*target);
    for (const auto& [e, c] : terms_) {
        Poly t = Poly::constant(*target, c);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i]) t = t * images[i].pow(static_cast<unsigned long>(e[i]));
        out = out + t;
    }
    return out;
}

Poly Poly::on_vars(const std::vector<std::string>& new_vars) const {
    std::vector<int> pos(vars_.size(), -1);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = std::find(new_vars.begin(), new_vars.end(), vars_[i]);
        if (it != new_vars.end()) {
            pos[i] = static_cast<int>(it - new_vars.begin());
        } else if (uses_var(i)) {
            throw input_error("on_vars: target list drops used variable " + vars_[i]);
        }
    }
    Poly out(new_vars);
    for (const auto& [e, c] : terms_) {
        Exponents ne(new_vars.size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i]) ne[static_cast<std::size_t>(pos[i])] = e[i];
        }
        out.add_term(ne, c);
    }
    return out;
}

Poly Poly::translate(const Point& p) const {
    if (p.dim() != vars_.size()) throw input_error("translate: point dimension mismatch");
    std::vector<Poly> images;
    images.reserve(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        Poly im = Poly::variable(vars_, vars_[i]);
        im.add_term(Exponents(vars_.size(), 0), p.coords[i]);
        images.push_back(im);
    }
    return substitute(images);
}

long Poly::total_degree() const {
    long d = -1;
    for (const auto& [e, c] : terms_)
        d = std::max(d, std::accumulate(e.begin(), e.end(), 0L));
    return d;
}

long Poly::degree_in(std::size_t v) const {
    long d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<long>(e[v]));
    return d;
}

long Poly::order_at_point(const Point& pt) const {
    if (is_zero()) return kOrderInfinity;
    // translate(pt) recentres so that pt becomes the origin
    Poly t = translate(pt);
    long best = kOrderInfinity;
    for (const auto& [e, c] : t.terms())
        best = std::min(best, std::accumulate(e.begin(), e.end(), 0L));
    return best;
}

long Poly::order_along(const std::vector<std::size_t>& var_idxs) const {
    if (is_zero()) return kOrderInfinity;
    long best = kOrderInfinity;
    for (const auto& [e, c] : terms_) {
        long s = 0;
        for (std::size_t v : var_idxs) s += e[v];
        best = std::min(best, s);
    }
    return best;
}

Poly Poly::homogeneous_part(long deg) const {
    Poly out(vars_);
    for (const auto& [e, c] : terms_)
        if (std::accumulate(e.begin(), e.end(), 0L) == deg) out.terms_[e] = c;
    return out;
}

std::pair<Exponents, Rat> Poly::lead(const MonoOrder& ord) const {
    if (is_zero()) throw internal_error("lead of zero polynomial");
    auto best = terms_.begin();
    for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it)
        if (ord.less(best->first, it->first)) best = it;
    return {best->first, best->second};
}

bool Poly::divisible_by_var(std::size_t v) const {
    if (is_zero()) return true;
    for (const auto& [e, c] : terms_)
        if (e[v] == 0) return false;
    return true;
}

Poly Poly::divided_by_var(std::size_t v) const {
    Poly r(vars_);
    for (const auto& [e, c] : terms_) {
        if (e[v] == 0) throw internal_error("divided_by_var: not divisible");
        Exponents d = e;
        d[v] -= 1;
        r.terms_[d] = c;
    }
    return r;
}

Rat Poly::lead_coeff_grevlex() const {
    if (is_zero()) return Rat(0);
    return lead(MonoOrder::Grevlex()).second;
}

Poly Poly::normalized() const {
    if (is_zero()) return *this;
    // lcm of denominators, gcd of numerators, positive leading coefficient
    Int den_lcm = 1, num_gcd = 0;
    for (const auto& [e, c] : terms_) {
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num().get_mpz_t());
    }
    Rat scale(den_lcm, num_gcd);
    scale.canonicalize();
    Poly r = scaled(scale);
    if (sgn(r.lead_coeff_grevlex()) < 0) r = r.scaled(Rat(-1));
    return r;
}

// ---------------------------------------------------------------------------
// division / gcd

bool try_divide(const Poly& f, const Poly& g, Poly& q) {
    if (f.vars() != g.vars()) throw input_error("try_divide: variable-set mismatch");
    if (g.is_zero()) throw input_error("try_divide: division by zero");
    const MonoOrder ord = MonoOrder::Grevlex();
    Poly rem = f;
    Poly quot(f.vars());
    auto [ge, gc] = g.lead(ord);
    while (!rem.is_zero()) {
        auto [re, rc] = rem.lead(ord);
        Exponents d(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) {
            d[i] = re[i] - ge[i];
            if (d[i] < 0) return false;
        }
        Poly m = Poly::monomial(f.vars(), d, rc / gc);
        quot = quot + m;
        rem = rem - m * g;
    }
    q = quot;
    return true;
}

Poly exact_divide(const Poly& f, const Poly& g) {
    Poly q;
    if (!try_divide(f, g, q))
        throw internal_error("exact_divide: division is not exact");
    return q;
}

namespace {

// univariate view in variable v: degree -> coefficient polynomial
std::map<long, Poly> uni_view(const Poly& p, std::size_t v) {
    std::map<long, Poly> out;
    for (const auto& [e, c] : p.terms()) {
        Exponents r = e;
        long d = r[v];
        r[v] = 0;
        auto it = out.find(d);
        if (it == out.end()) {
            Poly coeff(p.vars());
            coeff.add_term(r, c);
            out.emplace(d, std::move(coeff));
        } else {
            it->second.add_term(r, c);
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (it->second.is_zero()) it = out.erase(it);
        else ++it;
    }
    return out;
}

long uni_deg(const std::map<long, Poly>& v) { return v.empty() ? -1 : v.rbegin()->first; }

// pseudo-remainder of f by g in variable v (both nonzero in v)
Poly pseudo_rem(const Poly& f, const Poly& g, std::size_t v) {
    auto fv = uni_view(f, v);
    auto gv = uni_view(g, v);
    long dg = uni_deg(gv);
    Poly lg = gv.rbegin()->second;
    Poly rem = f;
    auto rv = uni_view(rem, v);
    while (uni_deg(rv) >= dg && !rem.is_zero()) {
        long dr = uni_deg(rv);
        Poly lr = rv.rbegin()->second;
        // rem = lg*rem - lr * x^(dr-dg) * g
        Poly x = Poly::variable(f.vars(), f.vars()[v]);
        rem = lg * rem - lr * x.pow(static_cast<unsigned long>(dr - dg)) * g;
        rv = uni_view(rem, v);
    }
    return rem;
}

// content of p wrt variable v: gcd of its univariate coefficients
Poly content_in(const Poly& p, std::size_t v) {
    auto view = uni_view(p, v);
    Poly c(p.vars());
    for (const auto& [d, coeff] : view) {
        c = poly_gcd(c, coeff);
        if (c.is_unit()) break;
    }
    return c;
}

} // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.vars() != b.vars()) throw input_error("poly_gcd: variable-set mismatch");
    if (a.is_zero()) return b.normalized();
    if (b.is_zero()) return a.normalized();
    if (a.is_constant() || b.is_constant())
        return Poly::constant(a.vars(), 1);
    // main variable: the last variable used by both, else last used by either
    std::size_t v = 0;
    bool found = false;
    for (std::size_t i = a.nvars(); i-- > 0;) {
        if (a.uses_var(i) && b.uses_var(i)) { v = i; found = true; break; }
    }
    if (!found) {
        // no common variable: gcd of contents only, which is constant here
        return Poly::constant(a.vars(), 1);
    }
    Poly ca = content_in(a, v), cb = content_in(b, v);
    Poly pa = exact_divide(a, ca), pb = exact_divide(b, cb);
    Poly cont_gcd = poly_gcd(ca, cb);
    // primitive PRS
    Poly f = pa, g = pb;
    if (uni_deg(uni_view(f, v)) < uni_deg(uni_view(g, v))) std::swap(f, g);
    while (!g.is_zero()) {
        Poly r = pseudo_rem(f, g, v);
        f = g;
        if (r.is_zero()) { g = r; break; }
        Poly rc = content_in(r, v);
        g = exact_divide(r, rc).normalized();
    }
    if (uni_deg(uni_view(f, v)) == 0) {
        // primitive parts are coprime in v
        return cont_gcd.normalized();
    }
    Poly fc = content_in(f, v);
    Poly prim = exact_divide(f, fc);
    return (cont_gcd * prim).normalized();
}

Poly squarefree_part(const Poly& p) {
    if (p.is_zero()) throw input_error("squarefree_part of zero");
    if (p.is_constant()) return Poly::constant(p.vars(), 1);
    Poly g(p.vars());
    g = p;
    for (std::size_t v = 0; v < p.nvars(); ++v) {
        if (!p.uses_var(v)) continue;
        g = poly_gcd(g, p.derivative(v));
        if (g.is_unit()) break;
    }
    if (g.is_unit()) return p.normalized();
    return exact_divide(p.normalized(), g).normalized();
}

std::vector<Poly> squarefree_decomposition(const Poly& p) {
    if (p.is_zero()) throw input_error("squarefree_decomposition of zero");
    if (p.is_constant()) return {};
    Poly g = p;
    for (std::size_t v = 0; v < p.nvars(); ++v) {
        if (!p.uses_var(v)) continue;
        g = poly_gcd(g, p.derivative(v));
        if (g.is_unit()) break;
    }
    Poly s = exact_divide(p.normalized(), g.normalized()).normalized(); // prod A_k
    if (g.is_unit()) return {s};
    std::vector<Poly> rec = squarefree_decomposition(g); // rec[j] = A_{j+2-1}
    Poly s2 = Poly::constant(p.vars(), 1);
    for (const auto& a : rec) s2 = s2 * a;
    Poly a1 = exact_divide(s, s2.normalized()).normalized();
    std::vector<Poly> out;
    out.push_back(a1);
    for (auto& a : rec) out.push_back(a);
    return out;
}

} // namespace sncres
