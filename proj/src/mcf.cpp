#include "parenorm/mcf.hpp"

#include <cctype>
#include <cstdlib>

namespace parenorm {

void Mcf::validate() const {
    for (const auto& e : entries) {
        if (e.a < 2) throw DomainError("mcf entry a < 2");
        if (e.sign != 1 && e.sign != -1) throw DomainError("mcf sign not +-1");
    }
}

std::string to_string(const Mcf& w) {
    std::string out;
    for (const auto& e : w.entries) {
        out += "(" + std::to_string(e.a) + ":" + (e.sign > 0 ? "+" : "-") + ")";
    }
    return out;
}

Mcf parse_mcf(const std::string& text) {
    Mcf w;
    size_t i = 0;
    auto skip_ws = [&] { while (i < text.size() && std::isspace(unsigned(text[i]))) ++i; };
    skip_ws();
    while (i < text.size()) {
        if (text[i] != '(') throw DomainError("mcf parse: expected '(' in \"" + text + "\"");
        ++i;
        size_t colon = text.find(':', i);
        size_t close = text.find(')', i);
        if (colon == std::string::npos || close == std::string::npos || colon > close)
            throw DomainError("mcf parse: malformed entry in \"" + text + "\"");
        McfEntry e;
        e.a = std::strtoll(text.substr(i, colon - i).c_str(), nullptr, 10);
        std::string sig = text.substr(colon + 1, close - colon - 1);
        if (sig == "+" || sig == "+1") e.sign = +1;
        else if (sig == "-" || sig == "-1") e.sign = -1;
        else throw DomainError("mcf parse: bad sign \"" + sig + "\"");
        w.entries.push_back(e);
        i = close + 1;
        skip_ws();
    }
    w.validate();
    return w;
}

int signature(const Mcf& w) {
    int s = (w.height() % 2 == 0) ? +1 : -1;
    for (const auto& e : w.entries) s *= e.sign;
    return s;
}

std::pair<Convergents, int> convergents_and_signature(const Mcf& w) {
    w.validate();
    const int64_t n = w.height();
    Convergents cv;
    cv.p.resize(size_t(n) + 2);
    cv.q.resize(size_t(n) + 2);
    cv.p[0] = 1; cv.p[1] = 0;  // p_{-1}, p_0
    cv.q[0] = 0; cv.q[1] = 1;  // q_{-1}, q_0
    for (int64_t j = 1; j <= n; ++j) {
        const auto& e = w.entries[size_t(j - 1)];
        cv.p[size_t(j + 1)] = e.a * cv.p[size_t(j)] + e.sign * cv.p[size_t(j - 1)];
        cv.q[size_t(j + 1)] = e.a * cv.q[size_t(j)] + e.sign * cv.q[size_t(j - 1)];
    }
    return {std::move(cv), signature(w)};
}

BigRat MoebiusMatrix::apply(const BigRat& z) const {
    BigRat den = BigRat(bl) * z + BigRat(br);
    if (den == 0) throw PoleError("moebius evaluation at pole");
    return (BigRat(tl) * z + BigRat(tr)) / den;
}

Cplx MoebiusMatrix::apply(const Cplx& z) const {
    Cplx den = to_double(bl) * z + to_double(br);
    if (den == Cplx(0.0, 0.0)) throw PoleError("moebius evaluation at pole");
    return (to_double(tl) * z + to_double(tr)) / den;
}

MoebiusMatrix MoebiusMatrix::operator*(const MoebiusMatrix& rhs) const {
    return MoebiusMatrix{tl * rhs.tl + tr * rhs.bl, tl * rhs.tr + tr * rhs.br,
                         bl * rhs.tl + br * rhs.bl, bl * rhs.tr + br * rhs.br};
}

MoebiusMatrix MoebiusMatrix::identity() { return {1, 0, 0, 1}; }

MoebiusMatrix MoebiusMatrix::scaling(const BigInt& c) { return {c, 0, 0, 1}; }

MoebiusMatrix mobius_of(const Mcf& w) {
    auto [cv, sig] = convergents_and_signature(w);
    const int64_t n = w.height();
    return MoebiusMatrix{sig * cv.p_at(n - 1), cv.p_at(n),
                         sig * cv.q_at(n - 1), cv.q_at(n)};
}

BigRat eval_mu(const Mcf& w, const BigRat& z) { return mobius_of(w).apply(z); }

Cplx eval_mu(const Mcf& w, const Cplx& z) { return mobius_of(w).apply(z); }

BigRat eval_mu_inverse(const Mcf& w, const BigRat& x) {
    // inverse of [[a,b],[c,d]] is [[d,-b],[-c,a]] up to the unit determinant
    MoebiusMatrix m = mobius_of(w);
    MoebiusMatrix inv{m.br, -m.tr, -m.bl, m.tl};
    return inv.apply(x);
}

Mcf conjugate(const Mcf& w) {
    Mcf out = w;
    if (!out.entries.empty()) out.entries[0].sign = -out.entries[0].sign;
    return out;
}

std::pair<Mcf, Mcf> split(const Mcf& w, int64_t m) {
    if (m < 0 || m > w.height()) throw DomainError("split index out of range");
    Mcf head, tail;
    head.entries.assign(w.entries.begin(), w.entries.begin() + m);
    tail.entries.assign(w.entries.begin() + m, w.entries.end());
    return {std::move(head), std::move(tail)};
}

Mcf expand_rational(const BigRat& x) {
    if (boost::multiprecision::abs(rat_num(x)) >= rat_den(x))
        throw DomainError("expand_rational requires |x| < 1");
    Mcf w;
    BigRat t = x;
    while (t != 0) {
        int sign = (t > 0) ? +1 : -1;
        BigRat u = 1 / boost::multiprecision::abs(t);
        // nearest integer, ties away from zero: floor(u + 1/2) with u > 1
        BigInt a = (2 * rat_num(u) + rat_den(u)) / (2 * rat_den(u));
        if (a < 2) a = 2;
        t = u - BigRat(a);  // in (-1, 1); numerator magnitude strictly decreases
        w.entries.push_back(McfEntry{a.convert_to<int64_t>(), sign});
    }
    return w;
}

}  // namespace parenorm
