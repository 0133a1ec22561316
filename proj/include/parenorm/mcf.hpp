#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "parenorm/errors.hpp"
#include "parenorm/numtypes.hpp"

namespace parenorm {

// ============================================================================
// Signed continued fractions <(a_1:e_1)...(a_n:e_n)> with a_j >= 2, e_j = +-1.
// All arithmetic here is exact (big integers / big rationals).
// ============================================================================

struct McfEntry {
    int64_t a = 2;
    int sign = +1;  // +1 or -1

    bool operator==(const McfEntry&) const = default;
};

struct Mcf {
    std::vector<McfEntry> entries;

    Mcf() = default;
    explicit Mcf(std::vector<McfEntry> e) : entries(std::move(e)) {}

    int64_t height() const { return int64_t(entries.size()); }
    bool empty() const { return entries.empty(); }

    // Throws DomainError if any a_j < 2 or a sign is not +-1.
    void validate() const;

    bool operator==(const Mcf&) const = default;
};

// Textual form "(2:+)(3:-)"; the empty word serializes to "".
std::string to_string(const Mcf& w);
Mcf parse_mcf(const std::string& text);

// Numerator/denominator tables p_j, q_j for j = -1..n.
// p_{-1}=1, p_0=0, q_{-1}=0, q_0=1, then the signed recurrence.
struct Convergents {
    std::vector<BigInt> p;  // p[j+1] holds p_j
    std::vector<BigInt> q;

    const BigInt& p_at(int64_t j) const { return p[size_t(j + 1)]; }
    const BigInt& q_at(int64_t j) const { return q[size_t(j + 1)]; }
    int64_t height() const { return int64_t(p.size()) - 2; }
};

// Signature E(w) = (-1)^n prod e_j.  E(empty) = +1.
int signature(const Mcf& w);

std::pair<Convergents, int> convergents_and_signature(const Mcf& w);

// Exact 2x2 integer matrix acting as z -> (tl z + tr) / (bl z + br).
struct MoebiusMatrix {
    BigInt tl, tr, bl, br;

    BigInt det() const { return tl * br - tr * bl; }

    // Exact evaluation; throws PoleError when the denominator vanishes.
    BigRat apply(const BigRat& z) const;
    Cplx apply(const Cplx& z) const;

    MoebiusMatrix operator*(const MoebiusMatrix& rhs) const;

    static MoebiusMatrix identity();
    // diag(c, 1): z -> c z
    static MoebiusMatrix scaling(const BigInt& c);

    bool operator==(const MoebiusMatrix&) const = default;
};

// [[E p_{n-1}, p_n], [E q_{n-1}, q_n]]; determinant is +1 for every finite w.
MoebiusMatrix mobius_of(const Mcf& w);

BigRat eval_mu(const Mcf& w, const BigRat& z);
Cplx eval_mu(const Mcf& w, const Cplx& z);

// Exact Moebius inverse: the z with eval_mu(w, z) = x.
BigRat eval_mu_inverse(const Mcf& w, const BigRat& x);

// Flip the first sign; involution.  mu_{w*}(z) = -mu_w(-z).
Mcf conjugate(const Mcf& w);

// (head of height m, tail of height n-m).  Throws on m out of [0, n].
std::pair<Mcf, Mcf> split(const Mcf& w, int64_t m);

// Nearest-integer expansion of a rational in (-1, 1): eval_mu(result, 0) == x
// exactly.  Ties at half-integers round away from zero; entries below 2 are
// raised to 2.
Mcf expand_rational(const BigRat& x);

}  // namespace parenorm
