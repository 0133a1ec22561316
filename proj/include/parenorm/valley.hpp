#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parenorm/mcf.hpp"
#include "parenorm/numtypes.hpp"

namespace parenorm {

// ============================================================================
// Sector arithmetic for the angle coordinate, valley-type combinatorics, and
// the renormalization tower built from a stream prefix.
// ============================================================================

enum class Side { plus, minus };

// A_r^+ = { a != 0 : |a| < r, |arg a| < pi/4 },  A_r^- = -A_r^+.
struct AngleSector {
    double radius = 0.5;
    Side side = Side::plus;

    bool contains(Cplx alpha) const;
};

bool in_sector_union(Cplx alpha, double radius);

// T(a) = -1/a on the plus sector, 1/a on the minus sector.
// Throws DomainError for a = 0 or a outside A_{1/2} on the stated side.
Cplx t_map(Cplx alpha, Side side);
BigRat t_map(const BigRat& alpha, Side side);

// Finite prefix of an infinite-height word.  Entries obey the same
// constraints as Mcf; the height bound is the prefix length.
struct McfStream {
    std::vector<McfEntry> prefix;
    std::string provenance = "synthetic";

    int64_t length() const { return int64_t(prefix.size()); }
    void validate() const;
};

McfStream stream_from_mcf(const Mcf& w, std::string provenance);

// Value of the prefix read as a finite word: mu_prefix(0), exact.
BigRat stream_value(const McfStream& x);

struct ValleyParams {
    int64_t N = 0;        // entries above N count as large
    int64_t M = 0;        // window length (window j..j+M must contain one)
    int64_t horizon = 1;  // how many windows are examined

    void validate() const;
};

// True iff every window a_j..a_{j+M}, 1 <= j <= horizon, has an entry > N.
// Requires prefix length >= horizon + M.
bool is_valley_type(const McfStream& x, const ValleyParams& params);

// Residual stream after renormalizing away the head of height m: drops
// entries a_1..a_{m+1} and flips the sign carried by a_{m+2}.  This is the
// expansion of a_{m+1} + T(alpha_m), which equals minus the tail fraction.
McfStream vt_step(const McfStream& x, int64_t m);

// alpha_m = e_{m+1} E(head_m) / (a_{m+1} + mu_{tail_{m+1}}(E(w) E(tail_{m+1}) z)),
// the fiber coordinate satisfying mu_w(z) = mu_{head_m}(alpha_m).
BigRat alpha_split(const Mcf& w, int64_t m, const BigRat& alpha);
Cplx alpha_split(const Mcf& w, int64_t m, Cplx alpha);

struct TowerLevel {
    Mcf head;              // entries before the first large entry of the window
    int64_t big_entry;     // the large entry the cut lands on
    int window_index = 0;  // 1-based position of the large entry in its window
    double alpha_bound = 0.0;  // 1/(big_entry - 1) <= 1/N
    BigRat alpha_value;        // E(head) mu_{tail-from-big}(0) on the prefix
};

// Repeated head/residual decomposition of a valley-type stream.  The cut is
// placed immediately after the first entry > N in each window.  Throws
// DomainError when a window has no large entry, ConvergenceError when the
// prefix runs out before reaching the requested depth.
std::vector<TowerLevel> build_tower(const McfStream& x, const ValleyParams& params,
                                    int64_t depth);

}  // namespace parenorm
