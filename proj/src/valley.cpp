#include "parenorm/valley.hpp"

#include <cmath>
#include <utility>

#include "parenorm/errors.hpp"

namespace parenorm {

bool AngleSector::contains(Cplx alpha) const {
    if (alpha == Cplx(0.0, 0.0)) return false;
    Cplx probe = (side == Side::plus) ? alpha : -alpha;
    return std::abs(alpha) < radius && std::abs(std::arg(probe)) < kPi / 4.0;
}

bool in_sector_union(Cplx alpha, double radius) {
    return AngleSector{radius, Side::plus}.contains(alpha) ||
           AngleSector{radius, Side::minus}.contains(alpha);
}

Cplx t_map(Cplx alpha, Side side) {
    AngleSector sector{0.5, side};
    if (alpha == Cplx(0.0, 0.0)) throw DomainError("t_map at alpha = 0");
    if (!sector.contains(alpha))
        throw DomainError("t_map: alpha outside A_{1/2} on the requested side");
    return (side == Side::plus) ? -1.0 / alpha : 1.0 / alpha;
}

BigRat t_map(const BigRat& alpha, Side side) {
    if (alpha == 0) throw DomainError("t_map at alpha = 0");
    bool positive = alpha > 0;
    if (side == Side::plus && !positive)
        throw DomainError("t_map: negative alpha on plus side");
    if (side == Side::minus && positive)
        throw DomainError("t_map: positive alpha on minus side");
    if (2 * boost::multiprecision::abs(rat_num(alpha)) >= rat_den(alpha))
        throw DomainError("t_map: |alpha| >= 1/2");
    return (side == Side::plus) ? BigRat(-1) / alpha : BigRat(1) / alpha;
}

void McfStream::validate() const {
    for (const auto& e : prefix) {
        if (e.a < 2) throw DomainError("stream entry a < 2");
        if (e.sign != 1 && e.sign != -1) throw DomainError("stream sign not +-1");
    }
}

McfStream stream_from_mcf(const Mcf& w, std::string provenance) {
    McfStream x;
    x.prefix = w.entries;
    x.provenance = std::move(provenance);
    return x;
}

BigRat stream_value(const McfStream& x) {
    Mcf w;
    w.entries = x.prefix;
    return eval_mu(w, BigRat(0));
}

void ValleyParams::validate() const {
    if (N < 0 || M < 0 || horizon < 1) throw DomainError("bad valley params");
}

bool is_valley_type(const McfStream& x, const ValleyParams& params) {
    params.validate();
    x.validate();
    if (x.length() < params.horizon + params.M)
        throw DomainError("is_valley_type: prefix shorter than horizon + M");
    for (int64_t j = 1; j <= params.horizon; ++j) {
        bool found = false;
        for (int64_t jp = j; jp <= j + params.M; ++jp) {
            if (x.prefix[size_t(jp - 1)].a > params.N) { found = true; break; }
        }
        if (!found) return false;
    }
    return true;
}

McfStream vt_step(const McfStream& x, int64_t m) {
    x.validate();
    // the residual must keep at least two entries, so m stops at length - 3
    if (m < 0 || m >= x.length() - 2)
        throw DomainError("vt_step: insufficient prefix");
    McfStream out;
    out.provenance = x.provenance;
    out.prefix.assign(x.prefix.begin() + m + 1, x.prefix.end());
    out.prefix[0].sign = -out.prefix[0].sign;
    return out;
}

namespace {

template <typename Scalar>
Scalar alpha_split_impl(const Mcf& w, int64_t m, const Scalar& alpha) {
    if (m < 0 || m >= w.height())
        throw DomainError("alpha_split: index out of range");
    auto [head, rest] = split(w, m);
    const McfEntry& next = rest.entries[0];
    Mcf tail;  // entries m+2..n
    tail.entries.assign(rest.entries.begin() + 1, rest.entries.end());
    Scalar inner = eval_mu(tail, Scalar(signature(w) * signature(tail)) * alpha);
    Scalar denom = Scalar(next.a) + inner;
    if (denom == Scalar(0)) throw PoleError("alpha_split: pole");
    return Scalar(next.sign * signature(head)) / denom;
}

}  // namespace

BigRat alpha_split(const Mcf& w, int64_t m, const BigRat& alpha) {
    return alpha_split_impl<BigRat>(w, m, alpha);
}

Cplx alpha_split(const Mcf& w, int64_t m, Cplx alpha) {
    return alpha_split_impl<Cplx>(w, m, alpha);
}

std::vector<TowerLevel> build_tower(const McfStream& x, const ValleyParams& params,
                                    int64_t depth) {
    params.validate();
    x.validate();
    std::vector<TowerLevel> tower;
    McfStream cur = x;
    for (int64_t level = 0; level < depth; ++level) {
        if (cur.length() < params.M + 3)
            throw ConvergenceError("build_tower: horizon exhausted at depth " +
                                   std::to_string(level));
        int64_t big_pos = 0;  // 1-based position of the first large entry
        for (int64_t i = 1; i <= params.M + 1; ++i) {
            if (cur.prefix[size_t(i - 1)].a > params.N) { big_pos = i; break; }
        }
        if (big_pos == 0)
            throw DomainError("build_tower: stream is not valley-type at depth " +
                              std::to_string(level));
        TowerLevel lvl;
        lvl.head.entries.assign(cur.prefix.begin(), cur.prefix.begin() + big_pos - 1);
        lvl.big_entry = cur.prefix[size_t(big_pos - 1)].a;
        lvl.window_index = int(big_pos);
        lvl.alpha_bound = 1.0 / double(lvl.big_entry - 1);
        McfStream big_tail;
        big_tail.prefix.assign(cur.prefix.begin() + big_pos - 1, cur.prefix.end());
        lvl.alpha_value = BigRat(signature(lvl.head)) * stream_value(big_tail);
        tower.push_back(std::move(lvl));
        cur = vt_step(cur, big_pos - 1);
    }
    return tower;
}

}  // namespace parenorm
