#include "parenorm/numtypes.hpp"

#include <cmath>

#include "parenorm/errors.hpp"

namespace parenorm {

BigRat parse_rational(const std::string& text) {
    if (text.empty()) throw DomainError("empty rational literal");
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return BigRat(BigInt(text));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        return make_rat(num, den);
    } catch (const std::exception&) {
        throw DomainError("bad rational literal: " + text);
    }
}

std::string format_rational(const BigRat& v) {
    if (rat_den(v) == 1) return rat_num(v).str();
    return rat_num(v).str() + "/" + rat_den(v).str();
}

Cplx unit_exp(double t) {
    double frac = t - std::floor(t);
    return Cplx(std::cos(kTwoPi * frac), std::sin(kTwoPi * frac));
}

Cplx unit_exp(const BigRat& t) {
    BigInt num = rat_num(t), den = rat_den(t);
    BigInt rem = num % den;  // truncated toward zero
    if (rem < 0) rem += den;
    return unit_exp(BigRat(rem, den).convert_to<double>());
}

}  // namespace parenorm
