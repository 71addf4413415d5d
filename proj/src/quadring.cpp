#include "fpp/quadring.hpp"

#include <sstream>

namespace fpp {

namespace {

mpz_class reduce(mpz_class v, const mpz_class& n) {
    v %= n;
    if (v < 0) v += n;
    return v;
}

void check_radicand(uint64_t c) {
    if (c < 2) throw InvalidInput("radicand c must be >= 2");
    if (!is_square_free(c)) throw InvalidInput("radicand c must be square-free");
}

} // namespace

QuadraticInteger::QuadraticInteger(mpz_class a_, mpz_class b_, uint64_t c_)
    : a(std::move(a_)), b(std::move(b_)), c(c_) {
    check_radicand(c);
}

QuadraticInteger conjugate(const QuadraticInteger& z) {
    return {z.a, -z.b, z.c};
}

mpz_class norm(const QuadraticInteger& z) {
    return z.a * z.a - z.b * z.b * mpz_class(static_cast<unsigned long>(z.c));
}

QuadraticInteger qmul_exact(const QuadraticInteger& x, const QuadraticInteger& y) {
    if (x.c != y.c) throw InvalidInput("qmul_exact: mismatched radicand");
    return {x.a * y.a + x.b * y.b * mpz_class(static_cast<unsigned long>(x.c)),
            x.a * y.b + x.b * y.a, x.c};
}

QuadraticInteger qpow_exact(const QuadraticInteger& z, uint64_t k,
                            uint64_t growth_bound) {
    if (k > growth_bound)
        throw GrowthBoundExceeded("qpow_exact: exponent above coordinate growth bound");
    QuadraticInteger r{1, 0, z.c};
    QuadraticInteger base = z;
    while (k) {
        if (k & 1) r = qmul_exact(r, base);
        base = qmul_exact(base, base);
        k >>= 1;
    }
    return r;
}

ModularQuadratic::ModularQuadratic(mpz_class a_, mpz_class b_, mpz_class n_,
                                   uint64_t c_)
    : n(std::move(n_)), c(c_) {
    if (n < 3 || mpz_even_p(n.get_mpz_t()))
        throw InvalidInput("modulus must be odd and >= 3");
    check_radicand(c);
    a = reduce(std::move(a_), n);
    b = reduce(std::move(b_), n);
}

ModularQuadratic ModularQuadratic::identity(const mpz_class& n, uint64_t c) {
    return {1, 0, n, c};
}

std::string ModularQuadratic::str() const {
    std::ostringstream os;
    os << a << "+" << b << "*sqrt(" << c << ") mod " << n;
    return os.str();
}

std::string ModularQuadratic::tuple_str() const {
    std::ostringstream os;
    os << "(" << a << ", " << b << ", " << c << ", " << n << ")";
    return os.str();
}

ModularQuadratic qmul(const ModularQuadratic& x, const ModularQuadratic& y) {
    if (x.n != y.n || x.c != y.c)
        throw InvalidInput("qmul: mismatched modulus or radicand");
    mpz_class cc = static_cast<unsigned long>(x.c);
    mpz_class ra = (x.a * y.a + (x.b * y.b % x.n) * cc) % x.n;
    mpz_class rb = (x.a * y.b + x.b * y.a) % x.n;
    return {std::move(ra), std::move(rb), x.n, x.c};
}

ModularQuadratic qpow(const ModularQuadratic& z, const mpz_class& e) {
    if (e < 0) throw InvalidInput("qpow: exponent must be non-negative");
    ModularQuadratic r = ModularQuadratic::identity(z.n, z.c);
    ModularQuadratic base = z;
    size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (e == 0) return r;
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(e.get_mpz_t(), i)) r = qmul(r, base);
        if (i + 1 < bits) base = qmul(base, base);
    }
    return r;
}

ModularQuadratic conjugate(const ModularQuadratic& z) {
    return {z.a, z.b == 0 ? mpz_class(0) : z.n - z.b, z.n, z.c};
}

mpz_class norm(const ModularQuadratic& z) {
    mpz_class cc = static_cast<unsigned long>(z.c);
    return reduce(z.a * z.a - z.b * z.b * cc, z.n);
}

SplitPair split(const ModularQuadratic& z, const std::optional<mpz_class>& d_in) {
    const mpz_class& p = z.n;
    if (!is_probable_prime(p)) throw InvalidInput("split: modulus must be prime");
    mpz_class c = static_cast<unsigned long>(z.c);
    if (jacobi(c, p) != 1)
        throw InvalidInput("split: J(c/p) = +1 required");
    mpz_class d = d_in ? *d_in : sqrt_mod(c, p);
    if (reduce(d * d, p) != reduce(c, p))
        throw InvalidInput("split: supplied d is not a root of c");
    return {reduce(z.a + z.b * d, p), reduce(z.a - z.b * d, p), p, d};
}

} // namespace fpp
