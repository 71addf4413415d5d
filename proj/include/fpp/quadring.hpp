#pragma once

// Arithmetic in Z[sqrt(c)] and Z_n[sqrt(c)]. Values are immutable after
// construction; coordinates of modular elements are kept reduced in [0, n).

#include <cstdint>
#include <optional>
#include <string>

#include <gmpxx.h>

#include "fpp/errors.hpp"
#include "fpp/ntkernel.hpp"

namespace fpp {

inline constexpr uint64_t kDefaultGrowthBound = uint64_t(1) << 20;

// Exact element a + b*sqrt(c) of Z[sqrt(c)]; c >= 2 and square-free.
struct QuadraticInteger {
    mpz_class a;
    mpz_class b;
    uint64_t c;

    QuadraticInteger(mpz_class a_, mpz_class b_, uint64_t c_);
    bool operator==(const QuadraticInteger&) const = default;
};

QuadraticInteger conjugate(const QuadraticInteger& z);
mpz_class norm(const QuadraticInteger& z); // a^2 - b^2*c, exact (may be negative)
QuadraticInteger qmul_exact(const QuadraticInteger& x, const QuadraticInteger& y);

// z^k with exact integer coordinates. Coordinates grow like k*log(a+b*sqrt(c)),
// so k is capped; exceeding the cap throws GrowthBoundExceeded.
QuadraticInteger qpow_exact(const QuadraticInteger& z, uint64_t k,
                            uint64_t growth_bound = kDefaultGrowthBound);

// Element of Z_n[sqrt(c)] for odd n >= 3.
struct ModularQuadratic {
    mpz_class a;
    mpz_class b;
    mpz_class n;
    uint64_t c;

    ModularQuadratic(mpz_class a_, mpz_class b_, mpz_class n_, uint64_t c_);
    static ModularQuadratic identity(const mpz_class& n, uint64_t c);

    bool operator==(const ModularQuadratic&) const = default;

    // canonical text form "a+b*sqrt(c) mod n"
    std::string str() const;
    // canonical decimal tuple form "(a, b, c, n)"
    std::string tuple_str() const;
};

ModularQuadratic qmul(const ModularQuadratic& x, const ModularQuadratic& y);
ModularQuadratic qpow(const ModularQuadratic& z, const mpz_class& e);
ModularQuadratic conjugate(const ModularQuadratic& z);
mpz_class norm(const ModularQuadratic& z); // a^2 - b^2*c reduced into [0, n)

// Image of z under Z_p[sqrt(c)] -> Z_p x Z_p when c is a square mod p.
struct SplitPair {
    mpz_class w1; // a + b*d mod p
    mpz_class w2; // a - b*d mod p
    mpz_class p;
    mpz_class d; // canonical root of c mod p
};

// Requires prime modulus and J(c/p) = +1. d is computed via sqrt_mod when
// not supplied; a supplied d must satisfy d^2 = c mod p.
SplitPair split(const ModularQuadratic& z,
                const std::optional<mpz_class>& d = std::nullopt);

} // namespace fpp
