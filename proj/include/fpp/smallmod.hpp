#pragma once

// 64-bit modular kernel used on the hot scan paths. Everything here assumes
// the modulus fits in 62 bits so that sums of two reduced values never wrap.

#include <cstdint>

namespace fpp {

inline constexpr uint64_t kSmallModLimit = uint64_t(1) << 62;

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t n) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % n);
}

inline uint64_t addmod_u64(uint64_t a, uint64_t b, uint64_t n) {
    // valid for a, b < n < 2^63
    uint64_t s = a + b;
    return s >= n ? s - n : s;
}

inline uint64_t submod_u64(uint64_t a, uint64_t b, uint64_t n) {
    return a >= b ? a - b : a + n - b;
}

uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t n);

// Jacobi symbol J(a/n) for odd n >= 1.
int jacobi_u64(uint64_t a, uint64_t n);

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime_u64(uint64_t n);

// Element of Z_n[sqrt(c)], coordinates reduced mod n. The (n, c) context is
// carried separately so grids of elements stay two words wide.
struct Quad64 {
    uint64_t a = 0;
    uint64_t b = 0;
    bool operator==(const Quad64&) const = default;
};

struct QuadCtx64 {
    uint64_t n;  // odd, < 2^62
    uint64_t c;  // radicand, reduced mod n on use

    Quad64 one() const { return {1 % n, 0}; }

    Quad64 mul(const Quad64& x, const Quad64& y) const {
        uint64_t bb = mulmod_u64(x.b, y.b, n);
        return {addmod_u64(mulmod_u64(x.a, y.a, n), mulmod_u64(bb, c % n, n), n),
                addmod_u64(mulmod_u64(x.a, y.b, n), mulmod_u64(x.b, y.a, n), n)};
    }

    Quad64 pow(Quad64 z, uint64_t e) const {
        Quad64 r = one();
        while (e) {
            if (e & 1) r = mul(r, z);
            z = mul(z, z);
            e >>= 1;
        }
        return r;
    }

    Quad64 conj(const Quad64& z) const { return {z.a, z.b ? n - z.b : 0}; }

    uint64_t norm(const Quad64& z) const {
        return submod_u64(mulmod_u64(z.a, z.a, n),
                          mulmod_u64(mulmod_u64(z.b, z.b, n), c % n, n), n);
    }
};

} // namespace fpp
