#include "fpp/ntkernel.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "fpp/smallmod.hpp"

namespace fpp {

mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& n) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), n.get_mpz_t());
    return r;
}

namespace {

mpz_class powm(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
    return powmod(b, e, m);
}

bool fits_u64(const mpz_class& n) {
    return n >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

uint64_t to_u64(const mpz_class& n) {
    // unsigned long is 64-bit here, so this is exact for any n < 2^64
    return mpz_get_ui(n.get_mpz_t());
}

} // namespace

uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t n) {
    uint64_t r = 1 % n;
    base %= n;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, n);
        base = mulmod_u64(base, base, n);
        exp >>= 1;
    }
    return r;
}

int jacobi_u64(uint64_t a, uint64_t n) {
    a %= n;
    int t = 1;
    while (a) {
        while ((a & 1) == 0) {
            a >>= 1;
            uint64_t m8 = n & 7;
            if (m8 == 3 || m8 == 5) t = -t;
        }
        std::swap(a, n);
        if ((a & 3) == 3 && (n & 3) == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // deterministic base set for 64-bit inputs
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

int jacobi(const mpz_class& a, const mpz_class& n) {
    if (n <= 0 || mpz_even_p(n.get_mpz_t()))
        throw InvalidInput("jacobi: modulus must be odd and positive");
    return mpz_jacobi(a.get_mpz_t(), n.get_mpz_t());
}

mpz_class isqrt(const mpz_class& n) {
    if (n < 0) throw InvalidInput("isqrt: negative argument");
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_perfect_square(const mpz_class& n) {
    if (n < 0) throw InvalidInput("is_perfect_square: negative argument");
    mpz_class r = isqrt(n);
    return r * r == n;
}

bool is_probable_prime(const mpz_class& n) {
    if (n < 2) return false;
    if (fits_u64(n)) return is_prime_u64(to_u64(n));
    return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

const std::vector<uint32_t>& small_primes() {
    static const std::vector<uint32_t> table = [] {
        const uint32_t limit = 1'000'000;
        std::vector<bool> comp(limit + 1, false);
        std::vector<uint32_t> primes;
        for (uint32_t i = 2; i <= limit; ++i) {
            if (comp[i]) continue;
            primes.push_back(i);
            for (uint64_t j = uint64_t(i) * i; j <= limit; j += i) comp[j] = true;
        }
        return primes;
    }();
    return table;
}

void for_primes_in(uint64_t lo, uint64_t hi,
                   const std::function<void(uint64_t)>& fn) {
    if (lo < 2) lo = 2;
    if (hi < lo) return;
    if (hi > 1'000'000'000'000ull)
        throw InvalidInput("for_primes_in: range exceeds 10^12 sieve limit");
    const auto& base = small_primes();
    const uint64_t segment = 1 << 18;
    std::vector<bool> comp;
    for (uint64_t s = lo; s <= hi; s += segment) {
        uint64_t e = std::min(hi, s + segment - 1);
        comp.assign(e - s + 1, false);
        for (uint32_t p : base) {
            uint64_t pp = uint64_t(p) * p;
            if (pp > e) break;
            uint64_t start = std::max(pp, (s + p - 1) / p * p);
            for (uint64_t j = start; j <= e; j += p) comp[j - s] = true;
        }
        for (uint64_t v = s; v <= e; ++v)
            if (!comp[v - s]) fn(v);
    }
}

std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi) {
    std::vector<uint64_t> out;
    for_primes_in(lo, hi, [&](uint64_t p) { out.push_back(p); });
    return out;
}

uint64_t count_primes_in(uint64_t lo, uint64_t hi) {
    uint64_t n = 0;
    for_primes_in(lo, hi, [&](uint64_t) { ++n; });
    return n;
}

std::vector<uint64_t> odd_primes_below(uint64_t bound) {
    std::vector<uint64_t> out;
    if (bound > 3) for_primes_in(3, bound - 1, [&](uint64_t p) { out.push_back(p); });
    return out;
}

mpz_class Factorization::reassemble() const {
    mpz_class r = cofactor;
    for (const auto& [p, e] : factors)
        for (unsigned i = 0; i < e; ++i) r *= p;
    return r;
}

bool Factorization::has_prime(const mpz_class& p) const {
    return std::any_of(factors.begin(), factors.end(),
                       [&](const auto& fe) { return fe.first == p; });
}

namespace {

// Pollard rho with Floyd cycle detection; deterministic in (c, cap).
// Returns 0 when the iteration cap runs out without a split.
uint64_t rho_u64(uint64_t n, uint64_t c, uint64_t cap, uint64_t& used) {
    uint64_t x = 2, y = 2, d = 1, i = 0;
    c %= n;
    if (c == 0) c = 1;
    while (d == 1 && i < cap) {
        x = addmod_u64(mulmod_u64(x, x, n), c, n);
        y = addmod_u64(mulmod_u64(y, y, n), c, n);
        y = addmod_u64(mulmod_u64(y, y, n), c, n);
        d = std::gcd(x > y ? x - y : y - x, n);
        ++i;
    }
    used += i;
    return (d != 1 && d != n) ? d : 0;
}

mpz_class rho_mpz(const mpz_class& n, uint64_t c, uint64_t cap, uint64_t& used) {
    mpz_class x = 2, y = 2, d = 1, diff;
    uint64_t i = 0;
    while (d == 1 && i < cap) {
        x = (x * x + c) % n;
        y = (y * y + c) % n;
        y = (y * y + c) % n;
        diff = x > y ? x - y : y - x;
        mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        ++i;
    }
    used += i;
    return (d != 1 && d != n) ? d : 0;
}

// splits every composite on the stack into primes, or gives up into cofactor
void split_parts(std::vector<mpz_class> stack, const FactorBudget& budget,
                 uint64_t& iters_used, std::map<mpz_class, unsigned>& primes,
                 mpz_class& cofactor) {
    while (!stack.empty()) {
        mpz_class m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (is_probable_prime(m)) {
            primes[m] += 1;
            continue;
        }
        mpz_class f = 0;
        for (uint64_t attempt = 0; iters_used < budget.rho_iterations; ++attempt) {
            uint64_t c = budget.seed + 0x9e3779b97f4a7c15ull * (attempt + 1);
            uint64_t cap = budget.rho_iterations - iters_used;
            if (fits_u64(m)) {
                uint64_t g = rho_u64(to_u64(m), c, cap, iters_used);
                if (g) f = mpz_class(static_cast<unsigned long>(g));
            } else {
                f = rho_mpz(m, c, cap, iters_used);
            }
            if (f != 0) break;
        }
        if (f == 0) {
            cofactor *= m;
            continue;
        }
        stack.push_back(f);
        stack.push_back(m / f);
    }
}

} // namespace

Factorization factorize(const mpz_class& n, const FactorBudget& budget) {
    if (n < 1) throw InvalidInput("factorize: argument must be positive");
    Factorization out;
    out.value = n;
    if (n == 1) return out;

    std::map<mpz_class, unsigned> primes;
    mpz_class rem = n;

    auto strip = [&](const mpz_class& p) {
        unsigned e = 0;
        while (mpz_divisible_p(rem.get_mpz_t(), p.get_mpz_t())) {
            rem /= p;
            ++e;
        }
        if (e) primes[p] += e;
    };

    strip(2);
    const auto& table = small_primes();
    for (uint32_t p : table) {
        if (p == 2) continue;
        if (p > budget.trial_bound) break;
        if (mpz_class(p) * p > rem) break;
        if (mpz_divisible_ui_p(rem.get_mpz_t(), p)) strip(p);
    }

    if (rem > 1) {
        if (is_probable_prime(rem)) {
            primes[rem] += 1;
        } else if (mpz_class(budget.trial_bound) * budget.trial_bound >= rem) {
            // trial division ran past sqrt(rem), so rem is prime
            primes[rem] += 1;
        } else {
            uint64_t used = 0;
            mpz_class cofactor = 1;
            split_parts({rem}, budget, used, primes, cofactor);
            out.cofactor = cofactor;
        }
    }

    out.factors.assign(primes.begin(), primes.end());
    return out;
}

mpz_class sqrt_mod(const mpz_class& c, const mpz_class& p) {
    if (p < 3 || mpz_even_p(p.get_mpz_t()) || !is_probable_prime(p))
        throw InvalidInput("sqrt_mod: modulus must be an odd prime");
    mpz_class a = c % p;
    if (a < 0) a += p;
    if (jacobi(a, p) != 1)
        throw InvalidInput("sqrt_mod: argument is not a quadratic residue");

    mpz_class d;
    if (p % 4 == 3) {
        d = powm(a, (p + 1) / 4, p);
    } else {
        // Tonelli-Shanks
        mpz_class q = p - 1;
        unsigned s = 0;
        while (mpz_even_p(q.get_mpz_t())) {
            q /= 2;
            ++s;
        }
        mpz_class z = 2;
        while (jacobi(z, p) != -1) ++z;
        mpz_class m = s, cc = powm(z, q, p), t = powm(a, q, p),
                  r = powm(a, (q + 1) / 2, p);
        while (t != 1) {
            mpz_class t2 = t;
            unsigned i = 0;
            while (t2 != 1) {
                t2 = t2 * t2 % p;
                ++i;
            }
            mpz_class b = cc;
            for (mpz_class j = 0; j < m - i - 1; ++j) b = b * b % p;
            m = i;
            cc = b * b % p;
            t = t * cc % p;
            r = r * b % p;
        }
        d = r;
    }
    return std::min(d, p - d);
}

mpz_class mult_order(const mpz_class& w, const mpz_class& p,
                     const FactorBudget& budget) {
    if (p < 3 || mpz_even_p(p.get_mpz_t()) || !is_probable_prime(p))
        throw InvalidInput("mult_order: modulus must be an odd prime");
    mpz_class wr = w % p;
    if (wr < 0) wr += p;
    if (wr == 0) throw InvalidInput("mult_order: argument shares a factor with p");

    Factorization f = factorize(p - 1, budget);
    if (!f.complete())
        throw BudgetExceeded("mult_order: p-1 resists factorization within budget");
    mpz_class e = p - 1;
    for (const auto& [ell, k] : f.factors) {
        for (unsigned i = 0; i < k; ++i) {
            mpz_class cand = e / ell;
            if (powm(wr, cand, p) == 1)
                e = cand;
            else
                break;
        }
    }
    return e;
}

namespace {

void check_constraint(const CrtConstraint& c) {
    if (c.modulus < 1 || c.residue < 0 || c.residue >= c.modulus)
        throw InvalidInput("crt: constraint requires 0 <= residue < modulus");
}

} // namespace

CrtResult crt_combine(const std::vector<CrtConstraint>& constraints) {
    CrtResult out;
    CrtConstraint acc{0, 1};
    for (size_t i = 0; i < constraints.size(); ++i) {
        const CrtConstraint& c = constraints[i];
        check_constraint(c);
        mpz_class g, s, t;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(),
                   acc.modulus.get_mpz_t(), c.modulus.get_mpz_t());
        mpz_class diff = c.residue - acc.residue;
        if (diff % g != 0) {
            out.conflict_gcd = g;
            out.conflict_index = i;
            return out;
        }
        mpz_class lcm = acc.modulus / g * c.modulus;
        // x = acc.residue + acc.modulus * ((diff/g * s) mod (c.modulus/g))
        mpz_class step = c.modulus / g;
        mpz_class k = diff / g % step * (s % step) % step;
        if (k < 0) k += step;
        acc.residue = (acc.residue + acc.modulus * k) % lcm;
        acc.modulus = lcm;
    }
    out.combined = acc;
    return out;
}

std::optional<CrtConstraint> solve_linear_congruence(const mpz_class& k,
                                                     const mpz_class& r,
                                                     const mpz_class& m) {
    if (m < 1) throw InvalidInput("solve_linear_congruence: modulus must be >= 1");
    if (m == 1) return CrtConstraint{0, 1};
    mpz_class kk = k % m;
    if (kk < 0) kk += m;
    mpz_class rr = r % m;
    if (rr < 0) rr += m;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), kk.get_mpz_t(), m.get_mpz_t());
    if (rr % g != 0) return std::nullopt;
    mpz_class m2 = m / g, k2 = kk / g, r2 = rr / g;
    if (m2 == 1) return CrtConstraint{0, 1};
    mpz_class inv;
    if (!mpz_invert(inv.get_mpz_t(), k2.get_mpz_t(), m2.get_mpz_t()))
        throw Error("solve_linear_congruence: inverse must exist after reduction");
    return CrtConstraint{r2 * inv % m2, m2};
}

bool is_square_free(uint64_t c, const FactorBudget& budget) {
    if (c == 0) return false;
    if (c < 4) return true;
    Factorization f = factorize(mpz_class(static_cast<unsigned long>(c)), budget);
    for (const auto& [p, e] : f.factors)
        if (e > 1) return false;
    if (!f.complete()) {
        // screened only: reject at least perfect-square remnants
        if (is_perfect_square(f.cofactor)) return false;
    }
    return true;
}

} // namespace fpp
