#pragma once

// Number-theory kernel: Jacobi symbols, budgeted factorization, modular
// square roots, multiplicative orders, CRT folding and a segmented prime
// sieve. All functions are pure; randomized internals are driven by the
// explicit seed in FactorBudget.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "fpp/errors.hpp"

namespace fpp {

struct FactorBudget {
    uint64_t trial_bound = 1'000'000;    // trial division by primes <= bound
    uint64_t rho_iterations = 4'000'000; // total rho iterations per factorize()
    uint64_t seed = 1;
};

struct Factorization {
    mpz_class value;
    // (prime, exponent) pairs, primes strictly ascending
    std::vector<std::pair<mpz_class, unsigned>> factors;
    mpz_class cofactor = 1; // 1 iff fully factored; otherwise composite remnant

    bool complete() const { return cofactor == 1; }
    mpz_class reassemble() const;
    bool has_prime(const mpz_class& p) const;
};

// Jacobi symbol J(a/n); n must be odd and positive. 0 iff gcd(a,n) > 1.
int jacobi(const mpz_class& a, const mpz_class& n);

mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& n);

mpz_class isqrt(const mpz_class& n);
bool is_perfect_square(const mpz_class& n);

// Miller-Rabin probable-prime check (deterministic below 2^64).
bool is_probable_prime(const mpz_class& n);

// Trial division to budget.trial_bound, then seeded Brent rho under the
// iteration cap. Incompleteness is reported through cofactor, never dropped.
Factorization factorize(const mpz_class& n, const FactorBudget& budget = {});

// Square root of c modulo an odd prime p with J(c/p) = +1; returns the
// smaller of the two roots.
mpz_class sqrt_mod(const mpz_class& c, const mpz_class& p);

// Least k >= 1 with w^k = 1 mod p, for odd prime p and gcd(w,p) = 1.
// Throws BudgetExceeded when p-1 cannot be fully factored.
mpz_class mult_order(const mpz_class& w, const mpz_class& p,
                     const FactorBudget& budget = {});

struct CrtConstraint {
    mpz_class residue; // 0 <= residue < modulus
    mpz_class modulus; // >= 1
    bool operator==(const CrtConstraint&) const = default;
};

struct CrtResult {
    std::optional<CrtConstraint> combined; // nullopt => incompatible
    mpz_class conflict_gcd;                // violated gcd when incompatible
    size_t conflict_index = 0;             // constraint that failed to fold
    bool compatible() const { return combined.has_value(); }
};

// Folds constraints left to right; incompatibility is a normal return.
CrtResult crt_combine(const std::vector<CrtConstraint>& constraints);

// Solutions x of k*x = r (mod m), as a constraint mod m/gcd(k,m);
// nullopt when gcd(k,m) does not divide r.
std::optional<CrtConstraint> solve_linear_congruence(const mpz_class& k,
                                                     const mpz_class& r,
                                                     const mpz_class& m);

// Primes below 10^6, computed once and cached.
const std::vector<uint32_t>& small_primes();

// Calls fn for every prime in [lo, hi], ascending. Segmented, so memory is
// proportional to the segment, not to hi.
void for_primes_in(uint64_t lo, uint64_t hi,
                   const std::function<void(uint64_t)>& fn);

std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi);
uint64_t count_primes_in(uint64_t lo, uint64_t hi);

// Square-free check, exact for c < 2^20, trial-bound screening above.
bool is_square_free(uint64_t c, const FactorBudget& budget = {});

// Ascending odd primes (3, 5, 7, ...) used as radicand candidates.
std::vector<uint64_t> odd_primes_below(uint64_t bound);

} // namespace fpp
