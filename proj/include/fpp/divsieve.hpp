#pragma once

// Divisor-constraint machinery: gcd-candidate extraction from exact powers,
// the split-prime and prime-power range scans, CRT-driven cofactor
// enumeration, and the layered exclusion pipeline that ties them together.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "fpp/frobtest.hpp"
#include "fpp/ntkernel.hpp"
#include "fpp/quadring.hpp"

namespace fpp {

inline constexpr const char* kReportFormatVersion = "fpp/1";

struct GcdCandidateReport {
    mpz_class q;
    mpz_class a, b;
    uint64_t c = 0;
    enum class Branch { minus, plus } branch = Branch::minus; // minus <=> J(c/q) = +1
    std::pair<mpz_class, mpz_class> power_coords; // exact (a_k, b_k), k = q -+ 1
    mpz_class gcd_value;
    std::vector<mpz_class> candidate_primes; // all primes dividing gcd_value
    std::vector<mpz_class> viable_primes;    // candidates minus 2 and divisors of q*c
    mpz_class unfactored_cofactor = 1;

    std::string to_json() const;
};

// Candidate prime divisors p of a would-be pseudoprime n = p*q, extracted
// from gcds of exact coordinates of z^(q-+1) (branch by J(c/q)).
GcdCandidateReport gcd_candidates(const mpz_class& q, const mpz_class& a,
                                  const mpz_class& b, uint64_t c,
                                  const FactorBudget& budget = {},
                                  uint64_t growth_bound = kDefaultGrowthBound);

struct SplitPrimeHit {
    uint64_t p = 0;
    uint64_t c = 0;
    uint64_t d = 0; // canonical root of c mod p
    uint64_t ord_gamma = 0; // ord(w1/w2, p)
    uint64_t ord_delta = 0; // ord(w1*w2, p)
    CrtConstraint q_constraint; // q = q0 mod lcm(ord_gamma, ord_delta)
    bool operator==(const SplitPrimeHit&) const = default;
};

struct ScanSkip {
    uint64_t p = 0;
    uint64_t c = 0;
    std::string reason;
    bool operator==(const ScanSkip&) const = default;
};

struct ScanConfig {
    FactorBudget budget{};
    unsigned workers = 0; // 0 = hardware concurrency
    uint64_t segment_size = 1 << 15;
    std::string checkpoint_path; // append-only JSONL, empty = disabled
};

struct ScanReport {
    std::string scan_kind; // "split" | "prime_power"
    std::vector<uint64_t> c_list;
    uint64_t p_lo = 0, p_hi = 0;
    // completed sub-ranges, inclusive, ascending, disjoint; tiles [p_lo,p_hi]
    // exactly when the scan ran to completion
    std::vector<std::pair<uint64_t, uint64_t>> ranges_covered;
    std::vector<SplitPrimeHit> split_hits;               // split scan
    std::vector<std::pair<uint64_t, uint64_t>> pp_hits;  // (p, c), prime-power scan
    std::vector<ScanSkip> skipped;
    // config echo
    uint64_t seed = 0;
    uint64_t trial_bound = 0;
    uint64_t rho_iterations = 0;
    uint64_t segment_size = 0;

    std::string to_json() const;
    std::string hits_csv() const;
};

// Single-prime split check: J(c/p) must be +1. Returns a hit when
// gcd(ord_gamma, ord_delta) <= 2 and the q-congruences are compatible.
// Throws BudgetExceeded if p-1 resists factorization.
std::optional<SplitPrimeHit> check_split_prime(uint64_t p, uint64_t c,
                                               const FactorBudget& budget = {});

// Direct admissibility predicate: w1^q = w2 and w2^q = w1 mod p.
bool split_admissible_q(uint64_t p, uint64_t c, uint64_t d, const mpz_class& q);

ScanReport scan_split_primes(const std::vector<uint64_t>& c_list, uint64_t p_lo,
                             uint64_t p_hi, const ScanConfig& cfg = {});

// Flags primes p with J(c/p) = -1 whose z = 1+sqrt(c) satisfies
// z^(p+1) = N(z) mod p^2 (candidates for squared divisors).
ScanReport scan_prime_power(const std::vector<uint64_t>& c_list, uint64_t p_lo,
                            uint64_t p_hi, const ScanConfig& cfg = {});

// The scan predicate for a single prime (J(c/p) = -1 required).
bool prime_power_condition(uint64_t p, uint64_t c);

// Union of two reports with equal kind/c_list over disjoint ranges.
ScanReport merge_scan_reports(const ScanReport& x, const ScanReport& y);

struct OrderRecord {
    mpz_class p;
    mpz_class order;           // ord(z) in Z_p[sqrt(c)]^*
    Factorization group_order; // factored exponent of the group
    mpz_class a, b;            // the element
    uint64_t c = 0;
};

// Multiplicative order of z in Z_p[sqrt(c)]^* for prime p; divides p^2-1
// when J(c/p) = -1 and p-1 when J(c/p) = +1.
OrderRecord ord_quad(const ModularQuadratic& z, const FactorBudget& budget = {});

// One member of the fixed factor set for a cofactor search: a plain prime
// enters through the order of z mod p; a split-prime hit enters through its
// stored q-congruence.
struct FactorSpec {
    uint64_t p = 0;
    std::optional<SplitPrimeHit> hit;
};

struct QSearchResult {
    uint64_t c = 0;
    mpz_class n_max;
    std::vector<uint64_t> primes; // with multiplicity
    std::vector<CrtConstraint> per_prime_constraints; // solved, on the free cofactor q
    std::optional<CrtConstraint> combined;
    bool proven_empty = false; // incompatible constraints
    mpz_class violated_gcd;
    size_t conflict_index = 0;
    uint64_t q_tested = 0;
    uint64_t skipped_jacobi = 0; // q where J(c/n) != -1, not testable as f(a,b,c)
    std::vector<mpz_class> candidate_qs; // populated up to candidate_cap
    std::vector<FrobeniusVerdict> passing; // congruence-passing composites
    std::vector<ScanSkip> skipped;

    std::string to_json() const;
};

// Enumerates cofactors q with n = q * prod(p_i) <= n_max forced by the
// CRT-combined per-prime congruences, and runs the (a,b,c) test on each.
QSearchResult crt_q_search(const std::vector<FactorSpec>& factor_set, uint64_t c,
                           const mpz_class& n_max,
                           const FactorBudget& budget = {},
                           uint64_t candidate_cap = 100'000);

struct ExclusionConfig {
    uint64_t c_max = 128;       // odd primes c < c_max
    mpz_class n_max = 1'000'000;
    uint64_t q_max = 4096;      // phase 1: all odd q <= q_max
    uint64_t small_factor_bound = 17;
    uint64_t scan_hi = 100'000; // phase 2 scans cover [3, scan_hi]
    uint64_t single_hi = 0;     // 0 = isqrt(n_max)
    uint64_t pair_hi = 300;
    uint64_t triple_hi = 150;
    uint64_t growth_bound = kDefaultGrowthBound;
    FactorBudget budget{};
    unsigned workers = 0;
};

struct ExclusionReport {
    ExclusionConfig config;
    // phase 1: gcd-candidate sweep over odd q <= q_max
    uint64_t phase1_pairs_tested = 0;   // (q,c) pairs processed
    uint64_t phase1_products_tested = 0; // candidate n = p*q runs
    std::vector<ScanSkip> phase1_unfactored; // gcds with cofactor > 1 (p=q slot, c)
    // phase 2
    ScanReport split_scan;
    ScanReport prime_power_scan;
    // phase 3
    uint64_t singles_searched = 0;
    uint64_t pairs_searched = 0;
    uint64_t triples_searched = 0;
    uint64_t multiplicity_searched = 0; // split hits taken to powers
    uint64_t cofactors_tested = 0;
    std::vector<ScanSkip> phase3_skipped;
    std::vector<FrobeniusVerdict> counterexamples;
    // claim
    bool covered = true; // all phases complete, no skips that puncture coverage
    std::vector<std::string> uncovered; // explicit descriptions of gaps

    std::string to_json() const;
};

// Layered exclusion at configured desk scale. The final claim -- no FPP with
// c < c_max, n <= n_max and no prime factor <= small_factor_bound -- is only
// asserted when every phase covered its range; anything skipped lands in the
// uncovered annex.
ExclusionReport exclusion_pipeline(const ExclusionConfig& cfg);

// Re-verifies a serialized report by recomputation: every hit is recomputed,
// every certificate re-checked, and covered ranges must tile the declared
// range. Returns human-readable failure descriptions; empty = pass.
std::vector<std::string> verify_report(const std::string& json_text,
                                       const FactorBudget& budget = {});

ScanReport scan_report_from_json(const std::string& json_text);

} // namespace fpp
