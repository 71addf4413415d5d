#pragma once

// The Frobenius test: canonical form (z = 1+sqrt(c), c auto-selected) and the
// parameterized (a,b,c) form, plus exhaustive liar enumeration.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "fpp/ntkernel.hpp"
#include "fpp/quadring.hpp"

namespace fpp {

enum class VerdictKind {
    composite,
    probable_prime,
    fpp_certificate, // congruence held on a fully factored composite
    candidate_fpp,   // congruence held, compositeness proven, factorization incomplete
};

enum class WitnessKind {
    none,
    even_input,
    perfect_square,
    shared_factor,
    congruence_failed,
    congruence_held,
};

const char* to_string(VerdictKind k);
const char* to_string(WitnessKind w);

struct FrobeniusVerdict {
    VerdictKind kind = VerdictKind::composite;
    WitnessKind witness = WitnessKind::none;
    mpz_class n;
    mpz_class a = 1;
    mpz_class b = 1;
    uint64_t c = 0; // radicand used; 0 when none was selected
    mpz_class shared_factor;
    // z^n mod n and the expected conjugate, recorded when the congruence ran
    std::optional<std::pair<mpz_class, mpz_class>> residue;
    std::optional<std::pair<mpz_class, mpz_class>> expected;
    // z^(n+1) mod n and expected (N(z), 0), from the equivalent n+1 form
    std::optional<std::pair<mpz_class, mpz_class>> residue_n1;
    std::optional<mpz_class> norm_expected;
    std::optional<Factorization> n_factors; // certificate payload

    // single-line JSON record, canonical (sorted keys)
    std::string to_json() const;
};

FrobeniusVerdict verdict_from_json(const std::string& text);

struct CSelection {
    enum class Status { selected, shared_factor, perfect_square };
    Status status = Status::selected;
    uint64_t c = 0;
    mpz_class shared_factor;
};

struct TestConfig {
    uint64_t c_cutoff = 1000;
    FactorBudget budget{};
};

// Smallest odd prime c <= cutoff with J(c/n) = -1, for odd n >= 3.
// A candidate c sharing a proper factor with n short-circuits to a
// shared-factor witness; perfect squares are rejected before the search.
// Throws CutoffExceeded when no candidate works.
CSelection select_c(const mpz_class& n, uint64_t c_cutoff = 1000);

// Canonical test with z = 1 + sqrt(c). Even n > 2 and perfect squares
// resolve to composite; n <= 2 is rejected as out of domain.
FrobeniusVerdict frobenius_test(const mpz_class& n, const TestConfig& cfg = {});

// Parameterized test for z = a + b*sqrt(c). Requires odd non-square n and
// J(c/n) = -1 (throws NonResidueRequired otherwise); proper shared factors
// of a, b, c or N(z) with n give a composite shared-factor verdict. Both the
// direct congruence and the equivalent n+1 form are evaluated and recorded.
FrobeniusVerdict frobenius_test_abc(const mpz_class& n, const mpz_class& a,
                                    const mpz_class& b, uint64_t c,
                                    const TestConfig& cfg = {});

// Fermat check to the base N(z) = a^2 - b^2*c mod n.
// Throws SharedFactor when gcd(N(z), n) > 1.
bool norm_base_fermat(const mpz_class& n, const mpz_class& a,
                      const mpz_class& b, uint64_t c);

struct LiarCensus {
    uint64_t n = 0;
    uint64_t c = 0;
    uint64_t liar_count = 0;         // pairs (a,b) in [0,n)^2 \ {(0,0)} with z^n = conj(z)
    uint64_t coprime_liar_count = 0; // liars with gcd(a,n) = gcd(b,n) = 1
    // enumeration-convention breakdown, documented in reports
    uint64_t zero_a_liars = 0;
    uint64_t zero_b_liars = 0;
    std::vector<std::pair<uint64_t, uint64_t>> liars; // populated when collected
    std::string convention;

    std::string to_json() const;
    std::string to_csv() const; // columns n,c,a,b (collected liars)
};

// Exhaustive enumeration over the (a,b) grid; z = 0 is excluded. The grid is
// partitioned across workers and merged in row order, so results are
// deterministic for any worker count.
LiarCensus count_liars(uint64_t n, uint64_t c, bool collect = false,
                       unsigned workers = 0, uint64_t guard = 100'000);

} // namespace fpp
