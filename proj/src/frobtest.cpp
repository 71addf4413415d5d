#include "fpp/frobtest.hpp"

#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fpp/smallmod.hpp"
#include "parallel.hpp"

namespace fpp {

using nlohmann::json;

const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::composite: return "composite";
        case VerdictKind::probable_prime: return "probable_prime";
        case VerdictKind::fpp_certificate: return "fpp_certificate";
        case VerdictKind::candidate_fpp: return "candidate_fpp";
    }
    return "?";
}

const char* to_string(WitnessKind w) {
    switch (w) {
        case WitnessKind::none: return "none";
        case WitnessKind::even_input: return "even_input";
        case WitnessKind::perfect_square: return "perfect_square";
        case WitnessKind::shared_factor: return "shared_factor";
        case WitnessKind::congruence_failed: return "congruence_failed";
        case WitnessKind::congruence_held: return "congruence_held";
    }
    return "?";
}

namespace {

std::string dec(const mpz_class& v) { return v.get_str(); }

json pair_json(const std::pair<mpz_class, mpz_class>& p) {
    return json::array({dec(p.first), dec(p.second)});
}

json factorization_json(const Factorization& f) {
    json arr = json::array();
    for (const auto& [p, e] : f.factors) arr.push_back(json::array({dec(p), e}));
    return json{{"factors", arr}, {"cofactor", dec(f.cofactor)}};
}

} // namespace

std::string FrobeniusVerdict::to_json() const {
    json j;
    j["format_version"] = "fpp/1";
    j["report_kind"] = "verdict";
    j["n"] = dec(n);
    j["a"] = dec(a);
    j["b"] = dec(b);
    j["c"] = c;
    j["kind"] = fpp::to_string(kind);
    j["witness"] = fpp::to_string(witness);
    if (witness == WitnessKind::shared_factor) j["shared_factor"] = dec(shared_factor);
    if (residue) j["residue"] = pair_json(*residue);
    if (expected) j["expected"] = pair_json(*expected);
    if (residue_n1) j["residue_n1"] = pair_json(*residue_n1);
    if (norm_expected) j["norm_expected"] = dec(*norm_expected);
    if (n_factors) j["n_factorization"] = factorization_json(*n_factors);
    return j.dump();
}

FrobeniusVerdict verdict_from_json(const std::string& text) {
    json j = json::parse(text);
    FrobeniusVerdict v;
    v.n = mpz_class(j.at("n").get<std::string>());
    v.a = mpz_class(j.at("a").get<std::string>());
    v.b = mpz_class(j.at("b").get<std::string>());
    v.c = j.at("c").get<uint64_t>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "composite") v.kind = VerdictKind::composite;
    else if (kind == "probable_prime") v.kind = VerdictKind::probable_prime;
    else if (kind == "fpp_certificate") v.kind = VerdictKind::fpp_certificate;
    else if (kind == "candidate_fpp") v.kind = VerdictKind::candidate_fpp;
    else throw InvalidInput("verdict_from_json: unknown kind " + kind);
    std::string w = j.at("witness").get<std::string>();
    if (w == "none") v.witness = WitnessKind::none;
    else if (w == "even_input") v.witness = WitnessKind::even_input;
    else if (w == "perfect_square") v.witness = WitnessKind::perfect_square;
    else if (w == "shared_factor") v.witness = WitnessKind::shared_factor;
    else if (w == "congruence_failed") v.witness = WitnessKind::congruence_failed;
    else if (w == "congruence_held") v.witness = WitnessKind::congruence_held;
    else throw InvalidInput("verdict_from_json: unknown witness " + w);
    if (j.contains("shared_factor"))
        v.shared_factor = mpz_class(j.at("shared_factor").get<std::string>());
    auto read_pair = [&](const char* key) -> std::optional<std::pair<mpz_class, mpz_class>> {
        if (!j.contains(key)) return std::nullopt;
        return std::pair{mpz_class(j.at(key).at(0).get<std::string>()),
                         mpz_class(j.at(key).at(1).get<std::string>())};
    };
    v.residue = read_pair("residue");
    v.expected = read_pair("expected");
    v.residue_n1 = read_pair("residue_n1");
    if (j.contains("norm_expected"))
        v.norm_expected = mpz_class(j.at("norm_expected").get<std::string>());
    if (j.contains("n_factorization")) {
        Factorization f;
        f.value = v.n;
        const auto& fj = j.at("n_factorization");
        for (const auto& pe : fj.at("factors"))
            f.factors.emplace_back(mpz_class(pe.at(0).get<std::string>()),
                                   pe.at(1).get<unsigned>());
        f.cofactor = mpz_class(fj.at("cofactor").get<std::string>());
        v.n_factors = std::move(f);
    }
    return v;
}

CSelection select_c(const mpz_class& n, uint64_t c_cutoff) {
    if (n < 3 || mpz_even_p(n.get_mpz_t()))
        throw InvalidInput("select_c: n must be odd and >= 3");
    if (is_perfect_square(n))
        return {CSelection::Status::perfect_square, 0, 0};

    uint64_t last = 0;
    for (uint64_t c : odd_primes_below(c_cutoff + 1)) {
        last = c;
        if (n == static_cast<unsigned long>(c)) continue; // n is this prime
        int j = jacobi(mpz_class(static_cast<unsigned long>(c)), n);
        if (j == -1) return {CSelection::Status::selected, c, 0};
        if (j == 0) {
            // c is prime, so J(c/n) = 0 means c | n, a proper factor here
            return {CSelection::Status::shared_factor, c,
                    mpz_class(static_cast<unsigned long>(c))};
        }
    }
    throw CutoffExceeded("select_c: no admissible c below cutoff", last);
}

FrobeniusVerdict frobenius_test(const mpz_class& n, const TestConfig& cfg) {
    if (n <= 2)
        throw InvalidInput("frobenius_test: domain is odd n >= 3");
    FrobeniusVerdict v;
    v.n = n;
    if (mpz_even_p(n.get_mpz_t())) {
        v.kind = VerdictKind::composite;
        v.witness = WitnessKind::even_input;
        v.shared_factor = 2;
        return v;
    }
    CSelection sel = select_c(n, cfg.c_cutoff);
    if (sel.status == CSelection::Status::perfect_square) {
        v.kind = VerdictKind::composite;
        v.witness = WitnessKind::perfect_square;
        return v;
    }
    if (sel.status == CSelection::Status::shared_factor) {
        v.kind = VerdictKind::composite;
        v.witness = WitnessKind::shared_factor;
        v.shared_factor = sel.shared_factor;
        v.c = sel.c;
        return v;
    }
    v.c = sel.c;

    ModularQuadratic z(1, 1, n, sel.c);
    ModularQuadratic r = qpow(z, n);
    ModularQuadratic want = conjugate(z);
    v.residue = {r.a, r.b};
    v.expected = {want.a, want.b};
    if (!(r == want)) {
        v.kind = VerdictKind::composite;
        v.witness = WitnessKind::congruence_failed;
        return v;
    }
    if (is_probable_prime(n)) {
        v.kind = VerdictKind::probable_prime;
        return v;
    }
    // composite passing the congruence: the headline event
    v.witness = WitnessKind::congruence_held;
    Factorization f = factorize(n, cfg.budget);
    v.n_factors = f;
    v.kind = f.complete() ? VerdictKind::fpp_certificate : VerdictKind::candidate_fpp;
    return v;
}

FrobeniusVerdict frobenius_test_abc(const mpz_class& n, const mpz_class& a,
                                    const mpz_class& b, uint64_t c,
                                    const TestConfig& cfg) {
    if (n <= 2) throw InvalidInput("frobenius_test_abc: domain is odd n >= 3");
    if (mpz_even_p(n.get_mpz_t()))
        throw InvalidInput("frobenius_test_abc: n must be odd");
    if (is_perfect_square(n))
        throw InvalidInput("frobenius_test_abc: n must not be a perfect square");

    FrobeniusVerdict v;
    v.n = n;
    v.a = a;
    v.b = b;
    v.c = c;

    auto coprime_or_witness = [&](const mpz_class& val, const char* name) -> bool {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), val.get_mpz_t(), n.get_mpz_t());
        if (g == 1) return true;
        if (g == n)
            throw InvalidInput(std::string("frobenius_test_abc: ") + name +
                               " vanishes mod n");
        v.kind = VerdictKind::composite;
        v.witness = WitnessKind::shared_factor;
        v.shared_factor = g;
        return false;
    };

    if (!coprime_or_witness(a, "a")) return v;
    if (!coprime_or_witness(b, "b")) return v;
    mpz_class cz = static_cast<unsigned long>(c);
    if (!coprime_or_witness(cz, "c")) return v;

    int j = jacobi(cz, n);
    if (j == 1)
        throw NonResidueRequired("frobenius_test_abc: J(c/n) = +1; the test requires -1");
    // j == 0 is impossible here: gcd(c, n) = 1 was just established

    ModularQuadratic z(a, b, n, c);
    mpz_class nz = norm(z);
    {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), nz.get_mpz_t(), n.get_mpz_t());
        if (g != 1) {
            // a proper factor, or n | N(z), which cannot happen for prime n
            // with J(c/n) = -1 and coprime a, b
            v.kind = VerdictKind::composite;
            v.witness = WitnessKind::shared_factor;
            v.shared_factor = g;
            return v;
        }
    }

    ModularQuadratic r1 = qpow(z, n);
    ModularQuadratic want1 = conjugate(z);
    ModularQuadratic r2 = qpow(z, n + 1); // independent of r1, cross-checks the form
    v.residue = {r1.a, r1.b};
    v.expected = {want1.a, want1.b};
    v.residue_n1 = {r2.a, r2.b};
    v.norm_expected = nz;
    bool match1 = r1 == want1;
    bool match2 = (r2.b == 0 && r2.a == nz);
    if (match1 != match2)
        throw Error("frobenius_test_abc: direct and n+1 forms disagree on a unit");

    if (!match1) {
        v.kind = VerdictKind::composite;
        v.witness = WitnessKind::congruence_failed;
        return v;
    }
    if (is_probable_prime(n)) {
        v.kind = VerdictKind::probable_prime;
        return v;
    }
    v.witness = WitnessKind::congruence_held;
    Factorization f = factorize(n, cfg.budget);
    v.n_factors = f;
    v.kind = f.complete() ? VerdictKind::fpp_certificate : VerdictKind::candidate_fpp;
    return v;
}

bool norm_base_fermat(const mpz_class& n, const mpz_class& a, const mpz_class& b,
                      uint64_t c) {
    if (n < 3 || mpz_even_p(n.get_mpz_t()))
        throw InvalidInput("norm_base_fermat: n must be odd and >= 3");
    mpz_class base = a * a - b * b * mpz_class(static_cast<unsigned long>(c));
    base %= n;
    if (base < 0) base += n;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), base.get_mpz_t(), n.get_mpz_t());
    if (g != 1)
        throw SharedFactor("norm_base_fermat: N(z) shares a factor with n", g.get_str());
    return powmod(base, n - 1, n) == 1;
}

LiarCensus count_liars(uint64_t n, uint64_t c, bool collect, unsigned workers,
                       uint64_t guard) {
    if (n < 3 || n % 2 == 0)
        throw InvalidInput("count_liars: n must be odd and >= 3");
    if (n > guard)
        throw InvalidInput("count_liars: n exceeds the enumeration guard");
    if (!is_square_free(c) || c < 2)
        throw InvalidInput("count_liars: c must be square-free and >= 2");

    QuadCtx64 ctx{n, c};

    struct Block {
        uint64_t liars = 0, coprime = 0, zero_a = 0, zero_b = 0;
        std::vector<std::pair<uint64_t, uint64_t>> pairs;
    };
    const uint64_t rows_per_block = 64;
    size_t nblocks = static_cast<size_t>((n + rows_per_block - 1) / rows_per_block);
    std::vector<Block> blocks(nblocks);

    detail::run_blocks(nblocks, workers, [&](size_t bi) {
        Block& blk = blocks[bi];
        uint64_t a0 = bi * rows_per_block;
        uint64_t a1 = std::min(n, a0 + rows_per_block);
        for (uint64_t a = a0; a < a1; ++a) {
            bool a_coprime = std::gcd(a, n) == 1;
            for (uint64_t b = 0; b < n; ++b) {
                if (a == 0 && b == 0) continue;
                Quad64 z{a, b};
                if (ctx.pow(z, n) == ctx.conj(z)) {
                    ++blk.liars;
                    if (a == 0) ++blk.zero_a;
                    if (b == 0) ++blk.zero_b;
                    if (a_coprime && std::gcd(b, n) == 1) ++blk.coprime;
                    if (collect) blk.pairs.emplace_back(a, b);
                }
            }
        }
    });

    LiarCensus census;
    census.n = n;
    census.c = c;
    census.convention =
        "pairs (a,b) in [0,n)^2 excluding (0,0); liar iff z^n == conj(z) in Z_n[sqrt(c)]";
    for (const Block& blk : blocks) {
        census.liar_count += blk.liars;
        census.coprime_liar_count += blk.coprime;
        census.zero_a_liars += blk.zero_a;
        census.zero_b_liars += blk.zero_b;
        if (collect)
            census.liars.insert(census.liars.end(), blk.pairs.begin(), blk.pairs.end());
    }
    return census;
}

std::string LiarCensus::to_json() const {
    json j;
    j["format_version"] = "fpp/1";
    j["report_kind"] = "liar_census";
    j["n"] = n;
    j["c"] = c;
    j["liar_count"] = liar_count;
    j["coprime_liar_count"] = coprime_liar_count;
    j["zero_a_liars"] = zero_a_liars;
    j["zero_b_liars"] = zero_b_liars;
    j["convention"] = convention;
    if (!liars.empty()) {
        json arr = json::array();
        for (const auto& [a, b] : liars) arr.push_back(json::array({a, b}));
        j["liars"] = arr;
    }
    return j.dump();
}

std::string LiarCensus::to_csv() const {
    std::ostringstream os;
    os << "n,c,a,b\n";
    for (const auto& [a, b] : liars)
        os << n << "," << c << "," << a << "," << b << "\n";
    return os.str();
}

} // namespace fpp
