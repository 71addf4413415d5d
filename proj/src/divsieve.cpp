#include "fpp/divsieve.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include <json.hpp>

#include "fpp/smallmod.hpp"
#include "parallel.hpp"

namespace fpp {

using nlohmann::json;

namespace {

mpz_class from_u64(uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

uint64_t to_u64(const mpz_class& v) { return mpz_get_ui(v.get_mpz_t()); }

void check_c_list(const std::vector<uint64_t>& c_list) {
    if (c_list.empty()) throw InvalidInput("scan: empty radicand list");
    for (uint64_t c : c_list)
        if (c < 2 || !is_square_free(c))
            throw InvalidInput("scan: radicands must be square-free and >= 2");
}

} // namespace

GcdCandidateReport gcd_candidates(const mpz_class& q, const mpz_class& a,
                                  const mpz_class& b, uint64_t c,
                                  const FactorBudget& budget,
                                  uint64_t growth_bound) {
    if (q < 3 || mpz_even_p(q.get_mpz_t()))
        throw InvalidInput("gcd_candidates: q must be odd and >= 3");
    mpz_class cz = from_u64(c);
    int j = jacobi(cz, q);
    if (j == 0) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), cz.get_mpz_t(), q.get_mpz_t());
        throw SharedFactor("gcd_candidates: q shares a factor with c", g.get_str());
    }

    GcdCandidateReport rep;
    rep.q = q;
    rep.a = a;
    rep.b = b;
    rep.c = c;
    rep.branch = (j == 1) ? GcdCandidateReport::Branch::minus
                          : GcdCandidateReport::Branch::plus;

    mpz_class k = (j == 1) ? q - 1 : q + 1;
    if (k > from_u64(growth_bound))
        throw GrowthBoundExceeded("gcd_candidates: exponent above growth bound");

    QuadraticInteger z(a, b, c);
    QuadraticInteger zk = qpow_exact(z, to_u64(k), growth_bound);
    rep.power_coords = {zk.a, zk.b};

    mpz_class lhs = (j == 1) ? mpz_class(zk.a - 1) : mpz_class(zk.a - norm(z));
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), lhs.get_mpz_t(), zk.b.get_mpz_t());
    if (g == 0)
        throw InvalidInput("gcd_candidates: degenerate parameters, gcd is zero");
    rep.gcd_value = g;

    Factorization f = factorize(g, budget);
    rep.unfactored_cofactor = f.cofactor;
    for (const auto& [p, e] : f.factors) {
        rep.candidate_primes.push_back(p);
        bool divides_qc = mpz_divisible_p(q.get_mpz_t(), p.get_mpz_t()) ||
                          mpz_divisible_p(cz.get_mpz_t(), p.get_mpz_t());
        if (p != 2 && !divides_qc) rep.viable_primes.push_back(p);
    }
    return rep;
}

std::optional<SplitPrimeHit> check_split_prime(uint64_t p, uint64_t c,
                                               const FactorBudget& budget) {
    if (p < 3 || !is_prime_u64(p))
        throw InvalidInput("check_split_prime: p must be an odd prime");
    if (jacobi_u64(c, p) != 1)
        throw InvalidInput("check_split_prime: J(c/p) = +1 required");

    uint64_t d = to_u64(sqrt_mod(from_u64(c), from_u64(p)));
    uint64_t w1 = (1 + d) % p;
    uint64_t w2 = (1 + p - d) % p;
    if (w1 == 0 || w2 == 0) return std::nullopt; // z or conj(z) vanishes mod p

    uint64_t gamma = mulmod_u64(w1, powmod_u64(w2, p - 2, p), p);
    uint64_t delta = mulmod_u64(w1, w2, p);
    uint64_t og = to_u64(mult_order(from_u64(gamma), from_u64(p), budget));
    uint64_t od = to_u64(mult_order(from_u64(delta), from_u64(p), budget));
    if (std::gcd(og, od) > 2) return std::nullopt;

    CrtResult crt = crt_combine({{from_u64((og - 1) % og), from_u64(og)},
                                 {from_u64(1 % od), from_u64(od)}});
    if (!crt.compatible()) return std::nullopt; // unreachable once gcd <= 2

    SplitPrimeHit hit;
    hit.p = p;
    hit.c = c;
    hit.d = d;
    hit.ord_gamma = og;
    hit.ord_delta = od;
    hit.q_constraint = *crt.combined;
    return hit;
}

bool split_admissible_q(uint64_t p, uint64_t c, uint64_t d, const mpz_class& q) {
    if (p < 3 || d == 0 || mulmod_u64(d, d, p) != c % p)
        throw InvalidInput("split_admissible_q: d must be a root of c mod p");
    uint64_t w1 = (1 + d) % p;
    uint64_t w2 = (1 + p - d) % p;
    // exponents reduce mod p-1 for units mod p
    uint64_t e = to_u64(mpz_class(q % (p - 1)));
    return powmod_u64(w1, e, p) == w2 && powmod_u64(w2, e, p) == w1;
}

namespace {

struct SegmentResult {
    std::vector<SplitPrimeHit> split_hits;
    std::vector<std::pair<uint64_t, uint64_t>> pp_hits;
    std::vector<ScanSkip> skipped;
};

struct CheckpointStore {
    // (c, seg_lo, seg_hi) -> completed per-c segment results
    std::map<std::tuple<uint64_t, uint64_t, uint64_t>, SegmentResult> done;
    std::ofstream out;
    std::mutex mu;
    std::string kind;

    void load(const std::string& path, const std::string& scan_kind);
    void append(uint64_t c, uint64_t lo, uint64_t hi, const SegmentResult& r);
};

void CheckpointStore::load(const std::string& path, const std::string& scan_kind) {
    kind = scan_kind;
    std::ifstream in(path);
    std::string line;
    while (in && std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) continue; // torn tail line from an interrupted run
        if (j.value("scan_kind", "") != scan_kind) continue;
        SegmentResult r;
        if (j.contains("hits")) {
            for (const auto& h : j["hits"]) {
                if (scan_kind == "split") {
                    SplitPrimeHit hit;
                    hit.p = h.at("p").get<uint64_t>();
                    hit.c = h.at("c").get<uint64_t>();
                    hit.d = h.at("d").get<uint64_t>();
                    hit.ord_gamma = h.at("ord_gamma").get<uint64_t>();
                    hit.ord_delta = h.at("ord_delta").get<uint64_t>();
                    hit.q_constraint = {mpz_class(h.at("q_res").get<std::string>()),
                                        mpz_class(h.at("q_mod").get<std::string>())};
                    r.split_hits.push_back(hit);
                } else {
                    r.pp_hits.emplace_back(h.at("p").get<uint64_t>(),
                                           h.at("c").get<uint64_t>());
                }
            }
        }
        for (const auto& s : j.value("skipped", json::array()))
            r.skipped.push_back({s.at("p").get<uint64_t>(), s.at("c").get<uint64_t>(),
                                 s.at("reason").get<std::string>()});
        uint64_t c = j.at("c").get<uint64_t>();
        auto seg = j.at("segment");
        done[{c, seg.at(0).get<uint64_t>(), seg.at(1).get<uint64_t>()}] = r;
    }
    out.open(path, std::ios::app);
}

void CheckpointStore::append(uint64_t c, uint64_t lo, uint64_t hi,
                             const SegmentResult& r) {
    if (!out.is_open()) return;
    json j;
    j["scan_kind"] = kind;
    j["c"] = c;
    j["segment"] = json::array({lo, hi});
    json hits = json::array();
    for (const auto& h : r.split_hits)
        hits.push_back(json{{"p", h.p},
                            {"c", h.c},
                            {"d", h.d},
                            {"ord_gamma", h.ord_gamma},
                            {"ord_delta", h.ord_delta},
                            {"q_res", h.q_constraint.residue.get_str()},
                            {"q_mod", h.q_constraint.modulus.get_str()}});
    for (const auto& [p, hc] : r.pp_hits) hits.push_back(json{{"p", p}, {"c", hc}});
    j["hits"] = hits;
    json sk = json::array();
    for (const auto& s : r.skipped)
        sk.push_back(json{{"p", s.p}, {"c", s.c}, {"reason", s.reason}});
    j["skipped"] = sk;
    std::lock_guard<std::mutex> lk(mu);
    out << j.dump() << "\n";
    out.flush();
}

// Shared driver for both scans: segments the prime range, runs per-segment
// workers, replays checkpointed (c, segment) cells, merges in segment order.
ScanReport run_scan(const std::string& kind, const std::vector<uint64_t>& c_list,
                    uint64_t p_lo, uint64_t p_hi, const ScanConfig& cfg,
                    const std::function<void(uint64_t p, uint64_t c, SegmentResult&)>& visit) {
    check_c_list(c_list);
    if (p_lo < 3 || p_lo > p_hi)
        throw InvalidInput("scan: require 3 <= p_lo <= p_hi");

    std::vector<uint64_t> cs = c_list;
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());

    CheckpointStore ckpt;
    bool use_ckpt = !cfg.checkpoint_path.empty();
    if (use_ckpt) ckpt.load(cfg.checkpoint_path, kind);

    uint64_t seg = std::max<uint64_t>(cfg.segment_size, 64);
    size_t nsegs = static_cast<size_t>((p_hi - p_lo) / seg + 1);
    std::vector<std::map<uint64_t, SegmentResult>> results(nsegs); // per segment, by c

    detail::run_blocks(nsegs, cfg.workers, [&](size_t si) {
        uint64_t lo = p_lo + si * seg;
        uint64_t hi = std::min(p_hi, lo + seg - 1);
        std::vector<uint64_t> todo;
        for (uint64_t c : cs) {
            auto it = use_ckpt ? ckpt.done.find({c, lo, hi}) : ckpt.done.end();
            if (use_ckpt && it != ckpt.done.end())
                results[si][c] = it->second;
            else
                todo.push_back(c);
        }
        if (todo.empty()) return;
        std::map<uint64_t, SegmentResult> fresh;
        for (uint64_t c : todo) fresh[c] = {};
        for_primes_in(lo, hi, [&](uint64_t p) {
            if (p == 2) return;
            for (uint64_t c : todo) visit(p, c, fresh[c]);
        });
        for (auto& [c, r] : fresh) {
            if (use_ckpt) ckpt.append(c, lo, hi, r);
            results[si][c] = std::move(r);
        }
    });

    ScanReport rep;
    rep.scan_kind = kind;
    rep.c_list = cs;
    rep.p_lo = p_lo;
    rep.p_hi = p_hi;
    rep.ranges_covered = {{p_lo, p_hi}};
    rep.seed = cfg.budget.seed;
    rep.trial_bound = cfg.budget.trial_bound;
    rep.rho_iterations = cfg.budget.rho_iterations;
    rep.segment_size = seg;
    for (auto& by_c : results) {
        for (auto& [c, r] : by_c) {
            rep.split_hits.insert(rep.split_hits.end(), r.split_hits.begin(),
                                  r.split_hits.end());
            rep.pp_hits.insert(rep.pp_hits.end(), r.pp_hits.begin(), r.pp_hits.end());
            rep.skipped.insert(rep.skipped.end(), r.skipped.begin(), r.skipped.end());
        }
    }
    auto by_pc = [](const auto& x, const auto& y) {
        return std::pair(x.p, x.c) < std::pair(y.p, y.c);
    };
    std::sort(rep.split_hits.begin(), rep.split_hits.end(), by_pc);
    std::sort(rep.pp_hits.begin(), rep.pp_hits.end());
    std::sort(rep.skipped.begin(), rep.skipped.end(), by_pc);
    return rep;
}

} // namespace

ScanReport scan_split_primes(const std::vector<uint64_t>& c_list, uint64_t p_lo,
                             uint64_t p_hi, const ScanConfig& cfg) {
    return run_scan("split", c_list, p_lo, p_hi, cfg,
                    [&](uint64_t p, uint64_t c, SegmentResult& out) {
                        if (jacobi_u64(c, p) != 1) return;
                        try {
                            if (auto hit = check_split_prime(p, c, cfg.budget))
                                out.split_hits.push_back(*hit);
                        } catch (const BudgetExceeded& e) {
                            out.skipped.push_back({p, c, e.what()});
                        }
                    });
}

namespace {

// z = 1+sqrt(c); true iff z^(p+1) = N(z) mod p^s with s = 2.
// The mod-p layer must hold for every such prime; a violation is a bug trap.
bool prime_power_flagged(uint64_t p, uint64_t c) {
    if (p >= (uint64_t(1) << 31)) {
        mpz_class pz = from_u64(p);
        mpz_class p2 = pz * pz;
        ModularQuadratic z(1, 1, p2, c);
        ModularQuadratic r = qpow(z, pz + 1);
        mpz_class nn = norm(z);
        if (r.a % pz != nn % pz || r.b % pz != 0)
            throw Error("prime_power scan: mod-p Frobenius layer violated");
        return r.b == 0 && r.a == nn;
    }
    uint64_t p2 = p * p;
    QuadCtx64 ctx{p2, c};
    Quad64 r = ctx.pow({1, 1}, p + 1);
    uint64_t cc = c % p2;
    uint64_t n1 = cc <= 1 ? 1 - cc : p2 - (cc - 1); // (1 - c) mod p^2
    if (r.a % p != n1 % p || r.b % p != 0)
        throw Error("prime_power scan: mod-p Frobenius layer violated");
    return r.b == 0 && r.a == n1;
}

} // namespace

bool prime_power_condition(uint64_t p, uint64_t c) {
    if (p < 3 || !is_prime_u64(p))
        throw InvalidInput("prime_power_condition: p must be an odd prime");
    if (jacobi_u64(c, p) != -1)
        throw InvalidInput("prime_power_condition: J(c/p) = -1 required");
    return prime_power_flagged(p, c);
}

ScanReport scan_prime_power(const std::vector<uint64_t>& c_list, uint64_t p_lo,
                            uint64_t p_hi, const ScanConfig& cfg) {
    return run_scan("prime_power", c_list, p_lo, p_hi, cfg,
                    [&](uint64_t p, uint64_t c, SegmentResult& out) {
                        if (jacobi_u64(c, p) != -1) return;
                        if (prime_power_flagged(p, c)) out.pp_hits.emplace_back(p, c);
                    });
}

ScanReport merge_scan_reports(const ScanReport& x, const ScanReport& y) {
    if (x.scan_kind != y.scan_kind || x.c_list != y.c_list)
        throw InvalidInput("merge: reports differ in kind or radicand list");
    if (x.seed != y.seed || x.trial_bound != y.trial_bound ||
        x.rho_iterations != y.rho_iterations)
        throw InvalidInput("merge: reports were produced under different budgets");

    ScanReport m = x;
    m.p_lo = std::min(x.p_lo, y.p_lo);
    m.p_hi = std::max(x.p_hi, y.p_hi);
    auto ranges = x.ranges_covered;
    ranges.insert(ranges.end(), y.ranges_covered.begin(), y.ranges_covered.end());
    std::sort(ranges.begin(), ranges.end());
    m.ranges_covered.clear();
    for (const auto& r : ranges) {
        if (!m.ranges_covered.empty()) {
            auto& last = m.ranges_covered.back();
            if (r.first <= last.second)
                throw InvalidInput("merge: overlapping covered ranges");
            if (r.first == last.second + 1) {
                last.second = r.second;
                continue;
            }
        }
        m.ranges_covered.push_back(r);
    }
    m.split_hits.insert(m.split_hits.end(), y.split_hits.begin(), y.split_hits.end());
    m.pp_hits.insert(m.pp_hits.end(), y.pp_hits.begin(), y.pp_hits.end());
    m.skipped.insert(m.skipped.end(), y.skipped.begin(), y.skipped.end());
    auto by_pc = [](const auto& a, const auto& b) {
        return std::pair(a.p, a.c) < std::pair(b.p, b.c);
    };
    std::sort(m.split_hits.begin(), m.split_hits.end(), by_pc);
    std::sort(m.pp_hits.begin(), m.pp_hits.end());
    std::sort(m.skipped.begin(), m.skipped.end(), by_pc);
    return m;
}

OrderRecord ord_quad(const ModularQuadratic& z, const FactorBudget& budget) {
    const mpz_class& p = z.n;
    if (!is_probable_prime(p)) throw InvalidInput("ord_quad: modulus must be prime");
    mpz_class cz = from_u64(z.c);
    int j = jacobi(cz, p);
    if (j == 0) throw InvalidInput("ord_quad: p divides the radicand");
    mpz_class nz = norm(z);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), nz.get_mpz_t(), p.get_mpz_t());
    if (g != 1) throw InvalidInput("ord_quad: N(z) shares a factor with p");

    mpz_class exponent = (j == -1) ? mpz_class(p * p - 1) : mpz_class(p - 1);
    Factorization f = factorize(exponent, budget);
    if (!f.complete())
        throw BudgetExceeded("ord_quad: group order resists factorization");

    mpz_class e = exponent;
    ModularQuadratic one = ModularQuadratic::identity(p, z.c);
    for (const auto& [ell, k] : f.factors) {
        for (unsigned i = 0; i < k; ++i) {
            mpz_class cand = e / ell;
            if (qpow(z, cand) == one)
                e = cand;
            else
                break;
        }
    }
    OrderRecord rec;
    rec.p = p;
    rec.order = e;
    rec.group_order = f;
    rec.a = z.a;
    rec.b = z.b;
    rec.c = z.c;
    return rec;
}

QSearchResult crt_q_search(const std::vector<FactorSpec>& factor_set, uint64_t c,
                           const mpz_class& n_max, const FactorBudget& budget,
                           uint64_t candidate_cap) {
    if (factor_set.empty())
        throw InvalidInput("crt_q_search: empty factor set, nothing to exclude");
    QSearchResult res;
    res.c = c;
    res.n_max = n_max;

    mpz_class P = 1;
    for (const auto& fs : factor_set) {
        if (fs.p < 3 || !is_prime_u64(fs.p))
            throw InvalidInput("crt_q_search: factor set must consist of odd primes");
        if (fs.hit && (fs.hit->p != fs.p || fs.hit->c != c))
            throw InvalidInput("crt_q_search: split hit does not match its prime");
        res.primes.push_back(fs.p);
        P *= from_u64(fs.p);
    }

    std::vector<CrtConstraint> constraints;
    for (size_t i = 0; i < factor_set.size(); ++i) {
        const FactorSpec& fs = factor_set[i];
        mpz_class others = P / from_u64(fs.p);
        std::optional<CrtConstraint> solved;
        if (fs.hit) {
            // cofactor of p is others*q; the hit pins it mod lcm of orders
            solved = solve_linear_congruence(others, fs.hit->q_constraint.residue,
                                             fs.hit->q_constraint.modulus);
            if (!solved) {
                res.proven_empty = true;
                mpz_class g;
                mpz_class m = fs.hit->q_constraint.modulus;
                mpz_gcd(g.get_mpz_t(), others.get_mpz_t(), m.get_mpz_t());
                res.violated_gcd = g;
                res.conflict_index = i;
                return res;
            }
        } else {
            if (jacobi_u64(c, fs.p) != -1)
                throw InvalidInput(
                    "crt_q_search: plain primes require J(c/p) = -1; split primes "
                    "enter via their hit");
            mpz_class r_i;
            try {
                ModularQuadratic z(1, 1, from_u64(fs.p), c);
                r_i = ord_quad(z, budget).order;
            } catch (const BudgetExceeded& e) {
                res.skipped.push_back({fs.p, c, e.what()});
                return res; // cannot constrain q soundly without the order
            }
            solved = solve_linear_congruence(others, 1, r_i);
            if (!solved) {
                res.proven_empty = true;
                mpz_class g;
                mpz_gcd(g.get_mpz_t(), others.get_mpz_t(), r_i.get_mpz_t());
                res.violated_gcd = g;
                res.conflict_index = i;
                return res;
            }
        }
        constraints.push_back(*solved);
        res.per_prime_constraints.push_back(*solved);
    }

    CrtResult folded = crt_combine(constraints);
    if (!folded.compatible()) {
        res.proven_empty = true;
        res.violated_gcd = folded.conflict_gcd;
        res.conflict_index = folded.conflict_index;
        return res;
    }
    res.combined = folded.combined;

    mpz_class q_hi = n_max / P;
    mpz_class q = folded.combined->residue;
    const mpz_class& M = folded.combined->modulus;
    if (q == 0) q = M;
    TestConfig tc;
    tc.budget = budget;
    for (; q <= q_hi; q += M) {
        if (mpz_even_p(q.get_mpz_t())) continue;
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), P.get_mpz_t());
        if (g != 1) continue;
        mpz_class n = q * P;
        if (is_perfect_square(n)) continue;
        if (res.candidate_qs.size() < candidate_cap) res.candidate_qs.push_back(q);
        if (jacobi(from_u64(c), n) != -1) {
            ++res.skipped_jacobi;
            continue;
        }
        ++res.q_tested;
        FrobeniusVerdict v = frobenius_test_abc(n, 1, 1, c, tc);
        if (v.kind == VerdictKind::fpp_certificate ||
            v.kind == VerdictKind::candidate_fpp)
            res.passing.push_back(std::move(v));
    }
    return res;
}

ExclusionReport exclusion_pipeline(const ExclusionConfig& cfg) {
    if (cfg.n_max < 9) throw InvalidInput("exclusion_pipeline: n_max too small");
    ExclusionReport rep;
    rep.config = cfg;

    std::vector<uint64_t> cs = odd_primes_below(cfg.c_max);
    if (cs.empty()) throw InvalidInput("exclusion_pipeline: no radicands below c_max");

    // ---- phase 1: gcd-candidate sweep over all odd q <= q_max ----
    {
        struct P1Block {
            uint64_t pairs = 0, products = 0;
            std::vector<ScanSkip> unfactored;
            std::vector<FrobeniusVerdict> passing;
        };
        std::vector<uint64_t> qs;
        for (uint64_t q = 3; q <= cfg.q_max; q += 2) qs.push_back(q);
        const size_t chunk = 64;
        size_t nblocks = (qs.size() + chunk - 1) / chunk;
        std::vector<P1Block> blocks(nblocks);
        detail::run_blocks(nblocks, cfg.workers, [&](size_t bi) {
            P1Block& blk = blocks[bi];
            TestConfig tc;
            tc.budget = cfg.budget;
            for (size_t qi = bi * chunk; qi < std::min(qs.size(), (bi + 1) * chunk); ++qi) {
                mpz_class q = from_u64(qs[qi]);
                for (uint64_t c : cs) {
                    if (jacobi_u64(c, qs[qi]) == 0) continue; // c | q: not f(1,1,c) material
                    GcdCandidateReport g =
                        gcd_candidates(q, 1, 1, c, cfg.budget, cfg.growth_bound);
                    ++blk.pairs;
                    if (g.unfactored_cofactor > 1)
                        blk.unfactored.push_back(
                            {qs[qi], c, "gcd cofactor resisted factorization"});
                    int need = g.branch == GcdCandidateReport::Branch::minus ? -1 : 1;
                    for (const mpz_class& p : g.viable_primes) {
                        if (jacobi(from_u64(c), p) != need) continue;
                        mpz_class n = p * q;
                        if (is_perfect_square(n)) continue;
                        ++blk.products;
                        FrobeniusVerdict v = frobenius_test_abc(n, 1, 1, c, tc);
                        if (v.kind == VerdictKind::fpp_certificate ||
                            v.kind == VerdictKind::candidate_fpp)
                            blk.passing.push_back(std::move(v));
                    }
                }
            }
        });
        for (auto& blk : blocks) {
            rep.phase1_pairs_tested += blk.pairs;
            rep.phase1_products_tested += blk.products;
            rep.phase1_unfactored.insert(rep.phase1_unfactored.end(),
                                         blk.unfactored.begin(), blk.unfactored.end());
            for (auto& v : blk.passing) rep.counterexamples.push_back(std::move(v));
        }
    }

    // ---- phase 2: split-prime and prime-power scans ----
    ScanConfig scfg;
    scfg.budget = cfg.budget;
    scfg.workers = cfg.workers;
    rep.split_scan = scan_split_primes(cs, 3, cfg.scan_hi, scfg);
    rep.prime_power_scan = scan_prime_power(cs, 3, cfg.scan_hi, scfg);

    // ---- phase 3: CRT cofactor enumeration ----
    uint64_t single_hi = cfg.single_hi ? cfg.single_hi : to_u64(isqrt(cfg.n_max));
    if (single_hi > cfg.scan_hi) {
        rep.uncovered.push_back(
            "split/prime-power scans stop below the single-prime bound; J(c/p)=+1 "
            "primes in between are unclassified");
        rep.covered = false;
    }

    std::map<std::pair<uint64_t, uint64_t>, SplitPrimeHit> hit_by_pc;
    for (const auto& h : rep.split_scan.split_hits) hit_by_pc[{h.p, h.c}] = h;
    std::set<std::pair<uint64_t, uint64_t>> pp_flagged(
        rep.prime_power_scan.pp_hits.begin(), rep.prime_power_scan.pp_hits.end());

    auto absorb = [&](QSearchResult&& r) {
        rep.cofactors_tested += r.q_tested;
        for (auto& v : r.passing) rep.counterexamples.push_back(std::move(v));
        for (auto& s : r.skipped) {
            rep.phase3_skipped.push_back(s);
            rep.covered = false;
        }
    };

    std::vector<uint64_t> single_ps =
        primes_in_range(cfg.small_factor_bound + 1, single_hi);
    for (uint64_t c : cs) {
        for (uint64_t p : single_ps) {
            int j = jacobi_u64(c, p);
            if (j == 0) continue; // p | c: p cannot divide an f(1,1,c)
            std::vector<FactorSpec> set;
            if (j == -1) {
                set.push_back({p, std::nullopt});
                absorb(crt_q_search(set, c, cfg.n_max, cfg.budget, 0));
                ++rep.singles_searched;
                // squared occurrences are governed by the prime-power scan:
                // absent a flag, p^2 cannot divide a pseudoprime with this c
                if (pp_flagged.count({p, c})) {
                    mpz_class pk = from_u64(p);
                    for (unsigned s = 2;; ++s) {
                        pk *= from_u64(p);
                        if (pk > cfg.n_max) break;
                        std::vector<FactorSpec> rset(s, FactorSpec{p, std::nullopt});
                        absorb(crt_q_search(rset, c, cfg.n_max, cfg.budget, 0));
                        ++rep.multiplicity_searched;
                    }
                }
            } else {
                auto it = hit_by_pc.find({p, c});
                if (it == hit_by_pc.end()) continue; // excluded by the order criterion
                mpz_class pk = 1;
                for (unsigned s = 1;; ++s) {
                    pk *= from_u64(p);
                    if (pk > cfg.n_max) break;
                    std::vector<FactorSpec> rset(s, FactorSpec{p, it->second});
                    absorb(crt_q_search(rset, c, cfg.n_max, cfg.budget, 0));
                    if (s == 1)
                        ++rep.singles_searched;
                    else
                        ++rep.multiplicity_searched;
                }
            }
        }

        // pair and triple reproductions over small pools
        std::vector<uint64_t> pool_pairs, pool_triples;
        for (uint64_t p : primes_in_range(cfg.small_factor_bound + 1, cfg.pair_hi))
            if (jacobi_u64(c, p) == -1) pool_pairs.push_back(p);
        for (uint64_t p : primes_in_range(cfg.small_factor_bound + 1, cfg.triple_hi))
            if (jacobi_u64(c, p) == -1) pool_triples.push_back(p);
        for (size_t i = 0; i < pool_pairs.size(); ++i)
            for (size_t k = i + 1; k < pool_pairs.size(); ++k) {
                if (from_u64(pool_pairs[i]) * from_u64(pool_pairs[k]) > cfg.n_max)
                    continue;
                std::vector<FactorSpec> set{{pool_pairs[i], std::nullopt},
                                            {pool_pairs[k], std::nullopt}};
                absorb(crt_q_search(set, c, cfg.n_max, cfg.budget, 0));
                ++rep.pairs_searched;
            }
        for (size_t i = 0; i < pool_triples.size(); ++i)
            for (size_t k = i + 1; k < pool_triples.size(); ++k)
                for (size_t l = k + 1; l < pool_triples.size(); ++l) {
                    mpz_class prod = from_u64(pool_triples[i]) *
                                     from_u64(pool_triples[k]) * from_u64(pool_triples[l]);
                    if (prod > cfg.n_max) continue;
                    std::vector<FactorSpec> set{{pool_triples[i], std::nullopt},
                                                {pool_triples[k], std::nullopt},
                                                {pool_triples[l], std::nullopt}};
                    absorb(crt_q_search(set, c, cfg.n_max, cfg.budget, 0));
                    ++rep.triples_searched;
                }
    }

    if (!rep.phase1_unfactored.empty()) {
        rep.covered = false;
        rep.uncovered.push_back("phase 1 gcds with unfactored cofactors");
    }
    if (!rep.split_scan.skipped.empty()) {
        rep.covered = false;
        rep.uncovered.push_back("split scan skipped primes (factorization budget)");
    }
    if (!rep.phase3_skipped.empty())
        rep.uncovered.push_back("cofactor searches skipped primes (order budget)");
    rep.uncovered.push_back("n with a prime factor <= " +
                            std::to_string(cfg.small_factor_bound) +
                            " (outside the claim by construction)");
    return rep;
}

} // namespace fpp
