#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "fpp/divsieve.hpp"
#include "fpp/smallmod.hpp"

// Report serialization and independent re-verification. JSON objects are
// emitted through nlohmann::json, whose object keys are sorted, so identical
// data always serializes to identical bytes.

namespace fpp {

using nlohmann::json;

namespace {

mpz_class from_u64(uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

json hit_json(const SplitPrimeHit& h) {
    return json{{"p", h.p},
                {"c", h.c},
                {"d", h.d},
                {"ord_gamma", h.ord_gamma},
                {"ord_delta", h.ord_delta},
                {"q_res", h.q_constraint.residue.get_str()},
                {"q_mod", h.q_constraint.modulus.get_str()}};
}

SplitPrimeHit hit_from_json(const json& j) {
    SplitPrimeHit h;
    h.p = j.at("p").get<uint64_t>();
    h.c = j.at("c").get<uint64_t>();
    h.d = j.at("d").get<uint64_t>();
    h.ord_gamma = j.at("ord_gamma").get<uint64_t>();
    h.ord_delta = j.at("ord_delta").get<uint64_t>();
    h.q_constraint = {mpz_class(j.at("q_res").get<std::string>()),
                      mpz_class(j.at("q_mod").get<std::string>())};
    return h;
}

json skip_json(const ScanSkip& s) {
    return json{{"p", s.p}, {"c", s.c}, {"reason", s.reason}};
}

json scan_json(const ScanReport& r) {
    json j;
    j["format_version"] = kReportFormatVersion;
    j["report_kind"] = "scan";
    j["scan_kind"] = r.scan_kind;
    j["c_list"] = r.c_list;
    j["p_range"] = json::array({r.p_lo, r.p_hi});
    json ranges = json::array();
    for (const auto& [lo, hi] : r.ranges_covered) ranges.push_back(json::array({lo, hi}));
    j["ranges_covered"] = ranges;
    json hits = json::array();
    if (r.scan_kind == "split")
        for (const auto& h : r.split_hits) hits.push_back(hit_json(h));
    else
        for (const auto& [p, c] : r.pp_hits) hits.push_back(json{{"p", p}, {"c", c}});
    j["hits"] = hits;
    json sk = json::array();
    for (const auto& s : r.skipped) sk.push_back(skip_json(s));
    j["skipped"] = sk;
    j["config"] = json{{"seed", r.seed},
                       {"trial_bound", r.trial_bound},
                       {"rho_iterations", r.rho_iterations},
                       {"segment_size", r.segment_size}};
    return j;
}

ScanReport scan_from_json_obj(const json& j) {
    ScanReport r;
    r.scan_kind = j.at("scan_kind").get<std::string>();
    r.c_list = j.at("c_list").get<std::vector<uint64_t>>();
    r.p_lo = j.at("p_range").at(0).get<uint64_t>();
    r.p_hi = j.at("p_range").at(1).get<uint64_t>();
    for (const auto& rr : j.at("ranges_covered"))
        r.ranges_covered.emplace_back(rr.at(0).get<uint64_t>(), rr.at(1).get<uint64_t>());
    for (const auto& h : j.at("hits")) {
        if (r.scan_kind == "split")
            r.split_hits.push_back(hit_from_json(h));
        else
            r.pp_hits.emplace_back(h.at("p").get<uint64_t>(), h.at("c").get<uint64_t>());
    }
    for (const auto& s : j.at("skipped"))
        r.skipped.push_back({s.at("p").get<uint64_t>(), s.at("c").get<uint64_t>(),
                             s.at("reason").get<std::string>()});
    const auto& cfg = j.at("config");
    r.seed = cfg.at("seed").get<uint64_t>();
    r.trial_bound = cfg.at("trial_bound").get<uint64_t>();
    r.rho_iterations = cfg.at("rho_iterations").get<uint64_t>();
    r.segment_size = cfg.at("segment_size").get<uint64_t>();
    return r;
}

} // namespace

std::string ScanReport::to_json() const { return scan_json(*this).dump(); }

ScanReport scan_report_from_json(const std::string& text) {
    return scan_from_json_obj(json::parse(text));
}

std::string ScanReport::hits_csv() const {
    std::ostringstream os;
    if (scan_kind == "split") {
        os << "p,c,d,ord_gamma,ord_delta,q_res,q_mod\n";
        for (const auto& h : split_hits)
            os << h.p << "," << h.c << "," << h.d << "," << h.ord_gamma << ","
               << h.ord_delta << "," << h.q_constraint.residue << ","
               << h.q_constraint.modulus << "\n";
    } else {
        os << "p,c\n";
        for (const auto& [p, c] : pp_hits) os << p << "," << c << "\n";
    }
    return os.str();
}

std::string GcdCandidateReport::to_json() const {
    json j;
    j["format_version"] = kReportFormatVersion;
    j["report_kind"] = "gcd_candidates";
    j["q"] = q.get_str();
    j["a"] = a.get_str();
    j["b"] = b.get_str();
    j["c"] = c;
    j["branch"] = branch == Branch::minus ? "minus" : "plus";
    j["power_coords"] = json::array({power_coords.first.get_str(), power_coords.second.get_str()});
    j["gcd_value"] = gcd_value.get_str();
    json cand = json::array();
    for (const auto& p : candidate_primes) cand.push_back(p.get_str());
    j["candidate_primes"] = cand;
    json viable = json::array();
    for (const auto& p : viable_primes) viable.push_back(p.get_str());
    j["viable_primes"] = viable;
    j["unfactored_cofactor"] = unfactored_cofactor.get_str();
    return j.dump();
}

std::string QSearchResult::to_json() const {
    json j;
    j["format_version"] = kReportFormatVersion;
    j["report_kind"] = "q_search";
    j["c"] = c;
    j["n_max"] = n_max.get_str();
    j["primes"] = primes;
    json cons = json::array();
    for (const auto& cc : per_prime_constraints)
        cons.push_back(json::array({cc.residue.get_str(), cc.modulus.get_str()}));
    j["per_prime_constraints"] = cons;
    if (combined)
        j["combined"] = json::array({combined->residue.get_str(), combined->modulus.get_str()});
    j["proven_empty"] = proven_empty;
    if (proven_empty) {
        j["violated_gcd"] = violated_gcd.get_str();
        j["conflict_index"] = conflict_index;
    }
    j["q_tested"] = q_tested;
    j["skipped_jacobi"] = skipped_jacobi;
    json cq = json::array();
    for (const auto& q : candidate_qs) cq.push_back(q.get_str());
    j["candidate_qs"] = cq;
    json pass = json::array();
    for (const auto& v : passing) pass.push_back(json::parse(v.to_json()));
    j["passing"] = pass;
    json sk = json::array();
    for (const auto& s : skipped) sk.push_back(skip_json(s));
    j["skipped"] = sk;
    return j.dump();
}

std::string ExclusionReport::to_json() const {
    json j;
    j["format_version"] = kReportFormatVersion;
    j["report_kind"] = "exclusion";
    j["config"] = json{{"c_max", config.c_max},
                       {"n_max", config.n_max.get_str()},
                       {"q_max", config.q_max},
                       {"small_factor_bound", config.small_factor_bound},
                       {"scan_hi", config.scan_hi},
                       {"single_hi", config.single_hi},
                       {"pair_hi", config.pair_hi},
                       {"triple_hi", config.triple_hi},
                       {"growth_bound", config.growth_bound},
                       {"seed", config.budget.seed},
                       {"trial_bound", config.budget.trial_bound},
                       {"rho_iterations", config.budget.rho_iterations}};
    json p1;
    p1["pairs_tested"] = phase1_pairs_tested;
    p1["products_tested"] = phase1_products_tested;
    json unf = json::array();
    for (const auto& s : phase1_unfactored) unf.push_back(skip_json(s));
    p1["unfactored"] = unf;
    j["phase1"] = p1;
    j["split_scan"] = scan_json(split_scan);
    j["prime_power_scan"] = scan_json(prime_power_scan);
    json p3;
    p3["singles_searched"] = singles_searched;
    p3["pairs_searched"] = pairs_searched;
    p3["triples_searched"] = triples_searched;
    p3["multiplicity_searched"] = multiplicity_searched;
    p3["cofactors_tested"] = cofactors_tested;
    json sk = json::array();
    for (const auto& s : phase3_skipped) sk.push_back(skip_json(s));
    p3["skipped"] = sk;
    j["phase3"] = p3;
    json cex = json::array();
    for (const auto& v : counterexamples) cex.push_back(json::parse(v.to_json()));
    j["counterexamples"] = cex;
    json claim;
    claim["statement"] = "no Frobenius pseudoprime n <= " + config.n_max.get_str() +
                         " with c < " + std::to_string(config.c_max) +
                         " and no prime factor <= " +
                         std::to_string(config.small_factor_bound);
    claim["covered"] = covered;
    claim["uncovered"] = uncovered;
    claim["fpp_found"] = counterexamples.size();
    j["claim"] = claim;
    return j.dump();
}

namespace {

void verify_tiling(const json& scan, std::vector<std::string>& issues) {
    uint64_t lo = scan.at("p_range").at(0).get<uint64_t>();
    uint64_t hi = scan.at("p_range").at(1).get<uint64_t>();
    std::vector<std::pair<uint64_t, uint64_t>> ranges;
    for (const auto& r : scan.at("ranges_covered"))
        ranges.emplace_back(r.at(0).get<uint64_t>(), r.at(1).get<uint64_t>());
    std::sort(ranges.begin(), ranges.end());
    if (ranges.empty()) {
        issues.push_back("ranges_covered is empty");
        return;
    }
    if (ranges.front().first != lo)
        issues.push_back("gap: range starts at " + std::to_string(ranges.front().first) +
                         ", declared p_lo is " + std::to_string(lo));
    for (size_t i = 1; i < ranges.size(); ++i) {
        if (ranges[i].first <= ranges[i - 1].second)
            issues.push_back("overlap between covered ranges at " +
                             std::to_string(ranges[i].first));
        else if (ranges[i].first != ranges[i - 1].second + 1)
            issues.push_back("gap between " + std::to_string(ranges[i - 1].second) +
                             " and " + std::to_string(ranges[i].first));
    }
    if (ranges.back().second != hi)
        issues.push_back("gap: coverage ends at " + std::to_string(ranges.back().second) +
                         ", declared p_hi is " + std::to_string(hi));
}

void verify_scan_obj(const json& scan, const FactorBudget& budget,
                     std::vector<std::string>& issues) {
    std::string kind = scan.at("scan_kind").get<std::string>();
    if (kind != "split" && kind != "prime_power") {
        issues.push_back("unknown scan_kind: " + kind);
        return;
    }
    verify_tiling(scan, issues);
    for (const auto& h : scan.at("hits")) {
        uint64_t p = h.at("p").get<uint64_t>();
        uint64_t c = h.at("c").get<uint64_t>();
        std::string tag = "hit p=" + std::to_string(p) + " c=" + std::to_string(c);
        try {
            if (kind == "split") {
                SplitPrimeHit stored = hit_from_json(h);
                auto fresh = check_split_prime(p, c, budget);
                if (!fresh)
                    issues.push_back(tag + ": recomputation yields no hit");
                else if (!(*fresh == stored))
                    issues.push_back(tag + ": recomputed hit disagrees with stored fields");
            } else {
                if (!prime_power_condition(p, c))
                    issues.push_back(tag + ": prime-power condition fails on recheck");
            }
        } catch (const Error& e) {
            issues.push_back(tag + ": " + e.what());
        }
    }
}

void verify_verdict_obj(const json& j, const FactorBudget& budget,
                        std::vector<std::string>& issues) {
    FrobeniusVerdict v = verdict_from_json(j.dump());
    std::string tag = "verdict n=" + v.n.get_str();
    std::string kind = j.at("kind").get<std::string>();
    try {
        if (v.residue) {
            // re-run the congruence from the stored parameters
            ModularQuadratic z(v.a, v.b, v.n, v.c);
            ModularQuadratic r = qpow(z, v.n);
            if (r.a != v.residue->first || r.b != v.residue->second) {
                issues.push_back(tag + ": stored residue does not reproduce");
                return;
            }
            bool held = r == conjugate(z);
            bool stored_held = kind == "probable_prime" || kind == "fpp_certificate" ||
                               kind == "candidate_fpp";
            if (held != stored_held)
                issues.push_back(tag + ": congruence outcome disagrees with kind");
        }
        if (kind == "probable_prime" && !is_probable_prime(v.n))
            issues.push_back(tag + ": claimed probable_prime but n fails Miller-Rabin");
        if (kind == "fpp_certificate") {
            if (!v.n_factors) {
                issues.push_back(tag + ": certificate lacks a factorization");
                return;
            }
            if (v.n_factors->reassemble() != v.n)
                issues.push_back(tag + ": certificate factorization does not multiply to n");
            if (v.n_factors->cofactor != 1)
                issues.push_back(tag + ": certificate factorization is incomplete");
            size_t nf = 0;
            for (const auto& [p, e] : v.n_factors->factors) {
                nf += e;
                if (!is_probable_prime(p))
                    issues.push_back(tag + ": certificate factor " + p.get_str() +
                                     " is not prime");
            }
            if (nf < 2) issues.push_back(tag + ": certified n is not composite");
            if (is_probable_prime(v.n))
                issues.push_back(tag + ": certified n passes Miller-Rabin as prime");
        }
    } catch (const Error& e) {
        issues.push_back(tag + ": " + e.what());
    }
    (void)budget;
}

void verify_census_obj(const json& j, std::vector<std::string>& issues) {
    uint64_t n = j.at("n").get<uint64_t>();
    uint64_t c = j.at("c").get<uint64_t>();
    if (!j.contains("liars")) return; // counts alone cannot be re-checked cheaply
    QuadCtx64 ctx{n, c};
    uint64_t coprime = 0;
    for (const auto& pr : j.at("liars")) {
        uint64_t a = pr.at(0).get<uint64_t>();
        uint64_t b = pr.at(1).get<uint64_t>();
        Quad64 z{a % n, b % n};
        if (!(ctx.pow(z, n) == ctx.conj(z))) {
            issues.push_back("liar (" + std::to_string(a) + "," + std::to_string(b) +
                             ") fails recheck");
        }
        if (std::gcd(a, n) == 1 && std::gcd(b, n) == 1) ++coprime;
    }
    if (j.at("liars").size() == j.at("liar_count").get<uint64_t>() &&
        coprime != j.at("coprime_liar_count").get<uint64_t>())
        issues.push_back("coprime liar count disagrees with the collected list");
}

} // namespace

std::vector<std::string> verify_report(const std::string& text,
                                       const FactorBudget& budget) {
    json j = json::parse(text); // parse errors propagate as json exceptions
    std::vector<std::string> issues;
    std::string ver = j.value("format_version", "");
    if (ver != kReportFormatVersion) {
        issues.push_back("unknown format_version: '" + ver + "'");
        return issues;
    }
    std::string kind = j.value("report_kind", "");
    if (kind == "scan") {
        verify_scan_obj(j, budget, issues);
    } else if (kind == "verdict") {
        verify_verdict_obj(j, budget, issues);
    } else if (kind == "liar_census") {
        verify_census_obj(j, issues);
    } else if (kind == "gcd_candidates") {
        try {
            GcdCandidateReport fresh =
                gcd_candidates(mpz_class(j.at("q").get<std::string>()),
                               mpz_class(j.at("a").get<std::string>()),
                               mpz_class(j.at("b").get<std::string>()),
                               j.at("c").get<uint64_t>(), budget);
            if (fresh.to_json() != j.dump())
                issues.push_back("gcd-candidate report does not reproduce");
        } catch (const Error& e) {
            issues.push_back(std::string("gcd-candidate recomputation failed: ") + e.what());
        }
    } else if (kind == "exclusion") {
        verify_scan_obj(j.at("split_scan"), budget, issues);
        verify_scan_obj(j.at("prime_power_scan"), budget, issues);
        for (const auto& cex : j.at("counterexamples")) {
            json wrapped = cex;
            verify_verdict_obj(wrapped, budget, issues);
        }
        bool covered = j.at("claim").at("covered").get<bool>();
        bool has_punctures = !j.at("phase1").at("unfactored").empty() ||
                             !j.at("split_scan").at("skipped").empty() ||
                             !j.at("phase3").at("skipped").empty();
        if (covered && has_punctures)
            issues.push_back("claim marked covered despite skipped work");
        if (j.at("claim").at("fpp_found").get<uint64_t>() !=
            j.at("counterexamples").size())
            issues.push_back("claim fpp_found disagrees with counterexample list");
    } else {
        issues.push_back("unknown report_kind: '" + kind + "'");
    }
    return issues;
}

} // namespace fpp
