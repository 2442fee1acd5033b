// Acceptance checks. Prints one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion N   run one (as registered with ctest)

#include "pqtopk/bench.hpp"
#include "pqtopk/cli.hpp"
#include "pqtopk/codebook.hpp"
#include "pqtopk/parallel.hpp"
#include "pqtopk/scoring.hpp"
#include "pqtopk/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace pqtopk;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

constexpr double kTolerance = 1e-4;

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(precision);
    os << v;
    return os.str();
}

// Dense scores over embeddings reconstructed by direct table lookup, in double.
std::vector<double> brute_force_scores(const PQInstance& inst, const SequenceEmbedding& phi) {
    const auto& c = inst.config();
    const auto w = c.sub_dim();
    const auto codes = inst.codebook.codes();
    const auto table = inst.embeddings.table();
    std::vector<float> item(c.embed_dim);
    std::vector<double> out(c.num_items);
    for (std::uint64_t i = 0; i < c.num_items; ++i) {
        for (std::uint64_t k = 0; k < c.num_splits; ++k) {
            const auto j = codes[i * c.num_splits + k];
            std::copy_n(table.begin() + static_cast<std::ptrdiff_t>((k * c.num_sub_ids + j) * w), w,
                        item.begin() + static_cast<std::ptrdiff_t>(k * w));
        }
        double acc = 0.0;
        for (std::uint64_t t = 0; t < c.embed_dim; ++t) acc += static_cast<double>(item[t]) * phi[t];
        out[i] = acc;
    }
    return out;
}

std::vector<ItemId> sorted_ids(const TopKResult& r) {
    auto ids = r.ids();
    std::sort(ids.begin(), ids.end());
    return ids;
}

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    const std::size_t k = 10;
    std::uint64_t instances = 0;
    std::uint64_t id_checks = 0;
    std::uint64_t near_ties = 0;
    std::uint64_t exact_ties = 0;
    double max_dev = 0.0;
    std::uint64_t seed = 1000;
    for (std::uint64_t n : {10u, 100u, 1000u, 10000u}) {
        for (std::uint64_t m : {1u, 2u, 8u}) {
            for (std::uint64_t b : {2u, 4u, 256u}) {
                for (std::uint64_t d : {8u, 64u, 512u}) {
                    const PQConfig c{n, m, b, d};
                    const auto synth = generate_synthetic(c, ++seed);
                    const auto inst = synth.instance();
                    const auto& phi = synth.phi;
                    ++instances;
                    const auto s = compute_sub_id_scores(inst.embeddings, phi);
                    const auto fast = pq_topk(inst.codebook, s, k);
                    const auto base = recjpq_score(inst.codebook, s, k);
                    if (!(fast == base)) return {false, "pqtopk != recjpq on " + to_string(c)};

                    const auto oracle = brute_force_scores(inst, phi);
                    const auto all = pq_scores(inst.codebook, s);
                    for (std::uint64_t i = 0; i < n; ++i) {
                        const double dev = std::abs(all[i] - oracle[i]) / std::max({1.0, std::abs(oracle[i])});
                        max_dev = std::max(max_dev, dev);
                        if (!close_rel(all[i], oracle[i], kTolerance)) {
                            return {false, "score deviation " + std::to_string(dev) + " on " + to_string(c)};
                        }
                    }
                    for (const auto& e : fast.entries) {
                        if (e.score != all[e.item_id]) return {false, "top-K score mismatch on " + to_string(c)};
                    }

                    std::vector<std::pair<double, ItemId>> ranking;
                    for (std::uint64_t i = 0; i < n; ++i) ranking.emplace_back(oracle[i], static_cast<ItemId>(i));
                    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
                        return a.first > b.first || (a.first == b.first && a.second < b.second);
                    });
                    const auto keep = std::min<std::size_t>(k, n);
                    // A near-tie at the cut-off makes the id set ambiguous unless every contender
                    // has exactly the cut-off score, in which case lower ids win.
                    if (keep < n) {
                        const double cut = ranking[keep - 1].first;
                        bool ambiguous = false;
                        for (const auto& [score, id] : ranking) {
                            if (score != cut && close_rel(score, cut, kTolerance)) ambiguous = true;
                        }
                        if (ambiguous) {
                            ++near_ties;
                            continue;
                        }
                        if (ranking[keep].first == cut) ++exact_ties;
                    }
                    std::vector<ItemId> expected;
                    for (std::size_t r = 0; r < keep; ++r) expected.push_back(ranking[r].second);
                    std::sort(expected.begin(), expected.end());
                    const DenseEmbeddingMatrix w = reconstruct_dense(inst, default_memory_budget());
                    if (sorted_ids(fast) != expected) return {false, "pqtopk top-K ids differ on " + to_string(c)};
                    if (sorted_ids(matmul_topk(w, phi, k)) != expected) {
                        return {false, "dense top-K ids differ on " + to_string(c)};
                    }
                    ++id_checks;
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    const bool fast_enough = secs < 120.0;
    return {fast_enough && instances >= 100,
            std::to_string(instances) + " instances bitwise equal, max relative deviation " + std::to_string(max_dev) +
                ", " + std::to_string(id_checks) + " exact id-set checks (" + std::to_string(exact_ties) +
                " with exact ties broken by id), " + std::to_string(near_ties) + " near-tied cut-offs skipped, " +
                fmt(secs, 1) + " s (limit 120 s)"};
}

Outcome hand_fixture() {
    const PQConfig c{3, 2, 2, 4};
    const PQInstance inst{Codebook(c, {0, 0, 1, 1, 0, 1}), SubItemEmbeddings(c, {1, 0, 0, 1, 1, 1, 2, 0})};
    const SequenceEmbedding phi({1, 2, 3, 4});
    const std::vector<ScoredItem> expected{{0, 8}, {1, 8}, {2, 7}};
    const auto s = compute_sub_id_scores(inst.embeddings, phi);
    const auto w = reconstruct_dense(inst, default_memory_budget());
    const std::vector<std::pair<std::string, TopKResult>> results{
        {"pqtopk", pq_topk(inst.codebook, s, 3)},
        {"pq_topk_reference", pq_topk_reference(inst.codebook, s, 3)},
        {"recjpq", recjpq_score(inst.codebook, s, 3)},
        {"dense", matmul_topk(w, phi, 3)},
        {"dense_reference", matmul_topk_reference(w, phi, 3)},
    };
    for (const auto& [name, r] : results) {
        if (r.entries != expected) return {false, name + " ranking differs"};
    }
    const std::filesystem::path fixtures = PQTOPK_FIXTURE_DIR;
    for (const std::string method : {"pqtopk", "recjpq", "dense"}) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run({"pqtopk", "score", "--instance", (fixtures / "tiny.pqtk").string(), "--phi-file",
                                   (fixtures / "tiny_phi.dens").string(), "--k", "3", "--method", method},
                                  out, err);
        if (code != 0 || out.str() != "1 0 8\n2 1 8\n3 2 7\n") return {false, "CLI " + method + ": " + out.str() + err.str()};
    }
    return {true, "[(0,8),(1,8),(2,7)] from 5 library paths and 3 CLI methods"};
}

BenchReport bench_one_million(std::uint64_t splits, std::vector<Method> methods) {
    BenchConfig c;
    c.sizes = {1'000'000};
    c.num_splits = splits;
    c.methods = std::move(methods);
    return run_scaling_benchmark(c, &std::cerr);
}

Outcome speedup_ratio() {
    const auto t0 = Clock::now();
    const auto r = bench_one_million(8, {Method::dense, Method::recjpq, Method::pqtopk});
    const double dense = *r.find(Method::dense, 1'000'000)->median_ms;
    const double recjpq = *r.find(Method::recjpq, 1'000'000)->median_ms;
    const double pq = *r.find(Method::pqtopk, 1'000'000)->median_ms;
    const double secs = seconds_since(t0);
    const bool pass = pq <= 0.5 * dense && pq <= 0.83 * recjpq && secs < 600.0;
    return {pass, "median ms dense " + fmt(dense) + ", recjpq " + fmt(recjpq) + ", pqtopk " + fmt(pq) +
                      "; pqtopk/dense " + fmt(pq / dense) + " (<= 0.5), pqtopk/recjpq " + fmt(pq / recjpq) +
                      " (<= 0.83), " + std::to_string(r.threads) + " threads, " + fmt(secs, 1) + " s"};
}

Outcome linear_scaling() {
    const auto t0 = Clock::now();
    BenchConfig c;
    c.sizes = {100'000, 316'228, 1'000'000, 3'162'278, 10'000'000};
    c.methods = {Method::pqtopk};
    const auto r = run_scaling_benchmark(c, &std::cerr);
    const double slope = fit_scaling_slope(r, Method::pqtopk, 100'000, 10'000'000);
    const double secs = seconds_since(t0);
    std::string medians;
    for (const auto& e : r.entries) medians += " " + std::to_string(e.num_items) + ":" + fmt(*e.median_ms);
    return {slope >= 0.8 && slope <= 1.2 && secs < 1800.0,
            "log-log slope " + fmt(slope) + " in [0.8, 1.2]; medians ms" + medians + "; " + fmt(secs, 1) + " s"};
}

Outcome split_count_regime() {
    const auto r64 = bench_one_million(64, {Method::dense, Method::pqtopk});
    const auto r8 = bench_one_million(8, {Method::dense, Method::recjpq, Method::pqtopk});
    const double ratio64 = *r64.find(Method::pqtopk, 1'000'000)->median_ms / *r64.find(Method::dense, 1'000'000)->median_ms;
    const double pq8 = *r8.find(Method::pqtopk, 1'000'000)->median_ms;
    const double ratio8 = pq8 / *r8.find(Method::dense, 1'000'000)->median_ms;
    const double ratio8_rec = pq8 / *r8.find(Method::recjpq, 1'000'000)->median_ms;
    const bool m8_holds = ratio8 <= 0.5 && ratio8_rec <= 0.83;
    return {ratio64 >= 0.5 && m8_holds,
            "m=64 pqtopk/dense " + fmt(ratio64) + " (>= 0.5 required); m=8 pqtopk/dense " + fmt(ratio8) +
                ", pqtopk/recjpq " + fmt(ratio8_rec) + (m8_holds ? " (advantage holds)" : " (advantage lost)")};
}

Outcome memory_guard() {
    BenchConfig c;
    c.sizes = {5'000'000, 10'000'000};
    c.queries = 5;
    c.warmup = 1;
    c.memory_budget_bytes = std::uint64_t{8} << 30;
    const auto r = run_scaling_benchmark(c, &std::cerr);
    for (const auto n : c.sizes) {
        const auto* dense = r.find(Method::dense, n);
        if (!dense->skipped || dense->reason.empty() || dense->median_ms) {
            return {false, "dense not skipped at " + std::to_string(n)};
        }
    }
    for (const auto m : {Method::pqtopk, Method::recjpq}) {
        const auto* e = r.find(m, 10'000'000);
        if (e->skipped || !e->median_ms) return {false, std::string(method_name(m)) + " did not complete at 1e7"};
    }
    const PQConfig big{10'000'000, 8, 256, 512};
    return {true, "dense skipped at 5e6 and 1e7 (\"" + r.find(Method::dense, 5'000'000)->reason +
                      "\"); pqtopk " + fmt(*r.find(Method::pqtopk, 10'000'000)->median_ms) + " ms, recjpq " +
                      fmt(*r.find(Method::recjpq, 10'000'000)->median_ms) + " ms at 1e7 with " +
                      std::to_string(pq_bytes(big)) + " PQ bytes"};
}

Outcome determinism() {
    const PQConfig c{200'000, 8, 256, 64};
    const auto a = generate_synthetic(c, 77);
    const auto b = generate_synthetic(c, 77);
    if (!std::ranges::equal(a.codebook.codes(), b.codebook.codes()) ||
        !std::ranges::equal(a.embeddings.table(), b.embeddings.table()) ||
        !std::ranges::equal(a.phi.values(), b.phi.values())) {
        return {false, "generator output differs under a fixed seed"};
    }
    const auto inst = a.instance();
    std::vector<int> counts{1, 2, max_threads()};
    std::vector<std::vector<TopKResult>> per_count;
    for (const int t : counts) {
        const ThreadScope scope(t);
        std::vector<TopKResult> results;
        for (std::uint64_t q = 0; q < 10; ++q) {
            const auto s = compute_sub_id_scores(inst.embeddings, random_sequence_embedding(c.embed_dim, q));
            results.push_back(pq_topk(inst.codebook, s, 100));
            results.push_back(pq_topk(inst.codebook, s, 10, ItemSubset::all(), PqTopKOptions{1000}));
        }
        per_count.push_back(std::move(results));
    }
    for (std::size_t i = 1; i < per_count.size(); ++i) {
        if (per_count[i] != per_count[0]) return {false, "pq_topk differs at " + std::to_string(counts[i]) + " threads"};
    }

    const auto w = reconstruct_dense(generate_synthetic(PQConfig{3000, 4, 16, 32}, 5).instance(), default_memory_budget());
    std::vector<CodebookBuild> builds;
    for (const int t : counts) {
        const ThreadScope scope(t);
        builds.push_back(build_pq_codebook(w, 4, 16, {25, 11}));
    }
    for (const auto& bld : builds) {
        if (!std::ranges::equal(bld.codebook.codes(), builds[0].codebook.codes()) ||
            !std::ranges::equal(bld.embeddings.table(), builds[0].embeddings.table()) ||
            bld.report.split_mse != builds[0].report.split_mse) {
            return {false, "codebook builder output differs"};
        }
    }
    return {true, "pq_topk identical over 20 queries at threads {1, 2, " + std::to_string(max_threads()) +
                      "}; generator and builder bit-identical"};
}

Outcome precompute_fraction() {
    const auto r = bench_one_million(8, {Method::pqtopk});
    const auto* e = r.find(Method::pqtopk, 1'000'000);
    return {*e->precompute_fraction < 0.05, "precompute " + fmt(*e->precompute_median_ms, 4) + " ms of " +
                                                fmt(*e->median_ms) + " ms, median fraction " +
                                                fmt(100.0 * *e->precompute_fraction, 2) + "% (< 5%)"};
}

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence", oracle_equivalence},
        {2, "hand fixture", hand_fixture},
        {3, "speedup ratio at 1e6, m=8", speedup_ratio},
        {4, "linear scaling", linear_scaling},
        {5, "split-count regime, m=64", split_count_regime},
        {6, "memory guard", memory_guard},
        {7, "determinism", determinism},
        {8, "precompute negligible", precompute_fraction},
    };

    int only = 0;
    if (argc == 3 && std::string(argv[1]) == "--criterion") {
        only = std::atoi(argv[2]);
    } else if (argc != 1) {
        std::cerr << "usage: acceptance [--criterion N]\n";
        return 2;
    }

    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        ++ran;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
                  << std::endl;
        if (!o.pass) ++failures;
    }
    if (ran == 0) {
        std::cerr << "no criterion " << only << '\n';
        return 2;
    }
    return failures ? 1 : 0;
}
