#include "pqtopk/bench.hpp"

#include "pqtopk/core.hpp"
#include "pqtopk/parallel.hpp"
#include "pqtopk/scoring.hpp"
#include "pqtopk/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

namespace pqtopk {

std::string_view method_name(Method method) {
    switch (method) {
    case Method::dense: return "dense";
    case Method::recjpq: return "recjpq";
    case Method::pqtopk: return "pqtopk";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "dense") return Method::dense;
    if (name == "recjpq") return Method::recjpq;
    if (name == "pqtopk") return Method::pqtopk;
    throw ValidationError("unknown method '" + std::string(name) + "' (expected dense, recjpq or pqtopk)");
}

void BenchConfig::validate() const {
    if (sizes.empty()) throw ValidationError("at least one catalogue size is required");
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        if (sizes[i] <= sizes[i - 1]) throw ValidationError("catalogue sizes must be strictly increasing");
    }
    if (queries < 1) throw ValidationError("queries must be >= 1");
    if (k < 1) throw ValidationError("K must be >= 1");
    if (methods.empty()) throw ValidationError("at least one method is required");
    PQConfig{sizes.front(), num_splits, num_sub_ids, embed_dim}.validate();
    PQConfig{sizes.back(), num_splits, num_sub_ids, embed_dim}.validate();
}

const BenchEntry* BenchReport::find(Method method, std::uint64_t num_items) const {
    for (const auto& e : entries) {
        if (e.method == method && e.num_items == num_items) return &e;
    }
    return nullptr;
}

double percentile(std::vector<double> samples, double q) {
    if (samples.empty()) throw ValidationError("percentile of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double pos = q * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + (samples[hi] - samples[lo]) * frac;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Keeps results observable so the timed calls cannot be elided.
volatile std::size_t g_sink = 0;

struct Samples {
    std::vector<double> total_ms;
    std::vector<double> precompute_ms;
    std::vector<double> fraction;
};

void fill_stats(BenchEntry& entry, const Samples& s) {
    entry.median_ms = percentile(s.total_ms, 0.5);
    entry.p10_ms = percentile(s.total_ms, 0.1);
    entry.p90_ms = percentile(s.total_ms, 0.9);
    if (!s.precompute_ms.empty()) {
        entry.precompute_median_ms = percentile(s.precompute_ms, 0.5);
        entry.precompute_fraction = percentile(s.fraction, 0.5);
    }
}

std::uint64_t estimate_bytes(Method method, const PQConfig& c, std::size_t k, int threads) {
    const std::uint64_t s_bytes = c.num_splits * c.num_sub_ids * sizeof(float);
    const std::uint64_t pq_static = c.code_bytes() + c.sub_embedding_bytes() + s_bytes;
    switch (method) {
    case Method::pqtopk:
        return pq_static + static_cast<std::uint64_t>(threads) *
                               (std::min<std::uint64_t>(PqTopKOptions{}.chunk_size, c.num_items) * sizeof(float) +
                                k * sizeof(ScoredItem));
    case Method::recjpq: return pq_static + c.num_items * sizeof(float) + k * sizeof(ScoredItem);
    case Method::dense:
        return c.num_items * c.embed_dim * sizeof(float) + c.num_items * sizeof(float) + k * sizeof(ScoredItem);
    }
    return 0;
}

} // namespace

BenchReport run_scaling_benchmark(const BenchConfig& config, std::ostream* progress) {
    config.validate();
    std::unique_ptr<ThreadScope> scope;
    if (config.threads > 0) scope = std::make_unique<ThreadScope>(config.threads);
    const std::uint64_t budget = config.memory_budget_bytes ? config.memory_budget_bytes : default_memory_budget();

    BenchReport report;
    report.threads = num_threads();
    bool any_measured = false;

    for (const auto size : config.sizes) {
        const PQConfig pq{size, config.num_splits, config.num_sub_ids, config.embed_dim};
        const std::uint64_t instance_seed = splitmix64(config.seed ^ splitmix64(size));

        std::optional<PQInstance> instance;
        std::string instance_error;
        if (pq.code_bytes() <= budget) {
            instance = generate_synthetic(pq, instance_seed, budget).instance();
        } else {
            instance_error = "memory budget: code table needs " + std::to_string(pq.code_bytes()) +
                             " bytes, budget is " + std::to_string(budget);
        }

        const auto query_phi = [&](std::uint64_t q) {
            return random_sequence_embedding(config.embed_dim, splitmix64(instance_seed + 1 + q));
        };

        for (const auto method : config.methods) {
            BenchEntry entry;
            entry.method = method;
            entry.num_items = size;
            entry.num_splits = config.num_splits;
            entry.num_sub_ids = config.num_sub_ids;
            entry.embed_dim = config.embed_dim;
            entry.k = config.k;
            entry.queries = config.queries;
            entry.est_bytes = estimate_bytes(method, pq, config.k, report.threads);

            const std::uint64_t dense_need = size * config.embed_dim * sizeof(float);
            if (!instance) {
                entry.skipped = true;
                entry.reason = instance_error;
            } else if (method == Method::dense && dense_need > budget) {
                entry.skipped = true;
                entry.reason = "memory budget: dense matrix needs " + std::to_string(dense_need) +
                               " bytes, budget is " + std::to_string(budget);
            }
            if (entry.skipped) {
                if (progress) *progress << method_name(method) << " |I|=" << size << " skipped: " << entry.reason << '\n';
                report.entries.push_back(std::move(entry));
                continue;
            }

            Samples samples;
            const std::uint64_t total_runs = std::uint64_t{config.warmup} + config.queries;
            if (method == Method::dense) {
                const auto w = reconstruct_dense(*instance, budget);
                const MatmulOptions options{budget};
                for (std::uint64_t q = 0; q < total_runs; ++q) {
                    const auto phi = query_phi(q);
                    const auto t0 = Clock::now();
                    const auto top = matmul_topk(w, phi, config.k, ItemSubset::all(), options);
                    const auto t1 = Clock::now();
                    g_sink = g_sink + top.size();
                    if (q >= config.warmup) samples.total_ms.push_back(elapsed_ms(t0, t1));
                }
            } else {
                const auto& codebook = instance->codebook;
                const auto& embeddings = instance->embeddings;
                for (std::uint64_t q = 0; q < total_runs; ++q) {
                    const auto phi = query_phi(q);
                    const auto t0 = Clock::now();
                    const auto s = compute_sub_id_scores(embeddings, phi);
                    const auto t1 = Clock::now();
                    const auto top = method == Method::pqtopk ? pq_topk(codebook, s, config.k)
                                                              : recjpq_score(codebook, s, config.k);
                    const auto t2 = Clock::now();
                    g_sink = g_sink + top.size();
                    if (q >= config.warmup) {
                        const double total = elapsed_ms(t0, t2);
                        const double pre = elapsed_ms(t0, t1);
                        samples.total_ms.push_back(total);
                        samples.precompute_ms.push_back(pre);
                        samples.fraction.push_back(total > 0.0 ? pre / total : 0.0);
                    }
                }
            }
            fill_stats(entry, samples);
            any_measured = true;
            if (progress) {
                *progress << method_name(method) << " |I|=" << size << " median " << std::fixed
                          << std::setprecision(3) << *entry.median_ms << " ms" << std::defaultfloat << '\n';
            }
            report.entries.push_back(std::move(entry));
        }
    }
    if (!any_measured) throw ValidationError("every (method, size) cell exceeds the memory budget; nothing measured");
    return report;
}

double fit_scaling_slope(const BenchReport& report, Method method, std::uint64_t lo, std::uint64_t hi) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& e : report.entries) {
        if (e.method != method || e.skipped || !e.median_ms || e.num_items < lo || e.num_items > hi) continue;
        if (*e.median_ms <= 0.0) continue;
        xs.push_back(std::log(static_cast<double>(e.num_items)));
        ys.push_back(std::log(*e.median_ms));
    }
    if (xs.size() < 3) {
        throw ValidationError("insufficient points: slope fit for " + std::string(method_name(method)) +
                              " needs >= 3 measured sizes in range, found " + std::to_string(xs.size()));
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw ValidationError("insufficient points: all sizes identical");
    return sxy / sxx;
}

std::string format_table(const BenchReport& report) {
    std::ostringstream os;
    os << "threads: " << report.threads << '\n';
    os << std::left << std::setw(8) << "method" << std::right << std::setw(12) << "items" << std::setw(12)
       << "median_ms" << std::setw(12) << "p10_ms" << std::setw(12) << "p90_ms" << std::setw(14) << "precomp_ms"
       << std::setw(16) << "est_bytes" << "  note\n";
    os << std::fixed << std::setprecision(3);
    for (const auto& e : report.entries) {
        os << std::left << std::setw(8) << method_name(e.method) << std::right << std::setw(12) << e.num_items;
        if (e.skipped) {
            os << std::setw(12) << "-" << std::setw(12) << "-" << std::setw(12) << "-" << std::setw(14) << "-"
               << std::setw(16) << e.est_bytes << "  skipped: " << e.reason << '\n';
            continue;
        }
        os << std::setw(12) << *e.median_ms << std::setw(12) << *e.p10_ms << std::setw(12) << *e.p90_ms;
        if (e.precompute_median_ms)
            os << std::setw(14) << *e.precompute_median_ms;
        else
            os << std::setw(14) << "-";
        os << std::setw(16) << e.est_bytes << '\n';
    }
    return os.str();
}

} // namespace pqtopk
