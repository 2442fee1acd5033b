#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pqtopk {

enum class Method { dense, recjpq, pqtopk };

std::string_view method_name(Method method);

/// Throws ValidationError for anything other than dense, recjpq or pqtopk.
Method parse_method(std::string_view name);

struct BenchConfig {
    std::vector<std::uint64_t> sizes{1'000, 10'000, 100'000, 1'000'000, 10'000'000};
    std::uint64_t num_splits = 8;
    std::uint64_t num_sub_ids = 256;
    std::uint64_t embed_dim = 512;
    std::size_t k = 10;
    std::uint32_t queries = 30;
    std::uint32_t warmup = 5;
    std::uint64_t seed = 42;
    std::vector<Method> methods{Method::dense, Method::recjpq, Method::pqtopk};
    std::uint64_t memory_budget_bytes = 0; // 0: default_memory_budget()
    int threads = 0;                       // 0: leave the current worker count

    void validate() const;
};

/// One (method, catalogue size) cell. Latencies are absent for skipped cells.
struct BenchEntry {
    Method method = Method::pqtopk;
    std::uint64_t num_items = 0;
    std::uint64_t num_splits = 0;
    std::uint64_t num_sub_ids = 0;
    std::uint64_t embed_dim = 0;
    std::uint64_t k = 0;
    std::uint32_t queries = 0;
    std::optional<double> median_ms;
    std::optional<double> p10_ms;
    std::optional<double> p90_ms;
    /// Median of the sub-id score precomputation alone (PQ methods only).
    std::optional<double> precompute_median_ms;
    /// Median of precompute / total over the same queries (PQ methods only).
    std::optional<double> precompute_fraction;
    std::uint64_t est_bytes = 0;
    bool skipped = false;
    std::string reason;

    friend bool operator==(const BenchEntry&, const BenchEntry&) = default;
};

struct BenchReport {
    int threads = 1;
    std::vector<BenchEntry> entries;

    const BenchEntry* find(Method method, std::uint64_t num_items) const;

    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

/// Synthetic scaling sweep. Per size: one seeded instance; per query a fresh random
/// phi. The timed region covers sub-id score precomputation, scoring and top-k
/// selection (PQ methods) or r = W phi plus top-k selection (dense). Dense cells
/// whose matrix exceeds the memory budget are skipped, not failed.
/// Throws ValidationError when every cell is skipped.
BenchReport run_scaling_benchmark(const BenchConfig& config, std::ostream* progress = nullptr);

/// Least-squares slope of log(median ms) against log(num_items) over
/// measured cells with lo <= num_items <= hi. Needs at least three points.
double fit_scaling_slope(const BenchReport& report, Method method, std::uint64_t lo, std::uint64_t hi);

/// Linear-interpolated percentile (q in [0, 1]) of an unsorted sample.
double percentile(std::vector<double> samples, double q);

enum class ReportFormat { csv, json };

ReportFormat parse_report_format(std::string_view name);

std::string emit_report(const BenchReport& report, ReportFormat format);
std::string emit_csv(const BenchReport& report);
std::string emit_json(const BenchReport& report);
BenchReport parse_json_report(std::string_view text);

/// gnuplot script: log-log latency against catalogue size, one series per method.
std::string emit_gnuplot(const BenchReport& report, std::string_view title = "Median scoring latency");

/// Fixed-width table for terminals.
std::string format_table(const BenchReport& report);

} // namespace pqtopk
