#include "pqtopk/cli.hpp"

#include "pqtopk/bench.hpp"
#include "pqtopk/codebook.hpp"
#include "pqtopk/instance_io.hpp"
#include "pqtopk/parallel.hpp"
#include "pqtopk/scoring.hpp"
#include "pqtopk/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pqtopk::cli {

std::uint64_t parse_count(std::string_view text) {
    const std::string s(text);
    if (s.empty()) throw ValidationError("empty count");
    const auto invalid = [&] { return ValidationError("invalid count '" + s + "'"); };
    if (s.find_first_of(".eE") == std::string::npos) {
        std::uint64_t n = 0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec != std::errc() || end != s.data() + s.size()) throw invalid();
        return n;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || !std::isfinite(v) || v < 0.0 || v != std::floor(v) || v >= 18446744073709551616.0) {
        throw invalid();
    }
    return static_cast<std::uint64_t>(v);
}

std::uint64_t parse_bytes(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw ValidationError("empty byte size");
    std::uint64_t scale = 1;
    switch (s.back()) {
    case 'K': case 'k': scale = std::uint64_t{1} << 10; break;
    case 'M': case 'm': scale = std::uint64_t{1} << 20; break;
    case 'G': case 'g': scale = std::uint64_t{1} << 30; break;
    case 'T': case 't': scale = std::uint64_t{1} << 40; break;
    default: break;
    }
    if (scale != 1) s.pop_back();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v) || v <= 0.0) {
        throw ValidationError("invalid byte size '" + std::string(text) + "' (examples: 8G, 512M, 1048576)");
    }
    return static_cast<std::uint64_t>(v * static_cast<double>(scale));
}

std::vector<std::uint64_t> parse_count_list(std::string_view text) {
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_count(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_ranked_line(std::size_t rank, const ScoredItem& item) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), item.score);
    return std::to_string(rank) + ' ' + std::to_string(item.item_id) + ' ' + std::string(buf, res.ptr);
}

namespace {

struct GlobalFlags {
    std::uint64_t seed = 42;
    int threads = 0;
    std::string memory_budget;

    std::uint64_t budget() const { return memory_budget.empty() ? default_memory_budget() : parse_bytes(memory_budget); }
};

struct GenerateFlags {
    std::string items;
    std::uint64_t splits = 8;
    std::uint64_t sub_ids = 256;
    std::uint64_t dim = 512;
    std::string out;
    std::string dense_out;
};

struct BuildFlags {
    std::string dense;
    std::uint64_t splits = 8;
    std::uint64_t sub_ids = 256;
    std::uint32_t max_iters = 25;
    std::string out;
};

struct ScoreFlags {
    std::string instance;
    std::optional<std::uint64_t> phi_seed;
    std::string phi_file;
    std::size_t k = 10;
    std::string method = "pqtopk";
    std::string subset_file;
};

struct VerifyFlags {
    std::string instance;
    std::uint32_t queries = 100;
    std::size_t k = 10;
    double tolerance = 1e-4;
};

struct BenchFlags {
    std::string sizes = "1e3,1e4,1e5,1e6,1e7";
    std::uint64_t splits = 8;
    std::uint64_t sub_ids = 256;
    std::uint64_t dim = 512;
    std::size_t k = 10;
    std::uint32_t queries = 30;
    std::uint32_t warmup = 5;
    std::string methods = "dense,recjpq,pqtopk";
    std::string out;
    std::string format;
    std::string plot;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        if (!piece.empty()) out.push_back(piece);
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw FormatError("write failed: " + path);
}

int cmd_generate(const GlobalFlags& g, const GenerateFlags& f, std::ostream& out) {
    const PQConfig config{parse_count(f.items), f.splits, f.sub_ids, f.dim};
    config.validate();
    auto synth = generate_synthetic(config, g.seed, g.budget());
    const auto instance = std::move(synth).instance();
    io::write_instance(f.out, instance);
    out << "config: " << to_string(config) << " seed=" << g.seed << '\n';
    out << "code table: " << config.code_bytes() << " bytes\n";
    out << "sub-item embeddings: " << config.sub_embedding_bytes() << " bytes\n";
    out << "wrote " << f.out << " (" << io::instance_file_bytes(config) << " bytes)\n";
    if (!f.dense_out.empty()) {
        const auto w = reconstruct_dense(instance, g.budget());
        io::write_dense(f.dense_out, w);
        out << "wrote " << f.dense_out << " (" << w.bytes() + 24 << " bytes)\n";
    }
    return kSuccess;
}

int cmd_build(const GlobalFlags& g, const BuildFlags& f, std::ostream& out, std::ostream& err) {
    const auto w = io::read_dense(f.dense);
    const auto build = build_pq_codebook(w, f.splits, f.sub_ids, {f.max_iters, g.seed});
    for (const auto& warning : build.report.warnings) err << "warning: " << warning << '\n';
    io::write_instance(f.out, build.instance());
    out << "config: " << to_string(build.codebook.config()) << " seed=" << g.seed << '\n';
    out << std::setprecision(6);
    for (std::size_t k = 0; k < build.report.split_mse.size(); ++k) {
        out << "split " << k << ": mse " << build.report.split_mse[k] << " after " << build.report.iterations[k]
            << " iterations\n";
    }
    out << "total mse: " << build.report.total_mse << '\n';
    out << "compression ratio: " << compression_ratio(build.codebook.config()) << '\n';
    out << "wrote " << f.out << '\n';
    return kSuccess;
}

int cmd_score(const GlobalFlags& g, const ScoreFlags& f, std::ostream& out) {
    const auto method = parse_method(f.method);
    const auto instance = io::read_instance(f.instance);
    const auto& config = instance.config();
    const SequenceEmbedding phi = f.phi_file.empty()
                                      ? random_sequence_embedding(config.embed_dim, f.phi_seed.value_or(g.seed))
                                      : io::read_sequence_embedding(f.phi_file);
    if (phi.dim() != config.embed_dim) {
        throw ValidationError("dimension mismatch: phi has " + std::to_string(phi.dim()) +
                              " components, instance has d=" + std::to_string(config.embed_dim));
    }
    const auto subset = f.subset_file.empty() ? ItemSubset::all() : io::read_subset(f.subset_file);

    TopKResult top;
    switch (method) {
    case Method::pqtopk:
        top = pq_topk(instance.codebook, compute_sub_id_scores(instance.embeddings, phi), f.k, subset);
        break;
    case Method::recjpq:
        top = recjpq_score(instance.codebook, compute_sub_id_scores(instance.embeddings, phi), f.k, subset);
        break;
    case Method::dense: {
        const auto budget = g.budget();
        const auto w = reconstruct_dense(instance, budget);
        top = matmul_topk(w, phi, f.k, subset, MatmulOptions{budget});
        break;
    }
    }
    for (std::size_t r = 0; r < top.size(); ++r) out << format_ranked_line(r + 1, top.entries[r]) << '\n';
    return kSuccess;
}

double relative_deviation(float a, float b) {
    const double x = a;
    const double y = b;
    return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

int cmd_verify(const GlobalFlags& g, const VerifyFlags& f, std::ostream& out) {
    if (f.tolerance < 0.0 || !std::isfinite(f.tolerance)) throw ValidationError("tolerance must be >= 0");
    const auto instance = io::read_instance(f.instance);
    const auto& config = instance.config();
    const auto w = reconstruct_dense(instance, g.budget());

    std::uint32_t passed = 0;
    double max_dev = 0.0;
    std::uint64_t tie_skips = 0;
    std::string first_failure;

    for (std::uint32_t q = 0; q < f.queries; ++q) {
        const auto phi = random_sequence_embedding(config.embed_dim, g.seed + q);
        const auto s = compute_sub_id_scores(instance.embeddings, phi);
        const auto fast = pq_topk(instance.codebook, s, f.k);
        const auto baseline = recjpq_score(instance.codebook, s, f.k);
        std::string failure;

        if (!(fast == baseline)) {
            std::size_t r = 0;
            while (r < std::min(fast.size(), baseline.size()) && fast.entries[r] == baseline.entries[r]) ++r;
            const auto item = r < fast.size() ? fast.entries[r].item_id : baseline.entries[r].item_id;
            failure = "query " + std::to_string(q) + " item " + std::to_string(item) +
                      ": pqtopk and recjpq differ at rank " + std::to_string(r + 1);
        }

        const auto pq_all = pq_scores(instance.codebook, s);
        const auto dense_all = matmul_scores(w, phi);
        for (std::size_t i = 0; i < pq_all.size(); ++i) {
            const double dev = relative_deviation(pq_all[i], dense_all[i]);
            max_dev = std::max(max_dev, dev);
            if (dev > f.tolerance && failure.empty()) {
                std::ostringstream os;
                os << std::setprecision(9) << "query " << q << " item " << i << ": pq score " << pq_all[i]
                   << " vs dense " << dense_all[i] << " (relative deviation " << dev << ")";
                failure = os.str();
            }
        }

        // Rankings must agree wherever the dense cut-off is not within tolerance of a tie.
        const auto keep = std::min<std::size_t>(f.k, dense_all.size());
        const auto dense_top = top_k_select(dense_all, keep + 1);
        const bool separated = keep == dense_all.size() || keep == 0 ||
                               relative_deviation(dense_top.entries[keep - 1].score, dense_top.entries[keep].score) >
                                   f.tolerance;
        if (separated) {
            auto a = fast.ids();
            std::vector<ItemId> b;
            for (std::size_t r = 0; r < keep; ++r) b.push_back(dense_top.entries[r].item_id);
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            if (a != b && failure.empty()) {
                std::vector<ItemId> diff;
                std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
                failure = "query " + std::to_string(q) + " item " + std::to_string(diff.front()) +
                          ": top-" + std::to_string(keep) + " id sets differ between pqtopk and dense";
            }
        } else {
            ++tie_skips;
        }

        if (failure.empty()) {
            ++passed;
        } else if (first_failure.empty()) {
            first_failure = failure;
        }
    }

    out << passed << '/' << f.queries << " pass\n";
    out << "max relative deviation (pq vs dense): " << std::setprecision(6) << max_dev << '\n';
    out << "tolerance: " << f.tolerance << '\n';
    if (tie_skips) out << "queries with near-tied cut-off (id-set check skipped): " << tie_skips << '\n';
    if (!first_failure.empty()) {
        out << "first failure: " << first_failure << '\n';
        return kUserError;
    }
    return kSuccess;
}

int cmd_bench(const GlobalFlags& g, const BenchFlags& f, std::ostream& out, std::ostream& err) {
    BenchConfig config;
    config.sizes = parse_count_list(f.sizes);
    config.num_splits = f.splits;
    config.num_sub_ids = f.sub_ids;
    config.embed_dim = f.dim;
    config.k = f.k;
    config.queries = f.queries;
    config.warmup = f.warmup;
    config.seed = g.seed;
    config.methods.clear();
    for (const auto& name : split_csv(f.methods)) config.methods.push_back(parse_method(name));
    config.memory_budget_bytes = g.budget();
    config.threads = g.threads;

    ReportFormat format = ReportFormat::csv;
    if (!f.format.empty()) {
        format = parse_report_format(f.format);
    } else if (f.out.size() >= 5 && f.out.ends_with(".json")) {
        format = ReportFormat::json;
    }

    const auto report = run_scaling_benchmark(config, &err);
    out << format_table(report);
    if (!f.out.empty()) {
        write_text(f.out, emit_report(report, format));
        out << "wrote " << f.out << '\n';
    }
    if (!f.plot.empty()) {
        std::ostringstream title;
        title << "Median scoring latency (m=" << config.num_splits << ", b=" << config.num_sub_ids
              << ", d=" << config.embed_dim << ")";
        write_text(f.plot, emit_gnuplot(report, title.str()));
        out << "wrote " << f.plot << '\n';
    }
    return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Product-quantised top-K item scoring: generate, build, score, verify, benchmark", "pqtopk"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--memory-budget", g.memory_budget, "Allocation cap, e.g. 8G (default 75% of RAM)");

    GenerateFlags gen;
    auto* generate = app.add_subcommand("generate", "Write a random PQ instance");
    generate->add_option("--items", gen.items, "Catalogue size |I| (1e6 accepted)")->required();
    generate->add_option("--splits", gen.splits, "Splits m")->capture_default_str();
    generate->add_option("--sub-ids", gen.sub_ids, "Sub-ids per split b")->capture_default_str();
    generate->add_option("--dim", gen.dim, "Embedding dimension d")->capture_default_str();
    generate->add_option("--out", gen.out, "Instance file to write")->required();
    generate->add_option("--dense-out", gen.dense_out, "Also write the reconstructed dense matrix");

    BuildFlags bld;
    auto* build = app.add_subcommand("build-codebook", "Quantise a dense embedding matrix with k-means PQ");
    build->add_option("--dense", bld.dense, "Dense matrix file (DENS format)")->required();
    build->add_option("--splits", bld.splits, "Splits m")->capture_default_str();
    build->add_option("--sub-ids", bld.sub_ids, "Sub-ids per split b")->capture_default_str();
    build->add_option("--max-iters", bld.max_iters, "Lloyd iterations per split")->capture_default_str();
    build->add_option("--out", bld.out, "Instance file to write")->required();

    ScoreFlags sc;
    auto* score = app.add_subcommand("score", "Rank the catalogue for one query");
    score->add_option("--instance", sc.instance, "Instance file")->required();
    auto* phi_seed = score->add_option("--phi-seed", sc.phi_seed, "Draw phi from this seed");
    auto* phi_file = score->add_option("--phi-file", sc.phi_file, "Read phi from a one-row DENS file");
    phi_seed->excludes(phi_file);
    score->add_option("--k", sc.k, "Results to return")->capture_default_str();
    score->add_option("--method", sc.method, "pqtopk | recjpq | dense")->capture_default_str();
    score->add_option("--subset-file", sc.subset_file, "Restrict ranking to these item ids");

    VerifyFlags vf;
    auto* verify = app.add_subcommand("verify", "Check pqtopk == recjpq and both against dense scoring");
    verify->add_option("--instance", vf.instance, "Instance file")->required();
    verify->add_option("--queries", vf.queries, "Random queries")->capture_default_str();
    verify->add_option("--k", vf.k, "Results per query")->capture_default_str();
    verify->add_option("--tolerance", vf.tolerance, "Relative tolerance for dense comparison")->capture_default_str();

    BenchFlags bf;
    auto* bench = app.add_subcommand("bench", "Latency sweep over catalogue sizes");
    bench->add_option("--sizes", bf.sizes, "Comma-separated catalogue sizes")->capture_default_str();
    bench->add_option("--splits", bf.splits, "Splits m")->capture_default_str();
    bench->add_option("--sub-ids", bf.sub_ids, "Sub-ids per split b")->capture_default_str();
    bench->add_option("--dim", bf.dim, "Embedding dimension d")->capture_default_str();
    bench->add_option("--k", bf.k, "Top-K cut-off")->capture_default_str();
    bench->add_option("--queries", bf.queries, "Timed queries per cell")->capture_default_str();
    bench->add_option("--warmup", bf.warmup, "Untimed warmup queries per cell")->capture_default_str();
    bench->add_option("--methods", bf.methods, "Comma-separated subset of dense,recjpq,pqtopk")
        ->capture_default_str();
    bench->add_option("--out", bf.out, "Report file");
    bench->add_option("--format", bf.format, "csv | json (default: from --out extension, else csv)");
    bench->add_option("--plot", bf.plot, "Write a gnuplot script here");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUserError;
    }

    try {
        if (g.threads > 0) set_num_threads(g.threads);
        if (*generate) return cmd_generate(g, gen, out);
        if (*build) return cmd_build(g, bld, out, err);
        if (*score) return cmd_score(g, sc, out);
        if (*verify) return cmd_verify(g, vf, out);
        if (*bench) return cmd_bench(g, bf, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kInternalError;
}

} // namespace pqtopk::cli
