#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "docembed/common_component.hpp"
#include "docembed/corpus_stats.hpp"
#include "docembed/detail/parallel.hpp"
#include "docembed/detail/strings.hpp"
#include "docembed/embedder.hpp"
#include "docembed/evaluation.hpp"
#include "docembed/harness.hpp"
#include "docembed/tokenizer.hpp"
#include "docembed/vector_store.hpp"
#include "docembed/weighting.hpp"

namespace docembed {

// Everything the subcommands consume. Precedence: command-line flags
// override config-file entries override these defaults.
struct RunConfig {
    // paths
    std::string vectors_path;
    std::string corpus_path;
    std::string stats_path;
    std::string pairs_path;
    std::string embeddings_path;
    std::string out_path;

    std::string vector_format = "word2vec-text";
    std::optional<std::int64_t> expect_dim;

    // tokenizer
    bool lowercase = true;
    std::string split_policy = "non-alnum";
    std::uint64_t min_token_len = 1;
    bool oov_in_denominator = false;

    // embedding selections
    std::string form = "sum";
    std::string scheme = "idf";
    std::optional<double> center_threshold;
    bool pca = false;
    bool pca_center = false;
    bool idf_scaled = false;
    double a = 1e-4;
    double t = 1e-5;

    // benchmark parameters
    std::string k = "1";  // "N" or "A..B"
    std::int64_t docs_per_group = 1;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> pair_budget;
    std::string variations = "all";

    // weights-plot grid
    double grid_min = 1e-5;
    double grid_max = 1e-2;
    std::uint64_t grid_points = 100;
    std::string schemes = "idf,sif,subsample";

    unsigned threads = detail::default_thread_count();
};

namespace cli_detail {

inline void require_path(const std::string& value, std::string_view flag) {
    if (value.empty()) {
        throw std::runtime_error("missing required option " + std::string(flag));
    }
    if (!std::filesystem::exists(value)) {
        throw std::runtime_error(std::string(flag) + ": path does not exist: " + value);
    }
}

inline void require_out(const std::string& value) {
    if (value.empty()) throw std::runtime_error("missing required option --out");
}

inline TokenizerConfig tokenizer_config(const RunConfig& config) {
    TokenizerConfig tokenizer;
    tokenizer.lowercase = config.lowercase;
    if (config.split_policy == "non-alnum") {
        tokenizer.split_policy = SplitPolicy::NonAlnum;
    } else if (config.split_policy == "whitespace") {
        tokenizer.split_policy = SplitPolicy::Whitespace;
    } else {
        throw std::runtime_error("unknown split policy '" + config.split_policy +
                                 "' (expected non-alnum or whitespace)");
    }
    tokenizer.min_token_len = static_cast<std::size_t>(config.min_token_len);
    return tokenizer;
}

inline WeightScheme weight_scheme(const RunConfig& config) {
    const auto kind = parse_weight_kind(config.scheme);
    if (!kind) throw std::runtime_error("unknown scheme '" + config.scheme + "'");
    WeightScheme scheme;
    scheme.kind = *kind;
    scheme.a = config.a;
    scheme.t = config.t;
    scheme.idf_scaled = config.idf_scaled;
    validate(scheme);
    return scheme;
}

inline EmbeddingForm embedding_form(const RunConfig& config) {
    const auto kind = parse_form_kind(config.form);
    if (!kind) throw std::runtime_error("unknown form '" + config.form + "'");
    EmbeddingForm form;
    form.kind = *kind;
    form.center_threshold = config.center_threshold;
    if (form.center_threshold &&
        !(*form.center_threshold > 0.0 && *form.center_threshold < 1.0)) {
        throw std::runtime_error("center threshold must lie in (0, 1)");
    }
    return form;
}

inline VectorStore load_unit_vectors(const RunConfig& config) {
    require_path(config.vectors_path, "--vectors");
    const auto format = parse_vector_format(config.vector_format);
    if (!format) {
        throw std::runtime_error("unknown vector format '" + config.vector_format + "'");
    }
    std::optional<std::size_t> expect;
    if (config.expect_dim) expect = static_cast<std::size_t>(*config.expect_dim);
    return normalize_store(load_vectors(config.vectors_path, expect, *format));
}

inline std::pair<int, int> parse_k_range(const std::string& spec) {
    const auto dots = spec.find("..");
    auto to_k = [&](std::string_view field) {
        const auto value = detail::parse_int(field);
        if (!value || *value < 1) {
            throw std::runtime_error("invalid k specification '" + spec + "'");
        }
        return static_cast<int>(*value);
    };
    if (dots == std::string::npos) {
        const int k = to_k(spec);
        return {k, k};
    }
    const int lo = to_k(std::string_view(spec).substr(0, dots));
    const int hi = to_k(std::string_view(spec).substr(dots + 2));
    if (hi < lo) throw std::runtime_error("invalid k range '" + spec + "'");
    return {lo, hi};
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << contents;
}

}  // namespace cli_detail

// stats: tokenize a corpus and persist its term/document frequencies.
inline void cmd_stats(const RunConfig& config, std::ostream& out = std::cout) {
    cli_detail::require_path(config.corpus_path, "--corpus");
    cli_detail::require_out(config.out_path);
    const TokenizerConfig tokenizer = cli_detail::tokenizer_config(config);
    const auto docs = load_corpus_documents(config.corpus_path);
    CorpusStats stats;
    for (const auto& doc : docs) stats.add_document(tokenize(doc.text, tokenizer));
    stats.save(std::filesystem::path(config.out_path));
    out << "docs=" << stats.doc_count() << " tokens=" << stats.total_tokens()
        << " vocab=" << stats.distinct_words() << "\n";
}

// embed: embed every corpus document, optionally removing the common
// component over the batch (the component is persisted to <out>.pc).
inline void cmd_embed(const RunConfig& config, std::ostream& out = std::cout) {
    cli_detail::require_path(config.stats_path, "--stats");
    cli_detail::require_path(config.corpus_path, "--corpus");
    cli_detail::require_out(config.out_path);
    const VectorStore store = cli_detail::load_unit_vectors(config);
    const CorpusStats corpus = CorpusStats::load(config.stats_path);
    const TokenizerConfig tokenizer = cli_detail::tokenizer_config(config);
    const WeightScheme scheme = cli_detail::weight_scheme(config);
    const EmbeddingForm form = cli_detail::embedding_form(config);

    const auto docs = load_corpus_documents(config.corpus_path);
    std::vector<DocTermStats> stats(docs.size());
    detail::parallel_for(docs.size(), config.threads, [&](std::size_t i) {
        stats[i] = doc_term_stats(tokenize(docs[i].text, tokenizer), corpus, store,
                                  config.oov_in_denominator, docs[i].id);
    });
    BatchResult batch = embed_batch(stats, form, scheme, store, corpus, config.threads);

    if (config.pca) {
        if (batch.embeddings.size() < 2) {
            throw std::runtime_error("--pca requires at least 2 embedded documents");
        }
        PcaOptions options;
        options.mean_center = config.pca_center;
        const PrincipalComponent pc =
            first_principal_component(embedding_matrix(batch.embeddings), options);
        batch.embeddings = remove_common_component(std::move(batch.embeddings), pc);
        std::ostringstream pc_text;
        write_principal_component(pc_text, pc);
        cli_detail::write_file(config.out_path + ".pc", pc_text.str());
    }

    std::ostringstream body;
    write_embeddings(body, batch.embeddings);
    cli_detail::write_file(config.out_path, body.str());
    std::ostringstream skips;
    write_skip_report(skips, batch.skipped);
    cli_detail::write_file(config.out_path + ".skips.csv", skips.str());
    out << "embedded=" << batch.embeddings.size() << " skipped=" << batch.skipped.size()
        << "\n";
}

// eval: score a pair file against an embeddings file and report ROC AUC.
inline EvalResult cmd_eval(const RunConfig& config, std::ostream& out = std::cout) {
    cli_detail::require_path(config.embeddings_path, "--embeddings");
    cli_detail::require_path(config.pairs_path, "--pairs");
    const auto embeddings = read_embeddings(config.embeddings_path);
    const auto pairs = read_pairs_csv(config.pairs_path);
    const EmbeddingMap map = embedding_map(embeddings);
    const ScoreReport report = score_pairs(map, pairs, config.threads);
    EvalResult result = roc_auc(report.scored);
    result.skipped_pairs = report.skipped_pairs;
    if (!config.out_path.empty()) {
        std::ostringstream scored;
        write_scored_csv(scored, report.scored);
        cli_detail::write_file(config.out_path, scored.str());
    }
    out << "auc: " << detail::format_fixed(result.auc, 4) << "\n";
    out << "positives: " << result.positives << " negatives: " << result.negatives
        << " skipped_pairs: " << result.skipped_pairs << "\n";
    return result;
}

// bench: construct grouped benchmarks for each k and run the variation
// matrix; writes <out>.csv, <out>.md and <out>-lengths.csv.
inline ResultTable cmd_bench(const RunConfig& config, std::ostream& out = std::cout) {
    cli_detail::require_path(config.corpus_path, "--corpus");
    cli_detail::require_out(config.out_path);
    const VectorStore store = cli_detail::load_unit_vectors(config);
    const TokenizerConfig tokenizer = cli_detail::tokenizer_config(config);
    const GroupedCorpus grouped = load_grouped_corpus(config.corpus_path);

    CorpusStats corpus;
    if (!config.stats_path.empty()) {
        cli_detail::require_path(config.stats_path, "--stats");
        corpus = CorpusStats::load(config.stats_path);
    } else {
        // Term and document frequencies over the full set of source
        // documents, each source document counting once.
        for (const auto& [group, docs] : grouped.groups) {
            for (const auto& doc : docs) corpus.add_document(tokenize(doc.text, tokenizer));
        }
    }

    std::vector<VariationSpec> variations = parse_variations(config.variations);
    for (auto& v : variations) {
        v.scheme.a = config.a;
        v.scheme.t = config.t;
        v.scheme.idf_scaled = config.idf_scaled;
        if (v.form.kind == FormKind::Center) v.form.center_threshold = config.center_threshold;
    }

    const auto [k_lo, k_hi] = cli_detail::parse_k_range(config.k);
    ResultTable table;
    for (int k = k_lo; k <= k_hi; ++k) {
        BenchmarkSpec spec;
        spec.k = k;
        spec.docs_per_group = static_cast<int>(config.docs_per_group);
        spec.seed = config.seed;
        spec.pair_budget = config.pair_budget;
        const Benchmark benchmark = build_benchmark(grouped, spec);
        append_rows(table, run_variation_matrix(benchmark.documents, benchmark.pairs,
                                                store, corpus, variations, tokenizer,
                                                std::to_string(k), config.threads,
                                                config.pca_center));
    }

    std::ostringstream csv;
    write_result_csv(csv, table);
    cli_detail::write_file(config.out_path + ".csv", csv.str());
    std::ostringstream md;
    write_result_markdown(md, table);
    cli_detail::write_file(config.out_path + ".md", md.str());
    std::ostringstream lengths;
    write_length_csv(lengths, table);
    cli_detail::write_file(config.out_path + "-lengths.csv", lengths.str());
    out << "rows=" << table.rows.size() << " variations=" << table.variation_names.size()
        << "\n";
    return table;
}

// weights-plot: emit the weight-function comparison curve data as CSV.
inline void cmd_weights_plot(const RunConfig& config, std::ostream& out = std::cout) {
    cli_detail::require_path(config.stats_path, "--stats");
    const CorpusStats corpus = CorpusStats::load(config.stats_path);
    std::vector<WeightScheme> schemes;
    for (const auto& field : detail::split(config.schemes, ',')) {
        const auto kind = parse_weight_kind(field);
        if (!kind) {
            throw std::runtime_error("unknown scheme '" + std::string(field) + "'");
        }
        WeightScheme scheme;
        scheme.kind = *kind;
        scheme.a = config.a;
        scheme.t = config.t;
        schemes.push_back(scheme);
    }
    const auto grid =
        log_spaced_grid(config.grid_min, config.grid_max,
                        static_cast<std::size_t>(config.grid_points));
    const auto rows = emit_weight_curves(corpus, schemes, grid);
    std::ostringstream csv;
    write_curves_csv(csv, rows);
    if (config.out_path.empty()) {
        out << csv.str();
    } else {
        cli_detail::write_file(config.out_path, csv.str());
    }
}

// Config file support: simple "key=value" lines ('#' comments allowed).
// Returns flag-name -> value; unknown keys are the caller's problem.
inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    const std::string path_str = path.string();
    if (!in) throw std::runtime_error("cannot open config file: " + path_str);
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path_str, line_no, "expected 'key=value'");
        }
        entries[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return entries;
}

}  // namespace docembed
