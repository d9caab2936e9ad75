// docembed - corpus-aware document embeddings over pre-trained word vectors.
//
// Subcommands: stats, embed, eval, bench, weights-plot. Flags override
// entries of an optional key=value config file, which override defaults.

#include <cstdint>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "docembed/docembed.hpp"

namespace {

bool parse_bool(const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw std::runtime_error("invalid boolean value '" + value + "'");
}

template <typename T>
T parse_number(const std::string& value) {
    if constexpr (std::is_floating_point_v<T>) {
        const auto parsed = docembed::detail::parse_double(value);
        if (!parsed) throw std::runtime_error("invalid number '" + value + "'");
        return static_cast<T>(*parsed);
    } else {
        const auto parsed = docembed::detail::parse_int(value);
        if (!parsed) throw std::runtime_error("invalid integer '" + value + "'");
        return static_cast<T>(*parsed);
    }
}

// Config keys are the long flag names without the leading dashes.
void apply_config_entry(docembed::RunConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "vectors") config.vectors_path = value;
    else if (key == "corpus") config.corpus_path = value;
    else if (key == "stats") config.stats_path = value;
    else if (key == "pairs") config.pairs_path = value;
    else if (key == "embeddings") config.embeddings_path = value;
    else if (key == "out") config.out_path = value;
    else if (key == "format") config.vector_format = value;
    else if (key == "dim") config.expect_dim = parse_number<std::int64_t>(value);
    else if (key == "lowercase") config.lowercase = parse_bool(value);
    else if (key == "split") config.split_policy = value;
    else if (key == "min-token-len") config.min_token_len = parse_number<std::uint64_t>(value);
    else if (key == "oov-in-denominator") config.oov_in_denominator = parse_bool(value);
    else if (key == "form") config.form = value;
    else if (key == "scheme") config.scheme = value;
    else if (key == "center-threshold") config.center_threshold = parse_number<double>(value);
    else if (key == "pca") config.pca = parse_bool(value);
    else if (key == "pca-center") config.pca_center = parse_bool(value);
    else if (key == "idf-scaled") config.idf_scaled = parse_bool(value);
    else if (key == "a") config.a = parse_number<double>(value);
    else if (key == "t") config.t = parse_number<double>(value);
    else if (key == "k") config.k = value;
    else if (key == "docs-per-group") config.docs_per_group = parse_number<std::int64_t>(value);
    else if (key == "seed") config.seed = parse_number<std::uint64_t>(value);
    else if (key == "pair-budget") config.pair_budget = parse_number<std::uint64_t>(value);
    else if (key == "variations") config.variations = value;
    else if (key == "grid-min") config.grid_min = parse_number<double>(value);
    else if (key == "grid-max") config.grid_max = parse_number<double>(value);
    else if (key == "grid-points") config.grid_points = parse_number<std::uint64_t>(value);
    else if (key == "schemes") config.schemes = value;
    else if (key == "threads") config.threads = parse_number<unsigned>(value);
    else throw std::runtime_error("unknown config key '" + key + "'");
}

void add_tokenizer_options(CLI::App* cmd, docembed::RunConfig& config) {
    cmd->add_flag("--lowercase,!--no-lowercase", config.lowercase,
                  "lowercase ASCII letters while tokenizing (default on)");
    cmd->add_option("--split", config.split_policy,
                    "token split policy: non-alnum or whitespace");
    cmd->add_option("--min-token-len", config.min_token_len, "minimum token length");
}

void add_scheme_options(CLI::App* cmd, docembed::RunConfig& config) {
    cmd->add_option("--scheme", config.scheme, "weight scheme: idf, sif, subsample, unit");
    cmd->add_option("--a", config.a, "SIF smoothing parameter");
    cmd->add_option("--t", config.t, "subsampling threshold");
    cmd->add_flag("--idf-scaled", config.idf_scaled,
                  "use min-max rescaled idf instead of raw idf");
}

void add_vector_options(CLI::App* cmd, docembed::RunConfig& config) {
    cmd->add_option("--vectors", config.vectors_path, "word vector file");
    cmd->add_option("--format", config.vector_format,
                    "vector file format: word2vec-text or glove-text");
    cmd->add_option("--dim", config.expect_dim, "expected vector dimension");
}

}  // namespace

int main(int argc, char** argv) {
    docembed::RunConfig config;

    // Config file entries apply before flag parsing, so flags win.
    try {
        std::string config_path;
        for (int i = 1; i < argc; ++i) {
            const std::string_view arg = argv[i];
            if (arg == "--config" && i + 1 < argc) {
                config_path = argv[i + 1];
            } else if (arg.rfind("--config=", 0) == 0) {
                config_path = std::string(arg.substr(9));
            }
        }
        if (!config_path.empty()) {
            for (const auto& [key, value] : docembed::read_config_file(config_path)) {
                apply_config_entry(config, key, value);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"corpus-aware document embeddings over pre-trained word vectors"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_flag;
    app.add_option("--config", config_flag, "key=value config file");
    app.add_option("--threads", config.threads,
                   "worker threads (1 reproduces parallel results exactly)");

    auto* stats = app.add_subcommand("stats", "build and persist corpus statistics");
    stats->add_option("--corpus", config.corpus_path, "corpus: docs-per-line file or .txt dir");
    stats->add_option("--out", config.out_path, "output stats file");
    add_tokenizer_options(stats, config);

    auto* embed = app.add_subcommand("embed", "embed corpus documents");
    add_vector_options(embed, config);
    embed->add_option("--stats", config.stats_path, "corpus stats file");
    embed->add_option("--corpus", config.corpus_path, "documents to embed");
    embed->add_option("--out", config.out_path, "output embeddings file");
    embed->add_option("--form", config.form, "embedding form: sum, center, delta");
    embed->add_option("--center-threshold", config.center_threshold,
                      "center form: restrict center to words with tf_ic >= threshold");
    embed->add_flag("--pca", config.pca, "remove the common component over the batch");
    embed->add_flag("--pca-center", config.pca_center, "mean-center before PCA");
    embed->add_flag("--oov-in-denominator", config.oov_in_denominator,
                    "count out-of-vocabulary tokens in document length");
    add_scheme_options(embed, config);
    add_tokenizer_options(embed, config);

    auto* eval = app.add_subcommand("eval", "score labeled pairs and report ROC AUC");
    eval->add_option("--embeddings", config.embeddings_path, "embeddings file");
    eval->add_option("--pairs", config.pairs_path, "pair CSV (doc_a,doc_b,label)");
    eval->add_option("--out", config.out_path, "scored CSV output (optional)");

    auto* bench = app.add_subcommand("bench", "run the embedding-variation benchmark matrix");
    add_vector_options(bench, config);
    bench->add_option("--corpus", config.corpus_path,
                      "grouped corpus: <group>/<doc>.txt dir or TSV");
    bench->add_option("--stats", config.stats_path,
                      "corpus stats file (default: built from the grouped corpus)");
    bench->add_option("--out", config.out_path, "output prefix (.csv, .md, -lengths.csv)");
    bench->add_option("--k", config.k, "reviews per document: N or A..B sweep");
    bench->add_option("--docs-per-group", config.docs_per_group,
                      "documents constructed per group");
    bench->add_option("--seed", config.seed, "sampling seed");
    bench->add_option("--pair-budget", config.pair_budget,
                      "sample down to this many pairs when exceeded");
    bench->add_option("--variations", config.variations,
                      "'full' (the 18), 'all' (+unit-sum), 'idf', or a name list");
    bench->add_option("--center-threshold", config.center_threshold,
                      "center form: restrict center to words with tf_ic >= threshold");
    bench->add_flag("--pca-center", config.pca_center, "mean-center before PCA");
    add_scheme_options(bench, config);
    add_tokenizer_options(bench, config);

    auto* weights = app.add_subcommand("weights-plot", "emit weight-function curve data");
    weights->add_option("--stats", config.stats_path, "corpus stats file");
    weights->add_option("--out", config.out_path, "output CSV (default: stdout)");
    weights->add_option("--schemes", config.schemes, "comma-separated scheme list");
    weights->add_option("--grid-min", config.grid_min, "smallest tf_ic grid value");
    weights->add_option("--grid-max", config.grid_max, "largest tf_ic grid value");
    weights->add_option("--grid-points", config.grid_points, "log-spaced grid size (0 = none)");
    weights->add_option("--a", config.a, "SIF smoothing parameter");
    weights->add_option("--t", config.t, "subsampling threshold");

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats->parsed()) {
            docembed::cmd_stats(config);
        } else if (embed->parsed()) {
            docembed::cmd_embed(config);
        } else if (eval->parsed()) {
            docembed::cmd_eval(config);
        } else if (bench->parsed()) {
            docembed::cmd_bench(config);
        } else if (weights->parsed()) {
            docembed::cmd_weights_plot(config);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
