#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docembed/common_component.hpp"
#include "docembed/corpus_stats.hpp"
#include "docembed/detail/random.hpp"
#include "docembed/detail/strings.hpp"
#include "docembed/embedder.hpp"
#include "docembed/errors.hpp"
#include "docembed/evaluation.hpp"
#include "docembed/tokenizer.hpp"
#include "docembed/vector_store.hpp"
#include "docembed/weighting.hpp"

namespace docembed {

struct GroupedDocument {
    std::string id;
    std::string text;
};

// Documents partitioned into groups (locations, forums); same-group pairs
// are the positive class downstream.
struct GroupedCorpus {
    std::map<std::string, std::vector<GroupedDocument>> groups;
    std::string provenance;
};

inline void validate(const GroupedCorpus& corpus) {
    std::set<std::string_view> ids;
    for (const auto& [group, docs] : corpus.groups) {
        if (docs.empty()) {
            throw std::runtime_error("group '" + group + "' is empty");
        }
        for (const auto& doc : docs) {
            if (!ids.insert(doc.id).second) {
                throw std::runtime_error("duplicate document id '" + doc.id +
                                         "' in grouped corpus");
            }
        }
    }
}

// Directory layout <group_id>/<doc_id>.txt.
inline GroupedCorpus load_grouped_corpus_dir(const std::filesystem::path& dir) {
    GroupedCorpus corpus;
    corpus.provenance = "dir:" + dir.string();
    std::vector<std::filesystem::path> group_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_directory()) group_dirs.push_back(entry.path());
    }
    std::sort(group_dirs.begin(), group_dirs.end());
    for (const auto& group_dir : group_dirs) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(group_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        auto& docs = corpus.groups[group_dir.filename().string()];
        for (const auto& file : files) {
            std::ifstream in(file);
            if (!in) throw std::runtime_error("cannot open document: " + file.string());
            std::ostringstream text;
            text << in.rdbuf();
            docs.push_back({file.stem().string(), text.str()});
        }
    }
    validate(corpus);
    return corpus;
}

// TSV rows group_id<TAB>doc_id<TAB>text.
inline GroupedCorpus load_grouped_corpus_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    const std::string path_str = path.string();
    if (!in) throw std::runtime_error("cannot open corpus file: " + path_str);
    GroupedCorpus corpus;
    corpus.provenance = "tsv:" + path_str;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty()) continue;
        const auto fields = detail::split(line, '\t');
        if (fields.size() != 3) {
            throw ParseError(path_str, line_no, "expected 'group<TAB>doc_id<TAB>text'");
        }
        corpus.groups[std::string(fields[0])].push_back(
            {std::string(fields[1]), std::string(fields[2])});
    }
    validate(corpus);
    return corpus;
}

inline GroupedCorpus load_grouped_corpus(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("grouped corpus path does not exist: " + path.string());
    }
    return std::filesystem::is_directory(path) ? load_grouped_corpus_dir(path)
                                               : load_grouped_corpus_tsv(path);
}

struct BenchmarkSpec {
    int k = 1;               // source documents concatenated per benchmark document
    int docs_per_group = 1;  // benchmark documents constructed per group
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> pair_budget;  // sample down when exceeded
};

struct BenchmarkDocument {
    std::string id;
    std::string group;
    std::string text;
};

struct Benchmark {
    std::vector<BenchmarkDocument> documents;
    std::vector<EvalPair> pairs;
};

// Per group, draws k * docs_per_group source documents without replacement
// and concatenates them k at a time (single-space joiner, sampling order).
// Pairs cover all distinct document pairs, downsampled to pair_budget when
// set; a pair is positive iff both documents come from the same group.
inline Benchmark build_benchmark(const GroupedCorpus& corpus, const BenchmarkSpec& spec) {
    if (spec.k < 1 || spec.docs_per_group < 1) {
        throw std::invalid_argument("benchmark spec requires k >= 1 and docs_per_group >= 1");
    }
    validate(corpus);
    Benchmark benchmark;
    const std::size_t need =
        static_cast<std::size_t>(spec.k) * static_cast<std::size_t>(spec.docs_per_group);
    for (const auto& [group, docs] : corpus.groups) {
        if (docs.size() < need) {
            throw std::runtime_error(
                "group '" + group + "' has " + std::to_string(docs.size()) +
                " documents; k=" + std::to_string(spec.k) + " x docs_per_group=" +
                std::to_string(spec.docs_per_group) + " needs " + std::to_string(need));
        }
        std::mt19937_64 rng(detail::mix_seed(spec.seed, detail::fnv1a64(group),
                                             static_cast<std::uint64_t>(spec.k)));
        std::vector<std::size_t> order(docs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        detail::shuffle_prefix(order, need, rng);
        for (int d = 0; d < spec.docs_per_group; ++d) {
            std::string text;
            for (int piece = 0; piece < spec.k; ++piece) {
                const auto& source =
                    docs[order[static_cast<std::size_t>(d) * spec.k + piece]];
                if (!text.empty()) text += ' ';
                text += source.text;
            }
            benchmark.documents.push_back(
                {group + "#" + std::to_string(d), group, std::move(text)});
        }
    }
    std::vector<GroupedId> ids;
    ids.reserve(benchmark.documents.size());
    for (const auto& doc : benchmark.documents) ids.push_back({doc.id, doc.group});
    const std::uint64_t n = ids.size();
    const std::uint64_t total = n < 2 ? 0 : n * (n - 1) / 2;
    if (total > 0) {
        const std::uint64_t budget =
            spec.pair_budget ? std::min(*spec.pair_budget, total) : total;
        benchmark.pairs = sample_pairs(ids, budget, spec.seed);
    }
    return benchmark;
}

// --- variation matrix -------------------------------------------------------

struct VariationSpec {
    EmbeddingForm form;
    WeightScheme scheme;
    bool pca = false;
};

// "idf-delta-pca", "unit-sum", ...
inline std::string variation_name(const VariationSpec& variation) {
    std::string name = scheme_name(variation.scheme);
    name += "-";
    name += form_name(variation.form.kind);
    if (variation.pca) name += "-pca";
    return name;
}

// The 18 combinations {idf, sif, subsample} x {sum, center, delta} x {, pca}.
inline std::vector<VariationSpec> full_variation_matrix() {
    std::vector<VariationSpec> variations;
    for (const WeightKind scheme : {WeightKind::Idf, WeightKind::Sif, WeightKind::Subsample}) {
        for (const FormKind form : {FormKind::Sum, FormKind::Center, FormKind::Delta}) {
            for (const bool pca : {false, true}) {
                VariationSpec v;
                v.form.kind = form;
                v.scheme.kind = scheme;
                v.pca = pca;
                variations.push_back(v);
            }
        }
    }
    return variations;
}

inline VariationSpec unit_sum_baseline() {
    VariationSpec v;
    v.form.kind = FormKind::Sum;
    v.scheme.kind = WeightKind::Unit;
    return v;
}

// "full" = the 18; "all" = the 18 plus unit-sum; "idf" = the six idf
// columns plus unit-sum; otherwise a comma-separated list of names.
inline std::vector<VariationSpec> parse_variations(std::string_view selector) {
    if (selector == "full") return full_variation_matrix();
    std::vector<VariationSpec> all = full_variation_matrix();
    all.push_back(unit_sum_baseline());
    if (selector == "all" || selector.empty()) return all;
    if (selector == "idf") {
        std::vector<VariationSpec> picked;
        for (const auto& v : all) {
            if (v.scheme.kind == WeightKind::Idf || v.scheme.kind == WeightKind::Unit) {
                picked.push_back(v);
            }
        }
        return picked;
    }
    std::vector<VariationSpec> picked;
    for (const auto& field : detail::split(selector, ',')) {
        bool found = false;
        for (const auto& v : all) {
            if (variation_name(v) == field) {
                picked.push_back(v);
                found = true;
                break;
            }
        }
        if (!found) {
            throw std::invalid_argument("unknown variation '" + std::string(field) + "'");
        }
    }
    return picked;
}

struct LengthStats {
    std::int64_t min_words = 0;
    double mean_words = 0.0;
    std::int64_t max_words = 0;
};

inline LengthStats length_report(std::span<const BenchmarkDocument> documents,
                                 const TokenizerConfig& tokenizer = {}) {
    LengthStats stats;
    if (documents.empty()) return stats;
    std::int64_t total = 0;
    bool first = true;
    for (const auto& doc : documents) {
        const std::int64_t words =
            static_cast<std::int64_t>(tokenize(doc.text, tokenizer).size());
        total += words;
        if (first || words < stats.min_words) stats.min_words = words;
        if (first || words > stats.max_words) stats.max_words = words;
        first = false;
    }
    stats.mean_words = static_cast<double>(total) / static_cast<double>(documents.size());
    return stats;
}

struct VariationOutcome {
    std::optional<double> auc;
    std::string error;  // set instead of auc when the variation failed wholesale
};

struct ResultRow {
    std::string key;  // k value or group id
    std::vector<VariationOutcome> outcomes;
    LengthStats lengths;
};

struct ResultTable {
    std::vector<std::string> variation_names;
    std::vector<ResultRow> rows;
};

// One benchmark problem, every variation: embed, optionally remove the
// common component over the whole document matrix, score, AUC. A failing
// variation records an error cell rather than aborting the row.
inline ResultTable run_variation_matrix(std::span<const BenchmarkDocument> documents,
                                        std::span<const EvalPair> pairs,
                                        const VectorStore& store,
                                        const CorpusStats& corpus,
                                        std::span<const VariationSpec> variations,
                                        const TokenizerConfig& tokenizer = {},
                                        std::string row_key = "1",
                                        unsigned threads = 1,
                                        bool pca_mean_center = false) {
    ResultTable table;
    for (const auto& v : variations) table.variation_names.push_back(variation_name(v));

    std::vector<DocTermStats> stats(documents.size());
    detail::parallel_for(documents.size(), threads, [&](std::size_t i) {
        stats[i] = doc_term_stats(tokenize(documents[i].text, tokenizer), corpus, store,
                                  false, documents[i].id);
    });

    ResultRow row;
    row.key = std::move(row_key);
    row.lengths = length_report(documents, tokenizer);
    for (const auto& variation : variations) {
        VariationOutcome outcome;
        try {
            BatchResult batch =
                embed_batch(stats, variation.form, variation.scheme, store, corpus, threads);
            if (batch.embeddings.empty()) {
                throw std::runtime_error("all documents were skipped");
            }
            if (variation.pca) {
                PcaOptions options;
                options.mean_center = pca_mean_center;
                const PrincipalComponent pc =
                    first_principal_component(embedding_matrix(batch.embeddings), options);
                batch.embeddings = remove_common_component(std::move(batch.embeddings), pc);
            }
            const EvalResult result =
                evaluate_pairs(embedding_map(batch.embeddings), pairs, threads);
            outcome.auc = result.auc;
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
        row.outcomes.push_back(std::move(outcome));
    }
    table.rows.push_back(std::move(row));
    return table;
}

inline void append_rows(ResultTable& into, ResultTable&& from) {
    if (into.variation_names.empty()) {
        into.variation_names = std::move(from.variation_names);
    } else if (into.variation_names != from.variation_names) {
        throw std::invalid_argument("result tables have different variation columns");
    }
    for (auto& row : from.rows) into.rows.push_back(std::move(row));
}

// --- reports ----------------------------------------------------------------

inline std::string format_outcome(const VariationOutcome& outcome) {
    return outcome.auc ? detail::format_fixed(*outcome.auc, 4) : std::string("error");
}

inline void write_result_csv(std::ostream& out, const ResultTable& table,
                             std::string_view key_header = "k") {
    out << key_header;
    for (const auto& name : table.variation_names) out << "," << name;
    out << "\n";
    for (const auto& row : table.rows) {
        out << row.key;
        for (const auto& outcome : row.outcomes) out << "," << format_outcome(outcome);
        out << "\n";
    }
}

inline void write_result_markdown(std::ostream& out, const ResultTable& table,
                                  std::string_view key_header = "k") {
    std::vector<std::size_t> widths;
    widths.push_back(key_header.size());
    for (const auto& row : table.rows) widths[0] = std::max(widths[0], row.key.size());
    for (std::size_t c = 0; c < table.variation_names.size(); ++c) {
        std::size_t w = table.variation_names[c].size();
        for (const auto& row : table.rows) {
            w = std::max(w, format_outcome(row.outcomes[c]).size());
        }
        widths.push_back(w);
    }
    auto pad = [](std::string_view text, std::size_t width) {
        std::string cell(text);
        cell.resize(std::max(width, cell.size()), ' ');
        return cell;
    };
    out << "| " << pad(key_header, widths[0]);
    for (std::size_t c = 0; c < table.variation_names.size(); ++c) {
        out << " | " << pad(table.variation_names[c], widths[c + 1]);
    }
    out << " |\n";
    out << "| " << std::string(widths[0], '-');
    for (std::size_t c = 0; c < table.variation_names.size(); ++c) {
        out << " | " << std::string(widths[c + 1], '-');
    }
    out << " |\n";
    for (const auto& row : table.rows) {
        out << "| " << pad(row.key, widths[0]);
        for (std::size_t c = 0; c < row.outcomes.size(); ++c) {
            out << " | " << pad(format_outcome(row.outcomes[c]), widths[c + 1]);
        }
        out << " |\n";
    }
}

// Three-column length report: min / mean / max words per row key.
inline void write_length_csv(std::ostream& out, const ResultTable& table,
                             std::string_view key_header = "k") {
    out << key_header << ",min_words,mean_words,max_words\n";
    for (const auto& row : table.rows) {
        out << row.key << "," << row.lengths.min_words << ","
            << detail::format_fixed(row.lengths.mean_words, 1) << ","
            << row.lengths.max_words << "\n";
    }
}

}  // namespace docembed
