#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "docembed/detail/strings.hpp"
#include "docembed/errors.hpp"
#include "docembed/tokenizer.hpp"
#include "docembed/vector_store.hpp"

namespace docembed {

struct TermStats {
    std::int64_t corpus_count = 0;   // n_ic
    std::int64_t doc_frequency = 0;  // D_i
};

// Corpus-wide term and document frequencies, built in one streaming pass.
// Immutable once built (by convention); readers are thread-safe.
class CorpusStats {
public:
    void add_document(std::span<const std::string> tokens) {
        ++doc_count_;
        total_tokens_ += static_cast<std::int64_t>(tokens.size());
        // First pass: raw counts; second: document frequency once per word.
        std::map<std::string_view, std::int64_t> in_doc;
        for (const auto& token : tokens) ++in_doc[token];
        for (const auto& [token, count] : in_doc) {
            auto it = terms_.find(token);
            if (it == terms_.end()) {
                it = terms_.emplace(std::string(token), TermStats{}).first;
            }
            it->second.corpus_count += count;
            it->second.doc_frequency += 1;
        }
        idf_range_cache_.reset();
    }

    std::int64_t total_tokens() const noexcept { return total_tokens_; }  // N_c
    std::int64_t doc_count() const noexcept { return doc_count_; }        // D
    std::size_t distinct_words() const noexcept { return terms_.size(); }

    const TermStats* find(std::string_view word) const {
        const auto it = terms_.find(word);
        return it == terms_.end() ? nullptr : &it->second;
    }

    bool contains(std::string_view word) const { return find(word) != nullptr; }

    // tf_ic = n_ic / N_c
    double corpus_term_frequency(std::string_view word) const {
        const TermStats* stats = require(word);
        return static_cast<double>(stats->corpus_count) /
               static_cast<double>(total_tokens_);
    }

    // idf_i = ln(D / D_i); zero when the word appears in every document.
    double idf(std::string_view word) const {
        const TermStats* stats = require(word);
        if (doc_count_ < 1) throw std::runtime_error("idf undefined: empty corpus");
        return std::log(static_cast<double>(doc_count_) /
                        static_cast<double>(stats->doc_frequency));
    }

    // Min-max rescaled idf: the min maps to 0 and the max to 1 over all
    // counted words. Used for plotting, not for embedding weights.
    double scaled_idf(std::string_view word) const {
        const auto [min_idf, max_idf] = idf_range();
        if (max_idf == min_idf) {
            throw std::runtime_error(
                "degenerate idf scale: all counted words have equal idf");
        }
        return (idf(word) - min_idf) / (max_idf - min_idf);
    }

    std::pair<double, double> idf_range() const {
        if (!idf_range_cache_) {
            if (terms_.empty() || doc_count_ < 1) {
                throw std::runtime_error("idf range undefined: empty corpus");
            }
            std::int64_t min_df = terms_.begin()->second.doc_frequency;
            std::int64_t max_df = min_df;
            for (const auto& [token, stats] : terms_) {
                min_df = std::min(min_df, stats.doc_frequency);
                max_df = std::max(max_df, stats.doc_frequency);
            }
            // idf is decreasing in D_i, so the df extremes give the idf extremes.
            const double d = static_cast<double>(doc_count_);
            idf_range_cache_ = {std::log(d / static_cast<double>(max_df)),
                                std::log(d / static_cast<double>(min_df))};
        }
        return *idf_range_cache_;
    }

    const std::map<std::string, TermStats, std::less<>>& terms() const {
        return terms_;
    }

    // Versioned line-oriented text: version line, "D N_c", then
    // "token n_ic D_i" rows sorted by token.
    void save(std::ostream& out) const {
        out << kFileVersion << "\n";
        out << doc_count_ << " " << total_tokens_ << "\n";
        for (const auto& [token, stats] : terms_) {
            out << token << " " << stats.corpus_count << " " << stats.doc_frequency
                << "\n";
        }
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write stats file: " + path.string());
        save(out);
    }

    static CorpusStats load(const std::filesystem::path& path) {
        std::ifstream in(path);
        const std::string path_str = path.string();
        if (!in) throw std::runtime_error("cannot open stats file: " + path_str);
        std::string line;
        if (!std::getline(in, line)) throw ParseError(path_str, 1, "empty stats file");
        detail::chomp_cr(line);
        if (line != kFileVersion) {
            throw ParseError(path_str, 1, "unsupported stats file version '" + line + "'");
        }
        if (!std::getline(in, line)) throw ParseError(path_str, 2, "missing totals line");
        detail::chomp_cr(line);
        auto fields = detail::split(line, ' ');
        const auto doc_count = fields.size() == 2 ? detail::parse_int(fields[0]) : std::nullopt;
        const auto total = fields.size() == 2 ? detail::parse_int(fields[1]) : std::nullopt;
        if (!doc_count || !total || *doc_count < 0 || *total < 0) {
            throw ParseError(path_str, 2, "malformed totals line (expected '<D> <N_c>')");
        }
        CorpusStats stats;
        stats.doc_count_ = *doc_count;
        stats.total_tokens_ = *total;
        std::size_t line_no = 2;
        while (std::getline(in, line)) {
            ++line_no;
            detail::chomp_cr(line);
            fields = detail::split(line, ' ');
            if (fields.size() != 3) {
                throw ParseError(path_str, line_no, "expected 'token n_ic D_i'");
            }
            const auto count = detail::parse_int(fields[1]);
            const auto df = detail::parse_int(fields[2]);
            if (!count || !df || *count < 1 || *df < 1) {
                throw ParseError(path_str, line_no, "malformed counts");
            }
            if (*df > stats.doc_count_ || *count < *df) {
                throw ParseError(path_str, line_no, "inconsistent counts");
            }
            const auto [it, inserted] =
                stats.terms_.emplace(std::string(fields[0]), TermStats{*count, *df});
            if (!inserted) {
                throw ParseError(path_str, line_no,
                                 "duplicate token '" + std::string(fields[0]) + "'");
            }
        }
        return stats;
    }

private:
    static constexpr const char* kFileVersion = "docembed-corpus-stats v1";

    const TermStats* require(std::string_view word) const {
        const TermStats* stats = find(word);
        if (!stats) {
            throw std::runtime_error("word not counted in corpus: '" +
                                     std::string(word) + "'");
        }
        return stats;
    }

    std::int64_t total_tokens_ = 0;
    std::int64_t doc_count_ = 0;
    std::map<std::string, TermStats, std::less<>> terms_;
    mutable std::optional<std::pair<double, double>> idf_range_cache_;
};

template <typename DocRange>
CorpusStats build_corpus_stats(const DocRange& docs) {
    CorpusStats stats;
    for (const auto& tokens : docs) stats.add_document(tokens);
    return stats;
}

struct DocTerm {
    std::string token;
    std::int64_t count = 0;  // n_i
    double tf = 0.0;         // n_i / N
    double delta = 0.0;      // tf_i - tf_ic
};

// Per-document term statistics over the embeddable vocabulary, sorted by
// token so downstream accumulation order is pinned.
struct DocTermStats {
    std::string doc_id;
    std::int64_t total_count = 0;  // N
    std::vector<DocTerm> terms;

    bool empty() const noexcept { return terms.empty(); }
};

// Only tokens present in BOTH the vector store and the corpus stats are
// counted; everything else is dropped before N is computed, keeping
// sum(tf_i) = 1 over embeddable words. With oov_in_denominator, dropped
// tokens still count toward N (tf then sums below 1).
inline DocTermStats doc_term_stats(std::span<const std::string> tokens,
                                   const CorpusStats& corpus,
                                   const VectorStore& store,
                                   bool oov_in_denominator = false,
                                   std::string doc_id = {}) {
    DocTermStats result;
    result.doc_id = std::move(doc_id);
    std::map<std::string_view, std::int64_t> counts;
    std::int64_t kept_total = 0;
    for (const auto& token : tokens) {
        if (corpus.contains(token) && store.contains(token)) {
            ++counts[token];
            ++kept_total;
        }
    }
    if (counts.empty()) return result;  // N = 0: a first-class empty value
    result.total_count =
        oov_in_denominator ? static_cast<std::int64_t>(tokens.size()) : kept_total;
    result.terms.reserve(counts.size());
    const double n = static_cast<double>(result.total_count);
    for (const auto& [token, count] : counts) {
        DocTerm term;
        term.token = std::string(token);
        term.count = count;
        term.tf = static_cast<double>(count) / n;
        term.delta = term.tf - corpus.corpus_term_frequency(token);
        result.terms.push_back(std::move(term));
    }
    return result;
}

// --- corpus input formats -------------------------------------------------

struct RawDocument {
    std::string id;
    std::string text;
};

// One document per line, UTF-8; ids are 1-based line numbers.
inline std::vector<RawDocument> load_docs_per_line(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());
    std::vector<RawDocument> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        docs.push_back({std::to_string(line_no), line});
    }
    return docs;
}

// Directory of .txt files, one document per file; ids are file stems,
// ordered by filename for determinism.
inline std::vector<RawDocument> load_docs_from_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<RawDocument> docs;
    docs.reserve(files.size());
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot open document: " + file.string());
        std::ostringstream text;
        text << in.rdbuf();
        docs.push_back({file.stem().string(), text.str()});
    }
    return docs;
}

inline std::vector<RawDocument> load_corpus_documents(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("corpus path does not exist: " + path.string());
    }
    return std::filesystem::is_directory(path) ? load_docs_from_dir(path)
                                               : load_docs_per_line(path);
}

}  // namespace docembed
