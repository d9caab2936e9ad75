#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docembed/corpus_stats.hpp"
#include "docembed/detail/parallel.hpp"
#include "docembed/detail/strings.hpp"
#include "docembed/errors.hpp"
#include "docembed/vector_store.hpp"
#include "docembed/weighting.hpp"

namespace docembed {

// Coefficient vectors with a norm below this are refused rather than
// renormalized into NaN.
inline constexpr double kZeroNormTolerance = 1e-12;

enum class FormKind { Sum, Center, Delta };

struct EmbeddingForm {
    FormKind kind = FormKind::Sum;
    // Center only: restrict the corpus-center sum to words with
    // tf_ic >= threshold. Absent by default; restricting the second sum
    // to the document's own words (the delta form) works better.
    std::optional<double> center_threshold;
};

inline std::string_view form_name(FormKind kind) {
    switch (kind) {
        case FormKind::Sum: return "sum";
        case FormKind::Center: return "center";
        case FormKind::Delta: return "delta";
    }
    return "unknown";
}

inline std::optional<FormKind> parse_form_kind(std::string_view name) {
    if (name == "sum") return FormKind::Sum;
    if (name == "center") return FormKind::Center;
    if (name == "delta") return FormKind::Delta;
    return std::nullopt;
}

struct DocEmbedding {
    std::string doc_id;
    std::vector<double> coefficients;  // unnormalized c
    std::vector<double> unit;          // u = c/|c|, then post-processed in place
    // Set once the common component has been projected out; from then on
    // `unit` is no longer parallel to `coefficients` (and no longer unit norm).
    bool common_component_removed = false;

    const std::vector<double>& vector() const {
        return unit.empty() ? coefficients : unit;
    }
};

// Second term of the center form, computed once and reused across
// documents. The fingerprint ties it to the weight scheme (and optional
// tf threshold) it was built with.
struct CorpusCenter {
    std::vector<double> center;
    std::string fingerprint;
};

inline std::string center_fingerprint(const WeightScheme& scheme,
                                      std::optional<double> tf_threshold) {
    std::string fp = scheme_name(scheme);
    fp += "|a=" + detail::format_double(scheme.a);
    fp += "|t=" + detail::format_double(scheme.t);
    fp += "|scale=" + detail::format_double(scheme.scale);
    fp += "|idf_scaled=" + std::string(scheme.idf_scaled ? "1" : "0");
    fp += "|thr=";
    fp += tf_threshold ? detail::format_double(*tf_threshold) : "none";
    return fp;
}

inline std::vector<double> renormalize(std::span<const double> c) {
    double norm_sq = 0.0;
    for (double x : c) norm_sq += x * x;
    const double norm = std::sqrt(norm_sq);
    if (norm < kZeroNormTolerance) {
        throw EmbedError(SkipCause::ZeroNormEmbedding, "");
    }
    std::vector<double> unit(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) unit[i] = c[i] / norm;
    return unit;
}

namespace detail {

inline void axpy(std::vector<double>& acc, double alpha, const std::vector<double>& v) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += alpha * v[i];
}

inline DocEmbedding finish_embedding(const DocTermStats& doc, std::vector<double> c) {
    double norm_sq = 0.0;
    for (double x : c) norm_sq += x * x;
    if (std::sqrt(norm_sq) < kZeroNormTolerance) {
        throw EmbedError(SkipCause::ZeroNormEmbedding, doc.doc_id);
    }
    DocEmbedding embedding;
    embedding.doc_id = doc.doc_id;
    embedding.unit = renormalize(c);
    embedding.coefficients = std::move(c);
    return embedding;
}

inline void require_nonempty(const DocTermStats& doc) {
    if (doc.empty()) throw EmbedError(SkipCause::EmptyDocument, doc.doc_id);
}

}  // namespace detail

// c = sum over the document's words of w_i tf_i v_i, renormalized.
inline DocEmbedding embed_sum(const DocTermStats& doc, const VectorStore& store,
                              const CorpusStats& corpus, const WeightScheme& scheme) {
    detail::require_nonempty(doc);
    std::vector<double> c(store.dimension(), 0.0);
    for (const auto& term : doc.terms) {  // terms are token-sorted: fixed order
        const std::vector<double>* v = store.lookup(term.token);
        if (!v) throw std::runtime_error("document term missing from store: " + term.token);
        detail::axpy(c, weight(scheme, term.token, corpus) * term.tf, *v);
    }
    return detail::finish_embedding(doc, std::move(c));
}

// center = sum over ALL counted, in-store words of w_i tf_ic v_i.
inline CorpusCenter build_corpus_center(const VectorStore& store,
                                        const CorpusStats& corpus,
                                        const WeightScheme& scheme,
                                        std::optional<double> tf_threshold = std::nullopt) {
    CorpusCenter result;
    result.fingerprint = center_fingerprint(scheme, tf_threshold);
    result.center.assign(store.dimension(), 0.0);
    bool any_shared = false;
    for (const auto& [token, stats] : corpus.terms()) {
        const std::vector<double>* v = store.lookup(token);
        if (!v) continue;
        any_shared = true;
        const double tf = corpus.corpus_term_frequency(token);
        if (tf_threshold && tf < *tf_threshold) continue;
        detail::axpy(result.center, weight(scheme, token, corpus) * tf, *v);
    }
    if (!any_shared) {
        throw std::runtime_error("corpus and vector store share no tokens");
    }
    return result;
}

// c = (sum over document words of w_i tf_i v_i) - corpus center.
inline DocEmbedding embed_center(const DocTermStats& doc, const VectorStore& store,
                                 const CorpusStats& corpus, const WeightScheme& scheme,
                                 const CorpusCenter& center,
                                 std::optional<double> tf_threshold = std::nullopt) {
    detail::require_nonempty(doc);
    if (center.fingerprint != center_fingerprint(scheme, tf_threshold)) {
        throw std::invalid_argument("corpus center fingerprint mismatch: built with '" +
                                    center.fingerprint + "', used with '" +
                                    center_fingerprint(scheme, tf_threshold) + "'");
    }
    if (center.center.size() != store.dimension()) {
        throw std::invalid_argument("corpus center dimension mismatch");
    }
    std::vector<double> c(store.dimension(), 0.0);
    for (const auto& term : doc.terms) {
        const std::vector<double>* v = store.lookup(term.token);
        if (!v) throw std::runtime_error("document term missing from store: " + term.token);
        detail::axpy(c, weight(scheme, term.token, corpus) * term.tf, *v);
    }
    for (std::size_t i = 0; i < c.size(); ++i) c[i] -= center.center[i];
    return detail::finish_embedding(doc, std::move(c));
}

// c = sum over document words of w_i (tf_i - tf_ic) v_i. Both sums of the
// center form restricted to the document's own words.
inline DocEmbedding embed_delta(const DocTermStats& doc, const VectorStore& store,
                                const CorpusStats& corpus, const WeightScheme& scheme) {
    detail::require_nonempty(doc);
    std::vector<double> c(store.dimension(), 0.0);
    for (const auto& term : doc.terms) {
        const std::vector<double>* v = store.lookup(term.token);
        if (!v) throw std::runtime_error("document term missing from store: " + term.token);
        detail::axpy(c, weight(scheme, term.token, corpus) * term.delta, *v);
    }
    return detail::finish_embedding(doc, std::move(c));
}

struct SkippedDoc {
    std::string doc_id;
    SkipCause cause;
};

struct BatchResult {
    std::vector<DocEmbedding> embeddings;
    std::vector<SkippedDoc> skipped;
};

// Embeds a document set, order-preserving. Documents that cannot be
// embedded land in the skip report instead of vanishing. Results are
// identical for any thread count: each slot is written independently.
inline BatchResult embed_batch(std::span<const DocTermStats> docs,
                               const EmbeddingForm& form, const WeightScheme& scheme,
                               const VectorStore& store, const CorpusStats& corpus,
                               unsigned threads = 1) {
    std::optional<CorpusCenter> center;
    if (form.kind == FormKind::Center) {
        center = build_corpus_center(store, corpus, scheme, form.center_threshold);
    }
    std::vector<std::optional<DocEmbedding>> slots(docs.size());
    std::vector<std::optional<SkippedDoc>> skips(docs.size());
    detail::parallel_for(docs.size(), threads, [&](std::size_t i) {
        try {
            switch (form.kind) {
                case FormKind::Sum:
                    slots[i] = embed_sum(docs[i], store, corpus, scheme);
                    break;
                case FormKind::Center:
                    slots[i] = embed_center(docs[i], store, corpus, scheme, *center,
                                            form.center_threshold);
                    break;
                case FormKind::Delta:
                    slots[i] = embed_delta(docs[i], store, corpus, scheme);
                    break;
            }
        } catch (const EmbedError& e) {
            skips[i] = SkippedDoc{docs[i].doc_id, e.cause()};
        }
    });
    BatchResult result;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (slots[i]) {
            result.embeddings.push_back(std::move(*slots[i]));
        } else if (skips[i]) {
            result.skipped.push_back(std::move(*skips[i]));
        }
    }
    return result;
}

// --- persistence ------------------------------------------------------------

// Line-oriented text: "doc_id dim f1 ... f_dim".
inline void write_embeddings(std::ostream& out, std::span<const DocEmbedding> embeddings) {
    for (const auto& e : embeddings) {
        const auto& v = e.vector();
        out << e.doc_id << " " << v.size();
        for (double x : v) out << " " << detail::format_double(x);
        out << "\n";
    }
}

inline std::vector<DocEmbedding> read_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    const std::string path_str = path.string();
    if (!in) throw std::runtime_error("cannot open embeddings file: " + path_str);
    std::vector<DocEmbedding> result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        const auto fields = detail::split(line, ' ');
        if (fields.size() < 2) throw ParseError(path_str, line_no, "too few fields");
        const auto dim = detail::parse_int(fields[1]);
        if (!dim || *dim < 1 || static_cast<std::size_t>(*dim) != fields.size() - 2) {
            throw ParseError(path_str, line_no, "declared dimension does not match row");
        }
        DocEmbedding e;
        e.doc_id = std::string(fields[0]);
        e.unit.reserve(fields.size() - 2);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            const auto value = detail::parse_double(fields[i]);
            if (!value || !std::isfinite(*value)) {
                throw ParseError(path_str, line_no, "malformed component");
            }
            e.unit.push_back(*value);
        }
        e.coefficients = e.unit;
        result.push_back(std::move(e));
    }
    std::map<std::string, int> ids;
    for (const auto& e : result) {
        if (!result.empty() && e.unit.size() != result.front().unit.size()) {
            throw std::runtime_error("inconsistent embedding dimensions in " + path_str);
        }
        if (++ids[e.doc_id] > 1) {
            throw std::runtime_error("duplicate doc id in embeddings file: " + e.doc_id);
        }
    }
    return result;
}

inline void write_skip_report(std::ostream& out, std::span<const SkippedDoc> skipped) {
    out << "doc_id,cause\n";
    for (const auto& s : skipped) {
        out << s.doc_id << "," << to_string(s.cause) << "\n";
    }
}

}  // namespace docembed
