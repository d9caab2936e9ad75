#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docembed/detail/parallel.hpp"
#include "docembed/detail/random.hpp"
#include "docembed/detail/strings.hpp"
#include "docembed/embedder.hpp"
#include "docembed/errors.hpp"

namespace docembed {

struct EvalPair {
    std::string doc_a;
    std::string doc_b;
    int label = 0;  // 1 iff the documents belong together
};

struct ScoredPair {
    std::string doc_a;
    std::string doc_b;
    int label = 0;
    double score = 0.0;
};

struct EvalResult {
    double auc = 0.0;
    std::int64_t positives = 0;
    std::int64_t negatives = 0;
    std::int64_t skipped_pairs = 0;
};

// u.v / (|u||v|); 0 when either vector is (numerically) zero, which is how
// fully-projected-out embeddings score.
inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("cosine: dimension mismatch (" +
                                    std::to_string(u.size()) + " vs " +
                                    std::to_string(v.size()) + ")");
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    const double norm_u = std::sqrt(nu);
    const double norm_v = std::sqrt(nv);
    if (norm_u < kZeroNormTolerance || norm_v < kZeroNormTolerance) return 0.0;
    return dot / (norm_u * norm_v);
}

using EmbeddingMap = std::map<std::string, std::vector<double>, std::less<>>;

inline EmbeddingMap embedding_map(std::span<const DocEmbedding> embeddings) {
    EmbeddingMap result;
    for (const auto& e : embeddings) {
        if (!result.emplace(e.doc_id, e.vector()).second) {
            throw std::invalid_argument("duplicate doc id: " + e.doc_id);
        }
    }
    return result;
}

struct ScoreReport {
    std::vector<ScoredPair> scored;      // one row per resolvable pair, in input order
    std::int64_t skipped_pairs = 0;      // pairs referencing unknown documents
};

// Pairs referencing documents without an embedding are excluded and
// counted, not scored as 0; scoring them would silently bias the AUC.
inline ScoreReport score_pairs(const EmbeddingMap& embeddings,
                               std::span<const EvalPair> pairs, unsigned threads = 1) {
    std::vector<const std::vector<double>*> a(pairs.size()), b(pairs.size());
    ScoreReport report;
    std::vector<std::size_t> keep;
    keep.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto ita = embeddings.find(pairs[i].doc_a);
        const auto itb = embeddings.find(pairs[i].doc_b);
        if (ita == embeddings.end() || itb == embeddings.end()) {
            ++report.skipped_pairs;
            continue;
        }
        a[i] = &ita->second;
        b[i] = &itb->second;
        keep.push_back(i);
    }
    std::vector<double> scores(pairs.size(), 0.0);
    detail::parallel_for(keep.size(), threads, [&](std::size_t j) {
        const std::size_t i = keep[j];
        scores[i] = cosine_similarity(*a[i], *b[i]);
    });
    report.scored.reserve(keep.size());
    for (std::size_t i : keep) {
        report.scored.push_back({pairs[i].doc_a, pairs[i].doc_b, pairs[i].label, scores[i]});
    }
    return report;
}

// Rank-based (Mann-Whitney) ROC AUC with average ranks for ties:
//   AUC = (sum of positive ranks - P(P+1)/2) / (P * N).
// The sort is stable, so equal scores keep their input (doc-id) order and
// reruns are reproducible.
inline double rank_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("rank_auc: scores/labels size mismatch");
    }
    std::int64_t positives = 0;
    for (int label : labels) positives += label ? 1 : 0;
    const std::int64_t negatives = static_cast<std::int64_t>(labels.size()) - positives;
    if (positives == 0 || negatives == 0) {
        throw std::runtime_error("ROC AUC undefined: labels are single-class");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
        return scores[lhs] < scores[rhs];
    });
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        // 1-based ranks i+1 .. j+1 share the average rank.
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]]) positive_rank_sum += avg_rank;
        }
        i = j + 1;
    }
    const double p = static_cast<double>(positives);
    const double n = static_cast<double>(negatives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

inline EvalResult roc_auc(std::span<const ScoredPair> scored) {
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(scored.size());
    labels.reserve(scored.size());
    for (const auto& row : scored) {
        scores.push_back(row.score);
        labels.push_back(row.label);
    }
    EvalResult result;
    result.auc = rank_auc(scores, labels);
    for (int label : labels) (label ? result.positives : result.negatives) += 1;
    return result;
}

inline EvalResult evaluate_pairs(const EmbeddingMap& embeddings,
                                 std::span<const EvalPair> pairs, unsigned threads = 1) {
    const ScoreReport report = score_pairs(embeddings, pairs, threads);
    EvalResult result = roc_auc(report.scored);
    result.skipped_pairs = report.skipped_pairs;
    return result;
}

struct GroupedId {
    std::string id;
    std::string group;
};

namespace detail {

// Unordered pairs (i, j), i < j, in lexicographic order. offset(i) is the
// linear index of pair (i, i+1).
inline std::uint64_t pair_offset(std::uint64_t i, std::uint64_t n) {
    return i * (2 * n - i - 1) / 2;
}

inline std::pair<std::size_t, std::size_t> decode_pair(std::uint64_t index, std::uint64_t n) {
    std::uint64_t lo = 0, hi = n - 1;  // invariant: offset(lo) <= index < offset(hi+1)
    while (lo < hi) {
        const std::uint64_t mid = (lo + hi + 1) / 2;
        if (pair_offset(mid, n) <= index) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    const std::uint64_t j = lo + 1 + (index - pair_offset(lo, n));
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(j)};
}

}  // namespace detail

// Uniform sample of distinct unordered pairs without replacement (all
// pairs when count covers them), labeled by group equality. Emitted in
// ascending pair order; deterministic given the seed.
inline std::vector<EvalPair> sample_pairs(std::span<const GroupedId> ids,
                                          std::uint64_t count, std::uint64_t seed) {
    if (ids.size() < 2) {
        throw std::invalid_argument("sample_pairs requires at least 2 ids");
    }
    if (count < 1) {
        throw std::invalid_argument("sample_pairs requires count >= 1");
    }
    const std::uint64_t n = ids.size();
    const std::uint64_t total = n * (n - 1) / 2;
    std::vector<std::uint64_t> chosen;
    if (count >= total) {
        chosen.resize(total);
        std::iota(chosen.begin(), chosen.end(), std::uint64_t{0});
    } else {
        // Floyd's algorithm: exactly `count` distinct indices.
        std::mt19937_64 rng(detail::mix_seed(seed, 0x70A1125ull));
        std::set<std::uint64_t> picked;
        for (std::uint64_t j = total - count; j < total; ++j) {
            const std::uint64_t r = detail::bounded(rng, j + 1);
            if (!picked.insert(r).second) picked.insert(j);
        }
        chosen.assign(picked.begin(), picked.end());
    }
    std::vector<EvalPair> pairs;
    pairs.reserve(chosen.size());
    for (const std::uint64_t index : chosen) {
        const auto [i, j] = detail::decode_pair(index, n);
        pairs.push_back({ids[i].id, ids[j].id, ids[i].group == ids[j].group ? 1 : 0});
    }
    return pairs;
}

// --- pair file formats ------------------------------------------------------

// CSV "doc_a,doc_b,label" with header.
inline std::vector<EvalPair> read_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    const std::string path_str = path.string();
    if (!in) throw std::runtime_error("cannot open pair file: " + path_str);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path_str, 1, "empty pair file");
    detail::chomp_cr(line);
    if (line != "doc_a,doc_b,label") {
        throw ParseError(path_str, 1, "expected header 'doc_a,doc_b,label'");
    }
    std::vector<EvalPair> pairs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (fields.size() != 3) {
            throw ParseError(path_str, line_no, "expected 'doc_a,doc_b,label'");
        }
        const auto label = detail::parse_int(fields[2]);
        if (!label || (*label != 0 && *label != 1)) {
            throw ParseError(path_str, line_no, "label must be 0 or 1");
        }
        if (fields[0] == fields[1]) {
            throw ParseError(path_str, line_no, "pair references the same document twice");
        }
        pairs.push_back({std::string(fields[0]), std::string(fields[1]),
                         static_cast<int>(*label)});
    }
    return pairs;
}

inline void write_pairs_csv(std::ostream& out, std::span<const EvalPair> pairs) {
    out << "doc_a,doc_b,label\n";
    for (const auto& pair : pairs) {
        out << pair.doc_a << "," << pair.doc_b << "," << pair.label << "\n";
    }
}

inline void write_scored_csv(std::ostream& out, std::span<const ScoredPair> scored) {
    out << "doc_a,doc_b,label,score\n";
    for (const auto& row : scored) {
        out << row.doc_a << "," << row.doc_b << "," << row.label << ","
            << detail::format_double(row.score) << "\n";
    }
}

}  // namespace docembed
