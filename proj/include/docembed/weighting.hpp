#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "docembed/corpus_stats.hpp"
#include "docembed/detail/strings.hpp"

namespace docembed {

enum class WeightKind { Idf, Sif, Subsample, Unit };

struct WeightScheme {
    WeightKind kind = WeightKind::Idf;
    double a = 1e-4;  // SIF smoothing parameter
    double t = 1e-5;  // subsampling threshold
    // Global multiplier; renormalization makes embedding directions
    // invariant to it, so it exists for testing that invariance.
    double scale = 1.0;
    // Substitute the min-max rescaled idf (plot scaling) for raw idf.
    bool idf_scaled = false;
};

inline std::string_view weight_kind_name(WeightKind kind) {
    switch (kind) {
        case WeightKind::Idf: return "idf";
        case WeightKind::Sif: return "sif";
        case WeightKind::Subsample: return "subsample";
        case WeightKind::Unit: return "unit";
    }
    return "unknown";
}

inline std::optional<WeightKind> parse_weight_kind(std::string_view name) {
    if (name == "idf") return WeightKind::Idf;
    if (name == "sif") return WeightKind::Sif;
    if (name == "subsample") return WeightKind::Subsample;
    if (name == "unit") return WeightKind::Unit;
    return std::nullopt;
}

inline std::string scheme_name(const WeightScheme& scheme) {
    return std::string(weight_kind_name(scheme.kind));
}

inline void validate(const WeightScheme& scheme) {
    if (!(scheme.a > 0.0)) throw std::invalid_argument("weight scheme: a must be positive");
    if (!(scheme.t > 0.0)) throw std::invalid_argument("weight scheme: t must be positive");
    if (!(scheme.scale > 0.0)) throw std::invalid_argument("weight scheme: scale must be positive");
}

// w = a / (a + tf_ic)
inline double sif_weight(double a, double tf_corpus) {
    return a / (a + tf_corpus);
}

// w = sqrt(t / tf_ic) for tf_ic >= t, else 1. Continuous at t.
inline double subsample_weight(double t, double tf_corpus) {
    return tf_corpus >= t ? std::sqrt(t / tf_corpus) : 1.0;
}

inline double weight(const WeightScheme& scheme, std::string_view word,
                     const CorpusStats& corpus) {
    validate(scheme);
    switch (scheme.kind) {
        case WeightKind::Idf:
            return scheme.scale *
                   (scheme.idf_scaled ? corpus.scaled_idf(word) : corpus.idf(word));
        case WeightKind::Sif:
            return scheme.scale * sif_weight(scheme.a, corpus.corpus_term_frequency(word));
        case WeightKind::Subsample:
            return scheme.scale *
                   subsample_weight(scheme.t, corpus.corpus_term_frequency(word));
        case WeightKind::Unit:
            return scheme.scale;
    }
    throw std::logic_error("unreachable weight kind");
}

struct CurvePoint {
    double tf_corpus = 0.0;
    std::string scheme;
    double weight = 0.0;
};

inline std::vector<double> log_spaced_grid(double lo, double hi, std::size_t points) {
    if (points == 0) return {};
    if (!(lo > 0.0) || !(hi >= lo)) {
        throw std::invalid_argument("log grid requires 0 < lo <= hi");
    }
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = lo;
        return grid;
    }
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = std::exp(log_lo + step * static_cast<double>(i));
    }
    return grid;
}

// Data behind the weight-function comparison figure: one row per
// (grid point, scheme). SIF/Subsample/Unit are direct function
// evaluations. idf is a function of D_i, not tf_ic, so its row reports
// the 0-1 rescaled idf of the counted word whose tf_ic is nearest to the
// grid point.
inline std::vector<CurvePoint> emit_weight_curves(const CorpusStats& corpus,
                                                  std::span<const WeightScheme> schemes,
                                                  std::span<const double> grid) {
    for (const auto& scheme : schemes) validate(scheme);
    for (double g : grid) {
        if (!(g > 0.0) || g > 1.0) {
            throw std::invalid_argument("grid values must lie in (0, 1]");
        }
    }
    std::vector<CurvePoint> rows;
    rows.reserve(grid.size() * schemes.size());
    for (double g : grid) {
        for (const auto& scheme : schemes) {
            CurvePoint row;
            row.tf_corpus = g;
            row.scheme = scheme_name(scheme);
            switch (scheme.kind) {
                case WeightKind::Sif:
                    row.weight = sif_weight(scheme.a, g);
                    break;
                case WeightKind::Subsample:
                    row.weight = subsample_weight(scheme.t, g);
                    break;
                case WeightKind::Unit:
                    row.weight = 1.0;
                    break;
                case WeightKind::Idf: {
                    double best_diff = std::numeric_limits<double>::infinity();
                    const std::string* best_token = nullptr;
                    for (const auto& [token, stats] : corpus.terms()) {
                        const double tf = corpus.corpus_term_frequency(token);
                        const double diff = std::abs(tf - g);
                        if (diff < best_diff) {
                            best_diff = diff;
                            best_token = &token;
                        }
                    }
                    if (!best_token) {
                        throw std::runtime_error("idf curve requires a non-empty corpus");
                    }
                    row.weight = corpus.scaled_idf(*best_token);
                    break;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline void write_curves_csv(std::ostream& out, std::span<const CurvePoint> rows) {
    out << "tf_corpus,scheme,weight\n";
    for (const auto& row : rows) {
        out << detail::format_double(row.tf_corpus, 12) << "," << row.scheme << ","
            << detail::format_double(row.weight, 12) << "\n";
    }
}

}  // namespace docembed
