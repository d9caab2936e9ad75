#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "docembed/detail/random.hpp"
#include "docembed/detail/strings.hpp"
#include "docembed/embedder.hpp"
#include "docembed/errors.hpp"

namespace docembed {

struct RowMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

// Collects the current document vectors as matrix rows.
inline RowMatrix embedding_matrix(std::span<const DocEmbedding> embeddings) {
    RowMatrix m;
    m.rows = embeddings.size();
    m.cols = embeddings.empty() ? 0 : embeddings.front().vector().size();
    m.data.reserve(m.rows * m.cols);
    for (const auto& e : embeddings) {
        const auto& v = e.vector();
        if (v.size() != m.cols) {
            throw std::invalid_argument("embedding dimension mismatch in matrix");
        }
        m.data.insert(m.data.end(), v.begin(), v.end());
    }
    return m;
}

struct PrincipalComponent {
    std::vector<double> p;  // unit norm; first nonzero component positive
    int iterations_used = 0;
    double residual = 0.0;
};

struct PcaOptions {
    // No mean-centering by default: common component removal operates on
    // the document vectors as collected.
    bool mean_center = false;
    double tolerance = 1e-9;
    int max_iterations = 1000;
    // Residual above this after max_iterations is a hard failure.
    double failure_residual = 1e-6;
};

// Dominant right singular vector of X via power iteration on X^T X.
// Start vector: the normalized column sum of X blended with a small
// fixed-seed pseudo-random direction. The column sum alone can land
// exactly on a minor eigenvector (it does for rows {e1, -e1, 0.1*e2});
// the blend keeps the start deterministic while making it generically
// non-orthogonal to the dominant eigenvector.
inline PrincipalComponent first_principal_component(const RowMatrix& x,
                                                    const PcaOptions& options = {}) {
    if (x.rows < 2) {
        throw std::invalid_argument("first principal component requires >= 2 rows");
    }
    if (x.cols < 1) {
        throw std::invalid_argument("first principal component requires >= 1 column");
    }
    for (double v : x.data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("matrix contains non-finite entries");
        }
    }
    const std::size_t k = x.cols;

    // Gram matrix G = X^T X, optionally downdated for mean-centering:
    // (X - 1 m^T)^T (X - 1 m^T) = X^T X - n m m^T.
    std::vector<double> gram(k * k, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* row = x.data.data() + r * k;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i; j < k; ++j) {
                gram[i * k + j] += row[i] * row[j];
            }
        }
    }
    std::vector<double> col_sum(k, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r) {
        for (std::size_t i = 0; i < k; ++i) col_sum[i] += x.at(r, i);
    }
    if (options.mean_center) {
        const double n = static_cast<double>(x.rows);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i; j < k; ++j) {
                gram[i * k + j] -= col_sum[i] * col_sum[j] / n;
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < i; ++j) gram[i * k + j] = gram[j * k + i];
    }

    auto norm_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) s += e * e;
        return std::sqrt(s);
    };

    // Start vector.
    std::vector<double> p = col_sum;
    double norm = norm_of(p);
    if (norm < 1e-12) {
        p.assign(k, 0.0);
        p[0] = 1.0;  // e1 fallback
    } else {
        for (auto& e : p) e /= norm;
    }
    std::mt19937_64 blend_rng(0x5eedc0de);
    const auto g = detail::random_unit_vector(blend_rng, k);
    for (std::size_t i = 0; i < k; ++i) p[i] += 0.01 * g[i];
    norm = norm_of(p);
    if (norm < 1e-12) {
        p.assign(k, 0.0);
        p[0] = 1.0;
    } else {
        for (auto& e : p) e /= norm;
    }

    PrincipalComponent result;
    std::vector<double> next(k, 0.0);
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    int iteration = 0;
    for (; iteration < options.max_iterations; ++iteration) {
        for (std::size_t i = 0; i < k; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) acc += gram[i * k + j] * p[j];
            next[i] = acc;
        }
        const double next_norm = norm_of(next);
        if (next_norm < 1e-300) {
            throw ConvergenceError(1.0, iteration);  // zero Gram matrix
        }
        for (auto& e : next) e /= next_norm;
        double diff_sq = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double d = next[i] - p[i];
            diff_sq += d * d;
        }
        residual = std::sqrt(diff_sq);
        p = next;
        if (residual <= options.tolerance) {
            converged = true;
            ++iteration;
            break;
        }
    }
    if (!converged && residual > options.failure_residual) {
        throw ConvergenceError(residual, iteration);
    }

    // Sign convention: first component with magnitude above 1e-12 is positive.
    for (double v : p) {
        if (std::abs(v) > 1e-12) {
            if (v < 0.0) {
                for (auto& e : p) e = -e;
            }
            break;
        }
    }
    result.p = std::move(p);
    result.iterations_used = iteration;
    result.residual = residual;
    return result;
}

// u <- u - p (p . u) for every embedding. The results are intentionally
// NOT renormalized; cosine scoring downstream is scale-invariant, and
// embeddings fully captured by p legitimately become zero.
inline std::vector<DocEmbedding> remove_common_component(std::vector<DocEmbedding> embeddings,
                                                         const PrincipalComponent& pc) {
    double norm_sq = 0.0;
    for (double v : pc.p) norm_sq += v * v;
    if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-9) {
        throw std::invalid_argument("principal component must have unit norm");
    }
    for (auto& e : embeddings) {
        if (e.unit.empty()) {
            throw std::invalid_argument("embedding '" + e.doc_id +
                                        "' has no unit vector to project");
        }
        if (e.unit.size() != pc.p.size()) {
            throw std::invalid_argument("dimension mismatch between embedding and component");
        }
        double proj = 0.0;
        for (std::size_t i = 0; i < pc.p.size(); ++i) proj += pc.p[i] * e.unit[i];
        for (std::size_t i = 0; i < pc.p.size(); ++i) e.unit[i] -= pc.p[i] * proj;
        e.common_component_removed = true;
    }
    return embeddings;
}

// Single line "PC <dim> f1 ... f_dim".
inline void write_principal_component(std::ostream& out, const PrincipalComponent& pc) {
    out << "PC " << pc.p.size();
    for (double v : pc.p) out << " " << detail::format_double(v);
    out << "\n";
}

inline PrincipalComponent read_principal_component(const std::filesystem::path& path) {
    std::ifstream in(path);
    const std::string path_str = path.string();
    if (!in) throw std::runtime_error("cannot open component file: " + path_str);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path_str, 1, "empty component file");
    detail::chomp_cr(line);
    const auto fields = detail::split(line, ' ');
    if (fields.size() < 3 || fields[0] != "PC") {
        throw ParseError(path_str, 1, "expected 'PC <dim> f1 ... f_dim'");
    }
    const auto dim = detail::parse_int(fields[1]);
    if (!dim || *dim < 1 || static_cast<std::size_t>(*dim) != fields.size() - 2) {
        throw ParseError(path_str, 1, "declared dimension does not match row");
    }
    PrincipalComponent pc;
    pc.p.reserve(fields.size() - 2);
    for (std::size_t i = 2; i < fields.size(); ++i) {
        const auto value = detail::parse_double(fields[i]);
        if (!value || !std::isfinite(*value)) {
            throw ParseError(path_str, 1, "malformed component");
        }
        pc.p.push_back(*value);
    }
    return pc;
}

}  // namespace docembed
