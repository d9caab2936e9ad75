#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docembed/detail/strings.hpp"
#include "docembed/errors.hpp"

namespace docembed {

enum class VectorFileFormat {
    Word2VecText,  // header "<count> <dim>", then "<token> f1 ... f_dim"
    GloveText,     // no header; dimension inferred from the first row
};

inline std::optional<VectorFileFormat> parse_vector_format(std::string_view name) {
    if (name == "word2vec-text") return VectorFileFormat::Word2VecText;
    if (name == "glove-text") return VectorFileFormat::GloveText;
    return std::nullopt;
}

// Immutable after construction; any number of concurrent readers is fine.
class VectorStore {
public:
    VectorStore() = default;
    explicit VectorStore(std::size_t dimension) : dimension_(dimension) {}

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t vocabulary_size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    bool contains(std::string_view word) const {
        return entries_.find(word) != entries_.end();
    }

    // Absent words are a first-class result, not an error: out-of-vocabulary
    // tokens get silently skipped downstream.
    const std::vector<double>* lookup(std::string_view word) const {
        const auto it = entries_.find(word);
        return it == entries_.end() ? nullptr : &it->second;
    }

    void insert(std::string word, std::vector<double> components) {
        if (dimension_ == 0 && entries_.empty()) {
            dimension_ = components.size();
        }
        if (components.size() != dimension_) {
            throw std::invalid_argument("vector dimension " +
                                        std::to_string(components.size()) +
                                        " does not match store dimension " +
                                        std::to_string(dimension_));
        }
        if (!entries_.emplace(std::move(word), std::move(components)).second) {
            throw std::invalid_argument("duplicate token in vector store");
        }
    }

    const std::map<std::string, std::vector<double>, std::less<>>& entries() const {
        return entries_;
    }

private:
    std::size_t dimension_ = 0;
    std::map<std::string, std::vector<double>, std::less<>> entries_;
};

namespace detail {

inline std::vector<double> parse_vector_row(const std::vector<std::string_view>& fields,
                                            std::size_t dim,
                                            const std::string& path,
                                            std::size_t line_no) {
    if (fields.size() != dim + 1) {
        throw ParseError(path, line_no,
                         "dimension mismatch: expected " + std::to_string(dim) +
                             " components, found " +
                             std::to_string(fields.size() - 1));
    }
    std::vector<double> components;
    components.reserve(dim);
    for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto value = parse_double(fields[i]);
        if (!value) {
            throw ParseError(path, line_no,
                             "malformed component '" + std::string(fields[i]) + "'");
        }
        if (!std::isfinite(*value)) {
            throw ParseError(path, line_no, "non-finite component '" +
                                                std::string(fields[i]) + "'");
        }
        components.push_back(*value);
    }
    return components;
}

}  // namespace detail

// Parses a word vector file. Vectors come back exactly as stored in the
// file; call normalize_store() before embedding.
inline VectorStore load_vectors(const std::filesystem::path& path,
                                std::optional<std::size_t> expect_dim = std::nullopt,
                                VectorFileFormat format = VectorFileFormat::Word2VecText) {
    std::ifstream in(path);
    const std::string path_str = path.string();
    if (!in) throw std::runtime_error("cannot open vector file: " + path_str);

    std::string line;
    std::size_t line_no = 0;
    std::size_t declared_count = 0;
    std::size_t dim = 0;
    VectorStore store;

    if (format == VectorFileFormat::Word2VecText) {
        if (!std::getline(in, line)) {
            throw ParseError(path_str, 1, "missing header line");
        }
        ++line_no;
        detail::chomp_cr(line);
        const auto fields = detail::split(line, ' ');
        const auto count = fields.size() == 2 ? detail::parse_int(fields[0]) : std::nullopt;
        const auto header_dim = fields.size() == 2 ? detail::parse_int(fields[1]) : std::nullopt;
        if (!count || !header_dim || *count <= 0 || *header_dim <= 0) {
            throw ParseError(path_str, 1, "malformed header (expected '<count> <dim>')");
        }
        declared_count = static_cast<std::size_t>(*count);
        dim = static_cast<std::size_t>(*header_dim);
        if (expect_dim && dim != *expect_dim) {
            throw ParseError(path_str, 1,
                             "dimension mismatch: file declares " + std::to_string(dim) +
                                 ", expected " + std::to_string(*expect_dim));
        }
    }

    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        const auto fields = detail::split(line, ' ');
        if (format == VectorFileFormat::GloveText && dim == 0) {
            if (fields.size() < 2) {
                throw ParseError(path_str, line_no, "malformed first row");
            }
            dim = fields.size() - 1;
            if (expect_dim && dim != *expect_dim) {
                throw ParseError(path_str, line_no,
                                 "dimension mismatch: first row has " + std::to_string(dim) +
                                     " components, expected " + std::to_string(*expect_dim));
            }
        }
        auto components = detail::parse_vector_row(fields, dim, path_str, line_no);
        if (store.contains(fields[0])) {
            throw ParseError(path_str, line_no,
                             "duplicate token '" + std::string(fields[0]) + "'");
        }
        store.insert(std::string(fields[0]), std::move(components));
    }

    if (format == VectorFileFormat::Word2VecText &&
        store.vocabulary_size() != declared_count) {
        throw ParseError(path_str, line_no + 1,
                         "row count mismatch: header declares " +
                             std::to_string(declared_count) + " vectors, found " +
                             std::to_string(store.vocabulary_size()));
    }
    if (format == VectorFileFormat::GloveText && store.empty()) {
        throw ParseError(path_str, 1, "empty vector file");
    }
    return store;
}

// Scales every vector to unit Euclidean norm. Zero-norm vectors are an
// error, not a skip: silently dropping vocabulary would corrupt
// corpus-stats alignment.
inline VectorStore normalize_store(VectorStore store) {
    VectorStore normalized(store.dimension());
    for (const auto& [word, components] : store.entries()) {
        double norm_sq = 0.0;
        for (double x : components) norm_sq += x * x;
        const double norm = std::sqrt(norm_sq);
        if (norm < 1e-12) {
            throw std::runtime_error("zero-norm vector for token '" + word + "'");
        }
        std::vector<double> unit(components.size());
        for (std::size_t i = 0; i < components.size(); ++i) unit[i] = components[i] / norm;
        normalized.insert(word, std::move(unit));
    }
    return normalized;
}

}  // namespace docembed
