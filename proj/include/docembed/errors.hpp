#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace docembed {

// Failure in an input file; carries the path and 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

// Why a single document could not be embedded. These are expected outcomes:
// batch embedding records them in a skip report instead of failing.
enum class SkipCause { EmptyDocument, ZeroNormEmbedding };

inline const char* to_string(SkipCause cause) {
    switch (cause) {
        case SkipCause::EmptyDocument: return "empty_document";
        case SkipCause::ZeroNormEmbedding: return "zero_norm_embedding";
    }
    return "unknown";
}

class EmbedError : public std::runtime_error {
public:
    EmbedError(SkipCause cause, std::string doc_id)
        : std::runtime_error(std::string(to_string(cause)) +
                             (doc_id.empty() ? "" : " (doc " + doc_id + ")")),
          cause_(cause),
          doc_id_(std::move(doc_id)) {}

    SkipCause cause() const noexcept { return cause_; }
    const std::string& doc_id() const noexcept { return doc_id_; }

private:
    SkipCause cause_;
    std::string doc_id_;
};

// Power iteration ran out of iterations with the residual still large.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(double residual, int iterations)
        : std::runtime_error("power iteration did not converge after " +
                             std::to_string(iterations) +
                             " iterations (residual " +
                             std::to_string(residual) + ")"),
          residual_(residual),
          iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

}  // namespace docembed
