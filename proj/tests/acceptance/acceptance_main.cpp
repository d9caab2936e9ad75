// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "docembed/docembed.hpp"
#include "../support/oracles.hpp"
#include "../support/tempfiles.hpp"

using namespace docembed;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw CheckFailure(message);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require_runtime(double elapsed, double limit) {
    require(elapsed < limit, "runtime " + std::to_string(elapsed) + "s exceeds " +
                                 std::to_string(limit) + "s");
}

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// --- criterion 1: rank AUC == brute-force pair counting, exactly ------------

std::string criterion_auc_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0xAC1);
    int tied_sets = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + detail::bounded(rng, 499);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        // Even trials draw from a coarse grid so ties are heavy.
        const bool coarse = trial % 2 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = coarse ? static_cast<double>(detail::bounded(rng, 6)) / 5.0
                               : detail::uniform01(rng);
            labels[i] = static_cast<int>(detail::bounded(rng, 2));
        }
        labels[0] = 1;
        if (n > 1) labels[1] = 0;
        bool has_tie = false;
        std::vector<double> sorted(scores);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            if (sorted[i] == sorted[i + 1]) has_tie = true;
        }
        if (has_tie) ++tied_sets;
        const double expected = oracles::brute_force_auc(scores, labels);
        const double actual = rank_auc(scores, labels);
        require(actual == expected,
                "rank AUC " + std::to_string(actual) + " != brute force " +
                    std::to_string(expected) + " at trial " + std::to_string(trial));
    }
    require(tied_sets >= 200, "tie coverage too small");
    const double elapsed = seconds_since(start);
    require_runtime(elapsed, 10.0);
    std::ostringstream note;
    note << "1000 sets, " << tied_sets << " with ties, " << elapsed << "s";
    return note.str();
}

// --- criterion 2: center form == dense full-vocabulary evaluation -----------

std::string criterion_center_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0xAC2);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t vocab = 20 + detail::bounded(rng, 181);  // <= 200
        const std::size_t dim = 2 + detail::bounded(rng, 15);      // <= 16
        const VectorStore store = oracles::random_store(rng, vocab, dim);
        const auto docs = oracles::random_docs(rng, vocab, 25, 1, 40);
        const CorpusStats corpus = build_corpus_stats(docs);
        WeightScheme scheme;
        scheme.kind = trial % 2 ? WeightKind::Sif : WeightKind::Subsample;
        const CorpusCenter center = build_corpus_center(store, corpus, scheme);
        const auto& tokens = docs[detail::bounded(rng, docs.size())];
        const DocTermStats doc = doc_term_stats(tokens, corpus, store, false, "d");
        if (doc.empty()) continue;
        DocEmbedding embedding;
        try {
            embedding = embed_center(doc, store, corpus, scheme, center);
        } catch (const EmbedError&) {
            continue;
        }
        const auto expected = oracles::dense_center_oracle(tokens, store, corpus, scheme);
        for (std::size_t i = 0; i < expected.size(); ++i) {
            require(std::abs(embedding.coefficients[i] - expected[i]) <= 1e-10,
                    "center/dense gap above 1e-10 at trial " + std::to_string(trial));
        }
        ++checked;
    }
    require(checked >= 90, "too few instances checked");
    const double elapsed = seconds_since(start);
    require_runtime(elapsed, 5.0);
    std::ostringstream note;
    note << checked << " instances within 1e-10, " << elapsed << "s";
    return note.str();
}

// --- criterion 3: power iteration == dense eigendecomposition ---------------

std::string criterion_pca_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0xAC3);
    int accepted = 0;
    int attempts = 0;
    while (accepted < 100 && attempts < 2000) {
        ++attempts;
        const std::size_t rows = 10 + detail::bounded(rng, 91);  // <= 100
        const std::size_t cols = 2 + detail::bounded(rng, 15);   // <= 16
        RowMatrix x;
        x.rows = rows;
        x.cols = cols;
        x.data.resize(rows * cols);
        for (auto& v : x.data) v = detail::gaussian(rng);
        const auto [top, second] = oracles::top_two_eigenvalues(x.data, rows, cols);
        if (second <= 0.0 || std::sqrt(top / second) < 1.05) continue;  // singular-value ratio
        const PrincipalComponent pc = first_principal_component(x);
        auto expected = oracles::dominant_eigenvector(x.data, rows, cols);
        if (dot(expected, pc.p) < 0.0) {
            for (auto& v : expected) v = -v;
        }
        for (std::size_t i = 0; i < cols; ++i) {
            require(std::abs(pc.p[i] - expected[i]) <= 1e-6,
                    "component differs from the eigensolver beyond 1e-6");
        }
        ++accepted;
    }
    require(accepted == 100, "could not assemble 100 separated-spectrum matrices");
    const double elapsed = seconds_since(start);
    require_runtime(elapsed, 10.0);
    std::ostringstream note;
    note << "100 matrices within 1e-6, " << elapsed << "s";
    return note.str();
}

// --- criterion 4: u* = c/|c| maximizes the weighted objective ---------------

std::string criterion_optimality() {
    std::mt19937_64 rng(0xAC4);
    int instances = 0;
    while (instances < 100) {
        const std::size_t vocab = 10 + detail::bounded(rng, 30);
        const std::size_t dim = 2 + detail::bounded(rng, 7);
        const VectorStore store = oracles::random_store(rng, vocab, dim);
        const auto docs = oracles::random_docs(rng, vocab, 12, 2, 25);
        const CorpusStats corpus = build_corpus_stats(docs);
        WeightScheme scheme;
        scheme.kind = WeightKind::Sif;
        const auto& tokens = docs[0];
        const DocTermStats doc = doc_term_stats(tokens, corpus, store, false, "d");
        if (doc.empty()) continue;
        DocEmbedding best;
        try {
            best = embed_delta(doc, store, corpus, scheme);
        } catch (const EmbedError&) {
            continue;
        }
        const double best_value =
            oracles::objective_value(tokens, store, corpus, scheme, best.unit);
        for (int probe = 0; probe < 1000; ++probe) {
            const auto u = detail::random_unit_vector(rng, dim);
            const double value = oracles::objective_value(tokens, store, corpus, scheme, u);
            if (value >= best_value - 1e-12 * std::max(1.0, std::abs(best_value))) {
                double gap = 0.0;
                for (std::size_t i = 0; i < u.size(); ++i) {
                    gap += (u[i] - best.unit[i]) * (u[i] - best.unit[i]);
                }
                require(std::sqrt(gap) <= 1e-9,
                        "random direction matched the optimum without aligning");
            }
        }
        ++instances;
    }
    return "100 instances x 1000 probes dominated";
}

// --- criterion 5: weight-function checkpoints -------------------------------

std::string criterion_weight_checkpoints() {
    require(sif_weight(1e-4, 1e-4) == 0.5, "SIF(a=1e-4, tf=1e-4) != 0.5");
    require(subsample_weight(1e-5, 1e-5) == 1.0, "Subsample(t=1e-5, tf=1e-5) != 1.0");
    const double below = std::nextafter(1e-5, 0.0);
    require(std::abs(subsample_weight(1e-5, below) - subsample_weight(1e-5, 1e-5)) <= 1e-12,
            "Subsample discontinuous at t");
    const auto grid = log_spaced_grid(1e-5, 1e-2, 100);
    double sup = 0.0;
    double argmax = 0.0;
    for (const double x : grid) {
        const double gap = std::abs(sif_weight(1e-4, x) - subsample_weight(1e-5, x));
        if (gap > sup) {
            sup = gap;
            argmax = x;
        }
    }
    std::ostringstream note;
    note << "sup-norm |SIF - Subsample| over [1e-5, 1e-2] = " << sup << " at tf=" << argmax;
    return note.str();
}

// --- criterion 6: invariant suite --------------------------------------------

std::string criterion_invariants() {
    std::mt19937_64 rng(0xAC6);
    const std::size_t vocab = 60, dim = 12;
    const VectorStore store = oracles::random_store(rng, vocab, dim);
    const auto raw_docs = oracles::random_docs(rng, vocab, 60, 4, 40);
    const CorpusStats corpus = build_corpus_stats(raw_docs);
    std::vector<DocTermStats> docs;
    for (std::size_t i = 0; i < raw_docs.size(); ++i) {
        docs.push_back(doc_term_stats(raw_docs[i], corpus, store, false,
                                      "d" + std::to_string(i)));
    }

    // Unit norm of all pre-PCA embeddings, all three forms.
    std::vector<DocEmbedding> units;
    for (const FormKind kind : {FormKind::Sum, FormKind::Center, FormKind::Delta}) {
        EmbeddingForm form;
        form.kind = kind;
        const BatchResult batch =
            embed_batch(docs, form, WeightScheme{WeightKind::Idf}, store, corpus);
        for (const auto& e : batch.embeddings) {
            require(std::abs(norm(e.unit) - 1.0) <= 1e-9, "pre-PCA embedding not unit norm");
        }
        if (kind == FormKind::Delta) units = batch.embeddings;
    }
    require(units.size() >= 10, "too few embeddings for the invariant suite");

    // Orthogonality, Pythagoras, idempotence of removal.
    const PrincipalComponent pc = first_principal_component(embedding_matrix(units));
    const auto removed = remove_common_component(units, pc);
    for (std::size_t i = 0; i < removed.size(); ++i) {
        require(std::abs(dot(removed[i].unit, pc.p)) <= 1e-6, "removal not orthogonal to p");
        const double before_sq = dot(units[i].unit, units[i].unit);
        const double after_sq = dot(removed[i].unit, removed[i].unit);
        const double proj = dot(units[i].unit, pc.p);
        require(std::abs(before_sq - (after_sq + proj * proj)) <= 1e-9,
                "Pythagoras identity violated");
    }
    const auto removed_twice = remove_common_component(removed, pc);
    for (std::size_t i = 0; i < removed.size(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            require(std::abs(removed_twice[i].unit[d] - removed[i].unit[d]) <= 1e-12,
                    "component removal not idempotent");
        }
    }

    // Idempotence of normalization.
    const VectorStore once = normalize_store(store);
    const VectorStore twice = normalize_store(once);
    for (const auto& [word, v1] : once.entries()) {
        const auto& v2 = *twice.lookup(word);
        for (std::size_t d = 0; d < dim; ++d) {
            require(std::abs(v1[d] - v2[d]) <= 1e-12, "store normalization not idempotent");
        }
    }

    // Weight-scale direction invariance.
    for (const FormKind kind : {FormKind::Sum, FormKind::Center, FormKind::Delta}) {
        EmbeddingForm form;
        form.kind = kind;
        WeightScheme base{WeightKind::Sif};
        WeightScheme scaled = base;
        scaled.scale = 13.7;
        const BatchResult a = embed_batch(docs, form, base, store, corpus);
        const BatchResult b = embed_batch(docs, form, scaled, store, corpus);
        require(a.embeddings.size() == b.embeddings.size(), "scale changed the skip set");
        for (std::size_t i = 0; i < a.embeddings.size(); ++i) {
            for (std::size_t d = 0; d < dim; ++d) {
                require(std::abs(a.embeddings[i].unit[d] - b.embeddings[i].unit[d]) <= 1e-9,
                        "weight scale changed the direction");
            }
        }
    }

    // Delta == center when the document covers the counted vocabulary.
    std::vector<std::string> everything;
    for (const auto& [token, term] : corpus.terms()) {
        for (std::int64_t c = 0; c < term.corpus_count % 3 + 1; ++c) {
            everything.push_back(token);
        }
    }
    const DocTermStats full_doc = doc_term_stats(everything, corpus, store, false, "full");
    const WeightScheme scheme{WeightKind::Sif};
    const CorpusCenter center = build_corpus_center(store, corpus, scheme);
    const DocEmbedding via_center = embed_center(full_doc, store, corpus, scheme, center);
    const DocEmbedding via_delta = embed_delta(full_doc, store, corpus, scheme);
    for (std::size_t d = 0; d < dim; ++d) {
        require(std::abs(via_center.coefficients[d] - via_delta.coefficients[d]) <= 1e-10,
                "delta and center disagree when V_d = V");
    }

    // Monotone-transform invariance of the AUC, exact.
    std::vector<double> scores(300);
    std::vector<int> labels(300);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = static_cast<double>(detail::bounded(rng, 50)) / 49.0;
        labels[i] = static_cast<int>(detail::bounded(rng, 2));
    }
    labels[0] = 1;
    labels[1] = 0;
    const double base_auc = rank_auc(scores, labels);
    std::vector<double> transformed(scores);
    for (auto& s : transformed) s = std::exp(2.0 * s) - 5.0;
    require(rank_auc(transformed, labels) == base_auc,
            "AUC changed under a monotone transform");

    return "unit-norm, orthogonality, Pythagoras, idempotence, scale, delta=center, AUC";
}

// --- criterion 7: planted-topic qualitative reproduction --------------------

struct PlantedCorpus {
    VectorStore store;
    GroupedCorpus grouped;
};

// Each document holds exactly 80 background tokens (uniform over the 300
// shared words) and 20 group-exclusive tokens (uniform over the group's 20).
PlantedCorpus make_planted(std::uint64_t seed, std::size_t groups, std::size_t background,
                           std::size_t exclusive_per_group, std::size_t docs_per_group,
                           std::size_t tokens_per_doc, std::size_t dim) {
    std::mt19937_64 rng(seed);
    PlantedCorpus planted;
    const std::size_t vocab = background + exclusive_per_group * groups;
    planted.store = oracles::random_store(rng, vocab, dim);
    const std::size_t background_tokens = tokens_per_doc * 8 / 10;
    for (std::size_t g = 0; g < groups; ++g) {
        auto& docs = planted.grouped.groups["g" + std::to_string(g)];
        for (std::size_t d = 0; d < docs_per_group; ++d) {
            std::string text;
            for (std::size_t w = 0; w < tokens_per_doc; ++w) {
                const std::size_t word =
                    w < background_tokens
                        ? detail::bounded(rng, background)
                        : background + exclusive_per_group * g +
                              detail::bounded(rng, exclusive_per_group);
                if (!text.empty()) text += ' ';
                text += oracles::token_name(word);
            }
            docs.push_back({"g" + std::to_string(g) + "-" + std::to_string(d), text});
        }
    }
    return planted;
}

std::string criterion_planted_topic() {
    const auto start = std::chrono::steady_clock::now();
    const PlantedCorpus planted = make_planted(42, 10, 300, 20, 50, 100, 32);
    CorpusStats corpus;
    for (const auto& [group, docs] : planted.grouped.groups) {
        for (const auto& doc : docs) corpus.add_document(tokenize(doc.text, {}));
    }
    BenchmarkSpec spec;
    spec.k = 1;
    spec.docs_per_group = 50;
    spec.seed = 42;
    const Benchmark benchmark = build_benchmark(planted.grouped, spec);
    require(benchmark.documents.size() == 500, "expected 500 planted documents");
    require(benchmark.pairs.size() == 500ull * 499ull / 2ull,
            "expected the full pair enumeration");

    const auto variations = parse_variations("all");
    const ResultTable table =
        run_variation_matrix(benchmark.documents, benchmark.pairs, planted.store, corpus,
                             variations, {}, "1", detail::default_thread_count());
    std::map<std::string, double> auc;
    for (std::size_t c = 0; c < table.variation_names.size(); ++c) {
        const auto& outcome = table.rows[0].outcomes[c];
        require(outcome.auc.has_value(),
                "variation " + table.variation_names[c] + " failed: " + outcome.error);
        auc[table.variation_names[c]] = *outcome.auc;
    }

    // (a) every weighted variant at or above 0.90
    double min_weighted = 1.0;
    std::string weakest;
    for (const std::string scheme : {"idf", "sif", "subsample"}) {
        for (const std::string form : {"sum", "center", "delta"}) {
            const double value = auc.at(scheme + "-" + form);
            if (value < min_weighted) {
                min_weighted = value;
                weakest = scheme + "-" + form;
            }
        }
    }
    const bool a_ok = min_weighted >= 0.90;

    // (b) idf-delta-pca beats the unit-sum baseline by 0.02
    const double idf_delta_pca = auc.at("idf-delta-pca");
    const double unit_sum = auc.at("unit-sum");
    const bool b_ok = idf_delta_pca >= unit_sum + 0.02;

    // (c) shuffled labels score at chance level
    std::vector<DocTermStats> docs;
    for (const auto& doc : benchmark.documents) {
        docs.push_back(doc_term_stats(tokenize(doc.text, {}), corpus, planted.store,
                                      false, doc.id));
    }
    EmbeddingForm delta_form;
    delta_form.kind = FormKind::Delta;
    const BatchResult batch = embed_batch(docs, delta_form, WeightScheme{WeightKind::Idf},
                                          planted.store, corpus,
                                          detail::default_thread_count());
    const ScoreReport report = score_pairs(embedding_map(batch.embeddings),
                                           benchmark.pairs,
                                           detail::default_thread_count());
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& row : report.scored) {
        scores.push_back(row.score);
        labels.push_back(row.label);
    }
    std::mt19937_64 shuffle_rng(7);
    for (std::size_t i = labels.size(); i > 1; --i) {
        std::swap(labels[i - 1], labels[detail::bounded(shuffle_rng, i)]);
    }
    const double shuffled = rank_auc(scores, labels);
    const bool c_ok = shuffled >= 0.45 && shuffled <= 0.55;

    const double elapsed = seconds_since(start);
    require_runtime(elapsed, 60.0);
    std::ostringstream detail_line;
    detail_line << "(a) " << (a_ok ? "ok" : "FAILED") << ": min weighted AUC "
                << detail::format_fixed(min_weighted, 4) << " (" << weakest
                << "), required >= 0.90; (b) " << (b_ok ? "ok" : "FAILED")
                << ": idf-delta-pca " << detail::format_fixed(idf_delta_pca, 4)
                << " vs unit-sum " << detail::format_fixed(unit_sum, 4) << "; (c) "
                << (c_ok ? "ok" : "FAILED") << ": shuffled "
                << detail::format_fixed(shuffled, 4) << "; " << elapsed << "s";
    require(a_ok && b_ok && c_ok, detail_line.str());
    return detail_line.str();
}

// --- criterion 8: cmd_bench determinism --------------------------------------

std::string criterion_bench_determinism() {
    const PlantedCorpus planted = make_planted(9, 4, 60, 8, 10, 40, 16);
    testsupport::TempDir tmp;
    std::string tsv;
    for (const auto& [group, docs] : planted.grouped.groups) {
        for (const auto& doc : docs) {
            tsv += group + "\t" + doc.id + "\t" + doc.text + "\n";
        }
    }
    std::ostringstream vec;
    vec << planted.store.vocabulary_size() << " " << planted.store.dimension() << "\n";
    for (const auto& [word, components] : planted.store.entries()) {
        vec << word;
        for (double v : components) vec << " " << detail::format_double(v);
        vec << "\n";
    }

    RunConfig config;
    config.vectors_path = tmp.file("vectors.txt", vec.str()).string();
    config.corpus_path = tmp.file("corpus.tsv", tsv).string();
    config.k = "1..2";
    config.docs_per_group = 5;
    config.seed = 3;
    config.variations = "idf";
    config.threads = 1;
    config.out_path = (tmp.path() / "serial").string();
    std::ostringstream quiet;
    cmd_bench(config, quiet);
    const std::string serial_csv = testsupport::slurp(config.out_path + ".csv");

    config.out_path = (tmp.path() / "serial2").string();
    cmd_bench(config, quiet);
    require(testsupport::slurp(config.out_path + ".csv") == serial_csv,
            "two serial runs differ");

    config.out_path = (tmp.path() / "parallel").string();
    config.threads = std::max(2u, detail::default_thread_count());
    cmd_bench(config, quiet);
    require(testsupport::slurp(config.out_path + ".csv") == serial_csv,
            "threaded run differs from serial");
    require(serial_csv.find("error") == std::string::npos, "benchmark cells errored");
    return "byte-identical CSV across reruns and thread counts";
}

// --- criterion 9: the 18-variation enumeration and naming --------------------

std::string criterion_variation_naming() {
    const auto variations = full_variation_matrix();
    require(variations.size() == 18, "variation matrix size != 18");
    std::set<std::string> names;
    for (const auto& v : variations) names.insert(variation_name(v));
    require(names.size() == 18, "variation names collide");
    for (const std::string expected :
         {"idf-sum", "idf-sum-pca", "idf-center", "idf-center-pca", "idf-delta",
          "idf-delta-pca"}) {
        require(names.count(expected) == 1, "missing variation " + expected);
    }
    require(variation_name(unit_sum_baseline()) == "unit-sum", "unit-sum misnamed");
    for (const std::string scheme : {"sif", "subsample"}) {
        for (const std::string form : {"sum", "center", "delta"}) {
            require(names.count(scheme + "-" + form) == 1, "missing " + scheme + "-" + form);
            require(names.count(scheme + "-" + form + "-pca") == 1,
                    "missing " + scheme + "-" + form + "-pca");
        }
    }
    return "18 combinations under the documented names";
}

}  // namespace

// Run everything, or a subset named on the command line (C1..C9).
int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
        {"C1 rank-AUC equals brute-force oracle", criterion_auc_oracle},
        {"C2 center form equals dense evaluation", criterion_center_oracle},
        {"C3 power iteration equals dense eigensolver", criterion_pca_oracle},
        {"C4 renormalized coefficients maximize the objective", criterion_optimality},
        {"C5 weight-function checkpoints", criterion_weight_checkpoints},
        {"C6 invariant suite", criterion_invariants},
        {"C7 planted-topic qualitative reproduction", criterion_planted_topic},
        {"C8 bench determinism", criterion_bench_determinism},
        {"C9 18-variation enumeration and naming", criterion_variation_naming},
    };
    std::set<std::string> selected;
    for (int i = 1; i < argc; ++i) selected.insert(argv[i]);
    int failures = 0;
    int ran = 0;
    for (const auto& [name, run] : criteria) {
        const std::string id = name.substr(0, name.find(' '));
        if (!selected.empty() && !selected.count(id)) continue;
        ++ran;
        try {
            const std::string note = run();
            std::cout << "[PASS] " << name << (note.empty() ? "" : " - " + note) << "\n";
        } catch (const std::exception& e) {
            std::cout << "[FAIL] " << name << " - " << e.what() << "\n";
            ++failures;
        }
    }
    if (ran == 0) {
        std::cerr << "no such criterion; expected C1..C9\n";
        return 2;
    }
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures;
}
