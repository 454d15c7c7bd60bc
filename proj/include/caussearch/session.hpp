#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "caussearch/bootstrap.hpp"
#include "caussearch/dataset.hpp"
#include "caussearch/graph.hpp"
#include "caussearch/graph_io.hpp"
#include "caussearch/knowledge.hpp"
#include "caussearch/search.hpp"
#include "caussearch/stats.hpp"

namespace caussearch {

enum class Algorithm { Pc, Fges, Grasp, Fci };
enum class OutputFormat { EdgeList, Dot, Pcalg, Lavaan };
enum class TestKind { None, FisherZ, ScoreTest };
enum class ScoreKind { None, SemBic, DegenerateGaussian, Custom };

Algorithm parse_algorithm(std::string_view s);   // pc | fges | grasp | fci
OutputFormat parse_format(std::string_view s);   // edges | dot | pcalg | lavaan
std::string algorithm_name(Algorithm a);

/// The single orchestration surface: data, knowledge, test, score, algorithm
/// and bootstrapping, then results in any output format. Setters only store;
/// all work happens in run(). Single-owner.
class Session {
public:
    Session() = default;
    explicit Session(Dataset data) { set_data(std::move(data)); }

    void set_data(Dataset data);
    bool has_data() const { return data_ != nullptr; }
    const Dataset& data() const;

    void use_fisher_z(double alpha);
    void use_fisher_z() { use_fisher_z(alpha_); }
    /// Independence decided by the configured score.
    void use_score_test();
    void use_sem_bic(double penalty_discount);
    void use_sem_bic() { use_sem_bic(penalty_); }
    void use_degenerate_gaussian(double penalty_discount);
    void use_degenerate_gaussian() { use_degenerate_gaussian(penalty_); }
    /// Callback receives a node index and its parent indices (ascending);
    /// it is assumed to accept any data kind. Exceptions propagate out of run().
    void use_custom_score(CallbackScore::Function f, std::string label = "Custom score");

    void set_alpha(double alpha);
    void set_penalty_discount(double c);
    /// Number of resamples; 0 turns bootstrapping off.
    void set_bootstrapping(int reps);
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void set_depth(int depth);
    void set_threads(unsigned threads) { threads_ = threads; }
    void set_grasp_restarts(int restarts);

    /// String form of the setters above plus "test" and "score" selection.
    /// Throws ConfigError for unknown settings or bad values.
    void configure(std::string_view setting, std::string_view value);

    Knowledge& knowledge() { return knowledge_; }
    const Knowledge& knowledge() const { return knowledge_; }
    void set_knowledge(Knowledge k) { knowledge_ = std::move(k); }

    TestKind test_kind() const { return test_kind_; }
    ScoreKind score_kind() const { return score_kind_; }
    double alpha() const { return alpha_; }
    double penalty_discount() const { return penalty_; }
    int bootstrap_reps() const { return reps_; }
    std::uint64_t seed() const { return seed_; }
    int depth() const { return depth_; }

    /// Throws ConfigError (missing data or component), IncompatibilityError
    /// (component vs data kind), or whatever the search raises. A failed
    /// run leaves the previous result untouched.
    void run(Algorithm algorithm);

    bool has_result() const { return result_.has_value(); }
    const MixedGraph& result() const;
    /// Present only after a bootstrapped run.
    const std::optional<EdgeStatTable>& edge_stats() const { return stats_; }

    /// Text in the requested format. Bootstrapped results carry frequency
    /// labels in DOT and '#' frequency lines in the edge list.
    std::string get_result(OutputFormat format) const;
    std::string get_string() const { return get_result(OutputFormat::EdgeList); }
    std::string get_dot() const { return get_result(OutputFormat::Dot); }
    PcalgMatrix get_pcalg() const { return to_pcalg(result()); }
    std::string get_lavaan() const { return get_result(OutputFormat::Lavaan); }

private:
    void check_compatibility(Algorithm algorithm) const;
    std::shared_ptr<const Score> make_score(const Dataset& d) const;
    std::unique_ptr<IndependenceTest> make_test(const Dataset& d) const;
    MixedGraph search_once(Algorithm algorithm, const Dataset& d) const;

    std::shared_ptr<const Dataset> data_;
    Knowledge knowledge_;
    TestKind test_kind_ = TestKind::None;
    ScoreKind score_kind_ = ScoreKind::None;
    CallbackScore::Function custom_;
    std::string custom_label_;
    double alpha_ = 0.01;
    double penalty_ = 1.0;
    int reps_ = 0;
    std::uint64_t seed_ = 0;
    int depth_ = -1;
    unsigned threads_ = 0;
    int grasp_restarts_ = 1;

    std::optional<MixedGraph> result_;
    EdgeLabels labels_;
    std::optional<EdgeStatTable> stats_;
};

} // namespace caussearch
