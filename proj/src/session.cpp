#include "caussearch/session.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "caussearch/error.hpp"

namespace caussearch {

namespace {

double parse_double(std::string_view setting, std::string_view value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("setting '" + std::string(setting) + "' needs a number, got '" + std::string(value) + "'");
    return out;
}

template <typename Int>
Int parse_int(std::string_view setting, std::string_view value) {
    Int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("setting '" + std::string(setting) + "' needs an integer, got '" + std::string(value) + "'");
    return out;
}

std::string discrete_column_message(const std::string& component, const Dataset& d) {
    const auto j = d.first_discrete();
    return component + " requires continuous data, but column '" + d.variable(*j).name + "' is discrete";
}

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

Algorithm parse_algorithm(std::string_view s) {
    if (s == "pc") return Algorithm::Pc;
    if (s == "fges") return Algorithm::Fges;
    if (s == "grasp") return Algorithm::Grasp;
    if (s == "fci") return Algorithm::Fci;
    throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected pc, fges, grasp or fci)");
}

OutputFormat parse_format(std::string_view s) {
    if (s == "edges") return OutputFormat::EdgeList;
    if (s == "dot") return OutputFormat::Dot;
    if (s == "pcalg") return OutputFormat::Pcalg;
    if (s == "lavaan") return OutputFormat::Lavaan;
    throw ConfigError("unknown format '" + std::string(s) + "' (expected edges, dot, pcalg or lavaan)");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::Pc: return "PC";
    case Algorithm::Fges: return "FGES";
    case Algorithm::Grasp: return "GRaSP";
    case Algorithm::Fci: return "FCI";
    }
    return "?";
}

void Session::set_data(Dataset data) {
    data_ = std::make_shared<const Dataset>(std::move(data));
}

const Dataset& Session::data() const {
    if (!data_) throw ConfigError("no dataset configured");
    return *data_;
}

void Session::use_fisher_z(double alpha) {
    set_alpha(alpha);
    test_kind_ = TestKind::FisherZ;
}

void Session::use_score_test() { test_kind_ = TestKind::ScoreTest; }

void Session::use_sem_bic(double penalty_discount) {
    set_penalty_discount(penalty_discount);
    score_kind_ = ScoreKind::SemBic;
}

void Session::use_degenerate_gaussian(double penalty_discount) {
    set_penalty_discount(penalty_discount);
    score_kind_ = ScoreKind::DegenerateGaussian;
}

void Session::use_custom_score(CallbackScore::Function f, std::string label) {
    if (!f) throw ConfigError("custom score callback is empty");
    custom_ = std::move(f);
    custom_label_ = std::move(label);
    score_kind_ = ScoreKind::Custom;
}

void Session::set_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1), got " + std::to_string(alpha));
    alpha_ = alpha;
}

void Session::set_penalty_discount(double c) {
    if (!(c > 0.0)) throw ConfigError("penalty discount must be positive, got " + std::to_string(c));
    penalty_ = c;
}

void Session::set_bootstrapping(int reps) {
    if (reps < 0) throw ConfigError("number of resamples must be >= 0, got " + std::to_string(reps));
    reps_ = reps;
}

void Session::set_depth(int depth) {
    if (depth < -1) throw ConfigError("depth must be -1 (unlimited) or >= 0, got " + std::to_string(depth));
    depth_ = depth;
}

void Session::set_grasp_restarts(int restarts) {
    if (restarts < 1) throw ConfigError("GRaSP restarts must be >= 1, got " + std::to_string(restarts));
    grasp_restarts_ = restarts;
}

void Session::configure(std::string_view setting, std::string_view value) {
    if (setting == "alpha") {
        set_alpha(parse_double(setting, value));
    } else if (setting == "penalty_discount" || setting == "penaltyDiscount") {
        set_penalty_discount(parse_double(setting, value));
    } else if (setting == "numberResampling" || setting == "bootstrap_reps") {
        set_bootstrapping(parse_int<int>(setting, value));
    } else if (setting == "seed") {
        set_seed(parse_int<std::uint64_t>(setting, value));
    } else if (setting == "depth") {
        set_depth(parse_int<int>(setting, value));
    } else if (setting == "threads") {
        set_threads(parse_int<unsigned>(setting, value));
    } else if (setting == "grasp_restarts") {
        set_grasp_restarts(parse_int<int>(setting, value));
    } else if (setting == "test") {
        if (value == "fisher_z") use_fisher_z();
        else if (value == "score_test") use_score_test();
        else throw ConfigError("unknown test '" + std::string(value) + "' (expected fisher_z or score_test)");
    } else if (setting == "score") {
        if (value == "sem_bic") use_sem_bic();
        else if (value == "degenerate_gaussian") use_degenerate_gaussian();
        else throw ConfigError("unknown score '" + std::string(value) + "' (expected sem_bic or degenerate_gaussian)");
    } else {
        throw ConfigError("unknown setting '" + std::string(setting) + "'");
    }
}

std::shared_ptr<const Score> Session::make_score(const Dataset& d) const {
    switch (score_kind_) {
    case ScoreKind::SemBic: return std::make_shared<SemBicScore>(d, penalty_);
    case ScoreKind::DegenerateGaussian: return std::make_shared<DegenerateGaussianScore>(d, penalty_);
    case ScoreKind::Custom: return std::make_shared<CallbackScore>(d.names(), custom_, custom_label_);
    case ScoreKind::None: break;
    }
    throw ConfigError("no score configured (use_sem_bic, use_degenerate_gaussian or use_custom_score)");
}

std::unique_ptr<IndependenceTest> Session::make_test(const Dataset& d) const {
    switch (test_kind_) {
    case TestKind::FisherZ: return std::make_unique<FisherZTest>(d, alpha_);
    case TestKind::ScoreTest: return std::make_unique<ScoreBasedTest>(make_score(d));
    case TestKind::None: break;
    }
    throw ConfigError("no independence test configured (use_fisher_z or use_score_test)");
}

void Session::check_compatibility(Algorithm algorithm) const {
    const Dataset& d = data();
    const bool needs_test = algorithm == Algorithm::Pc || algorithm == Algorithm::Fci;
    const bool needs_score = !needs_test || test_kind_ == TestKind::ScoreTest;
    if (needs_test && test_kind_ == TestKind::None)
        throw ConfigError(algorithm_name(algorithm) + " needs an independence test (use_fisher_z or use_score_test)");
    if (needs_score && score_kind_ == ScoreKind::None)
        throw ConfigError(algorithm_name(algorithm) +
                          " needs a score (use_sem_bic, use_degenerate_gaussian or use_custom_score)");
    if (d.all_continuous()) return;
    if (needs_test && test_kind_ == TestKind::FisherZ)
        throw IncompatibilityError(discrete_column_message("Fisher Z", d));
    if (needs_score && score_kind_ == ScoreKind::SemBic)
        throw IncompatibilityError(discrete_column_message("SEM BIC", d));
}

MixedGraph Session::search_once(Algorithm algorithm, const Dataset& d) const {
    SearchConfig cfg;
    cfg.depth = depth_;
    cfg.seed = seed_;
    cfg.grasp_restarts = grasp_restarts_;
    switch (algorithm) {
    case Algorithm::Pc: return pc_search(*make_test(d), knowledge_, cfg);
    case Algorithm::Fci: return fci_search(*make_test(d), knowledge_, cfg);
    case Algorithm::Fges: return fges_search(*make_score(d), knowledge_, cfg);
    case Algorithm::Grasp: return grasp_search(*make_score(d), knowledge_, cfg);
    }
    throw ConfigError("unknown algorithm");
}

void Session::run(Algorithm algorithm) {
    check_compatibility(algorithm);
    const Dataset& d = data();
    compile_knowledge(knowledge_, d.names());
    if (reps_ == 0) {
        auto g = search_once(algorithm, d);
        result_ = std::move(g);
        labels_.clear();
        stats_.reset();
        return;
    }
    // A caller-supplied callback is never invoked concurrently.
    const unsigned threads = score_kind_ == ScoreKind::Custom ? 1u : threads_;
    auto graphs = bootstrap_search(
        d, [&](const Dataset& fold) { return search_once(algorithm, fold); }, reps_, seed_, threads);
    auto table = graphs_to_probs(graphs);
    auto consensus = consensus_graph(table);
    EdgeLabels labels;
    for (const auto& [pair, freq] : consensus.labels) labels[pair] = two_decimals(freq);
    result_ = std::move(consensus.graph);
    labels_ = std::move(labels);
    stats_ = std::move(table);
}

const MixedGraph& Session::result() const {
    if (!result_) throw ConfigError("no result yet; call run first");
    return *result_;
}

std::string Session::get_result(OutputFormat format) const {
    const MixedGraph& g = result();
    switch (format) {
    case OutputFormat::Dot: return to_dot(g, labels_);
    case OutputFormat::Pcalg: return write_pcalg(to_pcalg(g));
    case OutputFormat::Lavaan: return to_lavaan(g);
    case OutputFormat::EdgeList: break;
    }
    std::string out = to_edge_list_string(g);
    if (!stats_) return out;
    out += "\n# Edge frequencies (" + std::to_string(stats_->graph_count()) + " resamples):\n";
    int k = 0;
    for (const auto& e : g.edges()) {
        out += "# " + std::to_string(++k) + ". " + edge_text(g, e) + " " + labels_.at({e.a, e.b}) + "\n";
    }
    return out;
}

} // namespace caussearch
