#include "caussearch/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "caussearch/error.hpp"
#include "caussearch/graph_io.hpp"
#include "caussearch/random.hpp"
#include "caussearch/simulation.hpp"

namespace caussearch {

namespace {

using nlohmann::json;

char parse_delimiter(const std::string& s) {
    if (s == "tab" || s == "\t" || s == "\\t") return '\t';
    if (s == "space" || s == "whitespace" || s == " ") return ' ';
    if (s == "comma") return ',';
    if (s.size() == 1) return s[0];
    throw ConfigError("unsupported delimiter '" + s + "'");
}

template <typename T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

std::vector<std::string> name_list(const json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("config field '" + key + "' must be a list of names");
    std::vector<std::string> out;
    for (const auto& x : j) out.push_back(get_as<std::string>(x, key));
    return out;
}

void parse_pairs(const json& j, const std::string& key, Knowledge& k, bool required) {
    if (!j.is_array()) throw ConfigError("knowledge field '" + key + "' must be a list of [from, to] pairs");
    for (const auto& pair : j) {
        auto names = name_list(pair, key);
        if (names.size() != 2) throw ConfigError("knowledge field '" + key + "' entries must have two names");
        if (required) k.add_required(names[0], names[1]);
        else k.add_forbidden(names[0], names[1]);
    }
}

Knowledge parse_knowledge(const json& j) {
    if (!j.is_object()) throw ConfigError("config field 'knowledge' must be an object");
    Knowledge k;
    // Tier keys as written in the document, in tier order.
    std::vector<std::string> keys;
    for (const auto& [key, value] : j.items()) {
        if (key != "tiers" && key != "forbidden_within" && key != "forbidden" && key != "required")
            throw ConfigError("unknown knowledge field '" + key + "'");
    }
    if (j.contains("tiers")) {
        const auto& tiers = j["tiers"];
        std::vector<std::pair<long long, std::vector<std::string>>> ordered;
        if (tiers.is_array()) {
            for (std::size_t i = 0; i < tiers.size(); ++i) ordered.emplace_back(static_cast<long long>(i), name_list(tiers[i], "tiers"));
        } else if (tiers.is_object()) {
            for (const auto& [key, names] : tiers.items()) {
                long long id = 0;
                try {
                    std::size_t used = 0;
                    id = std::stoll(key, &used);
                    if (used != key.size()) throw std::invalid_argument(key);
                } catch (const std::exception&) {
                    throw ConfigError("tier key '" + key + "' is not an integer");
                }
                ordered.emplace_back(id, name_list(names, "tiers"));
            }
            std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        } else {
            throw ConfigError("knowledge field 'tiers' must be a list of lists or an object of lists");
        }
        for (std::size_t t = 0; t < ordered.size(); ++t) {
            keys.push_back(std::to_string(ordered[t].first));
            if (ordered[t].second.empty()) continue;
            for (const auto& name : ordered[t].second) k.add_to_tier(t, name);
        }
    }
    if (j.contains("forbidden_within")) {
        const auto& fw = j["forbidden_within"];
        if (!fw.is_array()) throw ConfigError("knowledge field 'forbidden_within' must be a list of tier keys");
        for (const auto& id : fw) {
            const std::string key = id.is_string() ? id.get<std::string>() : id.is_number_integer() ? std::to_string(id.get<long long>()) : "";
            auto it = std::find(keys.begin(), keys.end(), key);
            if (it == keys.end()) throw ConfigError("forbidden_within names unknown tier '" + id.dump() + "'");
            k.set_tier_forbidden_within(static_cast<std::size_t>(it - keys.begin()), true);
        }
    }
    if (j.contains("forbidden")) parse_pairs(j["forbidden"], "forbidden", k, false);
    if (j.contains("required")) parse_pairs(j["required"], "required", k, true);
    return k;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

void parse_component(const json& j, const std::string& key, std::optional<std::string>& name,
                     std::optional<double>& param, const char* param_key) {
    if (j.is_string()) {
        name = j.get<std::string>();
        return;
    }
    if (!j.is_object()) throw ConfigError("config field '" + key + "' must be a name or an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "name") name = get_as<std::string>(v, key + ".name");
        else if (k == param_key) param = get_as<double>(v, key + "." + param_key);
        else throw ConfigError("unknown field '" + key + "." + k + "'");
    }
    if (!name) throw ConfigError("config field '" + key + "' needs a 'name'");
}

std::uint64_t parse_seed(const std::string& s, const std::string& source) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(source + " must be a non-negative integer, got '" + s + "'");
    return v;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct PendingOutput {
    std::optional<std::filesystem::path> path;
    std::string text;
};

/// Writes every pending output; files go through a temporary and are only
/// renamed into place once all temporaries were written.
void commit(const std::vector<PendingOutput>& outputs, std::ostream& out) {
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged;
    try {
        for (const auto& o : outputs) {
            if (!o.path) continue;
            auto tmp = o.path->string() + ".tmp";
            std::ofstream f(tmp, std::ios::binary);
            if (!f) throw DataError("cannot write '" + o.path->string() + "'");
            f << o.text;
            f.close();
            if (!f) throw DataError("cannot write '" + o.path->string() + "'");
            staged.emplace_back(tmp, *o.path);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& [tmp, _] : staged) std::filesystem::remove(tmp, ec);
        throw;
    }
    for (const auto& [tmp, dest] : staged) std::filesystem::rename(tmp, dest);
    for (const auto& o : outputs) {
        if (!o.path) out << o.text;
    }
}

void add_run_options(CLI::App& cmd, RunSpec& flags, std::string& data, std::string& algorithm, std::string& format,
                     std::string& out, std::string& graph_out, std::string& config, std::string& delimiter) {
    cmd.add_option("--data", data, "Tabular data file");
    cmd.add_option("--config", config, "JSON run configuration");
    cmd.add_option("--delimiter", delimiter, "Field separator: tab, comma, space or one character");
    cmd.add_option("--algorithm", algorithm, "pc, fges, grasp or fci");
    cmd.add_option("--test", flags.test, "fisher_z or score_test");
    cmd.add_option("--score", flags.score, "sem_bic or degenerate_gaussian");
    cmd.add_option("--alpha", flags.alpha, "Significance level");
    cmd.add_option("--penalty", flags.penalty_discount, "Penalty discount");
    cmd.add_option("--seed", flags.seed, "Random seed");
    cmd.add_option("--depth", flags.depth, "Largest conditioning set (-1 = unlimited)");
    cmd.add_option("--threads", flags.threads, "Bootstrap worker threads (0 = hardware)");
    cmd.add_option("--format", format, "edges, dot, pcalg or lavaan");
    cmd.add_option("--out", out, "Output path (default: standard output)");
    cmd.add_option("--graph-out", graph_out, "Consensus graph path for bootstrap");
}

} // namespace

RunSpec parse_run_spec(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunSpec s;
    for (const auto& [key, v] : j.items()) {
        if (key == "data") s.data = resolve(base_dir, get_as<std::string>(v, key));
        else if (key == "delimiter") s.load.delimiter = parse_delimiter(get_as<std::string>(v, key));
        else if (key == "discrete_threshold") s.load.discrete_threshold = get_as<std::size_t>(v, key);
        else if (key == "schema") {
            if (!v.is_object()) throw ConfigError("config field 'schema' must map column names to kinds");
            for (const auto& [col, kind] : v.items()) {
                const auto k = get_as<std::string>(kind, "schema");
                if (k == "discrete") s.load.schema[col] = VariableKind::Discrete;
                else if (k == "continuous") s.load.schema[col] = VariableKind::Continuous;
                else throw ConfigError("schema kind for '" + col + "' must be discrete or continuous");
            }
        } else if (key == "knowledge") s.knowledge = parse_knowledge(v);
        else if (key == "algorithm") s.algorithm = parse_algorithm(get_as<std::string>(v, key));
        else if (key == "test") parse_component(v, key, s.test, s.alpha, "alpha");
        else if (key == "score") parse_component(v, key, s.score, s.penalty_discount, "penalty_discount");
        else if (key == "alpha") s.alpha = get_as<double>(v, key);
        else if (key == "penalty_discount") s.penalty_discount = get_as<double>(v, key);
        else if (key == "reps" || key == "numberResampling") s.reps = get_as<int>(v, key);
        else if (key == "seed") s.seed = get_as<std::uint64_t>(v, key);
        else if (key == "depth") s.depth = get_as<int>(v, key);
        else if (key == "threads") s.threads = get_as<unsigned>(v, key);
        else if (key == "format") s.format = parse_format(get_as<std::string>(v, key));
        else if (key == "out") s.out = resolve(base_dir, get_as<std::string>(v, key));
        else if (key == "graph_out") s.graph_out = resolve(base_dir, get_as<std::string>(v, key));
        else throw ConfigError("unknown config field '" + key + "'");
    }
    return s;
}

RunSpec merge(RunSpec base, const RunSpec& o) {
    auto take = [](auto& dst, const auto& src) {
        if (src) dst = src;
    };
    take(base.data, o.data);
    take(base.algorithm, o.algorithm);
    take(base.test, o.test);
    take(base.score, o.score);
    take(base.alpha, o.alpha);
    take(base.penalty_discount, o.penalty_discount);
    take(base.reps, o.reps);
    take(base.seed, o.seed);
    take(base.depth, o.depth);
    take(base.threads, o.threads);
    take(base.format, o.format);
    take(base.out, o.out);
    take(base.graph_out, o.graph_out);
    return base;
}

Session make_session(const RunSpec& spec) {
    if (!spec.data) throw ConfigError("no data file given (--data or config 'data')");
    Session s(load_tabular(*spec.data, spec.load));
    s.set_knowledge(spec.knowledge);
    if (spec.alpha) s.set_alpha(*spec.alpha);
    if (spec.penalty_discount) s.set_penalty_discount(*spec.penalty_discount);
    s.configure("test", spec.test.value_or("fisher_z"));
    s.configure("score", spec.score.value_or("sem_bic"));
    if (spec.reps) s.set_bootstrapping(*spec.reps);
    if (spec.seed) s.set_seed(*spec.seed);
    if (spec.depth) s.set_depth(*spec.depth);
    if (spec.threads) s.set_threads(*spec.threads);
    return s;
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Causal structure search over tabular data", "caussearch"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");

    RunSpec flags;
    std::string data, algorithm, format, out_path, graph_out, config, delimiter;
    auto* search = app.add_subcommand("search", "Run one search and write the graph");
    add_run_options(*search, flags, data, algorithm, format, out_path, graph_out, config, delimiter);
    auto* bootstrap = app.add_subcommand("bootstrap", "Resample, search each fold, write the edge table and consensus graph");
    add_run_options(*bootstrap, flags, data, algorithm, format, out_path, graph_out, config, delimiter);
    bootstrap->add_option("--reps", flags.reps, "Number of resamples");

    int sim_p = 0;
    double sim_degree = 0.0;
    long long sim_n = 0;
    double coef_low = 0.3;
    double coef_high = 1.0;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate linear-Gaussian data from a random DAG");
    simulate_cmd->add_option("--p", sim_p, "Number of variables")->required();
    simulate_cmd->add_option("--degree", sim_degree, "Expected node degree")->required();
    simulate_cmd->add_option("--n", sim_n, "Number of rows")->required();
    simulate_cmd->add_option("--seed", flags.seed, "Random seed");
    simulate_cmd->add_option("--coef-low", coef_low, "Smallest coefficient magnitude");
    simulate_cmd->add_option("--coef-high", coef_high, "Largest coefficient magnitude");
    simulate_cmd->add_option("--out", out_path, "Data output path (default: standard output)");
    simulate_cmd->add_option("--graph-out", graph_out, "True model output path");

    std::string in_path = "-";
    std::string from_format = "edges";
    auto* convert = app.add_subcommand("convert", "Convert a graph between formats");
    convert->add_option("--in", in_path, "Input graph file, '-' for standard input");
    convert->add_option("--from", from_format, "edges or pcalg");
    convert->add_option("--to", format, "edges, dot, pcalg or lavaan")->required();
    convert->add_option("--out", out_path, "Output path (default: standard output)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (!data.empty()) flags.data = data;
        if (!algorithm.empty()) flags.algorithm = parse_algorithm(algorithm);
        if (!format.empty() && !convert->parsed()) flags.format = parse_format(format);
        if (!out_path.empty()) flags.out = out_path;
        if (!graph_out.empty()) flags.graph_out = graph_out;
        // Lowest priority seed source, below both flags and config.
        std::optional<std::uint64_t> env_seed;
        if (const char* env = std::getenv("CAUSSEARCH_SEED")) env_seed = parse_seed(env, "CAUSSEARCH_SEED");

        if (search->parsed() || bootstrap->parsed()) {
            RunSpec spec;
            if (!config.empty()) {
                const std::filesystem::path cfg(config);
                std::string text;
                try {
                    text = read_file(cfg);
                } catch (const DataError& e) {
                    throw ConfigError(std::string(e.what()));
                }
                spec = parse_run_spec(text, cfg.parent_path());
            }
            spec = merge(std::move(spec), flags);
            if (!spec.seed) spec.seed = env_seed;
            if (!delimiter.empty()) spec.load.delimiter = parse_delimiter(delimiter);
            if (!spec.algorithm) throw ConfigError("no algorithm given (--algorithm or config 'algorithm')");
            const bool boot = bootstrap->parsed();
            if (boot && !spec.reps) throw ConfigError("bootstrap needs --reps");
            if (boot && *spec.reps < 1)
                throw ConfigError("bootstrap needs at least one resample (got " + std::to_string(*spec.reps) + ")");
            Session session = make_session(spec);
            session.run(*spec.algorithm);
            const OutputFormat fmt = spec.format.value_or(boot ? OutputFormat::Dot : OutputFormat::EdgeList);
            std::vector<PendingOutput> outputs;
            if (boot) {
                outputs.push_back({spec.out, session.edge_stats()->to_string()});
                outputs.push_back({spec.graph_out, session.get_result(fmt)});
            } else {
                outputs.push_back({spec.out, session.get_result(fmt)});
            }
            commit(outputs, out);
            return kExitOk;
        }

        if (simulate_cmd->parsed()) {
            if (sim_p < 1) throw ConfigError("--p must be at least 1 (got " + std::to_string(sim_p) + ")");
            if (sim_n < 1) throw ConfigError("--n must be at least 1 (got " + std::to_string(sim_n) + ")");
            const std::uint64_t seed = flags.seed ? *flags.seed : env_seed.value_or(0);
            auto dag = random_dag(sim_p, sim_degree, derive_seed(seed, 0));
            auto model = random_sem(dag, derive_seed(seed, 1), {coef_low, coef_high});
            auto d = simulate(model, static_cast<std::size_t>(sim_n), derive_seed(seed, 2));
            std::ostringstream table;
            write_tabular(d, table);
            std::vector<PendingOutput> outputs{{flags.out, table.str()}};
            if (flags.graph_out) outputs.push_back({flags.graph_out, sem_model_to_string(model)});
            commit(outputs, out);
            return kExitOk;
        }

        // convert
        const OutputFormat to = parse_format(format);
        std::string text;
        if (in_path == "-") {
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        } else {
            text = read_file(in_path);
        }
        MixedGraph g;
        if (from_format == "edges") g = parse_edge_list(text);
        else if (from_format == "pcalg") g = from_pcalg(parse_pcalg(text));
        else throw ConfigError("--from must be edges or pcalg, got '" + from_format + "'");
        std::string converted;
        switch (to) {
        case OutputFormat::EdgeList: converted = to_edge_list_string(g); break;
        case OutputFormat::Dot: converted = to_dot(g); break;
        case OutputFormat::Pcalg: converted = write_pcalg(to_pcalg(g)); break;
        case OutputFormat::Lavaan: converted = to_lavaan(g); break;
        }
        commit({{flags.out, converted}}, out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const IncompatibilityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIncompatible;
    } catch (const NotADagError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIncompatible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}

} // namespace caussearch
