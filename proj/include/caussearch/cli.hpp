#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caussearch/dataset.hpp"
#include "caussearch/knowledge.hpp"
#include "caussearch/session.hpp"

namespace caussearch {

/// Everything one search or bootstrap run needs. Unset optionals fall back
/// to the facade defaults.
struct RunSpec {
    std::optional<std::filesystem::path> data;
    LoadOptions load;
    Knowledge knowledge;
    std::optional<Algorithm> algorithm;
    std::optional<std::string> test;
    std::optional<std::string> score;
    std::optional<double> alpha;
    std::optional<double> penalty_discount;
    std::optional<int> reps;
    std::optional<std::uint64_t> seed;
    std::optional<int> depth;
    std::optional<unsigned> threads;
    std::optional<OutputFormat> format;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> graph_out;
};

/// Parses a JSON config document. Relative paths resolve against
/// `base_dir`. Unknown keys are ConfigErrors.
RunSpec parse_run_spec(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Fields set in `overrides` replace those in `base`; knowledge is kept
/// from `base`.
RunSpec merge(RunSpec base, const RunSpec& overrides);

/// A session configured from `spec` (data loaded, components chosen).
Session make_session(const RunSpec& spec);

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitData = 3,
    kExitIncompatible = 4,
};

/// Entry point shared by the executable and the tests; `args` excludes the
/// program name. Output files are only written when the exit code is 0.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace caussearch
