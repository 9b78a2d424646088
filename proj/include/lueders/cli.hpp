#pragma once
// Command-line driver. Subcommands: verify-prop1, verify-prop2, lemma, sweep,
// analyze, scan. Exit codes: 0 pass, 1 verification failure, 2 usage or
// validation error (no report is written in that case).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lueders/ensembles.hpp"
#include "lueders/tolerances.hpp"

namespace CLI {
class App;
}

namespace lueders::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags, config keys or values. Always maps to exit 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a run can be configured with. Flags and --config keys both land
/// here; which fields matter depends on the command.
struct RunConfig {
    std::string command;
    std::string dim = "2-8";
    std::string outcomes = "2,3,4";
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::string regime = "mixed";
    double lambda = 0.5;
    std::size_t clusters = 0;
    double min_commutator = 0.0;
    std::string lambda_grid = "0:1:0.05";
    std::string fixture;
    std::size_t threads = 0;  ///< 0 = available parallelism
    std::string out;
    std::string format = "json";
    bool no_timestamp = false;
    std::string config_path;
    Tolerances tol;

    /// Range checks on everything numeric; throws UsageError.
    void validate() const;
};

/// "3", "2-8", "2,3,4" or mixtures like "2-4,7". Sorted, no duplicates.
std::vector<std::size_t> parse_index_list(std::string_view text, std::string_view what);
/// "0,0.5,1" or "start:stop:step"; range points are start + k (stop - start) / n.
std::vector<double> parse_lambda_grid(std::string_view text);
/// A regime name, a comma list of names, or "mixed" (generic, commuting, projective).
std::vector<RegimeKind> parse_regimes(std::string_view text);

/// Fills options of `sub` that were not given on the command line from a JSON
/// object whose keys are flag names with '_' for '-'. Unknown keys are
/// rejected.
void apply_config_file(CLI::App& sub, const std::filesystem::path& path);

/// printf("%.17g")
std::string format_double(double v);
std::string utc_timestamp();

/// Entry point; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lueders::cli
