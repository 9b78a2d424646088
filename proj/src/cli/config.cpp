#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>

#include "lueders/cli.hpp"
#include "lueders/json_io.hpp"

namespace lueders::cli {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

std::size_t to_index(std::string_view s, std::string_view what) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw UsageError(std::string(what) + ": \"" + std::string(s) + "\" is not a non-negative integer");
    }
    return v;
}

double to_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw UsageError(std::string(what) + ": \"" + std::string(s) + "\" is not a number");
    }
    return v;
}

std::string scalar_to_string(const io::json& v, const std::string& key) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_number_integer() || v.is_number_unsigned()) {
        return v.dump();
    }
    if (v.is_number_float()) {
        return format_double(v.get<double>());
    }
    throw UsageError("config key \"" + key + "\" has an unsupported value " + v.dump());
}

}  // namespace

std::vector<std::size_t> parse_index_list(std::string_view text, std::string_view what) {
    std::set<std::size_t> values;
    for (std::string_view part : split(text, ',')) {
        const std::size_t dash = part.find('-');
        if (dash == std::string_view::npos) {
            values.insert(to_index(part, what));
            continue;
        }
        const std::size_t lo = to_index(trim(part.substr(0, dash)), what);
        const std::size_t hi = to_index(trim(part.substr(dash + 1)), what);
        if (hi < lo) {
            throw UsageError(std::string(what) + ": empty range \"" + std::string(part) + "\"");
        }
        if (hi - lo > 4096) {
            throw UsageError(std::string(what) + ": range \"" + std::string(part) + "\" is too long");
        }
        for (std::size_t v = lo; v <= hi; ++v) {
            values.insert(v);
        }
    }
    return {values.begin(), values.end()};
}

std::vector<double> parse_lambda_grid(std::string_view text) {
    const std::string_view t = trim(text);
    if (t.find(':') != std::string_view::npos) {
        const auto parts = split(t, ':');
        if (parts.size() != 3) {
            throw UsageError("lambda grid range must be start:stop:step");
        }
        const double start = to_double(parts[0], "lambda grid");
        const double stop = to_double(parts[1], "lambda grid");
        const double step = to_double(parts[2], "lambda grid");
        if (!(step > 0.0) || stop < start) {
            throw UsageError("lambda grid range needs step > 0 and stop >= start");
        }
        const double count = std::round((stop - start) / step);
        if (count > 100000.0) {
            throw UsageError("lambda grid has too many points");
        }
        const auto n = static_cast<std::size_t>(count);
        std::vector<double> grid;
        for (std::size_t k = 0; k <= n; ++k) {
            // k (stop - start) / n keeps grid points like 0.6 exact
            grid.push_back(n == 0 ? start
                                  : start + static_cast<double>(k) * (stop - start) / static_cast<double>(n));
        }
        return grid;
    }
    std::vector<double> grid;
    for (std::string_view part : split(t, ',')) {
        grid.push_back(to_double(part, "lambda grid"));
    }
    return grid;
}

std::vector<RegimeKind> parse_regimes(std::string_view text) {
    std::vector<RegimeKind> out;
    for (std::string_view part : split(text, ',')) {
        if (part == "mixed") {
            for (RegimeKind k : {RegimeKind::Generic, RegimeKind::Commuting, RegimeKind::Projective}) {
                if (std::find(out.begin(), out.end(), k) == out.end()) {
                    out.push_back(k);
                }
            }
            continue;
        }
        const auto k = parse_regime(part);
        if (!k) {
            throw UsageError("unknown regime \"" + std::string(part) +
                             "\" (expected generic, commuting, projective, unsharp-qubit or mixed)");
        }
        if (std::find(out.begin(), out.end(), *k) == out.end()) {
            out.push_back(*k);
        }
    }
    return out;
}

void RunConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw UsageError(std::string(name) + " must be a positive number");
        }
    };
    if (trials < 1) {
        throw UsageError("trials must be >= 1");
    }
    if (trials > 10'000'000) {
        throw UsageError("trials must be <= 10000000");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw UsageError("lambda must lie in [0, 1]");
    }
    if (!(min_commutator >= 0.0) || !std::isfinite(min_commutator)) {
        throw UsageError("min-commutator must be >= 0");
    }
    positive(tol.hermitian_tol, "tol-hermitian");
    positive(tol.psd_tol, "tol-psd");
    positive(tol.cluster_tol, "tol-cluster");
    positive(tol.reconstruct_tol, "tol-reconstruct");
    positive(tol.zero_tol, "tol-zero");
    positive(tol.comm_rel_tol, "tol-comm");
    positive(tol.dev_rel_tol, "tol-dev");
    positive(tol.radius_tol, "tol-radius");
    if (!(tol.gray_factor >= 1.0) || !std::isfinite(tol.gray_factor)) {
        throw UsageError("tol-gray must be >= 1");
    }
    if (tol.n_max < 1 || tol.n_max > 4096) {
        throw UsageError("n-max must lie in [1, 4096]");
    }
    if (tol.max_outcomes < 1) {
        throw UsageError("max-outcomes must be >= 1");
    }
}

void apply_config_file(CLI::App& sub, const std::filesystem::path& path) {
    io::json j;
    try {
        j = io::read_json_file(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) {
        throw UsageError("config file must hold a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        std::string flag = key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        CLI::Option* opt = flag == "config" || flag == "help" ? nullptr : sub.get_option_no_throw("--" + flag);
        if (opt == nullptr) {
            throw UsageError("unknown config key \"" + key + "\" for " + sub.get_name());
        }
        if (opt->count() > 0) {
            continue;  // the command line wins
        }
        if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                if (!joined.empty()) {
                    joined += ',';
                }
                joined += scalar_to_string(v, key);
            }
            opt->add_result(joined);
        } else {
            opt->add_result(scalar_to_string(value, key));
        }
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError("config key \"" + key + "\": " + e.what());
        }
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace lueders::cli
