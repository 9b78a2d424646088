#pragma once
// JSON encodings of operators, fixtures and reports.
//
// Operator:  {"dim": d, "re": [[...], ...], "im": [[...], ...]}, row-major.
// Fixture:   {"family": [operator, ...], "effect": operator}
// Lemma:     {"name": "...", "x": operator, "a": operator}  (name optional)

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lueders/channel.hpp"
#include "lueders/ensembles.hpp"
#include "lueders/harness.hpp"
#include "lueders/linalg.hpp"
#include "lueders/signaling.hpp"
#include "lueders/theorem.hpp"
#include "lueders/tolerances.hpp"

namespace lueders::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

json to_json(const Operator& op);
/// Throws Error(Parse) naming the offending field.
Operator operator_from_json(const json& j);

struct Fixture {
    std::vector<Operator> family;
    Operator effect;
};
Fixture fixture_from_json(const json& j);

struct LemmaFixture {
    std::string name;
    Operator x;
    Operator a;
};
LemmaFixture lemma_fixture_from_json(const json& j);

/// Reads and parses a file; throws Error(Parse) on I/O or syntax errors.
json read_json_file(const std::filesystem::path& path);

json to_json(const Tolerances& tol);
json to_json(const DeviationReport& r);
/// include_operators adds the projectors of each peel level.
json to_json(const Prop1Report& r, bool include_operators = false);
json to_json(const Prop2Report& r, bool include_operators = false);
json to_json(const LemmaReport& r, bool include_operators = false);
json to_json(const SignalingRecord& r);
json to_json(const SweepRow& r);
json to_json(const ScanRecord& r);
json to_json(const ChannelSanity& s);
json to_json(const TrialInstance& t);

}  // namespace lueders::io
