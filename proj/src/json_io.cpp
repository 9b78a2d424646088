#include "lueders/json_io.hpp"

#include <fstream>
#include <sstream>

#include "lueders/error.hpp"

namespace lueders::io {
namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::Parse, what); }

std::vector<std::vector<double>> read_grid(const json& j, const char* key, std::size_t d) {
    if (!j.contains(key)) {
        parse_fail(std::string("operator is missing \"") + key + "\"");
    }
    const json& g = j.at(key);
    if (!g.is_array() || g.size() != d) {
        parse_fail(std::string("\"") + key + "\" must be a " + std::to_string(d) + " x " + std::to_string(d) + " array");
    }
    std::vector<std::vector<double>> out(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d; ++i) {
        const json& row = g.at(i);
        if (!row.is_array() || row.size() != d) {
            parse_fail(std::string("\"") + key + "\" row " + std::to_string(i) + " must have " + std::to_string(d) +
                       " entries");
        }
        for (std::size_t k = 0; k < d; ++k) {
            if (!row.at(k).is_number()) {
                parse_fail(std::string("\"") + key + "\" entry (" + std::to_string(i) + ", " + std::to_string(k) +
                           ") is not a number");
            }
            out[i][k] = row.at(k).get<double>();
        }
    }
    return out;
}

json vector_json(const std::vector<double>& v) { return json(v); }

}  // namespace

json to_json(const Operator& op) {
    const std::size_t d = op.dim();
    json re = json::array();
    json im = json::array();
    for (std::size_t i = 0; i < d; ++i) {
        json rr = json::array();
        json ii = json::array();
        for (std::size_t k = 0; k < d; ++k) {
            rr.push_back(op(i, k).real());
            ii.push_back(op(i, k).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return json{{"dim", d}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Operator operator_from_json(const json& j) {
    if (!j.is_object()) {
        parse_fail("operator must be a JSON object");
    }
    if (!j.contains("dim") || !j.at("dim").is_number_integer() || j.at("dim").get<long long>() < 1) {
        parse_fail("operator needs an integer \"dim\" >= 1");
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "dim" && key != "re" && key != "im") {
            parse_fail("unknown operator key \"" + key + "\"");
        }
    }
    const auto d = j.at("dim").get<std::size_t>();
    const auto re = read_grid(j, "re", d);
    // "im" may be omitted for real operators
    const auto im = j.contains("im") ? read_grid(j, "im", d) : std::vector<std::vector<double>>(d, std::vector<double>(d));
    Operator op(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            op(i, k) = {re[i][k], im[i][k]};
        }
    }
    return op;
}

Fixture fixture_from_json(const json& j) {
    if (!j.is_object()) {
        parse_fail("fixture must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "family" && key != "effect" && key != "name") {
            parse_fail("unknown fixture key \"" + key + "\"");
        }
    }
    if (!j.contains("family") || !j.at("family").is_array() || j.at("family").empty()) {
        parse_fail("fixture needs a non-empty \"family\" array");
    }
    if (!j.contains("effect")) {
        parse_fail("fixture needs an \"effect\"");
    }
    Fixture f{{}, operator_from_json(j.at("effect"))};
    for (const json& op : j.at("family")) {
        f.family.push_back(operator_from_json(op));
    }
    return f;
}

LemmaFixture lemma_fixture_from_json(const json& j) {
    if (!j.is_object() || !j.contains("x") || !j.contains("a")) {
        parse_fail("lemma fixture needs \"x\" and \"a\" operators");
    }
    for (const auto& [key, value] : j.items()) {
        if (key != "x" && key != "a" && key != "name") {
            parse_fail("unknown lemma fixture key \"" + key + "\"");
        }
    }
    if (j.contains("name") && !j.at("name").is_string()) {
        parse_fail("lemma fixture \"name\" must be a string");
    }
    return LemmaFixture{j.value("name", std::string("user")), operator_from_json(j.at("x")), operator_from_json(j.at("a"))};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        parse_fail("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        parse_fail(path.string() + ": " + e.what());
    }
}

json to_json(const Tolerances& tol) {
    return json{{"hermitian_tol", tol.hermitian_tol}, {"psd_tol", tol.psd_tol},
                {"cluster_tol", tol.cluster_tol},     {"reconstruct_tol", tol.reconstruct_tol},
                {"zero_tol", tol.zero_tol},           {"comm_rel_tol", tol.comm_rel_tol},
                {"dev_rel_tol", tol.dev_rel_tol},     {"gray_factor", tol.gray_factor},
                {"radius_tol", tol.radius_tol},       {"n_max", tol.n_max},
                {"max_outcomes", tol.max_outcomes}};
}

json to_json(const DeviationReport& r) {
    return json{{"deviation_norm", r.deviation_norm},
                {"max_commutator_norm", r.max_commutator_norm},
                {"preserved", r.preserved},
                {"dim", r.dim},
                {"n_outcomes", r.n_outcomes}};
}

json to_json(const Prop1Report& r, bool include_operators) {
    json levels = json::array();
    for (const PeelLevel& l : r.levels) {
        json jl{{"level", l.level},         {"eigenvalue", l.eigenvalue},     {"multiplicity", l.multiplicity},
                {"residuals", l.residuals}, {"max_residual", l.max_residual}, {"commutes", l.commutes},
                {"zero_remainder", l.zero_remainder}};
        if (include_operators) {
            jl["projector"] = to_json(l.projector);
        }
        levels.push_back(std::move(jl));
    }
    json j{{"dim", r.dim},
           {"n_outcomes", r.n_outcomes},
           {"b_norm", r.b_norm},
           {"shift", r.shift},
           {"cluster_count", r.cluster_count},
           {"levels", std::move(levels)},
           {"reconstruction_residual", r.reconstruction_residual},
           {"deviation_norm", r.deviation_norm},
           {"max_commutator_norm", r.max_commutator_norm},
           {"all_commute", r.all_commute},
           {"levels_match_commutators", r.levels_match_commutators},
           {"first_failing_level", r.first_failing_level ? json(*r.first_failing_level) : json(nullptr)},
           {"verdict", verdict_name(r.verdict)},
           {"verdict_consistent", r.verdict_consistent}};
    return j;
}

json to_json(const Prop2Report& r, bool include_operators) {
    json j{{"dim", r.dim},
           {"b_norm", r.b_norm},
           {"deviation_norm", r.deviation_norm},
           {"commutator_norm", r.commutator_norm},
           {"anticommutator_gap_norm", r.anticommutator_gap_norm},
           {"double_comm_norm", r.double_comm_norm},
           {"proof_identity_residual", r.proof_identity_residual},
           {"c_norm", r.c_norm},
           {"c_hermitian_residual", r.c_hermitian_residual},
           {"radius_tail", r.radius_tail},
           {"radius_seq", vector_json(r.radius_seq)},
           {"quasi_nilpotent", r.quasi_nilpotent},
           {"chain_holds", r.chain_holds},
           {"verdict", verdict_name(r.verdict)},
           {"verdict_consistent", r.verdict_consistent}};
    if (include_operators) {
        j["c_op"] = to_json(r.c_op);
    }
    return j;
}

json to_json(const LemmaReport& r, bool include_operators) {
    json j{{"dim", r.dim},
           {"x_norm", r.x_norm},
           {"a_norm", r.a_norm},
           {"hypothesis_residual", r.hypothesis_residual},
           {"identity_residuals", vector_json(r.identity_residuals)},
           {"identity_bounds", vector_json(r.identity_bounds)},
           {"identity_holds", r.identity_holds},
           {"radius_seq", vector_json(r.radius_seq)},
           {"envelope", vector_json(r.envelope)},
           {"envelope_holds", r.envelope_holds},
           {"radius_tail", r.radius_tail},
           {"quasi_nilpotent", r.quasi_nilpotent},
           {"passed", r.passed}};
    if (include_operators) {
        j["da"] = to_json(r.da);
    }
    return j;
}

json to_json(const SignalingRecord& r) {
    return json{{"dim", r.dim},
                {"n_outcomes", r.n_outcomes},
                {"deviation_norm", r.deviation_norm},
                {"witness_value", r.witness_value},
                {"witness_value_channel", r.witness_value_channel},
                {"commutator_norm", r.commutator_norm},
                {"witness_state", to_json(r.witness_state.op())}};
}

json to_json(const SweepRow& r) {
    return json{{"lambda", r.lambda}, {"measured", r.measured}, {"predicted", r.predicted}, {"abs_error", r.abs_error}};
}

json to_json(const ScanRecord& r) {
    return json{{"trial", r.trial},
                {"seed", r.seed},
                {"dim", r.dim},
                {"n_outcomes", r.n_outcomes},
                {"regime", regime_name(r.regime)},
                {"commutator_norm", r.commutator_norm},
                {"deviation_norm", r.deviation_norm}};
}

json to_json(const ChannelSanity& s) {
    return json{{"trace_error", s.trace_error},
                {"min_eigenvalue", s.min_eigenvalue},
                {"duality_residual", s.duality_residual}};
}

json to_json(const TrialInstance& t) {
    return json{{"trial", t.trial},
                {"dim", t.dim},
                {"n_outcomes", t.n_outcomes},
                {"regime", regime_name(t.regime)},
                {"redraws", t.redraws}};
}

}  // namespace lueders::io
