#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "lueders/channel.hpp"
#include "lueders/cli.hpp"
#include "lueders/error.hpp"
#include "lueders/harness.hpp"
#include "lueders/json_io.hpp"
#include "lueders/parallel.hpp"
#include "lueders/signaling.hpp"
#include "lueders/theorem.hpp"

namespace lueders::cli {
namespace {

using io::json;

constexpr double kSweepTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Output plumbing

json regime_list(const std::vector<RegimeKind>& rs) {
    json a = json::array();
    for (RegimeKind k : rs) {
        a.push_back(regime_name(k));
    }
    return a;
}

json envelope(const RunConfig& rc, json config, json summary, json reports) {
    json j;
    j["schema_version"] = io::kSchemaVersion;
    j["command"] = rc.command;
    if (!rc.no_timestamp) {
        j["timestamp"] = utc_timestamp();
    }
    config["format"] = rc.format;
    j["config"] = std::move(config);
    j["tolerances"] = io::to_json(rc.tol);
    j["summary"] = std::move(summary);
    j["reports"] = std::move(reports);
    return j;
}

class Csv {
public:
    explicit Csv(std::initializer_list<const char*> header) {
        bool first = true;
        for (const char* h : header) {
            os_ << (first ? "" : ",") << h;
            first = false;
        }
        os_ << '\n';
    }
    Csv& cell(double v) { return raw(format_double(v)); }
    Csv& cell(std::size_t v) { return raw(std::to_string(v)); }
    Csv& cell(std::uint64_t v, int) { return raw(std::to_string(v)); }
    Csv& cell(bool v) { return raw(v ? "true" : "false"); }
    Csv& cell(std::string_view v) { return raw(std::string(v)); }
    void end_row() {
        os_ << '\n';
        first_ = true;
    }
    std::string str() const { return os_.str(); }

private:
    Csv& raw(const std::string& s) {
        os_ << (first_ ? "" : ",") << s;
        first_ = false;
        return *this;
    }
    std::ostringstream os_;
    bool first_ = true;
};

int emit(const RunConfig& rc, const std::string& text, std::ostream& out, std::ostream& err, int code) {
    if (rc.out.empty()) {
        out << text;
        out.flush();
        return code;
    }
    std::ofstream f(rc.out, std::ios::binary | std::ios::trunc);
    if (!f) {
        err << "error: cannot write " << rc.out << '\n';
        return kExitUsage;
    }
    f << text;
    return code;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string optional_level(const std::optional<std::size_t>& l) { return l ? std::to_string(*l) : ""; }

// ---------------------------------------------------------------------------
// Batch configuration shared by the verify commands

BatchConfig batch_from(const RunConfig& rc, bool binary) {
    BatchConfig bc;
    bc.seed = rc.seed;
    bc.trials = rc.trials;
    bc.dims = parse_index_list(rc.dim, "dim");
    bc.outcomes = binary ? std::vector<std::size_t>{2} : parse_index_list(rc.outcomes, "outcomes");
    bc.regimes = parse_regimes(rc.regime);
    bc.lambda = rc.lambda;
    bc.min_commutator = rc.min_commutator;
    bc.n_clusters = rc.clusters;
    bc.threads = rc.threads;
    try {
        bc.validate(rc.tol);
    } catch (const Error& e) {
        throw UsageError(e.detail());
    }
    return bc;
}

json batch_echo(const BatchConfig& bc, bool binary) {
    json c;
    c["seed"] = bc.seed;
    c["trials"] = bc.trials;
    c["dim"] = bc.dims;
    if (!binary) {
        c["outcomes"] = bc.outcomes;
    }
    c["regime"] = regime_list(bc.regimes);
    c["lambda"] = bc.lambda;
    c["clusters"] = bc.n_clusters;
    c["min_commutator"] = bc.min_commutator;
    return c;
}

struct SanityTotals {
    double max_trace_error = 0.0;
    double min_output_eigenvalue = 1.0;
    double max_duality_residual = 0.0;

    void add(const ChannelSanity& s) {
        max_trace_error = std::max(max_trace_error, s.trace_error);
        min_output_eigenvalue = std::min(min_output_eigenvalue, s.min_eigenvalue);
        max_duality_residual = std::max(max_duality_residual, s.duality_residual);
    }
    json to_json() const {
        return json{{"max_trace_error", max_trace_error},
                    {"min_output_eigenvalue", min_output_eigenvalue},
                    {"max_duality_residual", max_duality_residual}};
    }
};

EffectFamily family_from_fixture(const io::Fixture& fx, const Tolerances& tol) {
    return EffectFamily::make(fx.family, tol);
}

// ---------------------------------------------------------------------------
// verify-prop1

int verify_prop1_fixture(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const io::Fixture fx = io::fixture_from_json(io::read_json_file(rc.fixture));
    const EffectFamily f = family_from_fixture(fx, rc.tol);
    require_same_dim(f[0].op(), fx.effect, "fixture effect");
    require_hermitian_observable(fx.effect, rc.tol);
    const Prop1Report rep = check_prop1(f, fx.effect, rc.tol);
    const int code = rep.verdict_consistent ? kExitPass : kExitFail;
    if (code != kExitPass) {
        err << "fixture " << rc.fixture << ": verdict " << verdict_name(rep.verdict) << '\n';
    }
    if (rc.format == "csv") {
        Csv csv({"fixture", "dim", "n_outcomes", "deviation_norm", "max_commutator_norm", "all_commute",
                 "first_failing_level", "levels", "verdict"});
        csv.cell(std::string_view(rc.fixture)).cell(rep.dim).cell(rep.n_outcomes).cell(rep.deviation_norm);
        csv.cell(rep.max_commutator_norm).cell(rep.all_commute).cell(optional_level(rep.first_failing_level));
        csv.cell(rep.levels.size()).cell(verdict_name(rep.verdict)).end_row();
        return emit(rc, csv.str(), out, err, code);
    }
    json config{{"fixture", rc.fixture}};
    json summary{{"trials", 1}, {"consistent", rep.verdict_consistent ? 1 : 0}, {"passed", code == kExitPass}};
    json reports = json::array({json{{"fixture", rc.fixture}, {"report", io::to_json(rep, true)}}});
    return emit(rc, dump(envelope(rc, std::move(config), std::move(summary), std::move(reports))), out, err, code);
}

int verify_prop1(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    if (!rc.fixture.empty()) {
        return verify_prop1_fixture(rc, out, err);
    }
    const BatchConfig bc = batch_from(rc, false);
    const std::vector<Prop1Trial> trials = run_prop1_batch(bc, rc.tol);

    std::size_t consistent = 0, inconclusive = 0, inconsistent = 0, commuting = 0;
    SanityTotals sanity;
    json failing = json::array();
    for (const Prop1Trial& t : trials) {
        sanity.add(t.sanity);
        commuting += t.report.all_commute ? 1 : 0;
        switch (t.report.verdict) {
            case Verdict::Consistent: ++consistent; break;
            case Verdict::Inconclusive: ++inconclusive; break;
            case Verdict::Inconsistent: ++inconsistent; break;
        }
        if (!t.report.verdict_consistent) {
            failing.push_back(t.instance.trial);
            err << "trial " << t.instance.trial << " (seed " << bc.seed << ", stream " << t.instance.trial
                << "): verdict " << verdict_name(t.report.verdict) << ", dim " << t.instance.dim << ", outcomes "
                << t.instance.n_outcomes << ", regime " << regime_name(t.instance.regime) << ", deviation "
                << format_double(t.report.deviation_norm) << ", max commutator "
                << format_double(t.report.max_commutator_norm) << '\n';
        }
    }
    const int code = consistent == trials.size() ? kExitPass : kExitFail;

    if (rc.format == "csv") {
        Csv csv({"trial", "seed", "dim", "n_outcomes", "regime", "deviation_norm", "max_commutator_norm",
                 "all_commute", "first_failing_level", "levels", "reconstruction_residual", "verdict"});
        for (const Prop1Trial& t : trials) {
            csv.cell(t.instance.trial).cell(bc.seed, 0).cell(t.instance.dim).cell(t.instance.n_outcomes);
            csv.cell(regime_name(t.instance.regime)).cell(t.report.deviation_norm).cell(t.report.max_commutator_norm);
            csv.cell(t.report.all_commute).cell(optional_level(t.report.first_failing_level));
            csv.cell(t.report.levels.size()).cell(t.report.reconstruction_residual);
            csv.cell(verdict_name(t.report.verdict)).end_row();
        }
        return emit(rc, csv.str(), out, err, code);
    }

    json summary{{"trials", trials.size()},        {"consistent", consistent},   {"inconclusive", inconclusive},
                 {"inconsistent", inconsistent},   {"all_commute", commuting},   {"failing_trials", failing},
                 {"channel_sanity", sanity.to_json()}, {"passed", code == kExitPass}};
    json reports = json::array();
    for (const Prop1Trial& t : trials) {
        reports.push_back(json{{"instance", io::to_json(t.instance)},
                               {"report", io::to_json(t.report)},
                               {"channel_sanity", io::to_json(t.sanity)}});
    }
    return emit(rc, dump(envelope(rc, batch_echo(bc, false), std::move(summary), std::move(reports))), out, err,
                code);
}

// ---------------------------------------------------------------------------
// verify-prop2

bool prop2_passed(const Prop2Report& r) { return r.verdict_consistent && r.chain_holds; }

int verify_prop2_fixture(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const io::Fixture fx = io::fixture_from_json(io::read_json_file(rc.fixture));
    const Effect e = Effect::make(fx.family.front(), rc.tol);
    const Prop2Report rep = check_prop2(e, fx.effect, rc.tol);
    const int code = prop2_passed(rep) ? kExitPass : kExitFail;
    if (code != kExitPass) {
        err << "fixture " << rc.fixture << ": verdict " << verdict_name(rep.verdict)
            << (rep.chain_holds ? "" : ", chain broken") << '\n';
    }
    if (rc.format == "csv") {
        Csv csv({"fixture", "dim", "deviation_norm", "commutator_norm", "double_comm_norm", "proof_identity_residual",
                 "c_norm", "radius_tail", "quasi_nilpotent", "chain_holds", "verdict"});
        csv.cell(std::string_view(rc.fixture)).cell(rep.dim).cell(rep.deviation_norm).cell(rep.commutator_norm);
        csv.cell(rep.double_comm_norm).cell(rep.proof_identity_residual).cell(rep.c_norm).cell(rep.radius_tail);
        csv.cell(rep.quasi_nilpotent).cell(rep.chain_holds).cell(verdict_name(rep.verdict)).end_row();
        return emit(rc, csv.str(), out, err, code);
    }
    json config{{"fixture", rc.fixture}};
    json summary{{"trials", 1}, {"consistent", rep.verdict_consistent ? 1 : 0}, {"passed", code == kExitPass}};
    json reports = json::array({json{{"fixture", rc.fixture}, {"report", io::to_json(rep, true)}}});
    return emit(rc, dump(envelope(rc, std::move(config), std::move(summary), std::move(reports))), out, err, code);
}

int verify_prop2(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    if (!rc.fixture.empty()) {
        return verify_prop2_fixture(rc, out, err);
    }
    const BatchConfig bc = batch_from(rc, true);
    const std::vector<Prop2Trial> trials = run_prop2_batch(bc, rc.tol);

    std::size_t passed = 0, inconclusive = 0, inconsistent = 0, chain_broken = 0;
    double max_identity = 0.0;
    SanityTotals sanity;
    json failing = json::array();
    for (const Prop2Trial& t : trials) {
        sanity.add(t.sanity);
        max_identity = std::max(max_identity, t.report.proof_identity_residual);
        inconclusive += t.report.verdict == Verdict::Inconclusive ? 1 : 0;
        inconsistent += t.report.verdict == Verdict::Inconsistent ? 1 : 0;
        chain_broken += t.report.chain_holds ? 0 : 1;
        if (prop2_passed(t.report)) {
            ++passed;
            continue;
        }
        failing.push_back(t.instance.trial);
        err << "trial " << t.instance.trial << " (seed " << bc.seed << ", stream " << t.instance.trial
            << "): verdict " << verdict_name(t.report.verdict) << (t.report.chain_holds ? "" : ", chain broken")
            << ", dim " << t.instance.dim << ", regime " << regime_name(t.instance.regime) << ", deviation "
            << format_double(t.report.deviation_norm) << ", commutator " << format_double(t.report.commutator_norm)
            << '\n';
    }
    const int code = passed == trials.size() ? kExitPass : kExitFail;

    if (rc.format == "csv") {
        Csv csv({"trial", "seed", "dim", "regime", "deviation_norm", "commutator_norm", "double_comm_norm",
                 "proof_identity_residual", "c_norm", "radius_tail", "quasi_nilpotent", "chain_holds", "verdict"});
        for (const Prop2Trial& t : trials) {
            const Prop2Report& r = t.report;
            csv.cell(t.instance.trial).cell(bc.seed, 0).cell(t.instance.dim).cell(regime_name(t.instance.regime));
            csv.cell(r.deviation_norm).cell(r.commutator_norm).cell(r.double_comm_norm);
            csv.cell(r.proof_identity_residual).cell(r.c_norm).cell(r.radius_tail).cell(r.quasi_nilpotent);
            csv.cell(r.chain_holds).cell(verdict_name(r.verdict)).end_row();
        }
        return emit(rc, csv.str(), out, err, code);
    }

    json summary{{"trials", trials.size()},
                 {"passed_trials", passed},
                 {"inconclusive", inconclusive},
                 {"inconsistent", inconsistent},
                 {"chain_broken", chain_broken},
                 {"max_proof_identity_residual", max_identity},
                 {"failing_trials", failing},
                 {"channel_sanity", sanity.to_json()},
                 {"passed", code == kExitPass}};
    json reports = json::array();
    for (const Prop2Trial& t : trials) {
        reports.push_back(json{{"instance", io::to_json(t.instance)},
                               {"report", io::to_json(t.report)},
                               {"channel_sanity", io::to_json(t.sanity)}});
    }
    return emit(rc, dump(envelope(rc, batch_echo(bc, true), std::move(summary), std::move(reports))), out, err,
                code);
}

// ---------------------------------------------------------------------------
// lemma

struct NamedPair {
    std::string name;
    Operator x;
    Operator a;
};

std::vector<NamedPair> builtin_lemma_pairs(const RunConfig& rc) {
    std::vector<NamedPair> pairs;
    pairs.push_back({"nilpotent-2x2", Operator{{0.0, 1.0}, {0.0, 0.0}}, Operator::diagonal({1.0, 0.0})});
    pairs.push_back({"commuting-diagonal", Operator::diagonal({1.0, 2.0, 3.0}), Operator::diagonal({-1.0, 0.5, 4.0})});
    pairs.push_back({"shift-3x3", Operator{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}},
                     Operator::diagonal({2.0, 1.0, 0.0})});
    const std::vector<std::size_t> dims = parse_index_list(rc.dim, "dim");
    if (dims.empty() || dims.front() < 1) {
        throw UsageError("dim must be >= 1");
    }
    for (std::size_t t = 0; t < rc.trials; ++t) {
        Rng rng(rc.seed, t);
        const std::size_t d = dims[rng.index(dims.size())];
        LemmaPair p = exact_lemma_pair(d, rng);
        pairs.push_back({"exact-" + std::to_string(t), std::move(p.x), std::move(p.a)});
    }
    return pairs;
}

int lemma(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    if (rc.tol.n_max < 2) {
        throw UsageError("lemma needs n-max >= 2");
    }
    std::vector<NamedPair> pairs = builtin_lemma_pairs(rc);
    std::vector<LemmaReport> reports(pairs.size());
    parallel_for(pairs.size(), rc.threads, [&](std::size_t i) { reports[i] = check_lemma(pairs[i].x, pairs[i].a, rc.tol); });
    if (!rc.fixture.empty()) {
        const io::LemmaFixture fx = io::lemma_fixture_from_json(io::read_json_file(rc.fixture));
        reports.push_back(check_lemma(fx.x, fx.a, rc.tol));  // HypothesisViolated surfaces as exit 2
        pairs.push_back({fx.name, fx.x, fx.a});
    }

    json failing = json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!reports[i].passed) {
            failing.push_back(pairs[i].name);
            err << "lemma fixture " << pairs[i].name << " failed: identity "
                << (reports[i].identity_holds ? "ok" : "broken") << ", envelope "
                << (reports[i].envelope_holds ? "ok" : "broken") << ", radius tail "
                << format_double(reports[i].radius_tail) << '\n';
        }
    }
    const int code = failing.empty() ? kExitPass : kExitFail;

    if (rc.format == "csv") {
        Csv csv({"name", "dim", "x_norm", "a_norm", "hypothesis_residual", "max_identity_residual", "radius_tail",
                 "identity_holds", "envelope_holds", "quasi_nilpotent", "passed"});
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const LemmaReport& r = reports[i];
            const double max_id = *std::max_element(r.identity_residuals.begin(), r.identity_residuals.end());
            csv.cell(std::string_view(pairs[i].name)).cell(r.dim).cell(r.x_norm).cell(r.a_norm);
            csv.cell(r.hypothesis_residual).cell(max_id).cell(r.radius_tail).cell(r.identity_holds);
            csv.cell(r.envelope_holds).cell(r.quasi_nilpotent).cell(r.passed).end_row();
        }
        return emit(rc, csv.str(), out, err, code);
    }
    json config{{"seed", rc.seed}, {"trials", rc.trials}, {"dim", parse_index_list(rc.dim, "dim")}};
    if (!rc.fixture.empty()) {
        config["fixture"] = rc.fixture;
    }
    json summary{{"fixtures", pairs.size()}, {"failing", failing}, {"passed", code == kExitPass}};
    json items = json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        items.push_back(json{{"name", pairs[i].name}, {"report", io::to_json(reports[i], pairs[i].x.dim() <= 3)}});
    }
    return emit(rc, dump(envelope(rc, std::move(config), std::move(summary), std::move(items))), out, err, code);
}

// ---------------------------------------------------------------------------
// sweep

int sweep(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const std::vector<double> grid = parse_lambda_grid(rc.lambda_grid);
    const std::vector<SweepRow> rows = sweep_unsharpness(grid, rc.tol);
    double max_err = 0.0;
    bool monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        max_err = std::max(max_err, rows[i].abs_error);
        if (i > 0 && rows[i].lambda >= rows[i - 1].lambda && rows[i].measured < rows[i - 1].measured) {
            monotone = false;
        }
    }
    const int code = max_err <= kSweepTolerance ? kExitPass : kExitFail;
    if (code != kExitPass) {
        err << "sweep: max abs_error " << format_double(max_err) << " exceeds " << format_double(kSweepTolerance)
            << '\n';
    }
    if (rc.format == "csv") {
        Csv csv({"lambda", "measured", "predicted", "abs_error"});
        for (const SweepRow& r : rows) {
            csv.cell(r.lambda).cell(r.measured).cell(r.predicted).cell(r.abs_error).end_row();
        }
        return emit(rc, csv.str(), out, err, code);
    }
    json items = json::array();
    for (const SweepRow& r : rows) {
        items.push_back(io::to_json(r));
    }
    json config{{"lambda_grid", grid}};
    json summary{{"points", rows.size()},
                 {"max_abs_error", max_err},
                 {"tolerance", kSweepTolerance},
                 {"monotone", monotone},
                 {"passed", code == kExitPass}};
    return emit(rc, dump(envelope(rc, std::move(config), std::move(summary), std::move(items))), out, err, code);
}

// ---------------------------------------------------------------------------
// analyze

int analyze(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const io::Fixture fx = io::fixture_from_json(io::read_json_file(rc.fixture));
    const EffectFamily f = family_from_fixture(fx, rc.tol);
    require_same_dim(f[0].op(), fx.effect, "fixture effect");
    require_hermitian_observable(fx.effect, rc.tol);

    const DeviationReport dev = deviation(f, fx.effect, rc.tol);
    const Prop1Report p1 = check_prop1(f, fx.effect, rc.tol);
    std::optional<Prop2Report> p2;
    if (f.size() == 2) {
        p2 = check_prop2(f[0], fx.effect, rc.tol);
    }
    const SignalingRecord sig = max_signaling_state(f, fx.effect, rc.tol);
    const bool ok = p1.verdict_consistent && (!p2 || prop2_passed(*p2));
    const int code = ok ? kExitPass : kExitFail;
    if (!ok) {
        err << "analyze " << rc.fixture << ": verdict " << verdict_name(p1.verdict) << '\n';
    }

    if (rc.format == "csv") {
        Csv csv({"dim", "n_outcomes", "deviation_norm", "max_commutator_norm", "preserved", "all_commute", "levels",
                 "first_failing_level", "witness_value", "verdict"});
        csv.cell(dev.dim).cell(dev.n_outcomes).cell(dev.deviation_norm).cell(dev.max_commutator_norm);
        csv.cell(dev.preserved).cell(p1.all_commute).cell(p1.levels.size()).cell(optional_level(p1.first_failing_level));
        csv.cell(sig.witness_value).cell(verdict_name(p1.verdict)).end_row();
        return emit(rc, csv.str(), out, err, code);
    }
    json report;
    report["deviation"] = io::to_json(dev);
    report["deviation_op"] = io::to_json(dev.deviation_op);
    report["prop1"] = io::to_json(p1, true);
    if (p2) {
        report["prop2"] = io::to_json(*p2, true);
    }
    report["signaling"] = io::to_json(sig);
    json config{{"fixture", rc.fixture}};
    json summary{{"deviation_norm", dev.deviation_norm}, {"preserved", dev.preserved},
                 {"all_commute", p1.all_commute},     {"verdict", verdict_name(p1.verdict)},
                 {"passed", ok}};
    return emit(rc, dump(envelope(rc, std::move(config), std::move(summary), json::array({std::move(report)}))),
                out, err, code);
}

// ---------------------------------------------------------------------------
// scan

int scan(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    const std::vector<std::size_t> dims = parse_index_list(rc.dim, "dim");
    const std::vector<std::size_t> outcomes = parse_index_list(rc.outcomes, "outcomes");
    const std::vector<RegimeKind> regimes = parse_regimes(rc.regime);
    std::vector<EnsembleConfig> cells;
    for (RegimeKind k : regimes) {
        // the qubit family has one fixed shape
        const std::vector<std::size_t> ds = k == RegimeKind::UnsharpQubit ? std::vector<std::size_t>{2} : dims;
        const std::vector<std::size_t> ns = k == RegimeKind::UnsharpQubit ? std::vector<std::size_t>{2} : outcomes;
        for (std::size_t d : ds) {
            for (std::size_t n : ns) {
                EnsembleConfig ec;
                ec.seed = rc.seed;
                ec.dim = d;
                ec.n_outcomes = n;
                ec.regime = {k, rc.lambda};
                try {
                    ec.validate(rc.tol);
                } catch (const Error& e) {
                    throw UsageError(e.detail());
                }
                cells.push_back(ec);
            }
        }
    }

    std::vector<ScanRecord> records;
    std::size_t violations = 0;
    for (const EnsembleConfig& ec : cells) {
        const ScanResult r = scan_commutator_vs_deviation(ec, rc.trials, rc.threads, rc.tol);
        violations += r.violations;
        if (!r.separation_holds) {
            err << "scan: " << r.violations << " separation violations at dim " << ec.dim << ", outcomes "
                << ec.n_outcomes << ", regime " << regime_name(ec.regime.kind) << " (seed " << ec.seed << ")\n";
        }
        records.insert(records.end(), r.records.begin(), r.records.end());
    }
    const int code = violations == 0 ? kExitPass : kExitFail;

    if (rc.format == "csv") {
        Csv csv({"trial", "seed", "dim", "n_outcomes", "regime", "commutator_norm", "deviation_norm"});
        for (const ScanRecord& r : records) {
            csv.cell(r.trial).cell(r.seed, 0).cell(r.dim).cell(r.n_outcomes).cell(regime_name(r.regime));
            csv.cell(r.commutator_norm).cell(r.deviation_norm).end_row();
        }
        return emit(rc, csv.str(), out, err, code);
    }
    json items = json::array();
    for (const ScanRecord& r : records) {
        items.push_back(io::to_json(r));
    }
    json config{{"seed", rc.seed}, {"trials", rc.trials}, {"dim", dims}, {"outcomes", outcomes},
                {"regime", regime_list(regimes)}, {"lambda", rc.lambda}};
    json summary{{"records", records.size()},
                 {"violations", violations},
                 {"separation_holds", violations == 0},
                 {"scope", "finite-dimensional evidence only; no claim about infinite-dimensional algebras"},
                 {"passed", code == kExitPass}};
    return emit(rc, dump(envelope(rc, std::move(config), std::move(summary), std::move(items))), out, err, code);
}

// ---------------------------------------------------------------------------
// Flag wiring

void add_common(CLI::App& sub, RunConfig& rc, const std::string& default_format) {
    sub.add_option("--threads", rc.threads, "Worker threads (0 = available parallelism)");
    sub.add_option("--out", rc.out, "Write the report here instead of stdout");
    sub.add_option("--format", rc.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->default_str(default_format);
    sub.add_flag("--no-timestamp", rc.no_timestamp, "Omit the timestamp field so reruns compare byte for byte");
    sub.add_option("--config", rc.config_path, "JSON file with defaults for any flag (keys use '_' for '-')");
    sub.add_option("--tol-hermitian", rc.tol.hermitian_tol, "Hermiticity tolerance");
    sub.add_option("--tol-psd", rc.tol.psd_tol, "Positivity tolerance");
    sub.add_option("--tol-cluster", rc.tol.cluster_tol, "Eigenvalue clustering gap (relative to max(1, |A|))");
    sub.add_option("--tol-reconstruct", rc.tol.reconstruct_tol, "Spectral reconstruction tolerance");
    sub.add_option("--tol-zero", rc.tol.zero_tol, "Absolute zero tolerance");
    sub.add_option("--tol-comm", rc.tol.comm_rel_tol, "Commutation threshold, relative to |B|");
    sub.add_option("--tol-dev", rc.tol.dev_rel_tol, "Preservation threshold, relative to |B|");
    sub.add_option("--tol-gray", rc.tol.gray_factor, "Width factor of the inconclusive band");
    sub.add_option("--tol-radius", rc.tol.radius_tol, "Quasi-nilpotency threshold on the radius tail");
    sub.add_option("--n-max", rc.tol.n_max, "Length of spectral radius sequences");
    sub.add_option("--max-outcomes", rc.tol.max_outcomes, "Largest accepted effect family");
}

void add_batch(CLI::App& sub, RunConfig& rc, bool with_outcomes) {
    sub.add_option("--dim", rc.dim, "Dimensions, e.g. 4, 2-8 or 2,3,5");
    if (with_outcomes) {
        sub.add_option("--outcomes", rc.outcomes, "Outcome counts, same syntax as --dim");
    }
    sub.add_option("--trials", rc.trials, "Number of seeded trials");
    sub.add_option("--seed", rc.seed, "Master seed; trial t uses stream t");
    sub.add_option("--regime", rc.regime, "generic, commuting, projective, unsharp-qubit, a comma list, or mixed");
    sub.add_option("--lambda", rc.lambda, "Unsharpness for the unsharp-qubit regime");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical checks of statistics preservation under Lueders measurements", "lueders"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    RunConfig rc;
    std::map<std::string, int (*)(const RunConfig&, std::ostream&, std::ostream&)> handlers;

    CLI::App* p1 = app.add_subcommand("verify-prop1", "Seeded batch of peeling checks over effect families");
    add_batch(*p1, rc, true);
    p1->add_option("--clusters", rc.clusters, "Eigenvalue clusters of the test effect (0 = generic spectrum)");
    p1->add_option("--min-commutator", rc.min_commutator, "Redraw generic instances below this commutator norm");
    p1->add_option("--fixture", rc.fixture, "Check one JSON fixture instead of a random batch");
    add_common(*p1, rc, "json");
    handlers["verify-prop1"] = verify_prop1;

    CLI::App* p2 = app.add_subcommand("verify-prop2", "Seeded batch of binary-family checks");
    add_batch(*p2, rc, false);
    p2->add_option("--min-commutator", rc.min_commutator, "Redraw generic instances below this commutator norm");
    p2->add_option("--fixture", rc.fixture, "Check one JSON fixture (family[0] is E) instead of a random batch");
    add_common(*p2, rc, "json");
    handlers["verify-prop2"] = verify_prop2;

    CLI::App* lm = app.add_subcommand("lemma", "Derivation identity and quasi-nilpotency on built-in and user pairs");
    lm->add_option("--dim", rc.dim, "Dimensions of the random exact constructions");
    lm->add_option("--trials", rc.trials, "Number of random exact constructions");
    lm->add_option("--seed", rc.seed, "Seed for the random constructions");
    lm->add_option("--fixture", rc.fixture, "Extra JSON pair {\"x\": ..., \"a\": ...}");
    add_common(*lm, rc, "json");
    handlers["lemma"] = lemma;

    CLI::App* sw = app.add_subcommand("sweep", "Deviation of the unsharp qubit family against its closed form");
    sw->add_option("--lambda-grid", rc.lambda_grid, "Comma list or start:stop:step");
    add_common(*sw, rc, "csv");
    handlers["sweep"] = sweep;

    CLI::App* an = app.add_subcommand("analyze", "Full report for one (family, effect) fixture");
    an->add_option("fixture", rc.fixture, "Fixture JSON file")->required();
    add_common(*an, rc, "json");
    handlers["analyze"] = analyze;

    CLI::App* sc = app.add_subcommand("scan", "Commutator norm against deviation norm over seeded draws");
    add_batch(*sc, rc, true);
    add_common(*sc, rc, "csv");
    handlers["scan"] = scan;

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    rc.command = active->get_name();
    // Commands that default to CSV: keep their default unless a format was chosen.
    if (active->get_option("--format")->count() == 0) {
        rc.format = active->get_option("--format")->get_default_str();
    }
    try {
        if (!rc.config_path.empty()) {
            apply_config_file(*active, rc.config_path);
        }
        rc.validate();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        return handlers.at(rc.command)(rc, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        // contract and validation failures on inputs: fixtures, grids, tolerances
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace lueders::cli
