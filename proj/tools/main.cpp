// Command line front end: reduce / classgroup / decide / ideal / pi / examples.
//
// Every subcommand prints human-readable text by default; --json switches to a
// single JSON envelope {schemaVersion, command, input, result, diagnostics} on
// standard output.  Volatile notes (timings, cache activity) go to standard
// error so identical invocations stay byte-identical on standard output.
//
// Exit codes: 0 success, 1 verification mismatch, 2 invalid input,
// 3 factorization failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bqf/bqf.hpp"

namespace {

using bqf::Int;
using bqf::Rat;
using nlohmann::json;

int exit_code_for(bqf::errc code) {
    return code == bqf::errc::factorization_incomplete ? 3 : 2;
}

Int parse_int(const std::string& text) {
    try {
        return Int(text);
    } catch (const std::exception&) {
        bqf::fail(bqf::errc::invalid_input, "not an integer: '" + text + "'");
    }
}

Rat parse_rat(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rat(parse_int(text));
    Int num = parse_int(text.substr(0, slash));
    Int den = parse_int(text.substr(slash + 1));
    bqf::require(den != 0, bqf::errc::invalid_input, "zero denominator in '" + text + "'");
    return Rat(num) / Rat(den);
}

// Literal grammar: D:scaleNum[/scaleDen]:a:b.  The trailing b may be any
// integer in its residue class mod 2a; it is folded into (-a, a] on parse.
bqf::OrderIdeal parse_ideal(const std::string& text) {
    std::vector<std::string> parts;
    std::string piece;
    std::istringstream in(text);
    while (std::getline(in, piece, ':')) parts.push_back(piece);
    bqf::require(parts.size() == 4, bqf::errc::invalid_input,
                 "ideal literal must be D:scale:a:b, got '" + text + "'");
    Int D = parse_int(parts[0]);
    Rat scale = parse_rat(parts[1]);
    Int a = parse_int(parts[2]);
    Int b = parse_int(parts[3]);
    return bqf::make_order_ideal(bqf::DiscContext::make(D), scale, a, b);
}

template <typename T>
std::string to_text(const T& value) {
    std::ostringstream os;
    os << value;
    return os.str();
}

json form_json(const bqf::QuadForm& f) {
    return {{"a", f.a.str()}, {"b", f.b.str()}, {"c", f.c.str()}};
}

json map_json(const bqf::UnimodularMap& m) {
    return {{"p", m.p.str()}, {"q", m.q.str()}, {"r", m.r.str()}, {"s", m.s.str()}};
}

json ideal_json(const bqf::OrderIdeal& ideal) {
    return {{"literal", to_text(ideal)},       {"D", ideal.ctx.D.str()},
            {"scale", to_text(ideal.scale)},   {"a", ideal.a.str()},
            {"b", ideal.b.str()},              {"norm", to_text(bqf::ideal_norm(ideal))}};
}

void note(const std::string& message) { std::cerr << "note: " << message << "\n"; }

void emit(bool json_mode, const std::string& command, const json& input, const json& result,
          const std::vector<std::string>& lines) {
    if (json_mode) {
        json envelope{{"schemaVersion", "1"},
                      {"command", command},
                      {"input", input},
                      {"result", result},
                      {"diagnostics", json::array()}};
        std::cout << envelope.dump(2) << "\n";
    } else {
        for (const auto& line : lines) std::cout << line << "\n";
    }
}

// Loads a class group, preloading the multiplication table from a versioned
// JSON cache when a cache directory is configured.  The cache is a pure
// optimization: entries that fail any validation are ignored and recomputed.
bqf::ClassGroup load_group(const Int& D, const std::string& cache_dir) {
    bqf::ClassGroup group = bqf::ClassGroup::enumerate(D);
    if (cache_dir.empty()) return group;
    namespace fs = std::filesystem;
    fs::path file = fs::path(cache_dir) / ("classgroup_" + D.str() + ".json");
    if (fs::exists(file)) {
        try {
            std::ifstream in(file);
            json entry = json::parse(in);
            bqf::require(entry.at("cacheVersion") == "1" && entry.at("D") == D.str(),
                         bqf::errc::invalid_input, "stale cache entry");
            const json& reps = entry.at("classes");
            bqf::require(reps.size() == group.size(), bqf::errc::invalid_input,
                         "cached class list has the wrong size");
            for (std::size_t i = 0; i < group.size(); ++i) {
                const bqf::QuadForm& f = group.rep(i);
                bqf::require(reps.at(i) == json::array({f.a.str(), f.b.str(), f.c.str()}),
                             bqf::errc::invalid_input, "cached class list disagrees");
            }
            group.preload_table(entry.at("table").get<std::vector<std::vector<std::size_t>>>());
            note("class group cache hit: " + file.string());
            return group;
        } catch (const std::exception& e) {
            note("ignoring unusable cache entry " + file.string() + " (" + e.what() + ")");
        }
    }
    auto table = group.full_table();
    try {
        fs::create_directories(cache_dir);
        json entry{{"cacheVersion", "1"}, {"D", D.str()}, {"classes", json::array()}, {"table", table}};
        for (const bqf::QuadForm& f : group.reps())
            entry["classes"].push_back(json::array({f.a.str(), f.b.str(), f.c.str()}));
        std::ofstream out(file);
        out << entry.dump(2) << "\n";
        note("class group cache store: " + file.string());
    } catch (const std::exception& e) {
        note("cache write failed for " + file.string() + " (" + e.what() + ")");
    }
    return group;
}

std::string default_cache_dir() {
    const char* env = std::getenv("BQF_CACHE_DIR");
    return env ? env : "";
}

int cmd_reduce(const std::string& a, const std::string& b, const std::string& c, bool json_mode) {
    bqf::QuadForm f{parse_int(a), parse_int(b), parse_int(c)};
    auto [reduced, transform] = bqf::reduce(f);
    emit(json_mode, "reduce", {{"form", form_json(f)}},
         {{"reduced", form_json(reduced)},
          {"transform", map_json(transform)},
          {"discriminant", reduced.discriminant().str()}},
         {"reduced " + to_text(reduced), "transform " + to_text(transform)});
    return 0;
}

int cmd_classgroup(const std::string& d_text, bool json_mode, const std::string& cache_dir) {
    Int D = parse_int(d_text);
    bqf::ClassGroup group = load_group(D, cache_dir);
    auto table = group.full_table();

    std::vector<std::string> lines;
    lines.push_back("discriminant " + D.str() + " = " + group.ctx().dK.str() + " * " +
                    group.ctx().f.str() + "^2");
    lines.push_back("class number " + std::to_string(group.size()));
    lines.push_back("classes");
    json classes = json::array();
    for (std::size_t i = 0; i < group.size(); ++i) {
        std::size_t inv = group.inverse(i);
        std::string line = "  [" + std::to_string(i) + "] " + to_text(group.rep(i)) +
                           " inverse [" + std::to_string(inv) + "]";
        if (i == group.identity()) line += " identity";
        lines.push_back(line);
        classes.push_back({{"index", i}, {"form", form_json(group.rep(i))}, {"inverse", inv}});
    }
    lines.push_back("table");
    for (std::size_t i = 0; i < group.size(); ++i) {
        std::string row = "  [" + std::to_string(i) + "]";
        for (std::size_t j = 0; j < group.size(); ++j) row += " " + std::to_string(table[i][j]);
        lines.push_back(row);
    }

    emit(json_mode, "classgroup", {{"D", D.str()}},
         {{"D", D.str()},
          {"fundamentalDiscriminant", group.ctx().dK.str()},
          {"conductor", group.ctx().f.str()},
          {"classNumber", group.size()},
          {"identity", group.identity()},
          {"classes", classes},
          {"table", table}},
         lines);
    return 0;
}

int cmd_decide(const std::string& a, const std::string& b, const std::string& c,
               const std::string& m_text, bool certificate, bool explain, bool oracle_check,
               bool json_mode, const std::string& cache_dir) {
    bqf::QuadForm f{parse_int(a), parse_int(b), parse_int(c)};
    bqf::require(f.is_positive_definite() && f.is_primitive(), bqf::errc::invalid_form,
                 "decide requires a primitive positive definite form, got " + to_text(f));
    Int m = parse_int(m_text);
    bqf::ClassGroup group = load_group(f.discriminant(), cache_dir);
    bqf::Decision decision = bqf::decide(group, f, m);

    std::vector<std::string> lines;
    std::string verdict_line = decision.verdict ? "YES" : "NO";
    if (decision.verdict && certificate && decision.witness) {
        verdict_line += " (x,y)=(" + decision.witness->first.str() + "," +
                        decision.witness->second.str() + ")";
    }
    lines.push_back(verdict_line);
    if (!decision.verdict && decision.failure) {
        std::string reason = std::string("reason ") + bqf::failure_name(*decision.failure);
        if (decision.failure_prime) {
            reason += " " + decision.failure_prime->str();
            if (decision.failure_power) reason += "^" + std::to_string(*decision.failure_power);
        }
        lines.push_back(reason);
    }
    if (decision.verdict && certificate) {
        for (const auto& [value, cls] : decision.class_witness)
            lines.push_back("assign " + value.str() + " -> " + to_text(cls));
    }
    if (explain) {
        lines.push_back("trace");
        for (const auto& line : decision.trace) lines.push_back("  " + line);
    }

    json result{{"verdict", decision.verdict}};
    if (decision.witness) {
        result["witness"] = {{"x", decision.witness->first.str()},
                             {"y", decision.witness->second.str()}};
    } else {
        result["witness"] = nullptr;
    }
    json class_witness = json::array();
    for (const auto& [value, cls] : decision.class_witness)
        class_witness.push_back({{"value", value.str()}, {"class", form_json(cls)}});
    result["classWitness"] = class_witness;
    if (decision.failure) {
        json failure{{"reason", bqf::failure_name(*decision.failure)}};
        failure["prime"] = decision.failure_prime ? json(decision.failure_prime->str()) : json();
        failure["power"] = decision.failure_power ? json(*decision.failure_power) : json();
        result["failure"] = failure;
    } else {
        result["failure"] = nullptr;
    }
    if (explain) result["trace"] = decision.trace;

    bool mismatch = false;
    if (oracle_check) {
        bool oracle = bqf::oracle_decide(f, m).has_value();
        mismatch = oracle != decision.verdict;
        result["oracleCheck"] = !mismatch;
        note(std::string("oracle ") + (mismatch ? "DISAGREES" : "agrees"));
    }

    emit(json_mode, "decide",
         {{"form", form_json(f)},
          {"m", m.str()},
          {"certificate", certificate},
          {"explain", explain},
          {"oracleCheck", oracle_check}},
         result, lines);
    if (mismatch) {
        std::cerr << "error: exhaustive search disagrees with the class-group decision\n";
        return 1;
    }
    return 0;
}

int cmd_ideal_binary(const std::string& op, const std::string& lhs_text,
                     const std::string& rhs_text, bool json_mode) {
    bqf::OrderIdeal lhs = parse_ideal(lhs_text);
    bqf::OrderIdeal out{lhs.ctx, 1, 1, 0};
    json input{{"op", op}};
    if (op == "mul") {
        bqf::OrderIdeal rhs = parse_ideal(rhs_text);
        input["ideals"] = json::array({to_text(lhs), to_text(rhs)});
        out = bqf::ideal_mul(lhs, rhs);
    } else if (op == "extend") {
        Int target = parse_int(rhs_text);
        input["ideal"] = to_text(lhs);
        input["target"] = target.str();
        out = bqf::extend(lhs, bqf::DiscContext::make(target));
    } else {
        Int target = parse_int(rhs_text);
        input["ideal"] = to_text(lhs);
        input["target"] = target.str();
        bqf::DiscContext small = bqf::DiscContext::make(target);
        if (gcd(numerator(bqf::ideal_norm(lhs)), bqf::relative_conductor(small, lhs.ctx)) != 1)
            note("norm shares a factor with the relative conductor; the result is the "
                 "plain lattice intersection and need not be proper");
        out = bqf::contract(lhs, small);
    }
    emit(json_mode, "ideal " + op, input, {{"ideal", ideal_json(out)}}, {to_text(out)});
    return 0;
}

int cmd_ideal_unary(const std::string& op, const std::string& text, bool json_mode) {
    bqf::OrderIdeal ideal = parse_ideal(text);
    json input{{"op", op}, {"ideal", to_text(ideal)}};
    if (op == "norm") {
        Rat n = bqf::ideal_norm(ideal);
        emit(json_mode, "ideal norm", input, {{"norm", to_text(n)}}, {to_text(n)});
        return 0;
    }
    if (op == "decompose") {
        bqf::IdealDecomposition parts = bqf::decompose_order_ideal(ideal);
        std::vector<std::string> lines;
        json split = json::array();
        json inert = json::array();
        json conductor = json::array();
        for (const auto& [prime, exponent] : parts.split_ramified) {
            lines.push_back("prime " + to_text(prime) + " exponent " + std::to_string(exponent));
            split.push_back({{"ideal", ideal_json(prime)}, {"exponent", exponent}});
        }
        for (const auto& [q, half] : parts.inert) {
            lines.push_back("inert " + q.str() + " exponent " + std::to_string(half));
            inert.push_back({{"prime", q.str()}, {"exponent", half}});
        }
        for (const auto& [l, part] : parts.conductor_parts) {
            lines.push_back("conductor " + l.str() + " part " + to_text(part));
            conductor.push_back({{"prime", l.str()}, {"ideal", ideal_json(part)}});
        }
        if (lines.empty()) lines.push_back("unit");
        emit(json_mode, "ideal decompose", input,
             {{"ideal", ideal_json(ideal)},
              {"splitRamified", split},
              {"inert", inert},
              {"conductorParts", conductor}},
             lines);
        return 0;
    }
    bqf::OrderIdeal out = op == "conj" ? bqf::ideal_conj(ideal) : bqf::ideal_inv(ideal);
    emit(json_mode, "ideal " + op, input, {{"ideal", ideal_json(out)}}, {to_text(out)});
    return 0;
}

int cmd_pi(const std::string& d_text, const std::string& dp_text, const std::string& a,
           const std::string& b, const std::string& c, bool json_mode,
           const std::string& cache_dir) {
    Int D = parse_int(d_text);
    Int Dp = parse_int(dp_text);
    bqf::QuadForm f{parse_int(a), parse_int(b), parse_int(c)};
    bqf::require(f.discriminant() == D, bqf::errc::invalid_input,
                 "form " + to_text(f) + " has discriminant " + f.discriminant().str() +
                     ", expected " + D.str());
    bqf::ClassGroup source = load_group(D, cache_dir);
    bqf::ClassGroup target = load_group(Dp, cache_dir);
    bqf::ClassElem x{&source, source.index_of(bqf::reduce(f).first)};
    bqf::ClassElem image = bqf::surjection_pi(x, target);
    emit(json_mode, "pi", {{"D", D.str()}, {"Dprime", Dp.str()}, {"form", form_json(f)}},
         {{"sourceClass", x.index},
          {"imageClass", image.index},
          {"image", form_json(image.form())}},
         {to_text(image.form())});
    return 0;
}

int cmd_examples(const std::string& id, const std::string& max_text, bool json_mode) {
    Int max_m = parse_int(max_text);
    bqf::require(max_m >= 1, bqf::errc::invalid_input, "--max must be at least 1");
    bqf::ExampleReport report = bqf::verify_example(id, max_m);
    {
        std::ostringstream timing;
        timing << "elapsed " << report.seconds << "s";
        note(timing.str());
    }
    Int checked = max_m - Int(report.disagreements.size());
    std::vector<std::string> lines;
    for (const Int& m : report.disagreements) lines.push_back("MISMATCH m=" + m.str());
    lines.push_back((report.disagreements.empty() ? "OK " : "FAIL ") + checked.str() + "/" +
                    max_m.str());
    json disagreements = json::array();
    for (const Int& m : report.disagreements) disagreements.push_back(m.str());
    emit(json_mode, "examples", {{"id", id}, {"maxM", max_m.str()}},
         {{"id", report.id},
          {"form", form_json(report.form)},
          {"checked", checked.str()},
          {"total", max_m.str()},
          {"disagreements", disagreements}},
         lines);
    return report.disagreements.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact arithmetic for positive definite binary quadratic forms"};
    app.require_subcommand(1);
    int rc = 0;

    std::string ra, rb, rc_coeff;
    bool rjson = false;
    auto* reduce_cmd = app.add_subcommand("reduce", "reduce a form to its canonical equivalent");
    reduce_cmd->add_option("a", ra, "leading coefficient")->required();
    reduce_cmd->add_option("b", rb, "middle coefficient")->required();
    reduce_cmd->add_option("c", rc_coeff, "trailing coefficient")->required();
    reduce_cmd->add_flag("--json", rjson, "emit a JSON envelope");
    reduce_cmd->callback([&] { rc = cmd_reduce(ra, rb, rc_coeff, rjson); });

    std::string gd, gcache = default_cache_dir();
    bool gjson = false;
    auto* group_cmd = app.add_subcommand("classgroup", "list the form classes of a discriminant");
    group_cmd->add_option("D", gd, "negative discriminant (0 or 1 mod 4)")->required();
    group_cmd->add_flag("--json", gjson, "emit a JSON envelope");
    group_cmd->add_option("--cache-dir", gcache, "directory for the class group cache");
    group_cmd->callback([&] { rc = cmd_classgroup(gd, gjson, gcache); });

    std::string da, db, dc, dm, dcache = default_cache_dir();
    bool dcert = false, dexplain = false, doracle = false, djson = false;
    auto* decide_cmd = app.add_subcommand("decide", "decide whether a form represents m");
    decide_cmd->add_option("a", da, "leading coefficient")->required();
    decide_cmd->add_option("b", db, "middle coefficient")->required();
    decide_cmd->add_option("c", dc, "trailing coefficient")->required();
    decide_cmd->add_option("m", dm, "target value")->required();
    decide_cmd->add_flag("--certificate", dcert, "print the witness and class assignment");
    decide_cmd->add_flag("--explain", dexplain, "print the decision trace");
    decide_cmd->add_flag("--oracle-check", doracle, "cross-check with exhaustive search");
    decide_cmd->add_flag("--json", djson, "emit a JSON envelope");
    decide_cmd->add_option("--cache-dir", dcache, "directory for the class group cache");
    decide_cmd->callback(
        [&] { rc = cmd_decide(da, db, dc, dm, dcert, dexplain, doracle, djson, dcache); });

    auto* ideal_cmd = app.add_subcommand("ideal", "arithmetic on order ideals");
    ideal_cmd->require_subcommand(1);
    struct IdealArgs {
        std::string first, second;
        bool json = false;
    };
    // deque: CLI11 keeps references to the slots, so they must not move.
    auto ideal_args = std::make_shared<std::deque<IdealArgs>>();
    auto add_ideal_op = [&](const std::string& name, const std::string& help, bool binary,
                            const std::string& second_name, const std::string& second_help) {
        IdealArgs& args = ideal_args->emplace_back();
        auto* cmd = ideal_cmd->add_subcommand(name, help);
        cmd->add_option("ideal", args.first, "ideal literal D:scale:a:b")->required();
        if (binary) cmd->add_option(second_name, args.second, second_help)->required();
        cmd->add_flag("--json", args.json, "emit a JSON envelope");
        cmd->callback([&, name, binary] {
            rc = binary ? cmd_ideal_binary(name, args.first, args.second, args.json)
                        : cmd_ideal_unary(name, args.first, args.json);
        });
    };
    add_ideal_op("mul", "multiply two ideals of the same order", true, "other",
                 "ideal literal D:scale:a:b");
    add_ideal_op("norm", "print the norm of an ideal", false, "", "");
    add_ideal_op("conj", "print the conjugate ideal", false, "", "");
    add_ideal_op("inv", "print the inverse of a proper ideal", false, "", "");
    add_ideal_op("extend", "extend an ideal to a larger order", true, "target",
                 "target discriminant");
    add_ideal_op("contract", "contract an ideal to a smaller order", true, "target",
                 "target discriminant");
    add_ideal_op("decompose", "factor an integral proper ideal", false, "", "");

    std::string pd, pdp, pa, pb, pc, pcache = default_cache_dir();
    bool pjson = false;
    auto* pi_cmd = app.add_subcommand("pi", "map a class to the class group of a larger order");
    pi_cmd->add_option("D", pd, "source discriminant")->required();
    pi_cmd->add_option("Dprime", pdp, "target discriminant")->required();
    pi_cmd->add_option("a", pa, "leading coefficient")->required();
    pi_cmd->add_option("b", pb, "middle coefficient")->required();
    pi_cmd->add_option("c", pc, "trailing coefficient")->required();
    pi_cmd->add_flag("--json", pjson, "emit a JSON envelope");
    pi_cmd->add_option("--cache-dir", pcache, "directory for the class group cache");
    pi_cmd->callback([&] { rc = cmd_pi(pd, pdp, pa, pb, pc, pjson, pcache); });

    std::string eid, emax = "1000";
    bool ejson = false;
    auto* examples_cmd =
        app.add_subcommand("examples", "check a worked example against both deciders");
    examples_cmd->add_option("id", eid, "example identifier (1.1, 1.2, 1.3, 8.2, 8.5)")
        ->required();
    examples_cmd->add_option("--max", emax, "largest m to check");
    examples_cmd->add_flag("--json", ejson, "emit a JSON envelope");
    examples_cmd->callback([&] { rc = cmd_examples(eid, emax, ejson); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const bqf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
