// Command line front end: run | oracle | compare | merge | tcam.
// All outputs are deterministic for a fixed (flags, seed, input bytes).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hhh/hhh.hpp"
#include "hhh/merge.hpp"
#include "hhh/oracle.hpp"
#include "hhh/rational.hpp"
#include "hhh/stream.hpp"
#include "hhh/tcam.hpp"

namespace {

using nlohmann::ordered_json;

struct SpecOptions {
    std::size_t dim = 1;
    std::string granularity = "byte";
    std::string hierarchy;  // explicit "4x8,4x8" form, overrides granularity
};

struct InputOptions {
    std::string input;        // trace path; "-" reads stdin
    std::string format = "csv";
    std::string gen;          // zipf | uniform | fewheavy
    uint64_t universe = 1 << 16;
    uint64_t records = 100000;
    double alpha = 1.2;
    uint32_t heavy = 4;
    std::optional<uint64_t> seed;
};

void add_spec_options(CLI::App* cmd, SpecOptions& spec) {
    cmd->add_option("--dim", spec.dim, "Number of dimensions")->check(CLI::Range(1, 4));
    cmd->add_option("--granularity", spec.granularity, "Hierarchy granularity per dimension")
        ->check(CLI::IsMember({"byte", "bit"}));
    cmd->add_option("--hierarchy", spec.hierarchy,
                    "Explicit hierarchy as heightxstep_bits per dimension, e.g. 4x8,4x8 "
                    "(overrides --dim/--granularity)");
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.input, "CSV trace path ('-' for stdin)");
    cmd->add_option("--format", in.format, "Trace format")->check(CLI::IsMember({"csv", "csv2d"}));
    cmd->add_option("--gen", in.gen, "Synthetic stream generator")
        ->check(CLI::IsMember({"zipf", "uniform", "fewheavy"}));
    cmd->add_option("--universe", in.universe, "Generator: per-dimension universe size");
    cmd->add_option("--records", in.records, "Generator: number of records");
    cmd->add_option("--alpha", in.alpha, "Generator: zipf exponent");
    cmd->add_option("--heavy", in.heavy, "Generator: number of hot elements (fewheavy)");
    cmd->add_option("--seed", in.seed, "Generator seed (default: HHH_SEED or 1)");
}

hhh::HierarchySpec build_spec(const SpecOptions& opt) {
    if (!opt.hierarchy.empty()) return hhh::HierarchySpec::from_string(opt.hierarchy);
    if (opt.granularity == "bit") return hhh::HierarchySpec::ipv4_bitwise(opt.dim);
    return hhh::HierarchySpec::ipv4_bytewise(opt.dim);
}

uint64_t resolve_seed(const InputOptions& in) {
    if (in.seed) return *in.seed;
    if (const char* env = std::getenv("HHH_SEED")) return std::strtoull(env, nullptr, 10);
    return 1;
}

std::vector<hhh::TraceRecord> load_stream(const InputOptions& in, const hhh::HierarchySpec& spec) {
    if (!in.input.empty() && !in.gen.empty()) {
        throw std::invalid_argument("--input and --gen are mutually exclusive");
    }
    if (!in.input.empty()) {
        hhh::TraceFormat format =
            in.format == "csv2d" ? hhh::TraceFormat::csv2d : hhh::TraceFormat::csv;
        if (in.input == "-") return hhh::parse_trace(std::cin, spec, format);
        return hhh::parse_trace_file(in.input, spec, format);
    }
    if (in.gen.empty()) throw std::invalid_argument("one of --input or --gen is required");
    hhh::GeneratorConfig cfg;
    cfg.kind = in.gen == "zipf"      ? hhh::GeneratorConfig::Kind::zipf
               : in.gen == "uniform" ? hhh::GeneratorConfig::Kind::uniform
                                     : hhh::GeneratorConfig::Kind::few_heavy;
    cfg.universe = in.universe;
    cfg.records = in.records;
    cfg.alpha = in.alpha;
    cfg.heavy_items = in.heavy;
    cfg.seed = resolve_seed(in);
    return hhh::generate_stream(cfg, spec);
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

std::string report_text(const hhh::HhhReport& report, const std::string& requested,
                        const std::string& out_path) {
    std::string format = requested;
    if (format.empty()) {
        format = out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json"
                     ? "json"
                     : "csv";
    }
    return format == "json" ? hhh::to_json(report) : hhh::to_csv(report);
}

hhh::HhhReport run_output(const hhh::HhhState& state, const hhh::Rational& phi, bool pairwise) {
    if (state.spec().dimensions() == 1) return hhh::output_1d(state, phi);
    if (state.spec().dimensions() == 2 && !pairwise) return hhh::output_2d(state, phi);
    return hhh::output_nd(state, phi);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int cmd_run(const SpecOptions& spec_opt, const InputOptions& in_opt, const std::string& eps_text,
            const std::string& phi_text, const std::string& mode, bool pairwise,
            const std::string& out, const std::string& report_format,
            const std::string& save_state, const std::string& stats_out) {
    hhh::HierarchySpec spec = build_spec(spec_opt);
    hhh::Rational epsilon = hhh::Rational::parse(eps_text);
    hhh::Rational phi = hhh::Rational::parse(phi_text);
    auto stream = load_stream(in_opt, spec);

    hhh::HhhState state(spec, epsilon,
                        mode == "unitary" ? hhh::UpdateMode::unitary : hhh::UpdateMode::weighted);
    hhh::insert_stream(state, stream);

    hhh::HhhReport report = run_output(state, phi, pairwise);
    for (const std::string& w : report.warnings) {
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
    write_output(out, report_text(report, report_format, out));

    if (!save_state.empty()) hhh::write_state_file(save_state, state);
    if (!stats_out.empty()) {
        hhh::OccupancyStats stats = hhh::occupancy_stats(state);
        ordered_json j;
        j["N"] = state.total();
        j["epsilon"] = state.epsilon().str();
        j["capacity_per_node"] = stats.capacity_per_node;
        j["max_heavy_counters"] = stats.max_heavy_counters;
        j["heavy_counters_per_node"] = stats.heavy_counters_per_node;
        write_output(stats_out, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_oracle(const SpecOptions& spec_opt, const InputOptions& in_opt,
               const std::string& phi_text, const std::string& out,
               const std::string& report_format, const std::string& check,
               const std::string& verdict_out) {
    if (!check.empty()) {
        // the report pins the hierarchy and parameters; the trace must parse
        // against the same spec
        hhh::HhhReport report = hhh::report_from_json(read_file(check));
        InputOptions in = in_opt;
        auto stream = load_stream(in, report.spec);
        hhh::CheckVerdict verdict =
            hhh::check_report(stream, report.spec, report.phi, report.epsilon, report);
        write_output(verdict_out.empty() ? out : verdict_out, hhh::to_json(verdict));
        return 0;
    }
    hhh::HierarchySpec spec = build_spec(spec_opt);
    hhh::Rational phi = hhh::Rational::parse(phi_text);
    auto stream = load_stream(in_opt, spec);
    hhh::ExactHhhSet set = hhh::exact_hhh(stream, spec, phi);
    hhh::HhhReport report = hhh::report_from_exact(set, spec, phi);
    write_output(out, report_text(report, report_format, out));
    return 0;
}

int cmd_compare(const SpecOptions& spec_opt, const InputOptions& in_opt,
                const std::string& eps_text, const std::string& phi_text,
                const std::string& mode, bool pairwise, const std::string& out) {
    hhh::HierarchySpec spec = build_spec(spec_opt);
    hhh::Rational epsilon = hhh::Rational::parse(eps_text);
    hhh::Rational phi = hhh::Rational::parse(phi_text);
    auto stream = load_stream(in_opt, spec);

    hhh::HhhState state(spec, epsilon,
                        mode == "unitary" ? hhh::UpdateMode::unitary : hhh::UpdateMode::weighted);
    hhh::insert_stream(state, stream);
    hhh::HhhReport report = run_output(state, phi, pairwise);

    hhh::ExactHhhSet exact = hhh::exact_hhh(stream, spec, phi);
    hhh::CheckVerdict verdict = hhh::check_report(stream, spec, phi, epsilon, report);

    // relative error: worst interval width as a fraction of epsilon*N
    double rel = 0.0;
    if (state.total() > 0 && !epsilon.is_zero()) {
        double eps_n = epsilon.to_double() * static_cast<double>(state.total());
        for (const hhh::HhhOutputEntry& e : report.entries) {
            rel = std::max(rel, static_cast<double>(e.f_max - e.f_min) / eps_n);
        }
    }

    uint64_t accuracy = 0, coverage = 0;
    for (const hhh::CheckViolation& v : verdict.violations) {
        (v.kind == "accuracy" ? accuracy : coverage) += 1;
    }

    ordered_json j;
    j["N"] = state.total();
    j["epsilon"] = epsilon.str();
    j["phi"] = phi.str();
    j["output_size"] = report.entries.size();
    j["exact_size"] = exact.entries.size();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", rel);
    j["relative_error"] = std::string(buf);
    j["accuracy_violations"] = accuracy;
    j["coverage_violations"] = coverage;
    j["pass"] = verdict.pass;
    write_output(out, j.dump(2) + "\n");
    return 0;
}

int cmd_merge(const std::vector<std::string>& inputs, const std::string& out,
              const std::string& phi_text, const std::string& report_out,
              const std::string& report_format) {
    std::vector<hhh::HhhState> states;
    states.reserve(inputs.size());
    for (const std::string& path : inputs) states.push_back(hhh::read_state_file(path));
    std::vector<const hhh::HhhState*> refs;
    for (const hhh::HhhState& s : states) refs.push_back(&s);
    hhh::HhhState merged = hhh::merge_states(refs);
    if (!out.empty()) hhh::write_state_file(out, merged);
    if (!phi_text.empty()) {
        hhh::Rational phi = hhh::Rational::parse(phi_text);
        bool pairwise = false;
        hhh::HhhReport report = run_output(merged, phi, pairwise);
        write_output(report_out, report_text(report, report_format, report_out));
    }
    return 0;
}

int cmd_tcam(const SpecOptions& spec_opt, const InputOptions& in_opt,
             const std::string& eps_text, bool single_instance, const std::string& config_path,
             const std::string& out) {
    hhh::HierarchySpec spec = build_spec(spec_opt);
    hhh::Rational epsilon = hhh::Rational::parse(eps_text);
    auto stream = load_stream(in_opt, spec);
    hhh::TcamCostModel cost;
    if (!config_path.empty()) cost = hhh::TcamCostModel::from_json(read_file(config_path));
    if (single_instance) {
        hhh::TcamSingleRunResult run = hhh::tcam_single_instance_run(stream, spec, epsilon, cost);
        write_output(out, hhh::to_json(run.ops, cost));
    } else {
        hhh::TcamRunResult run = hhh::tcam_run(stream, spec, epsilon, cost);
        write_output(out, hhh::to_json(run.ops, cost));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming hierarchical heavy hitters over IP-style hierarchies"};
    app.require_subcommand(1);

    SpecOptions spec_opt;
    InputOptions in_opt;
    std::string epsilon = "0.01", phi = "0.05", mode = "weighted";
    std::string out, report_format, save_state, stats_out;
    bool pairwise = false;

    CLI::App* run = app.add_subcommand("run", "Build a summary state and report approximate HHHs");
    add_spec_options(run, spec_opt);
    add_input_options(run, in_opt);
    run->add_option("--epsilon", epsilon, "Accuracy parameter in (0,1)");
    run->add_option("--phi", phi, "Threshold parameter in (0,1)");
    run->add_option("--mode", mode, "Update engine")->check(CLI::IsMember({"weighted", "unitary"}));
    run->add_flag("--nd", pairwise, "Use the pairwise-only conditioned estimate (d >= 2)");
    run->add_option("--out", out, "Report path (default: stdout)");
    run->add_option("--report-format", report_format, "csv or json (default: by extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--save-state", save_state, "Write the summary state bundle here");
    run->add_option("--stats-out", stats_out, "Write counter occupancy statistics here");

    CLI::App* oracle = app.add_subcommand("oracle", "Exact HHH set, or verdict on a report");
    std::string check, verdict_out;
    add_spec_options(oracle, spec_opt);
    add_input_options(oracle, in_opt);
    oracle->add_option("--phi", phi, "Threshold parameter");
    oracle->add_option("--out", out, "Output path (default: stdout)");
    oracle->add_option("--report-format", report_format, "csv or json (default: by extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    oracle->add_option("--check", check, "Report JSON to validate against the trace");
    oracle->add_option("--verdict-out", verdict_out, "Verdict path (default: --out)");

    CLI::App* compare = app.add_subcommand("compare", "Output-size and accuracy metrics vs the oracle");
    add_spec_options(compare, spec_opt);
    add_input_options(compare, in_opt);
    compare->add_option("--epsilon", epsilon, "Accuracy parameter");
    compare->add_option("--phi", phi, "Threshold parameter");
    compare->add_option("--mode", mode, "Update engine")
        ->check(CLI::IsMember({"weighted", "unitary"}));
    compare->add_flag("--nd", pairwise, "Use the pairwise-only conditioned estimate (d >= 2)");
    compare->add_option("--out", out, "Metrics JSON path (default: stdout)");

    CLI::App* merge = app.add_subcommand("merge", "Merge serialized state bundles");
    std::vector<std::string> merge_inputs;
    std::string merge_report;
    merge->add_option("states", merge_inputs, "State bundle files")->required()->expected(-1);
    merge->add_option("--out", out, "Merged state bundle path");
    merge->add_option("--phi", phi, "Also report approximate HHHs at this threshold")
        ->expected(1);
    bool merge_do_report = false;
    merge->add_flag("--report", merge_do_report, "Write a report for the merged state");
    merge->add_option("--report-out", merge_report, "Report path (default: stdout)");
    merge->add_option("--report-format", report_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* tcam = app.add_subcommand("tcam", "Count TCAM operations for a unitary stream");
    bool single_instance = false;
    std::string tcam_config;
    add_spec_options(tcam, spec_opt);
    add_input_options(tcam, in_opt);
    tcam->add_option("--epsilon", epsilon, "Accuracy parameter");
    tcam->add_flag("--single-instance", single_instance,
                   "One summary over (prefix, level) keys instead of one per node");
    tcam->add_option("--tcam-config", tcam_config, "Operation cost table JSON");
    tcam->add_option("--out", out, "Operation report path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(spec_opt, in_opt, epsilon, phi, mode, pairwise, out, report_format,
                           save_state, stats_out);
        }
        if (oracle->parsed()) {
            return cmd_oracle(spec_opt, in_opt, phi, out, report_format, check, verdict_out);
        }
        if (compare->parsed()) {
            return cmd_compare(spec_opt, in_opt, epsilon, phi, mode, pairwise, out);
        }
        if (merge->parsed()) {
            return cmd_merge(merge_inputs, out, merge_do_report ? phi : "", merge_report,
                             report_format);
        }
        if (tcam->parsed()) {
            return cmd_tcam(spec_opt, in_opt, epsilon, single_instance, tcam_config, out);
        }
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"] = e.what();
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 2;
    }
    return 0;
}
