#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbounds/errors.hpp"
#include "qbounds/hcrb.hpp"
#include "qbounds/magnetometry.hpp"
#include "qbounds/measurement_search.hpp"
#include "qbounds/model.hpp"
#include "qbounds/report.hpp"
#include "qbounds/selftest.hpp"
#include "qbounds/serialize.hpp"

using namespace qbounds;

namespace {

struct Globals {
    double tol = 1e-8;
    int jobs = 0;
    std::uint64_t seed = 20240611;
    std::string out;
    bool json = false;
};

struct BuiltinFlags {
    std::string model_path;
    std::string builtin;
    BuiltinSpec spec;
    std::string phi = "1,1,1";
    std::optional<std::string> povm;
    std::string weight_path;
};

int error_exit(ErrorKind kind, std::string message) {
    const std::string prefix = std::string(to_string(kind)) + ": ";
    if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    std::cerr << nlohmann::json{{"error", std::string(to_string(kind))}, {"message", message}}.dump() << '\n';
    return kind == ErrorKind::SolverFailure || kind == ErrorKind::GapTooLarge || kind == ErrorKind::AllRestartsFailed
               ? 2
               : 1;
}

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + g.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

std::array<double, 3> parse_phi(const std::string& text) {
    std::array<double, 3> phi{};
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i == 3) throw Error(ErrorKind::InvalidArgument, "--phi takes three comma-separated values");
        try {
            std::size_t used = 0;
            phi[i] = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "--phi: not a number: '" + item + "'");
        }
        ++i;
    }
    if (i != 3) throw Error(ErrorKind::InvalidArgument, "--phi takes three comma-separated values");
    return phi;
}

void add_builtin_flags(CLI::App* cmd, BuiltinFlags& f, bool allow_model) {
    if (allow_model) cmd->add_option("--model", f.model_path, "model JSON file");
    cmd->add_option("--builtin", f.builtin, "built-in generator")
        ->check(CLI::IsMember({"interferometer", "magnetometry"}));
    cmd->add_option("--photons", f.spec.photons, "total photon number (interferometer)");
    cmd->add_option("--input", f.spec.input, "probe: hb or onephoton")->check(CLI::IsMember({"hb", "onephoton"}));
    cmd->add_option("--c1sq", f.spec.c1sq, "|c_1|^2 of the one-photon probe");
    cmd->add_option("--eta", f.spec.eta, "transmissivity");
    cmd->add_option("--phase", f.spec.phase, "phase");
    cmd->add_option("--qubits", f.spec.qubits, "number of qubits (magnetometry)");
    cmd->add_option("--gamma", f.spec.gamma, "dephasing strength");
    cmd->add_option("--phi", f.phi, "field components, comma separated");
    cmd->add_option("--povm", f.povm, "none, sld:<i>, or a POVM JSON file");
}

/// Model and descriptor from either --model or --builtin.
std::pair<QuantumModel, std::string> resolve_model(BuiltinFlags& f) {
    if (!f.model_path.empty() && !f.builtin.empty())
        throw Error(ErrorKind::InvalidArgument, "--model and --builtin are exclusive");
    if (f.model_path.empty() && f.builtin.empty())
        throw Error(ErrorKind::InvalidArgument, "one of --model or --builtin is required");
    QuantumModel model;
    std::string descriptor;
    if (!f.model_path.empty()) {
        model = load_model(f.model_path);
        descriptor = "file:" + f.model_path;
    } else {
        f.spec.kind = f.builtin;
        f.spec.phi = parse_phi(f.phi);
        model = build_builtin(f.spec);
        descriptor = describe(f.spec);
    }
    if (!f.weight_path.empty()) model = with_weight_file(model, f.weight_path);
    return {std::move(model), descriptor};
}

PovmChoice resolve_povm(const BuiltinFlags& f) {
    if (f.povm) return parse_povm_choice(*f.povm);
    // The phase-SLD measurement is the natural comparison for the interferometer.
    return parse_povm_choice(f.builtin == "interferometer" ? "sld:0" : "none");
}

HcrbOptions solver_options(const Globals& g) {
    if (!(g.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "--tol must be positive");
    HcrbOptions o;
    o.conic.eq_tol = o.conic.psd_tol = o.conic.gap_tol = o.conic.dual_tol = o.conic.infeas_tol = g.tol;
    return o;
}

int status_exit(const std::string& status, const std::string& message) {
    if (status == "SolverFailure") return error_exit(ErrorKind::SolverFailure, message);
    if (status == "GapTooLarge") return error_exit(ErrorKind::GapTooLarge, message);
    std::cerr << nlohmann::json{{"error", status}, {"message", message}}.dump() << '\n';
    return 1;
}

int cmd_bounds(const Globals& g, BuiltinFlags& f) {
    auto [model, descriptor] = resolve_model(f);
    const BoundsReport r = compute_bounds(model, descriptor, resolve_povm(f), solver_options(g));
    emit(g, bounds_report_json(r));
    return r.ok() ? 0 : status_exit(r.status, r.message);
}

int cmd_sweep(const Globals& g, BuiltinFlags& f, const std::string& sweep_text) {
    if (f.builtin.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs --builtin");
    const SweepSpec sweep = parse_sweep(sweep_text);
    f.spec.kind = f.builtin;
    f.spec.phi = parse_phi(f.phi);
    const auto rows = run_sweep(f.spec, sweep, resolve_povm(f), solver_options(g), g.jobs);
    if (g.json) {
        std::string text = "[";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            text += i ? ",\n " : "";
            text += "{\"param_name\": " + nlohmann::json(rows[i].param_name).dump() + ", \"param_value\": ";
            std::ostringstream os;
            write_json_number(os, rows[i].param_value);
            text += os.str() + ", \"report\": " + bounds_report_json(rows[i].report) + "}";
        }
        emit(g, text + "]");
    } else {
        emit(g, sweep_csv(rows));
    }
    const bool any_ok = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.report.ok(); });
    if (!any_ok) return status_exit(rows.front().report.status, "every sweep point failed: " + rows.front().report.message);
    return 0;
}

int cmd_optimize(const Globals& g, BuiltinFlags& f, int restarts, const std::string& trace_csv) {
    if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "--restarts must be at least 1");
    if (f.builtin.empty() && f.model_path.empty()) f.builtin = "magnetometry";
    auto [model, descriptor] = resolve_model(f);
    SearchOptions so;
    so.restarts = restarts;
    so.seed = g.seed;
    so.jobs = g.jobs;
    const SearchResult sr = optimize_projective(model, so);
    const HcrbResult h = solve_hcrb(model, solver_options(g));

    std::ostringstream os;
    os << "{\"model\": " << nlohmann::json(descriptor).dump() << ", \"seed\": " << g.seed << ", \"C_H\": ";
    write_json_number(os, h.value);
    os << ", \"reldiff\": ";
    write_json_number(os, 1.0 - h.value / sr.best_value);
    os << ", \"search\": " << search_result_json(sr) << '}';
    emit(g, os.str());

    if (!trace_csv.empty()) {
        std::ofstream t(trace_csv, std::ios::binary);
        if (!t) throw Error(ErrorKind::InvalidArgument, "cannot write " + trace_csv);
        t << search_trace_csv(sr);
    }
    return 0;
}

int cmd_selftest(const Globals& g, bool full) {
    SelftestOptions o;
    o.full = full;
    o.jobs = g.jobs;
    if (!g.json)
        o.on_result = [](const CheckResult& r) {
            std::cout << format_check(r) << std::endl;
        };
    const auto results = run_selftest(o);
    const bool pass = std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
    if (g.json)
        emit(g, selftest_json(results));
    else if (!g.out.empty())
        emit(g, [&] {
            std::string s;
            for (const auto& r : results) s += format_check(r) + '\n';
            return s;
        }());
    return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Holevo Cramer-Rao bound and companion bounds for multi-parameter quantum models"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--tol", g.tol, "solver tolerance (residuals and relative gap)");
    app.add_option("--jobs", g.jobs, "worker threads, 0 for all cores");
    app.add_option("--seed", g.seed, "seed for the projective search");
    app.add_option("--out", g.out, "write the result to this file instead of stdout");
    app.add_flag("--json", g.json, "JSON instead of text or CSV where both exist");

    BuiltinFlags bf, sf, of;
    auto* bounds = app.add_subcommand("bounds", "bound panel for one model");
    add_builtin_flags(bounds, bf, true);
    bounds->add_option("--weight", bf.weight_path, "weight matrix JSON file");

    std::string sweep_text;
    auto* sweep = app.add_subcommand("sweep", "bound panels over a parameter grid, as CSV");
    add_builtin_flags(sweep, sf, false);
    sweep->add_option("--sweep", sweep_text, "<param>:<start>:<stop>:<points>")->required();

    int restarts = 10;
    std::string trace_csv;
    auto* optimize = app.add_subcommand("optimize-projective", "best projective measurement by Nelder-Mead");
    add_builtin_flags(optimize, of, true);
    optimize->add_option("--restarts", restarts, "random restarts");
    optimize->add_option("--trace-csv", trace_csv, "per-restart trace file");

    bool full = false;
    auto* selftest = app.add_subcommand("selftest", "acceptance checks");
    selftest->add_flag("--full", full, "run the full grids instead of the fast subset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return error_exit(ErrorKind::InvalidArgument, e.what());
    }

    try {
        if (*bounds) return cmd_bounds(g, bf);
        if (*sweep) return cmd_sweep(g, sf, sweep_text);
        if (*optimize) return cmd_optimize(g, of, restarts, trace_csv);
        if (*selftest) return cmd_selftest(g, full);
    } catch (const Error& e) {
        return error_exit(e.kind(), e.what());
    } catch (const std::exception& e) {
        return error_exit(ErrorKind::InvalidArgument, e.what());
    }
    return 1;
}
