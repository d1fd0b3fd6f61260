// scramblemeter: accessible min-information of isometries, LMG sweeps,
// code certificates and conditional min-entropy from the command line.
//
// Exit codes: 0 success, 2 bad usage or input, 3 domain error, 1 anything else.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "scramblemeter/infotheory.hpp"
#include "scramblemeter/io.hpp"
#include "scramblemeter/lmg.hpp"
#include "scramblemeter/parallel.hpp"
#include "scramblemeter/qecc.hpp"
#include "scramblemeter/scramble.hpp"

namespace sm = scramblemeter;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

struct Common {
    std::uint64_t seed = 42;
    std::optional<unsigned> threads;
    int restarts = 20;
    std::string effects;
};

struct IminArgs {
    std::string isometry;
    sm::Index k = 2;
    std::string out;
};

struct SweepArgs {
    int n = 100;
    std::vector<double> fields;
    double t_max = 20.0;
    double t_step = 0.05;
    std::string out;
};

struct TScrambleArgs {
    std::vector<int> sizes;
    std::vector<double> fields;
    double eps = 0.02;
    double t_max = 20.0;
    double t_step = 0.05;
    std::string out;
    std::string fit_out;
};

struct QeccArgs {
    std::string code;
    int t = 1;
    std::string out;
};

struct HminArgs {
    std::string cq;
    double tol = 1e-8;
    std::string out;
};

/// Flag, then SCRAMBLEMETER_THREADS, then the hardware count.
unsigned resolve_threads(const std::optional<unsigned>& flag) {
    if (flag) {
        if (*flag < 1) throw sm::ValidationError("--threads must be at least 1");
        return *flag;
    }
    if (const char* env = std::getenv("SCRAMBLEMETER_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1) throw sm::ValidationError("SCRAMBLEMETER_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::optional<sm::EffectsRange> parse_effects(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto dots = text.find("..");
    try {
        std::size_t used = 0;
        sm::EffectsRange r;
        if (dots == std::string::npos) {
            r.lo = r.hi = std::stoi(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } else {
            const std::string lo = text.substr(0, dots), hi = text.substr(dots + 2);
            r.lo = std::stoi(lo, &used);
            if (used != lo.size()) throw std::invalid_argument(text);
            r.hi = std::stoi(hi, &used);
            if (used != hi.size()) throw std::invalid_argument(text);
        }
        return r;
    } catch (const std::logic_error&) {
        throw sm::ValidationError("--effects expects LO..HI, e.g. 2..4");
    }
}

sm::SeesawConfig make_config(const Common& c) {
    sm::SeesawConfig cfg;
    cfg.seed = c.seed;
    cfg.restarts = c.restarts;
    cfg.effects_range = parse_effects(c.effects);
    cfg.validate();
    return cfg;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        sm::write_text_file(path, text);
    }
}

int run_imin(const IminArgs& a, const Common& c) {
    const sm::SeesawConfig cfg = make_config(c);
    const sm::Isometry v = sm::isometry_from_json(sm::read_json_file(a.isometry));
    const sm::IminResult r = sm::imin_acc(v, a.k, cfg, sm::thread_runner(resolve_threads(c.threads)));
    std::cout << "imin_bits: " << sm::fixed6(r.value_bits) << '\n'
              << "best_subsystem: " << r.best_subsystem.to_string() << '\n'
              << "best_num_effects: " << r.best_num_effects << '\n'
              << "restarts_agreeing: " << r.restarts_agreeing << '/' << r.restarts << '\n';
    for (const auto& [x, val] : r.per_x_values) std::cout << "  X=" << x << ": " << sm::fixed6(val) << '\n';
    if (r.fragile()) std::cout << "warning: fewer than a quarter of restarts agree; increase --restarts\n";
    if (!a.out.empty()) sm::write_text_file(a.out, sm::imin_report_to_json(r).dump(2) + "\n");
    return 0;
}

int run_sweep(const SweepArgs& a, const Common& c) {
    if (a.fields.empty()) throw sm::ValidationError("--h needs at least one value");
    sm::SeesawConfig cfg = make_config(c);
    const auto runner = sm::thread_runner(resolve_threads(c.threads));
    const auto grid = sm::time_grid(a.t_max, a.t_step);
    std::vector<sm::SweepRecord> rows;
    for (double h : a.fields) {
        const auto series = sm::imin_timeseries(a.n, h, grid, cfg, runner);
        rows.insert(rows.end(), series.begin(), series.end());
    }
    std::ostringstream csv;
    sm::write_sweep_csv(csv, rows);
    emit(a.out, csv.str());
    return 0;
}

int run_tscramble(const TScrambleArgs& a, const Common& c) {
    if (a.fields.empty() || a.sizes.empty()) throw sm::ValidationError("--N-list and --h need at least one value");
    if (!(a.eps > 0.0)) throw sm::ValidationError("--eps must be positive");
    const sm::SeesawConfig cfg = make_config(c);
    const auto grid = sm::time_grid(a.t_max, a.t_step);
    const auto study =
        sm::scrambling_study(a.sizes, a.fields, a.eps, grid, cfg, sm::thread_runner(resolve_threads(c.threads)));
    std::ostringstream times, fits;
    sm::write_scrambling_csv(times, study.times);
    sm::write_fit_csv(fits, study.fits);
    if (a.out.empty() && a.fit_out.empty()) {
        std::cout << times.str() << '\n' << fits.str();
    } else {
        emit(a.out, times.str());
        emit(a.fit_out, fits.str());
    }
    return 0;
}

int run_qecc(const QeccArgs& a, const Common& c) {
    const sm::SeesawConfig cfg = make_config(c);
    const sm::CodeSpec code = sm::builtin_code(a.code);
    const auto report = sm::check_t_scrambler(code, a.t, cfg, sm::thread_runner(resolve_threads(c.threads)));
    double worst = 0.0;
    for (const auto& s : report.subsets) worst = std::max(worst, s.max_deviation);
    std::cout << code.name << " t=" << a.t << ": " << (report.certified ? "certified" : "not certified") << '\n'
              << "max_deviation: " << worst << '\n';
    for (const auto& [k, v] : report.imin_bits_per_k) std::cout << "imin_bits k=" << k << ": " << sm::fixed6(v) << '\n';
    const std::string json = sm::t_scrambler_report_to_json(report).dump(2) + "\n";
    if (!a.out.empty()) sm::write_text_file(a.out, json);
    return 0;
}

int run_hmin(const HminArgs& a) {
    if (!(a.tol > 0.0)) throw sm::ValidationError("--tol must be positive");
    const sm::CqState cq = sm::cq_state_from_json(sm::read_json_file(a.cq));
    const auto h = sm::h_min_cond(cq, a.tol);
    std::cout << "hmin_bits: " << sm::fixed6(h.bits) << '\n'
              << "p_guess: [" << h.p_guess_lower << ", " << h.p_guess_upper << "]\n"
              << "gap: " << h.gap << '\n';
    if (!a.out.empty()) sm::write_text_file(a.out, sm::hmin_report_to_json(h).dump(2) + "\n");
    return 0;
}

void add_engine_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--effects", c.effects, "Effect-count range LO..HI (default depends on k)");
    cmd->add_option("--restarts", c.restarts, "Random restarts per effect count")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "Seed for every random restart");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accessible min-information and information scrambling"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--threads", common.threads, "Worker threads (overrides SCRAMBLEMETER_THREADS)");

    IminArgs imin;
    auto* imin_cmd = app.add_subcommand("imin", "Accessible min-information of an isometry");
    imin_cmd->add_option("--isometry", imin.isometry, "Isometry JSON file")->required();
    imin_cmd->add_option("--k", imin.k, "Observed subsystem dimension")->required();
    imin_cmd->add_option("--out", imin.out, "Write a JSON report here");
    add_engine_flags(imin_cmd, common);

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("lmg-sweep", "Single-spin accessible min-information in the LMG model");
    sweep_cmd->add_option("--N", sweep.n, "Number of spins")->required();
    sweep_cmd->add_option("--h", sweep.fields, "Transverse fields, comma separated")->required()->delimiter(',');
    sweep_cmd->add_option("--t-max", sweep.t_max, "Last time of the grid");
    sweep_cmd->add_option("--t-step", sweep.t_step, "Grid spacing");
    sweep_cmd->add_option("--out", sweep.out, "CSV output (default stdout)");
    add_engine_flags(sweep_cmd, common);

    TScrambleArgs ts;
    auto* ts_cmd = app.add_subcommand("lmg-tscramble", "Scrambling time against chain length");
    ts_cmd->add_option("--N-list", ts.sizes, "Chain lengths, comma separated")->required()->delimiter(',');
    ts_cmd->add_option("--h", ts.fields, "Transverse fields, comma separated")->required()->delimiter(',');
    ts_cmd->add_option("--eps", ts.eps, "Threshold in bits");
    ts_cmd->add_option("--t-max", ts.t_max, "Last time of the grid");
    ts_cmd->add_option("--t-step", ts.t_step, "Grid spacing");
    ts_cmd->add_option("--out", ts.out, "Scrambling-time CSV");
    ts_cmd->add_option("--fit-out", ts.fit_out, "Log-fit CSV");
    add_engine_flags(ts_cmd, common);

    QeccArgs qecc;
    auto* qecc_cmd = app.add_subcommand("qecc", "Perfect t-scrambler check for a built-in code");
    qecc_cmd->add_option("--code", qecc.code, "rep3, code422 or code513")->required();
    qecc_cmd->add_option("--t", qecc.t, "Largest qubit subset size")->required();
    qecc_cmd->add_option("--out", qecc.out, "Write a JSON report here");
    add_engine_flags(qecc_cmd, common);

    HminArgs hmin;
    auto* hmin_cmd = app.add_subcommand("hmin", "Conditional min-entropy of a cq state");
    hmin_cmd->add_option("--cq", hmin.cq, "cq-state JSON file")->required();
    hmin_cmd->add_option("--tol", hmin.tol, "Solver tolerance");
    hmin_cmd->add_option("--out", hmin.out, "Write a JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*imin_cmd) return run_imin(imin, common);
        if (*sweep_cmd) return run_sweep(sweep, common);
        if (*ts_cmd) return run_tscramble(ts, common);
        if (*qecc_cmd) return run_qecc(qecc, common);
        if (*hmin_cmd) return run_hmin(hmin);
    } catch (const sm::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const sm::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const sm::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const sm::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
