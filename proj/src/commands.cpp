#include "adiaqnn/commands.hpp"

#include "adiaqnn/calibrate.hpp"
#include "adiaqnn/gates.hpp"
#include "adiaqnn/output.hpp"
#include "adiaqnn/parallel.hpp"
#include "adiaqnn/spectral.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace adiaqnn {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve_output_dir(const std::optional<fs::path>& cli_out, const ExperimentConfig& cfg) {
    if (cli_out) return *cli_out;
    if (cfg.output_dir) return *cfg.output_dir;
    if (const char* env = std::getenv("ADIAQNN_OUT"); env && *env) return env;
    return "adiaqnn-out";
}

namespace {

RunManifest begin(const std::string& command, const ExperimentConfig& cfg) {
    RunManifest m;
    m.command = command;
    m.version = kVersion;
    m.started = utc_timestamp();
    m.config = cfg.to_json();
    if (!cfg.source.empty()) m.add_input(cfg.source);
    if (cfg.schedule_source != "inline" && fs::exists(cfg.schedule_source)) m.add_input(cfg.schedule_source);
    return m;
}

void finish(RunManifest& m, CommandResult& r) {
    for (const auto& f : r.files) m.add_output(r.out_dir, f);
    m.results = r.summary;
    m.finished = utc_timestamp();
    write_manifest(m, r.out_dir);
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::string pair_name(int lower) { return std::to_string(lower) + "-" + std::to_string(lower + 1); }

AdiabaticityReport bound_for(const ExperimentConfig& cfg, const HamiltonianParams& params) {
    return adiabatic_time_bound(cfg.schedule.schedule, params, cfg.bound_levels, uniform_grid(cfg.bound_grid),
                                cfg.threads);
}

}  // namespace

CommandResult cmd_spectrum(const ExperimentConfig& cfg, const fs::path& out_dir) {
    RunManifest man = begin("spectrum", cfg);
    prepare_dir(out_dir);
    CommandResult r;
    r.out_dir = out_dir;

    TraceOptions opts;
    opts.keep = 0;
    opts.threads = cfg.threads;
    const SpectrumTrace trace = trace_spectrum(cfg.schedule.schedule, cfg.params, uniform_grid(cfg.spectrum_grid), opts);
    const int k = cfg.spectrum_levels;

    std::vector<std::string> head{"s"};
    for (int i = 0; i < k; ++i) head.push_back("E" + std::to_string(i));
    CsvWriter spec(out_dir / "spectrum.csv", head);
    std::vector<std::string> ghead{"s"};
    for (int i = 0; i + 1 < k; ++i) ghead.push_back("gap" + std::to_string(i) + std::to_string(i + 1));
    CsvWriter gaps(out_dir / "gaps.csv", ghead);
    for (const auto& snap : trace.snapshots) {
        spec.cell(snap.s);
        gaps.cell(snap.s);
        for (int i = 0; i < k; ++i) spec.cell(snap.energies(i));
        for (int i = 0; i + 1 < k; ++i) gaps.cell(snap.energies(i + 1) - snap.energies(i));
        spec.end_row();
        gaps.end_row();
    }
    spec.close();
    gaps.close();

    CsvWriter cross(out_dir / "crossings.csv", {"pair", "s_min", "gap_min"});
    json found = json::array();
    if (trace.size() >= 3) {
        for (int i = 0; i + 1 < k; ++i)
            for (const auto& c : detect_avoided_crossings(trace, i)) {
                cross.cell(std::string_view(pair_name(i))).cell(c.s_min).cell(c.gap_min);
                cross.end_row();
                found.push_back({{"pair", pair_name(i)}, {"s_min", c.s_min}, {"gap_min", c.gap_min}, {"boundary", c.boundary}});
            }
    }
    cross.close();
    r.files = {"spectrum.csv", "gaps.csv", "crossings.csv"};
    r.summary = {{"points", trace.size()}, {"levels", k}, {"crossings", found}};
    finish(man, r);
    return r;
}

CommandResult cmd_adiabaticity(const ExperimentConfig& cfg, const fs::path& out_dir) {
    RunManifest man = begin("adiabaticity", cfg);
    prepare_dir(out_dir);
    CommandResult r;
    r.out_dir = out_dir;

    const AdiabaticityReport rep = bound_for(cfg, cfg.params);
    CsvWriter csv(out_dir / "adiabaticity.csv", {"s", "dH_ds_norm", "gap", "ratio"});
    json divergent = json::array();
    for (const auto& p : rep.points) {
        csv.cell(p.s).cell(p.dH_norm).cell(p.gap).cell(p.ratio);
        csv.end_row();
        if (p.divergent) divergent.push_back(p.s);
    }
    csv.close();

    const auto num = [](double x) { return std::isfinite(x) ? json(x) : json(format_number(x)); };
    json summary = {{"levels", rep.levels},
                    {"T_bound", num(rep.T_bound)},
                    {"recommended_T", num(100.0 * rep.T_bound)},
                    {"s_at_bound", rep.s_at_bound},
                    {"min_gap", rep.min_gap},
                    {"s_min_gap", rep.s_min_gap},
                    {"divergent", rep.divergent},
                    {"divergent_points", divergent},
                    {"units", "T in hbar/lambda, energies in lambda"}};
    {
        std::ofstream out(out_dir / "adiabaticity_summary.json", std::ios::binary | std::ios::trunc);
        out << summary.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write adiabaticity_summary.json");
    }
    if (rep.divergent) std::cerr << "warning: zero gap on the grid, adiabatic bound diverges\n";
    r.files = {"adiabaticity.csv", "adiabaticity_summary.json"};
    r.summary = summary;
    finish(man, r);
    return r;
}

CommandResult cmd_fidelity(const ExperimentConfig& cfg, const fs::path& out_dir) {
    RunManifest man = begin("fidelity", cfg);
    const GateSpec gate = GateSpec::by_name(cfg.gate);

    double T = 0.0;
    json timing;
    if (cfg.T) {
        T = *cfg.T;
        timing["T"] = T;
    } else {
        const AdiabaticityReport rep = bound_for(cfg, cfg.params);
        if (rep.divergent) throw NumericalError("adiabatic bound diverges (zero gap); give time.T explicitly");
        T = *cfg.T_multiplier * rep.T_bound;
        timing = {{"T", T}, {"T_bound", rep.T_bound}, {"multiplier", *cfg.T_multiplier}, {"levels", rep.levels}};
    }

    struct Point {
        double r2, r3;
    };
    std::vector<Point> points;
    for (double r2 : cfg.r2_values)
        for (double r3 : cfg.r3_values) points.push_back({r2, r3});

    const std::vector<double> samples = uniform_grid(cfg.samples);
    std::vector<GateExperiment> runs(points.size());
    parallel_for(points.size(), cfg.threads, [&](std::size_t k) {
        HamiltonianParams p = cfg.params;
        p.r2 = points[k].r2;
        p.r3 = points[k].r3;
        runs[k] = run_gate_experiment(gate, cfg.schedule.schedule, p, cfg.epsilons, T, cfg.integrator, samples);
    });

    prepare_dir(out_dir);
    CommandResult r;
    r.out_dir = out_dir;
    CsvWriter fid(out_dir / "fidelity.csv", {"s", "t_over_T", "fidelity", "gate", "r3", "epsilon", "classical_limit"});
    std::vector<std::string> phead{"r2", "r3", "epsilon", "peak_fidelity", "peak_s", "classical_limit"};
    if (cfg.mc_samples > 0) {
        phead.push_back("mc_fidelity");
        phead.push_back("mc_std_error");
    }
    CsvWriter peaks(out_dir / "peaks.csv", phead);
    json runs_json = json::array();
    std::size_t stream = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const GateExperiment& ex = runs[k];
        for (std::size_t e = 0; e < ex.traces.size(); ++e) {
            const FidelityTrace& tr = ex.traces[e];
            for (const auto& smp : tr.samples) {
                fid.cell(smp.s).cell(smp.s).cell(smp.fidelity).cell(std::string_view(tr.gate)).cell(tr.r3).cell(tr.epsilon).cell(tr.classical_limit);
                fid.end_row();
            }
            const FidelitySample pk = tr.peak();
            peaks.cell(tr.r2).cell(tr.r3).cell(tr.epsilon).cell(pk.fidelity).cell(pk.s).cell(tr.classical_limit);
            if (cfg.mc_samples > 0) {
                const auto it = std::find_if(tr.samples.begin(), tr.samples.end(),
                                             [&](const FidelitySample& x) { return x.s == pk.s; });
                const std::size_t idx = static_cast<std::size_t>(it - tr.samples.begin());
                const McEstimate mc = gate_fidelity_mc(ex.evolved_basis(idx, tr.epsilon), gate, cfg.mc_samples,
                                                       cfg.seed + 0x9E3779B97F4A7C15ull * (++stream), cfg.threads);
                peaks.cell(mc.mean).cell(mc.std_error);
            }
            peaks.end_row();
        }
        runs_json.push_back({{"r2", points[k].r2},
                             {"r3", points[k].r3},
                             {"steps", ex.evolution.steps},
                             {"convergence", ex.evolution.convergence},
                             {"reduced_basis", ex.evolution.reduced}});
    }
    fid.close();
    peaks.close();
    r.files = {"fidelity.csv", "peaks.csv"};
    r.summary = {{"gate", gate.name}, {"timing", timing}, {"runs", runs_json}};
    finish(man, r);
    return r;
}

CommandResult cmd_calibrate(const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (!cfg.calibration)
        throw ConfigError(ConfigErrorKind::missing_field, "calibration", "config field 'calibration': required for calibrate");
    RunManifest man = begin("calibrate", cfg);
    const CalibrationSettings& cs = *cfg.calibration;

    EvaluatorSettings es;
    for (const auto& g : cs.gates) es.gates.push_back(GateSpec::by_name(g));
    es.T_multiplier = cfg.T_multiplier.value_or(100.0);
    es.fixed_T = cfg.T;
    es.bound_levels = cfg.bound_levels;
    es.bound_grid = cfg.bound_grid;
    es.samples = cfg.samples;
    es.integrator = cfg.integrator;
    const CandidateEvaluator eval = gate_peak_evaluator(cfg.params, es);

    CommandResult r;
    CalibrationResult res;
    try {
        res = calibrate(cfg.schedule.schedule, cs.space, cs.budget, eval, cs.name, cfg.threads);
    } catch (const CalibrationFailedError& e) {
        res = e.result();
        r.code = ExitCode::calibration_failed;
    }

    prepare_dir(out_dir);
    r.out_dir = out_dir;
    const std::string preset_file = cs.name + ".json";
    {
        std::ofstream out(out_dir / preset_file, std::ios::binary | std::ios::trunc);
        out << preset_to_json(res.best).dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write " + preset_file);
    }
    std::vector<std::string> head{"rank", "a_max", "b_max", "interior_a", "objective", "beats_classical",
                                  "min_gap", "T_bound", "T"};
    for (const auto& g : cs.gates) {
        head.push_back("peak_" + g);
        head.push_back("s_peak_" + g);
    }
    CsvWriter rep(out_dir / "calibration_report.csv", head);
    long long rank = 0;
    for (const auto& c : res.candidates) {
        rep.cell(++rank).cell(c.params.a_max).cell(c.params.b_max);
        if (c.params.interior_a) rep.cell(*c.params.interior_a);
        else rep.cell(std::string_view(""));
        rep.cell(c.objective).cell(static_cast<long long>(c.beats_classical)).cell(c.metrics.min_gap)
            .cell(c.metrics.T_bound).cell(c.metrics.T);
        for (std::size_t g = 0; g < cs.gates.size(); ++g) {
            if (g < c.metrics.peaks.size()) rep.cell(c.metrics.peaks[g].peak).cell(c.metrics.peaks[g].s_peak);
            else rep.cell(std::string_view("")).cell(std::string_view(""));
        }
        rep.end_row();
    }
    rep.close();
    r.files = {preset_file, "calibration_report.csv"};
    r.summary = {{"success", res.success}, {"candidates", res.candidates.size()}, {"best", preset_to_json(res.best)}};
    finish(man, r);
    return r;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Exact simulator of the eight-ion adiabatic quantum neural network"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    const std::vector<std::string> names{"spectrum", "fidelity", "adiabaticity", "calibrate"};
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--out", out, "output directory (default: config output_dir, $ADIAQNN_OUT, ./adiaqnn-out)");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    }
    CLI::App* verify = app.add_subcommand("verify", "check output files against manifest.json");
    std::string verify_dir;
    verify->add_option("dir", verify_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::config_error);
    }

    try {
        if (verify->parsed()) {
            const auto problems = verify_manifest(verify_dir);
            for (const auto& p : problems) std::cerr << p << '\n';
            if (problems.empty()) std::cout << "all outputs match manifest.json\n";
            return problems.empty() ? 0 : 1;
        }
        ExperimentConfig cfg = parse_config(config_path);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        const fs::path dir = resolve_output_dir(out ? std::optional<fs::path>(*out) : std::nullopt, cfg);

        CommandResult r;
        if (app.got_subcommand("spectrum")) r = cmd_spectrum(cfg, dir);
        else if (app.got_subcommand("fidelity")) r = cmd_fidelity(cfg, dir);
        else if (app.got_subcommand("adiabaticity")) r = cmd_adiabaticity(cfg, dir);
        else r = cmd_calibrate(cfg, dir);

        std::cout << r.summary.dump(2) << '\n';
        for (const auto& f : r.files) std::cout << "wrote " << (r.out_dir / f).string() << '\n';
        if (r.code == ExitCode::calibration_failed)
            std::cerr << "calibration failed: no candidate beats the classical limit; best attempt written\n";
        return static_cast<int>(r.code);
    } catch (const ConfigError& e) {
        std::cerr << "config error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return static_cast<int>(ExitCode::config_error);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace adiaqnn
