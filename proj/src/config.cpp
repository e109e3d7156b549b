#include "adiaqnn/config.hpp"

#include "adiaqnn/errors.hpp"
#include "adiaqnn/gates.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace adiaqnn {

using nlohmann::json;

const char* to_string(ConfigErrorKind kind) noexcept {
    switch (kind) {
        case ConfigErrorKind::file_not_found: return "file-not-found";
        case ConfigErrorKind::malformed_json: return "malformed-json";
        case ConfigErrorKind::missing_field: return "missing-field";
        case ConfigErrorKind::invalid_value: return "invalid-value";
        case ConfigErrorKind::conflicting_fields: return "conflicting-fields";
        case ConfigErrorKind::unknown_field: return "unknown-field";
    }
    return "unknown";
}

namespace {

[[noreturn]] void fail(ConfigErrorKind kind, const std::string& field, const std::string& msg) {
    throw ConfigError(kind, field, "config field '" + field + "': " + msg);
}

void allow_only(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) fail(ConfigErrorKind::unknown_field, where.empty() ? k : where + "." + k, "unknown field");
}

const json& require_object(const json& j, const std::string& field) {
    if (!j.is_object()) fail(ConfigErrorKind::invalid_value, field, "expected an object");
    return j;
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(ConfigErrorKind::invalid_value, field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ConfigErrorKind::invalid_value, field, "must be finite");
    return v;
}

double non_negative(const json& j, const std::string& field) {
    const double v = number(j, field);
    if (v < 0.0) fail(ConfigErrorKind::invalid_value, field, "must be >= 0 (got " + j.dump() + ")");
    return v;
}

double positive(const json& j, const std::string& field) {
    const double v = number(j, field);
    if (!(v > 0.0)) fail(ConfigErrorKind::invalid_value, field, "must be > 0 (got " + j.dump() + ")");
    return v;
}

std::uint64_t integer(const json& j, const std::string& field, std::uint64_t min_value = 0) {
    if (!j.is_number_integer()) fail(ConfigErrorKind::invalid_value, field, "expected an integer");
    if (j.is_number_unsigned()) {
        const auto v = j.get<std::uint64_t>();
        if (v < min_value) fail(ConfigErrorKind::invalid_value, field, "must be >= " + std::to_string(min_value));
        return v;
    }
    const auto v = j.get<std::int64_t>();
    if (v < 0 || static_cast<std::uint64_t>(v) < min_value)
        fail(ConfigErrorKind::invalid_value, field, "must be >= " + std::to_string(min_value));
    return static_cast<std::uint64_t>(v);
}

// number, list of numbers, or the string "sweep" (default grid)
std::vector<double> value_list(const json& j, const std::string& field, const std::vector<double>& sweep) {
    std::vector<double> out;
    if (j.is_string()) {
        if (j.get<std::string>() != "sweep") fail(ConfigErrorKind::invalid_value, field, "expected a number, list or \"sweep\"");
        out = sweep;
    } else if (j.is_array()) {
        if (j.empty()) fail(ConfigErrorKind::invalid_value, field, "list must not be empty");
        for (std::size_t k = 0; k < j.size(); ++k) out.push_back(non_negative(j[k], field + "[" + std::to_string(k) + "]"));
    } else {
        out.push_back(non_negative(j, field));
    }
    return out;
}

std::vector<double> number_list(const json& j, const std::string& field) {
    if (!j.is_array()) fail(ConfigErrorKind::invalid_value, field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], field + "[" + std::to_string(k) + "]"));
    return out;
}

std::vector<ScheduleNode> parse_nodes(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() < 2) fail(ConfigErrorKind::invalid_value, field, "expected a list of at least two nodes");
    std::vector<ScheduleNode> nodes;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string f = field + "[" + std::to_string(k) + "]";
        const json& n = j[k];
        if (n.is_array()) {
            if (n.size() != 3) fail(ConfigErrorKind::invalid_value, f, "node arrays are [s, A, B]");
            nodes.push_back({number(n[0], f + ".s"), number(n[1], f + ".A"), number(n[2], f + ".B")});
        } else if (n.is_object()) {
            allow_only(n, f, {"s", "A", "B"});
            for (const char* key : {"s", "A", "B"})
                if (!n.contains(key)) fail(ConfigErrorKind::missing_field, f + "." + key, "required");
            nodes.push_back({number(n["s"], f + ".s"), number(n["A"], f + ".A"), number(n["B"], f + ".B")});
        } else {
            fail(ConfigErrorKind::invalid_value, f, "node must be [s, A, B] or {s, A, B}");
        }
    }
    return nodes;
}

json read_json_file(const std::filesystem::path& path, const std::string& field) {
    std::ifstream in(path);
    if (!in) fail(ConfigErrorKind::file_not_found, field, "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ConfigErrorKind::malformed_json, field, "'" + path.string() + "': " + e.what());
    }
}

SchedulePreset parse_schedule(const json& j, const std::filesystem::path& base_dir, std::string& source) {
    try {
        if (j.is_string()) {
            source = j.get<std::string>();
            return preset_by_name(source);
        }
        require_object(j, "schedule");
        allow_only(j, "schedule", {"preset", "nodes", "file", "ratio1", "ratio2"});
        const int kinds = int(j.contains("preset")) + int(j.contains("nodes")) + int(j.contains("file"));
        if (kinds != 1)
            fail(ConfigErrorKind::conflicting_fields, "schedule", "give exactly one of preset, nodes, file");
        SchedulePreset p;
        if (j.contains("preset")) {
            if (!j["preset"].is_string()) fail(ConfigErrorKind::invalid_value, "schedule.preset", "expected a string");
            source = j["preset"].get<std::string>();
            p = preset_by_name(source);
        } else if (j.contains("file")) {
            if (!j["file"].is_string()) fail(ConfigErrorKind::invalid_value, "schedule.file", "expected a path");
            std::filesystem::path f = j["file"].get<std::string>();
            if (f.is_relative()) f = base_dir / f;
            source = f.string();
            p = preset_from_json(read_json_file(f, "schedule.file"));
        } else {
            source = "inline";
            p.name = "inline";
            p.schedule = FieldSchedule(parse_nodes(j["nodes"], "schedule.nodes"));
        }
        const double r1 = j.contains("ratio1") ? number(j["ratio1"], "schedule.ratio1") : p.schedule.ratio1();
        const double r2 = j.contains("ratio2") ? number(j["ratio2"], "schedule.ratio2") : p.schedule.ratio2();
        p.schedule = FieldSchedule(p.schedule.nodes(), r1, r2);
        return p;
    } catch (const std::invalid_argument& e) {
        fail(ConfigErrorKind::invalid_value, "schedule", e.what());
    }
}

std::vector<int> parse_levels(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) fail(ConfigErrorKind::invalid_value, field, "expected a non-empty list of levels");
    std::vector<int> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto v = integer(j[k], field + "[" + std::to_string(k) + "]");
        if (v >= static_cast<std::uint64_t>(kDim)) fail(ConfigErrorKind::invalid_value, field, "level index out of range");
        out.push_back(static_cast<int>(v));
        if (k > 0 && out[k] != out[k - 1] + 1) fail(ConfigErrorKind::invalid_value, field, "levels must be contiguous and ascending");
    }
    return out;
}

}  // namespace

std::vector<double> default_r3_sweep(double r1) {
    std::vector<double> v;
    for (int k = 0; k <= 9; ++k) v.push_back(r1 * k / 10.0);
    return v;
}

std::vector<double> default_epsilon_sweep() {
    std::vector<double> v;
    for (int k = 0; k <= 6; ++k) v.push_back(k * 0.05);
    return v;
}

std::vector<double> default_r2_sweep() {
    std::vector<double> v;
    for (int k = 0; k <= 5; ++k) v.push_back(k / 10.0);
    return v;
}

json preset_to_json(const SchedulePreset& p) {
    json nodes = json::array();
    for (const auto& n : p.schedule.nodes()) nodes.push_back({{"s", n.s}, {"A", n.A}, {"B", n.B}});
    json j = {{"name", p.name}, {"ratio1", p.schedule.ratio1()}, {"ratio2", p.schedule.ratio2()}, {"nodes", nodes}};
    if (p.s_H) j["s_H"] = *p.s_H;
    if (p.s_Bell) j["s_Bell"] = *p.s_Bell;
    if (!p.metrics.empty()) j["metrics"] = p.metrics;
    return j;
}

SchedulePreset preset_from_json(const json& j) {
    require_object(j, "preset");
    allow_only(j, "preset", {"name", "ratio1", "ratio2", "nodes", "s_H", "s_Bell", "metrics"});
    if (!j.contains("nodes")) fail(ConfigErrorKind::missing_field, "preset.nodes", "required");
    SchedulePreset p;
    p.name = j.value("name", std::string("unnamed"));
    const double r1 = j.contains("ratio1") ? number(j["ratio1"], "preset.ratio1") : 1e-5;
    const double r2 = j.contains("ratio2") ? number(j["ratio2"], "preset.ratio2") : 1e-6;
    try {
        p.schedule = FieldSchedule(parse_nodes(j["nodes"], "preset.nodes"), r1, r2);
    } catch (const std::invalid_argument& e) {
        fail(ConfigErrorKind::invalid_value, "preset.nodes", e.what());
    }
    if (j.contains("s_H")) p.s_H = number(j["s_H"], "preset.s_H");
    if (j.contains("s_Bell")) p.s_Bell = number(j["s_Bell"], "preset.s_Bell");
    if (j.contains("metrics")) {
        require_object(j["metrics"], "preset.metrics");
        for (const auto& [k, v] : j["metrics"].items()) p.metrics[k] = number(v, "preset.metrics." + k);
    }
    return p;
}

SchedulePreset load_preset(const std::filesystem::path& path) { return preset_from_json(read_json_file(path, "preset")); }

ExperimentConfig parse_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        fail(ConfigErrorKind::file_not_found, "config", "file '" + path.string() + "' does not exist");
    json j;
    {
        std::ifstream in(path);
        if (!in) fail(ConfigErrorKind::file_not_found, "config", "cannot open '" + path.string() + "'");
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            fail(ConfigErrorKind::malformed_json, "config", e.what());
        }
    }
    ExperimentConfig cfg = parse_config_json(j, path.parent_path());
    cfg.source = path;
    return cfg;
}

ExperimentConfig parse_config_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) fail(ConfigErrorKind::invalid_value, "config", "top level must be an object");
    allow_only(j, "", {"trap", "couplings", "lambda", "r3_symmetric", "schedule", "gate", "noise", "time",
                       "integrator", "samples", "spectrum", "adiabaticity", "calibration", "monte_carlo",
                       "output_dir", "seed", "threads"});
    ExperimentConfig c;

    if (j.contains("trap") && j.contains("couplings"))
        fail(ConfigErrorKind::conflicting_fields, "couplings", "give either a trap preset or explicit couplings, not both");
    if (j.contains("couplings")) {
        const json& k = require_object(j["couplings"], "couplings");
        allow_only(k, "couplings", {"r1", "r2", "r3"});
        for (const char* key : {"r1", "r2"})
            if (!k.contains(key)) fail(ConfigErrorKind::missing_field, std::string("couplings.") + key, "required");
        c.trap = "explicit";
        c.params.r1 = non_negative(k["r1"], "couplings.r1");
        c.params.r2 = non_negative(k["r2"], "couplings.r2");
        c.params.r3 = k.contains("r3") ? non_negative(k["r3"], "couplings.r3") : 0.0;
    } else {
        if (j.contains("trap") && !j["trap"].is_string()) fail(ConfigErrorKind::invalid_value, "trap", "expected a preset name");
        c.trap = j.value("trap", std::string("fountain"));
        try {
            const TrapPreset t = TrapPreset::by_name(c.trap);
            c.params = t.params();
        } catch (const std::invalid_argument& e) {
            fail(ConfigErrorKind::invalid_value, "trap", e.what());
        }
    }
    if (j.contains("lambda")) c.params.lambda = positive(j["lambda"], "lambda");
    if (j.contains("r3_symmetric")) {
        if (!j["r3_symmetric"].is_boolean()) fail(ConfigErrorKind::invalid_value, "r3_symmetric", "expected true or false");
        c.params.r3_symmetric = j["r3_symmetric"].get<bool>();
    }

    if (j.contains("schedule"))
        c.schedule = parse_schedule(j["schedule"], base_dir, c.schedule_source);
    else
        c.schedule = fountain_default_preset();

    if (j.contains("gate")) {
        if (!j["gate"].is_string()) fail(ConfigErrorKind::invalid_value, "gate", "expected \"h\" or \"bell\"");
        c.gate = j["gate"].get<std::string>();
        if (c.gate != "h" && c.gate != "bell") fail(ConfigErrorKind::invalid_value, "gate", "expected \"h\" or \"bell\"");
    }

    c.r3_values = {c.params.r3};
    c.r2_values = {c.params.r2};
    if (j.contains("noise")) {
        const json& n = require_object(j["noise"], "noise");
        allow_only(n, "noise", {"epsilon", "r3", "r2"});
        if (n.contains("epsilon")) c.epsilons = value_list(n["epsilon"], "noise.epsilon", default_epsilon_sweep());
        if (n.contains("r3")) {
            if (j.contains("couplings") && j["couplings"].contains("r3"))
                fail(ConfigErrorKind::conflicting_fields, "noise.r3", "r3 is already set in couplings");
            c.r3_values = value_list(n["r3"], "noise.r3", default_r3_sweep(c.params.r1));
        }
        if (n.contains("r2")) {
            if (j.contains("couplings"))
                fail(ConfigErrorKind::conflicting_fields, "noise.r2", "r2 is already set in couplings");
            c.r2_values = value_list(n["r2"], "noise.r2", default_r2_sweep());
        }
    }
    c.params.r3 = c.r3_values.front();
    c.params.r2 = c.r2_values.front();

    if (j.contains("time")) {
        const json& t = require_object(j["time"], "time");
        allow_only(t, "time", {"T", "multiplier"});
        if (t.contains("T") == t.contains("multiplier"))
            fail(ConfigErrorKind::conflicting_fields, "time", "give exactly one of T and multiplier");
        if (t.contains("T")) c.T = non_negative(t["T"], "time.T");
        else c.T_multiplier = positive(t["multiplier"], "time.multiplier");
    } else {
        c.T_multiplier = 100.0;
    }

    if (j.contains("integrator")) {
        const json& g = require_object(j["integrator"], "integrator");
        allow_only(g, "integrator", {"initial_steps", "refinement_factor", "tol", "max_steps"});
        if (g.contains("initial_steps")) c.integrator.initial_steps = integer(g["initial_steps"], "integrator.initial_steps", 2);
        if (g.contains("refinement_factor")) c.integrator.refinement_factor = integer(g["refinement_factor"], "integrator.refinement_factor", 2);
        if (g.contains("tol")) c.integrator.tol = positive(g["tol"], "integrator.tol");
        if (g.contains("max_steps")) c.integrator.max_steps = integer(g["max_steps"], "integrator.max_steps", 2);
        try {
            c.integrator.validate();
        } catch (const std::invalid_argument& e) {
            fail(ConfigErrorKind::invalid_value, "integrator", e.what());
        }
    }
    if (j.contains("samples")) c.samples = integer(j["samples"], "samples", 2);

    if (j.contains("spectrum")) {
        const json& s = require_object(j["spectrum"], "spectrum");
        allow_only(s, "spectrum", {"grid", "levels"});
        if (s.contains("grid")) c.spectrum_grid = integer(s["grid"], "spectrum.grid", 1);
        if (s.contains("levels")) {
            c.spectrum_levels = static_cast<int>(integer(s["levels"], "spectrum.levels", 2));
            if (c.spectrum_levels > kDim) fail(ConfigErrorKind::invalid_value, "spectrum.levels", "at most 256 levels");
        }
    }

    c.bound_levels = c.gate == "h" ? std::vector<int>{0, 1} : std::vector<int>{0, 1, 2, 3};
    if (j.contains("adiabaticity")) {
        const json& a = require_object(j["adiabaticity"], "adiabaticity");
        allow_only(a, "adiabaticity", {"levels", "grid"});
        if (a.contains("levels")) c.bound_levels = parse_levels(a["levels"], "adiabaticity.levels");
        if (a.contains("grid")) c.bound_grid = integer(a["grid"], "adiabaticity.grid", 1);
    }

    if (j.contains("calibration")) {
        const json& k = require_object(j["calibration"], "calibration");
        allow_only(k, "calibration", {"a_max", "b_max", "interior_node", "interior_a", "budget", "gates", "name"});
        CalibrationSettings cs;
        if (k.contains("a_max")) cs.space.a_max = number_list(k["a_max"], "calibration.a_max");
        if (k.contains("b_max")) cs.space.b_max = number_list(k["b_max"], "calibration.b_max");
        if (k.contains("interior_node") != k.contains("interior_a"))
            fail(ConfigErrorKind::missing_field, "calibration.interior_a", "interior_node and interior_a go together");
        if (k.contains("interior_node")) {
            cs.space.interior_node = integer(k["interior_node"], "calibration.interior_node", 1);
            if (*cs.space.interior_node + 1 >= c.schedule.schedule.nodes().size())
                fail(ConfigErrorKind::invalid_value, "calibration.interior_node", "must index an interior node");
            cs.space.interior_a = number_list(k["interior_a"], "calibration.interior_a");
        }
        std::size_t grid = std::max<std::size_t>(1, cs.space.a_max.size()) * std::max<std::size_t>(1, cs.space.b_max.size()) *
                           std::max<std::size_t>(1, cs.space.interior_a.size()) + 1;
        cs.budget = k.contains("budget") ? integer(k["budget"], "calibration.budget", 1) : grid;
        if (k.contains("gates")) {
            if (!k["gates"].is_array() || k["gates"].empty())
                fail(ConfigErrorKind::invalid_value, "calibration.gates", "expected a non-empty list");
            for (const auto& g : k["gates"]) {
                if (!g.is_string() || (g != "h" && g != "bell"))
                    fail(ConfigErrorKind::invalid_value, "calibration.gates", "entries must be \"h\" or \"bell\"");
                cs.gates.push_back(g.get<std::string>());
            }
        } else {
            cs.gates = {c.gate};
        }
        if (k.contains("name")) {
            if (!k["name"].is_string() || k["name"].get<std::string>().empty())
                fail(ConfigErrorKind::invalid_value, "calibration.name", "expected a non-empty string");
            cs.name = k["name"].get<std::string>();
        }
        c.calibration = cs;
    }

    if (j.contains("monte_carlo")) {
        const json& m = require_object(j["monte_carlo"], "monte_carlo");
        allow_only(m, "monte_carlo", {"samples"});
        if (m.contains("samples")) c.mc_samples = integer(m["samples"], "monte_carlo.samples");
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) fail(ConfigErrorKind::invalid_value, "output_dir", "expected a path");
        std::filesystem::path p = j["output_dir"].get<std::string>();
        c.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (j.contains("seed")) c.seed = integer(j["seed"], "seed");
    if (j.contains("threads")) c.threads = static_cast<unsigned>(integer(j["threads"], "threads", 1));

    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        fail(ConfigErrorKind::invalid_value, "couplings", e.what());
    }
    return c;
}

json ExperimentConfig::to_json() const {
    json j;
    if (trap == "explicit")
        j["couplings"] = {{"r1", params.r1}, {"r2", params.r2}};
    else
        j["trap"] = trap;
    j["lambda"] = params.lambda;
    j["r3_symmetric"] = params.r3_symmetric;
    json sched = preset_to_json(schedule);
    j["schedule"] = {{"nodes", sched["nodes"]}, {"ratio1", sched["ratio1"]}, {"ratio2", sched["ratio2"]}};
    j["gate"] = gate;
    json noise = {{"epsilon", epsilons}, {"r3", r3_values}};
    if (trap != "explicit") noise["r2"] = r2_values;
    j["noise"] = noise;
    if (T) j["time"] = {{"T", *T}};
    else j["time"] = {{"multiplier", T_multiplier.value_or(100.0)}};
    j["integrator"] = {{"initial_steps", integrator.initial_steps}, {"refinement_factor", integrator.refinement_factor},
                       {"tol", integrator.tol}, {"max_steps", integrator.max_steps}};
    j["samples"] = samples;
    j["spectrum"] = {{"grid", spectrum_grid}, {"levels", spectrum_levels}};
    j["adiabaticity"] = {{"levels", bound_levels}, {"grid", bound_grid}};
    if (calibration) {
        json k = {{"budget", calibration->budget}, {"gates", calibration->gates}, {"name", calibration->name}};
        if (!calibration->space.a_max.empty()) k["a_max"] = calibration->space.a_max;
        if (!calibration->space.b_max.empty()) k["b_max"] = calibration->space.b_max;
        if (calibration->space.interior_node) {
            k["interior_node"] = *calibration->space.interior_node;
            k["interior_a"] = calibration->space.interior_a;
        }
        j["calibration"] = k;
    }
    j["monte_carlo"] = {{"samples", mc_samples}};
    if (output_dir) j["output_dir"] = output_dir->string();
    j["seed"] = seed;
    j["threads"] = threads;
    return j;
}

}  // namespace adiaqnn
