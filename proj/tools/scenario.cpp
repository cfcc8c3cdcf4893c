#include "scenario.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

/* Strict walk: every present key must be in the allowed set. */
void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
    if (!j.is_object()) throw SchemaError("'" + path + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw SchemaError("unknown key '" + join(path, it.key()) + "'");
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  bool required, double dflt = 0) {
    if (!j.contains(key)) {
        if (required) throw SchemaError("missing key '" + join(path, key) + "'");
        return dflt;
    }
    const json& v = j.at(key);
    if (!v.is_number()) throw SchemaError("'" + join(path, key) + "' must be a number");
    return v.get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key,
            bool required, int dflt = 0) {
    if (!j.contains(key)) {
        if (required) throw SchemaError("missing key '" + join(path, key) + "'");
        return dflt;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw SchemaError("'" + join(path, key) + "' must be an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       bool required, const std::string& dflt = "") {
    if (!j.contains(key)) {
        if (required) throw SchemaError("missing key '" + join(path, key) + "'");
        return dflt;
    }
    const json& v = j.at(key);
    if (!v.is_string()) throw SchemaError("'" + join(path, key) + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> get_number_list(const json& j, const std::string& path,
                                    const std::string& key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    const json& v = j.at(key);
    if (!v.is_array())
        throw SchemaError("'" + join(path, key) + "' must be an array of numbers");
    for (const json& e : v) {
        if (!e.is_number())
            throw SchemaError("'" + join(path, key) + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

bool parse_scale(const json& j, const std::string& path) {
    std::string s = get_string(j, path, "scale", false, "linear");
    if (s == "linear") return false;
    if (s == "log") return true;
    throw SchemaError("'" + join(path, "scale") + "' must be \"linear\" or \"log\"");
}

AxisConfig parse_axis(const json& j, const std::string& path, bool named) {
    std::set<std::string> allowed{"min", "max", "n", "scale"};
    if (named) allowed.insert("name");
    reject_unknown(j, path, allowed);
    AxisConfig ax;
    if (named) ax.name = get_string(j, path, "name", true);
    ax.min = get_number(j, path, "min", true);
    ax.max = get_number(j, path, "max", true);
    ax.n = get_int(j, path, "n", true);
    ax.log_scale = parse_scale(j, path);
    if (ax.n < 1) throw SchemaError("'" + join(path, "n") + "' must be at least 1");
    if (!(ax.min <= ax.max))
        throw SchemaError("'" + join(path, "min") + "' must not exceed max");
    if (ax.log_scale && !(ax.min > 0))
        throw SchemaError("'" + join(path, "min") + "' must be positive on a log scale");
    return ax;
}

PolicyConfig parse_policy(const json& j, const std::string& path, bool with_label) {
    std::set<std::string> allowed{"family", "Sigma"};
    if (with_label) allowed.insert("label");
    PolicyConfig pc;
    pc.family = get_string(j, path, "family", true);
    if (pc.family == "constant") {
        allowed.insert("omega0");
    } else if (pc.family == "monotone_exp") {
        allowed.insert("a");
    } else if (pc.family == "peaked") {
        allowed.insert("a");
        allowed.insert("d");
    } else {
        throw SchemaError("'" + join(path, "family") +
                          "' must be \"constant\", \"monotone_exp\" or \"peaked\"");
    }
    reject_unknown(j, path, allowed);
    pc.Sigma = get_number(j, path, "Sigma", true);
    if (pc.family == "constant") pc.omega0 = get_number(j, path, "omega0", true);
    if (pc.family == "monotone_exp" || pc.family == "peaked")
        pc.a = get_number(j, path, "a", true);
    if (pc.family == "peaked") pc.d = get_number(j, path, "d", true);
    if (with_label) pc.label = get_string(j, path, "label", true);
    return pc;
}

Scenario parse_scenario(const json& j, const std::string& path) {
    reject_unknown(j, path,
                   {"params", "policy", "simulation", "sweep", "bifurcation", "curves",
                    "markers", "note"});
    Scenario sc;
    sc.note = get_string(j, path, "note", false);

    {
        json params = j.contains("params") ? j.at("params") : json::object();
        std::string p = join(path, "params");
        reject_unknown(params, p, {"R0", "v", "h", "epsilon"});
        sc.R0 = get_number(params, p, "R0", false, 4);
        sc.v = get_number(params, p, "v", false, 50);
        sc.h = get_number(params, p, "h", true);
        sc.epsilon = get_number(params, p, "epsilon", false, 5e-4);
    }

    if (!j.contains("policy")) throw SchemaError("missing key '" + join(path, "policy") + "'");
    sc.policy = parse_policy(j.at("policy"), join(path, "policy"), false);

    if (j.contains("simulation")) {
        sc.has_simulation = true;
        const json& sim = j.at("simulation");
        std::string p = join(path, "simulation");
        reject_unknown(sim, p, {"T_end", "rtol", "atol", "record_stride", "initial"});
        sc.T_end = get_number(sim, p, "T_end", false, 10);
        sc.rtol = get_number(sim, p, "rtol", false, 1e-8);
        sc.atol = get_number(sim, p, "atol", false, 1e-10);
        sc.record_stride = get_number(sim, p, "record_stride", false, 1e-3);
        if (!sim.contains("initial"))
            throw SchemaError("missing key '" + join(p, "initial") + "'");
        const json& init = sim.at("initial");
        if (init.is_string()) {
            if (init.get<std::string>() != "near_ede")
                throw SchemaError("'" + join(p, "initial") +
                                  "' string form must be \"near_ede\"");
            sc.near_ede = true;
        } else if (init.is_array() && init.size() == 6) {
            for (int i = 0; i < 6; ++i) {
                if (!init[i].is_number())
                    throw SchemaError("'" + join(p, "initial") +
                                      "' entries must be numbers");
                sc.initial[(size_t)i] = init[i].get<double>();
            }
        } else {
            throw SchemaError("'" + join(p, "initial") +
                              "' must be \"near_ede\" or an array of 6 numbers");
        }
    }

    if (j.contains("sweep")) {
        sc.has_sweep = true;
        const json& sw = j.at("sweep");
        std::string p = join(path, "sweep");
        reject_unknown(sw, p, {"axis1", "axis2", "level_values"});
        if (!sw.contains("axis1"))
            throw SchemaError("missing key '" + join(p, "axis1") + "'");
        if (!sw.contains("axis2"))
            throw SchemaError("missing key '" + join(p, "axis2") + "'");
        sc.axis1 = parse_axis(sw.at("axis1"), join(p, "axis1"), true);
        sc.axis2 = parse_axis(sw.at("axis2"), join(p, "axis2"), true);
        sc.level_values = get_number_list(sw, p, "level_values");
    }

    if (j.contains("bifurcation")) {
        sc.has_bifurcation = true;
        const json& bf = j.at("bifurcation");
        std::string p = join(path, "bifurcation");
        reject_unknown(bf, p, {"a_grid", "d_grid", "a_values", "curve_n", "level_values"});
        if (bf.contains("a_grid"))
            sc.a_grid = parse_axis(bf.at("a_grid"), join(p, "a_grid"), false);
        if (bf.contains("d_grid"))
            sc.d_grid = parse_axis(bf.at("d_grid"), join(p, "d_grid"), false);
        sc.a_values = get_number_list(bf, p, "a_values");
        sc.curve_n = get_int(bf, p, "curve_n", false, 256);
        if (sc.curve_n < 2)
            throw SchemaError("'" + join(p, "curve_n") + "' must be at least 2");
        sc.bifurcation_levels = get_number_list(bf, p, "level_values");
    }

    if (j.contains("curves")) {
        sc.has_curves = true;
        const json& cv = j.at("curves");
        std::string p = join(path, "curves");
        reject_unknown(cv, p, {"n_Y", "policies"});
        sc.curves_n_Y = get_int(cv, p, "n_Y", false, 257);
        if (sc.curves_n_Y < 2)
            throw SchemaError("'" + join(p, "n_Y") + "' must be at least 2");
        if (!cv.contains("policies"))
            throw SchemaError("missing key '" + join(p, "policies") + "'");
        const json& pols = cv.at("policies");
        if (!pols.is_array())
            throw SchemaError("'" + join(p, "policies") + "' must be an array");
        for (size_t i = 0; i < pols.size(); ++i)
            sc.curve_policies.push_back(parse_policy(
                pols[i], join(p, "policies[" + std::to_string(i) + "]"), true));
    }

    if (j.contains("markers")) {
        sc.has_markers = true;
        const json& mk = j.at("markers");
        std::string p = join(path, "markers");
        reject_unknown(mk, p, {"a_values", "critical_window"});
        sc.marker_a = get_number_list(mk, p, "a_values");
        if (mk.contains("critical_window")) {
            sc.has_critical_window = true;
            sc.critical_window =
                parse_axis(mk.at("critical_window"), join(p, "critical_window"), false);
        }
    }

    return sc;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError("malformed JSON in '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw SchemaError("config root must be a JSON object");
    return j;
}

} // namespace

Scenario load_scenario(const std::string& path) {
    return parse_scenario(load_json(path), "");
}

FigurePreset load_figure_preset(const std::string& path) {
    json j = load_json(path);
    reject_unknown(j, "", {"figure", "note", "jobs"});
    FigurePreset fp;
    fp.figure = get_int(j, "", "figure", true);
    fp.note = get_string(j, "", "note", false);
    if (!j.contains("jobs")) throw SchemaError("missing key 'jobs'");
    const json& jobs = j.at("jobs");
    if (!jobs.is_array() || jobs.empty())
        throw SchemaError("'jobs' must be a non-empty array");
    for (size_t i = 0; i < jobs.size(); ++i) {
        std::string p = "jobs[" + std::to_string(i) + "]";
        reject_unknown(jobs[i], p, {"name", "kind", "config"});
        FigureJob job;
        job.name = get_string(jobs[i], p, "name", true);
        job.kind = get_string(jobs[i], p, "kind", true);
        if (!jobs[i].contains("config"))
            throw SchemaError("missing key '" + p + ".config'");
        job.scenario = parse_scenario(jobs[i].at("config"), p + ".config");
        fp.jobs.push_back(std::move(job));
    }
    return fp;
}

} // namespace cli
