#include "entbound/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace entbound {
namespace {

using nlohmann::json;

Matrix parse_matrix(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("config: missing key '" + key + "'");
    const json& m = j.at(key);
    if (!m.is_array() || m.empty() || !m.front().is_array())
        throw ParseError("config: key '" + key + "' must be an array of row arrays");
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m.front().size());
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = m.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError("config: key '" + key + "' has ragged rows");
        for (int jcol = 0; jcol < cols; ++jcol) {
            const json& v = row.at(static_cast<std::size_t>(jcol));
            if (!v.is_number()) throw ParseError("config: key '" + key + "' has a non-number");
            out(i, jcol) = v.get<double>();
        }
    }
    out.ensure_finite(key.c_str());
    return out;
}

Poly parse_poly(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("config: missing key '" + key + "'");
    const json& a = j.at(key);
    if (!a.is_array()) throw ParseError("config: key '" + key + "' must be a coefficient array");
    Poly p;
    for (const auto& v : a) {
        if (!v.is_number()) throw ParseError("config: key '" + key + "' has a non-number");
        p.c.push_back(v.get<double>());
    }
    return p;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

SystemConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    SystemConfig cfg;
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ParseError("config: missing key 'kind' (\"linear\" or \"scalar\")");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
        cfg.kind = SystemKind::Linear;
        cfg.A = parse_matrix(j, "A");
        cfg.B = parse_matrix(j, "B");
        cfg.N = parse_matrix(j, "N");
    } else if (kind == "scalar") {
        cfg.kind = SystemKind::Scalar;
        cfg.f = parse_poly(j, "f");
        cfg.g = parse_poly(j, "g");
        cfg.h = parse_poly(j, "h");
        if (!j.contains("grid")) throw ParseError("config: missing key 'grid'");
        const json& g = j.at("grid");
        for (const char* k : {"lo", "hi", "points"})
            if (!g.contains(k)) throw ParseError(std::string("config: grid missing key '") + k + "'");
        cfg.grid.lo = g.at("lo").get<double>();
        cfg.grid.hi = g.at("hi").get<double>();
        cfg.grid.points = g.at("points").get<int>();
        if (j.contains("target_log_r")) cfg.target_log_r = parse_poly(j, "target_log_r");
    } else {
        throw ParseError("config: key 'kind' must be \"linear\" or \"scalar\"");
    }
    if (j.contains("sim")) {
        const json& s = j.at("sim");
        SimConfig sim;
        if (s.contains("dt")) sim.dt = s.at("dt").get<double>();
        if (s.contains("burn_in_steps")) sim.burn_in_steps = s.at("burn_in_steps").get<long>();
        if (s.contains("sample_steps")) sim.sample_steps = s.at("sample_steps").get<long>();
        if (s.contains("n_trajectories")) sim.n_trajectories = s.at("n_trajectories").get<int>();
        if (s.contains("seed")) sim.seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("n_batches")) sim.n_batches = s.at("n_batches").get<int>();
        if (s.contains("x0")) sim.x0 = s.at("x0").get<std::vector<double>>();
        cfg.sim = sim;
    }
    if (j.contains("gamma")) {
        if (!j.at("gamma").is_number()) throw ParseError("config: key 'gamma' must be a number");
        cfg.gamma = j.at("gamma").get<double>();
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        Tolerances& tol = cfg.tolerances;
        if (t.contains("hinf_rel")) tol.hinf_rel = t.at("hinf_rel").get<double>();
        if (t.contains("quad_abs")) tol.quad_abs = t.at("quad_abs").get<double>();
        if (t.contains("identity_rel")) tol.identity_rel = t.at("identity_rel").get<double>();
        if (t.contains("bound_slack")) tol.bound_slack = t.at("bound_slack").get<double>();
        if (t.contains("fpk_identity_rel"))
            tol.fpk_identity_rel = t.at("fpk_identity_rel").get<double>();
        if (t.contains("fpk_bound_abs")) tol.fpk_bound_abs = t.at("fpk_bound_abs").get<double>();
        if (t.contains("density_boundary"))
            tol.density_boundary = t.at("density_boundary").get<double>();
        if (t.contains("reversible")) tol.reversible = t.at("reversible").get<double>();
    }
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const SystemConfig& cfg) {
    json j;
    if (cfg.kind == SystemKind::Linear) {
        j["kind"] = "linear";
        j["A"] = matrix_to_json(cfg.A);
        j["B"] = matrix_to_json(cfg.B);
        j["N"] = matrix_to_json(cfg.N);
    } else {
        j["kind"] = "scalar";
        j["f"] = cfg.f.c;
        j["g"] = cfg.g.c;
        j["h"] = cfg.h.c;
        j["grid"] = {{"lo", cfg.grid.lo}, {"hi", cfg.grid.hi}, {"points", cfg.grid.points}};
        if (cfg.target_log_r) j["target_log_r"] = cfg.target_log_r->c;
    }
    if (cfg.sim) {
        j["sim"] = {{"dt", cfg.sim->dt},
                    {"burn_in_steps", cfg.sim->burn_in_steps},
                    {"sample_steps", cfg.sim->sample_steps},
                    {"n_trajectories", cfg.sim->n_trajectories},
                    {"seed", cfg.sim->seed},
                    {"n_batches", cfg.sim->n_batches}};
        if (!cfg.sim->x0.empty()) j["sim"]["x0"] = cfg.sim->x0;
    }
    if (cfg.gamma) j["gamma"] = *cfg.gamma;
    j["tolerances"] = {{"hinf_rel", cfg.tolerances.hinf_rel},
                       {"quad_abs", cfg.tolerances.quad_abs},
                       {"identity_rel", cfg.tolerances.identity_rel},
                       {"bound_slack", cfg.tolerances.bound_slack},
                       {"fpk_identity_rel", cfg.tolerances.fpk_identity_rel},
                       {"fpk_bound_abs", cfg.tolerances.fpk_bound_abs},
                       {"density_boundary", cfg.tolerances.density_boundary},
                       {"reversible", cfg.tolerances.reversible}};
    return j.dump(2);
}

}  // namespace entbound
