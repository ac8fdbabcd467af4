#include "vcoup/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vcoup/csv.hpp"
#include "vcoup/parallel.hpp"

namespace vcoup {

using nlohmann::json;

std::string to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::direct_free_space: return "direct_free_space";
    case ScenarioKind::direct_layered: return "direct_layered";
    case ScenarioKind::truncation_study: return "truncation_study";
    case ScenarioKind::mediator_sweep: return "mediator_sweep";
    case ScenarioKind::traceout_validation: return "traceout_validation";
    }
    return "?";
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct Collector {
    std::vector<ValidationIssue> issues;
    void add(const std::string& field, const std::string& msg) {
        issues.push_back({field, msg});
    }
    bool ok() const { return issues.empty(); }
};

Vec3 parse_vec3(const json& j, const std::string& field, Collector& c) {
    if (!j.is_array() || j.size() != 3) {
        c.add(field, "expected an array of 3 numbers");
        return Vec3::Zero();
    }
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) {
            c.add(field, "expected an array of 3 numbers");
            return Vec3::Zero();
        }
        v(i) = j[i].get<double>();
    }
    return v;
}

complexd parse_complex(const json& j, const std::string& field, Collector& c) {
    if (j.is_number()) return complexd(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return complexd(j[0].get<double>(), j[1].get<double>());
    c.add(field, "expected a number or [re, im]");
    return complexd(0.0);
}

CVec3 parse_cvec3(const json& j, const std::string& field, Collector& c) {
    if (!j.is_array() || j.size() != 3) {
        c.add(field, "expected an array of 3 (possibly complex) numbers");
        return CVec3::Zero();
    }
    CVec3 v;
    for (int i = 0; i < 3; ++i)
        v(i) = parse_complex(j[i], field + "[" + std::to_string(i) + "]", c);
    return v;
}

std::vector<double> parse_grid(const json& j, const std::string& field,
                               Collector& c) {
    std::vector<double> grid;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) {
                c.add(field, "grid entries must be numbers");
                return {};
            }
            grid.push_back(v.get<double>());
        }
        return grid;
    }
    if (j.is_object() && j.contains("min") && j.contains("max") &&
        j.contains("count")) {
        const double lo = j["min"].get<double>();
        const double hi = j["max"].get<double>();
        const int n = j["count"].get<int>();
        if (n < 1 || !(hi >= lo)) {
            c.add(field, "grid must satisfy count >= 1 and max >= min");
            return {};
        }
        for (int i = 0; i < n; ++i)
            grid.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return grid;
    }
    c.add(field, "expected a list or {min, max, count}");
    return {};
}

EmitterRoster parse_emitters(const json& j, Collector& c) {
    EmitterRoster roster;
    if (!j.is_array() || j.empty()) {
        c.add("emitters", "expected a non-empty list");
        return roster;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto tag = "emitters[" + std::to_string(i) + "]";
        if (!j[i].is_object() || !j[i].contains("position")) {
            c.add(tag, "each emitter needs a position");
            continue;
        }
        Emitter e;
        e.position = parse_vec3(j[i]["position"], tag + ".position", c);
        if (j[i].contains("dipole"))
            e.dipole = parse_vec3(j[i]["dipole"], tag + ".dipole", c);
        roster.push_back(e);
    }
    for (std::size_t i = 0; i < roster.size(); ++i)
        for (std::size_t k = i + 1; k < roster.size(); ++k)
            if ((roster[i].position - roster[k].position).norm() == 0.0)
                c.add("emitters",
                      "emitters " + std::to_string(i) + " and " +
                          std::to_string(k) + " occupy the same position");
    return roster;
}

LayerStack parse_stack(const json& j, Collector& c) {
    LayerStack stack;
    if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array() ||
        j["layers"].size() < 2) {
        c.add("stack", "expected {layers: [...]} with at least 2 layers");
        return stack;
    }
    stack.z0 = j.value("z0", 0.0);
    stack.emitter_layer = j.value("emitter_layer", std::size_t{1});
    const auto& layers = j["layers"];
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto tag = "stack.layers[" + std::to_string(l) + "]";
        Layer layer;
        if (layers[l].contains("drude")) {
            DrudeModel d;
            d.omega_p = layers[l]["drude"].value("omega_p", 1.0);
            d.gamma = layers[l]["drude"].value("gamma", 0.0);
            if (d.omega_p < 0.0 || d.gamma < 0.0)
                c.add(tag, "Drude parameters must be nonnegative");
            layer.permittivity.model = d;
        } else if (layers[l].contains("eps")) {
            layer.permittivity.model =
                parse_complex(layers[l]["eps"], tag + ".eps", c);
        } else {
            c.add(tag, "layer needs 'eps' or 'drude'");
        }
        if (l > 0 && l + 1 < layers.size()) {
            layer.thickness = layers[l].value("thickness", 0.0);
            if (!(layer.thickness > 0.0))
                c.add(tag, "interior layer thickness must be positive");
        }
        stack.layers.push_back(layer);
    }
    if (stack.emitter_layer >= stack.layers.size())
        c.add("stack.emitter_layer", "index out of range");
    else if (!stack.layers[stack.emitter_layer].permittivity.is_vacuum())
        c.add("stack.emitter_layer", "emitter layer must be vacuum");
    return stack;
}

DiscreteModeSet parse_modes(const json& j, std::size_t n_sites,
                            Collector& c) {
    DiscreteModeSet set;
    set.roster_size = n_sites;
    if (!j.is_object() || !j.contains("kind")) {
        c.add("modes", "expected {kind: explicit|lorentzian, ...}");
        return set;
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "explicit") {
        if (!j.contains("list") || !j["list"].is_array()) {
            c.add("modes.list", "expected a list of modes");
            return set;
        }
        for (std::size_t n = 0; n < j["list"].size(); ++n) {
            const auto tag = "modes.list[" + std::to_string(n) + "]";
            const auto& jm = j["list"][n];
            DiscreteMode m;
            m.omega = jm.value("omega", 0.0);
            if (!(m.omega > 0.0)) c.add(tag, "mode frequency must be positive");
            if (!jm.contains("fields") || !jm["fields"].is_array() ||
                jm["fields"].size() != n_sites) {
                c.add(tag, "fields must list one vector per site");
                continue;
            }
            for (std::size_t i = 0; i < n_sites; ++i)
                m.field.push_back(parse_cvec3(
                    jm["fields"][i],
                    tag + ".fields[" + std::to_string(i) + "]", c));
            set.modes.push_back(std::move(m));
        }
        return set;
    }
    if (kind == "lorentzian") {
        const int count = j.value("count", 0);
        const double lo = j.value("omega_min", 0.0);
        const double hi = j.value("omega_max", 0.0);
        const double center = j.value("center", 0.0);
        const double width = j.value("width", 0.0);
        const double amp = j.value("amplitude", 1.0);
        if (count < 1 || !(lo > 0.0) || !(hi > lo))
            c.add("modes", "lorentzian generator needs count >= 1 and "
                           "0 < omega_min < omega_max");
        if (!(width > 0.0) || !(center > 0.0))
            c.add("modes", "lorentzian generator needs positive center and "
                           "width");
        Vec3 pol(0.0, 0.0, 1.0);
        if (j.contains("polarization"))
            pol = parse_vec3(j["polarization"], "modes.polarization", c);
        std::vector<double> profile(n_sites, 1.0);
        if (j.contains("site_profile")) {
            const auto& p = j["site_profile"];
            if (!p.is_array() || p.size() != n_sites)
                c.add("modes.site_profile", "needs one entry per site");
            else
                for (std::size_t i = 0; i < n_sites; ++i)
                    profile[i] = p[i].get<double>();
        }
        if (!c.ok()) return set;
        const double dw = count > 1 ? (hi - lo) / (count - 1) : (hi - lo);
        for (int n = 0; n < count; ++n) {
            DiscreteMode m;
            m.omega = count == 1 ? lo : lo + (hi - lo) * n / (count - 1);
            const double det = m.omega - center;
            const double g = amp * std::sqrt((dw / pi) * (0.5 * width) /
                                             (det * det +
                                              0.25 * width * width));
            for (std::size_t i = 0; i < n_sites; ++i)
                m.field.push_back((profile[i] * g * pol).cast<complexd>());
            set.modes.push_back(std::move(m));
        }
        return set;
    }
    c.add("modes.kind", "unknown mode-set kind '" + kind + "'");
    return set;
}

std::vector<Mediator> parse_mediators(const json& j, Collector& c) {
    std::vector<Mediator> meds;
    if (!j.is_array() || j.size() < 2) {
        c.add("mediators", "expected a list of at least 2 mediators");
        return meds;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto tag = "mediators[" + std::to_string(i) + "]";
        Mediator m;
        if (j[i].contains("position"))
            m.position = parse_vec3(j[i]["position"], tag + ".position", c);
        if (j[i].contains("dipole"))
            m.dipole = parse_cvec3(j[i]["dipole"], tag + ".dipole", c);
        m.matter_coupling =
            j[i].contains("gamma")
                ? parse_complex(j[i]["gamma"], tag + ".gamma", c)
                : complexd(1.0, 0.0);
        m.frequency = j[i].value("frequency", 1.0);
        meds.push_back(m);
    }
    return meds;
}

ValidationResult validate_json(const json& j) {
    ValidationResult res;
    Collector c;
    ScenarioConfig cfg;

    if (!j.contains("kind") || !j["kind"].is_string()) {
        c.add("kind", "missing scenario kind");
        res.issues = c.issues;
        return res;
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "direct_free_space")
        cfg.kind = ScenarioKind::direct_free_space;
    else if (kind == "direct_layered")
        cfg.kind = ScenarioKind::direct_layered;
    else if (kind == "truncation_study")
        cfg.kind = ScenarioKind::truncation_study;
    else if (kind == "mediator_sweep")
        cfg.kind = ScenarioKind::mediator_sweep;
    else if (kind == "traceout_validation")
        cfg.kind = ScenarioKind::traceout_validation;
    else {
        c.add("kind", "unknown scenario kind '" + kind + "'");
        res.issues = c.issues;
        return res;
    }

    if (j.contains("units")) {
        cfg.units.hbar_scale = j["units"].value("hbar", 1.0);
        cfg.units.c_scale = j["units"].value("c", 1.0);
        cfg.units.eps0_scale = j["units"].value("eps0", 1.0);
        try {
            cfg.units.validate();
        } catch (const Error& e) {
            c.add("units", e.what());
        }
    }
    cfg.output_dir = j.value("output_dir", std::string{"out"});

    const bool needs_emitters = cfg.kind == ScenarioKind::direct_free_space ||
                                cfg.kind == ScenarioKind::direct_layered ||
                                cfg.kind == ScenarioKind::truncation_study ||
                                cfg.kind == ScenarioKind::traceout_validation;
    if (needs_emitters) {
        if (!j.contains("emitters"))
            c.add("emitters", "required for this scenario kind");
        else
            cfg.emitters = parse_emitters(j["emitters"], c);
    }

    switch (cfg.kind) {
    case ScenarioKind::direct_free_space: {
        if (cfg.emitters.size() < 2)
            c.add("emitters", "need at least 2 emitters for pair couplings");
        if (!j.contains("rho_over_lambda"))
            c.add("rho_over_lambda", "required for direct_free_space");
        else
            cfg.rho_over_lambda =
                parse_grid(j["rho_over_lambda"], "rho_over_lambda", c);
        for (double x : cfg.rho_over_lambda)
            if (!(x > 0.0))
                c.add("rho_over_lambda", "cutoff frequency must be positive");
        break;
    }
    case ScenarioKind::direct_layered: {
        if (!j.contains("stack"))
            c.add("stack", "required for direct_layered");
        else
            cfg.stack = parse_stack(j["stack"], c);
        break;
    }
    case ScenarioKind::truncation_study: {
        if (j.contains("stack")) cfg.stack = parse_stack(j["stack"], c);
        if (!j.contains("omega_grid"))
            c.add("omega_grid", "required for truncation_study");
        else
            cfg.omega_grid = parse_grid(j["omega_grid"], "omega_grid", c);
        for (std::size_t i = 1; i < cfg.omega_grid.size(); ++i)
            if (!(cfg.omega_grid[i] > cfg.omega_grid[i - 1]))
                c.add("omega_grid", "must be strictly ascending");
        for (double w : cfg.omega_grid)
            if (w < 0.0) c.add("omega_grid", "frequencies must be >= 0");
        break;
    }
    case ScenarioKind::mediator_sweep: {
        if (!j.contains("mediators"))
            c.add("mediators", "required for mediator_sweep");
        else
            cfg.mediators = parse_mediators(j["mediators"], c);
        if (!j.contains("omega_grid"))
            c.add("omega_grid", "required: mediator frequencies to sweep");
        else
            cfg.omega_grid = parse_grid(j["omega_grid"], "omega_grid", c);
        for (double w : cfg.omega_grid)
            if (!(w > 0.0))
                c.add("omega_grid", "mediator frequencies must be positive");
        if (!j.contains("modes"))
            c.add("modes", "required for mediator_sweep");
        else
            cfg.modes = parse_modes(j["modes"], cfg.mediators.size(), c);
        break;
    }
    case ScenarioKind::traceout_validation: {
        if (!j.contains("modes"))
            c.add("modes", "required for traceout_validation");
        else
            cfg.modes = parse_modes(j["modes"], cfg.emitters.size(), c);
        if (!j.contains("eps_over_omega"))
            c.add("eps_over_omega", "required for traceout_validation");
        else
            cfg.eps_over_omega =
                parse_grid(j["eps_over_omega"], "eps_over_omega", c);
        for (double r : cfg.eps_over_omega)
            if (r < 0.0) c.add("eps_over_omega", "ratios must be >= 0");
        cfg.omega_ref = j.value("omega_ref", 1.0);
        if (!(cfg.omega_ref > 0.0))
            c.add("omega_ref", "must be positive");
        cfg.n_max = j.value("n_max", 30);
        if (cfg.n_max < 1) c.add("n_max", "must be >= 1");
        break;
    }
    }

    res.issues = c.issues;
    res.ok = c.ok();
    if (res.ok) {
        cfg.canonical = j; // nlohmann objects are key-sorted already
        res.config = std::move(cfg);
    }
    return res;
}

} // namespace

ValidationResult validate_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        ValidationResult res;
        res.issues.push_back({"<config>", e.what()});
        return res;
    }
    return validate_json(j);
}

ValidationResult validate_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        ValidationResult res;
        res.issues.push_back({"<config>", "cannot read " + path.string()});
        return res;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return validate_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Execution

namespace {

void write_coupling_csv(const CouplingMatrix& lam,
                        const std::filesystem::path& path) {
    static const char* comp[3] = {"x", "y", "z"};
    std::vector<std::string> header{"i", "j"};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            header.push_back(std::string{"lambda_"} + comp[a] + comp[b] +
                             "_re");
            header.push_back(std::string{"lambda_"} + comp[a] + comp[b] +
                             "_im");
        }
    CsvWriter csv(header);
    for (std::size_t i = 0; i < lam.n; ++i)
        for (std::size_t j = 0; j < lam.n; ++j) {
            std::vector<CsvCell> row{static_cast<long long>(i),
                                     static_cast<long long>(j)};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    row.emplace_back(lam.block(i, j)(a, b).real());
                    row.emplace_back(lam.block(i, j)(a, b).imag());
                }
            csv.add_row(std::move(row));
        }
    csv.write(path.string());
}

double block_rel_error(const Dyadic33& a, const Dyadic33& ref) {
    const double d = std::sqrt((a - ref).cwiseAbs2().sum());
    const double r = std::sqrt(ref.cwiseAbs2().sum());
    return r > 0.0 ? d / r : d;
}

struct ScenarioOutputs {
    std::vector<std::string> files;
};

ScenarioOutputs run_direct_free_space(const ScenarioConfig& cfg,
                                      const std::filesystem::path& dir) {
    FreeSpaceGreens g;
    const double rho =
        (cfg.emitters[0].position - cfg.emitters[1].position).norm();
    const CouplingMatrix residue = coupling_from_residue(g, cfg.emitters);

    CsvWriter csv({"rho_over_lambda", "lambda_zz", "lambda_xx",
                   "rel_error_vs_residue"});
    for (double rl : cfg.rho_over_lambda) {
        SpectralCutoff cut{CutoffKind::gaussian, 2.0 * pi * rl / rho};
        const CouplingMatrix lam =
            coupling_from_spectrum(g, cfg.emitters, cut);
        csv.add_row({rl, lam.block(0, 1)(2, 2).real(),
                     lam.block(0, 1)(0, 0).real(),
                     block_rel_error(lam.block(0, 1), residue.block(0, 1))});
    }
    csv.write((dir / "cutoff_convergence.csv").string());
    write_coupling_csv(residue, dir / "coupling_residue.csv");
    return {{"cutoff_convergence.csv", "coupling_residue.csv"}};
}

ScenarioOutputs run_direct_layered(const ScenarioConfig& cfg,
                                   const std::filesystem::path& dir) {
    LayeredGreens g(*cfg.stack);
    for (const auto& e : cfg.emitters)
        if (!cfg.stack->in_emitter_layer(e.position))
            throw GeometryError("emitter outside the designated layer");
    const CouplingMatrix residue = coupling_from_residue(g, cfg.emitters);
    write_coupling_csv(residue, dir / "coupling_residue.csv");
    return {{"coupling_residue.csv"}};
}

ScenarioOutputs run_truncation_study(const ScenarioConfig& cfg,
                                     const std::filesystem::path& dir) {
    std::unique_ptr<GreensEvaluator> g;
    if (cfg.stack)
        g = std::make_unique<LayeredGreens>(*cfg.stack);
    else
        g = std::make_unique<FreeSpaceGreens>();
    const auto rows = truncation_report(*g, cfg.emitters, cfg.omega_grid);
    CsvWriter csv({"omega_max", "lambda_frobenius_gaussian",
                   "rel_error_gaussian", "lambda_frobenius_hard",
                   "rel_error_hard"});
    for (const auto& r : rows)
        csv.add_row({r.omega_max, r.partial.frobenius(),
                     r.rel_error_vs_residue, r.partial_hard.frobenius(),
                     r.rel_error_hard});
    csv.write((dir / "truncation.csv").string());
    return {{"truncation.csv"}};
}

ScenarioOutputs run_mediator_sweep(const ScenarioConfig& cfg,
                                   const std::filesystem::path& dir) {
    const auto rows =
        resonance_sweep(cfg.mediators, *cfg.modes, cfg.omega_grid);
    std::vector<std::string> header{"Omega", "xi_offdiag_re",
                                    "xi_offdiag_normalized",
                                    "xi_truncated_normalized"};
    const std::size_t npol =
        rows.empty() ? 0 : rows.front().polariton_frequencies.size();
    for (std::size_t n = 0; n < npol; ++n)
        header.push_back("polariton_" + std::to_string(n + 1));
    CsvWriter csv(header);
    for (const auto& r : rows) {
        std::vector<CsvCell> row{r.omega_mediator, r.xi_offdiag.real(),
                                 r.xi_offdiag_normalized.real(),
                                 r.xi_truncated_normalized.real()};
        for (double w : r.polariton_frequencies) row.emplace_back(w);
        csv.add_row(std::move(row));
    }
    csv.write((dir / "resonance_sweep.csv").string());
    return {{"resonance_sweep.csv"}};
}

ScenarioOutputs run_traceout_validation(const ScenarioConfig& cfg,
                                        const std::filesystem::path& dir) {
    FockModel base;
    base.emitters = cfg.emitters;
    base.splittings.assign(cfg.emitters.size(), 0.0);
    base.modes = *cfg.modes;
    base.n_max = cfg.n_max;
    const auto rows =
        traceout_error_sweep(base, cfg.omega_ref, cfg.eps_over_omega);
    CsvWriter csv({"eps_over_omega", "energy_error"});
    for (const auto& r : rows)
        csv.add_row({r.eps_over_omega, r.energy_error});
    csv.write((dir / "traceout_error.csv").string());
    return {{"traceout_error.csv"}};
}

std::string file_checksum(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return fnv1a_hex(ss.str());
}

} // namespace

nlohmann::json RunReport::to_json() const {
    json j;
    j["config_hash"] = config_hash;
    j["config"] = config_echo;
    j["outputs"] = json::array();
    for (const auto& o : outputs)
        j["outputs"].push_back({{"file", o.name}, {"checksum", o.checksum}});
    j["wall_clock_seconds"] = wall_clock_seconds;
    j["version"] = version;
    j["converged"] = converged;
    if (!convergence_message.empty())
        j["convergence_message"] = convergence_message;
    return j;
}

RunReport run_scenario(const ScenarioConfig& cfg,
                       const std::filesystem::path& output_dir, int threads) {
    set_thread_cap(threads);
    std::filesystem::create_directories(output_dir);

    RunReport report;
    report.config_echo = cfg.canonical;
    report.config_hash = fnv1a_hex(cfg.canonical.dump());

    const auto t0 = std::chrono::steady_clock::now();
    ScenarioOutputs outs;
    try {
        switch (cfg.kind) {
        case ScenarioKind::direct_free_space:
            outs = run_direct_free_space(cfg, output_dir);
            break;
        case ScenarioKind::direct_layered:
            outs = run_direct_layered(cfg, output_dir);
            break;
        case ScenarioKind::truncation_study:
            outs = run_truncation_study(cfg, output_dir);
            break;
        case ScenarioKind::mediator_sweep:
            outs = run_mediator_sweep(cfg, output_dir);
            break;
        case ScenarioKind::traceout_validation:
            outs = run_traceout_validation(cfg, output_dir);
            break;
        }
    } catch (const ConvergenceError& e) {
        report.converged = false;
        report.convergence_message = e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    report.wall_clock_seconds =
        std::chrono::duration<double>(t1 - t0).count();

    for (const auto& name : outs.files)
        report.outputs.push_back({name, file_checksum(output_dir / name)});

    std::ofstream rep(output_dir / "report.json");
    rep << report.to_json().dump(2) << "\n";
    return report;
}

} // namespace vcoup
