#include <cmath>
#include <string>
#include <vector>

#include "nhxy/nhxy.hpp"
#include "registry.hpp"

namespace nhxy::app {

namespace {

json complex_json(const numerics::Complex& z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double num(const json& p, const char* key) { return p.at(key).get<double>(); }
long long integer(const json& p, const char* key) { return p.at(key).get<long long>(); }
int small_int(const json& p, const char* key) {
    const long long v = integer(p, key);
    require(v >= -1'000'000'000LL && v <= 1'000'000'000LL, ErrorKind::config,
            std::string("parameter '") + key + "' is out of range");
    return static_cast<int>(v);
}
std::string text(const json& p, const char* key) { return p.at(key).get<std::string>(); }
std::vector<double> list(const json& p, const char* key) { return p.at(key).get<std::vector<double>>(); }

rg::PtPhase phase_of(const json& p) { return text(p, "phase") == "symmetric" ? rg::PtPhase::symmetric : rg::PtPhase::broken; }

rg::Regime regime_of(const std::string& s) {
    if (s == "hermitian_xy") return rg::Regime::hermitian_xy;
    if (s == "pt_symmetric_clock") return rg::Regime::pt_symmetric_clock;
    return rg::Regime::pt_broken;
}

numerics::IntegratorConfig integrator_of(const json& p) {
    numerics::IntegratorConfig cfg;
    cfg.rel_tol = num(p, "rel_tol");
    cfg.abs_tol = num(p, "abs_tol");
    if (p.contains("initial_step")) cfg.initial_step = num(p, "initial_step");
    cfg.max_step = num(p, "max_step");
    cfg.max_steps = integer(p, "max_steps");
    if (p.contains("divergence_bound")) cfg.divergence_bound = num(p, "divergence_bound");
    cfg.validate();
    return cfg;
}

ParamSpec number(std::string name, double def, std::string help) {
    return {std::move(name), ParamType::number, def, std::move(help), {}};
}
ParamSpec optional_number(std::string name, std::string help) {
    return {std::move(name), ParamType::number, nullptr, std::move(help), {}};
}
ParamSpec integer_param(std::string name, long long def, std::string help) {
    return {std::move(name), ParamType::integer, def, std::move(help), {}};
}
ParamSpec boolean(std::string name, bool def, std::string help) {
    return {std::move(name), ParamType::boolean, def, std::move(help), {}};
}
ParamSpec choice(std::string name, std::string def, std::vector<std::string> choices, std::string help) {
    return {std::move(name), ParamType::text, std::move(def), std::move(help), std::move(choices)};
}
ParamSpec numbers(std::string name, json def, std::string help) {
    return {std::move(name), ParamType::number_list, std::move(def), std::move(help), {}};
}

std::vector<ParamSpec> integrator_params(double rel_tol, double abs_tol, double max_step) {
    const numerics::IntegratorConfig defaults;
    return {number("rel_tol", rel_tol, "relative integrator tolerance"),
            number("abs_tol", abs_tol, "absolute integrator tolerance"),
            number("initial_step", defaults.initial_step, "first trial step"),
            number("max_step", max_step, "largest step in l"),
            integer_param("max_steps", defaults.max_steps, "accepted-step budget"),
            number("divergence_bound", defaults.divergence_bound, "stop once a component exceeds this magnitude")};
}

std::vector<ParamSpec> concat(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// ---------------------------------------------------------------------------

CommandOutput run_toy_z(const json& p) {
    const toy::ToyParams tp{num(p, "beta"), num(p, "J"), num(p, "K")};
    const int n = small_int(p, "n_points");
    const double exact = toy::partition_exact(tp);
    const auto quad = toy::partition_quadrature(tp, n);
    const double diff = std::abs(quad - numerics::Complex(exact, 0.0));
    CommandOutput out;
    out.report = {{"beta", tp.beta},
                  {"J", tp.J},
                  {"K", tp.K},
                  {"n_points", n},
                  {"branch", tp.J >= tp.K ? "I0" : "J0"},
                  {"Z_exact", exact},
                  {"Z_quadrature", complex_json(quad)},
                  {"abs_difference", diff}};
    out.table = CsvTable({"beta", "J", "K", "Z_exact", "Z_quad_re", "Z_quad_im", "abs_diff"});
    out.table.add_row({tp.beta, tp.J, tp.K, exact, quad.real(), quad.imag(), diff});
    out.summary = {{"Z_exact", exact}, {"Z_quad_im", quad.imag()}, {"abs_diff", diff}};
    return out;
}

CommandOutput run_qm_spectrum(const json& p) {
    const fock::ClockHamiltonianSpec spec{num(p, "eps"), num(p, "J"), num(p, "K"), small_int(p, "N"),
                                          small_int(p, "cutoff")};
    const auto h = fock::build_clock_hamiltonian(spec);
    const auto tol = p.at("tol_imag");
    const auto r = fock::spectrum_report(h, tol.is_null() ? -1.0 : tol.get<double>());
    CommandOutput out;
    json eig = json::array();
    out.table = CsvTable({"index", "re", "im"});
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        eig.push_back(complex_json(r.eigenvalues[i]));
        out.table.add_row({i, r.eigenvalues[i].real(), r.eigenvalues[i].imag()});
    }
    const std::string label(fock::to_string(r.pt_phase_label));
    out.report = {{"spec", {{"eps", spec.eps}, {"J", spec.J}, {"K", spec.K}, {"N", spec.N}, {"cutoff", spec.cutoff}}},
                  {"eigenvalues", eig},
                  {"max_abs_imag", r.max_abs_imag},
                  {"n_complex_pairs", r.n_complex_pairs},
                  {"pt_phase_label", label},
                  {"tol_imag", r.tol_imag},
                  {"norm_inf", h.entries.norm_inf()}};
    out.summary = {{"pt_phase_label", label}, {"max_abs_imag", r.max_abs_imag}, {"n_complex_pairs", r.n_complex_pairs}};
    return out;
}

json state_json(const numerics::State<3>& g) { return {{"kappa", g[0]}, {"y", g[1]}, {"y_tilde", g[2]}}; }

CommandOutput run_flow(const json& p) {
    const rg::RGState s0{num(p, "kappa"), num(p, "y"), num(p, "ytilde"), phase_of(p), num(p, "d")};
    const auto flow = rg::integrate_rg_flow(s0, num(p, "lmax"), integrator_of(p), p.at("stop_at_fixed_point").get<bool>());
    CommandOutput out;
    out.table = CsvTable({"l", "kappa", "y", "y_tilde"});
    for (std::size_t i = 0; i < flow.trace.size(); ++i) {
        const auto& g = flow.trace.states[i];
        out.table.add_row({flow.trace.l[i], g[0], g[1], g[2]});
    }
    const std::string reason(rg::to_string(flow.reason));
    const auto& fin = flow.trace.final_state();
    out.report = {{"d", s0.d},
                  {"phase", rg::to_string(s0.phase)},
                  {"initial", state_json(s0.couplings())},
                  {"reason", reason},
                  {"n_samples", flow.trace.size()},
                  {"rejected_steps", flow.trace.rejected_steps},
                  {"final_l", flow.trace.final_l()},
                  {"final_state", state_json(fin)}};
    out.summary = {{"reason", reason}, {"final_l", flow.trace.final_l()}, {"kappa", fin[0]}, {"y", fin[1]},
                   {"y_tilde", fin[2]}};
    return out;
}

json fixed_point_json(const rg::FixedPoint& fp) {
    json eig = json::array();
    for (const auto& z : fp.eigenvalues) eig.push_back(complex_json(z));
    return {{"label", rg::to_string(fp.label)},
            {"location", {fp.location[0], fp.location[1], fp.location[2]}},
            {"eigenvalues", eig},
            {"classification", rg::to_string(fp.classification)},
            {"residual", fp.residual}};
}

CommandOutput run_fixed_points(const json& p) {
    const double d = num(p, "d");
    const auto phase = phase_of(p);
    const auto fps = rg::fixed_points(d, phase);
    CommandOutput out;
    out.table = CsvTable({"label", "kappa", "y", "y_tilde", "classification", "lambda1_re", "lambda1_im", "lambda2_re",
                          "lambda2_im", "lambda3_re", "lambda3_im"});
    json list = json::array();
    for (const auto& fp : fps) {
        list.push_back(fixed_point_json(fp));
        std::vector<json> row{std::string(rg::to_string(fp.label)), fp.location[0], fp.location[1], fp.location[2],
                              std::string(rg::to_string(fp.classification))};
        for (const auto& z : fp.eigenvalues) {
            row.emplace_back(z.real());
            row.emplace_back(z.imag());
        }
        out.table.add_row(row);
    }
    out.report = {{"d", d}, {"phase", rg::to_string(phase)}, {"fixed_points", list}};
    const auto& p1 = fps.front();
    out.summary = {{"kappa1", p1.location[0]}, {"y1", p1.location[1]}, {"kappa2", nullptr},
                   {"y_tilde2", nullptr},      {"kappa_gap", nullptr},  {"lambda0_re", nullptr}};
    if (fps.size() > 1) {
        const auto& p2 = fps[1];
        out.summary["kappa2"] = p2.location[0];
        out.summary["y_tilde2"] = p2.location[2];
        out.summary["kappa_gap"] = p1.location[0] - p2.location[0];
        out.summary["lambda0_re"] = p2.jacobian(1, 1);
    }
    return out;
}

CommandOutput run_exponents(const json& p) {
    const double d = num(p, "d");
    const std::string regime_name = text(p, "regime");
    const auto ys = p.at("y_star");
    const auto r = rg::exponent_report(d, regime_of(regime_name),
                                       ys.is_null() ? std::optional<double>{} : std::optional<double>{ys.get<double>()});
    CommandOutput out;
    const json source = r.source_eigenvalue ? complex_json(*r.source_eigenvalue) : json(nullptr);
    out.report = {{"d", d},
                  {"regime", regime_name},
                  {"nu", optional_json(r.nu)},
                  {"nu_epsilon", optional_json(r.nu_epsilon)},
                  {"eta", optional_json(r.eta)},
                  {"beta_op", optional_json(r.beta_op)},
                  {"source_eigenvalue", source},
                  {"order_parameter_vanishes", r.order_parameter_vanishes},
                  {"near_collision", r.near_collision}};
    out.table = CsvTable({"d", "regime", "nu", "nu_epsilon", "eta", "beta_op", "source_re", "source_im",
                          "order_parameter_vanishes", "near_collision"});
    const json sre = r.source_eigenvalue ? json(r.source_eigenvalue->real()) : json(nullptr);
    const json sim = r.source_eigenvalue ? json(r.source_eigenvalue->imag()) : json(nullptr);
    out.table.add_row({d, regime_name, optional_json(r.nu), optional_json(r.nu_epsilon), optional_json(r.eta),
                       optional_json(r.beta_op), sre, sim, r.order_parameter_vanishes, r.near_collision});
    out.summary = {{"nu", optional_json(r.nu)},   {"nu_epsilon", optional_json(r.nu_epsilon)},
                   {"eta", optional_json(r.eta)}, {"beta_op", optional_json(r.beta_op)},
                   {"source_re", sre},            {"near_collision", r.near_collision}};
    return out;
}

CommandOutput run_walking_flow(const json& p) {
    const walking::WalkingState s0{num(p, "X"), num(p, "Y"), num(p, "Ytilde"), 0.0};
    const bool approximate = p.at("approximate").get<bool>();
    const double radius = num(p, "exit_radius");
    require(radius > 0.0, ErrorKind::domain, "walking-flow: exit_radius must be > 0");
    const double l_max = num(p, "lmax");
    require(l_max >= 0.0, ErrorKind::argument, "walking-flow: lmax must be >= 0");
    const auto trace = numerics::integrate_ode<3>(
        [&](double, const numerics::State<3>& v) { return walking::walking_beta(v, approximate); }, s0.vec(),
        {0.0, l_max}, integrator_of(p),
        [&](double, const numerics::State<3>& v) { return radius - numerics::norm_inf(v); });
    const auto surface = walking::invariant_value(s0);
    CommandOutput out;
    out.table = CsvTable({"l", "X", "Y", "Y_tilde", "c2"});
    double drift = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& v = trace.states[i];
        const double c2 = walking::invariant_c2(v);
        drift = std::max(drift, std::abs(c2 - surface.c2));
        out.table.add_row({trace.l[i], v[0], v[1], v[2], c2});
    }
    const std::string reason =
        trace.termination == numerics::Termination::event ? "exit_radius" : std::string(numerics::to_string(trace.termination));
    const std::string sheet(walking::to_string(surface.sheet));
    out.report = {{"initial", {{"X", s0.X}, {"Y", s0.Y}, {"Y_tilde", s0.Y_tilde}}},
                  {"approximate", approximate},
                  {"c2_initial", surface.c2},
                  {"sheet", sheet},
                  {"max_drift", drift},
                  {"reason", reason},
                  {"n_samples", trace.size()},
                  {"final_l", trace.final_l()}};
    out.summary = {{"sheet", sheet}, {"c2_initial", surface.c2}, {"max_drift", drift}, {"final_l", trace.final_l()},
                   {"reason", reason}};
    return out;
}

CommandOutput run_xi_scan(const json& p) {
    walking::XiScanOptions opt;
    opt.b = num(p, "b");
    opt.seed_ratio = num(p, "seed_ratio");
    opt.threshold = num(p, "threshold");
    opt.l_max = num(p, "lmax");
    opt.integrator = integrator_of(p);
    std::vector<double> grid;
    if (p.at("k_values").is_null())
        grid = walking::log_grid(num(p, "k_min"), num(p, "k_max"), small_int(p, "n_points"));
    else
        grid = list(p, "k_values");
    const auto r = walking::xi_scaling_numeric(grid, opt);
    CommandOutput out;
    out.table = CsvTable({"K_minus_Kc", "l_star", "log_inv_xi"});
    json samples = json::array();
    for (const auto& s : r.samples) {
        out.table.add_row({s.K_minus_Kc, s.l_star, s.log_inv_xi});
        samples.push_back({{"K_minus_Kc", s.K_minus_Kc}, {"l_star", s.l_star}, {"log_inv_xi", s.log_inv_xi}});
    }
    out.report = {{"b", opt.b},
                  {"seed_ratio", opt.seed_ratio},
                  {"threshold", opt.threshold},
                  {"samples", samples},
                  {"fit", {{"slope", r.fit_slope}, {"intercept", r.fit_intercept}, {"r_squared", r.r_squared}}},
                  {"dropped", r.dropped}};
    out.summary = {{"fit_slope", r.fit_slope},
                   {"fit_intercept", r.fit_intercept},
                   {"r_squared", r.r_squared},
                   {"n_samples", r.samples.size()},
                   {"n_dropped", r.dropped.size()}};
    return out;
}

CommandOutput run_collision_scan(const json& p) {
    const auto grid = list(p, "d_values");
    const auto scan = walking::collision_scan(grid);
    CommandOutput out;
    out.table = CsvTable({"d", "kappa1", "kappa2", "lambda0_re", "kappa_gap"});
    json rows = json::array();
    for (const auto& r : scan.rows) {
        out.table.add_row({r.d, r.kappa1, r.kappa2, r.lambda0_re, r.gap()});
        rows.push_back({{"d", r.d},
                        {"kappa1", r.kappa1},
                        {"kappa2", r.kappa2},
                        {"kappa_gap", r.gap()},
                        {"y1", r.y1},
                        {"y_tilde2", r.y_tilde2},
                        {"lambda0_re", r.lambda0_re}});
    }
    json powers = json::array();
    for (const auto& lp : scan.powers)
        powers.push_back({{"d_coarse", lp.d_coarse},
                          {"d_fine", lp.d_fine},
                          {"kappa_gap", lp.gap},
                          {"lambda0", lp.lambda0},
                          {"y1", lp.y1},
                          {"y_tilde2", lp.y_tilde2}});
    out.report = {{"rows", rows},
                  {"local_powers", powers},
                  {"kappa1_at_2", optional_json(scan.kappa1_at_2)},
                  {"kappa2_at_2", optional_json(scan.kappa2_at_2)},
                  {"kappa_bkt", rg::kappa_bkt}};
    out.summary = {{"kappa1_at_2", optional_json(scan.kappa1_at_2)},
                   {"kappa2_at_2", optional_json(scan.kappa2_at_2)},
                   {"gap_power_finest", scan.powers.empty() ? json(nullptr) : json(scan.powers.back().gap)},
                   {"lambda0_power_finest", scan.powers.empty() ? json(nullptr) : json(scan.powers.back().lambda0)}};
    return out;
}

std::vector<CommandSpec> build_registry() {
    const std::vector<std::string> phases{"symmetric", "broken"};
    std::vector<CommandSpec> reg;
    reg.push_back({"toy-z",
                   "partition function of the zero-dimensional toy model",
                   {number("beta", 1.0, "inverse temperature"), number("J", 1.0, "cosine coupling"),
                    number("K", 0.5, "imaginary sine coupling"),
                    integer_param("n_points", 256, "quadrature points (>= 64)")},
                   {"Z_exact", "Z_quad_im", "abs_diff"},
                   {"J", {"Z_exact"}, "points"},
                   run_toy_z});
    reg.push_back({"qm-spectrum",
                   "spectrum of the truncated non-Hermitian clock Hamiltonian",
                   {number("eps", 1.0, "oscillator energy"), number("J", 2.0, "Hermitian clock coupling"),
                    number("K", 1.0, "anti-Hermitian clock coupling"), integer_param("N", 4, "clock order"),
                    integer_param("cutoff", 64, "Fock-space dimension (<= 512)"),
                    optional_number("tol_imag", "reality tolerance (default 1e-8 * spectral radius)")},
                   {"pt_phase_label", "max_abs_imag", "n_complex_pairs"},
                   {"re", {"im"}, "points"},
                   run_qm_spectrum});
    reg.push_back({"flow",
                   "integrate the RG flow in (kappa, y, y_tilde)",
                   concat({number("d", 3.0, "dimension"), choice("phase", "broken", phases, "PT phase"),
                           number("kappa", 0.25, "initial stiffness"), number("y", 0.0, "initial vortex fugacity"),
                           number("ytilde", 0.7, "initial clock coupling"), number("lmax", 20.0, "flow length"),
                           boolean("stop_at_fixed_point", true, "stop once ||beta|| < 1e-12")},
                          integrator_params(1e-9, 1e-12, 1.0)),
                   {"reason", "final_l", "kappa", "y", "y_tilde"},
                   {"kappa", {"y_tilde", "y"}, "lines"},
                   run_flow});
    reg.push_back({"fixed-points",
                   "fixed points, eigenvalues and classification",
                   {number("d", 3.0, "dimension"), choice("phase", "broken", phases, "PT phase")},
                   {"kappa1", "y1", "kappa2", "y_tilde2", "kappa_gap", "lambda0_re"},
                   {"kappa", {"y_tilde"}, "points"},
                   run_fixed_points});
    reg.push_back({"exponents",
                   "critical exponents",
                   {number("d", 3.0, "dimension"),
                    choice("regime", "pt_broken", {"hermitian_xy", "pt_symmetric_clock", "pt_broken"}, "regime"),
                    optional_number("y_star", "fixed-line coupling (pt_symmetric_clock at d = 2)")},
                   {"nu", "nu_epsilon", "eta", "beta_op", "source_re", "near_collision"},
                   {"d", {"nu"}, "points"},
                   run_exponents});
    reg.push_back({"walking-flow",
                   "flow of the two-dimensional walking variables (X, Y, Y_tilde)",
                   concat({number("X", 0.1, "initial X = 2 - pi kappa"), number("Y", 0.2, "initial Y = 2y/sqrt(pi)"),
                           number("Ytilde", 0.05, "initial Y_tilde = 2 y_tilde/sqrt(pi)"),
                           number("lmax", 10.0, "flow length"),
                           boolean("approximate", true, "use the truncated system"),
                           number("exit_radius", walking::invariant_exit_radius, "stop once max(|X|,|Y|,|Y_tilde|) reaches this")},
                          integrator_params(1e-12, 1e-14, 0.1)),
                   {"sheet", "c2_initial", "max_drift", "final_l", "reason"},
                   {"X", {"Y", "Y_tilde"}, "lines"},
                   run_walking_flow});
    reg.push_back({"xi-scan",
                   "correlation-length scaling near the walking regime",
                   concat({number("k_min", 1e-3, "smallest K - Kc"), number("k_max", 1e-2, "largest K - Kc"),
                           integer_param("n_points", 8, "log-spaced grid size"),
                           numbers("k_values", nullptr, "explicit K - Kc grid (overrides k_min/k_max/n_points)"),
                           number("b", 1.0, "c^2 = b (K - Kc)"), number("seed_ratio", 0.1, "Y(0) = Y_tilde(0) = seed_ratio c"),
                           number("threshold", 1.0, "|X(l*)| threshold"), number("lmax", 1e4, "flow length cap")},
                          integrator_params(1e-10, 1e-14, 1.0)),
                   {"fit_slope", "fit_intercept", "r_squared", "n_samples", "n_dropped"},
                   {"K_minus_Kc", {"log_inv_xi"}, "linespoints"},
                   run_xi_scan});
    reg.push_back({"collision-scan",
                   "P1/P2 collision as d approaches 2",
                   {numbers("d_values", json::array({2.1, 2.05, 2.02, 2.01, 2.005}), "dimensions in (2, 4]")},
                   {"kappa1_at_2", "kappa2_at_2", "gap_power_finest", "lambda0_power_finest"},
                   {"d", {"kappa_gap", "lambda0_re"}, "linespoints"},
                   run_collision_scan});
    return reg;
}

} // namespace

const std::vector<CommandSpec>& command_registry() {
    static const std::vector<CommandSpec> reg = build_registry();
    return reg;
}

} // namespace nhxy::app
