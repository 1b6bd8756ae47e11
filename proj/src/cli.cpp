#include "lorenz/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace lorenz::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* schema_name = "lorenz-fixed-point-result";

json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json interval_json(double lo, double hi) { return json::array({lo, hi}); }

json config_json(const RunConfig& c) {
    return {{"rho", c.rho},
            {"degree", c.degree},
            {"iterate_tol", c.iterate_tol},
            {"tol_r", c.tol_r},
            {"bracket", interval_json(c.bracket_lo, c.bracket_hi)},
            {"max_iter", c.max_iter},
            {"grid_out", c.grid_out},
            {"emit", json(std::vector<std::string>(c.emit.begin(), c.emit.end()))},
            {"trace", c.trace},
            {"strict_class", c.strict_class}};
}

json funcrep_json(const FuncRep& f) {
    return {{"domain", interval_json(f.domain().lo, f.domain().hi)},
            {"samples", std::vector<double>(f.samples().begin(), f.samples().end())}};
}

json checks_json(const std::vector<Check>& checks) {
    json out = json::array();
    for (const auto& c : checks)
        out.push_back({{"name", c.name}, {"passed", c.passed}, {"value", real(c.value)}, {"limit", c.limit},
                       {"gating", c.gating}});
    return out;
}

void write_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) fail(ErrorKind::config, "cannot write " + path.string());
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c == '\n' ? ' ' : c;
    }
    return q + '"';
}

// Typed accessors for result.json; anything off-schema is a parse error.
const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::parse, std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) fail(ErrorKind::parse, std::string("field '") + key + "' is not a number");
    return v.get<double>();
}

int integer(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) fail(ErrorKind::parse, std::string("field '") + key + "' is not an integer");
    return v.get<int>();
}

bool boolean(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_boolean()) fail(ErrorKind::parse, std::string("field '") + key + "' is not a boolean");
    return v.get<bool>();
}

std::pair<double, double> pair_of(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(ErrorKind::parse, std::string("field '") + key + "' is not a [lo, hi] pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

FuncRep funcrep_of(const json& j, const char* key) {
    const json& v = field(j, key);
    const auto [lo, hi] = pair_of(v, "domain");
    const json& s = field(v, "samples");
    if (!s.is_array()) fail(ErrorKind::parse, std::string(key) + ".samples is not an array");
    std::vector<double> samples;
    for (const auto& x : s) {
        if (!x.is_number()) fail(ErrorKind::parse, std::string(key) + ".samples holds a non-number");
        samples.push_back(x.get<double>());
    }
    try {
        return FuncRep::from_samples(Interval(lo, hi), std::move(samples));
    } catch (const Error& e) {
        fail(ErrorKind::parse, std::string(key) + ": " + e.what());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::parse, "cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void print_checks(std::ostream& os, const std::vector<Check>& checks) {
    for (const auto& c : checks)
        os << "  " << (c.passed ? "ok    " : (c.gating ? "BREACH" : "note  ")) << ' ' << c.name
           << " value=" << format_real(c.value) << " limit=" << format_real(c.limit) << '\n';
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::config:
    case ErrorKind::parse:
    case ErrorKind::usage: return exit_config;
    case ErrorKind::bracket: return exit_bracket;
    case ErrorKind::convergence: return exit_convergence;
    case ErrorKind::verification: return exit_verification;
    default: return exit_other;
    }
}

void RunConfig::validate() const {
    auto bad = [](const std::string& what) { fail(ErrorKind::config, what); };
    if (!(rho > 1.0) || !std::isfinite(rho)) bad("rho must exceed 1, got " + format_real(rho));
    if (degree < 16 || degree > 512) bad("degree must lie in [16, 512], got " + std::to_string(degree));
    if (!(iterate_tol > 0.0)) bad("iterate_tol must be positive");
    if (!(tol_r > 0.0)) bad("tol_r must be positive");
    if (!(bracket_lo > 0.0) || !(bracket_lo < bracket_hi) || !std::isfinite(bracket_hi))
        bad("bracket must satisfy 0 < lo < hi, got [" + format_real(bracket_lo) + ", " + format_real(bracket_hi) + "]");
    if (max_iter < 1) bad("max_iter must be at least 1");
    if (grid_out < 2) bad("grid_out must be at least 2");
    for (const auto& e : emit)
        if (e != "json" && e != "csv") bad("unknown emit format '" + e + "' (expected json or csv)");
}

FixedPointOptions RunConfig::options() const {
    FixedPointOptions o;
    o.degree = degree;
    o.iterate_tol = iterate_tol;
    o.tol_r = tol_r;
    o.max_iter = max_iter;
    o.strict_class = strict_class;
    return o;
}

fs::path resolve_output_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv(output_dir_env); env && *env) return env;
    return ".";
}

std::string format_real(double x) {
    if (std::isnan(x)) return "";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string result_json(const RunConfig& cfg, const SolveResult& s, const std::vector<Check>& checks,
                        double wall_time_s) {
    json j;
    j["schema"] = schema_name;
    j["version"] = result_schema_version;
    j["status"] = "ok";
    j["config"] = config_json(cfg);
    j["r_star"] = s.r_star;
    j["lambda_star"] = s.lambda_star;
    j["mu_star"] = s.mu_star;
    j["a"] = s.scalings.a;
    j["b"] = s.scalings.b;
    j["y"] = s.scalings.y;
    j["brackets"] = {{"lambda", interval_json(s.scalings.lambda_lo, s.scalings.lambda_hi)},
                     {"mu", interval_json(s.scalings.mu_lo, s.scalings.mu_hi)},
                     {"y_floor", s.scalings.y_floor}};
    j["residuals"] = {{"decoupled_U", s.residuals.decoupled_U},
                      {"decoupled_V", s.residuals.decoupled_V},
                      {"map_f", s.residuals.map_f},
                      {"map_g", s.residuals.map_g},
                      {"lambda_consistency", s.residuals.lambda_consistency}};
    j["iterations"] = s.trace.records.size();
    j["bisections"] = s.bisections;
    j["wall_time_s"] = wall_time_s;
    j["checks"] = checks_json(checks);
    j["all_checks_pass"] = gating_checks_pass(checks);
    j["bounds"] = {{"sigma", s.trace.bounds.sigma},
                   {"gamma", s.trace.bounds.gamma},
                   {"delta", s.trace.bounds.delta},
                   {"epsilon", s.trace.bounds.epsilon}};
    json scan = json::array();
    for (const auto& g : s.scan)
        scan.push_back({{"r", g.r}, {"lambda", real(g.lambda)}, {"mu", real(g.mu)}, {"gap", real(g.gap)}, {"error", g.error}});
    j["scan"] = scan;
    if (cfg.trace) {
        json tr = json::array();
        for (const auto& r : s.trace.records)
            tr.push_back({{"n", r.n},
                          {"lambda", r.lambda},
                          {"mu", r.mu},
                          {"y", r.y},
                          {"sup_diff_U", r.sup_diff_U},
                          {"sup_diff_V", r.sup_diff_V},
                          {"max_N_Z", r.max_N_Z},
                          {"max_N_W", r.max_N_W},
                          {"ratio", real(r.ratio)},
                          {"brackets_hold", r.brackets_hold}});
        j["trace"] = tr;
    }
    j["U"] = funcrep_json(s.pair_star.U);
    j["V"] = funcrep_json(s.pair_star.V);
    return j.dump(2) + "\n";
}

std::string error_json(const RunConfig& cfg, const Error& e) {
    json j;
    j["schema"] = schema_name;
    j["version"] = result_schema_version;
    j["status"] = "error";
    j["config"] = config_json(cfg);
    j["error"] = {{"kind", to_string(e.kind())}, {"exit_code", exit_code_for(e.kind())}, {"message", e.what()}};
    return j.dump(2) + "\n";
}

std::string fixed_point_csv(const SolveResult& s, int grid_out) {
    const double r = s.r_star, rho = s.rho;
    const FuncRep& U = s.pair_star.U;
    const FuncRep& V = s.pair_star.V;
    const RootMap Z = make_Z(U, r, s.scalings.y, rho);
    const RootMap W = make_W(V, r, s.scalings.lambda, rho);
    auto cell = [](bool ok, auto&& value) { return ok ? format_real(value()) : std::string(); };

    std::ostringstream os;
    os << "x,f,g,U,V,N_Z,N_W\n";
    for (double x : Interval(-1.0, r).uniform_grid(grid_out)) {
        os << format_real(x) << ','
           << cell(x <= 0.0, [&] { return s.map.f(x); }) << ','
           << cell(x >= 0.0, [&] { return s.map.g(x); }) << ','
           << cell(U.domain().contains(x), [&] { return U(x); }) << ','
           << cell(V.domain().contains(x), [&] { return V(x); }) << ','
           << cell(x > Z.domain().lo && x < Z.domain().hi, [&] { return Z.nonlinearity(x); }) << ','
           << cell(x > W.domain().lo && x < W.domain().hi, [&] { return W.nonlinearity(x); }) << '\n';
    }
    return os.str();
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream os;
    os << "rho,r,lambda,mu,gap,error\n";
    for (const auto& c : cells)
        os << format_real(c.rho) << ',' << format_real(c.sample.r) << ',' << format_real(c.sample.lambda) << ','
           << format_real(c.sample.mu) << ',' << format_real(c.sample.gap) << ',' << csv_field(c.sample.error) << '\n';
    return os.str();
}

std::vector<SweepCell> run_sweep(const std::vector<double>& rhos, const std::vector<double>& rs,
                                 const FixedPointOptions& opt, int jobs) {
    std::vector<SweepCell> cells;
    for (double rho : rhos)
        for (double r : rs) {
            SweepCell c;
            c.rho = rho;
            c.sample.r = r;
            cells.push_back(c);
        }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cells.size();) {
            try {
                cells[i].sample = scaling_gap_sample(cells[i].sample.r, cells[i].rho, opt);
            } catch (const std::exception& e) {
                cells[i].sample.lambda = cells[i].sample.mu = cells[i].sample.gap = std::nan("");
                cells[i].sample.error = e.what();
            }
        }
    };
    const int n = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return cells;
}

StoredResult parse_result(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("result file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("schema") || j["schema"] != schema_name)
        fail(ErrorKind::parse, "not a lorenz fixed-point result file");
    if (integer(j, "version") != result_schema_version)
        fail(ErrorKind::parse, "unsupported result schema version " + field(j, "version").dump());
    if (field(j, "status") != "ok") fail(ErrorKind::parse, "result file records a failed run");

    const json& c = field(j, "config");
    RunConfig cfg;
    cfg.rho = number(c, "rho");
    cfg.degree = integer(c, "degree");
    cfg.iterate_tol = number(c, "iterate_tol");
    cfg.tol_r = number(c, "tol_r");
    std::tie(cfg.bracket_lo, cfg.bracket_hi) = pair_of(c, "bracket");
    cfg.max_iter = integer(c, "max_iter");
    cfg.grid_out = integer(c, "grid_out");
    cfg.trace = boolean(c, "trace");
    cfg.strict_class = boolean(c, "strict_class");
    cfg.emit.clear();
    const json& emit = field(c, "emit");
    if (!emit.is_array()) fail(ErrorKind::parse, "field 'emit' is not an array");
    for (const auto& e : emit) {
        if (!e.is_string()) fail(ErrorKind::parse, "field 'emit' holds a non-string");
        cfg.emit.insert(e.get<std::string>());
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        fail(ErrorKind::parse, std::string("stored config is invalid: ") + e.what());
    }

    const double r_star = number(j, "r_star");
    return StoredResult{cfg, EpsteinPair{funcrep_of(j, "U"), funcrep_of(j, "V"), r_star, cfg.rho}, r_star,
                        number(j, "lambda_star")};
}

int cmd_solve(const RunConfig& cfg) {
    try {
        cfg.validate();
    } catch (const Error& e) {
        std::cerr << "lorenz_fp: " << e.what() << '\n';
        return exit_config;
    }
    const fs::path json_path = cfg.output_dir / "result.json";
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const SolveResult s = find_critical_r(cfg.rho, Interval(cfg.bracket_lo, cfg.bracket_hi), cfg.options());
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto checks = audit(s, cfg.options());
        const bool green = gating_checks_pass(checks);
        if (cfg.emit.count("json")) write_file(json_path, result_json(cfg, s, checks, wall));
        if (cfg.emit.count("csv")) write_file(cfg.output_dir / "fixed_point.csv", fixed_point_csv(s, cfg.grid_out));

        std::cout << "rho=" << format_real(cfg.rho) << " r_star=" << format_real(s.r_star)
                  << " lambda=" << format_real(s.lambda_star) << " mu=" << format_real(s.mu_star)
                  << " iterations=" << s.trace.records.size() << " bisections=" << s.bisections
                  << " wall_time_s=" << format_real(wall) << '\n';
        print_checks(std::cout, checks);
        return green ? exit_ok : exit_verification;
    } catch (const Error& e) {
        std::cerr << "lorenz_fp: " << to_string(e.kind()) << ": " << e.what() << '\n';
        if (cfg.emit.count("json")) {
            try {
                write_file(json_path, error_json(cfg, e));
            } catch (const Error&) {
            }
        }
        return exit_code_for(e.kind());
    }
}

int cmd_verify(const fs::path& result_path, const fs::path& output_dir, std::optional<double> tol_r,
               bool strict_class) {
    StoredResult stored = [&] {
        try {
            return parse_result(read_file(result_path));
        } catch (const Error& e) {
            std::cerr << "lorenz_fp: " << to_string(e.kind()) << ": " << e.what() << '\n';
            throw;
        }
    }();
    FixedPointOptions opt = stored.config.options();
    if (tol_r) opt.tol_r = *tol_r;
    opt.strict_class = strict_class || stored.config.strict_class;

    std::vector<Check> checks;
    std::string failure;
    try {
        const SolveResult s = assess_pair(stored.pair, opt);
        checks = audit(s, opt);
        const double drift = std::abs(s.lambda_star - stored.lambda_star);
        checks.push_back({"stored_lambda_reproduced", drift <= lambda_consistency_limit, drift, lambda_consistency_limit, true});
    } catch (const Error& e) {
        failure = std::string(to_string(e.kind())) + ": " + e.what();
    }
    const bool ok = failure.empty() && gating_checks_pass(checks);

    json report;
    report["result"] = result_path.string();
    report["passed"] = ok;
    report["checks"] = checks_json(checks);
    if (!failure.empty()) report["failure"] = failure;
    write_file(output_dir / "verify.json", report.dump(2) + "\n");

    std::cout << "verify " << result_path.string() << ": " << (ok ? "pass" : "FAIL") << '\n';
    print_checks(std::cout, checks);
    if (!failure.empty()) std::cout << "  BREACH re-derivation failed: " << failure << '\n';
    return ok ? exit_ok : exit_verification;
}

int cmd_sweep(const std::vector<double>& rhos, const std::vector<double>& rs, const RunConfig& cfg, int jobs) {
    try {
        if (rhos.empty()) fail(ErrorKind::usage, "sweep needs at least one rho");
        if (rs.empty()) fail(ErrorKind::usage, "sweep needs a non-empty r grid");
        for (double rho : rhos)
            if (!(rho > 1.0)) fail(ErrorKind::usage, "rho must exceed 1, got " + format_real(rho));
        for (double r : rs)
            if (!(r > 0.0)) fail(ErrorKind::usage, "r must be positive, got " + format_real(r));
        RunConfig probe = cfg;
        probe.rho = rhos.front();
        probe.validate();
    } catch (const Error& e) {
        std::cerr << "lorenz_fp: " << e.what() << '\n';
        return exit_config;
    }
    const auto cells = run_sweep(rhos, rs, cfg.options(), jobs);
    const std::string csv = sweep_csv(cells);
    write_file(cfg.output_dir / "sweep.csv", csv);
    std::cout << csv;
    return exit_ok;
}

int run(int argc, char** argv) {
    CLI::App app{"Renormalization fixed points of Lorenz maps of type ({0,1},{1,0,0})", "lorenz_fp"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string out_flag;
    std::vector<std::string> emit;
    std::vector<double> bracket;

    auto* solve = app.add_subcommand("solve", "Find r with lambda = mu and reconstruct the fixed-point map");
    solve->add_option("--rho", cfg.rho, "Critical order (> 1)")->capture_default_str();
    solve->add_option("--degree", cfg.degree, "Chebyshev degree of U and V, in [16, 512]")->capture_default_str();
    solve->add_option("--iterate-tol", cfg.iterate_tol, "Sup-norm tolerance of the T_r iteration")->capture_default_str();
    solve->add_option("--tol-r", cfg.tol_r, "Matching tolerance for lambda = mu")->capture_default_str();
    solve->add_option("--bracket", bracket, "r search bracket: LO HI")->expected(2);
    solve->add_option("--max-iter", cfg.max_iter, "Iteration cap per r")->capture_default_str();
    solve->add_option("--grid-out", cfg.grid_out, "Rows of fixed_point.csv")->capture_default_str();
    solve->add_option("--output-dir", out_flag, std::string("Output directory (env ") + output_dir_env + ")");
    solve->add_option("--emit", emit, "Outputs to write: json, csv")->delimiter(',');
    solve->add_flag("--trace", cfg.trace, "Include the per-iterate trace in result.json");
    solve->add_flag("--strict-class", cfg.strict_class, "Treat nonlinearity-class breaches as errors");

    std::string result_path;
    std::optional<double> verify_tol_r;
    bool verify_strict = false;
    auto* verify = app.add_subcommand("verify", "Re-derive residuals and invariants from a stored result.json");
    verify->add_option("result", result_path, "Path to result.json")->required();
    verify->add_option("--output-dir", out_flag, "Directory for verify.json");
    verify->add_option("--tol-r", verify_tol_r, "Override the stored matching tolerance");
    verify->add_flag("--strict-class", verify_strict, "Treat nonlinearity-class breaches as failures");

    std::vector<double> rhos, rs, r_range;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    auto* sweep = app.add_subcommand("sweep", "Tabulate lambda - mu over a (rho, r) grid");
    sweep->add_option("--rho", rhos, "Comma-separated critical orders")->delimiter(',')->required();
    auto* r_list = sweep->add_option("--r", rs, "Comma-separated r values")->delimiter(',');
    sweep->add_option("--r-range", r_range, "LO HI N: N evenly spaced r values")->expected(3)->excludes(r_list);
    sweep->add_option("--degree", cfg.degree)->capture_default_str();
    sweep->add_option("--iterate-tol", cfg.iterate_tol)->capture_default_str();
    sweep->add_option("--max-iter", cfg.max_iter)->capture_default_str();
    sweep->add_option("--output-dir", out_flag, std::string("Output directory (env ") + output_dir_env + ")");
    sweep->add_option("--jobs", jobs, "Worker threads")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    cfg.output_dir = resolve_output_dir(out_flag);
    try {
        if (*solve) {
            if (!bracket.empty()) {
                cfg.bracket_lo = bracket[0];
                cfg.bracket_hi = bracket[1];
            }
            if (!emit.empty()) cfg.emit = {emit.begin(), emit.end()};
            return cmd_solve(cfg);
        }
        if (*verify) return cmd_verify(result_path, cfg.output_dir, verify_tol_r, verify_strict);
        if (!r_range.empty()) {
            const double n = r_range[2];
            if (!(n >= 1.0) || n != std::floor(n)) fail(ErrorKind::usage, "--r-range count must be a positive integer");
            if (n == 1.0) rs = {r_range[0]};
            else if (r_range[0] < r_range[1]) rs = Interval(r_range[0], r_range[1]).uniform_grid(static_cast<int>(n));
            else fail(ErrorKind::usage, "--r-range needs LO < HI");
        }
        return cmd_sweep(rhos, rs, cfg, jobs);
    } catch (const Error& e) {
        std::cerr << "lorenz_fp: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
}

}  // namespace lorenz::cli
