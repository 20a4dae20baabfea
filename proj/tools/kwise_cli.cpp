// Command-line front end: graph generation, simulation, limit-law tables,
// independence checks, goodness-of-fit batteries, and reproducible preset
// experiments. Talks to the core exclusively through the C API.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kwise/kwise.h"

using nlohmann::json;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitRejected = 3;

const std::vector<double> kAlphas = {0.10, 0.05, 0.01, 0.001};

[[noreturn]] void die(int exit_code, const std::string& kind, const std::string& message) {
    json err;
    err["error"] = {{"code", exit_code}, {"kind", kind}, {"message", message}};
    std::cerr << err.dump() << "\n";
    std::exit(exit_code);
}

// Maps a failed kw_status to the documented exit codes.
void check(kw_status status) {
    switch (status) {
        case KW_OK: return;
        case KW_ERR_INVALID_ARGUMENT: die(kExitValidation, "validation", kw_last_error());
        case KW_ERR_NUMERIC: die(kExitNumeric, "numeric", kw_last_error());
        default: die(kExitNumeric, "internal", kw_last_error());
    }
}

// Shortest round-trip decimal form; stable across runs and thread counts.
std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& payload) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : payload) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) die(kExitValidation, "validation", "cannot open '" + path + "' for writing");
    out << content;
    if (!out) die(kExitValidation, "validation", "write failed for '" + path + "'");
}

void emit(const std::optional<std::string>& path, const std::string& content) {
    if (path)
        write_file(*path, content);
    else
        std::cout << content;
}

struct MarginHandle {
    kw_margin* ptr = nullptr;
    ~MarginHandle() { kw_margin_free(ptr); }
};

struct LawHandle {
    kw_law* ptr = nullptr;
    explicit LawHandle(const std::string& spec) { check(kw_law_create(spec.c_str(), &ptr)); }
    ~LawHandle() { kw_law_free(ptr); }
};

struct GraphHandle {
    kw_graph* ptr = nullptr;
    GraphHandle(const std::string& family, long long param) {
        check(kw_graph_create(family.c_str(), param, &ptr));
    }
    ~GraphHandle() { kw_graph_free(ptr); }
};

struct GridSpec {
    double lo = -6.0, hi = 6.0, step = 0.01;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec grid;
    std::stringstream stream(text);
    std::string part;
    std::vector<double> parts;
    while (std::getline(stream, part, ':')) parts.push_back(std::stod(part));
    if (parts.size() != 3) die(kExitValidation, "validation", "grid must be lo:hi:step");
    grid.lo = parts[0];
    grid.hi = parts[1];
    grid.step = parts[2];
    if (!(grid.step > 0.0) || grid.hi < grid.lo)
        die(kExitValidation, "validation", "grid must satisfy lo <= hi, step > 0");
    return grid;
}

// ---- experiment configs -------------------------------------------------

// Two kinds of experiment: "simulate" (samples + optional GOF battery) and
// "limit_tables" (pdf/cdf grids for a list of laws).
json preset_config(const std::string& name) {
    json cfg;
    const auto sim = [&](const char* family, long long param, int ell, json margin, long long reps,
                         bool fast, json tests, const std::string& law) {
        cfg["kind"] = "simulate";
        cfg["family"] = family;
        cfg["param"] = param;
        cfg["ell"] = ell;
        cfg["margin"] = std::move(margin);
        cfg["replications"] = reps;
        cfg["fast_path"] = fast;
        cfg["tests"] = std::move(tests);
        cfg["reference_law"] = law;
    };
    if (name == "figure2") {
        cfg["kind"] = "limit_tables";
        cfg["laws"] = {"s-limit:ell=2,r=0.6", "s-limit:ell=2,r=0.8", "s-limit:ell=2,r=0.99"};
        cfg["grid"] = {{"lo", -6.0}, {"hi", 6.0}, {"step", 0.01}};
    } else if (name == "figure3") {
        cfg["kind"] = "limit_tables";
        cfg["laws"] = {"s-limit:ell=2,r=0.99", "s-limit:ell=4,r=0.99", "s-limit:ell=6,r=0.99"};
        cfg["grid"] = {{"lo", -6.0}, {"hi", 6.0}, {"step", 0.01}};
    } else if (name == "section5") {
        sim("cage", 7, 2, json{{"name", "uniform01"}}, 5000, false, {"ks", "ad", "chi2"},
            "gaussian");
    } else if (name == "theorem2-convergence") {
        sim("bipartite", 300, 2, nullptr, 100000, true, {"ks"}, "vg:ell=2");
    } else if (name == "theorem3-convergence") {
        sim("two_hub", 400, 2, nullptr, 100000, true, {"ks"}, "two-hub-mixture:r=1");
    } else if (name == "hypercube-clt") {
        sim("hypercube", 8, 2, nullptr, 5000, false, {"ks", "ad"}, "gaussian");
    } else if (name == "fan-clt") {
        sim("fan", 500, 2, nullptr, 5000, true, {"ks", "ad"}, "gaussian");
    } else {
        die(kExitValidation, "validation",
            "unknown preset '" + name +
                "' (expected figure2|figure3|section5|theorem2-convergence|"
                "theorem3-convergence|hypercube-clt|fan-clt)");
    }
    return cfg;
}

json gof_report_json(const kw_gof_report& report) {
    json decisions = json::array();
    for (const double alpha : kAlphas)
        decisions.push_back({{"alpha", alpha}, {"reject", report.p_value < alpha}});
    return json{{"test", report.test_name},
                {"statistic", report.statistic},
                {"p_value", report.p_value},
                {"sample_size", report.sample_size},
                {"reference_law", report.reference_law},
                {"decisions", decisions}};
}

// Runs the configured GOF battery over one column of samples.
json run_gof_battery(const std::vector<double>& xs, const std::vector<std::string>& tests,
                     const std::string& law_spec, int bins, bool& any_reject, double assert_alpha) {
    LawHandle law(law_spec);
    json reports = json::array();
    for (const std::string& test : tests) {
        kw_gof_report report;
        if (test == "ks") {
            check(kw_gof_ks(xs.data(), xs.size(), law.ptr, &report));
        } else if (test == "ad") {
            check(kw_gof_ad_normal(xs.data(), xs.size(), &report));
        } else if (test == "chi2") {
            check(kw_gof_chi2(xs.data(), xs.size(), law.ptr, bins, &report));
        } else {
            die(kExitValidation, "validation", "unknown test '" + test + "' (ks|ad|chi2)");
        }
        if (report.p_value < assert_alpha) any_reject = true;
        reports.push_back(gof_report_json(report));
    }
    return reports;
}

std::string simulate_csv(const json& cfg, const std::string& config_hash,
                         std::vector<double>& xi_std_out, std::vector<double>& s_n_out) {
    MarginHandle margin;
    const bool has_margin = cfg.contains("margin") && !cfg["margin"].is_null();
    if (has_margin) {
        const auto& m = cfg["margin"];
        if (m.contains("quantile_table")) {
            if (m.contains("ell") && m["ell"].get<int>() != cfg["ell"].get<int>())
                die(kExitValidation, "validation",
                    "margin config ell disagrees with the experiment ell");
            std::vector<double> probs, values;
            for (const auto& knot : m["quantile_table"]) {
                probs.push_back(knot.at(0).get<double>());
                values.push_back(knot.at(1).get<double>());
            }
            check(kw_margin_create_table(probs.data(), values.data(), probs.size(),
                                         cfg["ell"].get<int>(), &margin.ptr));
        } else {
            check(kw_margin_create(m.at("name").get<std::string>().c_str(), cfg["ell"].get<int>(),
                                   &margin.ptr));
        }
    }

    kw_sim_spec spec{};
    const std::string family = cfg["family"].get<std::string>();
    spec.family = family.c_str();
    spec.param = cfg["param"].get<long long>();
    spec.ell = cfg["ell"].get<int>();
    spec.margin = margin.ptr;
    spec.replications = cfg["replications"].get<long long>();
    spec.seed = cfg["seed"].get<std::uint64_t>();
    spec.fast_path = cfg.value("fast_path", false) ? 1 : 0;
    spec.threads = 0;

    const std::size_t reps = static_cast<std::size_t>(spec.replications);
    std::vector<long long> xi(reps);
    xi_std_out.assign(reps, 0.0);
    s_n_out.clear();
    if (has_margin) s_n_out.assign(reps, 0.0);
    long long n_edges = 0;
    check(kw_simulate(&spec, xi.data(), xi_std_out.data(), has_margin ? s_n_out.data() : nullptr,
                      &n_edges));

    std::string csv;
    csv.reserve(reps * 32);
    csv += "# config_hash=" + config_hash + "\n";
    csv += "rep_index,xi_count,xi_std,s_n\n";
    for (std::size_t i = 0; i < reps; ++i) {
        csv += std::to_string(i);
        csv += ',';
        csv += std::to_string(xi[i]);
        csv += ',';
        csv += fmt(xi_std_out[i]);
        csv += ',';
        if (has_margin) csv += fmt(s_n_out[i]);
        csv += '\n';
    }
    return csv;
}

std::string law_table_csv(const std::string& law_spec, const GridSpec& grid,
                          const std::string& config_hash) {
    LawHandle law(law_spec);
    const std::size_t count =
        static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step + 0.5)) + 1;
    std::vector<double> pdf(count), cdf(count);
    std::size_t written = 0;
    double pdf_clip = 0.0, cdf_repair = 0.0;
    check(kw_law_tabulate(law.ptr, grid.lo, grid.hi, grid.step, pdf.data(), cdf.data(), count,
                          &written, &pdf_clip, &cdf_repair));
    std::string csv;
    csv += "# config_hash=" + config_hash + "\n";
    csv += "# law=" + law_spec + "\n";
    csv += "# pdf_clip=" + fmt(pdf_clip) + " cdf_repair=" + fmt(cdf_repair) + "\n";
    csv += "x,pdf,cdf\n";
    for (std::size_t i = 0; i < written; ++i) {
        csv += fmt(grid.lo + grid.step * static_cast<double>(i));
        csv += ',';
        csv += fmt(pdf[i]);
        csv += ',';
        csv += fmt(cdf[i]);
        csv += '\n';
    }
    return csv;
}

std::string law_file_stem(const std::string& spec) {
    std::string stem = spec;
    for (char& c : stem)
        if (c == ':' || c == ',' || c == '=') c = '_';
    return stem;
}

// Executes a full experiment config; returns the process exit code.
int run_experiment(json cfg, const std::string& out_dir, double assert_alpha, bool assert_mode) {
    if (!cfg.contains("seed"))
        die(kExitValidation, "validation", "config needs an explicit seed (no wall-clock default)");
    const auto started = std::chrono::steady_clock::now();
    const std::string config_hash = fnv1a_hex(cfg.dump());
    const std::string prefix = out_dir.empty() ? std::string{} : out_dir + "/";
    std::vector<std::string> outputs;
    bool any_reject = false;

    const std::string kind = cfg.value("kind", "simulate");
    if (kind == "limit_tables") {
        GridSpec grid;
        grid.lo = cfg["grid"]["lo"].get<double>();
        grid.hi = cfg["grid"]["hi"].get<double>();
        grid.step = cfg["grid"]["step"].get<double>();
        for (const auto& law : cfg["laws"]) {
            const std::string spec = law.get<std::string>();
            const std::string name = "table_" + law_file_stem(spec) + ".csv";
            write_file(prefix + name, law_table_csv(spec, grid, config_hash));
            outputs.push_back(name);
        }
    } else if (kind == "simulate") {
        std::vector<double> xi_std, s_n;
        const std::string samples_name = "samples.csv";
        write_file(prefix + samples_name, simulate_csv(cfg, config_hash, xi_std, s_n));
        outputs.push_back(samples_name);

        if (cfg.contains("tests") && !cfg["tests"].empty()) {
            const std::vector<double>& column = s_n.empty() ? xi_std : s_n;
            std::vector<std::string> tests;
            for (const auto& t : cfg["tests"]) tests.push_back(t.get<std::string>());
            json gof;
            gof["config_hash"] = config_hash;
            gof["column"] = s_n.empty() ? "xi_std" : "s_n";
            gof["reference_law"] = cfg["reference_law"].get<std::string>();
            gof["reports"] = run_gof_battery(column, tests, cfg["reference_law"].get<std::string>(),
                                             cfg.value("bins", 0), any_reject, assert_alpha);
            const std::string gof_name = "gof.json";
            write_file(prefix + gof_name, gof.dump(2) + "\n");
            outputs.push_back(gof_name);
        }
    } else {
        die(kExitValidation, "validation", "unknown config kind '" + kind + "'");
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest;
    manifest["config"] = cfg;
    manifest["config_hash"] = config_hash;
    manifest["outputs"] = outputs;
    manifest["seed"] = cfg["seed"];
    manifest["tool_version"] = kw_version();
    manifest["wall_time_s"] = wall;
    write_file(prefix + "manifest.json", manifest.dump(2) + "\n");

    std::cout << "config_hash=" << config_hash << " outputs=" << outputs.size() + 1 << "\n";
    return (assert_mode && any_reject) ? kExitRejected : 0;
}

// ---- CSV input for the gof subcommand -----------------------------------

std::vector<double> read_csv_column(const std::string& path, const std::string& column,
                                    std::string* input_hash) {
    std::ifstream in(path);
    if (!in) die(kExitValidation, "validation", "cannot read '" + path + "'");
    std::string line;
    std::vector<std::string> header;
    std::vector<double> values;
    std::size_t column_index = SIZE_MAX;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("config_hash=");
            if (pos != std::string::npos && input_hash) *input_hash = line.substr(pos + 12);
            continue;
        }
        std::stringstream stream(line);
        std::string cell;
        if (header.empty()) {
            while (std::getline(stream, cell, ',')) header.push_back(cell);
            for (std::size_t i = 0; i < header.size(); ++i)
                if (header[i] == column) column_index = i;
            if (column_index == SIZE_MAX)
                die(kExitValidation, "validation", "column '" + column + "' not in " + path);
            continue;
        }
        std::size_t i = 0;
        bool found = false;
        while (std::getline(stream, cell, ',')) {
            if (i++ == column_index) {
                if (cell.empty())
                    die(kExitValidation, "validation",
                        "column '" + column + "' is empty in " + path);
                try {
                    values.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    die(kExitValidation, "validation",
                        "cannot parse '" + cell + "' in column '" + column + "' of " + path);
                }
                found = true;
            }
        }
        if (!found && column_index == header.size() - 1)
            die(kExitValidation, "validation", "column '" + column + "' is empty in " + path);
    }
    if (values.empty()) die(kExitValidation, "validation", "no rows in '" + path + "'");
    return values;
}

}  // namespace

int run_cli(int argc, char** argv);

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::exception& e) {
        die(kExitValidation, "validation", e.what());
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Graph-based K-tuplewise independent sequence toolkit"};
    app.require_subcommand(1);

    // graphgen
    auto* graphgen = app.add_subcommand("graphgen", "Generate a family graph as JSON");
    std::string gg_family;
    long long gg_param = 1;
    std::string gg_out;
    graphgen->add_option("--family", gg_family, "bipartite|two_hub|hypercube|fan|cage")
        ->required();
    graphgen->add_option("--param", gg_param, "family parameter m (or prime q for cage)")
        ->required();
    graphgen->add_option("--out", gg_out, "output path (default: stdout)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Draw replications of (Xi, xi, S_n)");
    std::string sim_family, sim_margin, sim_margin_config, sim_out;
    long long sim_param = 1, sim_reps = 0;
    int sim_ell = 2;
    std::uint64_t sim_seed = 0;
    bool sim_fast = false;
    simulate->add_option("--family", sim_family, "graph family")->required();
    simulate->add_option("--param", sim_param, "family parameter")->required();
    simulate->add_option("--ell", sim_ell, "label alphabet size (>= 2)");
    simulate->add_option("--margin", sim_margin, "bernoulli|uniform01|normal");
    simulate->add_option("--margin-config", sim_margin_config,
                         "JSON file with a quantile_table margin");
    simulate->add_option("--reps", sim_reps, "replications")->required();
    simulate->add_option("--seed", sim_seed, "RNG seed (required; no wall-clock default)")
        ->required();
    simulate->add_flag("--fast", sim_fast, "use the distributional fast path");
    simulate->add_option("--out", sim_out, "output CSV (default: stdout)");

    // limit
    auto* limit = app.add_subcommand("limit", "Tabulate a limit law's pdf/cdf");
    std::string limit_law = "gaussian", limit_grid = "-6:6:0.01", limit_out;
    limit->add_option("--law", limit_law,
                      "gaussian | vg:ell=k | vg:n=k,s=x | s-limit:ell=k,r=x | "
                      "two-hub-mixture:r=x");
    limit->add_option("--grid", limit_grid, "lo:hi:step");
    limit->add_option("--out", limit_out, "output CSV (default: stdout)");

    // independence
    auto* indep = app.add_subcommand("independence", "Exact or sampled K-wise checks");
    std::string ind_family, ind_out;
    long long ind_param = 1, ind_tuples = 200, ind_reps = 100000;
    int ind_ell = 2, ind_k = 3;
    bool ind_sampled = false, ind_assert = false;
    std::uint64_t ind_seed = 0;
    double ind_alpha = 0.05;
    indep->add_option("--family", ind_family, "graph family")->required();
    indep->add_option("--param", ind_param, "family parameter")->required();
    indep->add_option("--ell", ind_ell, "label alphabet size");
    indep->add_option("--k", ind_k, "tuple size K")->required();
    indep->add_flag("--sampled", ind_sampled, "chi-squared spot check instead of enumeration");
    indep->add_option("--tuples", ind_tuples, "sampled: number of random K-subsets");
    indep->add_option("--reps", ind_reps, "sampled: label replications");
    indep->add_option("--seed", ind_seed, "sampled: RNG seed");
    indep->add_option("--alpha", ind_alpha, "sampled: family-wise level before Bonferroni");
    indep->add_flag("--assert", ind_assert, "exit 3 when dependence is detected");
    indep->add_option("--out", ind_out, "output JSON (default: stdout)");

    // gof
    auto* gof = app.add_subcommand("gof", "Goodness-of-fit battery over a samples CSV");
    std::string gof_input, gof_column = "s_n", gof_law = "gaussian", gof_tests = "ks,ad,chi2";
    std::string gof_out, gof_expect_hash;
    int gof_bins = 0;
    double gof_assert_alpha = 0.0;
    gof->add_option("--input", gof_input, "samples CSV")->required();
    gof->add_option("--column", gof_column, "column to test (xi_std or s_n)");
    gof->add_option("--law", gof_law, "reference law spec");
    gof->add_option("--tests", gof_tests, "comma list from ks,ad,chi2");
    gof->add_option("--bins", gof_bins, "chi2 bins (default: ceil(2 n^0.4))");
    gof->add_option("--expect-config-hash", gof_expect_hash,
                    "reject the input unless its config hash matches");
    gof->add_option("--assert", gof_assert_alpha, "exit 3 on rejection at this alpha");
    gof->add_option("--out", gof_out, "output JSON (default: stdout)");

    // run
    auto* run = app.add_subcommand("run", "Run a preset or config-file experiment");
    std::string run_preset, run_config, run_out_dir;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    double run_assert_alpha = 0.001;
    bool run_assert = false;
    run->add_option("--preset", run_preset,
                    "figure2|figure3|section5|theorem2-convergence|theorem3-convergence|"
                    "hypercube-clt|fan-clt");
    run->add_option("--config", run_config, "experiment config JSON");
    run->add_option("--seed", run_seed, "RNG seed (required with --preset)")
        ->each([&](const std::string&) { run_seed_set = true; });
    run->add_option("--out-dir", run_out_dir, "output directory (must exist)");
    run->add_flag("--assert", run_assert, "exit 3 when any configured test rejects");
    run->add_option("--assert-alpha", run_assert_alpha, "rejection level for --assert");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the usage message
        return code == 0 ? 0 : kExitValidation;
    }

    if (graphgen->parsed()) {
        GraphHandle g(gg_family, gg_param);
        std::size_t len = 0;
        check(kw_graph_to_json(g.ptr, nullptr, 0, &len));
        std::string buf(len, '\0');
        check(kw_graph_to_json(g.ptr, buf.data(), buf.size(), &len));
        buf.resize(len - 1);
        emit(gg_out.empty() ? std::nullopt : std::optional(gg_out), buf + "\n");
        return 0;
    }

    if (simulate->parsed()) {
        json cfg;
        cfg["kind"] = "simulate";
        cfg["family"] = sim_family;
        cfg["param"] = sim_param;
        cfg["ell"] = sim_ell;
        if (!sim_margin_config.empty()) {
            std::ifstream in(sim_margin_config);
            if (!in)
                die(kExitValidation, "validation",
                    "cannot read margin config '" + sim_margin_config + "'");
            json m;
            try {
                in >> m;
            } catch (const std::exception& e) {
                die(kExitValidation, "validation", std::string("margin config: ") + e.what());
            }
            cfg["margin"] = m;
        } else if (!sim_margin.empty()) {
            cfg["margin"] = {{"name", sim_margin}};
        } else {
            cfg["margin"] = nullptr;
        }
        cfg["replications"] = sim_reps;
        cfg["seed"] = sim_seed;
        cfg["fast_path"] = sim_fast;
        const std::string hash = fnv1a_hex(cfg.dump());
        std::vector<double> xi_std, s_n;
        const std::string csv = simulate_csv(cfg, hash, xi_std, s_n);
        emit(sim_out.empty() ? std::nullopt : std::optional(sim_out), csv);
        return 0;
    }

    if (limit->parsed()) {
        const GridSpec grid = parse_grid(limit_grid);
        json cfg;
        cfg["kind"] = "limit_tables";
        cfg["laws"] = {limit_law};
        cfg["grid"] = {{"lo", grid.lo}, {"hi", grid.hi}, {"step", grid.step}};
        const std::string csv = law_table_csv(limit_law, grid, fnv1a_hex(cfg.dump()));
        emit(limit_out.empty() ? std::nullopt : std::optional(limit_out), csv);
        return 0;
    }

    if (indep->parsed()) {
        GraphHandle g(ind_family, ind_param);
        json out;
        bool dependent = false;
        if (ind_sampled) {
            kw_sampled_report report;
            check(kw_sampled_kwise_check(g.ptr, ind_ell, ind_k, ind_tuples, ind_reps, ind_seed,
                                         ind_alpha, &report));
            out = {{"mode", "sampled"},
                   {"tuple_size", report.tuple_size},
                   {"tuples", report.tuples},
                   {"rejected", report.rejected},
                   {"alpha", report.alpha},
                   {"rejected_fraction", report.rejected_fraction},
                   {"min_p_value", report.min_p_value}};
            dependent = report.rejected > 0;
        } else {
            kw_indep_report report;
            check(kw_exact_kwise_check(g.ptr, ind_ell, ind_k, 0, &report));
            out = {{"mode", "exact"},
                   {"tuple_size", report.tuple_size},
                   {"tuples_checked", report.tuples_checked},
                   {"independent", report.independent != 0},
                   {"max_abs_deviation", report.max_abs_deviation}};
            if (!report.independent) {
                json witness;
                witness["edges"] = std::vector<long long>(
                    report.witness_edges, report.witness_edges + report.witness_len);
                witness["outcome"] = std::vector<int>(report.witness_outcome,
                                                      report.witness_outcome + report.witness_len);
                witness["joint"] = report.witness_joint;
                witness["product"] = report.witness_product;
                out["witness"] = witness;
            }
            dependent = report.independent == 0;
        }
        emit(ind_out.empty() ? std::nullopt : std::optional(ind_out), out.dump(2) + "\n");
        return (ind_assert && dependent) ? kExitRejected : 0;
    }

    if (gof->parsed()) {
        std::string input_hash;
        const auto xs = read_csv_column(gof_input, gof_column, &input_hash);
        if (!gof_expect_hash.empty() && input_hash != gof_expect_hash)
            die(kExitValidation, "validation",
                "input config hash " + input_hash + " does not match expected " + gof_expect_hash);
        std::vector<std::string> tests;
        std::stringstream stream(gof_tests);
        std::string item;
        while (std::getline(stream, item, ',')) tests.push_back(item);
        bool any_reject = false;
        json out;
        out["input"] = gof_input;
        out["input_config_hash"] = input_hash;
        out["column"] = gof_column;
        out["reference_law"] = gof_law;
        out["reports"] = run_gof_battery(
            xs, tests, gof_law, gof_bins, any_reject,
            gof_assert_alpha > 0.0 ? gof_assert_alpha : 0.0);
        emit(gof_out.empty() ? std::nullopt : std::optional(gof_out), out.dump(2) + "\n");
        return (gof_assert_alpha > 0.0 && any_reject) ? kExitRejected : 0;
    }

    if (run->parsed()) {
        json cfg;
        if (!run_config.empty()) {
            std::ifstream in(run_config);
            if (!in) die(kExitValidation, "validation", "cannot read config '" + run_config + "'");
            try {
                in >> cfg;
            } catch (const std::exception& e) {
                die(kExitValidation, "validation", std::string("config: ") + e.what());
            }
            if (cfg.contains("preset")) {
                json expanded = preset_config(cfg["preset"].get<std::string>());
                for (const auto& [key, value] : cfg.items())
                    if (key != "preset") expanded[key] = value;
                cfg = std::move(expanded);
            }
        } else if (!run_preset.empty()) {
            cfg = preset_config(run_preset);
            if (!run_seed_set)
                die(kExitValidation, "validation", "--preset requires an explicit --seed");
            cfg["seed"] = run_seed;
        } else {
            die(kExitValidation, "validation", "run needs --preset or --config");
        }
        return run_experiment(std::move(cfg), run_out_dir, run_assert_alpha, run_assert);
    }

    return 0;
}
