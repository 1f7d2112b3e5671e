// Command-line front end: simulate datasets, restore them, tabulate results.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pstaic/bench.hpp"
#include "pstaic/tiff.hpp"

namespace fs = std::filesystem;
using namespace pstaic;
using bench::json;

namespace {

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kSolverFailure = 2;

// "min:max:count" or a comma-separated list
std::vector<double> parse_grid(const std::string& s) {
    if (s.find(':') != std::string::npos) {
        double lo = 0.0, hi = 0.0;
        std::size_t n = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(s);
        if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !in.eof()) {
            throw std::invalid_argument("bad sweep grid '" + s + "' (expected MIN:MAX:COUNT)");
        }
        return bench::log_grid(lo, hi, n);
    }
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size() || !(v > 0.0)) throw std::invalid_argument("bad lambda value '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty sweep grid");
    return out;
}

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << s;
}

struct RestoreArgs {
    std::string algo = "pstaic";
    double lambda = 0.05;
    std::string sweep;
    std::size_t refine = 0;
    double tau = RestoreConfig{}.tau.tau0;
    std::string tau_kind = "constant";
    bool tau_absolute = false;
    double rho = 1.0;
    std::size_t outer = RestoreConfig{}.outer_iterations;
    std::size_t inner = AdmmConfig{}.max_iterations;
    double tol = 0.0;
    double fixed_alpha = 0.5;
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    double na = 0.0;
    double wavelength = 0.0;
    double pixel = 0.0;
    std::string in;
    std::string truth;
    std::string out;
};

int cmd_restore(const RestoreArgs& a) {
    // Resolve every input before anything is written.
    const fs::path in(a.in);
    if (!fs::exists(in)) throw std::invalid_argument("dataset '" + a.in + "' does not exist");
    const fs::path dir = fs::is_directory(in) ? in : in.parent_path();
    const fs::path measured_path = fs::is_directory(in) ? in / "measured.tif" : in;
    if (!fs::is_regular_file(measured_path)) throw std::invalid_argument("no measurement at '" + measured_path.string() + "'");

    bench::DatasetSpec spec;
    const bool have_sidecar = fs::is_regular_file(dir / "dataset.json");
    if (have_sidecar) {
        spec = bench::read_sidecar(dir);
    } else {
        spec.id = measured_path.stem().string();
        if (!(a.na > 0.0)) throw std::invalid_argument("no dataset.json next to the input; pass --na");
    }
    if (a.na > 0.0) spec.degrade.na = a.na;
    if (a.wavelength > 0.0) spec.degrade.wavelength_nm = a.wavelength;
    if (a.pixel > 0.0) spec.degrade.pixel_nm = a.pixel;

    fs::path truth_path = a.truth;
    if (truth_path.empty() && fs::is_directory(in) && fs::is_regular_file(in / "truth.tif")) truth_path = in / "truth.tif";
    if (!truth_path.empty() && !fs::is_regular_file(truth_path)) {
        throw std::invalid_argument("truth '" + truth_path.string() + "' does not exist");
    }
    const std::vector<double> grid = a.sweep.empty() ? std::vector<double>{a.lambda} : parse_grid(a.sweep);
    if ((grid.size() > 1 || a.refine > 0) && truth_path.empty()) throw std::invalid_argument("--sweep needs a ground truth (--truth)");
    if (!(a.lambda > 0.0)) throw std::invalid_argument("--lambda must be > 0");

    RestoreConfig cfg;
    cfg.algorithm = parse_algorithm(a.algo);
    cfg.tau.tau0 = a.tau;
    if (a.tau_kind == "motion") {
        cfg.tau.kind = TauPolicy::Kind::MotionAdaptive;
    } else if (a.tau_kind != "constant") {
        throw std::invalid_argument("--tau-kind must be constant or motion");
    }
    cfg.tau.scale = a.tau_absolute ? TauPolicy::Scale::Absolute : TauPolicy::Scale::InitialRegularizer;
    cfg.admm.rho = a.rho;
    cfg.admm.max_iterations = a.inner;
    cfg.admm.primal_tolerance = a.tol;
    cfg.outer_iterations = a.outer;
    cfg.fixed_alpha = a.fixed_alpha;
    cfg.kappa1 = a.kappa1;
    cfg.kappa2 = a.kappa2;
    cfg.validate();

    const Volume2DT m = read_tiff(measured_path);
    const Kernel h = make_psf(spec.degrade);

    bench::SweepResult sw;
    bench::ResultRow row;
    row.phantom = spec.id;
    row.na = spec.degrade.na;
    row.algorithm = to_string(cfg.algorithm);
    if (!truth_path.empty()) {
        const Volume2DT truth = read_tiff(truth_path);
        sw = bench::sweep(m, truth, h, cfg, grid, {}, a.refine);
        row.input_snr_db = snr_db(truth, m);
    } else {
        const double scale = max_abs(m.values());
        if (!(scale > 0.0)) throw std::invalid_argument("measurement is identically zero");
        cfg.lambda = grid[0] * scale;
        bench::SweepPoint p;
        p.lambda_rel = grid[0];
        p.lambda = cfg.lambda;
        sw.best_report = restore(m, h, cfg);
        p.metrics = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
        p.alpha_final = sw.best_report.final_alpha();
        p.seconds = sw.best_report.seconds;
        sw.points.push_back(p);
        row.input_snr_db = std::numeric_limits<double>::quiet_NaN();
    }
    const auto& best = sw.points[sw.best];
    row.best_lambda = best.lambda_rel;
    row.snr_db = best.metrics.snr_db;
    row.ssim = best.metrics.ssim;
    row.alpha_final = best.alpha_final;
    row.runtime_seconds = best.seconds;

    json prov = {{"input", measured_path.string()}, {"lambda_grid", grid}};
    if (have_sidecar) prov["dataset"] = bench::to_json(spec);
    bench::write_job_outputs(a.out, row, sw, cfg, prov);

    std::printf("%s %s: lambda %.4g  alpha %.4f  SNR %.3f dB  SSIM %.4f  (%.2f s)\n", row.phantom.c_str(),
                row.algorithm.c_str(), row.best_lambda, row.alpha_final, row.snr_db, row.ssim, row.runtime_seconds);
    return kOk;
}

int cmd_simulate(const std::string& manifest, const std::string& sidecar, const std::string& out) {
    if (manifest.empty() == sidecar.empty()) throw std::invalid_argument("pass exactly one of --manifest or --sidecar");
    std::vector<bench::DatasetSpec> specs;
    if (!manifest.empty()) {
        specs = bench::load_manifest(manifest).datasets();
    } else {
        fs::path p(sidecar);
        specs.push_back(bench::read_sidecar(fs::is_directory(p) ? p : p.parent_path()));
    }
    for (const auto& s : specs) {
        const fs::path dir = fs::path(out) / bench::dataset_dir_name(s);
        bench::write_dataset(bench::simulate(s), dir);
        std::printf("%s\n", dir.string().c_str());
    }
    return kOk;
}

int cmd_report(const std::string& in, const std::string& format, const std::string& out, bool plots) {
    const auto fmt = bench::parse_format(format);
    const auto rows = bench::collect_results(in);
    const std::string table = bench::render(bench::compare(rows), fmt);
    if (out.empty()) {
        std::fputs(table.c_str(), stdout);
    } else {
        write_file(out, table);
    }
    if (plots) {
        for (const auto& e : fs::recursive_directory_iterator(in)) {
            if (!e.is_regular_file() || e.path().filename() != "result.json") continue;
            std::ifstream f(e.path());
            const json j = json::parse(f);
            const auto alpha = j.value("alpha_trajectory", std::vector<double>{});
            const auto cost = j.value("cost_trajectory", std::vector<double>{});
            const std::string title = j.at("phantom").get<std::string>() + " NA " + std::to_string(j.at("na").get<double>()).substr(0, 4) +
                                      " " + j.at("algorithm").get<std::string>();
            write_file(e.path().parent_path() / "trajectory.svg", bench::trajectory_svg(alpha, cost, title));
        }
    }
    return kOk;
}

int cmd_bench(const std::string& manifest, const std::string& out, std::size_t jobs) {
    auto m = bench::load_manifest(manifest);
    if (!out.empty()) m.output = out;
    if (jobs > 0) m.parallelism = jobs;
    const auto outcome = bench::run_manifest(m);
    const std::string table = bench::render(bench::compare(outcome.rows), bench::ReportFormat::Markdown);
    write_file(m.output / "report.md", table);
    std::fputs(table.c_str(), stdout);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint image and spatio-temporal weight restoration for 2D+time microscopy"};
    app.require_subcommand(1);

    std::string manifest, sidecar, sim_out;
    auto* sim = app.add_subcommand("simulate", "Generate phantoms and degraded measurements");
    sim->add_option("--manifest", manifest, "Job manifest (JSON)");
    sim->add_option("--sidecar", sidecar, "Regenerate one dataset from its dataset.json");
    sim->add_option("--out", sim_out, "Output directory")->required();

    RestoreArgs ra;
    auto* res = app.add_subcommand("restore", "Restore one dataset, optionally sweeping lambda");
    res->add_option("--algo", ra.algo, "pstaic | pictv | staic")->check(CLI::IsMember({"pstaic", "pictv", "staic"}));
    res->add_option("--lambda", ra.lambda, "Regularization weight relative to max |m|");
    res->add_option("--sweep", ra.sweep, "Lambda grid MIN:MAX:COUNT (log-spaced) or a comma list; best SNR wins");
    res->add_option("--refine", ra.refine, "Midpoint refinement rounds around the best sweep value");
    res->add_option("--tau", ra.tau, "Barrier weight tau0");
    res->add_option("--tau-kind", ra.tau_kind, "constant | motion");
    res->add_flag("--tau-absolute", ra.tau_absolute, "Use tau0 as is instead of scaling it by the initial regularizer");
    res->add_option("--rho", ra.rho, "ADMM penalty");
    res->add_option("--iters-outer", ra.outer, "Outer (weight) iterations");
    res->add_option("--iters-inner", ra.inner, "ADMM iterations per outer step");
    res->add_option("--tol", ra.tol, "ADMM primal tolerance (0: 1e-4 sqrt(N))");
    res->add_option("--fixed-alpha", ra.fixed_alpha, "Weight used by --algo staic");
    res->add_option("--kappa1", ra.kappa1, "PICTV spatial weight of the first term");
    res->add_option("--kappa2", ra.kappa2, "PICTV temporal weight of the second term");
    res->add_option("--na", ra.na, "Override the numerical aperture of the PSF");
    res->add_option("--wavelength", ra.wavelength, "Override the emission wavelength (nm)");
    res->add_option("--pixel", ra.pixel, "Override the pixel pitch (nm)");
    res->add_option("--in", ra.in, "Dataset directory or measured TIFF")->required();
    res->add_option("--truth", ra.truth, "Ground-truth TIFF");
    res->add_option("--out", ra.out, "Output directory")->required();

    std::string rep_in, rep_format = "md", rep_out;
    bool rep_plots = false;
    auto* rep = app.add_subcommand("report", "Tabulate result.json files below a directory");
    rep->add_option("--in", rep_in, "Result directory")->required();
    rep->add_option("--format", rep_format, "csv | md");
    rep->add_option("--out", rep_out, "Write the table here instead of stdout");
    rep->add_flag("--plots", rep_plots, "Write trajectory.svg next to every result.json");

    std::string bench_manifest, bench_out;
    std::size_t bench_jobs = 0;
    auto* ben = app.add_subcommand("bench", "Simulate, restore and report everything in a manifest");
    ben->add_option("--manifest", bench_manifest, "Job manifest (JSON)")->required();
    ben->add_option("--out", bench_out, "Override the manifest's output directory");
    ben->add_option("--jobs", bench_jobs, "Override the manifest's parallelism");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUserError;
    }

    try {
        if (sim->parsed()) return cmd_simulate(manifest, sidecar, sim_out);
        if (res->parsed()) return cmd_restore(ra);
        if (rep->parsed()) return cmd_report(rep_in, rep_format, rep_out, rep_plots);
        if (ben->parsed()) return cmd_bench(bench_manifest, bench_out, bench_jobs);
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUserError;
    }
    return kUserError;
}
