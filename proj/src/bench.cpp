#include "pstaic/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pstaic/tiff.hpp"

namespace pstaic::bench {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << s;
    if (!out) throw std::runtime_error("write to '" + p.string() + "' failed");
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::invalid_argument("cannot open '" + p.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("'" + p.string() + "': " + e.what());
    }
}

// NaN metrics (no ground truth) are stored as null.
double number(const json& j, const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

// Infinite bounds are stored as null.
json bound(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double bound_from(const json& j, const char* key, double current, double unbounded) {
    if (!j.contains(key)) return current;
    const auto& v = j.at(key);
    return v.is_null() ? unbounded : v.get<double>();
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("lambda grid: need 0 < min <= max");
    if (count == 0) throw std::invalid_argument("lambda grid: empty");
    if (count == 1) return {lo};
    std::vector<double> g(count);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

// ---------------------------------------------------------------------------
// datasets

json to_json(const DatasetSpec& d) {
    return json{{"id", d.id},
                {"phantom",
                 {{"scene", to_string(d.phantom.scene)},
                  {"nx", d.phantom.shape.nx},
                  {"ny", d.phantom.shape.ny},
                  {"nt", d.phantom.shape.nt},
                  {"motion", d.phantom.motion},
                  {"seed", d.phantom.seed}}},
                {"degrade",
                 {{"na", d.degrade.na},
                  {"wavelength_nm", d.degrade.wavelength_nm},
                  {"pixel_nm", d.degrade.pixel_nm},
                  {"gamma", d.degrade.gamma},
                  {"sigma_g", d.degrade.sigma_g},
                  {"psf_sigma_px", d.degrade.psf_sigma_px()},
                  {"blur_boundary", d.degrade.boundary == BoundaryPolicy::Periodic ? "periodic" : "replicate"}}},
                {"photons", d.photons},
                {"noise_seed", d.noise_seed}};
}

DatasetSpec dataset_from_json(const json& j) {
    try {
        DatasetSpec d;
        d.id = j.at("id").get<std::string>();
        const auto& p = j.at("phantom");
        d.phantom.scene = parse_scene(p.at("scene").get<std::string>());
        d.phantom.shape = {p.at("nx").get<std::size_t>(), p.at("ny").get<std::size_t>(), p.at("nt").get<std::size_t>()};
        d.phantom.motion = p.value("motion", 1.0);
        d.phantom.seed = p.value("seed", std::uint64_t{1});
        const auto& g = j.at("degrade");
        d.degrade.na = g.at("na").get<double>();
        d.degrade.wavelength_nm = g.value("wavelength_nm", d.degrade.wavelength_nm);
        d.degrade.pixel_nm = g.value("pixel_nm", d.degrade.pixel_nm);
        d.degrade.gamma = g.value("gamma", d.degrade.gamma);
        d.degrade.sigma_g = g.value("sigma_g", d.degrade.sigma_g);
        d.degrade.boundary =
            g.value("blur_boundary", std::string("replicate")) == "periodic" ? BoundaryPolicy::Periodic
                                                                             : BoundaryPolicy::Replicate;
        d.photons = j.value("photons", d.photons);
        d.noise_seed = j.value("noise_seed", d.noise_seed);
        d.phantom.validate();
        d.degrade.validate();
        if (!(d.photons > 0.0)) throw std::invalid_argument("photons must be > 0");
        return d;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("dataset sidecar: ") + e.what());
    }
}

Dataset simulate(const DatasetSpec& spec) {
    Dataset d;
    d.spec = spec;
    d.truth = make_phantom(spec.phantom);
    d.truth *= spec.photons;
    d.measured = degrade(d.truth, spec.degrade, spec.noise_seed);
    return d;
}

std::string dataset_dir_name(const DatasetSpec& d) { return d.id + "_na" + fmt("%.2f", d.degrade.na); }

void write_dataset(const Dataset& d, const fs::path& dir) {
    fs::create_directories(dir);
    write_tiff(dir / "truth.tif", d.truth);
    write_tiff(dir / "measured.tif", d.measured);
    json side = to_json(d.spec);
    side["files"] = {{"truth", "truth.tif"}, {"measured", "measured.tif"}};
    write_text(dir / "dataset.json", side.dump(2) + "\n");
}

DatasetSpec read_sidecar(const fs::path& dir) { return dataset_from_json(read_json(dir / "dataset.json")); }

Dataset read_dataset(const fs::path& dir) {
    Dataset d;
    d.spec = read_sidecar(dir);
    d.truth = read_tiff(dir / "truth.tif");
    d.measured = read_tiff(dir / "measured.tif");
    return d;
}

// ---------------------------------------------------------------------------
// configs and manifests

json to_json(const RestoreConfig& c) {
    return json{{"algorithm", to_string(c.algorithm)},
                {"lambda", c.lambda},
                {"tau", c.tau.tau0},
                {"tau_kind", c.tau.kind == TauPolicy::Kind::Constant ? "constant" : "motion"},
                {"tau_scale", c.tau.scale == TauPolicy::Scale::Absolute ? "absolute" : "initial"},
                {"rho", c.admm.rho},
                {"outer", c.outer_iterations},
                {"inner", c.admm.max_iterations},
                {"tolerance", c.admm.primal_tolerance},
                {"kappa1", c.kappa1},
                {"kappa2", c.kappa2},
                {"fixed_alpha", c.fixed_alpha},
                {"box_lower", bound(c.box.lower)},
                {"box_upper", bound(c.box.upper)}};
}

RestoreConfig restore_config_from_json(const json& j, RestoreConfig c) {
    try {
        if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        c.lambda = j.value("lambda", c.lambda);
        c.tau.tau0 = j.value("tau", c.tau.tau0);
        if (j.contains("tau_kind")) {
            const auto k = j.at("tau_kind").get<std::string>();
            if (k == "constant") {
                c.tau.kind = TauPolicy::Kind::Constant;
            } else if (k == "motion") {
                c.tau.kind = TauPolicy::Kind::MotionAdaptive;
            } else {
                throw std::invalid_argument("tau_kind must be constant or motion");
            }
        }
        if (j.contains("tau_scale")) {
            const auto s = j.at("tau_scale").get<std::string>();
            if (s == "absolute") {
                c.tau.scale = TauPolicy::Scale::Absolute;
            } else if (s == "initial") {
                c.tau.scale = TauPolicy::Scale::InitialRegularizer;
            } else {
                throw std::invalid_argument("tau_scale must be absolute or initial");
            }
        }
        c.admm.rho = j.value("rho", c.admm.rho);
        c.outer_iterations = j.value("outer", c.outer_iterations);
        c.admm.max_iterations = j.value("inner", c.admm.max_iterations);
        c.admm.primal_tolerance = j.value("tolerance", c.admm.primal_tolerance);
        c.kappa1 = j.value("kappa1", c.kappa1);
        c.kappa2 = j.value("kappa2", c.kappa2);
        c.fixed_alpha = j.value("fixed_alpha", c.fixed_alpha);
        constexpr double inf = std::numeric_limits<double>::infinity();
        c.box.lower = bound_from(j, "box_lower", c.box.lower, -inf);
        c.box.upper = bound_from(j, "box_upper", c.box.upper, inf);
        if (!(c.box.lower <= c.box.upper)) throw std::invalid_argument("box_lower exceeds box_upper");
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("restore settings: ") + e.what());
    }
}

void JobManifest::validate() const {
    if (jobs.empty()) throw std::invalid_argument("manifest: no jobs");
    if (parallelism == 0) throw std::invalid_argument("manifest: parallelism must be >= 1");
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& j : jobs) {
        if (j.lambda_grid.empty()) throw std::invalid_argument("manifest: empty lambda grid");
        for (double l : j.lambda_grid) {
            if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("manifest: lambda values must be > 0");
        }
        j.dataset.phantom.validate();
        j.dataset.degrade.validate();
        if (!seen.insert({dataset_dir_name(j.dataset), to_string(j.config.algorithm)}).second) {
            throw std::invalid_argument("manifest: duplicate job " + dataset_dir_name(j.dataset) + "/" +
                                        to_string(j.config.algorithm));
        }
    }
}

std::vector<DatasetSpec> JobManifest::datasets() const {
    std::vector<DatasetSpec> out;
    std::set<std::string> seen;
    for (const auto& j : jobs) {
        if (seen.insert(dataset_dir_name(j.dataset)).second) out.push_back(j.dataset);
    }
    return out;
}

JobManifest parse_manifest(const json& j, const fs::path& base_dir) {
    try {
        JobManifest m;
        m.output = j.value("output", std::string("bench_out"));
        if (m.output.is_relative() && !base_dir.empty()) m.output = base_dir / m.output;
        m.parallelism = j.value("parallelism", std::size_t{1});

        std::vector<double> grid;
        if (j.contains("lambda")) {
            grid = j.at("lambda").get<std::vector<double>>();
        } else {
            const json g = j.value("lambda_grid", json::object());
            grid = log_grid(g.value("min", 1e-3), g.value("max", 1.0), g.value("count", std::size_t{8}));
        }

        const std::size_t refine = j.value("lambda_refine", std::size_t{0});

        const json deg = j.value("degrade", json::object());
        DegradeSpec base_deg;
        base_deg.wavelength_nm = deg.value("wavelength_nm", base_deg.wavelength_nm);
        base_deg.pixel_nm = deg.value("pixel_nm", base_deg.pixel_nm);
        base_deg.gamma = deg.value("gamma", base_deg.gamma);
        const double photons = deg.value("photons", 100.0);
        // default Gaussian noise: 2% of the peak intensity
        base_deg.sigma_g = deg.value("sigma_g", 0.02 * photons);
        const std::uint64_t noise_seed = deg.value("seed", std::uint64_t{1});

        const std::vector<double> nas = j.value("na", std::vector<double>{1.0});
        const RestoreConfig base = restore_config_from_json(j.value("restore", json::object()));
        const auto algos = j.value("algorithms", std::vector<std::string>{"pstaic", "pictv"});

        const auto& phantoms = j.at("phantoms");
        if (!phantoms.is_array() || phantoms.empty()) throw std::invalid_argument("manifest: no phantoms");
        std::map<std::string, int> scene_count;
        for (const auto& p : phantoms) ++scene_count[p.at("scene").get<std::string>()];

        for (const auto& p : phantoms) {
            DatasetSpec d;
            const auto scene = p.at("scene").get<std::string>();
            d.phantom.scene = parse_scene(scene);
            d.phantom.shape = {p.value("nx", std::size_t{64}), p.value("ny", std::size_t{64}),
                               p.value("nt", std::size_t{8})};
            d.phantom.motion = p.value("motion", 1.0);
            d.phantom.seed = p.value("seed", std::uint64_t{1});
            d.id = p.value("id", scene_count[scene] > 1 ? scene + "-s" + std::to_string(d.phantom.seed) : scene);
            d.photons = photons;
            d.noise_seed = noise_seed;
            for (double na : nas) {
                d.degrade = base_deg;
                d.degrade.na = na;
                for (const auto& a : algos) {
                    Job job;
                    job.dataset = d;
                    job.config = base;
                    job.config.algorithm = parse_algorithm(a);
                    job.lambda_grid = grid;
                    job.refine = refine;
                    m.jobs.push_back(std::move(job));
                }
            }
        }
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("manifest: ") + e.what());
    }
}

JobManifest load_manifest(const fs::path& path) { return parse_manifest(read_json(path), path.parent_path()); }

// ---------------------------------------------------------------------------
// result rows

json to_json(const ResultRow& r) {
    return json{{"phantom", r.phantom},         {"na", r.na},
                {"algorithm", r.algorithm},     {"best_lambda", r.best_lambda},
                {"snr_db", r.snr_db},           {"ssim", r.ssim},
                {"alpha_final", r.alpha_final}, {"runtime_seconds", r.runtime_seconds},
                {"input_snr_db", r.input_snr_db}};
}

ResultRow result_from_json(const json& j) {
    try {
        ResultRow r;
        r.phantom = j.at("phantom").get<std::string>();
        r.na = j.at("na").get<double>();
        r.algorithm = j.at("algorithm").get<std::string>();
        r.best_lambda = number(j, "best_lambda");
        r.snr_db = number(j, "snr_db");
        r.ssim = number(j, "ssim");
        r.alpha_final = number(j, "alpha_final");
        r.runtime_seconds = number(j, "runtime_seconds");
        r.input_snr_db = j.contains("input_snr_db") ? number(j, "input_snr_db") : 0.0;
        return r;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("result row: ") + e.what());
    }
}

std::string csv_header() { return "phantom,na,algorithm,best_lambda,snr_db,ssim,alpha_final,runtime_seconds,input_snr_db"; }

std::string to_csv(const ResultRow& r) {
    return r.phantom + "," + g17(r.na) + "," + r.algorithm + "," + g17(r.best_lambda) + "," + g17(r.snr_db) + "," +
           g17(r.ssim) + "," + g17(r.alpha_final) + "," + g17(r.runtime_seconds) + "," + g17(r.input_snr_db);
}

ResultRow result_from_csv(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw std::invalid_argument("result row: expected 9 fields, got " + std::to_string(f.size()));
    ResultRow r;
    try {
        r.phantom = f[0];
        r.na = std::stod(f[1]);
        r.algorithm = f[2];
        r.best_lambda = std::stod(f[3]);
        r.snr_db = std::stod(f[4]);
        r.ssim = std::stod(f[5]);
        r.alpha_final = std::stod(f[6]);
        r.runtime_seconds = std::stod(f[7]);
        r.input_snr_db = std::stod(f[8]);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("result row: malformed number in '" + line + "'");
    }
    return r;
}

// ---------------------------------------------------------------------------
// restoration jobs

SweepResult sweep(const Volume2DT& measured, const Volume2DT& truth, const Kernel& h, const RestoreConfig& cfg,
                  const std::vector<double>& lambda_grid, const RunObserver& observer, std::size_t refine) {
    if (lambda_grid.empty()) throw std::invalid_argument("sweep: empty lambda grid");
    if (!(measured.shape() == truth.shape())) throw DimensionError("sweep: truth and measurement differ in shape");
    const double scale = max_abs(measured.values());
    if (!(scale > 0.0)) throw std::invalid_argument("sweep: measurement is identically zero");

    SweepResult out;
    double best_snr = -std::numeric_limits<double>::infinity();
    auto run = [&](double rel) {
        RestoreConfig c = cfg;
        c.lambda = rel * scale;
        RestoreReport report = restore(measured, h, c);
        SweepPoint p;
        p.lambda_rel = rel;
        p.lambda = c.lambda;
        p.metrics = measure(truth, report.f.g);
        p.alpha_final = report.final_alpha();
        p.seconds = report.seconds;
        if (observer) observer(p, report);
        if (p.metrics.snr_db > best_snr) {
            best_snr = p.metrics.snr_db;
            out.best = out.points.size();
            out.best_report = std::move(report);
        }
        out.points.push_back(p);
    };
    for (double rel : lambda_grid) run(rel);

    for (std::size_t round = 0; round < refine; ++round) {
        const double b = out.points[out.best].lambda_rel;
        double below = 0.0;
        double above = std::numeric_limits<double>::infinity();
        for (const auto& p : out.points) {
            if (p.lambda_rel < b) below = std::max(below, p.lambda_rel);
            if (p.lambda_rel > b) above = std::min(above, p.lambda_rel);
        }
        if (below > 0.0) run(std::sqrt(below * b));
        if (std::isfinite(above)) run(std::sqrt(above * b));
    }
    return out;
}

std::string trajectory_csv(const RestoreReport& r) {
    std::string s = "step,alpha,c1,c2,tau,cost,cost_before,slack,inner_iterations,final_residual\n";
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& st = r.steps[i];
        s += std::to_string(i + 1) + "," + g17(st.alpha) + "," + g17(st.c1) + "," + g17(st.c2) + "," + g17(st.tau) +
             "," + g17(st.cost) + "," + g17(st.cost_before) + "," + g17(st.slack) + "," +
             std::to_string(st.residuals.size()) + "," + g17(st.residuals.empty() ? 0.0 : st.residuals.back()) +
             "\n";
    }
    return s;
}

std::string sweep_csv(const SweepResult& sw) {
    std::string s = "lambda_rel,lambda,snr_db,ssim,alpha_final,seconds,best\n";
    for (std::size_t i = 0; i < sw.points.size(); ++i) {
        const auto& p = sw.points[i];
        s += g17(p.lambda_rel) + "," + g17(p.lambda) + "," + g17(p.metrics.snr_db) + "," + g17(p.metrics.ssim) + "," +
             g17(p.alpha_final) + "," + g17(p.seconds) + "," + (i == sw.best ? "1" : "0") + "\n";
    }
    return s;
}

void write_job_outputs(const fs::path& dir, const ResultRow& row, const SweepResult& sw, const RestoreConfig& cfg,
                       const json& provenance) {
    fs::create_directories(dir);
    write_tiff(dir / "restored.tif", sw.best_report.f.g);
    write_text(dir / "trajectory.csv", trajectory_csv(sw.best_report));
    write_text(dir / "sweep.csv", sweep_csv(sw));
    json j = to_json(row);
    RestoreConfig used = cfg;
    used.lambda = sw.points.at(sw.best).lambda;
    j["config"] = to_json(used);
    j["alpha_trajectory"] = sw.best_report.alpha_trajectory();
    j["cost_trajectory"] = sw.best_report.cost_trajectory();
    j["provenance"] = provenance;
    write_text(dir / "result.json", j.dump(2) + "\n");
}

BenchOutcome run_manifest(const JobManifest& m, const RunObserver& observer) {
    m.validate();
    fs::create_directories(m.output);

    std::map<std::string, Dataset> data;
    for (const auto& spec : m.datasets()) {
        Dataset d = simulate(spec);
        write_dataset(d, m.output / dataset_dir_name(spec));
        data.emplace(dataset_dir_name(spec), std::move(d));
    }

    BenchOutcome out;
    out.rows.resize(m.jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex lock;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= m.jobs.size()) return;
            {
                std::lock_guard g(lock);
                if (failure) return;
            }
            try {
                const Job& job = m.jobs[i];
                const Dataset& d = data.at(dataset_dir_name(job.dataset));
                const Kernel h = make_psf(job.dataset.degrade);
                RunObserver guarded;
                if (observer) {
                    guarded = [&](const SweepPoint& p, const RestoreReport& r) {
                        std::lock_guard g(lock);
                        observer(p, r);
                    };
                }
                const SweepResult sw = sweep(d.measured, d.truth, h, job.config, job.lambda_grid, guarded, job.refine);
                ResultRow row;
                row.phantom = job.dataset.id;
                row.na = job.dataset.degrade.na;
                row.algorithm = to_string(job.config.algorithm);
                const SweepPoint& best = sw.points[sw.best];
                row.best_lambda = best.lambda_rel;
                row.snr_db = best.metrics.snr_db;
                row.ssim = best.metrics.ssim;
                row.alpha_final = best.alpha_final;
                row.runtime_seconds = best.seconds;
                row.input_snr_db = snr_db(d.truth, d.measured);
                json prov = {{"dataset", to_json(job.dataset)}, {"lambda_grid", job.lambda_grid}, {"lambda_refine", job.refine}};
                write_job_outputs(m.output / dataset_dir_name(job.dataset) / row.algorithm, row, sw, job.config,
                                  prov);
                out.rows[i] = row;
            } catch (...) {
                std::lock_guard g(lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const std::size_t n = std::min(m.parallelism, m.jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::string csv = csv_header() + "\n";
    for (const auto& r : out.rows) csv += to_csv(r) + "\n";
    write_text(m.output / "results.csv", csv);
    return out;
}

// ---------------------------------------------------------------------------
// reports

std::vector<ResultRow> collect_results(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::invalid_argument("'" + dir.string() + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().filename() == "result.json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ResultRow> rows;
    for (const auto& f : files) rows.push_back(result_from_json(read_json(f)));
    return rows;
}

ReportFormat parse_format(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "md") return ReportFormat::Markdown;
    throw std::invalid_argument("unknown report format '" + s + "' (expected csv or md)");
}

std::size_t ComparisonTable::wins(const std::string& algorithm) const {
    return static_cast<std::size_t>(
        std::count_if(lines.begin(), lines.end(), [&](const ReportLine& l) { return l.winner == algorithm; }));
}

ComparisonTable compare(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("report: no result rows");
    static const std::vector<std::string> kOrder = {"pstaic", "pictv", "staic"};
    std::set<std::string> present;
    for (const auto& r : rows) present.insert(r.algorithm);
    ComparisonTable t;
    for (const auto& a : kOrder) {
        if (present.erase(a) != 0) t.algorithms.push_back(a);
    }
    t.algorithms.insert(t.algorithms.end(), present.begin(), present.end());

    std::map<std::pair<std::string, double>, ReportLine> grouped;
    for (const auto& r : rows) {
        auto& line = grouped[{r.phantom, r.na}];
        line.phantom = r.phantom;
        line.na = r.na;
        line.cells.resize(t.algorithms.size());
        const auto col = static_cast<std::size_t>(
            std::find(t.algorithms.begin(), t.algorithms.end(), r.algorithm) - t.algorithms.begin());
        if (line.cells[col]) {
            throw std::invalid_argument("report: duplicate row for " + r.phantom + " NA " + fmt("%.2f", r.na) + " " +
                                        r.algorithm);
        }
        line.cells[col] = r;
    }
    for (auto& [key, line] : grouped) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < line.cells.size(); ++c) {
            if (line.cells[c] && line.cells[c]->snr_db > best) {
                best = line.cells[c]->snr_db;
                line.winner = t.algorithms[c];
            }
        }
        t.lines.push_back(std::move(line));
    }
    return t;
}

std::string render(const ComparisonTable& t, ReportFormat f) {
    std::string s;
    if (f == ReportFormat::Csv) {
        s = "phantom,na";
        for (const auto& a : t.algorithms) s += "," + a + "_ssim," + a + "_snr_db";
        s += ",winner\n";
        for (const auto& l : t.lines) {
            s += l.phantom + "," + fmt("%.2f", l.na);
            for (const auto& c : l.cells) s += c ? "," + g17(c->ssim) + "," + g17(c->snr_db) : std::string(",,");
            s += "," + l.winner + "\n";
        }
        return s;
    }
    s = "| Image | NA |";
    std::string rule = "|---|---|";
    for (const auto& a : t.algorithms) {
        s += " " + a + " ssim | " + a + " SNR (dB) |";
        rule += "---:|---:|";
    }
    s += " winner |\n" + rule + "---|\n";
    for (const auto& l : t.lines) {
        s += "| " + l.phantom + " | " + fmt("%.2f", l.na) + " |";
        for (std::size_t c = 0; c < l.cells.size(); ++c) {
            if (!l.cells[c]) {
                s += " | |";
                continue;
            }
            const bool win = t.algorithms[c] == l.winner;
            const std::string snr = fmt("%.2f", l.cells[c]->snr_db);
            s += " " + fmt("%.4f", l.cells[c]->ssim) + " | " + (win ? "**" + snr + "**" : snr) + " |";
        }
        s += " " + l.winner + " |\n";
    }
    s += "\nWins:";
    for (const auto& a : t.algorithms) s += " " + a + " " + std::to_string(t.wins(a)) + "/" + std::to_string(t.lines.size());
    s += "\n";
    return s;
}

std::string trajectory_svg(const std::vector<double>& alpha, const std::vector<double>& cost, const std::string& title) {
    constexpr double W = 320, H = 200, pad = 30;
    auto polyline = [&](const std::vector<double>& v, double x0, double lo, double hi, const char* colour) {
        std::string pts;
        const double span = hi > lo ? hi - lo : 1.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = x0 + pad + (W - 2 * pad) * (v.size() > 1 ? static_cast<double>(i) / (v.size() - 1) : 0.5);
            const double y = H - pad - (H - 2 * pad) * (v[i] - lo) / span;
            pts += fmt("%.2f", x) + "," + fmt("%.2f", y) + " ";
        }
        return "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\" points=\"" + pts +
               "\"/>\n";
    };
    auto frame = [&](double x0, const std::string& label, double lo, double hi) {
        return "<rect x=\"" + fmt("%.0f", x0 + pad) + "\" y=\"" + fmt("%.0f", pad) + "\" width=\"" +
               fmt("%.0f", W - 2 * pad) + "\" height=\"" + fmt("%.0f", H - 2 * pad) +
               "\" fill=\"none\" stroke=\"#888\"/>\n<text x=\"" + fmt("%.0f", x0 + pad) +
               "\" y=\"20\" font-size=\"12\">" + label + " [" + fmt("%.4g", lo) + ", " + fmt("%.4g", hi) +
               "]</text>\n";
    };
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", 2 * W) + "\" height=\"" +
                    fmt("%.0f", H + 20) + "\">\n";
    s += "<text x=\"" + fmt("%.0f", pad) + "\" y=\"" + fmt("%.0f", H + 12) + "\" font-size=\"12\">" + title +
         " (x: outer iteration)</text>\n";
    s += frame(0, "alpha_s", 0.0, 1.0) + polyline(alpha, 0, 0.0, 1.0, "#1f77b4");
    double lo = cost.empty() ? 0.0 : *std::min_element(cost.begin(), cost.end());
    double hi = cost.empty() ? 1.0 : *std::max_element(cost.begin(), cost.end());
    s += frame(W, "cost H", lo, hi) + polyline(cost, W, lo, hi, "#d62728");
    s += "</svg>\n";
    return s;
}

}  // namespace pstaic::bench
