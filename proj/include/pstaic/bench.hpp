#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstaic/restore.hpp"
#include "pstaic/simkit.hpp"

namespace pstaic::bench {

using json = nlohmann::json;

/// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// Everything needed to regenerate one synthetic dataset bit for bit.
struct DatasetSpec {
    std::string id;
    PhantomSpec phantom;
    DegradeSpec degrade;
    double photons = 100.0;  ///< the phantom's [0, 1] range is scaled to this peak before noise
    std::uint64_t noise_seed = 1;
};

json to_json(const DatasetSpec& d);
DatasetSpec dataset_from_json(const json& j);

struct Dataset {
    DatasetSpec spec;
    Volume2DT truth;  ///< photons * phantom
    Volume2DT measured;
};

Dataset simulate(const DatasetSpec& spec);

/// Files of a dataset directory: truth.tif, measured.tif and the dataset.json sidecar.
void write_dataset(const Dataset& d, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

/// The sidecar's settings with the volumes left empty.
DatasetSpec read_sidecar(const std::filesystem::path& dir);

std::string dataset_dir_name(const DatasetSpec& d);

/// Restoration settings shared by every job of a manifest; lambda is set per sweep point.
json to_json(const RestoreConfig& cfg);
RestoreConfig restore_config_from_json(const json& j, RestoreConfig base = {});

struct Job {
    DatasetSpec dataset;
    RestoreConfig config;
    std::vector<double> lambda_grid;  ///< relative to max |m|
    std::size_t refine = 0;
};

struct JobManifest {
    std::vector<Job> jobs;
    std::filesystem::path output;
    std::size_t parallelism = 1;

    void validate() const;
    /// The distinct datasets referenced by the jobs, in first-use order.
    [[nodiscard]] std::vector<DatasetSpec> datasets() const;
};

/// Manifest layout:
///   {"output": DIR, "parallelism": N,
///    "phantoms": [{"scene", "nx", "ny", "nt", "motion", "seed", "id"?}],
///    "na": [...], "degrade": {"wavelength_nm", "pixel_nm", "gamma", "sigma_g", "photons", "seed"},
///    "algorithms": ["pstaic", "pictv", "staic"],
///    "lambda": [...] | "lambda_grid": {"min", "max", "count"}, "lambda_refine": N,
///    "restore": {"tau", "tau_kind", "tau_scale", "rho", "outer", "inner", "tolerance", "kappa1", "kappa2",
///                "fixed_alpha", "box_lower", "box_upper"}}
/// Relative "output" paths resolve against `base_dir`.
JobManifest parse_manifest(const json& j, const std::filesystem::path& base_dir = {});
JobManifest load_manifest(const std::filesystem::path& path);

struct ResultRow {
    std::string phantom;
    double na = 0.0;
    std::string algorithm;
    double best_lambda = 0.0;  ///< relative
    double snr_db = 0.0;
    double ssim = 0.0;
    double alpha_final = 0.0;
    double runtime_seconds = 0.0;
    double input_snr_db = 0.0;
};

json to_json(const ResultRow& r);
ResultRow result_from_json(const json& j);

std::string csv_header();
std::string to_csv(const ResultRow& r);
ResultRow result_from_csv(const std::string& line);

struct SweepPoint {
    double lambda_rel = 0.0;
    double lambda = 0.0;
    MetricPair metrics;
    double alpha_final = 0.0;
    double seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::size_t best = 0;
    RestoreReport best_report;
};

using RunObserver = std::function<void(const SweepPoint&, const RestoreReport&)>;

/// Restores at every grid value and keeps the one with the highest SNR against the truth.
/// Each refinement round then tries the geometric midpoints between the current best and
/// its nearest evaluated neighbours.
SweepResult sweep(const Volume2DT& measured, const Volume2DT& truth, const Kernel& h, const RestoreConfig& cfg,
                  const std::vector<double>& lambda_grid, const RunObserver& observer = {},
                  std::size_t refine = 0);

/// Writes restored.tif, trajectory.csv, sweep.csv and result.json into `dir`.
void write_job_outputs(const std::filesystem::path& dir, const ResultRow& row, const SweepResult& sweep,
                       const RestoreConfig& cfg, const json& provenance);

std::string trajectory_csv(const RestoreReport& r);
std::string sweep_csv(const SweepResult& s);

struct BenchOutcome {
    std::vector<ResultRow> rows;
};

/// Simulates every dataset and runs every job of the manifest, writing one directory
/// per dataset and one sub-directory per algorithm. Jobs run on up to `parallelism` threads.
BenchOutcome run_manifest(const JobManifest& m, const RunObserver& observer = {});

/// Every result.json below `dir`.
std::vector<ResultRow> collect_results(const std::filesystem::path& dir);

enum class ReportFormat { Csv, Markdown };
ReportFormat parse_format(const std::string& s);

struct ReportLine {
    std::string phantom;
    double na = 0.0;
    std::vector<std::optional<ResultRow>> cells;  ///< one per algorithm column
    std::string winner;                           ///< highest SNR; empty if no cell is filled
};

struct ComparisonTable {
    std::vector<std::string> algorithms;
    std::vector<ReportLine> lines;
    [[nodiscard]] std::size_t wins(const std::string& algorithm) const;
};

/// Groups rows by (phantom, NA) with one ssim/SNR column pair per algorithm.
ComparisonTable compare(const std::vector<ResultRow>& rows);
std::string render(const ComparisonTable& t, ReportFormat f);

/// Alpha trajectory and cost decay of one job as an SVG line chart.
std::string trajectory_svg(const std::vector<double>& alpha, const std::vector<double>& cost, const std::string& title);

}  // namespace pstaic::bench
