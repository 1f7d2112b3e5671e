#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "oracles.hpp"
#include "pstaic/bench.hpp"
#include "pstaic/tiff.hpp"

using namespace pstaic;
using namespace pstaic::bench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("pstaic_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Minimal TIFF writer for test fixtures: any byte order, integer or float samples,
/// `rows_per_strip` rows per strip, pages chained in order.
class TiffBuilder {
public:
    TiffBuilder(bool big_endian, std::uint16_t bits, std::uint16_t format)
        : big_(big_endian), bits_(bits), format_(format) {}

    std::uint16_t compression = 1;

    std::vector<std::uint8_t> build(const std::vector<std::vector<double>>& pages, std::uint32_t w, std::uint32_t h,
                                    std::uint32_t rows_per_strip) {
        bytes_.clear();
        if (big_) {
            bytes_ = {'M', 'M'};
        } else {
            bytes_ = {'I', 'I'};
        }
        put(42, 2);
        const std::size_t first_ifd_slot = bytes_.size();
        put(0, 4);
        std::size_t link = first_ifd_slot;
        for (const auto& page : pages) {
            // strips first, then the IFD that points at them
            std::vector<std::uint32_t> offsets;
            std::vector<std::uint32_t> counts;
            for (std::uint32_t r0 = 0; r0 < h; r0 += rows_per_strip) {
                offsets.push_back(static_cast<std::uint32_t>(bytes_.size()));
                const std::uint32_t rows = std::min(rows_per_strip, h - r0);
                for (std::uint32_t i = r0 * w; i < (r0 + rows) * w; ++i) sample(page[i]);
                counts.push_back(static_cast<std::uint32_t>(bytes_.size()) - offsets.back());
            }
            const std::size_t off_table = bytes_.size();
            for (auto o : offsets) put(o, 4);
            const std::size_t cnt_table = bytes_.size();
            for (auto c : counts) put(c, 4);
            if (bytes_.size() % 2) bytes_.push_back(0);

            const auto ifd = static_cast<std::uint32_t>(bytes_.size());
            patch(link, ifd);
            const bool single = offsets.size() == 1;
            put(10, 2);
            entry(256, 4, 1, w);
            entry(257, 4, 1, h);
            entry(258, 3, 1, bits_);
            entry(259, 3, 1, compression);
            entry(262, 3, 1, 1);
            entry(273, 4, static_cast<std::uint32_t>(offsets.size()),
                  single ? offsets[0] : static_cast<std::uint32_t>(off_table));
            entry(277, 3, 1, 1);
            entry(278, 4, 1, rows_per_strip);
            entry(279, 4, static_cast<std::uint32_t>(counts.size()),
                  single ? counts[0] : static_cast<std::uint32_t>(cnt_table));
            entry(339, 3, 1, format_);
            link = bytes_.size();
            put(0, 4);
        }
        return bytes_;
    }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) {
            const int shift = big_ ? 8 * (n - 1 - i) : 8 * i;
            bytes_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
        }
    }
    void patch(std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            const int shift = big_ ? 8 * (3 - i) : 8 * i;
            bytes_[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((v >> shift) & 0xff);
        }
    }
    void entry(std::uint16_t tag, std::uint16_t type, std::uint32_t count, std::uint32_t value) {
        put(tag, 2);
        put(type, 2);
        put(count, 4);
        if (type == 3 && count == 1) {
            // SHORT values are left-justified in the 4-byte slot
            put(value, 2);
            put(0, 2);
        } else {
            put(value, 4);
        }
    }
    void sample(double v) {
        if (format_ == 3 && bits_ == 32) {
            const auto f = static_cast<float>(v);
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            put(u, 4);
        } else if (format_ == 3 && bits_ == 64) {
            std::uint64_t u;
            std::memcpy(&u, &v, 8);
            put(u, 8);
        } else {
            put(static_cast<std::uint64_t>(v), bits_ / 8);
        }
    }

    bool big_;
    std::uint16_t bits_;
    std::uint16_t format_;
    std::vector<std::uint8_t> bytes_;
};

Volume2DT float_volume(oracle::Rng& rng, const Shape& s) {
    Volume2DT v(s);
    for (auto& x : v.values()) x = static_cast<float>(rng.normal(100.0));
    return v;
}

ResultRow row(const std::string& phantom, double na, const std::string& algo, double snr) {
    ResultRow r;
    r.phantom = phantom;
    r.na = na;
    r.algorithm = algo;
    r.best_lambda = 0.0123456789;
    r.snr_db = snr;
    r.ssim = 0.5 + snr / 100.0;
    r.alpha_final = 0.43;
    r.runtime_seconds = 1.5;
    r.input_snr_db = 7.25;
    return r;
}

bench::json small_manifest(const std::string& out) {
    auto j = bench::json::parse(R"({
        "phantoms": [{"scene": "moving-disks", "nx": 16, "ny": 16, "nt": 4, "seed": 1},
                     {"scene": "static-texture", "nx": 16, "ny": 16, "nt": 4, "seed": 2}],
        "na": [0.9, 1.1],
        "algorithms": ["pstaic", "pictv"],
        "lambda": [0.02, 0.08],
        "restore": {"outer": 2, "inner": 8}
    })");
    j["output"] = out;
    return j;
}

}  // namespace

TEST_CASE("TIFF round trip") {
    oracle::Rng rng(1);
    for (const Shape s : {Shape{7, 5, 1}, Shape{16, 9, 4}}) {
        const Volume2DT v = float_volume(rng, s);
        const auto bytes = encode_tiff(v);
        CHECK(bytes[0] == 'I');
        CHECK(bytes[1] == 'I');
        CHECK(bytes[2] == 42);
        CHECK(decode_tiff(bytes) == v);
    }
    TempDir dir("tiff");
    const Volume2DT v = float_volume(rng, Shape{12, 10, 3});
    write_tiff(dir.path / "v.tif", v);
    CHECK(read_tiff(dir.path / "v.tif") == v);
    CHECK_THROWS_AS(read_tiff(dir.path / "missing.tif"), TiffError);
    CHECK_THROWS_AS(encode_tiff(Volume2DT()), TiffError);
}

TEST_CASE("TIFF fixtures from other writers") {
    oracle::Rng rng(2);
    const std::uint32_t w = 6;
    const std::uint32_t h = 5;
    std::vector<std::vector<double>> pages(3, std::vector<double>(w * h));
    for (auto& p : pages)
        for (auto& x : p) x = static_cast<double>(rng.index(250));

    struct Case {
        bool big;
        std::uint16_t bits;
        std::uint16_t format;
        std::uint32_t rows;
    };
    for (const Case c : {Case{true, 16, 1, 2}, Case{false, 16, 1, 5}, Case{false, 8, 1, 1}, Case{true, 32, 1, 3},
                         Case{true, 32, 3, 2}, Case{false, 64, 3, 4}}) {
        CAPTURE(c.big);
        CAPTURE(c.bits);
        CAPTURE(c.format);
        TiffBuilder b(c.big, c.bits, c.format);
        const Volume2DT v = decode_tiff(b.build(pages, w, h, c.rows));
        REQUIRE(v.shape() == Shape{w, h, 3});
        for (std::size_t t = 0; t < 3; ++t)
            for (std::size_t y = 0; y < h; ++y)
                for (std::size_t x = 0; x < w; ++x) CHECK(v(x, y, t) == pages[t][y * w + x]);
    }

    // 16-bit values above 255 exercise the byte order of the samples themselves
    std::vector<std::vector<double>> wide(1, std::vector<double>(w * h));
    for (std::size_t i = 0; i < wide[0].size(); ++i) wide[0][i] = 1000.0 * static_cast<double>(i) + 7.0;
    TiffBuilder mm(true, 16, 1);
    const Volume2DT v = decode_tiff(mm.build(wide, w, h, 2));
    CHECK(v(5, 4, 0) == 29007.0);

    TiffBuilder packed(false, 16, 1);
    packed.compression = 5;
    CHECK_THROWS_AS(decode_tiff(packed.build(pages, w, h, 5)), TiffError);
    const std::vector<std::uint8_t> junk = {'I', 'I', 43, 0, 8, 0, 0, 0};
    CHECK_THROWS_AS(decode_tiff(junk), TiffError);
    const std::vector<std::uint8_t> shortfile = {'I', 'I', 42};
    CHECK_THROWS_AS(decode_tiff(shortfile), TiffError);
    auto truncated = TiffBuilder(false, 16, 1).build(pages, w, h, 5);
    truncated[4] = 0xff;  // first IFD offset beyond the end
    CHECK_THROWS_AS(decode_tiff(truncated), TiffError);
}

TEST_CASE("log_grid") {
    const auto g = log_grid(1e-3, 1.0, 8);
    REQUIRE(g.size() == 8);
    CHECK(g.front() == 1e-3);
    CHECK(g.back() == 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(1e3, 1.0 / 7.0)));
    CHECK(log_grid(0.5, 0.5, 1) == std::vector<double>{0.5});
    CHECK_THROWS(log_grid(0.0, 1.0, 3));
    CHECK_THROWS(log_grid(1.0, 0.5, 3));
    CHECK_THROWS(log_grid(0.1, 1.0, 0));
}

TEST_CASE("dataset sidecar regenerates identical files") {
    DatasetSpec d;
    d.id = "disks";
    d.phantom.shape = Shape{20, 16, 3};
    d.phantom.seed = 4;
    d.degrade.na = 0.9;
    d.noise_seed = 8;
    CHECK(dataset_dir_name(d) == "disks_na0.90");

    const DatasetSpec back = dataset_from_json(to_json(d));
    CHECK(to_json(back) == to_json(d));

    TempDir dir("sidecar");
    write_dataset(simulate(d), dir.path / "a");
    CHECK(fs::exists(dir.path / "a" / "truth.tif"));
    CHECK(fs::exists(dir.path / "a" / "measured.tif"));
    CHECK(fs::exists(dir.path / "a" / "dataset.json"));
    CHECK(std::distance(fs::directory_iterator(dir.path / "a"), fs::directory_iterator()) == 3);

    const DatasetSpec again = read_sidecar(dir.path / "a");
    write_dataset(simulate(again), dir.path / "b");
    for (const char* f : {"truth.tif", "measured.tif", "dataset.json"})
        CHECK(slurp(dir.path / "a" / f) == slurp(dir.path / "b" / f));

    const Dataset loaded = read_dataset(dir.path / "a");
    const Dataset fresh = simulate(d);
    // float32 pages
    for (std::size_t i = 0; i < fresh.measured.size(); ++i)
        CHECK(loaded.measured.values()[i] == static_cast<float>(fresh.measured.values()[i]));

    auto broken = to_json(d);
    broken["phantom"].erase("nx");
    CHECK_THROWS_AS(dataset_from_json(broken), std::invalid_argument);
}

TEST_CASE("restore settings serialize") {
    RestoreConfig c;
    c.lambda = 0.7;
    c.tau = TauPolicy::motion_adaptive(0.2);
    c.admm.rho = 2.5;
    c.outer_iterations = 4;
    c.admm.max_iterations = 17;
    c.box = BoxSet::unbounded();
    c.algorithm = Algorithm::Pictv;
    c.kappa1 = 1.5;
    const RestoreConfig r = restore_config_from_json(to_json(c));
    CHECK(to_json(r) == to_json(c));
    CHECK(std::isinf(r.box.lower));
    CHECK(r.tau.kind == TauPolicy::Kind::MotionAdaptive);
    CHECK_THROWS(restore_config_from_json(bench::json{{"tau_kind", "wobbly"}}));
    CHECK_THROWS(restore_config_from_json(bench::json{{"box_lower", 2.0}, {"box_upper", 1.0}}));
    CHECK_THROWS(restore_config_from_json(bench::json{{"algorithm", "tv"}}));
}

TEST_CASE("manifest parsing") {
    TempDir dir("manifest");
    const JobManifest m = parse_manifest(small_manifest("out"), dir.path);
    CHECK(m.output == dir.path / "out");
    CHECK(m.jobs.size() == 8);
    CHECK(m.datasets().size() == 4);
    CHECK(m.jobs[0].config.outer_iterations == 2);
    CHECK(m.jobs[0].config.admm.max_iterations == 8);
    CHECK(m.jobs[1].config.algorithm == Algorithm::Pictv);
    CHECK(m.jobs[0].lambda_grid == std::vector<double>{0.02, 0.08});
    CHECK(m.jobs[0].dataset.degrade.sigma_g == 2.0);
    CHECK(m.jobs[2].dataset.degrade.na == 1.1);

    auto j = small_manifest("/abs/out");
    j.erase("lambda");
    j["lambda_grid"] = {{"min", 0.01}, {"max", 0.3}, {"count", 5}};
    j["lambda_refine"] = 2;
    const JobManifest g = parse_manifest(j, dir.path);
    CHECK(g.output == fs::path("/abs/out"));
    CHECK(g.jobs[0].lambda_grid == log_grid(0.01, 0.3, 5));
    CHECK(g.jobs[0].refine == 2);

    j.erase("lambda_grid");
    CHECK(parse_manifest(j).jobs[0].lambda_grid == log_grid(1e-3, 1.0, 8));

    auto bad = small_manifest("out");
    bad["lambda"] = {0.1, -0.2};
    CHECK_THROWS_AS(parse_manifest(bad), std::invalid_argument);
    bad = small_manifest("out");
    bad["phantoms"] = bench::json::array();
    CHECK_THROWS_AS(parse_manifest(bad), std::invalid_argument);
    bad = small_manifest("out");
    bad["algorithms"] = {"pstaic", "pstaic"};
    CHECK_THROWS_AS(parse_manifest(bad), std::invalid_argument);
    bad = small_manifest("out");
    bad["phantoms"][0]["scene"] = "galaxies";
    CHECK_THROWS_AS(parse_manifest(bad), std::invalid_argument);
    bad = small_manifest("out");
    bad["phantoms"][0]["nx"] = 2;
    CHECK_THROWS(parse_manifest(bad));

    std::ofstream(dir.path / "m.json") << small_manifest("o").dump();
    CHECK(load_manifest(dir.path / "m.json").output == dir.path / "o");
    CHECK_THROWS_AS(load_manifest(dir.path / "none.json"), std::invalid_argument);
    std::ofstream(dir.path / "bad.json") << "{ not json";
    CHECK_THROWS_AS(load_manifest(dir.path / "bad.json"), std::invalid_argument);
}

TEST_CASE("result rows round-trip") {
    oracle::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        ResultRow r = row("p" + std::to_string(i), rng.uniform(0.8, 1.2), "pstaic", 10.0 + rng.normal(5.0));
        r.best_lambda = rng.log_uniform(1e-4, 1.0);
        r.runtime_seconds = rng.uniform(0.0, 100.0);
        const ResultRow c = result_from_csv(to_csv(r));
        CHECK(std::abs(c.snr_db - r.snr_db) <= 1e-9);
        CHECK(c.snr_db == r.snr_db);
        CHECK(c.best_lambda == r.best_lambda);
        CHECK(c.na == r.na);
        CHECK(c.phantom == r.phantom);
        const ResultRow jr = result_from_json(to_json(r));
        CHECK(jr.snr_db == r.snr_db);
        CHECK(jr.ssim == r.ssim);
        CHECK(jr.input_snr_db == r.input_snr_db);
    }
    const std::string header = csv_header();
    CHECK(std::count(header.begin(), header.end(), ',') == 8);
    CHECK_THROWS_AS(result_from_csv("a,b,c"), std::invalid_argument);
    CHECK_THROWS_AS(result_from_csv("p,x,pstaic,1,2,3,4,5,6"), std::invalid_argument);
}

TEST_CASE("comparison table") {
    std::vector<ResultRow> rows;
    oracle::Rng rng(4);
    for (const char* p : {"a", "b", "c"})
        for (double na : {0.8, 1.0}) {
            rows.push_back(row(p, na, "pictv", rng.uniform(5.0, 15.0)));
            rows.push_back(row(p, na, "pstaic", rng.uniform(5.0, 15.0)));
        }
    const ComparisonTable t = compare(rows);
    CHECK(t.algorithms == std::vector<std::string>{"pstaic", "pictv"});
    REQUIRE(t.lines.size() == 6);
    std::size_t direct = 0;
    for (std::size_t i = 0; i < rows.size(); i += 2) direct += rows[i + 1].snr_db > rows[i].snr_db ? 1 : 0;
    CHECK(t.wins("pstaic") == direct);
    CHECK(t.wins("pstaic") + t.wins("pictv") == 6);
    CHECK(t.lines[0].phantom == "a");
    CHECK(t.lines[0].na == 0.8);

    const std::string csv = render(t, ReportFormat::Csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(csv.rfind("phantom,na,pstaic_ssim,pstaic_snr_db,pictv_ssim,pictv_snr_db,winner\n", 0) == 0);
    const std::string md = render(t, ReportFormat::Markdown);
    CHECK(md.find("Wins: pstaic " + std::to_string(direct) + "/6") != std::string::npos);
    CHECK(md.find("**") != std::string::npos);

    const ComparisonTable one = compare({row("x", 1.0, "pstaic", 9.0)});
    CHECK(one.lines.size() == 1);
    CHECK(one.lines[0].winner == "pstaic");
    const std::string single = render(one, ReportFormat::Csv);
    CHECK(std::count(single.begin(), single.end(), '\n') == 2);

    CHECK_THROWS(compare({}));
    CHECK_THROWS(compare({row("x", 1.0, "pstaic", 9.0), row("x", 1.0, "pstaic", 8.0)}));
    CHECK(parse_format("md") == ReportFormat::Markdown);
    CHECK_THROWS(parse_format("xls"));
}

TEST_CASE("lambda sweep keeps the best SNR") {
    DatasetSpec spec;
    spec.id = "t";
    spec.phantom.shape = Shape{16, 16, 4};
    const Dataset d = simulate(spec);
    RestoreConfig cfg;
    cfg.outer_iterations = 2;
    cfg.admm.max_iterations = 8;
    const Kernel h = make_psf(spec.degrade);

    std::size_t observed = 0;
    const SweepResult s = sweep(d.measured, d.truth, h, cfg, {0.003, 0.03, 0.3},
                                [&](const SweepPoint&, const RestoreReport& r) {
                                    ++observed;
                                    CHECK(r.steps.size() == 2);
                                }, 1);
    CHECK(observed == s.points.size());
    CHECK(s.points.size() >= 4);
    CHECK(s.points.size() <= 5);
    double scale = 0.0;
    for (double x : d.measured.values()) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        CHECK(s.points[i].metrics.snr_db <= s.points[s.best].metrics.snr_db);
        CHECK(s.points[i].lambda == doctest::Approx(s.points[i].lambda_rel * scale).epsilon(1e-15));
    }
    CHECK(snr_db(d.truth, s.best_report.f.g) == s.points[s.best].metrics.snr_db);
    // refinement points are geometric midpoints of grid neighbours
    for (std::size_t i = 3; i < s.points.size(); ++i) {
        const double l = s.points[i].lambda_rel;
        CHECK((l == doctest::Approx(std::sqrt(0.003 * 0.03)) || l == doctest::Approx(std::sqrt(0.03 * 0.3))));
    }

    CHECK_THROWS(sweep(d.measured, d.truth, h, cfg, {}));
    CHECK_THROWS_AS(sweep(d.measured, Volume2DT(16, 16, 3), h, cfg, {0.1}), DimensionError);
}

TEST_CASE("bench run writes one directory per dataset and collects back") {
    TempDir dir("bench");
    auto j = small_manifest("out");
    j["phantoms"].erase(1);
    j["na"] = {1.0};
    JobManifest m = parse_manifest(j, dir.path);
    m.parallelism = 2;
    std::size_t runs = 0;
    const BenchOutcome o = run_manifest(m, [&](const SweepPoint&, const RestoreReport&) { ++runs; });
    CHECK(runs == 4);
    REQUIRE(o.rows.size() == 2);

    const fs::path ds = m.output / "moving-disks_na1.00";
    for (const char* f : {"truth.tif", "measured.tif", "dataset.json"}) CHECK(fs::exists(ds / f));
    for (const char* a : {"pstaic", "pictv"})
        for (const char* f : {"restored.tif", "trajectory.csv", "sweep.csv", "result.json"})
            CHECK(fs::exists(ds / a / f));
    CHECK(fs::exists(m.output / "results.csv"));

    const auto rows = collect_results(m.output);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        const auto& ref = r.algorithm == o.rows[0].algorithm ? o.rows[0] : o.rows[1];
        CHECK(r.snr_db == ref.snr_db);
        CHECK(r.best_lambda == ref.best_lambda);
        CHECK(r.input_snr_db == ref.input_snr_db);
    }

    // thread count does not change results
    JobManifest serial = parse_manifest(small_manifest("serial"), dir.path);
    serial.jobs = m.jobs;
    serial.parallelism = 1;
    const BenchOutcome s = run_manifest(serial);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(s.rows[i].snr_db == o.rows[i].snr_db);
        CHECK(s.rows[i].alpha_final == o.rows[i].alpha_final);
    }
    CHECK(slurp(ds / "pstaic" / "restored.tif") == slurp(serial.output / "moving-disks_na1.00" / "pstaic" / "restored.tif"));

    CHECK_THROWS(collect_results(dir.path / "nowhere"));
    CHECK(collect_results(dir.path / "out" / "moving-disks_na1.00" / "pstaic").size() == 1);
}

TEST_CASE("trajectory outputs") {
    RestoreReport r;
    for (int i = 0; i < 3; ++i) {
        OuterStep s;
        s.alpha = 0.4 + 0.05 * i;
        s.cost = 10.0 - i;
        s.residuals = {1.0, 0.5};
        r.steps.push_back(s);
    }
    const std::string csv = trajectory_csv(r);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find("\n2,0.45") != std::string::npos);
    const std::string svg = trajectory_svg(r.alpha_trajectory(), r.cost_trajectory(), "job");
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t lines = 0;
    for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++lines;
    CHECK(lines == 2);
}
