// kernelsum_bench: desk-scale experiments for sliced kernel summation.
//
//   kernelsum_bench gen-data --n 1000 --m 1000 --d 50 --seed 1 --out data.csv
//   kernelsum_bench run --kernel gaussian --sigma 1 --n 1000 --d 50 --proj 2000 --out run.csv
//   kernelsum_bench sweep --axis P --values 64,256,1024,4096 --reps 10 --out sweep.csv --gnuplot sweep.gp
//   kernelsum_bench compare --kernel gaussian --d 100 --proj 500
//
// Rows of `run` and `compare` are appended to --out (header written when the
// file is new); without --out they go to stdout.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kernelsum/kernelsum.hpp"

namespace ks = kernelsum;
namespace kb = kernelsum::bench;

namespace {

struct Options {
    std::string kernel = "gaussian";
    double sigma = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    int p = 1;
    std::size_t n = 1000;
    std::optional<std::size_t> m;
    int d = 50;
    std::size_t proj = 1000;
    std::optional<std::size_t> features;
    std::string method = "slice";
    std::uint64_t seed = 0;
    int reps = 1;
    std::string out;
    double eps = 1e-10;
    int kmax = 0;
    double threshold = 0.2;
    std::size_t batch = 0;
    double oracle_budget = 1e8;
    bool no_error = false;
    std::string engine = "auto";
    std::string axis = "N";
    std::vector<std::size_t> values;
    std::string gnuplot;
};

void add_experiment_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--kernel", o.kernel, "Kernel family")
        ->check(CLI::IsMember({"gaussian", "laplacian", "matern", "negdist"}))
        ->capture_default_str();
    cmd->add_option("--sigma", o.sigma, "Gaussian bandwidth")->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "Laplacian rate")->capture_default_str();
    cmd->add_option("--beta", o.beta, "Matern length scale")->capture_default_str();
    cmd->add_option("--p", o.p, "Matern smoothness index, nu = p + 1/2")->capture_default_str();
    cmd->add_option("--n", o.n, "Number of sources")->capture_default_str();
    cmd->add_option("--m", o.m, "Number of targets (default: --n)");
    cmd->add_option("--d", o.d, "Dimension")->capture_default_str();
    cmd->add_option("--proj", o.proj, "Slicing directions P")->capture_default_str();
    cmd->add_option("--features", o.features, "RFF features D (default: --proj)");
    cmd->add_option("--method", o.method, "Method")
        ->check(CLI::IsMember({"exact", "slice", "rff1", "rff2"}))
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "Seed")->capture_default_str();
    cmd->add_option("--reps", o.reps, "Repetitions with fresh directions or features")->capture_default_str();
    cmd->add_option("--out", o.out, "Output CSV");
    cmd->add_option("--eps", o.eps, "Relative Fourier coefficient threshold")->capture_default_str();
    cmd->add_option("--kmax", o.kmax, "Gaussian frequency cutoff (0 = automatic)")->capture_default_str();
    cmd->add_option("--threshold", o.threshold, "Rescaling half-width T")->capture_default_str();
    cmd->add_option("--batch", o.batch, "Directions per batch (0 = automatic)")->capture_default_str();
    cmd->add_option("--oracle-budget", o.oracle_budget, "Largest N*M for the exact oracle")->capture_default_str();
    cmd->add_flag("--no-error", o.no_error, "Skip the exact oracle and the error columns");
    cmd->add_option("--engine", o.engine, "1D transform engine")
        ->check(CLI::IsMember({"auto", "ndft", "nfft"}))
        ->capture_default_str();
}

ks::KernelSpec make_kernel(const Options& o) {
    if (o.kernel == "gaussian") return ks::KernelSpec::gaussian(o.sigma, o.d);
    if (o.kernel == "laplacian") return ks::KernelSpec::laplacian(o.alpha, o.d);
    if (o.kernel == "matern") return ks::KernelSpec::matern(o.p, o.beta, o.d);
    return ks::KernelSpec::negative_distance(o.d);
}

kb::ExperimentConfig make_config(const Options& o) {
    kb::ExperimentConfig c;
    c.kernel = make_kernel(o);
    c.N = o.n;
    c.M = o.m.value_or(o.n);
    c.method = kb::parse_method(o.method);
    const bool rff = c.method == kb::Method::rff1 || c.method == kb::Method::rff2;
    c.P_or_D = rff ? o.features.value_or(o.proj) : o.proj;
    c.seed = o.seed;
    c.repetitions = o.reps;
    c.oracle_budget = o.oracle_budget;
    c.compute_error = !o.no_error;
    c.slice.T = o.threshold;
    c.slice.eps = o.eps;
    c.slice.kmax = o.kmax;
    c.slice.batch.batch_size = o.batch;
    c.slice.engine = o.engine == "ndft"   ? ks::Engine::ndft
                     : o.engine == "nfft" ? ks::Engine::nfft
                                          : ks::Engine::automatic;
    c.validate();
    return c;
}

/// Output stream for rows: stdout, or --out opened for appending with a
/// header when the file is new or empty.
class RowSink {
public:
    explicit RowSink(const std::string& path) {
        if (path.empty()) {
            std::cout << kb::csv_header() << '\n';
            return;
        }
        const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
        file_.open(path, std::ios::app);
        if (!file_) throw ks::Error("cannot open " + path);
        if (fresh) file_ << kb::csv_header() << '\n';
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

int cmd_gen_data(const Options& o) {
    const auto ds = kb::gen_data(o.n, o.m.value_or(o.n), o.d, o.seed);
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) throw ks::Error("cannot open " + o.out);
    }
    std::ostream& os = o.out.empty() ? std::cout : file;
    os << "set,index,w";
    for (int k = 0; k < o.d; ++k) os << ",c" << k;
    os << '\n';
    auto dump = [&](const char* name, const ks::PointSet& ps, const std::vector<double>* w) {
        for (std::size_t i = 0; i < ps.n; ++i) {
            os << name << ',' << i << ',' << (w ? kb::format_real((*w)[i]) : std::string("0"));
            for (int k = 0; k < ps.d; ++k) os << ',' << kb::format_real(ps.coords[i * ps.d + k]);
            os << '\n';
        }
    };
    dump("x", ds.x, &ds.w);
    dump("y", ds.y, nullptr);
    return 0;
}

int cmd_run(const Options& o) {
    const auto cfg = make_config(o);
    RowSink sink(o.out);
    kb::write_csv_row(sink.stream(), kb::run(cfg));
    return 0;
}

int cmd_sweep(const Options& o) {
    const auto base = make_config(o);
    const auto axis = kb::parse_axis(o.axis);
    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) throw ks::Error("cannot open " + o.out);
    }
    std::ostream& os = o.out.empty() ? std::cout : file;
    const auto rows = kb::sweep(base, axis, o.values, os);
    if (!o.gnuplot.empty()) {
        std::ofstream gp(o.gnuplot);
        if (!gp) throw ks::Error("cannot open " + o.gnuplot);
        gp << kb::gnuplot_script(o.out.empty() ? "sweep.csv" : o.out, axis);
    }
    for (const auto& r : rows)
        if (!r.failure.empty()) return 3;
    return 0;
}

int cmd_compare(const Options& o) {
    auto cfg = make_config(o);
    RowSink sink(o.out);
    const std::size_t P = o.proj;
    const std::size_t D = o.features.value_or(o.proj);
    // The oracle is shared by the three methods.
    std::vector<double> truth;
    if (cfg.compute_error) {
        if (static_cast<double>(cfg.N) * static_cast<double>(cfg.M) > cfg.oracle_budget)
            throw ks::BudgetError("compare: N*M exceeds the oracle budget; raise --oracle-budget or pass --no-error");
        const auto ds = kb::gen_data(cfg.N, cfg.M, cfg.d(), cfg.seed);
        truth = ks::exact_sum(cfg.kernel, ds.x, ds.y, ds.w);
    }
    const std::vector<double>* cache = truth.empty() ? nullptr : &truth;
    cfg.method = kb::Method::slice;
    cfg.P_or_D = P;
    kb::write_csv_row(sink.stream(), kb::run(cfg, cache));
    for (auto m : {kb::Method::rff1, kb::Method::rff2}) {
        cfg.method = m;
        cfg.P_or_D = D;
        try {
            kb::write_csv_row(sink.stream(), kb::run(cfg, cache));
        } catch (const ks::UnsupportedKernelError& e) {
            std::cerr << "compare: " << kb::to_string(m) << " skipped: " << e.what() << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sliced kernel summation benchmarks"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen-data", "Write the seeded dataset as CSV");
    gen->add_option("--n", o.n, "Number of sources")->capture_default_str();
    gen->add_option("--m", o.m, "Number of targets (default: --n)");
    gen->add_option("--d", o.d, "Dimension")->capture_default_str();
    gen->add_option("--seed", o.seed, "Seed")->capture_default_str();
    gen->add_option("--out", o.out, "Output CSV");

    auto* run = app.add_subcommand("run", "Run one configuration and emit a CSV row");
    add_experiment_flags(run, o);

    auto* sweep = app.add_subcommand("sweep", "Run a grid over one axis");
    add_experiment_flags(sweep, o);
    sweep->add_option("--axis", o.axis, "Swept axis")->check(CLI::IsMember({"N", "P", "d", "D"}))->capture_default_str();
    sweep->add_option("--values", o.values, "Grid values")->delimiter(',');
    sweep->add_option("--gnuplot", o.gnuplot, "Also write a gnuplot script");

    auto* compare = app.add_subcommand("compare", "Slicing against both RFF variants on one configuration");
    add_experiment_flags(compare, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return cmd_gen_data(o);
        if (*run) return cmd_run(o);
        if (*sweep) return cmd_sweep(o);
        return cmd_compare(o);
    } catch (const ks::BudgetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
