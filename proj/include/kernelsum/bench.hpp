#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "numeric.hpp"
#include "points.hpp"
#include "random.hpp"
#include "slicer.hpp"

namespace kernelsum::bench {

enum class Method { exact, slice, rff1, rff2 };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::slice: return "slice";
        case Method::rff1: return "rff1";
        case Method::rff2: return "rff2";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "exact") return Method::exact;
    if (s == "slice") return Method::slice;
    if (s == "rff1") return Method::rff1;
    if (s == "rff2") return Method::rff2;
    throw DomainError("unknown method '" + s + "'");
}

struct ExperimentConfig {
    KernelSpec kernel = KernelSpec::gaussian(1.0, 50);
    std::size_t N = 1000;
    std::size_t M = 1000;
    /// Directions for slicing or features for RFF.
    std::size_t P_or_D = 1000;
    Method method = Method::slice;
    std::uint64_t seed = 0;
    int repetitions = 1;
    /// Pair-count limit N·M for the exact oracle.
    double oracle_budget = 1e8;
    bool compute_error = true;
    SliceOptions slice;

    int d() const { return kernel.d; }

    void validate() const {
        kernel.validate();
        if (N < 1 || M < 1 || P_or_D < 1) throw DomainError("ExperimentConfig: sizes must be positive");
        if (repetitions < 1) throw DomainError("ExperimentConfig: repetitions must be >= 1");
        if ((method == Method::rff1 || method == Method::rff2) &&
            !(kernel.is<Gaussian>() || kernel.is<Laplacian>() || kernel.is<Matern>()))
            throw UnsupportedKernelError("random Fourier features need a positive definite kernel");
    }
};

struct BenchRecord {
    ExperimentConfig config;
    double err_per_summand = std::numeric_limits<double>::quiet_NaN();
    double err_std = std::numeric_limits<double>::quiet_NaN();
    double t_setup_s = 0.0;
    double t_sum_s = 0.0;
    /// Empty on success, otherwise the failure message.
    std::string failure;
};

struct Dataset {
    PointSet x, y;
    std::vector<double> w;
};

/// Points iid N(0, 0.1²·I_d), weights uniform on [0, 1). Every value is a
/// Philox4x32-10 draw addressed by (seed, stream, index), so the data are
/// reproducible on any platform with IEEE doubles.
inline Dataset gen_data(std::size_t N, std::size_t M, int d, std::uint64_t seed) {
    if (N < 1 || M < 1 || d < 1) throw DomainError("gen_data: sizes must be positive");
    Dataset ds{PointSet(N, d), PointSet(M, d), std::vector<double>(N)};
    RandomStream(seed, stream_id(StreamTag::points_x, 0)).normals(0, ds.x.coords.size(), ds.x.coords.data());
    RandomStream(seed, stream_id(StreamTag::points_y, 0)).normals(0, ds.y.coords.size(), ds.y.coords.data());
    for (double& v : ds.x.coords) v *= 0.1;
    for (double& v : ds.y.coords) v *= 0.1;
    const RandomStream ws(seed, stream_id(StreamTag::weights, 0));
    for (std::size_t i = 0; i < N; ++i) ds.w[i] = ws.uniform(i);
    return ds;
}

/// Seed of repetition r: data stay fixed, directions and features change.
inline std::uint64_t repetition_seed(std::uint64_t seed, int r) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(r + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct MethodOutput {
    std::vector<double> values;
    double t_setup_s = 0.0;
    double t_sum_s = 0.0;
};

inline MethodOutput run_method(const ExperimentConfig& cfg, const Dataset& ds, std::uint64_t seed) {
    using Clock = std::chrono::steady_clock;
    MethodOutput out;
    const auto t0 = Clock::now();
    switch (cfg.method) {
        case Method::exact:
            out.values = exact_sum(cfg.kernel, ds.x, ds.y, ds.w);
            out.t_sum_s = std::chrono::duration<double>(Clock::now() - t0).count();
            break;
        case Method::slice: {
            auto r = sliced_kernel_sum(cfg.kernel, ds.x, ds.y, ds.w, cfg.P_or_D, seed, cfg.slice);
            out.values = std::move(r.values);
            out.t_setup_s = r.t_setup_s;
            out.t_sum_s = r.t_total_s - r.t_setup_s;
            break;
        }
        case Method::rff1:
        case Method::rff2: {
            const int variant = cfg.method == Method::rff1 ? 1 : 2;
            auto sample = sample_spectral(cfg.kernel, cfg.P_or_D, seed, variant);
            const auto t1 = Clock::now();
            out.values = rff_sum(sample, variant, ds.x, ds.y, ds.w);
            out.t_setup_s = std::chrono::duration<double>(t1 - t0).count();
            out.t_sum_s = std::chrono::duration<double>(Clock::now() - t1).count();
            break;
        }
    }
    return out;
}

/// Runs one configuration: data from gen_data(seed), the method repeated with
/// fresh directions or features, errors against exact_sum. Timings are means
/// over repetitions and exclude data generation and the oracle.
inline BenchRecord run(const ExperimentConfig& cfg, const std::vector<double>* truth_cache = nullptr) {
    cfg.validate();
    BenchRecord rec;
    rec.config = cfg;
    const bool want_error = cfg.compute_error;
    if (want_error && cfg.method != Method::exact &&
        static_cast<double>(cfg.N) * static_cast<double>(cfg.M) > cfg.oracle_budget && !truth_cache)
        throw BudgetError("run: N·M exceeds the oracle budget; raise --oracle-budget or disable error reporting");

    const Dataset ds = gen_data(cfg.N, cfg.M, cfg.d(), cfg.seed);
    std::vector<double> truth;
    if (want_error && cfg.method != Method::exact) truth = truth_cache ? *truth_cache : exact_sum(cfg.kernel, ds.x, ds.y, ds.w);

    std::vector<double> errors;
    for (int r = 0; r < cfg.repetitions; ++r) {
        const auto out = run_method(cfg, ds, repetition_seed(cfg.seed, r));
        rec.t_setup_s += out.t_setup_s;
        rec.t_sum_s += out.t_sum_s;
        if (want_error) errors.push_back(cfg.method == Method::exact ? 0.0 : per_summand_error(truth, out.values, ds.w));
    }
    rec.t_setup_s /= cfg.repetitions;
    rec.t_sum_s /= cfg.repetitions;
    if (want_error) {
        CompensatedSum s;
        for (double e : errors) s.add(e);
        rec.err_per_summand = s.value() / static_cast<double>(errors.size());
        double var = 0.0;
        for (double e : errors) var += (e - rec.err_per_summand) * (e - rec.err_per_summand);
        rec.err_std = errors.size() > 1 ? std::sqrt(var / static_cast<double>(errors.size() - 1)) : 0.0;
    }
    return rec;
}

inline const char* csv_header() {
    return "method,kernel,params,N,M,d,P_or_D,seed,rep,err_per_summand,err_std,t_setup_s,t_sum_s";
}

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_csv_row(std::ostream& os, const BenchRecord& r) {
    const auto& c = r.config;
    os << to_string(c.method) << ',' << c.kernel.name() << ',' << c.kernel.params() << ',' << c.N << ',' << c.M << ','
       << c.d() << ',' << c.P_or_D << ',' << c.seed << ',' << c.repetitions << ',' << format_real(r.err_per_summand)
       << ',' << format_real(r.err_std) << ',' << format_real(r.t_setup_s) << ',' << format_real(r.t_sum_s) << '\n';
}

enum class SweepAxis { N, P, d, D };

inline SweepAxis parse_axis(const std::string& s) {
    if (s == "N") return SweepAxis::N;
    if (s == "P") return SweepAxis::P;
    if (s == "d") return SweepAxis::d;
    if (s == "D") return SweepAxis::D;
    throw DomainError("unknown sweep axis '" + s + "' (expected N, P, d or D)");
}

inline ExperimentConfig with_axis(ExperimentConfig cfg, SweepAxis axis, std::size_t value) {
    switch (axis) {
        case SweepAxis::N:
            cfg.N = value;
            cfg.M = value;
            break;
        case SweepAxis::P:
        case SweepAxis::D:
            cfg.P_or_D = value;
            break;
        case SweepAxis::d:
            cfg.kernel.d = static_cast<int>(value);
            break;
    }
    return cfg;
}

/// One row per grid value. A failing grid point is reported on `log` and
/// written with NaN error and timing columns; the sweep continues.
inline std::vector<BenchRecord> sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<std::size_t>& values,
                                      std::ostream& csv, std::ostream& log = std::cerr) {
    csv << csv_header() << '\n';
    std::vector<BenchRecord> rows;
    // Along P or D the data, and hence the oracle, stay fixed.
    std::vector<double> truth;
    const bool share_truth = (axis == SweepAxis::P || axis == SweepAxis::D) && base.compute_error &&
                             base.method != Method::exact;
    for (std::size_t v : values) {
        const auto cfg = with_axis(base, axis, v);
        BenchRecord rec;
        try {
            if (share_truth && truth.empty() &&
                static_cast<double>(cfg.N) * static_cast<double>(cfg.M) <= cfg.oracle_budget) {
                const auto ds = gen_data(cfg.N, cfg.M, cfg.d(), cfg.seed);
                truth = exact_sum(cfg.kernel, ds.x, ds.y, ds.w);
            }
            rec = run(cfg, share_truth && !truth.empty() ? &truth : nullptr);
        } catch (const std::exception& e) {
            rec = BenchRecord{};
            rec.config = cfg;
            rec.t_setup_s = rec.t_sum_s = std::numeric_limits<double>::quiet_NaN();
            rec.failure = e.what();
            log << "sweep: grid value " << v << " failed: " << e.what() << '\n';
        }
        write_csv_row(csv, rec);
        csv.flush();
        rows.push_back(std::move(rec));
    }
    return rows;
}

/// Gnuplot script plotting a sweep CSV in log-log axes.
inline std::string gnuplot_script(const std::string& csv_path, SweepAxis axis) {
    const char* xcol = "4";
    const char* xlabel = "N";
    const char* ycol = "13";
    const char* ylabel = "t_sum [s]";
    if (axis == SweepAxis::P || axis == SweepAxis::D) {
        xcol = "7";
        xlabel = axis == SweepAxis::P ? "P" : "D";
        ycol = "10";
        ylabel = "per-summand error";
    } else if (axis == SweepAxis::d) {
        xcol = "6";
        xlabel = "d";
        ycol = "10";
        ylabel = "per-summand error";
    }
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set logscale xy\n"
       << "set key top left\n"
       << "set xlabel '" << xlabel << "'\n"
       << "set ylabel '" << ylabel << "'\n"
       << "plot '" << csv_path << "' every ::1 using " << xcol << ':' << ycol << " with linespoints title '" << ylabel
       << "'\n";
    return os.str();
}

}  // namespace kernelsum::bench
