#include "rmtlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "rmtlab/matrix.hpp"
#include "rmtlab/rng.hpp"
#include "rmtlab/spectral.hpp"
#include "rmtlab/trimmed_sup.hpp"

namespace rmtlab {

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double quantile(std::vector<double> v, double q) {
    // Linear interpolation between order statistics.
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double w = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - w) + v[hi] * w;
}

QuantileRow make_row(const std::string& experiment, int m, const std::string& field,
                     const std::vector<double>& values) {
    QuantileRow row;
    row.experiment = experiment;
    row.m = m;
    row.field = field;
    row.min = quantile(values, 0.0);
    row.q25 = quantile(values, 0.25);
    row.median = quantile(values, 0.5);
    row.q75 = quantile(values, 0.75);
    row.max = quantile(values, 1.0);
    double s = 0.0;
    for (double v : values) s += v;
    row.mean = values.empty() ? 0.0 : s / static_cast<double>(values.size());
    return row;
}

// Runs one closure per (m, trial) pair on `workers` threads; results land in
// preassigned slots, so scheduling cannot affect the output.
void parallel_trials(const ExperimentConfig& config,
                     const std::function<void(int m_index, int trial)>& body) {
    struct Task {
        int m_index;
        int trial;
    };
    std::vector<Task> tasks;
    for (int mi = 0; mi < static_cast<int>(config.m_list.size()); ++mi) {
        for (int t = 0; t < config.trials; ++t) tasks.push_back({mi, t});
    }
    const int workers = std::max(1, config.workers);
    if (workers == 1) {
        for (const Task& task : tasks) body(task.m_index, task.trial);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    body(tasks[i].m_index, tasks[i].trial);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

std::string experiment_name(Experiment e) {
    switch (e) {
    case Experiment::Converge: return "converge";
    case Experiment::HeavyTail: return "heavy-tail";
    case Experiment::MpCheck: return "mp-check";
    case Experiment::TruncatePipeline: return "truncate-pipeline";
    case Experiment::Probe: return "probe";
    }
    throw std::logic_error("unreachable");
}

Experiment parse_experiment(const std::string& name) {
    if (name == "converge") return Experiment::Converge;
    if (name == "heavy-tail") return Experiment::HeavyTail;
    if (name == "mp-check") return Experiment::MpCheck;
    if (name == "truncate-pipeline" || name == "truncate") return Experiment::TruncatePipeline;
    if (name == "probe") return Experiment::Probe;
    throw std::invalid_argument("config-invalid: unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (!(z > 0.0 && z < 1.0)) {
        throw std::invalid_argument("config-invalid: z must lie strictly in (0,1)");
    }
    if (m_list.empty()) throw std::invalid_argument("config-invalid: m_list is empty");
    for (std::size_t i = 0; i < m_list.size(); ++i) {
        if (m_list[i] < 1) throw std::invalid_argument("config-invalid: m must be >= 1");
        if (i > 0 && m_list[i] <= m_list[i - 1]) {
            throw std::invalid_argument("config-invalid: m_list must be ascending");
        }
    }
    if (trials < 1) throw std::invalid_argument("config-invalid: trials >= 1");
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("config-invalid: eps must lie in [0,1]");
    }
    if (workers < 1) throw std::invalid_argument("config-invalid: workers >= 1");
    parse_spec(dist); // key must parse
    for (int m : m_list) {
        if (aspect_rows(m, z) < m) {
            throw std::invalid_argument("config-invalid: N_m = round(m/z) < m");
        }
    }
}

int aspect_rows(int m, double z) {
    return static_cast<int>(std::floor(static_cast<double>(m) / z + 0.5));
}

const QuantileRow* RunSummary::find(const std::string& field, int m) const {
    for (const auto& row : rows) {
        if (row.field == field && row.m == m) return &row;
    }
    return nullptr;
}

std::string RunSummary::to_text() const {
    std::ostringstream os;
    os << "experiment        m   field          min       q25    median       q75       max      mean\n";
    auto cell = [&](double v) {
        std::ostringstream c;
        c.precision(4);
        c << std::fixed << v;
        std::string s = c.str();
        return std::string(s.size() >= 10 ? 0 : 10 - s.size(), ' ') + s;
    };
    for (const auto& row : rows) {
        os << row.experiment;
        os << std::string(row.experiment.size() >= 16 ? 1 : 16 - row.experiment.size(), ' ');
        std::string ms = std::to_string(row.m);
        os << std::string(ms.size() >= 4 ? 0 : 4 - ms.size(), ' ') << ms << "  ";
        os << row.field << std::string(row.field.size() >= 12 ? 1 : 12 - row.field.size(), ' ');
        os << cell(row.min) << cell(row.q25) << cell(row.median) << cell(row.q75)
           << cell(row.max) << cell(row.mean) << "\n";
    }
    if (target != 0.0) os << "target 1-sqrt(z) = " << target << "\n";
    for (const auto& n : notes) os << n << "\n";
    os << "total wall ms = " << total_wall_ms << "\n";
    return os.str();
}

namespace {

struct TrialGrid {
    std::vector<TrialRecord> records;
    int trials;

    TrialRecord& at(int m_index, int trial) {
        return records[static_cast<std::size_t>(m_index) * trials + trial];
    }
};

TrialGrid make_grid(const ExperimentConfig& config) {
    TrialGrid grid;
    grid.trials = config.trials;
    grid.records.resize(config.m_list.size() * static_cast<std::size_t>(config.trials));
    for (std::size_t mi = 0; mi < config.m_list.size(); ++mi) {
        for (int t = 0; t < config.trials; ++t) {
            TrialRecord& r = grid.records[mi * config.trials + t];
            r.experiment = experiment_name(config.experiment);
            r.dist = config.dist;
            r.z = config.z;
            r.m = config.m_list[mi];
            r.N = aspect_rows(r.m, config.z);
            r.trial = t;
            r.seed = rng::derive(config.seed, static_cast<std::uint64_t>(t),
                                 static_cast<std::uint64_t>(r.m));
        }
    }
    return grid;
}

std::vector<double> collect(const std::vector<TrialRecord>& records, int m_index,
                            int trials,
                            const std::function<double(const TrialRecord&)>& f) {
    std::vector<double> v;
    v.reserve(trials);
    for (int t = 0; t < trials; ++t) {
        v.push_back(f(records[static_cast<std::size_t>(m_index) * trials + t]));
    }
    return v;
}

} // namespace

RunResult run_convergence_sweep(const ExperimentConfig& config) {
    config.validate();
    const DistributionSpec spec = parse_spec(config.dist);
    TrialGrid grid = make_grid(config);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_trials(config, [&](int mi, int t) {
        TrialRecord& r = grid.at(mi, t);
        const MatrixSample A = sample_matrix(spec, r.N, r.m, r.seed);
        const SpectralSummary s = singular_values(A.matrix);
        r.s1 = s.s1;
        r.sm = s.sm;
        r.sm_scaled = s.scaled_sm;
        r.max_abs_entry = max_abs(A.matrix.data);
    });
    RunResult out;
    out.records = std::move(grid.records);
    out.summary.target = 1.0 - std::sqrt(config.z);
    for (std::size_t mi = 0; mi < config.m_list.size(); ++mi) {
        out.summary.rows.push_back(make_row(
            experiment_name(config.experiment), config.m_list[mi], "sm_scaled",
            collect(out.records, static_cast<int>(mi), config.trials,
                    [](const TrialRecord& r) { return r.sm_scaled; })));
    }
    out.summary.total_wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
}

RunResult run_heavy_tail_contrast(const ExperimentConfig& config) {
    config.validate();
    const DistributionSpec spec = parse_spec(config.dist);
    RunResult out;
    if (spec.fourth_moment_finite()) {
        out.summary.notes.push_back(
            "warning: finite-fourth-moment-config (contrast expects an "
            "infinite fourth moment); running anyway");
    }
    TrialGrid grid = make_grid(config);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_trials(config, [&](int mi, int t) {
        TrialRecord& r = grid.at(mi, t);
        const MatrixSample A = sample_matrix(spec, r.N, r.m, r.seed);
        const SpectralSummary s = singular_values(A.matrix);
        r.s1 = s.s1;
        r.sm = s.sm;
        r.sm_scaled = s.scaled_sm;
        r.eps = config.eps;
        r.q_eps = estimate_sup_trimmed(A.matrix, config.eps, 20, 50, -1.0, r.seed).value;
        r.max_abs_entry = max_abs(A.matrix.data);
        if (!(r.sm <= r.s1) || !(r.q_eps <= r.s1 + 1e-8)) {
            throw std::runtime_error("record-invariant: sm <= s1 and q_eps <= s1 + 1e-8");
        }
    });
    out.records = std::move(grid.records);
    out.summary.target = 1.0 - std::sqrt(config.z);
    for (std::size_t mi = 0; mi < config.m_list.size(); ++mi) {
        const auto e = experiment_name(config.experiment);
        const int m = config.m_list[mi];
        out.summary.rows.push_back(make_row(
            e, m, "s1_scaled", collect(out.records, static_cast<int>(mi), config.trials,
                                       [](const TrialRecord& r) {
                                           return r.s1 / std::sqrt(static_cast<double>(r.N));
                                       })));
        out.summary.rows.push_back(make_row(
            e, m, "sm_scaled", collect(out.records, static_cast<int>(mi), config.trials,
                                       [](const TrialRecord& r) { return r.sm_scaled; })));
        out.summary.rows.push_back(make_row(
            e, m, "q_eps_scaled", collect(out.records, static_cast<int>(mi), config.trials,
                                          [](const TrialRecord& r) {
                                              return r.q_eps / std::sqrt(static_cast<double>(r.N));
                                          })));
    }
    out.summary.total_wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
}

RunResult run_mp_check(const ExperimentConfig& config) {
    config.validate();
    const DistributionSpec spec = parse_spec(config.dist);
    TrialGrid grid = make_grid(config);
    std::vector<double> ks(grid.records.size(), 0.0);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_trials(config, [&](int mi, int t) {
        TrialRecord& r = grid.at(mi, t);
        const MatrixSample A = sample_matrix(spec, r.N, r.m, r.seed);
        const SpectralSummary s = singular_values(A.matrix);
        r.s1 = s.s1;
        r.sm = s.sm;
        r.sm_scaled = s.scaled_sm;
        r.max_abs_entry = max_abs(A.matrix.data);
        EsdCurve curve;
        curve.jumps.resize(s.singular_values.size());
        for (std::size_t i = 0; i < s.singular_values.size(); ++i) {
            curve.jumps[i] = s.singular_values[i] * s.singular_values[i] /
                             static_cast<double>(r.N);
        }
        std::sort(curve.jumps.begin(), curve.jumps.end());
        ks[static_cast<std::size_t>(mi) * config.trials + t] = ks_distance(curve, config.z);
    });
    RunResult out;
    out.records = std::move(grid.records);
    for (std::size_t mi = 0; mi < config.m_list.size(); ++mi) {
        std::vector<double> per_m(ks.begin() + static_cast<long>(mi) * config.trials,
                                  ks.begin() + static_cast<long>(mi + 1) * config.trials);
        out.summary.rows.push_back(make_row(experiment_name(config.experiment),
                                            config.m_list[mi], "ks", per_m));
    }
    out.summary.total_wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
}

RunResult run_truncation_pipeline(const ExperimentConfig& config) {
    config.validate();
    if (!(config.eta > 0.0 && config.eta < 1.0)) {
        throw std::invalid_argument("config-invalid: truncate-pipeline needs eta in (0,1)");
    }
    const DistributionSpec spec = parse_spec(config.dist);
    const double M = choose_truncation_level(spec, config.eta); // propagates not-found
    const TruncationReport report = truncation_report(spec, M);
    TrialGrid grid = make_grid(config);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_trials(config, [&](int mi, int t) {
        TrialRecord& r = grid.at(mi, t);
        const MatrixSample A = sample_matrix(spec, r.N, r.m, r.seed);
        // Coupled truncation: same realized entries, truncated entrywise.
        Matrix At = A.matrix;
        for (double& v : At.data) v = apply_centered_truncation_one(v, report);
        const SpectralSummary s = singular_values(A.matrix);
        const SpectralSummary st = singular_values(At);
        r.s1 = s.s1;
        r.sm = s.sm;
        r.sm_scaled = s.scaled_sm;
        r.eps = config.eps;
        r.M_trunc = M;
        r.sm_trunc = st.sm;
        r.gap_scaled = (st.sm - s.sm) / std::sqrt(static_cast<double>(r.N));
        r.max_abs_entry = max_abs(A.matrix.data);
    });
    RunResult out;
    out.records = std::move(grid.records);
    for (std::size_t mi = 0; mi < config.m_list.size(); ++mi) {
        out.summary.rows.push_back(make_row(
            experiment_name(config.experiment), config.m_list[mi], "gap_scaled",
            collect(out.records, static_cast<int>(mi), config.trials,
                    [](const TrialRecord& r) { return r.gap_scaled; })));
    }
    // One-sided acceptance: fraction of trials with gap_scaled <= 0.15.
    double frac = 0.0;
    for (const TrialRecord& r : out.records) {
        if (r.gap_scaled <= 0.15) frac += 1.0;
    }
    frac /= static_cast<double>(out.records.size());
    out.summary.notes.push_back("fraction{gap_scaled <= 0.15} = " + fmt(frac));
    out.summary.total_wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    return out;
}

RunResult run_experiment(const ExperimentConfig& config) {
    switch (config.experiment) {
    case Experiment::Converge: return run_convergence_sweep(config);
    case Experiment::HeavyTail: return run_heavy_tail_contrast(config);
    case Experiment::MpCheck: return run_mp_check(config);
    case Experiment::TruncatePipeline: return run_truncation_pipeline(config);
    case Experiment::Probe:
        throw std::invalid_argument("config-invalid: probes run through the probe CLI");
    }
    throw std::logic_error("unreachable");
}

namespace {

constexpr const char* kCsvHeader =
    "experiment,dist,z,m,N,trial,seed,s1,sm,sm_scaled,q_eps,eps,M_trunc,"
    "sm_trunc,gap_scaled,max_abs_entry,wall_ms";

nlohmann::ordered_json record_json(const TrialRecord& r) {
    nlohmann::ordered_json j;
    j["experiment"] = r.experiment;
    j["dist"] = r.dist;
    j["z"] = r.z;
    j["m"] = r.m;
    j["N"] = r.N;
    j["trial"] = r.trial;
    j["seed"] = r.seed;
    j["s1"] = r.s1;
    j["sm"] = r.sm;
    j["sm_scaled"] = r.sm_scaled;
    j["q_eps"] = r.q_eps;
    j["eps"] = r.eps;
    j["M_trunc"] = r.M_trunc;
    j["sm_trunc"] = r.sm_trunc;
    j["gap_scaled"] = r.gap_scaled;
    j["max_abs_entry"] = r.max_abs_entry;
    j["wall_ms"] = r.wall_ms;
    return j;
}

} // namespace

void write_records(const std::vector<TrialRecord>& records, std::ostream& out,
                   OutputFormat format) {
    if (format == OutputFormat::Csv) {
        out << kCsvHeader << '\n';
        for (const TrialRecord& r : records) {
            out << r.experiment << ',' << r.dist << ',' << fmt(r.z) << ',' << r.m << ','
                << r.N << ',' << r.trial << ',' << r.seed << ',' << fmt(r.s1) << ','
                << fmt(r.sm) << ',' << fmt(r.sm_scaled) << ',' << fmt(r.q_eps) << ','
                << fmt(r.eps) << ',' << fmt(r.M_trunc) << ',' << fmt(r.sm_trunc) << ','
                << fmt(r.gap_scaled) << ',' << fmt(r.max_abs_entry) << ','
                << fmt(r.wall_ms) << '\n';
        }
    } else {
        for (const TrialRecord& r : records) {
            out << record_json(r).dump() << '\n';
        }
    }
}

std::size_t emit_records(const std::vector<TrialRecord>& records,
                         const std::string& path, OutputFormat format) {
    std::ofstream out(path, std::ios::binary); // binary: byte-stable newlines
    if (!out) throw std::runtime_error("io-error: cannot open " + path);
    write_records(records, out, format);
    if (!out) throw std::runtime_error("io-error: write failure on " + path);
    return records.size();
}

std::vector<TrialRecord> parse_jsonl(std::istream& in) {
    std::vector<TrialRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        TrialRecord r;
        r.experiment = j.at("experiment").get<std::string>();
        r.dist = j.at("dist").get<std::string>();
        r.z = j.at("z").get<double>();
        r.m = j.at("m").get<int>();
        r.N = j.at("N").get<int>();
        r.trial = j.at("trial").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.s1 = j.at("s1").get<double>();
        r.sm = j.at("sm").get<double>();
        r.sm_scaled = j.at("sm_scaled").get<double>();
        r.q_eps = j.at("q_eps").get<double>();
        r.eps = j.at("eps").get<double>();
        r.M_trunc = j.at("M_trunc").get<double>();
        r.sm_trunc = j.at("sm_trunc").get<double>();
        r.gap_scaled = j.at("gap_scaled").get<double>();
        r.max_abs_entry = j.at("max_abs_entry").get<double>();
        r.wall_ms = j.at("wall_ms").get<double>();
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<QuantileRow> summarize(const std::vector<TrialRecord>& records) {
    std::map<std::pair<std::string, int>, std::vector<double>> buckets;
    for (const TrialRecord& r : records) {
        buckets[{r.experiment, r.m}].push_back(r.sm_scaled);
    }
    std::vector<QuantileRow> rows;
    for (const auto& [key, values] : buckets) {
        rows.push_back(make_row(key.first, key.second, "sm_scaled", values));
    }
    return rows;
}

} // namespace rmtlab
