#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rmtlab/distribution.hpp"

namespace rmtlab {

enum class Experiment { Converge, HeavyTail, MpCheck, TruncatePipeline, Probe };
enum class OutputFormat { Csv, Jsonl };

std::string experiment_name(Experiment e);
Experiment parse_experiment(const std::string& name);

struct ExperimentConfig {
    Experiment experiment = Experiment::Converge;
    std::string dist = "gaussian";
    double z = 0.25;
    std::vector<int> m_list = {100};
    int trials = 1;
    double eps = 0.1;
    double eta = 0.1;
    std::uint64_t seed = 0;
    std::string output;
    OutputFormat format = OutputFormat::Csv;
    int workers = 1;

    void validate() const; // throws std::invalid_argument("config-invalid: ...")
};

// N_m = round(m / z), ties away from zero (up).
int aspect_rows(int m, double z);

// One experiment trial. Fields not produced by an experiment stay 0. wall_ms
// is carried verbatim by the serializers; the runners leave it at 0 so that
// identical configs yield byte-identical output (timing goes to the summary).
struct TrialRecord {
    std::string experiment;
    std::string dist;
    double z = 0.0;
    int m = 0;
    int N = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double s1 = 0.0;
    double sm = 0.0;
    double sm_scaled = 0.0;
    double q_eps = 0.0;
    double eps = 0.0;
    double M_trunc = 0.0;
    double sm_trunc = 0.0;
    double gap_scaled = 0.0;
    double max_abs_entry = 0.0;
    double wall_ms = 0.0;

    bool operator==(const TrialRecord&) const = default;
};

struct QuantileRow {
    std::string experiment;
    int m = 0;
    std::string field;
    double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0, mean = 0.0;
};

struct RunSummary {
    std::vector<QuantileRow> rows;
    double target = 0.0;       // 1 - sqrt(z) where applicable
    double total_wall_ms = 0.0;
    std::vector<std::string> notes;

    const QuantileRow* find(const std::string& field, int m) const;
    std::string to_text() const;
};

struct RunResult {
    std::vector<TrialRecord> records; // sorted by (m, trial)
    RunSummary summary;
};

RunResult run_convergence_sweep(const ExperimentConfig& config);
RunResult run_heavy_tail_contrast(const ExperimentConfig& config);
RunResult run_mp_check(const ExperimentConfig& config);
RunResult run_truncation_pipeline(const ExperimentConfig& config);
RunResult run_experiment(const ExperimentConfig& config); // dispatch on kind

// CSV header:
// experiment,dist,z,m,N,trial,seed,s1,sm,sm_scaled,q_eps,eps,M_trunc,sm_trunc,gap_scaled,max_abs_entry,wall_ms
// JSONL uses the same field names, one record per line.
std::size_t emit_records(const std::vector<TrialRecord>& records,
                         const std::string& path, OutputFormat format);
void write_records(const std::vector<TrialRecord>& records, std::ostream& out,
                   OutputFormat format);
std::vector<TrialRecord> parse_jsonl(std::istream& in);

// min/q25/median/q75/max/mean of sm_scaled per (experiment, m).
std::vector<QuantileRow> summarize(const std::vector<TrialRecord>& records);

} // namespace rmtlab
