#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wna/kernels.hpp"
#include "wna/scaled_value.hpp"

namespace wna {

enum class Task {
    eval_c,
    eval_l,
    lemma1,
    thm1,
    thm2,
    thm3,
    thm4,
    identities,
    stechkin_sum,
};

std::string task_name(Task t);

// r grid per n: an explicit list, or `count` samples of the band the task
// lives in (linear in band 1, log-spaced in band 2).
struct RRule {
    bool band_samples = true;
    int count = 5;
    std::vector<double> values;
};

struct SweepSpec {
    Task task = Task::thm1;
    std::vector<std::int64_t> n_values;
    RRule r_rule;
    std::vector<double> p_values = {2.0};
    PhaseRule phase = PhaseRule::constant(0.0);
    TruncationBudget accuracy{1e-12, 50'000'000};
    int oversample = 8;
    bool parallel = true;
    std::string out;          // optional output path from the config
    double poisson_q = 0.0;   // > 0 switches eval tasks to the Poisson family
    bool mains_only = false;  // emit main terms without computing E_n
};

struct ReportRow {
    std::string task;
    double p = 0.0;
    double r = 0.0;
    std::int64_t n = 0;
    std::string beta;
    double computed_mantissa = 0.0;
    double log10_scale = 0.0;
    double main_mantissa = 0.0;
    double remainder_mantissa = 0.0;
    double gap = 0.0;             // computed - main, mantissa space
    double normalized_gap = 0.0;  // gap / remainder_mantissa
    std::string regime;
    std::string formula_id;
    double quad_err = 0.0;

    bool operator==(const ReportRow&) const = default;
};

class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& what, int line)
        : std::runtime_error(what), line_number(line) {}
    int line_number;
};

/// Parses `key=value` lines ('#' comments).  Keys: task, n, r, p, beta, tol,
/// oversample, parallel, out.  Unknown keys and out-of-range values are
/// rejected with the offending line number.
SweepSpec parse_config(std::string_view text);

/// One row per (task, n, r, p) tuple.  Point failures become error rows
/// (regime = "error"); the sweep continues.  Results are identical with
/// parallel on or off.
std::vector<ReportRow> run_sweep(const SweepSpec& spec);

enum class Format { csv, json };

void emit(const std::vector<ReportRow>& rows, Format format, std::ostream& out);
void emit_to_file(const std::vector<ReportRow>& rows, Format format,
                  const std::string& path);

/// Inverse of the JSON emitter, for round-trip checks and downstream tools.
std::vector<ReportRow> rows_from_json(const std::string& text);

/// True when the row set holds no failures: no error rows and no violated
/// checks (normalized_gap >= 1 on verification tasks).
bool all_assertions_passed(const std::vector<ReportRow>& rows);

}  // namespace wna
