#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ddslab/lseries.hpp"
#include "ddslab/quadchar.hpp"

namespace ddslab::xcli {

using lseries::CoefficientSystem;
using quadchar::SymbolContext;

// ---- configuration ----

// Line-oriented `key = value` file; '#' starts a comment. Lists are comma separated.
struct ExperimentConfig {
    std::string field = "Q";
    std::string system = "sym2_delta";  // sym2_delta | synthetic
    std::string coeff_cache;            // optional cache file replacing the on-the-fly build
    u64 seed = 1;                       // synthetic system
    std::vector<u64> S{2};              // finite primes of S
    int precision_bits = 53;
    std::vector<double> s_set{0.5};
    std::vector<double> x_ladder{1000, 3000, 10000};     // exp nonvanishing
    std::vector<u64> Y_ladder{500, 1000, 2000, 4000};    // exp meansquare
    std::vector<u64> X_ladder{1000, 3000, 10000};        // Euler product cutoffs
    u64 r_min = 3, r_max = 200;                          // exp determination
    u64 r0 = 101;
    double delta = 0.1;
    int cls = -1;              // class index for I(x); -1 sums over all classes
    double y_max = 5.0;        // central-value cutoff n <= y_max sqrt(conductor)
    double d_trunc = 6.0;      // I(x) keeps D <= d_trunc * x
    double budget_seconds = 600;
    unsigned workers = 1;
    std::string output;        // empty: standard output
    std::string format = "csv";  // csv | json
    std::map<std::string, double> tol;  // tol.<name> overrides

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    // Apply one `key = value` assignment.
    void set(const std::string& key, const std::string& value);
    // Canonical text; parse(echo()) reproduces the same config.
    std::string echo() const;
    // Throws ConfigError / IoError on unsupported settings or a bad cache file.
    void validate() const;
    double tolerance(const std::string& name, double fallback) const;
};

// ---- result tables ----

struct ResultTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> meta;

    ResultTable() = default;
    ResultTable(std::string name, std::vector<std::string> columns);
    void add_row(std::vector<double> row);  // StructuralError on arity mismatch
    double at(std::size_t row, const std::string& column) const;
    std::vector<double> column(const std::string& column) const;
    void add_meta(std::string key, std::string value);
    std::string meta_value(const std::string& key) const;

    std::string to_csv() const;
    std::string to_json() const;
    std::string to_plot_data() const;  // whitespace columns, '#' header
};

std::string provenance();
std::string format_double(double v);  // shortest round-trip form, "nan" / "inf" / "-inf"

// ---- coefficient systems for experiments ----

// Coefficient system covering every prime up to max_prime, from the cache file when configured.
CoefficientSystem load_system(const ExperimentConfig& cfg, u64 max_prime);

// ---- twisted central values ----

// Odd squarefree D <= D_max, in increasing order.
std::vector<u64> odd_squarefree_up_to(u64 D_max);

struct CentralCost {
    u64 D_max = 0;
    u64 n_max = 0;        // coefficients needed
    double terms = 0;     // total central-value terms
    double seconds = 0;   // pinned throughput model
};

// Cost of L^S(1/2, pi x chi_D) for all odd squarefree D <= D_max (conductor one, degree three),
// optionally with the coefficient build.
CentralCost estimate_central_cost(u64 D_max, double y_max, bool include_build = true);

// L^S(1/2, pi x chi_D) for each odd squarefree D; index-aligned with Ds. Workers split the list into
// contiguous blocks; the values do not depend on the worker count.
std::vector<double> twisted_central_values(const CoefficientSystem& sys, const std::vector<u64>& Ds, double y_max,
                                           unsigned workers);

// ---- experiments ----

ResultTable exp_nonvanishing(const ExperimentConfig& cfg, const SymbolContext& ctx);
ResultTable exp_meansquare(const ExperimentConfig& cfg);
ResultTable exp_determination(const CoefficientSystem& A, const CoefficientSystem& B, u64 r_lo, u64 r_hi,
                              const SymbolContext& ctx);

struct NonvanishingCount {
    u64 total = 0;
    u64 nonzero = 0;
    double min_abs = 0;
};
NonvanishingCount count_nonvanishing(const CoefficientSystem& sys, u64 D_max, double y_max, double threshold,
                                     unsigned workers);

// Least-squares slope of log(sum) against log(Y).
double loglog_slope(const std::vector<double>& Y, const std::vector<double>& v);

// ---- acceptance criteria ----

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0;
    double limit_seconds = 0;
    std::string detail;
};

int criterion_count();
CriterionResult run_criterion(int id, const ExperimentConfig& cfg);
std::string format_criterion(const CriterionResult& r);

// ---- command line ----

// Returns the process exit code; errors are one line on err: "error <CODE>: <message>".
int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int exit_code_for(const std::string& error_code);

}  // namespace ddslab::xcli
