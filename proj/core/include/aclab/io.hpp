#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aclab/experiments.hpp"

namespace aclab {

// Formats a double with 17 significant digits (%.17g equivalent via
// std::to_chars), enough to round-trip any IEEE double. All CSV floats use
// this; non-finite values print as "inf"/"-inf"/"nan".
std::string num17(double x);

// RFC 4180 quoting: wraps in double quotes and doubles embedded quotes.
// Applied to fields that may contain commas (e.g. JSON payloads).
std::string csv_quote(const std::string& field);

// Header: a,b,strategy,mean_cost,stderr,ecost_opt,mreg,mreg_stderr,flags
void write_regret_csv(std::ostream& os, const std::vector<RegretRow>& rows);

// One verify-lemma result row. param_json holds the full LemmaTrialSpec
// parameter set as a JSON object so rows are self-describing.
struct LemmaRow {
  std::string lemma;
  std::string param_json;
  double estimate;
  double std_error;
  long long n;
};

// Header: lemma,param_json,estimate,stderr,n
void write_lemma_csv(std::ostream& os, const std::vector<LemmaRow>& rows);

// JSON object with the per-strategy worst-case regret table and row count.
// Numbers are emitted in shortest round-trip form (value-preserving).
std::string sweep_summary_json(const std::vector<RegretRow>& rows,
                               const std::vector<WorstCase>& worst);

}  // namespace aclab
