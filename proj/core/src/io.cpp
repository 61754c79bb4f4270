#include "aclab/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <ostream>

namespace aclab {

std::string num17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_quote(const std::string& field) {
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_regret_csv(std::ostream& os, const std::vector<RegretRow>& rows) {
  os << "a,b,strategy,mean_cost,stderr,ecost_opt,mreg,mreg_stderr,flags\n";
  for (const auto& r : rows) {
    os << num17(r.a) << ',' << num17(r.b) << ',' << r.strategy << ','
       << num17(r.mc_cost.mean) << ',' << num17(r.mc_cost.std_error) << ','
       << num17(r.ecost_opt_analytic) << ',' << num17(r.mreg) << ','
       << num17(r.mreg_std_error) << ',' << r.flags << '\n';
  }
}

void write_lemma_csv(std::ostream& os, const std::vector<LemmaRow>& rows) {
  os << "lemma,param_json,estimate,stderr,n\n";
  for (const auto& r : rows) {
    os << r.lemma << ',' << csv_quote(r.param_json) << ','
       << num17(r.estimate) << ',' << num17(r.std_error) << ',' << r.n << '\n';
  }
}

std::string sweep_summary_json(const std::vector<RegretRow>& rows,
                               const std::vector<WorstCase>& worst) {
  nlohmann::json j;
  j["rows"] = rows.size();
  j["worst_case"] = nlohmann::json::array();
  for (const auto& w : worst) {
    nlohmann::json entry;
    entry["strategy"] = w.strategy;
    // JSON has no infinity literal; non-finite maxima are written as strings.
    if (std::isfinite(w.max_mreg)) {
      entry["max_mreg"] = w.max_mreg;
    } else {
      entry["max_mreg"] = num17(w.max_mreg);
    }
    entry["argmax_a"] = w.argmax_a;
    entry["argmax_b"] = w.argmax_b;
    j["worst_case"].push_back(entry);
  }
  return j.dump(2) + "\n";
}

}  // namespace aclab
