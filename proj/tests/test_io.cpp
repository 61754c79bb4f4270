#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "aclab/experiments.hpp"
#include "aclab/io.hpp"
#include "doctest.h"

using namespace aclab;

TEST_SUITE("io") {

TEST_CASE("num17 round-trips doubles and names non-finite values") {
  CHECK(num17(0.0) == "0");
  CHECK(num17(1.5) == "1.5");
  CHECK(num17(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(num17(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(num17(std::nan("")) == "nan");
  for (double x : {0.1, 1.0 / 3.0, 2.4786349854525334, 1e-300, -6.02e23}) {
    CHECK(std::stod(num17(x)) == x);
  }
}

TEST_CASE("csv quoting doubles embedded quotes") {
  CHECK(csv_quote("plain") == "\"plain\"");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("") == "\"\"");
}

TEST_CASE("regret csv layout") {
  RegretRow r;
  r.a = -5.0;
  r.b = 2.0;
  r.strategy = "cg(1)";
  r.mc_cost.mean = 1.25;
  r.mc_cost.std_error = 0.03125;
  r.ecost_opt_analytic = 1.0;
  r.mreg = 1.25;
  r.mreg_std_error = 0.03125;
  RegretRow o;
  o.a = 0.0;
  o.b = 0.0;
  o.strategy = "br";
  o.mc_cost.mean = std::numeric_limits<double>::infinity();
  o.ecost_opt_analytic = 1.0;
  o.mreg = std::numeric_limits<double>::infinity();
  o.flags = "overflow";

  std::ostringstream os;
  write_regret_csv(os, {r, o});
  CHECK(os.str() ==
        "a,b,strategy,mean_cost,stderr,ecost_opt,mreg,mreg_stderr,flags\n"
        "-5,2,cg(1),1.25,0.03125,1,1.25,0.03125,\n"
        "0,0,br,inf,0,1,inf,0,overflow\n");
}

TEST_CASE("lemma csv layout quotes the parameter payload") {
  LemmaRow row{"bkpl-A", "{\"Q0\":1,\"alpha\":50}", 0.5, 0.03125, 1600};
  std::ostringstream os;
  write_lemma_csv(os, {row});
  CHECK(os.str() ==
        "lemma,param_json,estimate,stderr,n\n"
        "bkpl-A,\"{\"\"Q0\"\":1,\"\"alpha\"\":50}\",0.5,0.03125,1600\n");
}

TEST_CASE("sweep summary json shape") {
  RegretRow r;
  r.strategy = "br";
  const std::vector<WorstCase> worst = {
      WorstCase{"br", 1.75, 5.0, -0.25},
      WorstCase{"cg(0)", std::numeric_limits<double>::infinity(), 15.0, 403.0}};
  const std::string text = sweep_summary_json({r, r, r}, worst);
  CHECK(text.back() == '\n');
  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j.at("rows") == 3);
  REQUIRE(j.at("worst_case").size() == 2);
  CHECK(j["worst_case"][0].at("strategy") == "br");
  CHECK(j["worst_case"][0].at("max_mreg") == 1.75);
  CHECK(j["worst_case"][0].at("argmax_a") == 5.0);
  CHECK(j["worst_case"][0].at("argmax_b") == -0.25);
  // JSON has no infinity literal; non-finite maxima arrive as strings.
  CHECK(j["worst_case"][1].at("max_mreg") == "inf");
}

}  // TEST_SUITE
