#include <sstream>

#include "doctest.h"
#include "sap/experiment.hpp"
#include "util.hpp"

using namespace sap;

TEST_CASE("config parsing: key=value lines, comments, overrides, errors") {
  std::stringstream in(
      "# a comment\n"
      "sketch.variant = block\n"
      "sketch.tau=5\n"
      "\n"
      "omega = 1.5\n");
  ExperimentConfig cfg = ExperimentConfig::parse(in);
  CHECK(cfg.get("sketch.variant") == "block");
  CHECK(cfg.get_int("sketch.tau", 0) == 5);
  CHECK(cfg.get_double("omega", 0.0) == doctest::Approx(1.5));
  cfg.set("omega", "0.5");  // CLI-style override
  CHECK(cfg.get_double("omega", 0.0) == doctest::Approx(0.5));
  std::stringstream bad("omega 1.5\n");
  CHECK_THROWS_AS(ExperimentConfig::parse(bad), ValidationError);
  CHECK_THROWS_AS(cfg.get("missing"), ValidationError);
}

TEST_CASE("generators produce consistent systems with the documented shapes") {
  const LinearSystem g = gaussian_system(20, 10, 7);
  CHECK(g.rows() == 20);
  CHECK(g.cols() == 10);
  const LinearSystem s = spd_system(25, 12, 7);
  CHECK(s.rows() == 12);
  CHECK((s.A() - s.A().transpose()).norm() <= 1e-12 * s.A().norm());
  CHECK_FALSE(s.B().is_identity());
  const LinearSystem sp = sparse_row_system(30, 15, 4, 7);
  for (Eigen::Index i = 0; i < 30; ++i) {
    int nnz = 0;
    for (Eigen::Index j = 0; j < 15; ++j)
      if (sp.A()(i, j) != 0.0) ++nnz;
    CHECK(nnz == 4);
  }
  CHECK(make_system("gaussian:8x4:3").rows() == 8);
  CHECK_THROWS_AS(make_system("gaussian:8"), ValidationError);
}

TEST_CASE("runs are reproducible: same master seed gives identical CSV bytes") {
  ExperimentConfig cfg;
  cfg.set("system", "gaussian:15x8:11");
  cfg.set("trials", "4");
  cfg.set("seed", "99");
  cfg.set("max-iters", "50");
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(cfg);
  std::stringstream sa, sb;
  a.trace.write_csv(sa);
  b.trace.write_csv(sb);
  CHECK(sa.str() == sb.str());
  CHECK(!sa.str().empty());
}

TEST_CASE("trial execution order does not change the aggregated output") {
  ExperimentConfig cfg;
  cfg.set("system", "gaussian:15x8:11");
  cfg.set("trials", "6");
  cfg.set("seed", "99");
  cfg.set("max-iters", "40");
  cfg.set("threads", "1");
  const ExperimentResult serial = run_experiment(cfg);
  cfg.set("threads", "3");
  const ExperimentResult parallel = run_experiment(cfg);
  std::stringstream sa, sb;
  serial.trace.write_csv(sa);
  parallel.trace.write_csv(sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("CSV round-trips through parse(emit(trace))") {
  Trace t;
  t.add(0, 0, "rel_err", 1.0);
  t.add(0, 1, "rel_err", 0.25);
  t.add(1, 0, "mass", 17.125);
  std::stringstream s;
  t.write_csv(s);
  const Trace back = Trace::read_csv(s);
  REQUIRE(back.records().size() == t.records().size());
  for (std::size_t i = 0; i < t.records().size(); ++i) {
    CHECK(back.records()[i].trial == t.records()[i].trial);
    CHECK(back.records()[i].iteration == t.records()[i].iteration);
    CHECK(back.records()[i].metric == t.records()[i].metric);
    CHECK(back.records()[i].value == t.records()[i].value);
  }
  std::stringstream bad("wrong,header,row,here\n");
  CHECK_THROWS_AS(Trace::read_csv(bad), ValidationError);
}

TEST_CASE("plot script: empty trace still yields valid syntax") {
  const Trace empty;
  const std::string script = emit_plot_script(empty, "empty");
  CHECK(script.find("set logscale y") != std::string::npos);
  CHECK(script.find("plot NaN notitle") != std::string::npos);
}

TEST_CASE("plot script golden file: one curve per labelled series") {
  std::vector<std::pair<std::string, std::vector<std::pair<long long, double>>>> curves;
  curves.emplace_back("beta=0", std::vector<std::pair<long long, double>>{{0, 1.0}, {1, 0.5}});
  curves.emplace_back("beta=0.5", std::vector<std::pair<long long, double>>{{0, 1.0}, {1, 0.25}});
  const std::string script = emit_plot_script(curves, "momentum sweep");
  const std::string expected =
      "set title 'momentum sweep'\n"
      "set xlabel 'iteration'\n"
      "set ylabel 'value'\n"
      "set logscale y\n"
      "$data0 << EOD\n"
      "0 1\n"
      "1 0.5\n"
      "EOD\n"
      "$data1 << EOD\n"
      "0 1\n"
      "1 0.25\n"
      "EOD\n"
      "plot $data0 using 1:2 with lines title 'beta=0', \\\n"
      "     $data1 using 1:2 with lines title 'beta=0.5'\n";
  CHECK(script == expected);
}

TEST_CASE("trace validation rejects non-finite values") {
  Trace t;
  CHECK_THROWS_AS(t.add(0, 0, "x", std::numeric_limits<double>::infinity()), NumericalError);
}

TEST_CASE("momentum sweep: the right beta beats the plain method head to head") {
  const auto iterations_to_target = [](const char* system, const char* beta) {
    ExperimentConfig cfg;
    cfg.set("system", system);
    cfg.set("variant", "momentum");
    cfg.set("omega", "1");
    cfg.set("momentum.beta", beta);
    cfg.set("trials", "3");
    cfg.set("seed", "4242");
    cfg.set("max-iters", "3000000");
    cfg.set("target", "1e-6");
    cfg.set("record-every", "1000000000");  // only endpoints matter here
    const ExperimentResult res = run_experiment(cfg);
    std::vector<long long> finals;
    for (int t : res.trace.trials()) finals.push_back(res.trace.series(t, "rel_err").back().first);
    std::sort(finals.begin(), finals.end());
    return finals[finals.size() / 2];  // median
  };
  // moderate conditioning: beta = 0.4 wins
  CHECK(iterations_to_target("gaussian:300x200:5", "0.4") <
        iterations_to_target("gaussian:300x200:5", "0"));
  // heavy momentum pays off on the very ill-conditioned, nearly square system
  CHECK(iterations_to_target("gaussian:300x280:5", "0.5") <
        iterations_to_target("gaussian:300x280:5", "0"));
}

TEST_CASE("gossip and privacy modes run end to end from a config") {
  ExperimentConfig g;
  g.set("graph", "cycle:8");
  g.set("protocol", "mrk");
  g.set("momentum.beta", "0.3");
  g.set("trials", "2");
  g.set("iters", "200");
  const ExperimentResult gr = run_experiment(g);
  CHECK(!gr.trace.empty());
  CHECK(gr.summary.find("gossip") == 0);

  ExperimentConfig p;
  p.set("graph", "cycle:8");
  p.set("privacy.oracle", "gap");
  p.set("privacy.epsilon", "0.05");
  p.set("trials", "2");
  p.set("iters", "200");
  const ExperimentResult pr = run_experiment(p);
  CHECK(!pr.trace.empty());
  const auto series = pr.trace.series(0, "dist_sq");
  CHECK(!series.empty());
}

TEST_CASE("record_objective is gated to closed-form distributions") {
  ExperimentConfig cfg;
  cfg.set("graph", "grid:3x3");
  cfg.set("protocol", "block");
  cfg.set("tau", "3");
  cfg.set("trials", "1");
  cfg.set("iters", "50");
  const ExperimentResult res = run_experiment(cfg);
  CHECK(res.trace.series(0, "f").empty());       // block sampling: no cheap f
  CHECK(!res.trace.series(0, "rel_err").empty());
  CHECK(!res.trace.series(0, "mass").empty());
}

TEST_CASE("single trial with a zero horizon records exactly the initial point") {
  ExperimentConfig cfg;
  cfg.set("system", "gaussian:10x5:2");
  cfg.set("trials", "1");
  cfg.set("max-iters", "0");
  const ExperimentResult res = run_experiment(cfg);
  const auto series = res.trace.series(0, "rel_err");
  REQUIRE(series.size() == 1);
  CHECK(series[0].first == 0);
  CHECK(series[0].second == doctest::Approx(1.0));
}

TEST_CASE("the dual variant records a decaying dual suboptimality") {
  ExperimentConfig cfg;
  cfg.set("system", "gaussian:20x8:3");
  cfg.set("variant", "dual");
  cfg.set("trials", "1");
  cfg.set("max-iters", "800");
  const ExperimentResult res = run_experiment(cfg);
  const auto series = res.trace.series(0, "dual_subopt");
  REQUIRE(series.size() > 2);
  CHECK(series.front().second > series.back().second);
  CHECK(series.back().second <= 1e-3 * series.front().second);
  // suboptimality equals half the squared B-distance of the primal image
  const auto rel = res.trace.series(0, "rel_err");
  CHECK(rel.back().second <= 1e-3);
}

TEST_CASE("the accelerated variant drives the error down through run()") {
  ExperimentConfig cfg;
  cfg.set("system", "gaussian:40x12:4");
  cfg.set("variant", "accelerated");
  cfg.set("acc.option", "2");
  cfg.set("trials", "1");
  cfg.set("max-iters", "4000");
  const ExperimentResult res = run_experiment(cfg);
  const auto series = res.trace.series(0, "rel_err");
  CHECK(series.back().second <= 1e-6);
}
