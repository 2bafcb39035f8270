#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "metricforge/cli/app.hpp"
#include "metricforge/cli/json_io.hpp"
#include "metricforge/models.hpp"

using namespace metricforge;
using namespace metricforge::cli;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
  Json error() const { return Json::parse(err); }
};

Invocation invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  Invocation r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("metricforge_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

ComplexMatrix matrix_of(const Json& j) { return matrix_from_json(j, "test"); }

const std::vector<std::string> kJc{"--model", "jc_doublet", "--params", "n=0,eps=0.5,omega=1,rho=0.125"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST(Cli, MetricBothOnJc) {
  const Invocation r = invoke(with({"metric", "--method", "both"}, kJc));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json();
  EXPECT_EQ(j["results"]["comparison"]["verdict"], "equal");
  const ComplexMatrix expected{{1, -0.5}, {-0.5, 1}};
  EXPECT_LE(max_abs_diff(matrix_of(j["results"]["spectral"]["matrix"]), expected), 1e-10);
  EXPECT_LE(max_abs_diff(matrix_of(j["results"]["das"]["matrix"]), expected), 1e-10);
  EXPECT_EQ(j["command"]["name"], "metric");
  EXPECT_TRUE(j["tolerances"].contains("cmp"));
  EXPECT_TRUE(j["input_digest"].get<std::string>().starts_with("fnv1a64:"));
  EXPECT_FALSE(j["version"].get<std::string>().empty());
}

TEST(Cli, MetricBothOnPt) {
  const Invocation r = invoke({"metric", "--model", "pt_matrix", "--params",
                               "r=1,theta=0.5235987755982988,s=1,t=1,phi=0", "--method", "both"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json c = r.json()["results"]["comparison"];
  EXPECT_EQ(c["verdict"], "proportional");
  EXPECT_NEAR(c["factor"].get<double>(), 4.0 / 3.0, 1e-9);
}

TEST(Cli, IdentityMatrixInput) {
  const auto dir = scratch_dir("identity");
  std::ofstream(dir / "in.json") << R"({"matrix": {"h": [[1, 0], [0, 1]]}})";
  const Invocation r = invoke({"metric", "--in", (dir / "in.json").string(), "--method", "spectral"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json s = r.json()["results"]["spectral"];
  EXPECT_EQ(matrix_of(s["matrix"]), ComplexMatrix::identity(2));
  EXPECT_EQ(s["report"]["hermitian_residual"].get<double>(), 0.0);
  EXPECT_EQ(s["report"]["intertwining_residual"].get<double>(), 0.0);
}

TEST(Cli, MatrixInputWithDasBlock) {
  const ModelInstance m = make_model(ModelFamily::jc_doublet, {{"eps", 0.5}, {"n", 0}, {"omega", 1}, {"rho", 0.125}});
  Json das{{"q0", to_json(m.das_data->q0)}, {"generators", Json::array()}, {"projectors", Json::array()}, {"phases", Json::array()}};
  for (std::size_t i = 0; i < m.das_data->generators.size(); ++i) {
    das["generators"].push_back({{"energy", to_json(m.das_data->generators[i].energy)},
                                 {"sigma", to_json(m.das_data->generators[i].sigma)}});
    das["projectors"].push_back(to_json(m.das_data->projectors[i]));
    das["phases"].push_back(to_json(m.das_data->phases[i]));
  }
  const Json doc{{"matrix", {{"h", to_json(m.hamiltonian)}, {"s", to_json(m.similarity)}, {"das", das}}}};
  const auto dir = scratch_dir("das");
  std::ofstream(dir / "in.json") << dump(doc);
  const Invocation r = invoke({"metric", "--in", (dir / "in.json").string(), "--method", "both"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["results"]["comparison"]["verdict"], "equal");
  EXPECT_LT(r.json()["results"]["pseudo_hermitian_residual"].get<double>(), 1e-14);
}

TEST(Cli, ModelDocumentInput) {
  const auto dir = scratch_dir("model_doc");
  std::ofstream(dir / "in.json")
      << R"({"model": {"family": "dirac_scalar", "params": {"m0": 1, "kx": 0, "v0": 0.6}}})";
  const Invocation r = invoke({"compare", "--in", (dir / "in.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["results"]["comparison"]["verdict"], "equal");
  EXPECT_LE(max_abs_diff(matrix_of(r.json()["results"]["a"]["matrix"]), ComplexMatrix{{1.25, 0.75}, {0.75, 1.25}}), 1e-10);
}

TEST(Cli, ValidateUserMetric) {
  const auto dir = scratch_dir("validate");
  std::ofstream(dir / "in.json") << R"({"matrix": {"h": [[0.25, 0.125], [-0.125, 0.75]], "metric": [[1, -0.5], [-0.5, 1]]}})";
  const Invocation r = invoke({"validate", "--in", (dir / "in.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json()["results"]["valid"].get<bool>());
  EXPECT_NEAR(r.json()["results"]["metric"]["report"]["min_metric_eigenvalue"].get<double>(), 0.5, 1e-14);
}

TEST(Cli, ModelShow) {
  const Invocation r = invoke(with({"model", "show"}, kJc));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json()["results"];
  EXPECT_EQ(j["phase"], "unbroken");
  EXPECT_LT(j["pseudo_hermitian_residual"].get<double>(), 1e-14);
  EXPECT_EQ(j["params"]["hbar"].get<double>(), 1.0);
}

TEST(Cli, SweepJcBracket) {
  const auto dir = scratch_dir("sweep_jc");
  const Invocation r = invoke({"sweep", "--model", "jc_doublet", "--params", "n=0,eps=0.5,omega=1", "--axis",
                               "rho=0:0.5:51", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json b = r.json()["results"]["brackets"];
  ASSERT_FALSE(b.empty());
  for (const auto& x : b) EXPECT_NEAR(x["estimate"].get<double>(), 0.25, 0.01);
  EXPECT_TRUE(std::filesystem::exists(dir / "phase.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "result.json"));
  const Json full = Json::parse(slurp(dir / "result.json"));
  EXPECT_EQ(full["results"]["points"].size(), 51U);
}

TEST(Cli, SweepDiracBracket) {
  const Invocation r =
      invoke({"sweep", "--model", "dirac_scalar", "--params", "m0=1,kx=0", "--axis", "v0=0:2:201"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json b = r.json()["results"]["brackets"];
  ASSERT_FALSE(b.empty());
  for (const auto& x : b) EXPECT_NEAR(x["estimate"].get<double>(), 1.0, 0.01);
}

TEST(Cli, SweepSinglePoint) {
  const auto dir = scratch_dir("sweep_one");
  const Invocation r = invoke({"sweep", "--model", "jc_doublet", "--params", "n=0,eps=0.5,omega=1", "--axis",
                               "rho=0.1:0.1:1", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "phase.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Cli, SweepPerPointFailuresExitZero) {
  const Invocation r =
      invoke({"sweep", "--model", "jc_doublet", "--params", "n=0,eps=0.5,rho=0.1", "--axis", "omega=-1:1:3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["results"]["counts"]["error"].get<int>(), 2);
}

TEST(Cli, EpCommand) {
  const Invocation r = invoke({"ep", "--model", "pt_matrix", "--params", "r=1,theta=1.5707963267948966,t=1", "--param",
                               "s", "--lo", "0.1", "--hi", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.json()["results"]["value"].get<double>(), 1.0, 1e-8);
  EXPECT_LT(r.json()["results"]["defect_indicator"].get<double>(), 1e-8);

  const Invocation none = invoke({"ep", "--model", "jc_doublet", "--params", "n=0,eps=0.5,omega=1", "--param", "rho",
                                  "--lo", "0.3", "--hi", "1"});
  EXPECT_EQ(none.code, 1);
  EXPECT_EQ(none.error()["error"]["code"], "no_bracket");
}

TEST(Cli, EvolveUnbroken) {
  const auto dir = scratch_dir("evolve");
  const Invocation r = invoke(with({"evolve", "--steps", "101", "--t-max", "10", "--out", dir.string()}, kJc));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json()["results"];
  EXPECT_LE(j["max_metric_norm_deviation"].get<double>(), 1e-8);
  EXPECT_GT(j["max_standard_norm_deviation"].get<double>(), 1e-4);
  EXPECT_TRUE(j["summary"].get<std::string>().starts_with("max metric-norm deviation"));
  const std::string csv = slurp(dir / "evolution.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 102);
}

TEST(Cli, EvolveBrokenRequiresOverride) {
  const std::vector<std::string> broken{"--model", "jc_doublet", "--params", "n=0,eps=0.5,omega=1,rho=0.3"};
  const Invocation refused = invoke(with({"evolve"}, broken));
  EXPECT_EQ(refused.code, 2);
  EXPECT_EQ(refused.error()["error"]["code"], "broken_phase");

  // Growing-mode eigenvector (1, sin t' + i cos t') with sin t' = 0.5 / 0.6.
  const double s = 0.5 / 0.6, c = std::sqrt(1 - s * s);
  const std::string psi0 = "1," + std::to_string(s) + ":" + std::to_string(c);
  const Invocation r = invoke(with({"evolve", "--allow-broken", "--psi0", psi0}, broken));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json()["results"];
  const double im = j["max_imag_eigenvalue"].get<double>();
  EXPECT_NEAR(im, 0.16583, 1e-5);
  EXPECT_NEAR(j["growth_rate"].get<double>(), im, 0.01 * im);
  EXPECT_EQ(j["metric_source"], "identity");
}

TEST(Cli, DiscriminateZeroOffset) {
  const Invocation r = invoke({"discriminate", "--eps", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.json()["results"]["distinguishability_gain"].get<double>(), 0.0, 1e-15);
}

TEST(Cli, DiscriminateScanFromFullModel) {
  const auto dir = scratch_dir("scan");
  const Invocation r = invoke({"discriminate", "--model", "jc_full", "--params", "eps=0.5,levels=2,omega=1,rho=0.1",
                               "--scan", "91", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["results"]["scan"]["points"].get<int>(), 91);
  const std::string csv = slurp(dir / "scan.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 92);
}

TEST(Cli, ExitCodes) {
  const Invocation broken = invoke({"metric", "--model", "jc_doublet", "--params", "n=0,eps=0.5,omega=1,rho=0.3"});
  EXPECT_EQ(broken.code, 2);
  EXPECT_EQ(broken.error()["error"]["code"], "broken_phase");

  const Invocation ep = invoke({"metric", "--model", "jc_doublet", "--params", "n=0,eps=0.5,omega=1,rho=0.25"});
  EXPECT_EQ(ep.code, 3);
  EXPECT_EQ(ep.error()["error"]["code"], "defective_system");

  const Invocation flag = invoke({"metric", "--bogus"});
  EXPECT_EQ(flag.code, 4);
  EXPECT_EQ(flag.error()["error"]["code"], "parse_error");

  const Invocation params = invoke({"metric", "--model", "jc_doublet", "--params", "eps=abc"});
  EXPECT_EQ(params.code, 4);

  const auto dir = scratch_dir("bad_json");
  std::ofstream(dir / "in.json") << "{ not json";
  EXPECT_EQ(invoke({"metric", "--in", (dir / "in.json").string()}).code, 4);
  std::ofstream(dir / "both.json") << R"({"model": {"family": "jc_doublet"}, "matrix": {"h": [[1]]}})";
  EXPECT_EQ(invoke({"metric", "--in", (dir / "both.json").string()}).code, 4);
  std::ofstream(dir / "ragged.json") << R"({"matrix": {"h": [[1, 2], [3]]}})";
  EXPECT_EQ(invoke({"metric", "--in", (dir / "ragged.json").string()}).code, 4);

  const Invocation axis = invoke({"sweep", "--model", "jc_doublet", "--params", "n=0,eps=0.5,omega=1", "--axis", "rho=0:1"});
  EXPECT_EQ(axis.code, 2);
  EXPECT_EQ(axis.error()["error"]["code"], "malformed_axis");

  const Invocation tol = invoke(with({"metric", "--tol", "nope=1"}, kJc));
  EXPECT_EQ(tol.code, 4);

  const Invocation model = invoke({"metric", "--model", "bogus"});
  EXPECT_EQ(model.code, 1);
  EXPECT_EQ(model.error()["error"]["code"], "invalid_params");

  const Invocation help = invoke({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("sweep"), std::string::npos);
  EXPECT_EQ(invoke({}).code, 4);
}

TEST(Cli, ToleranceOverrideIsEchoed) {
  const Invocation r = invoke(with({"metric", "--tol", "cmp=1e-6"}, kJc));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["tolerances"]["cmp"].get<double>(), 1e-6);
}

TEST(Cli, OutputIsDeterministic) {
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  const std::vector<std::string> sweep{"sweep", "--model", "jc_full", "--params", "eps=0.5,omega=1", "--axis",
                                       "rho=0:0.4:21", "--axis", "levels=1:3:3"};
  const Invocation r1 = invoke(with(sweep, {"--threads", "1", "--out", a.string()}));
  const Invocation r2 = invoke(with(sweep, {"--threads", "4", "--out", b.string()}));
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_EQ(slurp(a / "phase.csv"), slurp(b / "phase.csv"));
  Json j1 = Json::parse(slurp(a / "result.json")), j2 = Json::parse(slurp(b / "result.json"));
  EXPECT_EQ(j1["results"], j2["results"]);
  EXPECT_EQ(invoke(with({"metric", "--method", "both"}, kJc)).out, invoke(with({"metric", "--method", "both"}, kJc)).out);
}

TEST(Cli, RoundTripPreservesValues) {
  const Invocation r = invoke({"metric", "--model", "pt_matrix", "--params", "r=0.7,theta=0.3,s=1.3,t=0.4,phi=0.2",
                               "--method", "spectral"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = r.json();
  EXPECT_EQ(dump(j), r.out);

  const ModelInstance m = make_model(ModelFamily::pt_matrix, {{"r", 0.7}, {"theta", 0.3}, {"s", 1.3}, {"t", 0.4}, {"phi", 0.2}});
  const MetricOperator direct = model_spectral_metric(m);
  EXPECT_EQ(matrix_of(j["results"]["spectral"]["matrix"]), direct.matrix);
  EXPECT_EQ(j["results"]["spectral"]["report"]["intertwining_residual"].get<double>(), direct.report.intertwining_residual);
}

TEST(Cli, CanonicalDump) {
  const Json j{{"b", 1.0}, {"a", {0.1, 2}}, {"c", {{"x", -0.0}}}};
  EXPECT_EQ(dump(j), "{\n  \"a\": [0.10000000000000001, 2],\n  \"b\": 1.0,\n  \"c\": {\n    \"x\": -0.0\n  }\n}\n");
  EXPECT_EQ(digest(j), digest(Json::parse(dump(j))));
}

TEST(Cli, ParseHelpers) {
  const ParamMap p = parse_params("a=1, b=-2.5e-3");
  EXPECT_EQ(p.at("a"), 1.0);
  EXPECT_EQ(p.at("b"), -2.5e-3);
  EXPECT_THROW(parse_params("a=1,a=2"), Error);
  EXPECT_THROW(parse_params("a"), Error);
  const Axis a = parse_axis("rho=0:0.5:51");
  EXPECT_EQ(a.name, "rho");
  EXPECT_EQ(a.values.size(), 51U);
  EXPECT_THROW(parse_axis("rho=0:0.5:2.5"), UsageFailure);
  EXPECT_THROW(parse_axis("rho=0:x:3"), UsageFailure);
  EXPECT_EQ(exit_code_for(ErrorCode::defective_matrix), kExitDefective);
}
