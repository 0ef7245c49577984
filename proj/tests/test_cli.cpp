#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "twistcart/commands.hpp"

using namespace twistcart;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  std::string cmd = std::string(TWISTCART_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = ::pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

json run_json(const std::string& args, int expect_code) {
  CliRun r = run(args);
  EXPECT_EQ(r.code, expect_code) << args;
  return json::parse(r.out);
}

std::string c(const std::string& rel) { return corpus::default_dir() + "/" + rel; }

// first field of `sha256sum path`
std::string coreutils_sha(const std::string& path) {
  std::string cmd = "sha256sum '" + path + "'";
  FILE* p = ::popen(cmd.c_str(), "r");
  char buf[256] = {0};
  std::size_t n = std::fread(buf, 1, sizeof buf - 1, p);
  ::pclose(p);
  std::string s(buf, n);
  return s.substr(0, s.find(' '));
}

}  // namespace

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(cli::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Guarded, ErrorKindsMapToExitCodes) {
  auto unstable = cli::guarded("x", []() -> cli::Report { throw Error(ErrorKind::UnstableWindow, "moved"); });
  EXPECT_EQ(unstable.exit_code, 3);
  EXPECT_EQ(unstable.body["error"]["kind"], "UnstableWindow");
  auto parse = cli::guarded("x", []() -> cli::Report { throw Error(ErrorKind::NotClosed, "no"); });
  EXPECT_EQ(parse.exit_code, 2);
  EXPECT_EQ(parse.body["schema"], cli::report_schema);
}

TEST(Cli, CohomologyCounterexampleReport) {
  std::string model = c("models/s1_trivial.json"), eta = c("twistings/s1_trivial_theta_x.json");
  json r = run_json("cohomology " + model + " --eta " + eta, 0);
  EXPECT_EQ(r["schema"], "twistcart.report/1");
  EXPECT_EQ(r["command"], "cohomology");
  ASSERT_EQ(r["inputs"].size(), 2u);
  EXPECT_EQ(r["inputs"][0]["sha256"], coreutils_sha(model));
  EXPECT_EQ(r["inputs"][1]["sha256"], coreutils_sha(eta));
  EXPECT_EQ(r["window"]["W"], 5);
  EXPECT_EQ(r["results"]["twisted"]["even"], 0);
  EXPECT_EQ(r["results"]["twisted"]["odd"], 1);
  EXPECT_EQ(r["results"]["etaExact"], false);
  // H(S1) x C[x]: one class in each degree up to W
  for (int n = 0; n <= 5; ++n) EXPECT_EQ(r["results"]["untwisted"][std::to_string(n)], 1) << n;
}

TEST(Cli, OutputIsDeterministic) {
  std::string args = "spectral " + c("models/t3.json") + " --eta " + c("twistings/t3_volume.json");
  CliRun a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
}

TEST(Cli, SpectralVolumeTwist) {
  json r = run_json("spectral " + c("models/t3.json") + " --eta " + c("twistings/t3_volume.json"), 0);
  EXPECT_EQ(r["results"]["etaPage"], 3);
  EXPECT_EQ(r["results"]["converged"], true);
  EXPECT_EQ(r["results"]["eInfinityTotal"]["even"], 3);
  EXPECT_EQ(r["results"]["eInfinityTotal"]["odd"], 3);
  json l = run_json("spectral " + c("models/s1_trivial.json") + " --eta " + c("twistings/s1_trivial_theta_x.json") +
                        " --filtration L",
                    0);
  EXPECT_EQ(l["results"]["collapse_page"], 2);
  EXPECT_EQ(l["results"]["collapse"], false);
}

TEST(Cli, Cofinality) {
  json r = run_json("spectral cofinality " + c("models/t3_trivial_r1.json"), 0);
  EXPECT_EQ(r["results"]["holds"], true);
  EXPECT_EQ(r["results"]["asWrittenHolds"], false);
  EXPECT_EQ(r["results"]["n"], 3);
}

TEST(Cli, GcSubcommands) {
  EXPECT_EQ(run("gc check " + c("gc/symplectic_n2.json")).code, 0);
  json bad = run_json("gc check " + c("gc/identity_nonexample.json"), 1);
  EXPECT_EQ(bad["results"]["ok"], false);
  // the +i eigenspace is maximal isotropic in (V + V*) (x) C: half the size of J
  json e = run_json("gc eigen " + c("gc/complex_n2.json"), 0);
  std::size_t size = read_json_file(c("gc/complex_n2.json"))["J"].size();
  EXPECT_EQ(e["results"]["dimension"], size / 2);
  EXPECT_EQ(e["results"]["roundTrip"], true);
  json gk = run_json("gc gk " + c("gc/euclidean_r2.json"), 0);
  EXPECT_EQ(gk["results"]["recovered"], true);
  EXPECT_EQ(run("gc moment " + c("gc/symplectic_rotation_r2.json")).code, 0);
  // iota_{d2} iota_{d1} (theta1 theta2 theta3) = theta3
  json br = run_json("gc bracket " + c("gc/t3_volume_bracket.json"), 0);
  EXPECT_EQ(br["results"]["bracket"], json::parse(R"(["0","0","0","0","0","1"])"));
}

TEST(Cli, EllipticSubcommands) {
  json co = run_json("elliptic coeffs --h 0.125", 0);
  EXPECT_EQ(co["results"]["maxDeviationFrom2I"], 0.0);
  EXPECT_EQ(run("elliptic maxcheck --sample re_z3 --radius 0.9").code, 0);
  json bump = run_json("elliptic maxcheck --sample bump --radius 0.9", 1);
  EXPECT_EQ(bump["results"]["pass"], false);
  json rc = run_json("elliptic rc --sample z3 --h 0.015625", 0);
  EXPECT_LT(rc["results"]["rcResidual"].get<double>(), 1e-3);
  json w = run_json("elliptic rc --sample exp --warped --h 0.015625", 0);
  EXPECT_LT(w["results"]["operatorResidual"].get<double>(), 1e-2);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("cohomology /nonexistent.json").code, 2);
  EXPECT_EQ(run("spectral " + c("models/t3.json") + " --filtration X").code, 2);
  json g = run_json("elliptic rc --h 0.5", 2);
  EXPECT_EQ(g["error"]["kind"], "GridTooSmall");
  json s = run_json("elliptic maxcheck --sample sin", 2);
  EXPECT_EQ(s["error"]["kind"], "Parse");
  // exponent lists in the twisting have length 1, not 2
  EXPECT_EQ(run("cohomology " + c("models/s1_trivial.json") + " --rank 2 --eta " + c("twistings/s1_trivial_theta_x.json")).code, 2);
}

TEST(Cli, TableOutput) {
  CliRun r = run("--table cohomology " + c("models/s1_trivial.json") + " --eta " + c("twistings/s1_trivial_theta_x.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("results.twisted.odd: 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("schema: \"twistcart.report/1\"\n"), std::string::npos);
}

TEST(Cli, EllipticFieldFiles) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("twistcart_fields_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  WarpedChart w;
  ChartGrid g = ChartGrid::cube(2, 1.0 / 32, 0.5);
  AlmostComplexField j = sample_j(g, [&](const std::vector<double>& p) { return w.j(p); });
  auto pulled = [&](const std::string& name) {
    PlaneFunction f = plane_function(name);
    return sample_scalar(g, [&](const std::vector<double>& p) {
      auto q = w.phi(p[0], p[1]);
      return f({q[0], q[1]});
    });
  };
  ScalarField f = pulled("re_exp"), u = pulled("im_exp"), bump = sample_scalar(g, plane_function("bump"));
  auto save = [&](const std::string& name, const auto& field) {
    std::ofstream out(dir / name);
    write_field(out, field);
    return (dir / name).string();
  };
  std::string jp = save("j.csv", j), fp = save("f.csv", f), gp = save("g.csv", u), bp = save("bump.csv", bump);

  json r = run_json("elliptic rc --jfield " + jp + " --f " + fp + " --g " + gp, 0);
  EXPECT_EQ(r["inputs"].size(), 3u);
  EXPECT_EQ(r["inputs"][0]["sha256"], coreutils_sha(jp));
  EXPECT_EQ(r["results"]["rcResidual"].get<double>(), rc_residual(j, f, u));
  EXPECT_EQ(r["results"]["operatorResidual"].get<double>(), operator_residual(j, f, Ball{{0, 0}, 0.5 * g.hi[0]}));
  // same numbers as the built-in warped sample
  json s = run_json("elliptic rc --warped --sample exp --h 0.03125", 0);
  EXPECT_EQ(s["results"]["rcResidual"], r["results"]["rcResidual"]);
  EXPECT_EQ(run("elliptic maxcheck --jfield " + jp + " --field " + bp).code, 1);
  // without a J file the scalar file fixes the grid
  json m = run_json("elliptic maxcheck --field " + bp, 1);
  EXPECT_EQ(m["results"]["h"], 1.0 / 32);
  std::string coarse = save("coarse.csv", sample_scalar(ChartGrid::cube(2, 1.0 / 16, 0.5), plane_function("re_exp")));
  EXPECT_EQ(run("elliptic rc --jfield " + jp + " --f " + coarse + " --g " + gp).code, 2);
  EXPECT_EQ(run("elliptic rc --jfield " + jp + " --f " + fp).code, 2);
  EXPECT_EQ(run("elliptic coeffs --jfield " + fp).code, 2);
  fs::remove_all(dir);
}
