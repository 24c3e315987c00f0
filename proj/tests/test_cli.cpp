#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hypolab/report.hpp"

namespace {

std::string g_binary;
std::filesystem::path g_work;

int run(const std::string& args) {
  std::string cmd = g_binary + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) { return hypolab::read_text_file(p.string()); }

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

const char* kLeviConfig = R"json({
  "operator": {
    "split": {"n": 1, "m": 0},
    "type_symbol": "xi1^2 + 1",
    "compact_set": {"box": [[-3, 3]]},
    "terms": [
      {"coeff_const": 1.0, "symbol": "xi1^2"},
      {"coeff_expr": "1 + bump(x/3)", "symbol": "1"}
    ]
  },
  "grid": {"split": {"n": 1, "m": 0}, "points": 64, "half_width": [8.0]},
  "lambdas": [-16, -32, -64, -128],
  "x": [0.0]
})json";

}  // namespace

TEST_CASE("classify: verdicts, outputs, and exit codes") {
  auto out = g_work / "classify";
  CHECK(run("classify --symbol \"xi1^2 + xi2^2\" --out " + out.string()) == 0);
  std::string rep = slurp(out / "classification.json");
  CHECK(rep.find("\"verdict\": \"YES\"") != std::string::npos);
  CHECK(std::filesystem::exists(out / "provenance.json"));

  CHECK(run("classify --symbol \"xi1^2 - xi2^2\" --out " + out.string()) == 0);
  rep = slurp(out / "classification.json");
  CHECK(rep.find("\"verdict\": \"NO\"") != std::string::npos);
  CHECK(rep.find("zero-ray") != std::string::npos);

  CHECK(run("classify --symbol \"xi1^2 + xi1*eta1\" --split 1,1 --out " + out.string()) == 0);
  rep = slurp(out / "classification.json");
  CHECK(rep.find("partially_hypoelliptic") != std::string::npos);

  // malformed symbol -> usage error
  CHECK(run("classify --symbol \"xi1^2 +\" --out " + out.string()) == 1);
  // missing symbol -> usage error
  CHECK(run("classify --out " + out.string()) == 1);
  // grey-zone symbol -> inconclusive exit code
  CHECK(run("classify --symbol \"(xi1-xi2)^2 + 0.0001\" --out " + out.string()) == 2);
}

TEST_CASE("levi: pipeline outputs and deterministic provenance reruns") {
  auto dir = g_work / "levi";
  std::filesystem::create_directories(dir);
  write(dir / "config.json", kLeviConfig);
  auto out1 = dir / "run1";
  CHECK(run("levi --config " + (dir / "config.json").string() + " --out " + out1.string()) == 0);
  for (const char* f : {"levi_norms.csv", "levi_summary.csv", "levi_decay.csv",
                        "levi_decay_fit.json", "provenance.json"})
    CHECK(std::filesystem::exists(out1 / f));
  std::string fit = slurp(out1 / "levi_decay_fit.json");
  CHECK(fit.find("\"pass\": true") != std::string::npos);
  // header + 17-digit floats in the CSV
  std::string csv = slurp(out1 / "levi_decay.csv");
  CHECK(csv.rfind("lambda,weighted_alpha_norm", 0) == 0);

  // rerun from the provenance file: byte-identical outputs
  auto out2 = dir / "run2";
  CHECK(run("levi --config " + (out1 / "provenance.json").string() + " --out " +
            out2.string()) == 0);
  for (const char* f : {"levi_norms.csv", "levi_summary.csv", "levi_decay.csv",
                        "levi_decay_fit.json"})
    CHECK(slurp(out1 / f) == slurp(out2 / f));

  // kernel dumps on request
  auto out3 = dir / "run3";
  CHECK(run("levi --config " + (dir / "config.json").string() + " --out " + out3.string() +
            " --dump-kernels") == 0);
  CHECK(std::filesystem::exists(out3 / "g_row_0.bin"));
}

TEST_CASE("levi: short sweeps and divergence map to distinct exit codes") {
  auto dir = g_work / "levi_err";
  std::filesystem::create_directories(dir);
  std::string short_cfg = kLeviConfig;
  short_cfg.replace(short_cfg.find("[-16, -32, -64, -128]"),
                    std::string("[-16, -32, -64, -128]").size(), "[-16, -32]");
  write(dir / "short.json", short_cfg);
  CHECK(run("levi --config " + (dir / "short.json").string() + " --out " +
            (dir / "s").string()) == 1);

  // deep potential well puts the sweep inside the spectrum: Neumann diverges
  std::string div_cfg = kLeviConfig;
  div_cfg.replace(div_cfg.find("1 + bump(x/3)"), std::string("1 + bump(x/3)").size(),
                  "1 - 20*bump(x/3)");
  div_cfg.replace(div_cfg.find("[-16, -32, -64, -128]"),
                  std::string("[-16, -32, -64, -128]").size(), "[-4, -5, -6, -7]");
  write(dir / "div.json", div_cfg);
  CHECK(run("levi --config " + (dir / "div.json").string() + " --out " +
            (dir / "d").string()) == 3);
}

TEST_CASE("spectral: fits, stieltjes, tauberian, and validation") {
  auto dir = g_work / "spectral";
  std::filesystem::create_directories(dir);
  write(dir / "disk.json", R"json({
    "symbol": "xi1^2 + xi2^2",
    "lambdas": [10, 21.5, 46.4, 100, 215, 464, 1000, 2150, 4640, 10000]
  })json");
  auto out = dir / "disk";
  CHECK(run("spectral --config " + (dir / "disk.json").string() + " --out " + out.string()) == 0);
  std::string fits = slurp(out / "spectral_fits.json");
  auto apos = fits.find("\"a\": ");
  REQUIRE(apos != std::string::npos);
  double a = std::stod(fits.substr(apos + 5));
  CHECK(std::abs(a - 1.0) < 0.02);
  CHECK(std::filesystem::exists(out / "diagonal_0.csv"));

  // empty lambda list -> usage error
  write(dir / "empty.json", R"json({"symbol": "xi1^2", "lambdas": []})json");
  CHECK(run("spectral --config " + (dir / "empty.json").string() + " --out " +
            (dir / "e").string()) == 1);

  // variable-operator pipeline emits a tauberian verdict
  std::string var_cfg = kLeviConfig;
  var_cfg.replace(var_cfg.find("[-16, -32, -64, -128]"),
                  std::string("[-16, -32, -64, -128]").size(),
                  "[10, 17, 30, 52, 91, 158, 275, 478, 832, 1000]");
  write(dir / "var.json", var_cfg);
  auto vout = dir / "var";
  CHECK(run("spectral --config " + (dir / "var.json").string() + " --out " + vout.string()) == 0);
  std::string vf = slurp(vout / "spectral_fits.json");
  CHECK(vf.find("tauberian") != std::string::npos);
  CHECK(vf.find("\"pass\": true") != std::string::npos);

  // provenance rerun reproduces spectral outputs byte for byte
  auto vout2 = dir / "var2";
  CHECK(run("spectral --config " + (vout / "provenance.json").string() + " --out " +
            vout2.string()) == 0);
  CHECK(slurp(vout / "spectral_fits.json") == slurp(vout2 / "spectral_fits.json"));
  CHECK(slurp(vout / "diagonal_variable.csv") == slurp(vout2 / "diagonal_variable.csv"));
}

TEST_CASE("usage errors: unknown commands and flags") {
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("classify --no-such-flag") == 1);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-hypolab-binary> [doctest args]\n");
    return 1;
  }
  g_binary = argv[1];
  g_work = std::filesystem::temp_directory_path() / "hypolab_cli_test";
  std::filesystem::remove_all(g_work);
  std::filesystem::create_directories(g_work);
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}
