#include <CLI11.hpp>
#include <Eigen/Core>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "hypolab/classify.hpp"
#include "hypolab/levi.hpp"
#include "hypolab/report.hpp"
#include "hypolab/spectral.hpp"

namespace {

using nlohmann::json;
using namespace hypolab;

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitNoConvergence = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  std::string symbol_text;
  std::string split_text;
  bool dump_kernels = false;
};

void apply_threads(int threads) {
  if (threads <= 0) {
    if (const char* env = std::getenv("HYPOLAB_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) Eigen::setNbThreads(threads);
}

json load_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) return json::object();
  return json::parse(read_text_file(opts.config_path));
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
  return (std::filesystem::path(opts.out_dir) / name).string();
}

/// The provenance file is itself a valid --config: the resolved settings plus
/// tool identity, so reruns reproduce every output byte for byte.
void write_provenance(const CommonOpts& opts, json resolved) {
  resolved["tool"] = "hypolab";
  resolved["version"] = kVersion;
  write_text_file(out_path(opts, "provenance.json"), resolved.dump(2) + "\n");
}

VariableSplit parse_split(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("--split expects n,m");
  return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::YES: return "YES";
    case Verdict::NO: return "NO";
    default: return "INCONCLUSIVE";
  }
}

int run_classify(const CommonOpts& opts) {
  json cfg = load_config(opts);
  std::string text = !opts.symbol_text.empty() ? opts.symbol_text
                                               : cfg.value("symbol", std::string());
  if (text.empty()) {
    std::cerr << "classify: no symbol given (use --symbol or a config with \"symbol\")\n";
    return kExitUsage;
  }
  std::optional<VariableSplit> split;
  if (!opts.split_text.empty())
    split = parse_split(opts.split_text);
  else if (cfg.contains("split"))
    split = VariableSplit{cfg["split"]["n"].get<int>(), cfg["split"]["m"].get<int>()};

  SymbolPoly P = split ? parse_symbol(text, *split) : parse_symbol(text);
  ClassificationReport rep = classify_symbol(P);
  write_text_file(out_path(opts, "classification.json"), rep.to_json() + "\n");
  json resolved = {{"command", "classify"}, {"symbol", text}};
  if (P.split()) resolved["split"] = {{"n", P.split()->n}, {"m", P.split()->m}};
  write_provenance(opts, resolved);

  std::cout << "symbol              " << text << "\n"
            << "hypoelliptic        " << verdict_name(rep.hypoelliptic.verdict) << "\n";
  if (rep.partially_hypoelliptic)
    std::cout << "partially hypoell.  " << verdict_name(rep.partially_hypoelliptic->verdict)
              << "\n";
  std::cout << "reduced             " << (rep.lineality.is_reduced ? "yes" : "no") << "\n";
  if (rep.exponents)
    std::cout << "exponents           rho=" << rep.exponents->rho << " b=" << rep.exponents->b
              << " sigma=" << rep.exponents->sigma << " c=" << rep.exponents->c << "\n";
  if (rep.iteration_index) std::cout << "iteration index     " << *rep.iteration_index << "\n";

  bool inconclusive = rep.hypoelliptic.verdict == Verdict::INCONCLUSIVE ||
                      (rep.partially_hypoelliptic &&
                       rep.partially_hypoelliptic->verdict == Verdict::INCONCLUSIVE);
  return inconclusive ? kExitInconclusive : kExitOk;
}

OperatorDescription load_operator(const json& cfg) {
  if (cfg.contains("operator_file"))
    return OperatorDescription::from_json(read_text_file(cfg["operator_file"]));
  if (cfg.contains("operator")) return OperatorDescription::from_json(cfg["operator"].dump());
  throw std::invalid_argument("config: missing \"operator\" or \"operator_file\"");
}

int run_levi(const CommonOpts& opts) {
  json cfg = load_config(opts);
  OperatorDescription L = load_operator(cfg);
  if (!cfg.contains("grid") || !cfg.contains("lambdas")) {
    std::cerr << "levi: config needs \"grid\" and \"lambdas\"\n";
    return kExitUsage;
  }
  GridSpec spec = GridSpec::from_json(cfg["grid"].dump());
  std::vector<double> lambdas = cfg["lambdas"].get<std::vector<double>>();
  if (lambdas.size() < 4) {
    std::cerr << "levi: lambda sweep too short for fitting (need >= 4 points)\n";
    return kExitUsage;
  }
  std::vector<double> x = cfg.value("x", std::vector<double>(spec.dimension(), 0.0));
  const int fold = cfg.value("fold", 0);
  const double width = cfg.value("mollifier_width", 4.0);
  const double tol = cfg.value("tol", 1e-6);
  const int n_max = cfg.value("n_max", 30);
  const double b = cfg.value("b", 0.5);
  const double kappa = cfg.value("kappa", 0.1);
  std::vector<double> annulus = cfg.value("annulus", std::vector<double>{1.0, 3.0});

  std::vector<std::vector<std::string>> norm_rows, summary_rows;
  bool all_converged = true;
  for (size_t k = 0; k < lambdas.size(); ++k) {
    VariableSolution sol;
    try {
      sol = fundamental_solution_variable(L, lambdas[k], x, spec, fold, width, tol, n_max);
    } catch (const std::runtime_error& e) {
      std::cerr << "levi: lambda=" << lambdas[k] << ": " << e.what() << "\n";
      all_converged = false;
      continue;
    }
    all_converged = all_converged && sol.series.converged;
    for (size_t t = 0; t < sol.series.norm_history.size(); ++t)
      norm_rows.push_back({format_double(lambdas[k]), std::to_string(t),
                           format_double(sol.series.norm_history[t])});
    summary_rows.push_back({format_double(lambdas[k]),
                            sol.series.converged ? "1" : "0",
                            std::to_string(sol.series.terms_kept),
                            format_double(sol.series.fixed_point_residual),
                            format_double(sol.residual_sup), format_double(sol.residual_l2)});
    if (opts.dump_kernels) {
      size_t best = 0;
      double bd = 1e300;
      for (size_t i = 0; i < spec.size(); ++i) {
        auto p = spec.point_at(i);
        double d = 0;
        for (int a = 0; a < spec.dimension(); ++a) d += (p[a] - x[a]) * (p[a] - x[a]);
        if (d < bd) bd = d, best = i;
      }
      sol.g.row(best).save(out_path(opts, "g_row_" + std::to_string(k) + ".bin"));
    }
  }
  write_csv(out_path(opts, "levi_norms.csv"), {"lambda", "term", "norm"}, norm_rows);
  write_csv(out_path(opts, "levi_summary.csv"),
            {"lambda", "converged", "terms", "fixed_point_residual", "residual_sup",
             "residual_l2"},
            summary_rows);

  LambdaSweep sweep;
  sweep.lambdas = lambdas;
  RemainderEstimate est =
      estimate_decay(L, x, sweep, b, spec, kappa, annulus[0], annulus[1], fold, width);
  std::vector<std::vector<std::string>> decay_rows;
  for (size_t k = 0; k < est.lambdas.size(); ++k)
    decay_rows.push_back({format_double(est.lambdas[k]), format_double(est.weighted_norms[k]),
                          format_double(est.offdiag_sup[k]), format_double(est.diag_ratio[k])});
  write_csv(out_path(opts, "levi_decay.csv"),
            {"lambda", "weighted_alpha_norm", "offdiag_sup", "diag_ratio"}, decay_rows);
  json fit = {{"alpha_exact_zero", est.alpha_exact_zero},
              {"b_hat", est.b_hat},
              {"c_hat", est.c_hat},
              {"c_residual", est.c_residual},
              {"kappa_hat", est.kappa_hat},
              {"pass", est.pass}};
  write_text_file(out_path(opts, "levi_decay_fit.json"), fit.dump(2) + "\n");

  json resolved = {{"command", "levi"},       {"operator", json::parse(cfg.contains("operator")
                                                                           ? cfg["operator"].dump()
                                                                           : read_text_file(
                                                                                 cfg["operator_file"]))},
                   {"grid", json::parse(spec.to_json())},
                   {"lambdas", lambdas},
                   {"x", x},
                   {"fold", fold},
                   {"mollifier_width", width},
                   {"tol", tol},
                   {"n_max", n_max},
                   {"b", b},
                   {"kappa", kappa},
                   {"annulus", annulus}};
  write_provenance(opts, resolved);

  std::cout << "levi: " << lambdas.size() << " lambda points, decay "
            << (est.pass ? "PASS" : "FAIL") << " (c_hat=" << est.c_hat << ")\n";
  if (!all_converged) {
    std::cerr << "levi: Neumann series failed to converge for at least one lambda\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

int run_spectral(const CommonOpts& opts) {
  json cfg = load_config(opts);
  if (!cfg.contains("lambdas") || cfg["lambdas"].empty()) {
    std::cerr << "spectral: config needs a non-empty \"lambdas\" list\n";
    return kExitUsage;
  }
  std::vector<double> lambdas = cfg["lambdas"].get<std::vector<double>>();
  std::string text = !opts.symbol_text.empty() ? opts.symbol_text
                                               : cfg.value("symbol", std::string());
  if (text.empty() && !cfg.contains("operator") && !cfg.contains("operator_file")) {
    std::cerr << "spectral: need \"symbol\" or an operator description\n";
    return kExitUsage;
  }

  json fits = json::object();
  if (!text.empty()) {
    std::optional<VariableSplit> split;
    if (!opts.split_text.empty()) split = parse_split(opts.split_text);
    SymbolPoly M = split ? parse_symbol(text, *split) : parse_symbol(text);
    std::vector<MultiIndex> alphas;
    if (cfg.contains("alphas"))
      for (const auto& a : cfg["alphas"]) alphas.emplace_back(a.get<std::vector<int>>());
    else
      alphas.push_back(MultiIndex::zero(M.dimension()));
    auto diags = sublevel_moments(M, lambdas, alphas);
    for (size_t a = 0; a < diags.size(); ++a) {
      std::vector<std::vector<std::string>> rows;
      for (size_t k = 0; k < lambdas.size(); ++k)
        rows.push_back({format_double(lambdas[k]), format_double(diags[a].values[k])});
      write_csv(out_path(opts, "diagonal_" + std::to_string(a) + ".csv"), {"lambda", "value"},
                rows);
      try {
        AsymptoticFit f = fit_asymptotics(diags[a]);
        fits["alpha_" + std::to_string(a)] = {{"C", f.C},
                                              {"a", f.a},
                                              {"t", f.t},
                                              {"residual", f.residual}};
      } catch (const std::invalid_argument&) {
        // too few points for a fit; diagonals are still written
      }
      if (cfg.contains("stieltjes_lambda")) {
        double sl = cfg["stieltjes_lambda"].get<double>();
        fits["stieltjes_alpha_" + std::to_string(a)] = stieltjes_green(diags[a], sl);
      }
    }
  }

  if (cfg.contains("operator") || cfg.contains("operator_file")) {
    OperatorDescription L = load_operator(cfg);
    GridSpec spec = GridSpec::from_json(cfg.at("grid").dump());
    std::vector<double> x = cfg.value("x", std::vector<double>(spec.dimension(), 0.0));
    SpectralDiagonal var = variable_diagonal(L, lambdas, spec, x);
    auto frozen_op = OperatorDescription::constant(L.symbol_at(x));
    SpectralDiagonal froz = variable_diagonal(frozen_op, lambdas, spec, x);
    std::vector<std::vector<std::string>> rows;
    for (size_t k = 0; k < lambdas.size(); ++k)
      rows.push_back({format_double(lambdas[k]), format_double(froz.values[k]),
                      format_double(var.values[k])});
    write_csv(out_path(opts, "diagonal_variable.csv"), {"lambda", "frozen", "variable"}, rows);
    TauberianReport tb = tauberian_compare(froz, var);
    fits["tauberian"] = {{"correction_scale", tb.correction_scale},
                         {"pass", tb.pass},
                         {"residual", tb.residual}};
  }
  write_text_file(out_path(opts, "spectral_fits.json"), fits.dump(2) + "\n");

  json resolved = cfg;
  resolved["command"] = "spectral";
  if (!text.empty()) resolved["symbol"] = text;
  write_provenance(opts, resolved);
  std::cout << "spectral: wrote " << fits.size() << " fit entries\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypolab: hypoellipticity classification, fundamental solutions, and "
               "spectral diagnostics for polynomial PDE symbols"};
  app.require_subcommand(1);
  CommonOpts opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config (or provenance) file");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--threads", opts.threads, "worker threads (or HYPOLAB_THREADS)");
    sub->add_option("--symbol", opts.symbol_text, "symbol text, e.g. \"xi1^2 + i*eta1\"");
    sub->add_option("--split", opts.split_text, "variable split n,m");
    sub->add_flag("--dump-kernels", opts.dump_kernels, "write per-lambda kernel rows");
  };
  CLI::App* classify = app.add_subcommand("classify", "classify a polynomial symbol");
  CLI::App* levi = app.add_subcommand("levi", "run the Levi parametrix pipeline");
  CLI::App* spectral = app.add_subcommand("spectral", "spectral diagonals, fits, Tauberian");
  add_common(classify);
  add_common(levi);
  add_common(spectral);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    apply_threads(opts.threads);
    std::filesystem::create_directories(opts.out_dir);
    if (classify->parsed()) return run_classify(opts);
    if (levi->parsed()) return run_levi(opts);
    if (spectral->parsed()) return run_spectral(opts);
  } catch (const hypolab::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  }
  return kExitUsage;
}
