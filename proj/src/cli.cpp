#include "cantor_dpp/cli.hpp"

#include "cantor_dpp/cantor.hpp"
#include "cantor_dpp/errors.hpp"
#include "cantor_dpp/fourier.hpp"
#include "cantor_dpp/kernel.hpp"
#include "cantor_dpp/rigidity.hpp"
#include "cantor_dpp/sampler.hpp"
#include "cantor_dpp/spec_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace cantor_dpp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, std::string_view content) {
    write_file(dir / name, content);
    files.push_back(name);
  }
};

void write_manifest(Outputs& out, const std::string& subcommand, const json& input, const json& params,
                    const json& results) {
  json m;
  m["subcommand"] = subcommand;
  m["input_digest"] = fnv1a_hex(input.dump());
  m["parameters"] = params;
  m["tool_version"] = std::string(kToolVersion);
  m["outputs"] = out.files;
  m["results"] = results;
  write_file(out.dir / "manifest.json", m.dump(2) + "\n");
}

std::shared_ptr<const CantorSet> load_set(const std::string& path) {
  return std::make_shared<const CantorSet>(CantorSet::build(read_spec(path)));
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("log grid requires 0 < min < max and >= 2 points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
  g.back() = hi;
  return g;
}

json decay_json(const DecayReport& d) {
  return {{"delta", d.delta},
          {"A", d.A},
          {"A_verified", d.A_verified},
          {"kappa", d.kappa},
          {"kappa_series", d.kappa_series},
          {"kappa_finite", d.kappa_finite},
          {"multiplier", d.multiplier},
          {"lambda_I", d.lambda_I},
          {"lambda_C", d.lambda_C},
          {"ratio_sup_I", d.ratio_sup_I},
          {"argmax_I", d.argmax_I},
          {"ratio_sup_C", d.ratio_sup_C},
          {"argmax_C", d.argmax_C},
          {"series_violations", d.series_violations},
          {"lambda_violations_I", d.lambda_violations_I},
          {"lambda_violations_C", d.lambda_violations_C},
          {"summable", d.summable},
          {"summability_warning", d.summability_warning},
          {"holds", d.holds()}};
}

std::string decay_csv(const DecayReport& d) {
  std::ostringstream csv;
  csv << "xi,lhs,rhs,ratio,ratio_C,slack\n";
  for (std::size_t i = 0; i < d.xi_grid.size(); ++i) {
    csv << format_double(d.xi_grid[i]) << ',' << format_double(d.series_lhs[i]) << ','
        << format_double(d.series_rhs[i]) << ',' << format_double(d.ratio_I[i]) << ','
        << format_double(d.ratio_C[i]) << ',' << format_double(d.series_slack[i]) << '\n';
  }
  return csv.str();
}

json j_json(const JReport& j) {
  return {{"r", j.r},
          {"R", j.R},
          {"delta", j.delta},
          {"J", j.J},
          {"error", j.error},
          {"bounds", j.bounds},
          {"c_r", j.c_r},
          {"weighted_energy", j.weighted_energy()},
          {"within_bounds", j.within_bounds()}};
}

struct ScanRow {
  double R;
  VarianceResult V;
  JReport j;
  double V_bound;
};

std::vector<ScanRow> variance_scan(const Kernel& kernel, double r, const std::vector<double>& Rs, double delta,
                                   double tol, double lambda) {
  std::vector<ScanRow> rows;
  for (double R : Rs) {
    const TestFunction tf(r, R);
    ScanRow row{R, variance_linear_statistic(kernel, tf, tol), j_integrals(tf, delta, 1e-9), 0.0};
    row.V_bound = 0.5 * lambda * row.j.weighted_energy();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream csv;
  csv << "R,V,error,V_bound,energy,J1,J2,J3,J4\n";
  for (const auto& row : rows) {
    csv << format_double(row.R) << ',' << format_double(row.V.value) << ',' << format_double(row.V.error) << ','
        << format_double(row.V_bound) << ',' << format_double(row.j.weighted_energy());
    for (double v : row.j.J) csv << ',' << format_double(v);
    csv << '\n';
  }
  return csv.str();
}

json scan_json(const std::vector<ScanRow>& rows, double lambda) {
  json arr = json::array();
  for (const auto& row : rows) {
    json e = j_json(row.j);
    e["V"] = row.V.value;
    e["error"] = row.V.error;
    e["V_bound"] = row.V_bound;
    e["J_error"] = row.j.error;
    arr.push_back(e);
  }
  return {{"lambda", lambda}, {"scan", arr}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Cantor sets, their Fourier transforms and the induced determinantal point processes",
               "cantor-dpp"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = ".";
  bool svg = false;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_flag("--svg", svg, "Also write SVG line plots");

  // construct
  auto* construct = app.add_subcommand("construct", "Build a set and write spec.json and intervals.csv");
  std::optional<double> theta, delta_c;
  std::string u_seq = "geometric";
  std::vector<double> ratios, lengths;
  std::optional<int> max_level;
  std::optional<double> log2_floor;
  std::string set_in;
  construct->add_option("--theta", theta, "Target measure m(C) (theorem2 mode)");
  construct->add_option("--delta", delta_c, "Exponent delta (theorem2 mode)");
  construct->add_option("--u", u_seq, "u-sequence: geometric|quadratic")->capture_default_str();
  construct->add_option("--ratios", ratios, "Comma-separated ratios alpha_n")->delimiter(',');
  construct->add_option("--lengths", lengths, "Comma-separated lengths l_n")->delimiter(',');
  construct->add_option("--max-level", max_level, "Truncation level N");
  construct->add_option("--log2-floor", log2_floor, "Materialization floor for log2(l_n)");
  construct->add_option("--set", set_in, "Existing spec.json to rebuild");

  // shared set options
  std::string set_path;
  std::string which_name = "I";
  auto add_set = [&](CLI::App* sub, bool with_which) {
    sub->add_option("--set", set_path, "Set spec JSON")->required()->check(CLI::ExistingFile);
    if (with_which) sub->add_option("--which", which_name, "Kernel component C|I")->capture_default_str();
  };

  auto* fourier = app.add_subcommand("fourier", "Evaluate the transform on a frequency grid");
  add_set(fourier, true);
  std::vector<double> xis;
  double xi_min = 1e-2, xi_max = 1e3;
  int points = 200;
  fourier->add_option("--xi", xis, "Explicit frequencies")->delimiter(',');
  fourier->add_option("--xi-min", xi_min)->capture_default_str();
  fourier->add_option("--xi-max", xi_max)->capture_default_str();
  fourier->add_option("--points", points)->capture_default_str();

  auto* gram_cmd = app.add_subcommand("gram", "Nystrom Gram matrix spectrum on [-W, W]");
  add_set(gram_cmd, true);
  double window = 10.0;
  int nodes = 400;
  std::string rule_name = "trapezoid";
  gram_cmd->add_option("--window", window, "Half-width W")->capture_default_str();
  gram_cmd->add_option("--nodes", nodes)->capture_default_str();
  gram_cmd->add_option("--rule", rule_name, "trapezoid|gauss")->capture_default_str();

  auto* decay = app.add_subcommand("decay-check", "Sine-series and decay-ratio checks on a log grid");
  add_set(decay, false);
  double delta = 0.5;
  double decay_xi_max = 1e4;
  int decay_points = 1000;
  std::optional<double> A;
  decay->add_option("--delta", delta)->capture_default_str();
  decay->add_option("--xi-max", decay_xi_max)->capture_default_str();
  decay->add_option("--xi-min", xi_min)->capture_default_str();
  decay->add_option("--points", decay_points)->capture_default_str();
  decay->add_option("--A", A, "Split constant (searched when omitted)");

  double r = 1.0;
  std::vector<double> Rs{10.0, 100.0, 1000.0, 10000.0};
  double tol = 1e-6;
  auto* scan = app.add_subcommand("variance-scan", "Var(S_phi) and the J-integrals along a list of R");
  add_set(scan, true);
  scan->add_option("--delta", delta)->capture_default_str();
  scan->add_option("--r", r)->capture_default_str();
  scan->add_option("--R", Rs, "Comma-separated outer radii")->delimiter(',');
  scan->add_option("--tol", tol)->capture_default_str();

  auto* jb = app.add_subcommand("jbounds", "J-integrals against their closed-form bounds");
  jb->add_option("--delta", delta)->capture_default_str();
  jb->add_option("--r", r)->capture_default_str();
  jb->add_option("--R", Rs, "Comma-separated outer radii")->delimiter(',');
  double jtol = 1e-9;
  jb->add_option("--tol", jtol)->capture_default_str();

  auto* samp = app.add_subcommand("sample", "Sample the point process on [-W, W]");
  add_set(samp, true);
  int reps = 100;
  std::uint64_t seed = 1;
  double phi_R = 5.0;
  samp->add_option("--window", window)->capture_default_str();
  samp->add_option("--nodes", nodes)->capture_default_str();
  samp->add_option("--reps", reps)->capture_default_str();
  samp->add_option("--seed", seed)->capture_default_str();
  samp->add_option("--r", r, "Test function inner radius")->capture_default_str();
  samp->add_option("--R", phi_R, "Test function outer radius")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "decay-check, jbounds and variance-scan; exit 0 iff all hold");
  add_set(verify, true);
  verify->add_option("--delta", delta)->capture_default_str();
  verify->add_option("--r", r)->capture_default_str();
  verify->add_option("--R", Rs, "Comma-separated outer radii")->delimiter(',');
  verify->add_option("--xi-max", decay_xi_max)->capture_default_str();
  verify->add_option("--points", decay_points)->capture_default_str();

  std::vector<std::string> argv_store{"cantor-dpp"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  if (args.empty()) {
    err << app.help();
    return kUsage;
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  Outputs outputs{out_dir, {}};
  try {
    if (construct->parsed()) {
      CantorSpec spec;
      const int modes = (theta ? 1 : 0) + (!ratios.empty() ? 1 : 0) + (!lengths.empty() ? 1 : 0) +
                        (!set_in.empty() ? 1 : 0);
      if (modes != 1) throw DomainError("construct needs exactly one of --theta, --ratios, --lengths, --set");
      if (!set_in.empty()) {
        spec = read_spec(set_in);
      } else if (theta) {
        spec = CantorSpec::theorem2(*theta, delta_c.value_or(0.5), u_seq, max_level);
      } else if (!ratios.empty()) {
        spec = CantorSpec::from_ratios(ratios, max_level);
      } else {
        spec = CantorSpec::from_lengths(lengths, max_level);
      }
      if (max_level) spec.max_level = max_level;
      if (log2_floor) spec.log2_floor = *log2_floor;
      spec.validate();
      const CantorSet set = CantorSet::build(spec);
      const json spec_j = spec_to_json(spec);
      outputs.write("spec.json", spec_j.dump(2) + "\n");
      std::ostringstream csv;
      write_intervals_csv(set, csv);
      outputs.write("intervals.csv", csv.str());
      json levels = json::array();
      for (int n = 1; n <= set.levels(); ++n) levels.push_back({{"n", n}, {"log2_length", set.log2_length(n)}});
      json results{{"measure_C", set.measure_C()},
                   {"measure_I", set.measure_I()},
                   {"tail_measure", set.tail_measure()},
                   {"levels", set.levels()},
                   {"enumerated_levels", set.enumerated_levels()},
                   {"endpoint_error_bound", set.endpoint_error_bound()},
                   {"log2_lengths", levels}};
      if (const auto& c = set.theta_construction()) results["Theta"] = c->Theta;
      outputs.write("summary.json", results.dump(2) + "\n");
      write_manifest(outputs, "construct", spec_j, {{"max_level", spec.max_level ? json(*spec.max_level) : json()}},
                     results);
      out << "m(C) = " << format_double(set.measure_C()) << ", N = " << set.levels() << "\n";
      return kOk;
    }

    if (fourier->parsed()) {
      const auto set = load_set(set_path);
      const Component which = component_from_string(which_name);
      const std::vector<double> grid = xis.empty() ? log_grid(xi_min, xi_max, points) : xis;
      std::ostringstream csv;
      csv << "xi,re,im,modulus,tail_radius\n";
      std::vector<double> modulus;
      for (double xi : grid) {
        const FourierValue v = which == Component::C ? transform_C(*set, xi, LevelSum::factorized)
                                                     : transform_I(*set, xi, LevelSum::factorized);
        modulus.push_back(std::abs(v.value));
        csv << format_double(xi) << ',' << format_double(v.value.real()) << ',' << format_double(v.value.imag())
            << ',' << format_double(std::abs(v.value)) << ',' << format_double(v.tail_radius) << '\n';
      }
      outputs.write("fourier.csv", csv.str());
      if (svg) {
        outputs.write("fourier.svg", svg_line_plot("|transform of the indicator of " + which_name + "|", "xi", grid,
                                                   {{"modulus", modulus}}, xis.empty(), true));
      }
      const json params{{"which", which_name}, {"points", grid.size()}};
      write_manifest(outputs, "fourier", {spec_to_json(set->spec()), params}, params, {{"evaluations", grid.size()}});
      return kOk;
    }

    if (gram_cmd->parsed()) {
      const auto set = load_set(set_path);
      const Kernel kernel(set, component_from_string(which_name));
      const GramMatrix g = gram(kernel, window, nodes, quadrature_rule_from_string(rule_name));
      const ProjectionDefect d = projection_defect(g);
      std::ostringstream csv;
      csv << "index,eigenvalue\n";
      for (Eigen::Index i = 0; i < g.eigenvalues.size(); ++i) csv << i << ',' << format_double(g.eigenvalues(i)) << '\n';
      outputs.write("eigenvalues.csv", csv.str());
      const json summary{{"eps_proj", d.eps_proj},
                         {"relative_defect", d.relative_defect},
                         {"trace", d.trace},
                         {"expected_trace", 2.0 * window * kernel.diagonal()},
                         {"lambda_min", g.eigenvalues.minCoeff()},
                         {"lambda_max", g.eigenvalues.maxCoeff()}};
      outputs.write("gram_summary.json", summary.dump(2) + "\n");
      const json params{{"which", which_name}, {"window", window}, {"nodes", nodes}, {"rule", rule_name}};
      write_manifest(outputs, "gram", {spec_to_json(set->spec()), params}, params, summary);
      return kOk;
    }

    if (decay->parsed()) {
      const auto set = load_set(set_path);
      DecayOptions opt;
      opt.xi_min = xi_min;
      opt.points = decay_points;
      opt.A = A;
      const DecayReport d = decay_check(*set, delta, decay_xi_max, opt);
      if (!d.summability_warning.empty()) err << "warning: " << d.summability_warning << "\n";
      outputs.write("decay.csv", decay_csv(d));
      const json report = decay_json(d);
      outputs.write("decay.json", report.dump(2) + "\n");
      if (svg) {
        outputs.write("decay.svg", svg_line_plot("sine series bound", "xi", d.xi_grid,
                                                 {{"lhs", d.series_lhs}, {"rhs", d.series_rhs}}, true, true));
      }
      const json params{{"delta", delta}, {"xi_min", xi_min}, {"xi_max", decay_xi_max}, {"points", decay_points}};
      write_manifest(outputs, "decay-check", {spec_to_json(set->spec()), params}, params, report);
      return kOk;
    }

    if (scan->parsed() || verify->parsed()) {
      const auto set = load_set(set_path);
      const Component which = component_from_string(which_name);
      const Kernel kernel(set, which);
      DecayOptions opt;
      opt.points = decay_points;
      const DecayReport d = decay_check(*set, delta, decay_xi_max, opt);
      if (!d.summability_warning.empty()) err << "warning: " << d.summability_warning << "\n";
      const double lambda = which == Component::C ? d.lambda_C : d.lambda_I;
      const auto rows = variance_scan(kernel, r, Rs, delta, tol, lambda);
      outputs.write("variance.csv", scan_csv(rows));
      json report = scan_json(rows, lambda);
      const std::string name = scan->parsed() ? "variance-scan" : "verify";
      if (svg) {
        std::vector<double> v, b;
        for (const auto& row : rows) {
          v.push_back(row.V.value);
          b.push_back(row.V_bound);
        }
        outputs.write("variance.svg", svg_line_plot("variance along R", "R", Rs, {{"V", v}, {"V_bound", b}}, true, true));
      }
      const json params{{"which", which_name}, {"delta", delta}, {"r", r}, {"R", Rs}, {"tol", tol}};
      if (scan->parsed()) {
        outputs.write("variance.json", report.dump(2) + "\n");
        write_manifest(outputs, name, {spec_to_json(set->spec()), params}, params, report);
        return kOk;
      }
      bool ok = d.holds() && d.summable;
      json checks = json::array();
      checks.push_back({{"check", "decay"}, {"holds", d.holds()}});
      checks.push_back({{"check", "summability"}, {"holds", d.summable}});
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const bool bound_ok = rows[i].V.value - rows[i].V.error <= rows[i].V_bound;
        const bool j_ok = rows[i].j.within_bounds();
        const bool mono = i == 0 || rows[i].V.value < rows[i - 1].V.value + rows[i].V.error + rows[i - 1].V.error;
        checks.push_back({{"check", "R=" + format_double(rows[i].R)},
                          {"V_le_V_bound", bound_ok},
                          {"J_within_bounds", j_ok},
                          {"V_nonincreasing", mono}});
        ok = ok && bound_ok && j_ok && mono;
      }
      report["decay"] = decay_json(d);
      report["checks"] = checks;
      report["all_hold"] = ok;
      outputs.write("verify.json", report.dump(2) + "\n");
      outputs.write("decay.csv", decay_csv(d));
      write_manifest(outputs, name, {spec_to_json(set->spec()), params}, params, {{"all_hold", ok}});
      out << (ok ? "all inequalities hold\n" : "some inequality fails; see verify.json\n");
      return ok ? kOk : kCheckFailed;
    }

    if (jb->parsed()) {
      std::ostringstream csv;
      csv << "R,J1,J2,J3,J4,bound1,bound2,bound3,bound4,c_r,energy\n";
      json arr = json::array();
      for (double R : Rs) {
        const JReport j = j_integrals(TestFunction(r, R), delta, jtol);
        csv << format_double(R);
        for (double v : j.J) csv << ',' << format_double(v);
        for (double v : j.bounds) csv << ',' << format_double(v);
        csv << ',' << format_double(j.c_r) << ',' << format_double(j.weighted_energy()) << '\n';
        arr.push_back(j_json(j));
      }
      outputs.write("jbounds.csv", csv.str());
      outputs.write("jbounds.json", arr.dump(2) + "\n");
      const json params{{"delta", delta}, {"r", r}, {"R", Rs}, {"tol", jtol}};
      write_manifest(outputs, "jbounds", params, params, arr);
      return kOk;
    }

    if (samp->parsed()) {
      const auto set = load_set(set_path);
      SampleConfig cfg;
      cfg.which = component_from_string(which_name);
      cfg.window = window;
      cfg.nodes = nodes;
      cfg.replicates = reps;
      cfg.seed = seed;
      const Kernel kernel(set, cfg.which);
      const SampleRun run = sample(cfg, kernel);
      const TestFunction tf(r, phi_R);
      const auto S = estimate_linear_statistic(run.samples, tf);
      const auto counts = estimate_count(run.samples, -window, window);
      std::ostringstream csv, pts;
      csv << "replicate,count,selected,S_phi\n";
      pts << "replicate,x\n";
      for (std::size_t i = 0; i < run.samples.size(); ++i) {
        const auto& s = run.samples[i];
        csv << s.replicate << ',' << s.points.size() << ',' << s.selected << ',' << format_double(S.values[i]) << '\n';
        for (double x : s.points) pts << s.replicate << ',' << format_double(x) << '\n';
      }
      outputs.write("samples.csv", csv.str());
      outputs.write("points.csv", pts.str());
      if (run.clamp_warning) err << "warning: eigenvalue excursions beyond 1e-3 were clamped\n";
      const VarianceResult V = variance_linear_statistic(kernel, tf, 1e-6);
      const json moments{{"count", {{"mean", counts.mean}, {"variance", counts.variance}, {"stderr", counts.mean_stderr}}},
                         {"S_phi",
                          {{"mean", S.mean},
                           {"variance", S.variance},
                           {"mean_stderr", S.mean_stderr},
                           {"variance_stderr", S.variance_stderr}}},
                         {"expected_count", 2.0 * window * kernel.diagonal()},
                         {"expected_S_phi", kernel.diagonal() * tf.integral()},
                         {"analytic_V", V.value},
                         {"analytic_V_error", V.error},
                         {"eps_proj", run.eps_proj},
                         {"clamp_events", run.clamp_events},
                         {"clamp_warning", run.clamp_warning}};
      outputs.write("moments.json", moments.dump(2) + "\n");
      const json params{{"which", which_name}, {"window", window}, {"nodes", nodes}, {"reps", reps},
                        {"seed", seed},        {"r", r},           {"R", phi_R}};
      write_manifest(outputs, "sample", {spec_to_json(set->spec()), params}, params, moments);
      return kOk;
    }
  } catch (const AccuracyError& e) {
    err << "accuracy error: " << e.what() << " (best estimate " << format_double(e.best_estimate()) << ", error "
        << format_double(e.error_estimate()) << ")\n";
    return kAccuracy;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kAccuracy;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  err << app.help();
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cantor_dpp::cli
