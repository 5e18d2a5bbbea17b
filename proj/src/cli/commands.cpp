#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "hpcalc/cli.hpp"
#include "hpcalc/special_functions.hpp"

namespace hpcalc::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back({v(i).real(), v(i).imag()});
  return out;
}

std::string csv_num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : "";
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number()) return csv_num(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_row(const std::vector<json>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(cells[i]);
  }
  return out + "\n";
}

// 1 outranks 3 outranks 2 outranks 0.
int merge_code(int a, int b) {
  auto rank = [](int c) { return c == 1 ? 3 : c == 3 ? 2 : c == 2 ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

std::string status_for(int code) {
  switch (code) {
    case 0: return "ok";
    case 2: return "not_in_domain";
    case 3: return "validation_failed";
    default: return "error";
  }
}

std::string diagnosis_of(const Error& e) {
  return std::string(e.diagnosis() ? to_string(*e.diagnosis()) : to_string(e.kind()));
}

struct Context {
  const JobSpec& job;
  Generator A;
  QuadratureSpec spec;
  double tol_scale;
  std::uint64_t seed;
};

Evaluation evaluate(const FunctionSpec& f, const Generator& A, const Vec& x,
                    const QuadratureSpec& spec) {
  if (auto a = f.as_measure()) return hp_apply(*a, A, x, spec);
  return bp_apply(*f.as_bernstein(), A, x, spec);
}

json compute_results(const Context& ctx, int& code, json& timings) {
  json results = json::array();
  json per_vector = json::array();
  const auto symbol = ctx.job.function.symbol();
  for (std::size_t i = 0; i < ctx.job.vectors.size(); ++i) {
    const Vec& x = ctx.job.vectors[i];
    const auto t0 = Clock::now();
    json r;
    r["index"] = i;
    std::optional<Vec> value;
    try {
      Evaluation ev = evaluate(ctx.job.function, ctx.A, x, ctx.spec);
      value = ev.value;
      r["value"] = vec_json(ev.value);
      r["error"] = num(ev.report.error_estimate);
      r["converged"] = ev.report.converged;
      r["diagnosis"] = to_string(ev.report.diagnosis);
      r["truncation_T"] = num(ev.report.truncation_T);
      r["panels"] = ev.report.panels;
      if (!ev.report.converged) code = merge_code(code, 1);
    } catch (const Error& e) {
      r["value"] = nullptr;
      r["error"] = nullptr;
      r["converged"] = false;
      r["diagnosis"] = diagnosis_of(e);
      r["truncation_T"] = nullptr;
      r["panels"] = 0;
      r["message"] = e.what();
      code = merge_code(code, exit_code_for(e.kind()));
    }
    per_vector.push_back(seconds_since(t0));

    r["oracle"] = nullptr;
    r["oracle_gap"] = nullptr;
    if (!symbol) {
      r["oracle_diagnosis"] = "no closed-form symbol";
    } else {
      try {
        const Vec o = spectral_apply(*symbol, ctx.A, x);
        r["oracle"] = vec_json(o);
        if (value) {
          const double on = o.norm();
          r["oracle_gap"] = num((*value - o).norm() / (on > 0.0 ? on : 1.0));
        }
      } catch (const Error& e) {
        r["oracle_diagnosis"] = e.what();
      }
    }
    results.push_back(std::move(r));
  }
  timings["per_vector_s"] = per_vector;
  return results;
}

std::vector<Vec> random_vectors(Eigen::Index n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Vec> xs;
  for (int k = 0; k < count; ++k) {
    Vec x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = {gauss(rng), gauss(rng)};
    xs.push_back(x);
  }
  return xs;
}

BernsteinFunction identity_bernstein(const IdentityRequest& id, const FunctionSpec& f) {
  if (id.params.contains("bernstein"))
    return parse_bernstein(id.params.at("bernstein"), id.name + ".bernstein");
  return *f.as_bernstein();
}

// Fills residual/tolerance/pass plus identity-specific fields.
void run_identity(const Context& ctx, const IdentityRequest& id, json& out) {
  const auto& job = ctx.job;
  const double ts = ctx.tol_scale;
  auto max_over = [&](auto&& fn) {
    double m = 0.0;
    for (const Vec& x : job.vectors) m = std::max(m, fn(x));
    return m;
  };

  if (id.name == "commutation") {
    const HalfLineMeasure a = *job.function.as_measure();
    const double r = max_over([&](const Vec& x) {
      return commutation_residual(a, ctx.A, x, ctx.spec);
    });
    out["residual"] = num(r);
    out["tolerance"] = 1e-6 * ts;
    out["pass"] = r <= 1e-6 * ts;
  } else if (id.name == "representation") {
    const BernsteinFunction psi = identity_bernstein(id, job.function);
    const double r = max_over([&](const Vec& x) {
      return representation_residual(psi, ctx.A, x, ctx.spec);
    });
    out["residual"] = num(r);
    out["tolerance"] = 1e-6 * ts;
    out["pass"] = r <= 1e-6 * ts;
  } else if (id.name == "product") {
    const HalfLineMeasure a = *job.function.as_measure();
    const BernsteinFunction psi = identity_bernstein(id, job.function);
    std::vector<double> s;
    for (int k = 0; k < 10; ++k) s.push_back(-0.1 * std::pow(100.0, k / 9.0));
    const double te = verify_product_transform(a, psi, s, ctx.spec);
    double r1 = 0.0, r2 = 0.0;
    bool lmt_b = true;
    for (const Vec& x : job.vectors) {
      const ProductReport rep = product_residuals(a, psi, ctx.A, x, ctx.spec);
      r1 = std::max(r1, rep.r1);
      r2 = std::max(r2, rep.r2);
      lmt_b = lmt_b && rep.lmt_b;
    }
    json lmt_a = nullptr;
    try {
      lmt_a = in_LMT(a, ctx.A, job.vectors);
    } catch (const Error& e) {
      out["lmt_a_diagnosis"] = e.what();
    }
    const bool closure = !(lmt_a.is_boolean() && lmt_a.get<bool>() &&
                           ctx.A.spectral_abscissa() < 0.0) || lmt_b;
    out["r1"] = num(r1);
    out["r2"] = num(r2);
    out["transform_error"] = num(te);
    out["lmt"] = lmt_b;
    out["lmt_a"] = lmt_a;
    out["residual"] = num(std::max(r1, r2));
    out["tolerance"] = 1e-5 * ts;
    out["pass"] = std::max(r1, r2) <= 1e-5 * ts && te <= 1e-6 * ts && closure;
  } else if (id.name == "composition") {
    const double alpha = id.params.at("alpha").get<double>();
    const double beta = id.params.at("beta").get<double>();
    const double r = max_over([&](const Vec& x) {
      return frac_power_compose_check(ctx.A, alpha, beta, x, ctx.spec);
    });
    out["alpha"] = alpha;
    out["beta"] = beta;
    out["residual"] = num(r);
    out["tolerance"] = 1e-5 * ts;
    out["pass"] = r <= 1e-5 * ts;
  } else if (id.name == "reciprocal") {
    const BernsteinFunction psi = identity_bernstein(id, job.function);
    const HalfLineMeasure recip =
        id.params.contains("recip")
            ? parse_measure(id.params.at("recip"), id.name + ".recip")
            : measure::from_density(density::volterra_f(-1.0, 1.0), "-volterra_f");
    const double r = max_over([&](const Vec& x) {
      const Vec y = reciprocal_inverse(psi, ctx.A, x, recip, ctx.spec);
      return (bp_apply(psi, ctx.A, y, ctx.spec).value - x).norm() /
             std::max(x.norm(), 1e-300);
    });
    out["residual"] = num(r);
    out["tolerance"] = 1e-5 * ts;
    out["pass"] = r <= 1e-5 * ts;
  } else if (id.name == "norm_bound") {
    const HalfLineMeasure a = *job.function.as_measure();
    const NormCertificate cert = bounded_norm_certificate(a, ctx.A, ctx.spec);
    out["certified"] = cert.certified;
    out["bound"] = num(cert.bound);
    out["tolerance"] = 1.0 + 1e-8;
    if (!cert.certified) {
      // Nothing is claimed without a certificate.
      out["residual"] = nullptr;
      out["diagnosis"] = "no norm certificate";
      out["pass"] = true;
      return;
    }
    const auto xs = random_vectors(ctx.A.dim(), 100, ctx.seed);
    Mat X(ctx.A.dim(), static_cast<Eigen::Index>(xs.size()));
    for (std::size_t k = 0; k < xs.size(); ++k) X.col(static_cast<Eigen::Index>(k)) = xs[k];
    const Mat G = hp_apply_block(a, ctx.A, X, ctx.spec).value;
    double ratio = 0.0;
    for (Eigen::Index k = 0; k < X.cols(); ++k)
      ratio = std::max(ratio, G.col(k).norm() / (cert.bound * X.col(k).norm()));
    out["residual"] = num(ratio);
    out["pass"] = ratio <= 1.0 + 1e-8;
  }
}

json run_identities(const Context& ctx, int& code, json& timings) {
  json ids = json::array();
  json tids = json::object();
  for (const IdentityRequest& id : ctx.job.identities) {
    const auto t0 = Clock::now();
    json out;
    out["name"] = id.name;
    try {
      run_identity(ctx, id, out);
    } catch (const Error& e) {
      out["residual"] = nullptr;
      out["pass"] = false;
      out["diagnosis"] = e.what();
    }
    if (!out.contains("tolerance")) out["tolerance"] = nullptr;
    if (!out["pass"].get<bool>()) code = merge_code(code, 3);
    tids[id.name] = seconds_since(t0);
    ids.push_back(std::move(out));
  }
  timings["identities_s"] = tids;
  return ids;
}

json config_echo(const JobSpec& job, const RunOptions& opts, const Context* ctx) {
  json c;
  c["job"] = job.source;
  c["seed"] = opts.seed.value_or(job.seed);
  c["tol_scale"] = opts.tol_scale;
  c["format"] = opts.format;
  const QuadratureSpec q = job.quadrature.scaled(opts.tol_scale);
  c["quadrature"] = {{"abs_tol", q.abs_tol},
                     {"rel_tol", q.rel_tol},
                     {"t_split", q.t_split},
                     {"max_panels", q.max_panels}};
  if (ctx) {
    c["matrix"] = {{"dim", ctx->A.dim()},
                   {"spectral_abscissa", ctx->A.spectral_abscissa()},
                   {"diagonalizable", ctx->A.diagonalizable()},
                   {"condition", num(ctx->A.condition())}};
  }
  return c;
}

struct Run {
  json results = json::array();
  json identities = json::array();
  json timings = json::object();
  int code = 0;
  std::optional<std::string> failure;
  std::optional<Context> ctx;
};

Run execute(const JobSpec& job, const RunOptions& opts, bool with_identities) {
  Run run;
  const auto t0 = Clock::now();
  try {
    QuadratureSpec spec = job.quadrature.scaled(opts.tol_scale);
    spec.validate();
    run.ctx.emplace(Context{job, Generator(job.matrix), spec, opts.tol_scale,
                            opts.seed.value_or(job.seed)});
    run.results = compute_results(*run.ctx, run.code, run.timings);
    if (with_identities) run.identities = run_identities(*run.ctx, run.code, run.timings);
  } catch (const Error& e) {
    run.code = merge_code(run.code, exit_code_for(e.kind()));
    run.failure = e.what();
  }
  run.timings["total_s"] = seconds_since(t0);
  return run;
}

json base_report(const std::string& command, const JobSpec& job,
                 const RunOptions& opts, const Run& run) {
  json r;
  r["command"] = command;
  r["status"] = status_for(run.code);
  r["exit_code"] = run.code;
  if (run.failure) r["diagnosis"] = *run.failure;
  r["results"] = run.results;
  r["identities"] = run.identities;
  r["timings"] = run.timings;
  r["config"] = config_echo(job, opts, run.ctx ? &*run.ctx : nullptr);
  return r;
}

std::string results_csv(const json& results) {
  std::string out = csv_row({"vector", "component", "re", "im", "error",
                             "oracle_re", "oracle_im", "oracle_gap", "diagnosis"});
  for (const json& r : results) {
    const json& v = r["value"];
    const json& o = r["oracle"];
    const std::size_t n = v.is_array() ? v.size() : (o.is_array() ? o.size() : 0);
    if (n == 0) {
      out += csv_row({r["index"], nullptr, nullptr, nullptr, nullptr, nullptr,
                      nullptr, nullptr, r["diagnosis"]});
    }
    for (std::size_t k = 0; k < n; ++k) {
      out += csv_row({r["index"], k, v.is_array() ? v[k][0] : json(nullptr),
                      v.is_array() ? v[k][1] : json(nullptr), r["error"],
                      o.is_array() ? o[k][0] : json(nullptr),
                      o.is_array() ? o[k][1] : json(nullptr), r["oracle_gap"],
                      r["diagnosis"]});
    }
  }
  return out;
}

std::string identities_csv(const json& ids) {
  std::string out = csv_row({"identity", "residual", "tolerance", "pass", "diagnosis"});
  for (const json& id : ids) {
    out += csv_row({id["name"], id["residual"], id["tolerance"], id["pass"],
                    id.contains("diagnosis") ? id["diagnosis"] : json("")});
  }
  return out;
}

// Applies one sweep grid value to a copy of the job.
JobSpec with_parameter(const JobSpec& job, const std::string& param, double v) {
  using K = FunctionSpec::Kind;
  JobSpec j = job;
  if (param == "alpha") {
    if (j.function.kind != K::NegFracPower)
      throw ParseError("sweep.param: alpha needs function kind neg_frac_power");
    if (!(v > 0.0)) throw ParseError("sweep.values: alpha must be positive");
    j.function.param = v;
  } else if (param == "beta") {
    if (!(v > 0.0 && v < 1.0)) throw ParseError("sweep.values: beta must lie in (0, 1)");
    if (j.function.kind == K::PosFracPower) {
      j.function.param = v;
    } else if (j.function.kind == K::Bernstein &&
               j.function.source["bernstein"].value("kind", "") == "neg_power") {
      j.function.psi = neg_power_bernstein(v);
    } else {
      throw ParseError("sweep.param: beta needs pos_frac_power or a neg_power Bernstein function");
    }
  } else if (param == "omega0") {
    const Generator A(job.matrix);
    j.matrix = job.matrix +
               cplx(v - A.spectral_abscissa()) * Mat::Identity(job.matrix.rows(),
                                                               job.matrix.cols());
  }
  return j;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotInDomain:
    case ErrorKind::SingularAtZero:
      return 2;
    case ErrorKind::ValidationFailed:
    case ErrorKind::NotInvertible:
    case ErrorKind::PreconditionFailed:
    case ErrorKind::Inconclusive:
      return 3;
    default:
      return 1;
  }
}

Outcome cmd_compute(const JobSpec& job, const RunOptions& opts) {
  const Run run = execute(job, opts, false);
  Outcome out;
  out.report = base_report("compute", job, opts, run);
  out.exit_code = run.code;
  if (opts.format == "csv") out.csv = results_csv(out.report["results"]);
  return out;
}

Outcome cmd_verify(const JobSpec& job, const RunOptions& opts) {
  if (job.identities.empty())
    throw ParseError("identities: verify needs at least one identity");
  const Run run = execute(job, opts, true);
  Outcome out;
  out.report = base_report("verify", job, opts, run);
  out.exit_code = run.code;
  if (opts.format == "csv") out.csv = identities_csv(out.report["identities"]);
  return out;
}

Outcome cmd_sweep(const JobSpec& job, const RunOptions& opts) {
  if (!job.sweep) throw ParseError("sweep: missing parameter grid");
  const SweepSpec& sw = *job.sweep;
  const auto t0 = Clock::now();
  json rows = json::array();
  std::string csv = csv_row({"param", "value", "value_norm", "oracle_gap",
                             "residual", "time_s", "diagnosis"});
  int worst = 0;
  int failed = 0;
  for (double v : sw.values) {
    const JobSpec j = with_parameter(job, sw.param, v);
    RunOptions o = opts;
    if (sw.param == "tol_scale") {
      if (!(v > 0.0)) throw ParseError("sweep.values: tol_scale must be positive");
      o.tol_scale = opts.tol_scale * v;
    }
    const Run run = execute(j, o, !j.identities.empty());
    double vnorm = 0.0, gap = 0.0, resid = 0.0;
    bool have_value = !run.results.empty(), have_gap = false, have_resid = false;
    std::string diag = run.failure.value_or("");
    for (const json& r : run.results) {
      if (r["value"].is_null()) {
        have_value = false;
        if (diag.empty()) diag = r["diagnosis"].get<std::string>();
        continue;
      }
      double n2 = 0.0;
      for (const json& c : r["value"])
        n2 += c[0].get<double>() * c[0].get<double>() + c[1].get<double>() * c[1].get<double>();
      vnorm = std::max(vnorm, std::sqrt(n2));
      if (r["oracle_gap"].is_number()) {
        gap = std::max(gap, r["oracle_gap"].get<double>());
        have_gap = true;
      }
      if (diag.empty() && r["diagnosis"] != "Converged") diag = r["diagnosis"].get<std::string>();
    }
    for (const json& id : run.identities) {
      if (id["residual"].is_number()) {
        resid = std::max(resid, id["residual"].get<double>());
        have_resid = true;
      }
      if (diag.empty() && !id["pass"].get<bool>()) diag = id["name"].get<std::string>() + " failed";
    }
    if (diag.empty()) diag = "Converged";
    const double secs = run.timings["total_s"].get<double>();
    json row = {{"param", sw.param},
                {"value", v},
                {"value_norm", have_value ? num(vnorm) : json(nullptr)},
                {"oracle_gap", have_gap ? num(gap) : json(nullptr)},
                {"residual", have_resid ? num(resid) : json(nullptr)},
                {"diagnosis", diag},
                {"exit_code", run.code}};
    csv += csv_row({row["param"], row["value"], row["value_norm"], row["oracle_gap"],
                    row["residual"], secs, row["diagnosis"]});
    row["time_s"] = secs;
    rows.push_back(std::move(row));
    if (run.code != 0) {
      ++failed;
      worst = merge_code(worst, run.code);
    }
  }
  Outcome out;
  out.exit_code = (!sw.values.empty() && failed == static_cast<int>(sw.values.size())) ? worst : 0;
  out.report["command"] = "sweep";
  out.report["status"] = status_for(out.exit_code);
  out.report["exit_code"] = out.exit_code;
  out.report["rows"] = rows;
  out.report["timings"] = {{"total_s", seconds_since(t0)}};
  out.report["config"] = config_echo(job, opts, nullptr);
  out.csv = std::move(csv);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Hille-Phillips functional calculus on matrix generators"};
  app.require_subcommand(1);
  std::string job_file, out_file, format;
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;
  const std::pair<const char*, const char*> subs[] = {
      {"compute", "evaluate f(A)x for every job vector"},
      {"verify", "check the job's identities"},
      {"sweep", "repeat compute over a parameter range"}};
  for (const auto& [name, about] : subs) {
    CLI::App* sub = app.add_subcommand(name, about);
    sub->add_option("--job", job_file, "job file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_file, "output file (default: stdout)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", seed, "overrides the job seed");
    sub->add_option("--tol-scale", tol_scale, "multiplies every tolerance")
        ->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  RunOptions opts;
  opts.format = format.empty() ? (command == "sweep" ? "csv" : "json") : format;
  opts.seed = seed;
  opts.tol_scale = tol_scale;

  Outcome outcome;
  try {
    const JobSpec job = load_job(job_file);
    if (command == "compute") outcome = cmd_compute(job, opts);
    else if (command == "verify") outcome = cmd_verify(job, opts);
    else outcome = cmd_sweep(job, opts);
  } catch (const ParseError& e) {
    std::cerr << "hpcalc: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "hpcalc: internal error: " << e.what() << "\n";
    return 1;
  }

  const std::string text =
      opts.format == "csv" ? outcome.csv : outcome.report.dump(2) + "\n";
  if (out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_file);
    if (!out) {
      std::cerr << "hpcalc: cannot write " << out_file << "\n";
      return 1;
    }
    out << text;
  }
  if (outcome.exit_code != 0) {
    std::cerr << "hpcalc: " << command << " finished with status "
              << outcome.report["status"].get<std::string>() << "\n";
  }
  return outcome.exit_code;
}

}  // namespace hpcalc::cli
