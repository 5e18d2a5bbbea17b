#include <algorithm>
#include <fstream>
#include <sstream>

#include "hpcalc/cli.hpp"

namespace hpcalc::cli {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string child(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

double number_field(const json& j, const std::string& key,
                    const std::string& path,
                    std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    bad(child(path, key), "missing");
  }
  return number(j.at(key), child(path, key));
}

// A scalar is a number or an [re, im] pair.
cplx scalar(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  bad(path, "expected a number or an [re, im] pair");
}

cplx scalar_field(const json& j, const std::string& key,
                  const std::string& path, cplx fallback) {
  return j.contains(key) ? scalar(j.at(key), child(path, key)) : fallback;
}

const json& array_field(const json& j, const std::string& key,
                        const std::string& path) {
  if (!j.contains(key)) bad(child(path, key), "missing");
  const json& a = j.at(key);
  if (!a.is_array()) bad(child(path, key), "expected an array");
  return a;
}

std::string string_field(const json& j, const std::string& key,
                         const std::string& path) {
  if (!j.contains(key)) bad(child(path, key), "missing");
  if (!j.at(key).is_string()) bad(child(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

Vec parse_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = scalar(j[i], child(path, i));
  return v;
}

Mat parse_matrix_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array of rows");
  const std::size_t n = j.size();
  Mat A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string rp = child(path, r);
    if (!j[r].is_array() || j[r].size() != n)
      bad(rp, "expected a row of length " + std::to_string(n));
    for (std::size_t c = 0; c < n; ++c)
      A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          scalar(j[r][c], child(rp, c));
  }
  return A;
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

Density parse_density(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  const std::string kind = string_field(j, "kind", path);
  return wrap(path, [&]() -> Density {
    if (kind == "power_exp")
      return density::power_exp(scalar_field(j, "coef", path, 1.0),
                                 number_field(j, "power", path, 0.0),
                                 number_field(j, "rate", path, 0.0));
    if (kind == "const") return density::constant(scalar_field(j, "value", path, 1.0));
    if (kind == "volterra_f")
      return density::volterra_f(scalar_field(j, "coef", path, 1.0),
                                 number_field(j, "rate", path, 1.0));
    if (kind == "table") {
      const json& ts = array_field(j, "t", path);
      const json& vs = array_field(j, "values", path);
      if (ts.size() != vs.size()) bad(child(path, "values"), "length differs from t");
      std::vector<double> t;
      std::vector<cplx> v;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        t.push_back(number(ts[i], child(child(path, "t"), i)));
        v.push_back(scalar(vs[i], child(child(path, "values"), i)));
      }
      return density::table(std::move(t), std::move(v));
    }
    bad(child(path, "kind"), "unknown density kind '" + kind + "'");
  });
}

IdentityRequest parse_identity(const json& j, const std::string& path) {
  static const std::vector<std::string> known = {"commutation", "representation", "product",
                                                 "composition", "reciprocal", "norm_bound"};
  IdentityRequest id;
  if (j.is_string()) {
    id.name = j.get<std::string>();
  } else if (j.is_object()) {
    id.name = string_field(j, "name", path);
    id.params = j;
  } else {
    bad(path, "expected a name or an object with a name");
  }
  if (std::find(known.begin(), known.end(), id.name) == known.end())
    bad(path, "unknown identity '" + id.name + "'");
  if (id.name == "product" && !id.params.contains("bernstein"))
    bad(child(path, "bernstein"), "product needs a Bernstein function");
  if (id.name == "composition") {
    for (const char* k : {"alpha", "beta"}) number_field(id.params, k, path);
  }
  // Validate nested specs early so errors carry their field path.
  if (id.params.contains("bernstein"))
    parse_bernstein(id.params.at("bernstein"), child(path, "bernstein"));
  if (id.params.contains("recip"))
    parse_measure(id.params.at("recip"), child(path, "recip"));
  return id;
}

}  // namespace

Mat parse_matrix_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<cplx>> rows;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    std::vector<cplx> row;
    while (ls >> tok) {
      const std::string where = origin + ":" + std::to_string(lineno);
      const auto comma = tok.find(',');
      try {
        std::size_t used = 0;
        if (comma == std::string::npos) {
          const double re = std::stod(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
          row.emplace_back(re, 0.0);
        } else {
          const std::string a = tok.substr(0, comma), b = tok.substr(comma + 1);
          std::size_t ub = 0;
          const double re = std::stod(a, &used);
          const double im = std::stod(b, &ub);
          if (used != a.size() || ub != b.size()) throw std::invalid_argument(tok);
          row.emplace_back(re, im);
        }
      } catch (const std::logic_error&) {
        throw ParseError(where + ": cannot parse entry '" + tok + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(origin + ":" + std::to_string(lineno) + ": row has " +
                       std::to_string(row.size()) + " entries, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(origin + ": no matrix rows");
  if (rows.size() != rows.front().size())
    throw ParseError(origin + ": matrix is " + std::to_string(rows.size()) + "x" +
                     std::to_string(rows.front().size()) + ", expected square");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Mat A(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) A(r, c) = rows[r][c];
  return A;
}

HalfLineMeasure parse_measure(const json& j, const std::string& path) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "neg_lebesgue") return measure::lebesgue(-1.0);
    if (name == "lebesgue") return measure::lebesgue(1.0);
    bad(path, "unknown measure '" + name + "'");
  }
  if (!j.is_object()) bad(path, "expected a measure name or object");
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    const json& a = array_field(j, "atoms", path);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string ap = child(child(path, "atoms"), i);
      if (!a[i].is_array() || a[i].size() < 2 || a[i].size() > 3)
        bad(ap, "expected [t, re] or [t, re, im]");
      const double t = number(a[i][0], child(ap, 0));
      const double re = number(a[i][1], child(ap, 1));
      const double im = a[i].size() == 3 ? number(a[i][2], child(ap, 2)) : 0.0;
      atoms.push_back({t, {re, im}});
    }
  }
  std::optional<Density> d;
  if (j.contains("density")) d = parse_density(j.at("density"), child(path, "density"));
  std::string label = j.contains("label") && j.at("label").is_string()
                          ? j.at("label").get<std::string>()
                          : "a";
  return wrap(path, [&] { return HalfLineMeasure(std::move(atoms), std::move(d), label); });
}

BernsteinFunction parse_bernstein(const json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  const std::string kind = string_field(j, "kind", path);
  return wrap(path, [&]() -> BernsteinFunction {
    if (kind == "neg_power") return neg_power_bernstein(number_field(j, "beta", path));
    if (kind == "log_shift") return log_shift();
    if (kind == "atom") return single_atom(number_field(j, "u0", path));
    if (kind == "custom") {
      if (!j.contains("rho")) bad(child(path, "rho"), "missing");
      return BernsteinFunction(number_field(j, "psi0", path, 0.0),
                               parse_measure(j.at("rho"), child(path, "rho")),
                               "custom");
    }
    bad(child(path, "kind"), "unknown Bernstein kind '" + kind + "'");
  });
}

FunctionSpec parse_function(const json& j, const std::string& path) {
  using K = FunctionSpec::Kind;
  if (!j.is_object()) bad(path, "expected an object");
  const int forms = int(j.contains("kind")) + int(j.contains("measure")) +
                    int(j.contains("bernstein"));
  if (forms != 1) bad(path, "exactly one of kind, measure, bernstein is required");
  FunctionSpec f;
  f.source = j;
  if (j.contains("measure")) {
    f.kind = K::Measure;
    f.measure = parse_measure(j.at("measure"), child(path, "measure"));
    return f;
  }
  if (j.contains("bernstein")) {
    f.kind = K::Bernstein;
    f.psi = parse_bernstein(j.at("bernstein"), child(path, "bernstein"));
    return f;
  }
  const std::string kind = string_field(j, "kind", path);
  if (kind == "neg_frac_power") {
    f.kind = K::NegFracPower;
    f.param = number_field(j, "alpha", path);
    if (!(f.param > 0.0)) bad(child(path, "alpha"), "must be positive");
  } else if (kind == "pos_frac_power") {
    f.kind = K::PosFracPower;
    f.param = number_field(j, "beta", path);
    if (!(f.param > 0.0 && f.param < 1.0)) bad(child(path, "beta"), "must lie in (0, 1)");
  } else if (kind == "log_inverse") {
    f.kind = K::LogInverse;
  } else if (kind == "reciprocal") {
    f.kind = K::Reciprocal;
  } else if (kind == "log_shift") {
    f.kind = K::LogShift;
  } else {
    bad(child(path, "kind"), "unknown function kind '" + kind + "'");
  }
  return f;
}

std::optional<HalfLineMeasure> FunctionSpec::as_measure() const {
  switch (kind) {
    case Kind::Measure: return measure;
    case Kind::NegFracPower: return measure::fractional(param);
    case Kind::Reciprocal: return measure::lebesgue(-1.0);
    case Kind::LogInverse:
      return measure::from_density(density::volterra_f(1.0, 1.0), "volterra_f");
    default: return std::nullopt;
  }
}

std::optional<BernsteinFunction> FunctionSpec::as_bernstein() const {
  switch (kind) {
    case Kind::Bernstein: return psi;
    case Kind::PosFracPower: return neg_power_bernstein(param);
    case Kind::LogShift: return log_shift();
    default: return std::nullopt;
  }
}

std::optional<ScalarFunction> FunctionSpec::symbol() const {
  switch (kind) {
    case Kind::NegFracPower: return ScalarFunction::neg_power(param);
    case Kind::PosFracPower: return ScalarFunction::bernstein_neg_power(param);
    case Kind::LogInverse: return ScalarFunction::log_inverse();
    case Kind::Reciprocal: return ScalarFunction::reciprocal();
    case Kind::LogShift: return ScalarFunction::log_shift();
    case Kind::Measure:
      if (laplace_closed_form(*measure, -1.0)) return ScalarFunction::laplace_of(*measure);
      return std::nullopt;
    case Kind::Bernstein:
      if (psi->closed_form()) return ScalarFunction::bernstein_of(*psi);
      return std::nullopt;
  }
  return std::nullopt;
}

JobSpec parse_job(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("job", "expected a JSON object");
  JobSpec job;
  job.source = j;

  const bool inline_matrix = j.contains("matrix");
  if (inline_matrix == j.contains("matrix_file"))
    bad("matrix", "exactly one of matrix, matrix_file is required");
  if (inline_matrix) {
    job.matrix = parse_matrix_json(j.at("matrix"), "matrix");
  } else {
    if (!j.at("matrix_file").is_string()) bad("matrix_file", "expected a path");
    std::filesystem::path p = j.at("matrix_file").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) bad("matrix_file", "cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    job.matrix = parse_matrix_text(ss.str(), p.string());
  }
  for (Eigen::Index i = 0; i < job.matrix.size(); ++i) {
    if (!std::isfinite(job.matrix(i).real()) || !std::isfinite(job.matrix(i).imag()))
      bad("matrix", "entries must be finite");
  }

  if (!j.contains("function")) bad("function", "missing");
  job.function = parse_function(j.at("function"), "function");

  if (j.contains("vector") && j.contains("vectors"))
    bad("vector", "give either vector or vectors, not both");
  if (j.contains("vector")) {
    job.vectors.push_back(parse_vector(j.at("vector"), "vector"));
  } else if (j.contains("vectors")) {
    const json& vs = array_field(j, "vectors", "");
    for (std::size_t i = 0; i < vs.size(); ++i)
      job.vectors.push_back(parse_vector(vs[i], child("vectors", i)));
  } else {
    bad("vector", "missing (vector or vectors)");
  }
  for (std::size_t i = 0; i < job.vectors.size(); ++i) {
    if (job.vectors[i].size() != job.matrix.rows())
      bad(j.contains("vector") ? "vector" : child("vectors", i),
          "length " + std::to_string(job.vectors[i].size()) +
              " does not match the matrix dimension " +
              std::to_string(job.matrix.rows()));
  }

  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    if (!q.is_object()) bad("quadrature", "expected an object");
    QuadratureSpec& s = job.quadrature;
    s.abs_tol = number_field(q, "abs_tol", "quadrature", s.abs_tol);
    s.rel_tol = number_field(q, "rel_tol", "quadrature", s.rel_tol);
    s.t_split = number_field(q, "t_split", "quadrature", s.t_split);
    s.max_panels = static_cast<int>(
        number_field(q, "max_panels", "quadrature", double(s.max_panels)));
    wrap("quadrature", [&] { s.validate(); return 0; });
  }

  if (j.contains("identities")) {
    const json& ids = array_field(j, "identities", "");
    for (std::size_t i = 0; i < ids.size(); ++i)
      job.identities.push_back(parse_identity(ids[i], child("identities", i)));
  }
  using K = FunctionSpec::Kind;
  const K fk = job.function.kind;
  const bool is_laplace = fk == K::Measure || fk == K::NegFracPower ||
                          fk == K::Reciprocal || fk == K::LogInverse;
  for (std::size_t i = 0; i < job.identities.size(); ++i) {
    const IdentityRequest& id = job.identities[i];
    const std::string p = child("identities", i);
    if ((id.name == "commutation" || id.name == "product" || id.name == "norm_bound") && !is_laplace)
      bad(p, id.name + " needs a function given by a measure");
    if ((id.name == "representation" || id.name == "reciprocal") && is_laplace &&
        !id.params.contains("bernstein"))
      bad(p, id.name + " needs a Bernstein function (function or identity field)");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (!s.is_object()) bad("sweep", "expected an object");
    SweepSpec sw;
    sw.param = string_field(s, "param", "sweep");
    if (sw.param != "alpha" && sw.param != "beta" && sw.param != "omega0" &&
        sw.param != "tol_scale")
      bad("sweep.param", "expected alpha, beta, omega0 or tol_scale");
    const json& vals = array_field(s, "values", "sweep");
    for (std::size_t i = 0; i < vals.size(); ++i)
      sw.values.push_back(number(vals[i], child("sweep.values", i)));
    job.sweep = std::move(sw);
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) bad("seed", "expected a non-negative integer");
    job.seed = j.at("seed").get<std::uint64_t>();
  }
  return job;
}

JobSpec load_job(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string() + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C".
    throw ParseError(file.string() + ": " + e.what());
  }
  return parse_job(j, file.parent_path());
}

}  // namespace hpcalc::cli
