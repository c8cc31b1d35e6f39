#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "quiverstair/chain_algo.hpp"
#include "quiverstair/cycle_algo.hpp"
#include "quiverstair/errors.hpp"
#include "quiverstair/oracle.hpp"

namespace quiverstair::cli {

namespace {

using io::Json;

constexpr const char* kReportTag = "quiverstair-report";
constexpr double kResidualFactor = 1e-8;

double env_double(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != std::string(raw).size() || !std::isfinite(value) || value < 0.0)
    throw std::invalid_argument(std::string(name) + " must be a nonnegative number, got \"" + raw + "\"");
  return value;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json header(const char* command, const Representation& a, const TolerancePolicy& tol) {
  Json j;
  j["format"] = kReportTag;
  j["version"] = io::kFormatVersion;
  j["command"] = command;
  j["quiver"] = {{"kind", a.shape.kind == QuiverKind::Chain ? "chain" : "cycle"},
                 {"t", a.shape.t},
                 {"orientations", orientation_string(a.shape)}};
  j["input_dims"] = a.dims;
  j["tolerance"] = {{"abs", tol.abs_floor}, {"rel", tol.rel_factor}, {"scale", anchored(tol, a).scale}};
  return j;
}

Json dimension_check(const std::vector<std::size_t>& input, const std::vector<std::size_t>& recovered) {
  return {{"input", input}, {"recovered", recovered}, {"pass", input == recovered}};
}

std::vector<std::size_t> summed_dims(const RegularizingDecomposition& dec, const QuiverShape& shape) {
  std::vector<std::size_t> dims(shape.t, dec.regular_dimension());
  for (const auto& s : dec.summands) {
    const auto dv = s.dimension_vector(shape);
    for (std::size_t v = 0; v < dims.size(); ++v) dims[v] += dv[v];
  }
  return dims;
}

Json chain_steps(const ChainResult& res) {
  Json steps = Json::array();
  for (const auto& s : res.trace.steps)
    steps.push_back({{"arrow", s.arrow}, {"tau", s.tau}, {"block_sizes", s.block_sizes}});
  return steps;
}

Json shave_pass(int pass, const ShaveResult& s) {
  Json steps = Json::array();
  for (const auto& st : s.steps)
    steps.push_back({{"step", st.index},
                     {"vertex", st.vertex},
                     {"compression", st.compress_rows ? "rows" : "columns"},
                     {"split", st.split},
                     {"tau", st.tau}});
  Json tests = Json::array();
  for (const auto& st : s.stop_tests) tests.push_back({{"step", st.index}, {"sigma", st.sigma}, {"tau", st.tau}});
  return {{"pass", pass},
          {"l", s.l},
          {"n", s.n},
          {"steps", std::move(steps)},
          {"stop_tests", std::move(tests)},
          {"forced_stop", s.forced_stop},
          {"split_residual", s.certificate.residual}};
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << x;
  return os.str();
}

std::string dims_text(const Json& dims) {
  std::string out = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) out += (i ? "," : "") + std::to_string(dims[i].get<std::size_t>());
  return out + ")";
}

std::string complex_text(const Json& z) {
  const double re = z[0].get<double>();
  const double im = z[1].get<double>();
  std::ostringstream os;
  os << std::setprecision(10) << re << (im < 0 ? " - " : " + ") << std::abs(im) << "i";
  return os.str();
}

void emit(const Json& report, const ReportOptions& options, std::ostream& out) {
  const std::string text = options.json ? report.dump(2) + "\n" : render_text(report);
  if (options.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(options.output, std::ios::binary);
  if (!file) throw io::FormatError(options.output + ": cannot open for writing");
  file << text;
}

std::vector<IndecomposableLabel> parse_labels(const std::vector<std::string>& texts) {
  std::vector<IndecomposableLabel> out;
  for (const auto& t : texts) out.push_back(IndecomposableLabel::parse(t));
  return out;
}

}  // namespace

TolerancePolicy default_tolerance() {
  TolerancePolicy tol;
  tol.abs_floor = env_double(kTolAbsEnv, tol.abs_floor);
  tol.rel_factor = env_double(kTolRelEnv, tol.rel_factor);
  return tol;
}

cplx parse_eigenvalue(const std::string& text) {
  const auto comma = text.find(',');
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
      throw std::invalid_argument("eigenvalue \"" + text + "\" must be RE or RE,IM");
    return v;
  };
  if (comma == std::string::npos) return {number(text), 0.0};
  return {number(text.substr(0, comma)), number(text.substr(comma + 1))};
}

Json canon_report(const Representation& a, const TolerancePolicy& tol) {
  const auto res = canon_chain(a, tol);
  const auto cert = certify_chain(a, res);
  Json j = header("canon", a, tol);
  Json summands = Json::array();
  for (const auto& [ij, m] : res.form.multiplicity) {
    const auto label = IndecomposableLabel::interval(ij.first, ij.second);
    summands.push_back({{"label", label.to_string()}, {"multiplicity", m}, {"dims", label.dimension_vector(a.shape)}});
  }
  j["summands"] = std::move(summands);
  j["dimension_check"] = dimension_check(a.dims, res.form.dimension_vector(a.shape.t));
  j["residual"] = cert.residual;
  j["residual_threshold"] = kResidualFactor * a.max_arrow_norm();
  j["steps"] = chain_steps(res);
  return j;
}

Json regularize_report(const Representation& a, const TolerancePolicy& tol) {
  const auto dec = regularize(a, tol);
  Json j = header("regularize", a, tol);
  Json summands = Json::array();
  for (std::size_t i = 0; i < dec.summands.size(); ++i)
    summands.push_back({{"label", dec.summands[i].to_string()},
                        {"dims", dec.summands[i].dimension_vector(a.shape)},
                        {"pass", dec.provenance[i]}});
  j["summands"] = std::move(summands);
  j["regular_dimension"] = dec.regular_dimension();
  Json eigs = Json::array();
  for (auto z : dec.regular_monodromy.eigenvalues) eigs.push_back(io::complex_to_json(z));
  j["monodromy_eigenvalues"] = std::move(eigs);
  j["dimension_check"] = dimension_check(a.dims, summed_dims(dec, a.shape));
  j["residual"] = dec.residual;
  j["residual_threshold"] = kResidualFactor * a.max_arrow_norm();
  j["passes"] = Json::array({shave_pass(1, dec.first_pass), shave_pass(2, dec.second_pass)});
  j["chain_steps"] = Json::array({chain_steps(dec.first_chain), chain_steps(dec.second_chain)});
  return j;
}

Json verify_report(const Representation& a, const PlantSpec& truth, const TolerancePolicy& tol) {
  Json j = header("verify", a, tol);
  VerificationReport report;
  std::vector<IndecomposableLabel> recovered;
  if (a.shape.kind == QuiverKind::Chain) {
    const auto res = canon_chain(a, tol);
    report = verify(a, res, truth, tol);
    recovered = res.form.labels();
  } else {
    const auto dec = regularize(a, tol);
    report = verify(a, dec, truth, tol);
    recovered = dec.summands;
    Json eigs = Json::array();
    for (auto z : dec.regular_monodromy.eigenvalues) eigs.push_back(io::complex_to_json(z));
    j["monodromy_eigenvalues"] = std::move(eigs);
  }
  Json got = Json::array();
  for (const auto& l : recovered) got.push_back(l.to_string());
  Json want = Json::array();
  auto sorted = truth.labels;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& l : sorted) want.push_back(l.to_string());
  j["recovered_labels"] = std::move(got);
  j["expected_labels"] = std::move(want);
  j["labels_match"] = report.labels_match;
  j["residual"] = report.residual;
  j["unitarity_defect"] = report.unitarity_defect;
  j["eigenvalue_distance"] = number_or_null(report.eigenvalue_distance);
  Json checks = Json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"measured", number_or_null(c.measured)}, {"threshold", c.threshold}});
  j["checks"] = std::move(checks);
  j["pass"] = report.passed();
  return j;
}

std::string render_text(const Json& r) {
  std::ostringstream os;
  const std::string command = r["command"];
  const auto& q = r["quiver"];
  os << "quiverstair " << command << "\n";
  os << "quiver:    " << q["kind"].get<std::string>() << ", t = " << q["t"].get<std::size_t>() << ", orientations "
     << (q["orientations"].get<std::string>().empty() ? "(none)" : q["orientations"].get<std::string>()) << "\n";
  os << "dims:      " << dims_text(r["input_dims"]) << "\n";
  os << "tolerance: abs " << fmt(r["tolerance"]["abs"]) << ", rel " << fmt(r["tolerance"]["rel"]) << ", scale "
     << fmt(r["tolerance"]["scale"]) << "\n";

  if (command == "canon" || command == "regularize") {
    const auto& summands = r["summands"];
    if (summands.empty()) {
      os << (command == "regularize" ? "no singular summands\n" : "no summands\n");
    } else {
      os << "summands:\n";
      for (const auto& s : summands) {
        os << "  " << std::left << std::setw(12) << s["label"].get<std::string>();
        if (s.contains("multiplicity")) os << " x" << s["multiplicity"].get<std::size_t>();
        os << "  dims " << dims_text(s["dims"]);
        if (s.contains("pass")) os << "  pass " << s["pass"].get<int>();
        os << "\n";
      }
    }
    if (command == "regularize") {
      os << "regular part: dimension " << r["regular_dimension"].get<std::size_t>() << "\n";
      for (const auto& z : r["monodromy_eigenvalues"]) os << "  eigenvalue " << complex_text(z) << "\n";
    }
    const auto& dc = r["dimension_check"];
    os << "dimension check: " << (dc["pass"].get<bool>() ? "pass" : "FAIL") << " " << dims_text(dc["recovered"]) << "\n";
    os << "residual:  " << fmt(r["residual"]) << " (threshold " << fmt(r["residual_threshold"]) << ")\n";
    auto step_line = [&](const Json& s) {
      os << "  arrow " << s["arrow"].get<std::size_t>() << ": tau " << fmt(s["tau"]) << ", blocks "
         << dims_text(s["block_sizes"]) << "\n";
    };
    if (command == "canon") {
      os << "steps:\n";
      for (const auto& s : r["steps"]) step_line(s);
    } else {
      for (const auto& p : r["passes"]) {
        os << "shave pass " << p["pass"].get<int>() << ": l = " << p["l"].get<long>() << ", n = " << p["n"].get<long>()
           << ", split residual " << fmt(p["split_residual"]);
        if (const long forced = p["forced_stop"].get<long>(); forced != 0)
          os << ", stop imposed at step " << forced << " after the stop rule failed certification";
        os << "\n";
        for (const auto& s : p["steps"])
          os << "  step " << s["step"].get<long>() << " at vertex " << s["vertex"].get<std::size_t>() << " ("
             << s["compression"].get<std::string>() << "): split " << s["split"].get<std::size_t>() << ", tau "
             << fmt(s["tau"]) << "\n";
      }
      int pass = 1;
      for (const auto& steps : r["chain_steps"]) {
        os << "chain pass " << pass++ << ":\n";
        for (const auto& s : steps) step_line(s);
      }
    }
  } else if (command == "verify") {
    const auto labels = [&](const Json& list) {
      std::string line;
      for (const auto& l : list) line += (line.empty() ? "" : " ") + l.get<std::string>();
      return line.empty() ? std::string("(none)") : line;
    };
    os << "expected:  " << labels(r["expected_labels"]) << "\n";
    os << "recovered: " << labels(r["recovered_labels"]) << "\n";
    os << "checks:\n";
    for (const auto& c : r["checks"]) {
      os << "  " << std::left << std::setw(18) << c["name"].get<std::string>() << (c["pass"].get<bool>() ? "pass" : "FAIL")
         << "  measured " << (c["measured"].is_null() ? std::string("inf") : fmt(c["measured"])) << ", threshold "
         << fmt(c["threshold"]) << "\n";
    }
    os << "verdict:   " << (r["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  }
  return os.str();
}

int run_canon(const std::string& input, const ReportOptions& options, std::ostream& out) {
  const auto a = io::read_representation(input);
  if (a.shape.kind != QuiverKind::Chain)
    throw std::invalid_argument(input + ": canon expects a chain file (use regularize for cycles)");
  emit(canon_report(a, options.tol), options, out);
  return kSuccess;
}

int run_regularize(const std::string& input, const ReportOptions& options, std::ostream& out) {
  const auto a = io::read_representation(input);
  if (a.shape.kind != QuiverKind::Cycle)
    throw std::invalid_argument(input + ": regularize expects a cycle file (use canon for chains)");
  emit(regularize_report(a, options.tol), options, out);
  return kSuccess;
}

int run_verify(const std::string& input, const std::string& truth_path, const ReportOptions& options,
               std::ostream& out) {
  const auto a = io::read_representation(input);
  const auto truth = io::read_plant_spec(truth_path);
  if (!(truth.shape == a.shape)) throw std::invalid_argument("truth file describes a different quiver than the input");
  const auto report = verify_report(a, truth, options.tol);
  emit(report, options, out);
  return report["pass"].get<bool>() ? kSuccess : kMismatch;
}

int run_gen(const GenOptions& options, std::ostream& out) {
  if (options.output.empty()) throw std::invalid_argument("gen needs --output");
  PlantSpec spec;
  if (!options.spec_path.empty()) {
    spec = io::read_plant_spec(options.spec_path);
  } else {
    std::vector<Orientation> o;
    o = parse_orientations(options.orientations);
    if (options.kind == "chain") {
      spec.shape = QuiverShape::chain(o);
    } else if (options.kind == "cycle") {
      spec.shape = QuiverShape::cycle(o);
    } else {
      throw std::invalid_argument("--kind must be chain or cycle");
    }
    spec.labels = parse_labels(options.labels);
    for (const auto& e : options.eigs) spec.regular_eigs.push_back(parse_eigenvalue(e));
  }
  if (options.seed_given) spec.seed = options.seed;
  if (!(options.noise >= 0.0) || !std::isfinite(options.noise)) throw std::invalid_argument("--noise must be >= 0");

  const auto planted = plant(spec, {options.general_invertible, options.max_condition});
  auto rep = planted.rep;
  if (options.noise > 0.0) rep = add_noise(rep, options.noise, stream_seed(spec.seed, 0x6e6f697365ULL));

  const std::string truth_path = options.truth_output.empty() ? options.output + ".truth.json" : options.truth_output;
  io::write_json(options.output, io::representation_to_json(rep));
  io::write_json(truth_path, io::plant_spec_to_json(planted.truth));
  out << "wrote " << options.output << " (" << (spec.shape.kind == QuiverKind::Chain ? "chain" : "cycle") << ", dims "
      << dims_text(Json(rep.dims)) << ") and " << truth_path << "\n";
  return kSuccess;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConsistencyError& e) {
    err << "inconsistency: " << e.what() << "\n";
    return kNumericError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kNumericError;
  }
}

}  // namespace quiverstair::cli
