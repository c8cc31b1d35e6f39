#include "serialization.hpp"

#include <fstream>
#include <sstream>

namespace quiverstair::io {

namespace {

constexpr const char* kRepresentationTag = "quiverstair-representation";
constexpr const char* kTruthTag = "quiverstair-truth";

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw FormatError(path + ": " + what); }

const Json& field(const Json& j, const std::string& path, const char* name) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(name);
  if (it == j.end()) fail(path.empty() ? name : path + "." + name, "missing field");
  return *it;
}

std::string child(const std::string& path, const char* name) { return path.empty() ? name : path + "." + name; }

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::size_t as_size(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

void check_tag(const Json& j, const char* tag) {
  const auto& format = field(j, "", "format");
  if (!format.is_string() || format.get<std::string>() != tag)
    fail("format", std::string("expected \"") + tag + "\"");
  const auto& version = field(j, "", "version");
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion)
    fail("version", "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
}

QuiverShape shape_from_json(const Json& j) {
  const auto& kind = field(j, "", "kind");
  if (!kind.is_string() || (kind != "chain" && kind != "cycle")) fail("kind", "expected \"chain\" or \"cycle\"");
  const std::size_t t = as_size(field(j, "", "t"), "t");
  const auto& o = field(j, "", "orientations");
  if (!o.is_string()) fail("orientations", "expected a string of '>' and '<'");
  std::vector<Orientation> orientations;
  try {
    orientations = parse_orientations(o.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail("orientations", e.what());
  }
  QuiverShape shape = kind == "chain" ? QuiverShape::chain(orientations) : QuiverShape::cycle(orientations);
  if (shape.t != t || (kind == "cycle" && orientations.size() != t))
    fail("orientations", "length " + std::to_string(orientations.size()) + " does not fit t = " + std::to_string(t));
  try {
    shape.validate();
  } catch (const std::invalid_argument& e) {
    fail("t", e.what());
  }
  return shape;
}

void shape_to_json(Json& j, const QuiverShape& shape) {
  j["kind"] = shape.kind == QuiverKind::Chain ? "chain" : "cycle";
  j["t"] = shape.t;
  j["orientations"] = orientation_string(shape);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected a [re, im] pair");
  return {as_double(j[0], index(path, 0)), as_double(j[1], index(path, 1))};
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    data.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  const std::size_t rows = as_size(field(j, path, "rows"), child(path, "rows"));
  const std::size_t cols = as_size(field(j, path, "cols"), child(path, "cols"));
  const auto& data = field(j, path, "data");
  const std::string dpath = child(path, "data");
  if (!data.is_array() || data.size() != rows) fail(dpath, "expected " + std::to_string(rows) + " rows");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = data[i];
    if (!row.is_array() || row.size() != cols) fail(index(dpath, i), "expected " + std::to_string(cols) + " entries");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[k], index(index(dpath, i), k));
  }
  return m;
}

Json representation_to_json(const Representation& a) {
  Json j;
  j["format"] = kRepresentationTag;
  j["version"] = kFormatVersion;
  shape_to_json(j, a.shape);
  j["dims"] = a.dims;
  Json matrices = Json::array();
  for (const auto& m : a.matrices) matrices.push_back(matrix_to_json(m));
  j["matrices"] = std::move(matrices);
  return j;
}

Representation representation_from_json(const Json& j) {
  check_tag(j, kRepresentationTag);
  Representation a;
  a.shape = shape_from_json(j);
  const auto& dims = field(j, "", "dims");
  if (!dims.is_array() || dims.size() != a.shape.t) fail("dims", "expected " + std::to_string(a.shape.t) + " entries");
  for (std::size_t v = 0; v < dims.size(); ++v) a.dims.push_back(as_size(dims[v], index("dims", v)));
  const auto& matrices = field(j, "", "matrices");
  if (!matrices.is_array() || matrices.size() != a.shape.arrow_count())
    fail("matrices", "expected " + std::to_string(a.shape.arrow_count()) + " matrices");
  for (std::size_t c = 0; c < matrices.size(); ++c) {
    const std::string path = index("matrices", c);
    auto m = matrix_from_json(matrices[c], path);
    const std::size_t r = a.dims[a.shape.target(c)];
    const std::size_t k = a.dims[a.shape.source(c)];
    if (m.rows() != r || m.cols() != k)
      fail(path, "arrow " + std::to_string(c + 1) + " must be " + std::to_string(r) + "x" + std::to_string(k) +
                     " for these dims and orientations, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
    a.matrices.push_back(std::move(m));
  }
  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    fail("matrices", e.what());
  }
  return a;
}

Json plant_spec_to_json(const PlantSpec& spec) {
  Json j;
  j["format"] = kTruthTag;
  j["version"] = kFormatVersion;
  shape_to_json(j, spec.shape);
  Json labels = Json::array();
  for (const auto& l : spec.labels) labels.push_back(l.to_string());
  j["labels"] = std::move(labels);
  Json eigs = Json::array();
  for (auto z : spec.regular_eigs) eigs.push_back(complex_to_json(z));
  j["regular_eigs"] = std::move(eigs);
  j["seed"] = spec.seed;
  return j;
}

PlantSpec plant_spec_from_json(const Json& j) {
  check_tag(j, kTruthTag);
  PlantSpec spec;
  spec.shape = shape_from_json(j);
  const auto& labels = field(j, "", "labels");
  if (!labels.is_array()) fail("labels", "expected an array of label strings");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i].is_string()) fail(index("labels", i), "expected a label string such as \"G(1,4)\"");
    try {
      spec.labels.push_back(IndecomposableLabel::parse(labels[i].get<std::string>()));
    } catch (const std::invalid_argument& e) {
      fail(index("labels", i), e.what());
    }
  }
  if (j.contains("regular_eigs")) {
    const auto& eigs = j["regular_eigs"];
    if (!eigs.is_array()) fail("regular_eigs", "expected an array of [re, im] pairs");
    for (std::size_t i = 0; i < eigs.size(); ++i) spec.regular_eigs.push_back(complex_from_json(eigs[i], index("regular_eigs", i)));
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected an unsigned integer");
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    fail("labels", e.what());
  }
  return spec;
}

Json read_json(const std::string& path) {
  const std::string text = slurp(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw FormatError(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": JSON syntax error");
  } catch (const nlohmann::json::out_of_range&) {
    throw FormatError(path + ": number out of double range");
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

Representation read_representation(const std::string& path) {
  try {
    return representation_from_json(read_json(path));
  } catch (const FormatError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw FormatError(path + ": " + what);
  }
}

PlantSpec read_plant_spec(const std::string& path) {
  try {
    return plant_spec_from_json(read_json(path));
  } catch (const FormatError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw FormatError(path + ": " + what);
  }
}

}  // namespace quiverstair::io
