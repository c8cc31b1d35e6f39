#include "quiverstair/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <iterator>
#include <numbers>
#include <stdexcept>

namespace quiverstair {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::bits() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

cplx Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  if (n == 0) return {};
  Rng rng(seed);
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd g(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i)
    for (Eigen::Index j = 0; j < nn; ++j) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  ComplexMatrix out(n, n);
  for (Eigen::Index j = 0; j < nn; ++j) {
    const cplx d = r(j, j);
    const cplx phase = std::abs(d) > 0.0 ? d / std::abs(d) : cplx(1.0);
    for (Eigen::Index i = 0; i < nn; ++i)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = q(i, j) * phase;
  }
  return out;
}

ComplexMatrix random_invertible(std::size_t n, double max_condition, std::uint64_t seed) {
  if (!(max_condition >= 1.0)) throw std::invalid_argument("max_condition must be at least 1");
  Rng rng(stream_seed(seed, 2));
  ComplexMatrix d = ComplexMatrix::zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = std::pow(max_condition, rng.uniform());
  return random_unitary(n, stream_seed(seed, 0)) * d * random_unitary(n, stream_seed(seed, 1)).adjoint();
}

void PlantSpec::validate() const {
  shape.validate();
  const long t = static_cast<long>(shape.t);
  for (const auto& label : labels) {
    if (shape.kind == QuiverKind::Chain) {
      if (label.kind != LabelKind::Interval || label.first < 1 || label.last < label.first || label.last > t)
        throw std::invalid_argument("label " + label.to_string() + " does not fit a chain on " + std::to_string(t) +
                                    " vertices");
    } else if (label.kind != LabelKind::Walk || label.first < 1 || label.first > t || label.last < label.first) {
      throw std::invalid_argument("label " + label.to_string() + " does not fit a cycle on " + std::to_string(t) +
                                  " vertices");
    }
  }
  if (shape.kind == QuiverKind::Chain && !regular_eigs.empty())
    throw std::invalid_argument("chain plants take no regular eigenvalues");
  for (auto lambda : regular_eigs)
    if (!(std::abs(lambda) > 1e-9)) throw std::invalid_argument("regular eigenvalues must satisfy |lambda| > 1e-9");
}

Representation regular_summand(const QuiverShape& shape, const std::vector<cplx>& eigs) {
  const std::size_t n = eigs.size();
  auto p = zero_representation(shape, std::vector<std::size_t>(shape.t, n));
  for (auto& m : p.matrices) m = ComplexMatrix::identity(n);
  const std::size_t last = shape.t - 1;
  for (std::size_t i = 0; i < n; ++i) p.matrices[last](i, i) = shape.clockwise(last) ? eigs[i] : 1.0 / eigs[i];
  return p;
}

Plant plant(const PlantSpec& spec, const PlantOptions& options) {
  spec.validate();
  Plant out;
  out.truth = spec;
  std::sort(out.truth.labels.begin(), out.truth.labels.end());
  std::vector<Representation> parts;
  for (const auto& label : spec.labels) parts.push_back(make_indecomposable(label, spec.shape));
  if (spec.shape.kind == QuiverKind::Cycle) parts.push_back(regular_summand(spec.shape, spec.regular_eigs));
  out.unscrambled = direct_sum(parts, spec.shape);
  for (std::size_t v = 0; v < spec.shape.t; ++v) {
    const std::size_t d = out.unscrambled.dims[v];
    const auto seed = stream_seed(spec.seed, v);
    out.scramble.at_vertex.push_back(options.general_invertible ? random_invertible(d, options.max_condition, seed)
                                                                : random_unitary(d, seed));
  }
  out.rep = apply_isomorphism(out.unscrambled, out.scramble, TolerancePolicy{0.0, 0.0});
  return out;
}

Representation add_noise(const Representation& a, double relative_scale, std::uint64_t seed) {
  const double scale = relative_scale * a.max_arrow_norm();
  Representation out = a;
  for (std::size_t c = 0; c < out.matrices.size(); ++c) {
    Rng rng(stream_seed(seed, 1000 + c));
    auto& m = out.matrices[c];
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += scale * rng.complex_normal();
  }
  return out;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

double relative_eigenvalue_distance(const std::vector<cplx>& recovered, const std::vector<cplx>& planted) {
  if (recovered.size() != planted.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(recovered.size(), false);
  double worst = 0.0;
  for (auto mu : planted) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < recovered.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(recovered[i] - mu);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d / std::abs(mu));
  }
  return worst;
}

namespace {

constexpr double kResidualFactor = 1e-8;
constexpr double kUnitarityFactor = 1e-12;
constexpr double kEigenvalueTolerance = 1e-6;

std::size_t multiset_difference(std::vector<IndecomposableLabel> a, std::vector<IndecomposableLabel> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<IndecomposableLabel> diff;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
  return diff.size();
}

double worst_unitarity(const std::vector<ComplexMatrix>& us) {
  double worst = 0.0;
  for (const auto& u : us) worst = std::max(worst, unitarity_defect(u) / static_cast<double>(std::max<std::size_t>(1, u.rows())));
  return worst;
}

double dimension_gap(const std::vector<std::size_t>& got, const std::vector<std::size_t>& want) {
  double gap = 0.0;
  for (std::size_t v = 0; v < want.size(); ++v)
    gap += std::abs(static_cast<double>(got[v]) - static_cast<double>(want[v]));
  return gap;
}

std::size_t row_condition_failures(const Representation& tilde, const TolerancePolicy& tol) {
  std::size_t bad = 0;
  for (std::size_t c = 0; c < tilde.matrices.size(); ++c)
    if (tilde.shape.clockwise(c) && numerical_rank(tilde.matrices[c], tol) != tilde.matrices[c].rows()) ++bad;
  return bad;
}

void add_common(VerificationReport& report, std::size_t label_gap, double dim_gap, double residual, double norm,
                double unitarity) {
  report.labels_match = label_gap == 0;
  report.residual = residual;
  report.unitarity_defect = unitarity;
  report.checks.push_back({"labels", label_gap == 0, static_cast<double>(label_gap), 0.0});
  report.checks.push_back({"dimensions", dim_gap == 0.0, dim_gap, 0.0});
  const double limit = kResidualFactor * norm;
  report.checks.push_back({"residual", residual <= limit, residual, limit});
  report.checks.push_back({"unitarity", unitarity <= kUnitarityFactor, unitarity, kUnitarityFactor});
}

}  // namespace

VerificationReport verify(const Representation& a, const ChainResult& result, const PlantSpec& truth,
                          const TolerancePolicy&) {
  if (!(a.shape == truth.shape)) throw std::invalid_argument("verify: input and truth have different quivers");
  VerificationReport report;
  const auto cert = certify_chain(a, result);
  add_common(report, multiset_difference(result.form.labels(), truth.labels),
             dimension_gap(result.form.dimension_vector(a.shape.t), a.dims), cert.residual, a.max_arrow_norm(),
             worst_unitarity(result.trace.unitaries));
  return report;
}

VerificationReport verify(const Representation& a, const RegularizingDecomposition& result, const PlantSpec& truth,
                          const TolerancePolicy& tol) {
  if (!(a.shape == truth.shape)) throw std::invalid_argument("verify: input and truth have different quivers");
  VerificationReport report;
  std::vector<std::size_t> dims(a.shape.t, result.regular_dimension());
  for (const auto& s : result.summands) {
    const auto dv = s.dimension_vector(a.shape);
    for (std::size_t v = 0; v < dims.size(); ++v) dims[v] += dv[v];
  }
  std::vector<ComplexMatrix> unitaries = result.trace;
  for (const auto* pass : {&result.first_pass, &result.second_pass})
    unitaries.insert(unitaries.end(), pass->trace.begin(), pass->trace.end());
  for (const auto* chain : {&result.first_chain, &result.second_chain})
    unitaries.insert(unitaries.end(), chain->trace.unitaries.begin(), chain->trace.unitaries.end());
  add_common(report, multiset_difference(result.summands, truth.labels), dimension_gap(dims, a.dims), result.residual,
             a.max_arrow_norm(), worst_unitarity(unitaries));

  const double reg_gap =
      std::abs(static_cast<double>(result.regular_dimension()) - static_cast<double>(truth.regular_eigs.size()));
  report.checks.push_back({"regular_dimension", reg_gap == 0.0, reg_gap, 0.0});
  report.eigenvalue_distance =
      relative_eigenvalue_distance(result.regular_monodromy.eigenvalues, truth.regular_eigs);
  report.checks.push_back(
      {"eigenvalues", report.eigenvalue_distance <= kEigenvalueTolerance, report.eigenvalue_distance, kEigenvalueTolerance});
  const auto rows = row_condition_failures(result.first_pass.a_tilde, tol) +
                    row_condition_failures(result.second_pass.a_tilde, tol);
  report.checks.push_back({"row_condition", rows == 0, static_cast<double>(rows), 0.0});
  return report;
}

}  // namespace quiverstair
