#include "opquant/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "opquant/error.hpp"

namespace opquant {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const WeightSequence& w, const char* what) {
  if (w.periodic.empty()) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + ": periodic part is empty");
  }
  auto finite = [](double x) { return std::isfinite(x); };
  if (!std::all_of(w.prefix.begin(), w.prefix.end(), finite) ||
      !std::all_of(w.periodic.begin(), w.periodic.end(), finite)) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + ": weights must be finite");
  }
}

void validate_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " must be square");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " entries must be finite");
  }
}

// Induced matrix norm for the given exponent.
double matrix_norm(const Eigen::MatrixXd& m, Exponent p) {
  if (m.size() == 0) return 0.0;
  switch (p) {
    case Exponent::one: return m.cwiseAbs().colwise().sum().maxCoeff();
    case Exponent::infinity: return m.cwiseAbs().rowwise().sum().maxCoeff();
    case Exponent::two: break;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

std::size_t tail_period(const TailVector& v, std::size_t weight_period) {
  return v.has_tail() ? std::lcm(v.period(), weight_period) : 1;
}

// Multiplies v coordinatewise by w; output is the raw layout with prefix
// length >= min_prefix.
TailParts multiply(const WeightSequence& w, const TailVector& v, std::size_t min_prefix) {
  const std::size_t J = std::max({v.prefix_length(), w.prefix.size(), min_prefix});
  TailParts parts = expand(v, J, tail_period(v, w.periodic.size()));
  for (std::size_t j = 0; j < J; ++j) parts.prefix[j] *= w.at(j + 1);
  if (parts.tail) {
    for (std::size_t s = 0; s < parts.coeffs.size(); ++s) parts.coeffs[s] *= w.at(J + 1 + s);
  }
  return parts;
}

TailVector assemble(TailParts parts) {
  return TailVector(std::move(parts.prefix), std::move(parts.coeffs),
                    parts.tail ? parts.ratio : 0.0);
}

}  // namespace

double WeightSequence::at(std::size_t j) const {
  if (j <= prefix.size()) return prefix[j - 1];
  return periodic[(j - prefix.size() - 1) % periodic.size()];
}

double WeightSequence::sup_abs() const { return sup_abs_after(0); }

double WeightSequence::sup_abs_after(std::size_t from) const {
  double m = 0.0;
  for (std::size_t j = from; j < prefix.size(); ++j) m = std::max(m, std::abs(prefix[j]));
  for (double x : periodic) m = std::max(m, std::abs(x));
  return m;
}

Operator::Operator(Variant payload) : payload_(std::move(payload)) {
  std::visit(overloaded{
                 [](const Diagonal& d) { validate(d.values, "diagonal"); },
                 [](const WeightedShift& s) { validate(s.weights, "shift"); },
                 [](const FiniteRankPlus& f) {
                   validate(f.diagonal, "finite_rank_plus");
                   validate_square(f.block, "finite_rank_plus block");
                 },
                 [](const DenseMatrix& d) { validate_square(d.matrix, "dense matrix"); },
             },
             payload_);
}

Operator Operator::identity() { return diagonal({}, {1.0}); }
Operator Operator::zero() { return diagonal({}, {0.0}); }

Operator Operator::diagonal(std::vector<double> prefix, std::vector<double> periodic) {
  return Operator(Diagonal{WeightSequence{std::move(prefix), std::move(periodic)}});
}

Operator Operator::shift(std::vector<double> prefix, std::vector<double> periodic) {
  return Operator(WeightedShift{WeightSequence{std::move(prefix), std::move(periodic)}});
}

Operator Operator::finite_rank_plus(Eigen::MatrixXd block, std::vector<double> prefix,
                                    std::vector<double> periodic) {
  return Operator(
      FiniteRankPlus{std::move(block), WeightSequence{std::move(prefix), std::move(periodic)}});
}

Operator Operator::dense(Eigen::MatrixXd matrix) { return Operator(DenseMatrix{std::move(matrix)}); }

std::string_view Operator::kind() const noexcept {
  return std::visit(overloaded{
                        [](const Diagonal&) { return std::string_view("diagonal"); },
                        [](const WeightedShift&) { return std::string_view("shift"); },
                        [](const FiniteRankPlus&) { return std::string_view("finite_rank_plus"); },
                        [](const DenseMatrix&) { return std::string_view("dense"); },
                    },
                    payload_);
}

std::vector<double> Operator::diagonal_entries(std::size_t N) const {
  std::vector<double> d(N, 0.0);
  const bool ok = std::visit(
      overloaded{
          [&](const Diagonal& op) {
            for (std::size_t j = 0; j < N; ++j) d[j] = op.values.at(j + 1);
            return true;
          },
          [&](const WeightedShift& op) {
            // only the zero shift is diagonal
            return op.weights.sup_abs() == 0.0;
          },
          [&](const FiniteRankPlus& op) {
            const Eigen::MatrixXd& b = op.block;
            if (!(b - Eigen::MatrixXd(b.diagonal().asDiagonal())).isZero(0.0)) return false;
            for (std::size_t j = 0; j < N; ++j) {
              d[j] = op.diagonal.at(j + 1);
              if (static_cast<Eigen::Index>(j) < b.rows()) d[j] += b(static_cast<Eigen::Index>(j),
                                                                     static_cast<Eigen::Index>(j));
            }
            return true;
          },
          [&](const DenseMatrix& op) {
            const Eigen::MatrixXd& m = op.matrix;
            if (!(m - Eigen::MatrixXd(m.diagonal().asDiagonal())).isZero(0.0)) return false;
            for (std::size_t j = 0; j < N && static_cast<Eigen::Index>(j) < m.rows(); ++j) {
              d[j] = m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
            }
            return true;
          },
      },
      payload_);
  if (!ok) return {};
  return d;
}

TailVector apply(const Operator& T, const TailVector& v) {
  return std::visit(
      overloaded{
          [&](const Diagonal& op) { return assemble(multiply(op.values, v, 0)); },
          [&](const WeightedShift& op) {
            TailParts parts = multiply(op.weights, v, 0);
            parts.prefix.insert(parts.prefix.begin(), 0.0);
            return assemble(std::move(parts));
          },
          [&](const FiniteRankPlus& op) {
            const auto B = static_cast<std::size_t>(op.block.rows());
            TailParts parts = multiply(op.diagonal, v, B);
            Eigen::VectorXd head(op.block.rows());
            for (std::size_t j = 0; j < B; ++j) head(static_cast<Eigen::Index>(j)) = v.at(j + 1);
            const Eigen::VectorXd image = op.block * head;
            for (std::size_t i = 0; i < B; ++i) parts.prefix[i] += image(static_cast<Eigen::Index>(i));
            return assemble(std::move(parts));
          },
          [&](const DenseMatrix& op) {
            const auto N = static_cast<std::size_t>(op.matrix.rows());
            Eigen::VectorXd x(op.matrix.rows());
            for (std::size_t j = 0; j < N; ++j) x(static_cast<Eigen::Index>(j)) = v.at(j + 1);
            const Eigen::VectorXd y = op.matrix * x;
            return TailVector(std::vector<double>(y.data(), y.data() + y.size()));
          },
      },
      T.payload());
}

NormBracket operator_norm_bracket(const Operator& T, SpaceConfig space) {
  return std::visit(
      overloaded{
          [](const Diagonal& op) {
            const double s = op.values.sup_abs();
            return NormBracket{s, s};
          },
          [](const WeightedShift& op) {
            const double s = op.weights.sup_abs();
            return NormBracket{s, s};
          },
          [&](const FiniteRankPlus& op) {
            // T splits as (block + D_head) on 1..B and D on the rest.
            const Eigen::Index B = op.block.rows();
            Eigen::MatrixXd head = op.block;
            for (Eigen::Index j = 0; j < B; ++j) head(j, j) += op.diagonal.at(static_cast<std::size_t>(j) + 1);
            const double exact = std::max(matrix_norm(head, space.p),
                                          op.diagonal.sup_abs_after(static_cast<std::size_t>(B)));
            return NormBracket{exact, exact};
          },
          [&](const DenseMatrix& op) {
            const double s = matrix_norm(op.matrix, space.p);
            return NormBracket{s, s};
          },
      },
      T.payload());
}

double operator_norm(const Operator& T, SpaceConfig space) {
  return operator_norm_bracket(T, space).upper;
}

Eigen::MatrixXd truncate_operator(const Operator& T, std::size_t N) {
  if (N == 0) throw Error(ErrorCode::bad_dimensions, "truncation dimension must be >= 1");
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  if (const auto* dense = std::get_if<DenseMatrix>(&T.payload())) {
    const Eigen::Index k = std::min(n, dense->matrix.rows());
    m.topLeftCorner(k, k) = dense->matrix.topLeftCorner(k, k);
    return m;
  }
  for (std::size_t j = 1; j <= N; ++j) {
    const TailVector image = apply(T, TailVector::unit(j));
    for (std::size_t i = 1; i <= N; ++i) {
      m(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) = image.at(i);
    }
  }
  return m;
}

RestrictedOperatorData restrict_to(const Operator& T, const Subspace& M) {
  if (M.ambient().p != Exponent::two) {
    throw Error(ErrorCode::invalid_argument, "restricted norms are defined for p = 2 only");
  }
  std::vector<TailVector> images;
  images.reserve(M.dimension());
  for (const auto& b : M.basis()) images.push_back(apply(T, b));
  Eigen::MatrixXd gM = gram(M.basis());
  if (!is_positive_definite(gM)) {
    throw Error(ErrorCode::degenerate_basis, "Gram matrix of the basis is not positive definite");
  }
  return RestrictedOperatorData{M, std::move(gM), gram(images)};
}

std::vector<double> restricted_singular_values(const RestrictedOperatorData& data) {
  const Eigen::LLT<Eigen::MatrixXd> llt(data.gram_M);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::degenerate_basis, "Cholesky factorization of the Gram matrix failed");
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd half = L.triangularView<Eigen::Lower>().solve(data.gram_TM);
  Eigen::MatrixXd reduced = L.triangularView<Eigen::Lower>().solve(half.transpose());
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced, Eigen::EigenvaluesOnly);
  std::vector<double> sv(static_cast<std::size_t>(eig.eigenvalues().size()));
  for (std::size_t i = 0; i < sv.size(); ++i) {
    sv[i] = std::sqrt(std::max(0.0, eig.eigenvalues()(static_cast<Eigen::Index>(i))));
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

std::vector<double> restricted_singular_values(const Operator& T, const Subspace& M) {
  return restricted_singular_values(restrict_to(T, M));
}

double restricted_norm(const Operator& T, const Subspace& M) {
  return restricted_singular_values(T, M).front();
}

double restricted_min_modulus(const Operator& T, const Subspace& M) {
  return restricted_singular_values(T, M).back();
}

}  // namespace opquant
