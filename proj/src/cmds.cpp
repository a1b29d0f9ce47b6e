#include "nsmds/cmds.hpp"

#include "nsmds/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsmds {

namespace {

constexpr double kGapDegenerate = 1e-8;

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

}  // namespace

SpectralDecomposition symmetric_eig(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 1) throw InvalidInput("symmetric_eig: matrix must be square and non-empty");
  if (!matrix.allFinite()) throw InvalidInput("symmetric_eig: non-finite entries");
  const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw DegenerateConfiguration("symmetric_eig: eigensolver did not converge");
  const Eigen::Index n = sym.rows();
  SpectralDecomposition out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = es.eigenvectors().rowwise().reverse();
  for (Eigen::Index c = 0; c < n; ++c) fix_sign(out.eigenvectors.col(c));
  return out;
}

Embedding cmds_embed(const SquaredDistanceMatrix& sdm, Index k) {
  if (k < 1) throw InvalidInput("cmds_embed: k must be positive");
  if (k > sdm.size()) throw InvalidInput("cmds_embed: k exceeds the number of points");
  const Eigen::MatrixXd gram = gram_from_sdm(sdm);
  const SpectralDecomposition eig = symmetric_eig(gram);
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd coords(kk, gram.rows());
  Index clamped = 0;
  for (Eigen::Index i = 0; i < kk; ++i) {
    double lambda = eig.eigenvalues[i];
    if (lambda < 0.0) {
      ++clamped;
      lambda = 0.0;
    }
    coords.row(i) = std::sqrt(lambda) * eig.eigenvectors.col(i).transpose();
  }
  return {PointCloud(std::move(coords)), eig.eigenvalues.head(kk), clamped};
}

double gershgorin_bound(const Eigen::MatrixXd& matrix) {
  if (matrix.size() == 0) return 0.0;
  return matrix.cwiseAbs().colwise().sum().maxCoeff();
}

double spectral_norm_power(const Eigen::MatrixXd& matrix, double tol, int max_iter) {
  if (matrix.size() == 0) return 0.0;
  const Eigen::MatrixXd ata = matrix.transpose() * matrix;
  const Eigen::Index n = ata.rows();
  // Deterministic start with no special alignment to any axis.
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  x.normalize();
  double estimate = x.dot(ata * x);
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = ata * x;
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    const double next = x.dot(ata * x);
    const bool done = std::abs(next - estimate) <= tol * std::abs(next);
    estimate = next;
    if (done) break;
  }
  return std::sqrt(std::max(0.0, estimate));
}

double spectral_gap(const Eigen::VectorXd& eigenvalues, Index k) {
  const auto n = static_cast<Index>(eigenvalues.size());
  if (k < 1 || k > n) throw InvalidInput("spectral_gap: k out of range");
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i + 1 < k; ++i) {
    gap = std::min(gap, eigenvalues[static_cast<Eigen::Index>(i)] - eigenvalues[static_cast<Eigen::Index>(i + 1)]);
  }
  const double tail = k < n ? eigenvalues[static_cast<Eigen::Index>(k)] : 0.0;
  gap = std::min(gap, eigenvalues[static_cast<Eigen::Index>(k - 1)] - tail);
  return std::max(0.0, gap);
}

double theory_error_envelope(const ScaleParams& pi, double sigma_max, double radius, Index k, Index n, double zeta,
                             double prefactor) {
  if (pi.degenerate || pi.j_val <= 0.0 || pi.g_val <= 0.0) throw InvalidInput("theory_error_envelope: degenerate scale parameters");
  if (!(zeta > 0.0 && zeta < 0.5)) throw InvalidInput("theory_error_envelope: zeta must lie in (0, 1/2)");
  if (n < 1 || k < 1) throw InvalidInput("theory_error_envelope: n and k must be positive");
  const double shape = std::sqrt(1.0 / (4.0 * pi.j_val * pi.j_val) + 8.0 * pi.h_val / (pi.g_val * pi.g_val));
  return prefactor * sigma_max * radius * static_cast<double>(k) / std::pow(static_cast<double>(n), zeta) * shape;
}

PerturbationReport eigen_perturbation_report(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& perturbed, Index k) {
  if (reference.rows() != perturbed.rows() || reference.cols() != perturbed.cols()) {
    throw InvalidInput("eigen_perturbation_report: size mismatch");
  }
  if (k < 1 || k > static_cast<Index>(reference.rows())) throw InvalidInput("eigen_perturbation_report: k out of range");
  const Eigen::MatrixXd g = 0.5 * (reference + reference.transpose());
  const Eigen::MatrixXd gt = 0.5 * (perturbed + perturbed.transpose());
  const Eigen::MatrixXd e = gt - g;

  const SpectralDecomposition base = symmetric_eig(g);
  const SpectralDecomposition pert = symmetric_eig(gt);

  PerturbationReport out;
  // E is symmetric, so ||E||_2 is its largest |eigenvalue|.
  const Eigen::VectorXd e_eigs = symmetric_eig(e).eigenvalues;
  out.e2norm = std::max(std::abs(e_eigs[0]), std::abs(e_eigs[e_eigs.size() - 1]));
  out.diagnostics.spectral_gap = spectral_gap(base.eigenvalues, k);
  out.diagnostics.gershgorin_radius = gershgorin_bound(e);
  out.diagnostics.perturbation_2norm_bound = std::min(out.diagnostics.gershgorin_radius, e.norm());

  out.weyl_holds = true;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const double delta = std::abs(pert.eigenvalues[i] - base.eigenvalues[i]);
    out.eigenvalue_deltas.push_back(delta);
    if (delta > out.e2norm + 1e-8) out.weyl_holds = false;
  }

  out.gap_degenerate = out.diagnostics.spectral_gap < kGapDegenerate;
  if (out.gap_degenerate) return out;

  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) {
    Eigen::VectorXd u = pert.eigenvectors.col(i);
    if (u.dot(base.eigenvectors.col(i)) < 0.0) u = -u;
    out.eigenvector_deltas.push_back((u - base.eigenvectors.col(i)).norm());
  }
  out.davis_kahan_bound = 2.0 * std::sqrt(2.0) * out.e2norm / out.diagnostics.spectral_gap;
  out.davis_kahan_applicable = out.diagnostics.spectral_gap > 2.0 * out.e2norm;
  if (out.davis_kahan_applicable) {
    const double worst = *std::max_element(out.eigenvector_deltas.begin(), out.eigenvector_deltas.end());
    out.davis_kahan_holds = worst <= out.davis_kahan_bound + 1e-8;
  }
  return out;
}

}  // namespace nsmds
