#pragma once

// Classical MDS and the spectral quantities used to reason about its
// stability: eigendecomposition, Gershgorin bound, spectral gap, Weyl and
// eigenvector perturbation checks, and the large-n error envelope.

#include "nsmds/core.hpp"

#include <vector>

namespace nsmds {

/// Eigenpairs in descending eigenvalue order. Each eigenvector is scaled so
/// its largest-magnitude entry (first one on ties) is nonnegative.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues[i]
};

struct Embedding {
  PointCloud cloud;                    // k x n, row i = sqrt(lambda_i+) u_i
  Eigen::VectorXd top_eigenvalues;     // the k chosen eigenvalues before clamping
  Index clamped = 0;                   // how many of them were negative
};

struct SpectralDiagnostics {
  double spectral_gap = 0.0;               // gamma_0 of the reference matrix
  double gershgorin_radius = 0.0;          // max_j sum_i |E_ij|
  double perturbation_2norm_bound = 0.0;   // min(Gershgorin, Frobenius) >= ||E||_2
};

struct PerturbationReport {
  SpectralDiagnostics diagnostics;
  double e2norm = 0.0;
  std::vector<double> eigenvalue_deltas;   // |lambda~_i - lambda_i| for every i
  std::vector<double> eigenvector_deltas;  // ||u~_i - u_i|| after sign alignment, i < k
  bool gap_degenerate = false;             // a relevant gap fell below 1e-8
  bool weyl_holds = false;
  bool davis_kahan_applicable = false;     // gamma_0 > 2 ||E||_2 and not gap-degenerate
  bool davis_kahan_holds = true;           // vacuously true when not applicable
  double davis_kahan_bound = 0.0;          // 2 sqrt(2) ||E||_2 / gamma_0
};

[[nodiscard]] SpectralDecomposition symmetric_eig(const Eigen::MatrixXd& matrix);

/// Full cMDS: double centering, eigendecomposition, top-k embedding with
/// negative eigenvalues clamped to zero.
[[nodiscard]] Embedding cmds_embed(const SquaredDistanceMatrix& sdm, Index k);

[[nodiscard]] double gershgorin_bound(const Eigen::MatrixXd& matrix);

/// Largest singular value by power iteration on A^T A (relative tolerance
/// `tol`, at most `max_iter` steps).
[[nodiscard]] double spectral_norm_power(const Eigen::MatrixXd& matrix, double tol = 1e-10, int max_iter = 1000);

/// min of the consecutive gaps lambda_i - lambda_{i+1} for i = 1..k, where
/// lambda_{k+1} is the next eigenvalue (or 0 when k = n).
[[nodiscard]] double spectral_gap(const Eigen::VectorXd& descending_eigenvalues, Index k);

/// (prefactor * sigma_M * r * k / n^zeta) * sqrt(1/(4 j^2) + 8 h / g^2).
/// Reporting aid only: the asymptotic theory does not pin the prefactor.
[[nodiscard]] double theory_error_envelope(const ScaleParams& pi, double sigma_max, double radius, Index k, Index n,
                                           double zeta, double prefactor = 1.0);

/// Compares the spectra of G and G~ = G + E along the top k axes, matched by
/// descending order.
[[nodiscard]] PerturbationReport eigen_perturbation_report(const Eigen::MatrixXd& reference,
                                                           const Eigen::MatrixXd& perturbed, Index k);

}  // namespace nsmds
