// Matrix Jacobi fields along transport geodesics, the adapted moving frame
// of the evolving tangent planes, the operators U = B' B^{-1} with their
// tangential/normal split, the correction profile kappa, and the Riccati
// trace identity used as the module's correctness metric.

#pragma once

#include "curvot/distortion.hpp"
#include "curvot/manifold.hpp"

#include <vector>

namespace curvot {

// B(t): n x p Jacobi block in components of a parallel orthonormal ambient
// frame (so the ambient Gram is the identity and covariant derivatives are
// plain d/dt). Fine-grid sampling matches GeodesicPath.
struct JacobiFrame {
  GeodesicPath path;
  FrameField frame;  // ambient parallel frame, chart components, n x n
  int p = 0;
  std::vector<Mat> B;
  std::vector<Mat> Bdot;
  std::vector<Mat> adapted;  // E(t), frame components, n x p, orthonormal
  bool selfadjoint_initial = false;

  int samples() const { return path.samples; }
  int fine_count() const { return path.fine_count(); }
  double speed() const { return path.speed; }
};

// Propagates B'' = -R(t) B from the path anchor. B0 and B0dot are given in
// chart components at the anchor point (columns = initial Jacobi data).
// Throws DegenerateFrameError if B loses rank at any sample.
JacobiFrame propagate(const ChartManifold& M, const GeodesicPath& path, const Mat& B0,
                      const Mat& B0dot);

struct AdaptedFrame {
  std::vector<Mat> E;  // frame components, n x p
};

// Orthonormal basis of span B(t) with vanishing tangential derivative.
AdaptedFrame adapted_frame(const JacobiFrame& jf);

struct TransportOperators {
  int p = 0;
  std::vector<Mat> Utop;           // p x p blocks in the adapted basis
  std::vector<Mat> Uperp;          // (n-p) x p blocks in a normal completion
  std::vector<double> perp_norm2;  // squared Frobenius norm of U^perp
  std::vector<double> trU;         // trace of U^top
  double max_condition = 0.0;
  bool conditioning_warning = false;
};

TransportOperators operators(const JacobiFrame& jf, const AdaptedFrame& af);

// kappa_gamma sampled on [0, theta]; values[j] = |U^perp|^2(t_j) / theta^2.
struct KappaProfile {
  double speed = 0.0;
  std::vector<double> values;      // kappa at s = speed * t_j (fine grid)
  std::vector<double> perp_norm2;  // |U^perp|^2(t_j) = kappa(theta t) theta^2

  KappaFunction as_function() const;
};

KappaProfile kappa_profile(const TransportOperators& ops, double speed);

// log of the p-dimensional Jacobian sqrt(det B^T B) at a fine sample.
double logdet(const JacobiFrame& jf, int fine_idx);

// sqrt(det B^T B) at every fine sample.
std::vector<double> jacobian_series(const JacobiFrame& jf);

// (tr U^top)' + tr((U^top)^2) + ric_p(span E, gamma') - |U^perp|^2 at an
// interior grid index; the trace derivative uses central differences on the
// sample grid.
double riccati_residual(const ChartManifold& M, const JacobiFrame& jf, const AdaptedFrame& af,
                        const TransportOperators& ops, int grid_idx);

// Frobenius norm of U^top - (U^top)^T at a fine sample.
double selfadjoint_defect(const TransportOperators& ops, int fine_idx);

// Max norm of B'' + R(t)B over interior fine samples (fourth-order stencil);
// diagnostic for the integration quality.
double jacobi_ode_residual(const ChartManifold& M, const JacobiFrame& jf);

}  // namespace curvot
