#include "curvot/jacobi.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace curvot {

namespace {

// Q factor of a thin QR with positive diagonal, for deterministic signs.
Mat thin_q(const Mat& A) {
  Eigen::HouseholderQR<Mat> qr(A);
  Mat Q = qr.householderQ() * Mat::Identity(A.rows(), A.cols());
  Mat R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
  for (int c = 0; c < A.cols(); ++c)
    if (R(c, c) < 0) Q.col(c) = -Q.col(c);
  return Q;
}

}  // namespace

JacobiFrame propagate(const ChartManifold& M, const GeodesicPath& path, const Mat& B0,
                      const Mat& B0dot) {
  const int n = M.dim();
  const int p = static_cast<int>(B0.cols());
  if (B0.rows() != n || B0dot.rows() != n || B0dot.cols() != p)
    throw Error("propagate: inconsistent block shapes");

  const Vec& x0 = path.pos_at(path.anchor);
  const Vec& v0 = path.vel_at(path.anchor);
  Mat g0 = M.metric(x0);

  // Ambient parallel frame seeded from the chart basis at the anchor.
  Mat frame0 = M.orthonormalize(x0, Mat::Identity(n, n));

  // Chart components -> frame components: E0^{-1} = E0^T g.
  Mat to_frame = frame0.transpose() * g0;
  Mat Bf = to_frame * B0;
  Mat Bdf = to_frame * B0dot;

  {
    Eigen::JacobiSVD<Mat> svd(Bf);
    if (svd.rank() < p || svd.singularValues()(p - 1) < 1e-12)
      throw DegenerateFrameError("propagate: initial block is rank deficient",
                                 path.grid_time(path.anchor));
  }

  Mat adapted0 = thin_q(Bf);

  auto st = detail::integrate_coupled(M, x0, v0, path.anchor, path.samples, &frame0, &Bf, &Bdf,
                                      &adapted0);

  JacobiFrame jf;
  jf.path = path;
  jf.frame.E = std::move(st.frame);
  jf.p = p;
  jf.B = std::move(st.B);
  jf.Bdot = std::move(st.Bdot);
  jf.adapted = std::move(st.adapted);

  // Self-adjointness of the tangential initial derivative, <B0dot_i, B0_j>.
  Mat S = B0dot.transpose() * g0 * B0;
  jf.selfadjoint_initial = (S - S.transpose()).cwiseAbs().maxCoeff() <=
                           1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff());

  // Non-degeneracy at every sample.
  for (int j = 0; j < jf.fine_count(); ++j) {
    Eigen::JacobiSVD<Mat> svd(jf.B[j]);
    double smin = svd.singularValues()(p - 1);
    double smax = svd.singularValues()(0);
    if (!(smin > 1e-10 * std::max(1.0, smax)))
      throw DegenerateFrameError("propagate: Jacobi block lost rank",
                                 path.fine_time(j));
  }
  return jf;
}

AdaptedFrame adapted_frame(const JacobiFrame& jf) {
  if (jf.adapted.empty()) throw Error("adapted_frame: frame was not propagated");
  AdaptedFrame af;
  af.E = jf.adapted;
  return af;
}

TransportOperators operators(const JacobiFrame& jf, const AdaptedFrame& af) {
  const int fine = jf.fine_count();
  const int p = jf.p;
  const int n = static_cast<int>(jf.B.front().rows());

  TransportOperators ops;
  ops.p = p;
  ops.Utop.resize(fine);
  ops.Uperp.resize(fine);
  ops.perp_norm2.resize(fine);
  ops.trU.resize(fine);

  for (int j = 0; j < fine; ++j) {
    const Mat& B = jf.B[j];
    const Mat& E = af.E[j];
    Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double cond = svd.singularValues()(0) / svd.singularValues()(p - 1);
    ops.max_condition = std::max(ops.max_condition, cond);

    Mat C = svd.solve(E);
    Mat UE = jf.Bdot[j] * C;
    Mat Utop = E.transpose() * UE;
    Mat W = UE - E * Utop;

    ops.Utop[j] = Utop;
    ops.trU[j] = Utop.trace();
    ops.perp_norm2[j] = W.squaredNorm();
    if (n > p) {
      // Normal completion of E for the explicit block.
      Eigen::HouseholderQR<Mat> qr(E);
      Mat Qfull = qr.householderQ();
      Mat N = Qfull.rightCols(n - p);
      ops.Uperp[j] = N.transpose() * UE;
    } else {
      ops.Uperp[j] = Mat::Zero(0, p);
    }
  }
  ops.conditioning_warning = ops.max_condition > 1e10;
  return ops;
}

KappaProfile kappa_profile(const TransportOperators& ops, double speed) {
  KappaProfile k;
  k.speed = speed;
  k.perp_norm2 = ops.perp_norm2;
  k.values.assign(ops.perp_norm2.size(), 0.0);
  if (speed > 0) {
    double inv2 = 1.0 / (speed * speed);
    for (size_t j = 0; j < k.values.size(); ++j) k.values[j] = ops.perp_norm2[j] * inv2;
  }
  return k;
}

KappaFunction KappaProfile::as_function() const {
  return KappaFunction::sampled(values, speed);
}

double logdet(const JacobiFrame& jf, int fine_idx) {
  const Mat& B = jf.B[fine_idx];
  double det = (B.transpose() * B).determinant();
  if (!(det > 0)) throw DegenerateFrameError("logdet: degenerate block",
                                             jf.path.fine_time(fine_idx));
  return 0.5 * std::log(det);
}

std::vector<double> jacobian_series(const JacobiFrame& jf) {
  std::vector<double> J(jf.fine_count());
  for (int j = 0; j < jf.fine_count(); ++j) J[j] = std::exp(logdet(jf, j));
  return J;
}

double riccati_residual(const ChartManifold& M, const JacobiFrame& jf, const AdaptedFrame& af,
                        const TransportOperators& ops, int grid_idx) {
  const int S = jf.samples();
  if (grid_idx <= 0 || grid_idx >= S - 1)
    throw Error("riccati_residual: interior grid index required");
  const double h = 1.0 / (S - 1);
  const int j = 2 * grid_idx;

  double dtr = (ops.trU[j + 2] - ops.trU[j - 2]) / (2 * h);
  double tr2 = (ops.Utop[j] * ops.Utop[j]).trace();

  Mat Echart = jf.frame.E[j] * af.E[j];
  double ric = M.ricci_p(jf.path.pos[j], Echart, jf.path.vel[j]);
  return dtr + tr2 + ric - ops.perp_norm2[j];
}

double selfadjoint_defect(const TransportOperators& ops, int fine_idx) {
  const Mat& U = ops.Utop[fine_idx];
  return (U - U.transpose()).norm();
}

double jacobi_ode_residual(const ChartManifold& M, const JacobiFrame& jf) {
  const int fine = jf.fine_count();
  const double hf = 1.0 / (fine - 1);
  double worst = 0.0;
  for (int j = 2; j < fine - 2; ++j) {
    Mat d2 = (-jf.B[j - 2] + 16 * jf.B[j - 1] - 30 * jf.B[j] + 16 * jf.B[j + 1] - jf.B[j + 2]) /
             (12 * hf * hf);
    Mat A = M.jacobi_operator(jf.path.pos[j], jf.path.vel[j], jf.frame.E[j]);
    worst = std::max(worst, (d2 + A * jf.B[j]).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace curvot
