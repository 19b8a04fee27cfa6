#include "cbi/matops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cbi/error.hpp"

namespace cbi {

namespace {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols())
    throw Error(Errc::dimension_mismatch, std::string(what) + ": matrix must be square");
  if (!a.allFinite()) throw Error(Errc::invalid_argument, std::string(what) + ": matrix has non-finite entries");
}

constexpr double kPade13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                              1187353796428800.0,  129060195264000.0,   10559470521600.0,
                              670442572800.0,      33522128640.0,       1323241920.0,
                              40840800.0,          960960.0,            16380.0,
                              182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix mat_exp(const Matrix& a_in, double t) {
  require_square(a_in, "mat_exp");
  if (!std::isfinite(t)) throw Error(Errc::invalid_argument, "mat_exp: t must be finite");
  const Eigen::Index d = a_in.rows();
  const Matrix ident = Matrix::Identity(d, d);
  Matrix a = t * a_in;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1)) throw Error(Errc::numeric_range, "mat_exp: t*A overflows");
  if (norm1 == 0.0) return ident;

  int s = 0;
  if (norm1 > kTheta13) s = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  if (s > 0) a /= std::ldexp(1.0, s);

  const auto& b = kPade13;
  const Matrix a2 = a * a, a4 = a2 * a2, a6 = a4 * a2;
  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
  const Matrix u = a * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  if (!r.allFinite()) throw Error(Errc::numeric_range, "mat_exp: result overflows double range");
  return r;
}

SpectralSummary spectral(const Matrix& a) {
  require_square(a, "spectral");
  SpectralSummary out;
  if (a.rows() == 0) return out;
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw Error(Errc::solver_failure, "spectral: eigenvalue iteration did not converge");
  const auto& ev = es.eigenvalues();
  out.spectral_radius = 0.0;
  out.spectral_abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    out.eigenvalues.push_back(ev(i));
    out.spectral_radius = std::max(out.spectral_radius, std::abs(ev(i)));
    out.spectral_abscissa = std::max(out.spectral_abscissa, ev(i).real());
  }
  return out;
}

bool is_irreducible(const Matrix& a) {
  require_square(a, "is_irreducible");
  const Eigen::Index d = a.rows();
  if (d <= 1) return true;
  // reachable from vertex 0 along i->j (a(i,j) > 0) and along the reverse graph
  auto reaches_all = [&](bool reverse) {
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < d; ++j) {
        if (j == i || seen[j]) continue;
        const double w = reverse ? a(j, i) : a(i, j);
        if (w > 0.0) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reaches_all(false) && reaches_all(true);
}

namespace {

Vector null_vector(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().col(a.cols() - 1);
}

}  // namespace

PerronPair perron_pair(const Matrix& btilde, double tol) {
  require_square(btilde, "perron_pair");
  if (!is_irreducible(btilde)) throw Error(Errc::classification, "perron_pair: matrix is reducible");
  const double s = spectral(btilde).spectral_abscissa;
  if (std::abs(s) > tol)
    throw Error(Errc::classification, "perron_pair: spectral abscissa " + std::to_string(s) +
                                          " is not zero within tolerance (not critical)");
  const Eigen::Index d = btilde.rows();
  if (d == 1) return PerronPair{Vector::Ones(1), Vector::Ones(1)};
  Vector r = null_vector(btilde);
  Vector l = null_vector(btilde.transpose());
  if (r.sum() < 0.0) r = -r;
  if (l.sum() < 0.0) l = -l;
  if ((r.array() <= 0.0).any() || (l.array() <= 0.0).any())
    throw Error(Errc::classification, "perron_pair: kernel vectors are not strictly positive");
  l /= l.dot(r) / r.sum();
  r /= r.sum();
  return PerronPair{r, l};
}

Matrix exp_integral(const Matrix& a, const Matrix& m, double t, const QuadratureSpec& quad) {
  require_square(a, "exp_integral");
  if (m.rows() != a.rows() || m.cols() != a.cols())
    throw Error(Errc::dimension_mismatch, "exp_integral: M must match A");
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "exp_integral: t must be >= 0");
  gauss_legendre(quad.order);
  if (t == 0.0) return Matrix::Zero(a.rows(), a.cols());
  return integrate(
      [&](double s) -> Matrix {
        const Matrix e = mat_exp(a, s);
        return e * m * e.transpose();
      },
      0.0, t, quad);
}

Vector exp_integral(const Matrix& a, const Vector& w, double t, const QuadratureSpec& quad) {
  require_square(a, "exp_integral");
  if (w.size() != a.rows()) throw Error(Errc::dimension_mismatch, "exp_integral: w must match A");
  if (!(t >= 0.0)) throw Error(Errc::invalid_argument, "exp_integral: t must be >= 0");
  gauss_legendre(quad.order);
  if (t == 0.0) return Vector::Zero(w.size());
  return integrate([&](double s) -> Vector { return mat_exp(a, s) * w; }, 0.0, t, quad);
}

}  // namespace cbi
