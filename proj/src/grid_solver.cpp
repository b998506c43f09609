#include "freqstrat/grid_solver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace freqstrat {

namespace {

// Exact element integrals for the bilinear basis on an hx x hy rectangle,
// node order (00, 10, 01, 11): Kxx scaled by hy/hx, Kyy by hx/hy, and the
// mixed part sg[a]*ta[b]/4 (dimensionless).
const double kMxx[4][4] = {{1 / 3., -1 / 3., 1 / 6., -1 / 6.},
                           {-1 / 3., 1 / 3., -1 / 6., 1 / 6.},
                           {1 / 6., -1 / 6., 1 / 3., -1 / 3.},
                           {-1 / 6., 1 / 6., -1 / 3., 1 / 3.}};
const double kMyy[4][4] = {{1 / 3., 1 / 6., -1 / 3., -1 / 6.},
                           {1 / 6., 1 / 3., -1 / 6., -1 / 3.},
                           {-1 / 3., -1 / 6., 1 / 3., 1 / 6.},
                           {-1 / 6., -1 / 3., 1 / 6., 1 / 3.}};
const double kSg[4] = {-1, 1, -1, 1};
const double kTa[4] = {-1, -1, 1, 1};

class GridField : public HarmonicField {
public:
  GridField(GraphDomain domain, int nx, int ny, double L, double Lt,
            std::vector<double> w)
      : domain_(std::move(domain)), nx_(nx), ny_(ny), L_(L), Lt_(Lt),
        hx_(2.0 * L / nx), hy_(Lt / ny), w_(std::move(w)) {
    // node gradients: centered inside, one-sided second order on the edges
    const int sx = nx_ + 1, sy = ny_ + 1;
    gx_.assign(w_.size(), 0.0);
    gy_.assign(w_.size(), 0.0);
    auto W = [&](int i, int j) { return w_[j * sx + i]; };
    for (int j = 0; j < sy; ++j)
      for (int i = 0; i < sx; ++i) {
        double dx, dy;
        if (i == 0)
          dx = (-3.0 * W(0, j) + 4.0 * W(1, j) - W(2, j)) / (2.0 * hx_);
        else if (i == nx_)
          dx = (3.0 * W(nx_, j) - 4.0 * W(nx_ - 1, j) + W(nx_ - 2, j)) / (2.0 * hx_);
        else
          dx = (W(i + 1, j) - W(i - 1, j)) / (2.0 * hx_);
        if (j == 0)
          dy = (-3.0 * W(i, 0) + 4.0 * W(i, 1) - W(i, 2)) / (2.0 * hy_);
        else if (j == ny_)
          dy = (3.0 * W(i, ny_) - 4.0 * W(i, ny_ - 1) + W(i, ny_ - 2)) / (2.0 * hy_);
        else
          dy = (W(i, j + 1) - W(i, j - 1)) / (2.0 * hy_);
        gx_[j * sx + i] = dx;
        gy_[j * sx + i] = dy;
      }
  }

  int dim() const override { return 2; }

  double value(const Vec& X) const override {
    double xi, eta;
    int i, j;
    locate(X, i, j, xi, eta);
    return lerp(w_, i, j, xi, eta);
  }

  Vec gradient(const Vec& X) const override {
    double xi, eta;
    int i, j;
    locate(X, i, j, xi, eta);
    double wx = lerp(gx_, i, j, xi, eta);
    double wy = lerp(gy_, i, j, xi, eta);
    double dphi = domain_.grad_phi(Vec::Constant(1, X(0)))(0);
    Vec g(2);
    g(0) = wx - dphi * wy;
    g(1) = wy;
    return g;
  }

  std::string describe() const override {
    std::ostringstream os;
    os << "grid_solution(" << nx_ << ")";
    return os.str();
  }

private:
  void locate(const Vec& X, int& i, int& j, double& xi, double& eta) const {
    double x = X(0);
    double y = X(1) - domain_.phi(Vec::Constant(1, x));
    double eps = 1e-9 * (1.0 + X.norm());
    if (x < -L_ - eps || x > L_ + eps || y < -eps || y > Lt_ + eps)
      throw std::domain_error("grid field: point outside the solve box");
    x = std::min(std::max(x, -L_), L_);
    y = std::min(std::max(y, 0.0), Lt_);
    double s = (x + L_) / hx_, t = y / hy_;
    i = std::min(int(s), nx_ - 1);
    j = std::min(int(t), ny_ - 1);
    xi = s - i;
    eta = t - j;
  }

  double lerp(const std::vector<double>& a, int i, int j, double xi, double eta) const {
    const int sx = nx_ + 1;
    double a00 = a[j * sx + i], a10 = a[j * sx + i + 1];
    double a01 = a[(j + 1) * sx + i], a11 = a[(j + 1) * sx + i + 1];
    return a00 * (1 - xi) * (1 - eta) + a10 * xi * (1 - eta) + a01 * (1 - xi) * eta +
           a11 * xi * eta;
  }

  GraphDomain domain_;
  int nx_, ny_;
  double L_, Lt_, hx_, hy_;
  std::vector<double> w_, gx_, gy_;
};

}  // namespace

FieldPtr solve_dirichlet(const GraphDomain& domain, FieldPtr boundary_trace,
                         int resolution, double box_half_width, double box_height,
                         GridSolveReport* report) {
  if (domain.dim() != 2)
    throw std::invalid_argument("solve_dirichlet: graph-domain solver is 2-d only");
  if (resolution < 4) throw std::invalid_argument("solve_dirichlet: resolution too small");
  if (!(box_half_width > 0.0) || !(box_height > 0.0))
    throw std::invalid_argument("solve_dirichlet: box must have positive extent");
  const int nx = resolution, ny = resolution;
  const double L = box_half_width, Lt = box_height;
  const double hx = 2.0 * L / nx, hy = Lt / ny;
  const int sx = nx + 1;
  const size_t nn = size_t(sx) * (ny + 1);

  // per-column element stiffness (coefficients depend on x only)
  std::vector<double> K(size_t(nx) * 16);
  for (int i = 0; i < nx; ++i) {
    double xc = -L + (i + 0.5) * hx;
    double dphi = domain.grad_phi(Vec::Constant(1, xc))(0);
    double q = 1.0 + dphi * dphi, m = -dphi;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        K[size_t(i) * 16 + a * 4 + b] = (hy / hx) * kMxx[a][b] +
                                        q * (hx / hy) * kMyy[a][b] +
                                        m * (kSg[a] * kTa[b] + kSg[b] * kTa[a]) / 4.0;
  }

  auto is_boundary = [&](int i, int j) { return i == 0 || i == nx || j == 0 || j == ny; };

  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double* Ke = &K[size_t(i) * 16];
        int n0 = j * sx + i, n1 = n0 + 1, n2 = n0 + sx, n3 = n2 + 1;
        double x0 = x[n0], x1 = x[n1], x2 = x[n2], x3 = x[n3];
        y[n0] += Ke[0] * x0 + Ke[1] * x1 + Ke[2] * x2 + Ke[3] * x3;
        y[n1] += Ke[4] * x0 + Ke[5] * x1 + Ke[6] * x2 + Ke[7] * x3;
        y[n2] += Ke[8] * x0 + Ke[9] * x1 + Ke[10] * x2 + Ke[11] * x3;
        y[n3] += Ke[12] * x0 + Ke[13] * x1 + Ke[14] * x2 + Ke[15] * x3;
      }
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        if (is_boundary(i, j)) y[j * sx + i] = 0.0;
  };

  // boundary extension: zero on the bottom, trace(unflatten(.)) elsewhere
  std::vector<double> wb(nn, 0.0);
  double trace_violation = 0.0;
  Vec P(2);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      if (!is_boundary(i, j)) continue;
      double x = -L + i * hx, y = j * hy;
      P(0) = x;
      P(1) = y + domain.phi(Vec::Constant(1, x));
      if (j == 0) {
        trace_violation = std::max(trace_violation, std::abs(boundary_trace->value(P)));
        continue;  // wb = 0 on the graph
      }
      wb[j * sx + i] = boundary_trace->value(P);
    }

  std::vector<double> b(nn), z(nn, 0.0), r(nn), p(nn), Ap(nn);
  apply(wb, b);
  for (auto& v : b) v = -v;

  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
    return s;
  };

  r = b;
  p = r;
  double rs = dot(r, r);
  const double nb = std::sqrt(rs);
  int it = 0;
  const int cap = 200 * resolution;
  if (nb > 0.0) {
    for (; it < cap; ++it) {
      apply(p, Ap);
      double alpha = rs / dot(p, Ap);
      for (size_t k = 0; k < nn; ++k) {
        z[k] += alpha * p[k];
        r[k] -= alpha * Ap[k];
      }
      double rs2 = dot(r, r);
      if (std::sqrt(rs2) <= 1e-10 * nb) {
        rs = rs2;
        ++it;
        break;
      }
      double beta = rs2 / rs;
      rs = rs2;
      for (size_t k = 0; k < nn; ++k) p[k] = r[k] + beta * p[k];
    }
  }

  std::vector<double> w(nn);
  for (size_t k = 0; k < nn; ++k) w[k] = z[k] + wb[k];

  if (report) {
    report->iterations = it;
    report->residual = nb > 0.0 ? std::sqrt(rs) / nb : 0.0;
    report->trace_violation = trace_violation;
  }
  return std::make_shared<GridField>(domain, nx, ny, L, Lt, std::move(w));
}

}  // namespace freqstrat
