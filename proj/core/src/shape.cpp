#include "heatlab/shape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "heatlab/mesh.hpp"
#include "heatlab/radial.hpp"

namespace heatlab {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

double boundary_integral(const AssembledSystem& sys, const std::vector<double>& kernel,
                         const DeformationField& v, bool absolute) {
  double acc = 0.0;
  for (int b = 0; b < sys.n_boundary(); ++b) {
    const auto& info = sys.boundary_info[b];
    const double s = v.speed(info.loop, info.theta);
    const double term = s * kernel[b];
    acc += sys.boundary_weight[b] * (absolute ? std::abs(term) : term);
  }
  return acc;
}

} // namespace

double variation_heat_content_analytic(const HeatTimeline& tl, const DeformationField& v,
                                       double t, double* quad_error) {
  if (!v.volume_projected())
    throw std::invalid_argument("deformation field must be volume-projected");
  double berr = 0.0;
  const std::vector<double> B = convolution_B(tl, t, 96, quad_error ? &berr : nullptr);
  const double val = -boundary_integral(*tl.sys, B, v, false);
  if (quad_error) {
    double wsum = 0.0;
    for (int b = 0; b < tl.sys->n_boundary(); ++b)
      wsum += tl.sys->boundary_weight[b] *
              std::abs(v.speed(tl.sys->boundary_info[b].loop, tl.sys->boundary_info[b].theta));
    *quad_error = berr * wsum;
  }
  return val;
}

Rational moment_variation_coefficient(int k, int j) {
  if (k < 1 || j < 1 || j > k) throw std::invalid_argument("coefficient indices out of range");
  // k! / ((k+1-j)! j!) in exact integer arithmetic.
  boost::multiprecision::cpp_int kf = 1, aj = 1, bj = 1;
  for (int i = 2; i <= k; ++i) kf *= i;
  for (int i = 2; i <= k + 1 - j; ++i) aj *= i;
  for (int i = 2; i <= j; ++i) bj *= i;
  return Rational(kf, aj * bj);
}

double variation_moment_analytic(const AssembledSystem& sys, const MomentTable& table,
                                 const DeformationField& v, int k) {
  if (k < 1 || k > table.K) throw std::invalid_argument("moment order exceeds the table");
  if (!v.volume_projected())
    throw std::invalid_argument("deformation field must be volume-projected");
  std::vector<double> Phi(sys.n_boundary(), 0.0);
  for (int j = 1; j <= k; ++j) {
    const double c = static_cast<double>(moment_variation_coefficient(k, j));
    const auto& fj = table.flux[j - 1];
    const auto& fk = table.flux[k - j]; // E_{k+1-j}
    for (int b = 0; b < sys.n_boundary(); ++b) Phi[b] += c * fj[b] * fk[b];
  }
  return -boundary_integral(sys, Phi, v, false);
}

double variation_scale(const AssembledSystem& sys, const std::vector<double>& kernel,
                       const DeformationField& v) {
  return boundary_integral(sys, kernel, v, true);
}

namespace {

struct FunctionalEvaluation {
  double value = 0.0;
};

double evaluate_functional(const DomainSpec& d, const Functional& f, const NumericalSetup& setup,
                           const TimeGrid* shared_grid) {
  const MeshedDomain mesh = mesh_domain(d, setup.mesh_h);
  if (f.kind == FunctionalKind::volume) return mesh_area(mesh);
  const AssembledSystem sys = assemble(mesh);
  if (f.kind == FunctionalKind::moment) {
    const MomentTable table = exit_hierarchy(sys, f.k);
    return table.T[f.k - 1];
  }
  // Heat content at fixed t: shared absolute grid ending exactly at t.
  HeatOptions opt;
  opt.record_fields = false;
  opt.record_flux = false;
  const HeatTimeline tl = solve_heat(sys, *shared_grid, opt);
  return tl.content.back();
}

} // namespace

VariationReport variation_finite_difference(const DomainSpec& d, const DeformationField& v,
                                            const Functional& f, std::vector<double> eps_list,
                                            const NumericalSetup& setup) {
  if (eps_list.empty()) throw std::invalid_argument("eps list is empty");
  std::sort(eps_list.begin(), eps_list.end(), std::greater<double>());

  VariationReport report;
  report.functional = f;

  // Shared time grid for all heat-content evaluations (keeps the time
  // discretization identical across the sweep).
  TimeGrid grid;
  const MeshedDomain base_mesh = mesh_domain(d, setup.mesh_h);
  const AssembledSystem base_sys = assemble(base_mesh);
  if (f.kind == FunctionalKind::heat_content) {
    if (!(f.t > 0.0)) throw std::invalid_argument("heat content time must be positive");
    grid = TimeGrid::geometric(setup.t_min_rel * base_sys.scale2, f.t, setup.steps_per_decade);
  }

  // Analytic side and its unsigned scale on the base domain.
  switch (f.kind) {
    case FunctionalKind::volume: {
      std::vector<double> ones(base_sys.n_boundary(), 1.0);
      report.analytic = -boundary_integral(base_sys, ones, v, false);
      report.scale = variation_scale(base_sys, ones, v);
      break;
    }
    case FunctionalKind::moment: {
      const MomentTable table = exit_hierarchy(base_sys, f.k);
      report.analytic = variation_moment_analytic(base_sys, table, v, f.k);
      std::vector<double> Phi(base_sys.n_boundary(), 0.0);
      for (int j = 1; j <= f.k; ++j) {
        const double c = static_cast<double>(moment_variation_coefficient(f.k, j));
        for (int b = 0; b < base_sys.n_boundary(); ++b)
          Phi[b] += c * table.flux[j - 1][b] * table.flux[f.k - j][b];
      }
      report.scale = variation_scale(base_sys, Phi, v);
      break;
    }
    case FunctionalKind::heat_content: {
      HeatOptions opt;
      opt.record_fields = false;
      const HeatTimeline tl = solve_heat(base_sys, grid, opt);
      report.analytic = variation_heat_content_analytic(tl, v, f.t);
      const std::vector<double> B = convolution_B(tl, f.t, setup.quad_points_B);
      report.scale = variation_scale(base_sys, B, v);
      break;
    }
  }

  for (double eps : eps_list) {
    try {
      const DomainSpec dp = perturb_domain(d, v, eps);
      const DomainSpec dm = perturb_domain(d, v, -eps);
      const double fp = evaluate_functional(dp, f, setup, &grid);
      const double fm = evaluate_functional(dm, f, setup, &grid);
      report.eps_sweep.emplace_back(eps, (fp - fm) / (2.0 * eps));
    } catch (const std::exception&) {
      // Remeshing/perturbation failure: drop this eps.
    }
  }
  if (report.eps_sweep.empty())
    throw std::runtime_error("finite differences failed at every eps");

  if (report.eps_sweep.size() == 1) {
    report.richardson = report.eps_sweep.back().second;
  } else {
    const auto& [e1, d1] = report.eps_sweep[report.eps_sweep.size() - 2]; // coarser
    const auto& [e2, d2] = report.eps_sweep.back();                        // finest
    const double r2 = (e1 / e2) * (e1 / e2);
    report.richardson = (r2 * d2 - d1) / (r2 - 1.0);
  }
  const double denom =
      std::max({std::abs(report.analytic), std::abs(report.richardson), 1e-3 * report.scale});
  report.rel_gap = std::abs(report.analytic - report.richardson) / denom;
  return report;
}

// ---------------------------------------------------------------------------
// Rellich identity
// ---------------------------------------------------------------------------

double rellich_residual(const MeshedDomain& m, const AssembledSystem& sys, const Field& phi,
                        const Vector& laplacian_data, const VectorFieldSpec& X) {
  if (phi.mesh_id != sys.mesh_id) throw std::invalid_argument("field/mesh mismatch");
  for (int b : sys.dirichlet)
    if (phi.values[b] != 0.0)
      throw std::invalid_argument("rellich_residual needs a Dirichlet field");
  if (m.chart.kind() == ChartKind::custom)
    throw std::invalid_argument("rellich_residual: custom charts lack exact Christoffels");

  static const double lam[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  double lhs = 0.0, rhs_vol = 0.0, mag = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto c = triangle_corners(m, t);
    const auto& tri = m.triangles[t];
    const double twoA = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) -
                        (c[1][1] - c[0][1]) * (c[2][0] - c[0][0]);
    const double A = 0.5 * twoA;
    const Vec2 grad_hat[3] = {
        {(c[1][1] - c[2][1]) / twoA, (c[2][0] - c[1][0]) / twoA},
        {(c[2][1] - c[0][1]) / twoA, (c[0][0] - c[2][0]) / twoA},
        {(c[0][1] - c[1][1]) / twoA, (c[1][0] - c[0][0]) / twoA}};
    // Chart gradient (covector d phi) is constant per triangle.
    Vec2 dphi{0, 0};
    for (int i = 0; i < 3; ++i) {
      dphi[0] += grad_hat[i][0] * phi.values[tri[i]];
      dphi[1] += grad_hat[i][1] * phi.values[tri[i]];
    }
    for (int q = 0; q < 3; ++q) {
      const Vec2 qp{lam[q][0] * c[0][0] + lam[q][1] * c[1][0] + lam[q][2] * c[2][0],
                    lam[q][0] * c[0][1] + lam[q][1] * c[1][1] + lam[q][2] * c[2][1]};
      const Mat2 g = m.chart.metric(qp[0], qp[1]);
      const double det = g[0] * g[3] - g[1] * g[2];
      const double sq = std::sqrt(det);
      const Mat2 gi{g[3] / det, -g[1] / det, -g[2] / det, g[0] / det};
      const double w = A / 3.0 * sq;

      const Vec2 a{gi[0] * dphi[0] + gi[1] * dphi[1], gi[2] * dphi[0] + gi[3] * dphi[1]};
      const Vec2 Xv = X.X(qp[0], qp[1]);
      const Mat2 J = X.jacobian(qp[0], qp[1]);
      const auto G = m.chart.christoffel(qp[0], qp[1]);

      // nabla X (a, a) = g_{kl} a^i (d_i X^k + Gamma^k_{ij} X^j) a^l
      double nx = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
          double cov = (i == 0 ? (k == 0 ? J[0] : J[2]) : (k == 0 ? J[1] : J[3]));
          for (int j = 0; j < 2; ++j) cov += G[k][i][j] * Xv[j];
          const double gk0 = (k == 0 ? g[0] : g[2]);
          const double gk1 = (k == 0 ? g[1] : g[3]);
          nx += a[i] * cov * (gk0 * a[0] + gk1 * a[1]);
        }
      lhs += w * 2.0 * nx;

      const double xg = Xv[0] * dphi[0] + Xv[1] * dphi[1]; // <X, grad phi>
      const double grad2 = dphi[0] * a[0] + dphi[1] * a[1];
      double lap = 0.0;
      for (int i = 0; i < 3; ++i) lap += lam[q][i] * laplacian_data[tri[i]];
      const Vec2 dlog = m.chart.grad_log_sqrt_det(qp[0], qp[1]);
      const double deltaX = -(J[0] + J[3] + Xv[0] * dlog[0] + Xv[1] * dlog[1]);
      rhs_vol += w * (2.0 * xg * lap - grad2 * deltaX);
      mag += w * (2.0 * std::abs(nx) + 2.0 * std::abs(xg * lap) + std::abs(grad2 * deltaX));
    }
  }

  // Boundary term with the recovered flux.
  const std::vector<double> flux = boundary_flux(sys, phi.values, laplacian_data);
  double rhs_bd = 0.0;
  for (int b = 0; b < sys.n_boundary(); ++b) {
    const int node = sys.dirichlet[b];
    const Vec2& p = m.nodes[node];
    const Vec2 Xv = X.X(p[0], p[1]);
    // Inner normal from the boundary traversal direction (domain on the left).
    const int loop = sys.boundary_info[b].loop;
    int next = b + 1;
    if (next >= sys.n_boundary() || sys.boundary_info[next].loop != loop) {
      next = b;
      while (next > 0 && sys.boundary_info[next - 1].loop == loop) --next;
    }
    int prev = b - 1;
    if (prev < 0 || sys.boundary_info[prev].loop != loop) {
      prev = b;
      while (prev + 1 < sys.n_boundary() && sys.boundary_info[prev + 1].loop == loop) ++prev;
    }
    Vec2 tangent{m.nodes[sys.dirichlet[next]][0] - m.nodes[sys.dirichlet[prev]][0],
                 m.nodes[sys.dirichlet[next]][1] - m.nodes[sys.dirichlet[prev]][1]};
    if (m.chart.v_period()) {
      const double per = *m.chart.v_period();
      while (tangent[1] > per / 2) tangent[1] -= per;
      while (tangent[1] < -per / 2) tangent[1] += per;
    }
    const double tn = m.chart.norm(p, tangent);
    const Vec2 unit_t{tangent[0] / tn, tangent[1] / tn};
    const Vec2 N = m.chart.rotate_ccw(p, unit_t);
    const Mat2 g = m.chart.metric(p[0], p[1]);
    const double xn = Xv[0] * (g[0] * N[0] + g[1] * N[1]) + Xv[1] * (g[2] * N[0] + g[3] * N[1]);
    rhs_bd += sys.boundary_weight[b] * xn * flux[b] * flux[b];
    mag += sys.boundary_weight[b] * std::abs(xn) * flux[b] * flux[b];
  }
  const double rhs = rhs_vol - rhs_bd;
  // Normalize by the largest term magnitude.  When every signed term nearly
  // cancels (the identity degenerates to 0 = 0) fall back to a fraction of
  // the unsigned integrand mass so the residual measures noise against the
  // problem scale rather than against itself.
  double scale = std::max({std::abs(lhs), std::abs(rhs_vol), std::abs(rhs_bd), 1e-300});
  scale = std::max(scale, 0.05 * mag);
  return std::abs(lhs - rhs) / scale;
}

// ---------------------------------------------------------------------------
// Constant flow property
// ---------------------------------------------------------------------------

CfpVerdict cfp_test(const DomainSpec& d, const CfpConfig& cfg) {
  const MeshedDomain mesh = mesh_domain(d, cfg.mesh_h);
  const AssembledSystem sys = assemble(mesh);

  CfpVerdict verdict;
  verdict.area = sys.area;
  for (double rel : cfg.t_samples_rel) verdict.t_samples.push_back(rel * sys.scale2);
  const double t_max = verdict.t_samples.back() * 1.3;

  HeatOptions opt;
  const TimeGrid grid = TimeGrid::geometric(1e-5 * sys.scale2, t_max, cfg.steps_per_decade);
  const HeatTimeline tl = solve_heat(sys, grid, opt);

  for (double t : verdict.t_samples) {
    // Flux uniformity at the nearest grid time.
    std::size_t j = 1;
    for (std::size_t jj = 1; jj < tl.times.size(); ++jj)
      if (std::abs(std::log(tl.times[jj] / t)) < std::abs(std::log(tl.times[j] / t))) j = jj;
    const FluxStats fs = flux_statistics(sys, tl.flux[j]);
    verdict.cv_flux_per_t.push_back(fs.cv);
    verdict.max_cv_flux = std::max(verdict.max_cv_flux, fs.cv);

    const std::vector<double> B = convolution_B(tl, t, cfg.quad_points_B);
    const FluxStats bs = flux_statistics(sys, B);
    verdict.cv_B_per_t.push_back(bs.cv);
    verdict.max_cv_B = std::max(verdict.max_cv_B, bs.cv);
  }

  // Zero-boundary-mean harmonic basis: boundary Fourier modes per loop,
  // harmonically extended, constants removed.
  DirichletSolver solver(sys);
  int nloops = 0;
  for (const auto& b : sys.boundary_info) nloops = std::max(nloops, b.loop + 1);
  double wtot = 0.0;
  for (double w : sys.boundary_weight) wtot += w;
  for (int loop = 0; loop < nloops; ++loop) {
    for (int mode = 1; mode <= cfg.harmonic_modes; ++mode) {
      for (bool use_sin : {false, true}) {
        std::vector<double> bdata(sys.n_boundary(), 0.0);
        for (int b = 0; b < sys.n_boundary(); ++b) {
          if (sys.boundary_info[b].loop != loop) continue;
          const double th = sys.boundary_info[b].theta;
          bdata[b] = use_sin ? std::sin(mode * th) : std::cos(mode * th);
        }
        double mean = 0.0;
        for (int b = 0; b < sys.n_boundary(); ++b) mean += sys.boundary_weight[b] * bdata[b];
        mean /= wtot;
        double sup = 0.0;
        for (auto& x : bdata) {
          x -= mean;
          sup = std::max(sup, std::abs(x));
        }
        if (sup < 1e-12) continue;
        for (auto& x : bdata) x /= sup;
        const Field phi = solver.harmonic_extension(bdata);
        const std::vector<double> Hphi = weighted_content(tl, phi.values);
        for (std::size_t j = 1; j < Hphi.size(); ++j)
          verdict.hphi_max = std::max(verdict.hphi_max, std::abs(Hphi[j]));
      }
    }
  }

  verdict.is_cfp = verdict.max_cv_flux <= cfg.cv_threshold &&
                   verdict.max_cv_B <= cfg.cv_threshold &&
                   verdict.hphi_max <= cfg.hphi_threshold_rel * verdict.area;
  return verdict;
}

CfpVerdict cfp_test(const TubeProfile& p, const CfpConfig& cfg) {
  // The reduction has one boundary value per time: the flow is constant along
  // the boundary by construction and every indicator vanishes.
  const RadialGrid grid = RadialGrid::uniform(p, 2000);
  const AssembledSystem sys = assemble(grid);
  CfpVerdict verdict;
  verdict.area = sys.area;
  for (double rel : cfg.t_samples_rel) verdict.t_samples.push_back(rel * sys.scale2);
  verdict.cv_flux_per_t.assign(verdict.t_samples.size(), 0.0);
  verdict.cv_B_per_t.assign(verdict.t_samples.size(), 0.0);
  verdict.is_cfp = true;
  return verdict;
}

} // namespace heatlab
