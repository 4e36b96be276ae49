#include "heatlab/fem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace heatlab {

Vector AssembledSystem::reduce(const Vector& full) const {
  Vector r(n_reduced());
  for (int i = 0; i < n_reduced(); ++i) r[i] = full[reduced_to_full[i]];
  return r;
}

Vector AssembledSystem::expand(const Vector& reduced) const {
  Vector f = Vector::Zero(n_full());
  for (int i = 0; i < n_reduced(); ++i) f[reduced_to_full[i]] = reduced[i];
  return f;
}

double AssembledSystem::quadrature(const Vector& full) const {
  return (M * full).sum();
}

namespace {

void finalize_system(AssembledSystem& sys) {
  sys.full_to_reduced.assign(sys.n_full(), 0);
  for (int b : sys.dirichlet) sys.full_to_reduced[b] = -1;
  sys.reduced_to_full.clear();
  for (int i = 0; i < sys.n_full(); ++i)
    if (sys.full_to_reduced[i] == 0) {
      sys.full_to_reduced[i] = static_cast<int>(sys.reduced_to_full.size());
      sys.reduced_to_full.push_back(i);
    }
  sys.boundary_weight.assign(sys.dirichlet.size(), 0.0);
  for (int k = 0; k < sys.boundary_mass.outerSize(); ++k)
    for (SparseMat::InnerIterator it(sys.boundary_mass, k); it; ++it)
      sys.boundary_weight[it.row()] += it.value();
  sys.area = sys.quadrature(Vector::Ones(sys.n_full()));
}

} // namespace

AssembledSystem assemble(const MeshedDomain& m) {
  const int n = static_cast<int>(m.node_count());
  AssembledSystem sys;
  sys.mesh_id = m.mesh_id;

  std::vector<Eigen::Triplet<double>> tm, ts;
  tm.reserve(m.triangles.size() * 9);
  ts.reserve(m.triangles.size() * 9);

  // Edge-midpoint quadrature: exact for quadratics on the reference triangle.
  static const double lam[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};

  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto c = triangle_corners(m, t);
    const double twoA = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) -
                        (c[1][1] - c[0][1]) * (c[2][0] - c[0][0]);
    if (!(twoA > 0.0))
      throw std::runtime_error("degenerate triangle " + std::to_string(t));
    const double A = 0.5 * twoA;
    // P1 gradients in chart coordinates.
    const Vec2 grad[3] = {
        {(c[1][1] - c[2][1]) / twoA, (c[2][0] - c[1][0]) / twoA},
        {(c[2][1] - c[0][1]) / twoA, (c[0][0] - c[2][0]) / twoA},
        {(c[0][1] - c[1][1]) / twoA, (c[1][0] - c[0][0]) / twoA}};

    double Mloc[3][3] = {};
    double Sloc[3][3] = {};
    for (int q = 0; q < 3; ++q) {
      const Vec2 qp{lam[q][0] * c[0][0] + lam[q][1] * c[1][0] + lam[q][2] * c[2][0],
                    lam[q][0] * c[0][1] + lam[q][1] * c[1][1] + lam[q][2] * c[2][1]};
      const Mat2 g = m.chart.metric(qp[0], qp[1]);
      const double det = g[0] * g[3] - g[1] * g[2];
      const double sq = std::sqrt(det);
      const Mat2 gi{g[3] / det, -g[1] / det, -g[2] / det, g[0] / det};
      const double w = A / 3.0 * sq;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          Mloc[i][j] += w * lam[q][i] * lam[q][j];
          const double gg = grad[i][0] * (gi[0] * grad[j][0] + gi[1] * grad[j][1]) +
                            grad[i][1] * (gi[2] * grad[j][0] + gi[3] * grad[j][1]);
          Sloc[i][j] += w * gg;
        }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tm.emplace_back(m.triangles[t][i], m.triangles[t][j], Mloc[i][j]);
        ts.emplace_back(m.triangles[t][i], m.triangles[t][j], Sloc[i][j]);
      }
  }
  sys.M.resize(n, n);
  sys.S.resize(n, n);
  sys.M.setFromTriplets(tm.begin(), tm.end());
  sys.S.setFromTriplets(ts.begin(), ts.end());

  // Boundary data and boundary mass (consecutive nodes along each loop).
  sys.boundary_info = m.boundary;
  sys.dirichlet.reserve(m.boundary.size());
  for (const auto& b : m.boundary) sys.dirichlet.push_back(b.node);

  const int nb = static_cast<int>(m.boundary.size());
  std::vector<Eigen::Triplet<double>> tb;
  // Group boundary nodes by loop, in stored order.
  int start = 0;
  while (start < nb) {
    int end = start;
    while (end < nb && m.boundary[end].loop == m.boundary[start].loop) ++end;
    const int cnt = end - start;
    for (int k = 0; k < cnt; ++k) {
      const int i = start + k;
      const int j = start + (k + 1) % cnt;
      const Vec2& a = m.nodes[m.boundary[i].node];
      const Vec2& b = m.nodes[m.boundary[j].node];
      Vec2 e{b[0] - a[0], b[1] - a[1]};
      if (m.chart.v_period()) {
        const double per = *m.chart.v_period();
        while (e[1] > per / 2) e[1] -= per;
        while (e[1] < -per / 2) e[1] += per;
      }
      const Vec2 mid{a[0] + e[0] / 2, a[1] + e[1] / 2};
      const double L = m.chart.norm(mid, e);
      tb.emplace_back(i, i, L / 3.0);
      tb.emplace_back(j, j, L / 3.0);
      tb.emplace_back(i, j, L / 6.0);
      tb.emplace_back(j, i, L / 6.0);
    }
    start = end;
  }
  sys.boundary_mass.resize(nb, nb);
  sys.boundary_mass.setFromTriplets(tb.begin(), tb.end());

  // Squared-diameter proxy from the chart bounding box, metric at the center.
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (const auto& p : m.nodes) {
    lo[0] = std::min(lo[0], p[0]);
    lo[1] = std::min(lo[1], p[1]);
    hi[0] = std::max(hi[0], p[0]);
    hi[1] = std::max(hi[1], p[1]);
  }
  const Vec2 cen{(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2};
  const Vec2 diag{hi[0] - lo[0], hi[1] - lo[1]};
  const double d = m.chart.norm(cen, diag);
  sys.scale2 = d * d;

  finalize_system(sys);
  return sys;
}

DirichletSolver::DirichletSolver(const AssembledSystem& sys) : sys_(&sys) {
  const int nr = sys.n_reduced();
  std::vector<Eigen::Triplet<double>> tr;
  for (int k = 0; k < sys.S.outerSize(); ++k)
    for (SparseMat::InnerIterator it(sys.S, k); it; ++it) {
      const int i = sys.full_to_reduced[it.row()];
      const int j = sys.full_to_reduced[it.col()];
      if (i >= 0 && j >= 0) tr.emplace_back(i, j, it.value());
    }
  S_reduced_.resize(nr, nr);
  S_reduced_.setFromTriplets(tr.begin(), tr.end());
  for (int k = 0; k < S_reduced_.outerSize(); ++k)
    for (SparseMat::InnerIterator it(S_reduced_, k); it; ++it)
      snorm_ = std::max(snorm_, std::abs(it.value()));
  ldlt_.compute(S_reduced_);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("Dirichlet stiffness factorization failed");
}

Vector DirichletSolver::solve_reduced(const Vector& load) const {
  Vector u = ldlt_.solve(load);
  // One step of iterative refinement handles badly scaled systems (radial
  // grids with a strongly vanishing density near the origin cutoff).
  Vector r = load - S_reduced_ * u;
  if (load.norm() > 0 && r.norm() > 1e-12 * load.norm()) {
    u += ldlt_.solve(r);
    r = load - S_reduced_ * u;
  }
  // Normwise backward error: ||r|| / (||S|| ||u|| + ||load||).
  const double denom = snorm_ * u.norm() + load.norm();
  last_residual_ = denom > 0 ? r.norm() / denom : 0.0;
  if (last_residual_ > 1e-10)
    throw std::runtime_error("Dirichlet solve residual " + std::to_string(last_residual_) +
                             " exceeds 1e-10");
  return u;
}

Field DirichletSolver::solve_poisson(const Vector& f, FieldMeaning meaning) const {
  if (!f.allFinite()) throw std::invalid_argument("non-finite right-hand side");
  const Vector load = sys_->reduce(sys_->M * f);
  Field out;
  out.values = sys_->expand(solve_reduced(load));
  out.mesh_id = sys_->mesh_id;
  out.meaning = meaning;
  return out;
}

Field DirichletSolver::harmonic_extension(const std::vector<double>& boundary_values) const {
  if (static_cast<int>(boundary_values.size()) != sys_->n_boundary())
    throw std::invalid_argument("boundary value count mismatch");
  Vector g = Vector::Zero(sys_->n_full());
  for (int b = 0; b < sys_->n_boundary(); ++b) g[sys_->dirichlet[b]] = boundary_values[b];
  const Vector load = -sys_->reduce(sys_->S * g);
  Vector u = sys_->expand(solve_reduced(load));
  u += g;
  Field out;
  out.values = std::move(u);
  out.mesh_id = sys_->mesh_id;
  out.meaning = FieldMeaning::other;
  return out;
}

EigenPair smallest_eigenpair(const AssembledSystem& sys, double tol, int max_iter) {
  DirichletSolver solver(sys);
  const int nr = sys.n_reduced();
  // Reduced mass.
  std::vector<Eigen::Triplet<double>> tr;
  for (int k = 0; k < sys.M.outerSize(); ++k)
    for (SparseMat::InnerIterator it(sys.M, k); it; ++it) {
      const int i = sys.full_to_reduced[it.row()];
      const int j = sys.full_to_reduced[it.col()];
      if (i >= 0 && j >= 0) tr.emplace_back(i, j, it.value());
    }
  SparseMat Mr(nr, nr);
  Mr.setFromTriplets(tr.begin(), tr.end());
  SparseMat Sr(nr, nr);
  tr.clear();
  for (int k = 0; k < sys.S.outerSize(); ++k)
    for (SparseMat::InnerIterator it(sys.S, k); it; ++it) {
      const int i = sys.full_to_reduced[it.row()];
      const int j = sys.full_to_reduced[it.col()];
      if (i >= 0 && j >= 0) tr.emplace_back(i, j, it.value());
    }
  Sr.setFromTriplets(tr.begin(), tr.end());

  Vector x = Vector::Ones(nr);
  x /= std::sqrt(x.dot(Mr * x));
  double lambda = 0.0, res = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    Vector y = solver.solve_reduced(Mr * x);
    const double norm = std::sqrt(y.dot(Mr * y));
    x = y / norm;
    const Vector Sx = Sr * x;
    const Vector Mx = Mr * x;
    lambda = x.dot(Sx); // x is M-normalized
    res = (Sx - lambda * Mx).norm() / Sx.norm();
    if (res <= tol) break;
  }
  if (res > tol)
    throw std::runtime_error("eigen iteration stalled: residual " + std::to_string(res) +
                             " after " + std::to_string(it) + " iterations");
  if (x.sum() < 0) x = -x;
  EigenPair out;
  out.lambda = lambda;
  out.phi.values = sys.expand(x);
  out.phi.mesh_id = sys.mesh_id;
  out.phi.meaning = FieldMeaning::eigenfunction;
  out.residual = res;
  out.iterations = it + 1;
  return out;
}

FluxRecovery::FluxRecovery(const AssembledSystem& sys) : sys_(&sys) {
  ldlt_.compute(sys.boundary_mass);
  if (ldlt_.info() != Eigen::Success)
    throw std::runtime_error("boundary mass factorization failed");
}

std::vector<double> FluxRecovery::recover(const Vector& u, const Vector& f) const {
  const AssembledSystem& sys = *sys_;
  if (u.size() != sys.n_full() || f.size() != sys.n_full())
    throw std::invalid_argument("field size does not match the system");
  const Vector r = sys.M * f - sys.S * u;
  Vector rb(sys.n_boundary());
  for (int b = 0; b < sys.n_boundary(); ++b) rb[b] = r[sys.dirichlet[b]];
  const Vector flux = ldlt_.solve(rb);
  return {flux.data(), flux.data() + flux.size()};
}

std::vector<double> boundary_flux(const AssembledSystem& sys, const Vector& u, const Vector& f) {
  return FluxRecovery(sys).recover(u, f);
}

FluxStats flux_statistics(const AssembledSystem& sys, const std::vector<double>& values) {
  if (values.size() != sys.boundary_weight.size())
    throw std::invalid_argument("boundary value count mismatch");
  FluxStats st;
  double wsum = 0.0;
  st.min = 1e300;
  st.max = -1e300;
  for (std::size_t i = 0; i < values.size(); ++i) {
    wsum += sys.boundary_weight[i];
    st.mean += sys.boundary_weight[i] * values[i];
    st.min = std::min(st.min, values[i]);
    st.max = std::max(st.max, values[i]);
  }
  st.mean /= wsum;
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - st.mean;
    var += sys.boundary_weight[i] * d * d;
  }
  st.stddev = std::sqrt(var / wsum);
  st.cv = st.mean != 0.0 ? std::abs(st.stddev / st.mean) : 0.0;
  return st;
}

} // namespace heatlab
