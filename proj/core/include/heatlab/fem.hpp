#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "heatlab/mesh.hpp"

namespace heatlab {

using SparseMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

enum class FieldMeaning { temperature, exit_function, eigenfunction, displacement, other };

/// Nodal scalar field tied to a discretization by mesh_id.
struct Field {
  Vector values;
  int mesh_id = 0;
  FieldMeaning meaning = FieldMeaning::other;
};

/// Metric-weighted P1 discretization shared by the 2D surface FEM and the 1D
/// radial reduction: mass matrix M, stiffness S (positive Laplacian
/// convention: S is the weak form of -div grad), Dirichlet dof list, and
/// boundary mass for variational flux recovery.
struct AssembledSystem {
  SparseMat M, S;
  std::vector<int> dirichlet;                   // dofs pinned to zero
  std::vector<MeshBoundaryNode> boundary_info;  // per dirichlet dof, same order
  SparseMat boundary_mass;                      // compact (nb x nb)
  std::vector<double> boundary_weight;          // lumped dsigma per boundary dof
  std::vector<int> full_to_reduced;             // -1 on dirichlet dofs
  std::vector<int> reduced_to_full;
  double area = 0.0;    // 1^T M 1
  double scale2 = 0.0;  // squared diameter proxy (sets default time scales)
  int mesh_id = 0;

  int n_full() const { return static_cast<int>(M.rows()); }
  int n_reduced() const { return static_cast<int>(reduced_to_full.size()); }
  int n_boundary() const { return static_cast<int>(dirichlet.size()); }

  Vector reduce(const Vector& full) const;
  Vector expand(const Vector& reduced) const; // zeros on dirichlet dofs
  double quadrature(const Vector& full) const; // 1^T M v
};

/// Assembles mass, stiffness and boundary mass for a meshed domain.
/// Throws on degenerate triangles (with the triangle index).
AssembledSystem assemble(const MeshedDomain& m);

/// Dirichlet solves with a cached factorization of the reduced stiffness.
class DirichletSolver {
 public:
  explicit DirichletSolver(const AssembledSystem& sys);

  const AssembledSystem& system() const { return *sys_; }

  /// Solves (positive Laplacian) u = f weakly with u = 0 on the boundary.
  Field solve_poisson(const Vector& f, FieldMeaning meaning = FieldMeaning::other) const;
  /// Solves with an already-reduced load vector.
  Vector solve_reduced(const Vector& load) const;
  /// Harmonic extension of boundary values (one value per boundary dof).
  Field harmonic_extension(const std::vector<double>& boundary_values) const;

  double last_residual() const { return last_residual_; }

 private:
  const AssembledSystem* sys_;
  SparseMat S_reduced_;
  double snorm_ = 0.0; // infinity norm of the reduced stiffness
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
  mutable double last_residual_ = 0.0;
};

struct EigenPair {
  double lambda = 0.0;
  Field phi;          // normalized: integral of phi^2 dv = 1, phi >= 0
  double residual = 0.0;
  int iterations = 0;
};

/// Smallest Dirichlet eigenpair of S phi = lambda M phi via inverse power
/// iteration on the reduced system.
EigenPair smallest_eigenpair(const AssembledSystem& sys, double tol = 1e-8,
                             int max_iter = 2000);

/// Variational boundary flux du/dN (N the inner normal) of a Dirichlet field
/// u with known positive-Laplacian data f: solves the boundary mass system
/// for the flux values.  Returns one value per boundary dof.
std::vector<double> boundary_flux(const AssembledSystem& sys, const Vector& u, const Vector& f);

/// Same recovery with the boundary mass factored once (time stepping calls
/// this every step).
class FluxRecovery {
 public:
  explicit FluxRecovery(const AssembledSystem& sys);
  std::vector<double> recover(const Vector& u, const Vector& f) const;

 private:
  const AssembledSystem* sys_;
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
};

/// dsigma-weighted mean and coefficient of variation of per-boundary-node
/// values.
struct FluxStats {
  double mean = 0.0;
  double stddev = 0.0;
  double cv = 0.0;
  double min = 0.0;
  double max = 0.0;
};
FluxStats flux_statistics(const AssembledSystem& sys, const std::vector<double>& values);

} // namespace heatlab
