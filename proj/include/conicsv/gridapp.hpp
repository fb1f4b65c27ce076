#ifndef CONICSV_GRIDAPP_HPP
#define CONICSV_GRIDAPP_HPP

#include <complex>
#include <vector>

#include "conicsv/cones.hpp"
#include "conicsv/dual_solver.hpp"

namespace conicsv {

// Sensor selection for quadratic (power) measurements z_l = V* H_l V + noise.
//
// The complex Hermitian model is realified into the space M of 2N x 2N
// matrices [[S, K], [-K, S]] (S symmetric, K antisymmetric). Coordinates on M
// (the map T) are the N^2 independent entries
//   S_ii,  sqrt(2) S_ij (i < j),  sqrt(2) K_ij (i < j),
// scaled so that <T(X), T(Y)> = 1/2 <X, Y>_F. With that scaling a
// measurement is linear in w = T(W): trace(H W) = <T(H), w>.

using ComplexMatrix = Eigen::MatrixXcd;

struct MeasurementModel {
  std::vector<ComplexMatrix> h_list;  // L Hermitian N x N operators
  Vector z;                           // L measurements (may be empty)
  double noise_sigma = 0.0;

  Index num_buses() const { return h_list.empty() ? 0 : h_list.front().rows(); }
  Index num_measurements() const { return static_cast<Index>(h_list.size()); }
};

// One coordinate of T: which block entry it reads and its scale.
struct StructuredCoordinate {
  enum Kind { Symmetric, Antisymmetric } kind;
  Index row;
  Index col;
  double scale;
};

struct RealifiedModel {
  Index n_bus = 0;
  Index vec_dim = 0;                        // N^2
  std::vector<Matrix> hh_list;              // [[H_R, H_I], [-H_I, H_R]]
  Matrix h;                                 // vec_dim x L, columns T(hh_l)
  std::vector<StructuredCoordinate> t_map;  // vec_dim entries
};

// Index map for N buses.
std::vector<StructuredCoordinate> structured_coordinates(Index n_bus);

// T: M -> R^{N^2} (reads the upper-left and upper-right blocks).
Vector to_structured_vector(const Matrix& X, Index n_bus);
// T^{-1}: R^{N^2} -> M.
Matrix from_structured_vector(const Vector& w, Index n_bus);
// Frobenius-orthogonal projection of a 2N x 2N matrix onto M.
Matrix project_structured(const Matrix& X);
// [[Re W, Im W], [-Im W, Re W]].
Matrix realify_matrix(const ComplexMatrix& W);

RealifiedModel realify(const MeasurementModel& model);

// 2 sum delta_l h_l h_l'.
Matrix information_matrix(const RealifiedModel& model, const Vector& delta);

// {tau : u_j' T^{-1}(tau) u_j >= 0} for an orthonormal kernel basis (u_j)
// of T^{-1}(w0), as ConeH normals -T(P_M(u_j u_j')). Parallel normals are
// merged. Throws InvalidInput when T^{-1}(w0) is not PSD within kernel_tol.
ConeH tangent_cone(const RealifiedModel& model, const Vector& w0, double kernel_tol = 1e-8);

struct DesignEvaluation {
  double objective = 0.0;  // min over cone ∩ sphere of tau' I_delta tau
  ConicSvResult solve;
};

// Symmetric square root with negative eigenvalues clamped to zero.
Matrix psd_sqrt(const Matrix& M);

DesignEvaluation evaluate_design(const RealifiedModel& model, const Vector& delta, const Vector& w0,
                                 const SolveOptions& opts = {});
double design_objective(const RealifiedModel& model, const Vector& delta, const Vector& w0,
                        const SolveOptions& opts = {});

// Forward greedy selection of `budget` measurements maximizing the design
// objective; ties go to the lowest index. Candidates of one round are
// evaluated in parallel under Backend::OpenMP.
Vector greedy_design(const RealifiedModel& model, const Vector& w0, Index budget,
                     Backend backend = Backend::OpenMP, const SolveOptions& opts = {});

}  // namespace conicsv

#endif  // CONICSV_GRIDAPP_HPP
