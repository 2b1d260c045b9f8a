#include "cell_problem.hpp"

#include <cmath>
#include <future>

#include "error.hpp"
#include "linear_solver.hpp"

namespace porohom {

namespace {

// Fluid-only periodic connectivity of the unit cell. Neighbors wrap around
// ∂Y; fluid-solid faces are dropped, which is the no-flux condition on Γ.
struct PeriodicCellMesh {
  int dimension = 2;
  std::vector<int> compact;           // lattice cell -> unknown, -1 solid
  std::vector<std::size_t> cells;     // unknown -> lattice cell
  std::vector<int> upper;             // unknown*dim + d -> unknown across +d face or -1
};

PeriodicCellMesh make_mesh(const CellGeometry& cell) {
  PeriodicCellMesh mesh;
  mesh.dimension = cell.dimension();
  const auto& lat = cell.lattice;
  mesh.compact.assign(lat.size(), -1);
  for (std::size_t c = 0; c < lat.size(); ++c) {
    if (cell.is_fluid(c)) {
      mesh.compact[c] = static_cast<int>(mesh.cells.size());
      mesh.cells.push_back(c);
    }
  }
  const int dim = mesh.dimension;
  const int n = cell.resolution();
  mesh.upper.assign(mesh.cells.size() * dim, -1);
  for (std::size_t u = 0; u < mesh.cells.size(); ++u) {
    const Index3 idx = lat.unravel(mesh.cells[u]);
    for (int d = 0; d < dim; ++d) {
      Index3 nb = idx;
      nb[d] = (nb[d] + 1) % n;
      mesh.upper[u * dim + d] = mesh.compact[lat.ravel(nb)];
    }
  }
  return mesh;
}

// Graph Laplacian on fluid cells: (Gw)_P = Σ_Q (w_P - w_Q).
void apply_laplacian(const PeriodicCellMesh& mesh, std::span<const double> w,
                     std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const int dim = mesh.dimension;
  for (std::size_t u = 0; u < mesh.cells.size(); ++u) {
    for (int d = 0; d < dim; ++d) {
      const int q = mesh.upper[u * dim + d];
      if (q < 0) continue;
      const double diff = w[u] - w[static_cast<std::size_t>(q)];
      out[u] += diff;
      out[static_cast<std::size_t>(q)] -= diff;
    }
  }
}

// Net count of fluid faces in +k minus -k around each unknown: the masked
// divergence of the constant field e_k, in units of face area.
std::vector<double> unit_source(const PeriodicCellMesh& mesh, int k) {
  std::vector<double> b(mesh.cells.size(), 0.0);
  const int dim = mesh.dimension;
  for (std::size_t u = 0; u < mesh.cells.size(); ++u) {
    const int q = mesh.upper[u * dim + k];
    if (q < 0) continue;
    b[u] += 1.0;
    b[static_cast<std::size_t>(q)] -= 1.0;
  }
  return b;
}

std::vector<double> to_compact(const PeriodicCellMesh& mesh, const CorrectorField& field) {
  std::vector<double> w(mesh.cells.size());
  for (std::size_t u = 0; u < mesh.cells.size(); ++u) w[u] = field.values[mesh.cells[u]];
  return w;
}

}  // namespace

CorrectorField solve_cell_problem(const CellGeometry& cell, int direction,
                                  const CellSolveOptions& options) {
  if (direction < 0 || direction >= cell.dimension())
    throw Error(ErrorKind::domain, "cell problem direction out of range");
  if (!(options.tolerance > 0.0)) throw Error(ErrorKind::domain, "tolerance must be positive");

  const PeriodicCellMesh mesh = make_mesh(cell);
  const double h = cell.spacing();
  // Σ_Q (w_P - w_Q) = h · (n⁺_P - n⁻_P)
  std::vector<double> rhs = unit_source(mesh, direction);
  double rhs_sum = 0.0;
  for (double& v : rhs) {
    rhs_sum += v;
    v *= h;
  }
  if (std::abs(rhs_sum) > 1e-12)
    throw Error(ErrorKind::state, "cell problem right-hand side is not balanced");

  CgOptions cg;
  cg.tolerance = options.tolerance;
  cg.singular = true;
  cg.throw_on_failure = options.throw_on_failure;
  cg.max_iterations =
      options.max_iterations > 0
          ? options.max_iterations
          : static_cast<int>(50.0 * std::sqrt(static_cast<double>(mesh.cells.size())));

  std::vector<double> w(mesh.cells.size(), 0.0);
  const CgResult res = conjugate_gradient(
      [&](std::span<const double> in, std::span<double> out) { apply_laplacian(mesh, in, out); },
      rhs, w, cg);
  remove_mean(w);

  CorrectorField field;
  field.direction = direction;
  field.values.assign(cell.lattice.size(), 0.0);
  for (std::size_t u = 0; u < mesh.cells.size(); ++u) field.values[mesh.cells[u]] = w[u];
  field.iterations = res.iterations;
  field.relative_residual = res.relative_residual;
  field.converged = res.converged;
  return field;
}

double corrector_residual(const CellGeometry& cell, const CorrectorField& field) {
  const PeriodicCellMesh mesh = make_mesh(cell);
  const std::vector<double> w = to_compact(mesh, field);
  std::vector<double> lap(w.size());
  apply_laplacian(mesh, w, lap);
  const std::vector<double> b = unit_source(mesh, field.direction);
  const double h = cell.spacing();
  double worst = 0.0;
  // outflow of (∇w + e_k) per face area = -(Gw)/h + b
  for (std::size_t u = 0; u < w.size(); ++u)
    worst = std::max(worst, std::abs(-lap[u] / h + b[u]));
  return worst;
}

double EffectiveTensor::min_eigenvalue() const {
  const Eigen::MatrixXd a = matrix();
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double EffectiveTensor::asymmetry() const {
  const Eigen::MatrixXd a = matrix();
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

EffectiveTensor compute_effective_tensor(const CellGeometry& cell,
                                         const CellSolveOptions& options) {
  const int dim = cell.dimension();
  std::vector<std::future<CorrectorField>> jobs;
  for (int k = 0; k < dim; ++k)
    jobs.push_back(std::async(std::launch::async,
                              [&cell, k, &options] { return solve_cell_problem(cell, k, options); }));

  EffectiveTensor tensor;
  tensor.dimension = dim;
  tensor.porosity = cell.porosity;
  for (auto& job : jobs) tensor.correctors.push_back(job.get());

  const PeriodicCellMesh mesh = make_mesh(cell);
  const double h = cell.spacing();
  const double volume = std::pow(h, dim);
  std::vector<std::vector<double>> w;
  for (const auto& c : tensor.correctors) w.push_back(to_compact(mesh, c));

  // Face-wise (∇w_k + e_k)_d on every fluid-fluid face; each face carries
  // volume h^n.
  for (std::size_t u = 0; u < mesh.cells.size(); ++u) {
    for (int d = 0; d < dim; ++d) {
      const int q = mesh.upper[u * dim + d];
      if (q < 0) continue;
      std::array<double, 3> grad{0.0, 0.0, 0.0};
      for (int k = 0; k < dim; ++k)
        grad[k] = (w[k][static_cast<std::size_t>(q)] - w[k][u]) / h + (k == d ? 1.0 : 0.0);
      for (int k = 0; k < dim; ++k) {
        tensor.a_hom(d, k) += grad[k] * volume;
        for (int j = 0; j < dim; ++j) tensor.energy_form(j, k) += grad[j] * grad[k] * volume;
      }
    }
  }
  tensor.a_hom /= cell.porosity;
  tensor.energy_form /= cell.porosity;
  return tensor;
}

EffectiveTensor identity_tensor(int dimension) {
  EffectiveTensor t;
  t.dimension = dimension;
  t.porosity = 1.0;
  t.a_hom.topLeftCorner(dimension, dimension).setIdentity();
  t.energy_form = t.a_hom;
  return t;
}

}  // namespace porohom
