#include "fv_operator.hpp"

#include <cmath>

namespace porohom {

FvOperator::FvOperator(std::shared_ptr<const MaskedGrid> grid, const Eigen::Matrix3d& tensor)
    : grid_(std::move(grid)), tensor_(tensor) {
  const int dim = grid_->dimension();
  for (int d = 0; d < dim; ++d) {
    for (int e = d + 1; e < dim; ++e) {
      if (tensor_(d, e) == 0.0 && tensor_(e, d) == 0.0) continue;
      for (int p = 0; p < static_cast<int>(grid_->fluid_cells()); ++p) {
        const int pd = grid_->neighbor(p, d, +1);
        const int pe = grid_->neighbor(p, e, +1);
        if (pd < 0 || pe < 0) continue;
        const int pde = grid_->neighbor(pd, e, +1);
        if (pde < 0 || grid_->neighbor(pe, d, +1) != pde) continue;
        corners_.push_back({p, pd, pe, pde, d, e});
      }
    }
  }
}

void FvOperator::apply(std::span<const double> x, std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (const auto& f : grid_->interior_faces()) {
    const double flux = tensor_(f.dir, f.dir) * (x[f.lo] - x[f.hi]);
    y[f.lo] += flux;
    y[f.hi] -= flux;
  }
  for (const auto& c : corners_) {
    const double a = 0.25 * tensor_(c.d, c.e);
    const double dd = (x[c.pd] - x[c.p]) + (x[c.pde] - x[c.pe]);
    const double de = (x[c.pe] - x[c.p]) + (x[c.pde] - x[c.pd]);
    y[c.p] += a * (-de - dd);
    y[c.pd] += a * (de - dd);
    y[c.pe] += a * (dd - de);
    y[c.pde] += a * (de + dd);
  }
}

void FvOperator::apply_weighted(std::span<const double> face_weight,
                                std::span<const double> corner_weight, double shift,
                                std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = shift * x[i];
  const auto& faces = grid_->interior_faces();
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    const double flux = face_weight[k] * tensor_(f.dir, f.dir) * (x[f.lo] - x[f.hi]);
    y[f.lo] += flux;
    y[f.hi] -= flux;
  }
  for (std::size_t k = 0; k < corners_.size(); ++k) {
    const auto& c = corners_[k];
    const double a = 0.25 * corner_weight[k] * tensor_(c.d, c.e);
    const double dd = (x[c.pd] - x[c.p]) + (x[c.pde] - x[c.pe]);
    const double de = (x[c.pe] - x[c.p]) + (x[c.pde] - x[c.pd]);
    y[c.p] += a * (-de - dd);
    y[c.pd] += a * (de - dd);
    y[c.pe] += a * (dd - de);
    y[c.pde] += a * (de + dd);
  }
}

std::vector<double> FvOperator::diagonal(std::span<const double> face_weight,
                                         std::span<const double> corner_weight,
                                         double shift) const {
  std::vector<double> diag(size(), shift);
  const auto& faces = grid_->interior_faces();
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const double w = face_weight[k] * tensor_(faces[k].dir, faces[k].dir);
    diag[faces[k].lo] += w;
    diag[faces[k].hi] += w;
  }
  for (std::size_t k = 0; k < corners_.size(); ++k) {
    const auto& c = corners_[k];
    const double a = 0.25 * corner_weight[k] * tensor_(c.d, c.e);
    diag[c.p] += 2.0 * a;
    diag[c.pd] -= 2.0 * a;
    diag[c.pe] -= 2.0 * a;
    diag[c.pde] += 2.0 * a;
  }
  return diag;
}

void FvOperator::normal_gradient(std::span<const double> u, std::span<double> out) const {
  const MaskedGrid& g = *grid_;
  const double h = g.spacing();
  const int dim = g.dimension();
  const auto& faces = g.interior_faces();
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    double value = tensor_(f.dir, f.dir) * (u[f.hi] - u[f.lo]) / h;
    for (int e = 0; e < dim; ++e) {
      if (e == f.dir || tensor_(f.dir, e) == 0.0) continue;
      double tangential = 0.0;
      for (int cell : {f.lo, f.hi}) {
        const int up = g.neighbor(cell, e, +1);
        const int down = g.neighbor(cell, e, -1);
        tangential += (u[up >= 0 ? up : cell] - u[down >= 0 ? down : cell]) / (2.0 * h);
      }
      value += tensor_(f.dir, e) * 0.5 * tangential;
    }
    out[k] = value;
  }
}

double FvOperator::dirichlet_energy(std::span<const double> u) const {
  std::vector<double> ku(u.size());
  apply(u, ku);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * ku[i];
  return s * std::pow(grid_->spacing(), grid_->dimension() - 2);
}

}  // namespace porohom
