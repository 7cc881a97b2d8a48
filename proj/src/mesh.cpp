#include "kinap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kinap {

VelocityMesh VelocityMesh::uniform(double v_star, int L) {
  if (!(v_star > 0.0) || !std::isfinite(v_star)) {
    throw std::invalid_argument("velocity mesh: v_star must be positive, got " +
                                std::to_string(v_star));
  }
  if (L < 1) {
    throw std::invalid_argument("velocity mesh: L must be >= 1, got " + std::to_string(L));
  }
  std::vector<double> positive(static_cast<std::size_t>(L) + 1);
  for (int j = 0; j <= L; ++j) {
    positive[static_cast<std::size_t>(j)] = v_star * static_cast<double>(j) / L;
  }
  positive.back() = v_star;
  return VelocityMesh(v_star, L, std::move(positive));
}

VelocityMesh VelocityMesh::from_interfaces(std::span<const double> interfaces) {
  const std::size_t count = interfaces.size();
  if (count < 3 || count % 2 == 0) {
    throw std::invalid_argument(
        "velocity mesh: need an odd number (>= 3) of interfaces, got " + std::to_string(count));
  }
  const int L = static_cast<int>(count / 2);
  const double v_star = interfaces.back();
  if (!(v_star > 0.0)) {
    throw std::invalid_argument("velocity mesh: last interface must be positive");
  }
  if (interfaces[static_cast<std::size_t>(L)] != 0.0) {
    throw std::invalid_argument("velocity mesh: middle interface must be exactly 0");
  }
  for (std::size_t d = 0; d + 1 < count; ++d) {
    if (!(interfaces[d + 1] > interfaces[d])) {
      throw std::invalid_argument("velocity mesh: interfaces must be strictly increasing");
    }
  }
  const double tol = 1e-12 * v_star;
  for (int j = 0; j <= L; ++j) {
    const double up = interfaces[static_cast<std::size_t>(L + j)];
    const double down = interfaces[static_cast<std::size_t>(L - j)];
    if (std::abs(up + down) > tol) {
      throw std::invalid_argument("velocity mesh: interfaces are not symmetric about 0");
    }
  }
  std::vector<double> positive(interfaces.begin() + L, interfaces.end());
  return VelocityMesh(v_star, L, std::move(positive));
}

VelocityMesh::VelocityMesh(double v_star, int L, std::vector<double> positive)
    : v_star_(v_star), L_(L) {
  const auto n = static_cast<std::size_t>(L);
  interfaces_.assign(2 * n + 1, 0.0);
  for (std::size_t j = 0; j <= n; ++j) {
    interfaces_[n + j] = positive[j];
    interfaces_[n - j] = -positive[j];
  }
  interfaces_[n] = 0.0;

  centers_.assign(2 * n, 0.0);
  widths_.assign(2 * n, 0.0);
  for (std::size_t a = n; a < 2 * n; ++a) {
    centers_[a] = 0.5 * (interfaces_[a] + interfaces_[a + 1]);
    widths_[a] = interfaces_[a + 1] - interfaces_[a];
    centers_[2 * n - 1 - a] = -centers_[a];
    widths_[2 * n - 1 - a] = widths_[a];
  }

  // Dual cells: (v_j, v_{j+1}) with v_{-L} = -v_star and v_{L+1} = v_star.
  dual_widths_.assign(2 * n + 1, 0.0);
  for (std::size_t d = n; d <= 2 * n; ++d) {
    const double lo = centers_[d - 1];
    const double hi = d == 2 * n ? v_star_ : centers_[d];
    dual_widths_[d] = hi - lo;
    dual_widths_[2 * n - d] = dual_widths_[d];
  }
}

SpatialMesh SpatialMesh::uniform(double R, int N) {
  if (!(R > 0.0) || !std::isfinite(R)) {
    throw std::invalid_argument("spatial mesh: torus length R must be positive");
  }
  if (N < 1 || N % 2 == 0) {
    throw std::invalid_argument(
        "spatial mesh: N must be a positive odd integer (got " + std::to_string(N) +
        "); the discrete Poisson problem on the torus is not uniquely solvable for even N");
  }
  SpatialMesh mesh(std::vector<double>(static_cast<std::size_t>(N), R / N));
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    mesh.centers_[i] = (static_cast<double>(i) + 0.5) * R / N;
  }
  mesh.R_ = R;
  return mesh;
}

SpatialMesh SpatialMesh::from_widths(std::span<const double> widths) {
  if (widths.empty() || widths.size() % 2 == 0) {
    throw std::invalid_argument(
        "spatial mesh: number of cells must be odd (got " + std::to_string(widths.size()) +
        "); the discrete Poisson problem on the torus is not uniquely solvable for even N");
  }
  for (double w : widths) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("spatial mesh: widths must be positive and finite");
    }
  }
  return SpatialMesh(std::vector<double>(widths.begin(), widths.end()));
}

SpatialMesh::SpatialMesh(std::vector<double> widths) : widths_(std::move(widths)) {
  centers_.resize(widths_.size());
  double left = 0.0;
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    centers_[i] = left + 0.5 * widths_[i];
    left += widths_[i];
  }
  R_ = left;
}

bool SpatialMesh::is_uniform() const {
  return std::all_of(widths_.begin(), widths_.end(),
                     [&](double w) { return std::abs(w - widths_.front()) <= 1e-14 * R_; });
}

}  // namespace kinap
