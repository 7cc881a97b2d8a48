#include "kinap/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kinap {

MomentSet moments(const CellDistribution& f, const PhaseMesh& mesh, const DiscreteMaxwellian& M,
                  double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("moments of f need epsilon > 0; use the micro-macro overload");
  }
  const auto& v = mesh.v;
  const double m2 = M.m2();
  MomentSet m{std::vector<double>(f.nx, 0.0), std::vector<double>(f.nx, 0.0),
              std::vector<double>(f.nx, 0.0)};
  for (std::size_t i = 0; i < f.nx; ++i) {
    for (std::size_t a = 0; a < f.nv; ++a) {
      const double w = v.width(a) * f(i, a);
      const double va = v.center(a);
      m.rho[i] += w;
      m.J[i] += va * w;
      m.S[i] += (va * va - m2) * w;
    }
    m.J[i] /= epsilon;
  }
  return m;
}

MomentSet moments(const MicroMacroState& s, const PhaseMesh& mesh, const DiscreteMaxwellian& M,
                  double epsilon) {
  const auto& v = mesh.v;
  const std::size_t nx = s.nx();
  const std::size_t nv = v.size();
  const double m2 = M.m2();
  MomentSet m{std::vector<double>(nx, 0.0), std::vector<double>(nx, 0.0),
              std::vector<double>(nx, 0.0)};
  for (std::size_t i = 0; i < nx; ++i) {
    double hbar = 0.0, J = 0.0, S = 0.0;
    for (std::size_t a = 0; a < nv; ++a) {
      const double w = v.width(a) * M.cell(a) * s.h[i * nv + a];
      const double va = v.center(a);
      hbar += w;
      J += va * w;
      S += (va * va - m2) * w;
    }
    m.rho[i] = s.mu + s.lambda[i] + epsilon * hbar;
    m.J[i] = J;
    m.S[i] = epsilon * S;
  }
  return m;
}

double weighted_norm(const CellDistribution& f, const PhaseMesh& mesh,
                     const DiscreteMaxwellian& M) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.nx; ++i) {
    double row = 0.0;
    for (std::size_t a = 0; a < f.nv; ++a) {
      row += f(i, a) * f(i, a) * M.gamma(a) * mesh.v.width(a);
    }
    sum += mesh.x.width(i) * row;
  }
  return std::sqrt(sum);
}

double local_deviation(const CellDistribution& f, const PhaseMesh& mesh,
                       const DiscreteMaxwellian& M) {
  const std::vector<double> rho = density(f, mesh.v);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.nx; ++i) {
    double row = 0.0;
    for (std::size_t a = 0; a < f.nv; ++a) {
      const double d = f(i, a) - rho[i] * M.cell(a);
      row += d * d * M.gamma(a) * mesh.v.width(a);
    }
    sum += mesh.x.width(i) * row;
  }
  return std::sqrt(sum);
}

double l2_norm(std::span<const double> g, const SpatialMesh& mesh) {
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) sum += mesh.width(i) * g[i] * g[i];
  return std::sqrt(sum);
}

std::vector<double> discrete_gradient(std::span<const double> g, const SpatialMesh& mesh) {
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    d[i] = (g[mesh.next(i)] - g[mesh.prev(i)]) / (2.0 * mesh.width(i));
  }
  return d;
}

namespace {

struct StateSums {
  double dev_sq = 0.0;       // sum dx dv M (lambda + eps h)^2
  double dev_mass = 0.0;     // sum dx dv M (lambda + eps h)
  double centered_sq = 0.0;  // sum dx dv M (lambda + eps h - c)^2, c = dev_mass / R
  double rho_sq = 0.0;       // sum dx (lambda + eps hbar - c)^2
  double h_sq = 0.0;         // sum dx dv M h^2
  double local_sq = 0.0;     // sum dx dv M (h - hbar)^2
};

StateSums state_sums(const MicroMacroState& s, const PhaseMesh& mesh,
                     const DiscreteMaxwellian& M, double epsilon) {
  const auto& v = mesh.v;
  const std::size_t nv = v.size();
  if (s.h.size() != s.nx() * nv || s.nx() != mesh.nx()) {
    throw std::invalid_argument("state does not match the phase mesh");
  }
  StateSums out;
  std::vector<double> hbar(s.nx(), 0.0);
  for (std::size_t i = 0; i < s.nx(); ++i) {
    const double* h = s.h.data() + i * nv;
    for (std::size_t a = 0; a < nv; ++a) hbar[i] += v.width(a) * M.cell(a) * h[a];
    out.dev_mass += mesh.x.width(i) * (s.lambda[i] + epsilon * hbar[i]);
  }
  const double c = out.dev_mass / mesh.x.length();
  for (std::size_t i = 0; i < s.nx(); ++i) {
    const double* h = s.h.data() + i * nv;
    double dev_sq = 0.0, cen = 0.0, h_sq = 0.0, loc = 0.0;
    for (std::size_t a = 0; a < nv; ++a) {
      const double w = v.width(a) * M.cell(a);
      const double g = s.lambda[i] + epsilon * h[a];
      dev_sq += w * g * g;
      cen += w * (g - c) * (g - c);
      h_sq += w * h[a] * h[a];
      loc += w * (h[a] - hbar[i]) * (h[a] - hbar[i]);
    }
    const double dx = mesh.x.width(i);
    const double r = s.lambda[i] + epsilon * hbar[i] - c;
    out.dev_sq += dx * dev_sq;
    out.centered_sq += dx * cen;
    out.rho_sq += dx * r * r;
    out.h_sq += dx * h_sq;
    out.local_sq += dx * loc;
  }
  return out;
}

}  // namespace

StateNorms state_norms(const MicroMacroState& s, const PhaseMesh& mesh,
                       const DiscreteMaxwellian& M, double epsilon) {
  const StateSums q = state_sums(s, mesh, M, epsilon);
  const double R = mesh.x.length();
  StateNorms n;
  n.to_equilibrium = std::sqrt(q.centered_sq);
  n.local = epsilon * std::sqrt(q.local_sq);
  n.rho_dev = std::sqrt(q.rho_sq);
  n.h = std::sqrt(q.h_sq);
  n.full = std::sqrt(std::max(0.0, s.mu * s.mu * R + 2.0 * s.mu * q.dev_mass + q.dev_sq));
  n.mass = s.mu * R + q.dev_mass;
  return n;
}

double entropy_slack(const CellDistribution& f_old, const CellDistribution& f_new,
                     std::span<const double> rho_new, double epsilon, double dt,
                     const PhaseMesh& mesh, const DiscreteMaxwellian& M) {
  const double n_old = weighted_norm(f_old, mesh, M);
  const double n_new = weighted_norm(f_new, mesh, M);
  double slack = (n_new * n_new - n_old * n_old) / (2.0 * dt);
  if (epsilon > 0.0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f_new.nx; ++i) {
      double row = 0.0;
      for (std::size_t a = 0; a < f_new.nv; ++a) {
        const double d = f_new(i, a) - rho_new[i] * M.cell(a);
        row += d * d * M.gamma(a) * mesh.v.width(a);
      }
      sum += mesh.x.width(i) * row;
    }
    slack += sum / (epsilon * epsilon);
  }
  return slack;
}

double entropy_slack(const MicroMacroState& s_old, const MicroMacroState& s_new, double epsilon,
                     double dt, const PhaseMesh& mesh, const DiscreteMaxwellian& M) {
  const StateSums a = state_sums(s_old, mesh, M, epsilon);
  const StateSums b = state_sums(s_new, mesh, M, epsilon);
  // ||f||^2 = mu^2 R + 2 mu dev_mass + dev_sq; the mu^2 R part cancels.
  const double diff = (b.dev_sq - a.dev_sq) + 2.0 * s_new.mu * b.dev_mass - 2.0 * s_old.mu * a.dev_mass +
                      (s_new.mu * s_new.mu - s_old.mu * s_old.mu) * mesh.x.length();
  double slack = diff / (2.0 * dt);
  if (epsilon > 0.0) slack += b.local_sq;
  return slack;
}

// ---------------------------------------------------------------------------
// Poisson problem on the torus

PoissonSolver::PoissonSolver(const SpatialMesh& mesh) : mesh_(mesh) {
  const std::size_t n = mesh.size();
  if (n % 2 == 0) {
    throw std::invalid_argument("Poisson problem on the torus needs an odd number of cells");
  }
  std::vector<linalg::Triplet> t;
  t.reserve(3 * n + n * n);
  double diag_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = mesh.next(i);
    const std::size_t im = mesh.prev(i);
    const double up = 0.25 / mesh.width(ip);
    const double down = 0.25 / mesh.width(im);
    t.push_back({i, i, up + down});
    t.push_back({i, mesh.next(ip), -up});
    t.push_back({i, mesh.prev(im), -down});
    diag_mean += (up + down) / static_cast<double>(n);
  }
  // The operator annihilates constants; a rank-one term along the cell
  // widths fixes the weighted mean of phi to zero without changing
  // solutions of compatible right-hand sides.
  double w2 = 0.0;
  for (double w : mesh.widths()) w2 += w * w;
  const double c = diag_mean * static_cast<double>(n) / w2;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) t.push_back({i, k, c * mesh.width(i) * mesh.width(k)});
  }
  factor_ = std::make_unique<linalg::DenseSpdFactorization>(
      linalg::SparseMatrix::from_triplets(n, n, t, true));
}

PoissonSolution PoissonSolver::solve(std::span<const double> rho) const {
  const std::size_t n = mesh_.size();
  if (rho.size() != n) throw std::invalid_argument("Poisson solve: rho has the wrong length");
  PoissonSolution out;
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) mass += mesh_.width(i) * rho[i];
  out.removed_mean = mass / mesh_.length();

  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = mesh_.width(i) * (rho[i] - out.removed_mean);
  out.phi = factor_->solve(b);
  out.grad = discrete_gradient(out.phi, mesh_);
  for (std::size_t i = 0; i < n; ++i) {
    const double lhs = -(out.grad[mesh_.next(i)] - out.grad[mesh_.prev(i)]) / 2.0;
    out.residual = std::max(out.residual, std::abs(lhs - b[i]));
  }
  return out;
}

PoissonSolution poisson_solve(std::span<const double> rho, const SpatialMesh& mesh) {
  return PoissonSolver(mesh).solve(rho);
}

double torus_poincare_constant(const SpatialMesh& mesh) {
  const double N = static_cast<double>(mesh.size());
  return mesh.length() / (N * std::sin(std::numbers::pi / N));
}

// ---------------------------------------------------------------------------
// Modified entropy

EntropyConfig compute_eta_admissible(const DiscreteMaxwellian& M, double C_P, double dt_max) {
  if (!(C_P > 0.0) || !(dt_max > 0.0)) {
    throw std::invalid_argument("entropy certificate: C_P and dt_max must be positive");
  }
  EntropyConfig c;
  c.m2 = M.m2();
  c.m4 = M.m4();
  c.C_P = C_P;
  c.dt_max = dt_max;
  const double s2 = std::sqrt(c.m2);
  const double var = std::max(0.0, c.m4 - c.m2 * c.m2);
  c.eta1 = 1.0 / (2.0 * s2);
  const double a = std::sqrt(var) + C_P * s2;
  c.eta2 = c.m2 / (a * a + c.m2 * c.m2);
  c.eta = 0.5 * std::min(c.eta1, c.eta2);
  c.K_eta = 0.5 * std::min(1.0 - c.eta * c.m2, c.eta * c.m2);
  c.K2_eta = 1.0 + 2.0 * c.eta * s2 * C_P + c.eta * c.m2 * dt_max;
  c.kappa_eta = 2.0 * c.K_eta / c.K2_eta;
  c.beta = std::log1p(dt_max * c.kappa_eta) / dt_max;
  c.upper = 0.5 * c.K2_eta;
  c.lower = 0.5 - c.eta * s2 * std::max(1.0, C_P);
  if (!(c.lower > 0.0) || !c.admissible()) {
    throw std::runtime_error("entropy certificate: no admissible eta for this Maxwellian");
  }
  c.C = std::sqrt(c.upper / c.lower * std::exp(c.beta * dt_max));
  return c;
}

double modified_entropy(const MicroMacroState& s, std::span<const double> grad_phi,
                        std::span<const double> grad_phi_prev, const EntropyConfig& cfg,
                        double epsilon, double dt, const PhaseMesh& mesh,
                        const DiscreteMaxwellian& M) {
  if (!cfg.admissible()) throw std::invalid_argument("modified entropy: eta is not admissible");
  if (grad_phi.size() != mesh.nx() || grad_phi_prev.size() != mesh.nx()) {
    throw std::invalid_argument("modified entropy: gradient has the wrong length");
  }
  const StateSums q = state_sums(s, mesh, M, epsilon);
  double H = 0.5 * q.dev_sq;
  if (epsilon > 0.0) {
    const MomentSet m = moments(s, mesh, M, epsilon);
    double cross = 0.0, memory = 0.0;
    for (std::size_t i = 0; i < mesh.nx(); ++i) {
      const double dx = mesh.x.width(i);
      cross += dx * m.J[i] * grad_phi[i];
      const double d = grad_phi[i] - grad_phi_prev[i];
      memory += dx * d * d;
    }
    const double e2 = epsilon * epsilon;
    H += cfg.eta * e2 * cross + 0.5 * cfg.eta * e2 * memory / dt;
  }
  return H;
}

ModifiedEntropyTracker::ModifiedEntropyTracker(EntropyConfig cfg, double epsilon, double dt,
                                               const PhaseMesh& mesh, const DiscreteMaxwellian& M)
    : cfg_(cfg), epsilon_(epsilon), dt_(dt), mesh_(mesh), M_(M), poisson_(mesh.x) {
  if (!cfg_.admissible()) throw std::invalid_argument("modified entropy: eta is not admissible");
}

std::optional<double> ModifiedEntropyTracker::update(const MicroMacroState& s) {
  const MomentSet m = moments(s, mesh_, M_, epsilon_);
  std::vector<double> fluct(m.rho.size());
  for (std::size_t i = 0; i < fluct.size(); ++i) fluct[i] = m.rho[i] - s.mu;
  std::vector<double> grad = poisson_.solve(fluct).grad;
  std::optional<double> H;
  if (prev_grad_) {
    H = modified_entropy(s, grad, *prev_grad_, cfg_, epsilon_, dt_, mesh_, M_);
  }
  prev_grad_ = std::move(grad);
  return H;
}

// ---------------------------------------------------------------------------
// Fits

RateFit fit_decay_rate(std::span<const double> t, std::span<const double> values,
                       std::optional<FitWindow> window, double transient_fraction) {
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0)) {
    throw std::invalid_argument("decay fit: transient fraction must lie in [0, 1)");
  }
  if (t.size() != values.size()) {
    throw std::invalid_argument("decay fit: time and value series differ in length");
  }
  if (values.empty() || !(values[0] > 0.0)) {
    throw std::invalid_argument("decay fit: series must start with a positive value");
  }
  const double floor = 1e-12 * values[0];
  std::vector<std::size_t> use;
  if (window) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] >= window->t_lo && t[k] <= window->t_hi && values[k] > floor &&
          std::isfinite(values[k])) {
        use.push_back(k);
      }
    }
  } else {
    std::size_t end = 0;
    while (end < values.size() && values[end] > floor && std::isfinite(values[end])) ++end;
    const auto skip = static_cast<std::size_t>(transient_fraction * static_cast<double>(end));
    for (std::size_t k = skip; k < end; ++k) use.push_back(k);
  }
  if (use.size() < 4) {
    throw std::invalid_argument("decay fit: only " + std::to_string(use.size()) +
                                " usable points (need at least 4)");
  }
  const double n = static_cast<double>(use.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t k : use) {
    st += t[k];
    sy += std::log(values[k]);
  }
  const double tm = st / n, ym = sy / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k : use) {
    const double dt = t[k] - tm;
    const double dy = std::log(values[k]) - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) throw std::invalid_argument("decay fit: window has no time extent");
  RateFit fit;
  fit.rate = sty / stt;
  fit.intercept = ym - fit.rate * tm;
  double ss_res = 0.0;
  for (std::size_t k : use) {
    const double r = std::log(values[k]) - (fit.intercept + fit.rate * t[k]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.points = use.size();
  fit.t_lo = t[use.front()];
  fit.t_hi = t[use.back()];
  return fit;
}

PeriodEstimate estimate_oscillation_period(std::span<const double> t,
                                           std::span<const double> values,
                                           double floor_ratio, double transient_fraction) {
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0)) {
    throw std::invalid_argument("period estimate: transient fraction must lie in [0, 1)");
  }
  if (t.size() != values.size()) {
    throw std::invalid_argument("period estimate: time and value series differ in length");
  }
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  const double floor = floor_ratio * vmax;

  PeriodEstimate est;
  for (std::size_t k = 1; k + 1 < values.size(); ++k) {
    const double y0 = values[k - 1], y1 = values[k], y2 = values[k + 1];
    if (!(y1 > y0 && y1 >= y2) || !(y1 > floor)) continue;
    const double x0 = t[k - 1], x1 = t[k], x2 = t[k + 1];
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    double tk = x1;
    if (den != 0.0) tk = std::clamp(x1 - 0.5 * num / den, x0, x2);
    est.maxima.push_back(tk);
  }
  if (est.maxima.size() < 3) {
    throw std::invalid_argument("period estimate: found " + std::to_string(est.maxima.size()) +
                                " local maxima above the floor (need at least 3)");
  }
  const std::size_t k = est.maxima.size();
  est.first_used = std::min(
      static_cast<std::size_t>(transient_fraction * static_cast<double>(k)), k - 3);
  est.period = (est.maxima.back() - est.maxima[est.first_used]) /
               static_cast<double>(k - 1 - est.first_used);
  return est;
}

}  // namespace kinap
