#include <algorithm>
#include <cmath>
#include <string>

#include "bequest/errors.hpp"
#include "bequest/verify.hpp"

namespace bequest {

namespace {

struct Stencil {
  std::vector<double> lo, diag, up, rhs;
};

// Controls from the current iterate, then the tridiagonal row coefficients.
// Central differences where the diffusion dominates, one-sided upwind
// differences otherwise, so the matrix stays an M-matrix.
void assemble(const MarketParams& p, const FdConfig& cfg, const std::vector<double>& w,
              const std::vector<double>& f, double dx, double cap, std::vector<double>& pi,
              std::vector<char>& buy, Stencil& st) {
  const std::size_t n = w.size() - 2;
  const double pf = (p.mu - p.r) / (p.sigma * p.sigma);
  const double half_var = 0.5 * p.sigma * p.sigma;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = j + 1;
    const double fw = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    const double fww = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dx * dx);
    double control = fww < 0.0 ? -pf * fw / fww : cap;
    control = std::clamp(control, 0.0, cap);
    pi[i] = control;
    const bool b_ok = cfg.insurance_allowed && w[i] < p.b &&
                      p.lambda - p.h * (p.b - w[i]) * fw >= 0.0;
    buy[i] = b_ok ? 1 : 0;
    const double benefit = b_ok ? p.b - w[i] : 0.0;
    const double drift = p.r * w[i] + (p.mu - p.r) * control - p.c - p.h * benefit;
    const double diff = half_var * control * control;
    const double d2 = diff / (dx * dx);
    double a, c;
    if (diff >= std::abs(drift) * dx / 2.0) {
      a = d2 - drift / (2.0 * dx);
      c = d2 + drift / (2.0 * dx);
    } else {
      a = d2 + std::max(-drift, 0.0) / dx;
      c = d2 + std::max(drift, 0.0) / dx;
    }
    st.lo[j] = a;
    st.up[j] = c;
    st.diag[j] = -(a + c) - p.lambda;
    st.rhs[j] = w[i] + benefit >= p.b ? -p.lambda : 0.0;
  }
  st.rhs[n - 1] -= st.up[n - 1];  // phi = 1 at the right boundary
}

// Thomas algorithm; the matrix is strictly diagonally dominant.
void solve_tridiagonal(const Stencil& st, std::vector<double>& x, std::vector<double>& scratch) {
  const std::size_t n = st.diag.size();
  scratch.resize(n);
  double beta = st.diag[0];
  x[0] = st.rhs[0] / beta;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i] = st.up[i - 1] / beta;
    beta = st.diag[i] - st.lo[i] * scratch[i];
    x[i] = (st.rhs[i] - st.lo[i] * x[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= scratch[i + 1] * x[i + 1];
}

double lerp_grid(const FdResult& r, const std::vector<double>& values, double wealth) {
  const double dx = r.w[1] - r.w[0];
  const double pos = std::clamp(wealth / dx, 0.0, static_cast<double>(r.w.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(pos), r.w.size() - 2);
  const double t = pos - static_cast<double>(i);
  return values[i] + t * (values[i + 1] - values[i]);
}

double upper_boundary(const MarketParams& p, const FdConfig& cfg) {
  if (cfg.insurance_allowed) return derive_constants(p).w_s;
  return std::max(p.c / p.r, p.b);
}

}  // namespace

void FdConfig::validate() const {
  if (n_grid < 10) throw ConfigError("fd: n_grid must be at least 10");
  if (!(tol > 0.0)) throw ConfigError("fd: tol must be positive");
  if (max_sweeps < 1) throw ConfigError("fd: max_sweeps must be at least 1");
}

double FdResult::phi_at(double wealth) const {
  if (wealth >= upper) return 1.0;
  return lerp_grid(*this, phi, wealth);
}

double FdResult::pi_at(double wealth) const {
  if (wealth >= upper) return 0.0;
  return lerp_grid(*this, pi, wealth);
}

FdResult fd_solve(const MarketParams& params, const FdConfig& cfg) {
  params.validate();
  cfg.validate();
  if (cfg.insurance_allowed && !(params.h > 0.0)) {
    throw DomainError("fd_solve: insurance needs h > 0");
  }
  const double upper = upper_boundary(params, cfg);
  const auto n = static_cast<std::size_t>(cfg.n_grid);
  const double dx = upper / static_cast<double>(n + 1);
  const double cap = 10.0 * upper / params.sigma;

  FdResult out;
  out.upper = upper;
  out.insurance_allowed = cfg.insurance_allowed;
  out.w.resize(n + 2);
  out.phi.resize(n + 2);
  out.pi.assign(n + 2, 0.0);
  out.buy.assign(n + 2, 0);
  for (std::size_t i = 0; i < n + 2; ++i) {
    out.w[i] = upper * static_cast<double>(i) / static_cast<double>(n + 1);
    const double x = 1.0 - out.w[i] / upper;
    out.phi[i] = 1.0 - x * x;
  }
  out.w[n + 1] = upper;
  out.phi[0] = 0.0;
  out.phi[n + 1] = 1.0;

  Stencil st{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
             std::vector<double>(n)};
  std::vector<double> next(n), scratch;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    assemble(params, cfg, out.w, out.phi, dx, cap, out.pi, out.buy, st);
    solve_tridiagonal(st, next, scratch);
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      change = std::max(change, std::abs(next[j] - out.phi[j + 1]));
      out.phi[j + 1] = next[j];
    }
    out.sweeps = sweep;
    out.last_change = change;
    if (change < cfg.tol) return out;
  }
  throw NonConvergence("fd_solve: no convergence after " + std::to_string(cfg.max_sweeps) + " sweeps",
                       out.last_change);
}

double fd_discrete_residual(const MarketParams& params, const FdResult& result,
                            const std::vector<double>& skip, double exclude) {
  FdConfig cfg;
  cfg.n_grid = static_cast<int>(result.w.size()) - 2;
  cfg.insurance_allowed = result.insurance_allowed;
  const auto n = result.w.size() - 2;
  const double dx = result.w[1] - result.w[0];
  std::vector<double> pi(result.w.size());
  std::vector<char> buy(result.w.size());
  Stencil st{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
             std::vector<double>(n)};
  assemble(params, cfg, result.w, result.phi, dx, 10.0 * result.upper / params.sigma, pi, buy, st);
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = result.w[j + 1];
    const bool near = std::any_of(skip.begin(), skip.end(),
                                  [&](double x) { return std::abs(w - x) <= exclude; });
    if (near) continue;
    double row = st.diag[j] * result.phi[j + 1] - st.rhs[j];
    if (j > 0) row += st.lo[j] * result.phi[j];
    if (j + 1 < n) row += st.up[j] * result.phi[j + 2];
    worst = std::max(worst, std::abs(row));
  }
  return worst;
}

double fd_sup_error(const Solution& solution, const FdResult& result) {
  double worst = 0.0;
  for (std::size_t i = 0; i < result.w.size(); ++i) {
    const double closed = eval_clamped(solution, result.w[i]).phi;
    worst = std::max(worst, std::abs(closed - result.phi[i]));
  }
  return worst;
}

}  // namespace bequest
