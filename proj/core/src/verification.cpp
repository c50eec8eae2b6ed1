#include <algorithm>
#include <cmath>
#include <limits>

#include "bequest/errors.hpp"
#include "bequest/verify.hpp"

namespace bequest {

std::vector<std::string> VerificationReport::failures() const {
  std::vector<std::string> out;
  if (!residual_ok) out.emplace_back("residual");
  if (!pasting_ok) out.emplace_back("pasting");
  if (!fd_ok) out.emplace_back("fd");
  if (!mc_ok) out.emplace_back("mc");
  return out;
}

VerificationReport run_verification(const Solution& solution, const VerifyConfig& cfg) {
  VerificationReport report;

  for (double w : interior_grid(solution, cfg.residual_points)) {
    double res = std::numeric_limits<double>::infinity();
    try {
      res = std::abs(hjb_residual(solution, w));
    } catch (const DomainError&) {
    }
    report.residual_sup = std::max(report.residual_sup, std::isnan(res) ? std::numeric_limits<double>::infinity() : res);
  }
  report.residual_ok = report.residual_sup < cfg.residual_limit;

  try {
    report.pasting_gaps = smooth_pasting_check(solution);
  } catch (const DomainError&) {
    report.pasting_ok = false;
  }
  for (const auto& gap : report.pasting_gaps) {
    if (!(gap.max_gap() < cfg.pasting_limit)) report.pasting_ok = false;
  }

  if (cfg.run_fd) {
    const FdResult fd = fd_solve(solution.params, cfg.fd);
    report.fd_sup_error = fd_sup_error(solution, fd);
    report.fd_ok = *report.fd_sup_error < cfg.fd_limit;
  }

  if (cfg.run_mc) {
    McConfig mc = cfg.mc;
    mc.w0 = cfg.mc_w0.value_or(0.5 * solution.w_s());
    report.mc_w0 = mc.w0;
    report.phi_w0 = eval(solution, mc.w0).phi;
    const McResult result = mc_estimate(solution.params, FeedbackStrategy::optimal(solution), mc);
    report.mc_estimate = result.estimate;
    report.mc_stderr = result.std_error;
    report.mc_z = mc_z_score(result, report.phi_w0);
    report.mc_ok = *report.mc_z <= cfg.z_limit;
  }
  return report;
}

}  // namespace bequest
