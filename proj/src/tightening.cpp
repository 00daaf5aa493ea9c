#include "dmilp/tightening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "dmilp/parallel.hpp"

namespace dmilp {

TighteningState TighteningState::initial(std::size_t m, std::size_t p) {
  constexpr double lo = std::numeric_limits<double>::lowest();
  constexpr double hi = std::numeric_limits<double>::max();
  TighteningState s;
  s.s_hi.assign(m, Vector(p, lo));
  s.s_lo.assign(m, Vector(p, hi));
  s.rho_i.assign(m, Vector(p, 0.0));
  s.rho.assign(p, 0.0);
  s.gamma_hi.assign(m, lo);
  s.gamma_lo.assign(m, hi);
  return s;
}

void TighteningState::observe(std::span<const Vector> images, std::span<const double> costs) {
  const std::size_t m = num_agents();
  const std::size_t p = num_coupling();
  if (images.size() != m || costs.size() != m)
    throw PreconditionError("observe: expected " + std::to_string(m) + " images and costs");
  for (const auto& img : images)
    if (img.size() != p) throw PreconditionError("observe: image length differs from p");

  const double scale = static_cast<double>(p);
  std::fill(rho.begin(), rho.end(), 0.0);
  double spread = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      s_hi[i][j] = std::max(s_hi[i][j], images[i][j]);
      s_lo[i][j] = std::min(s_lo[i][j], images[i][j]);
      rho_i[i][j] = s_hi[i][j] - s_lo[i][j];
      rho[j] = std::max(rho[j], rho_i[i][j]);
    }
    gamma_hi[i] = std::max(gamma_hi[i], costs[i]);
    gamma_lo[i] = std::min(gamma_lo[i], costs[i]);
    spread = std::max(spread, gamma_hi[i] - gamma_lo[i]);
  }
  for (double& r : rho) r *= scale;
  gamma = scale * spread;
  ++k;
}

TighteningState observe(const TighteningState& state, std::span<const Vector> images,
                        std::span<const double> costs) {
  TighteningState next = state;
  next.observe(images, costs);
  return next;
}

namespace {

std::mutex cache_mutex;
std::map<std::string, WorstCaseBounds>& cache() {
  static std::map<std::string, WorstCaseBounds> c;
  return c;
}

}  // namespace

WorstCaseBounds worst_case(const CoupledInstance& instance, std::size_t jobs,
                           const MilpOptions& options) {
  const std::string key = fingerprint(instance);
  {
    const std::lock_guard lock(cache_mutex);
    if (const auto it = cache().find(key); it != cache().end()) return it->second;
  }

  const std::size_t m = instance.num_agents();
  const std::size_t p = instance.num_coupling();
  // Task t covers agent t / (p + 1) and objective row t % (p + 1), where the
  // last row is the cost vector. Each task stores max - min of its linear form.
  const std::size_t per_agent = p + 1;
  std::vector<double> spreads(m * per_agent, 0.0);
  std::vector<MilpBlock> blocks;
  blocks.reserve(m);
  for (const auto& a : instance.agents) blocks.push_back(MilpBlock::from_agent(a));

  parallel_for(m * per_agent, jobs, [&](std::size_t t) {
    const std::size_t i = t / per_agent;
    const std::size_t row = t % per_agent;
    const AgentProblem& agent = instance.agents[i];
    Vector form = row < p ? Vector(agent.A.row(row).begin(), agent.A.row(row).end()) : agent.c;
    const MilpResult lo = solve_milp(blocks[i], form, options);
    for (double& v : form) v = -v;
    const MilpResult hi = solve_milp(blocks[i], form, options);
    if (lo.status != MilpStatus::Optimal || hi.status != MilpStatus::Optimal)
      throw ValidationError(ValidationKind::InfeasibleLocalSet,
                            "worst_case: agent " + std::to_string(agent.id) + " has an empty local set");
    spreads[t] = std::max(0.0, -hi.value - lo.value);
  });

  WorstCaseBounds bounds;
  bounds.rho_tilde.assign(p, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j)
      bounds.rho_tilde[j] = std::max(bounds.rho_tilde[j], spreads[i * per_agent + j]);
    bounds.gamma_tilde = std::max(bounds.gamma_tilde, spreads[i * per_agent + p]);
  }
  for (double& r : bounds.rho_tilde) r *= static_cast<double>(p);
  bounds.gamma_tilde *= static_cast<double>(p);

  const std::lock_guard lock(cache_mutex);
  cache().emplace(key, bounds);
  return bounds;
}

namespace {

bool same_snapshot(const TighteningSnapshot& a, const TighteningSnapshot& b, double tol) {
  if (std::abs(a.gamma - b.gamma) > tol) return false;
  if (a.rho.size() != b.rho.size()) return false;
  for (std::size_t j = 0; j < a.rho.size(); ++j)
    if (std::abs(a.rho[j] - b.rho[j]) > tol) return false;
  return true;
}

}  // namespace

std::optional<std::size_t> settled(std::span<const TighteningSnapshot> history, double tol) {
  if (history.empty()) return std::nullopt;
  std::size_t last_change = 0;
  for (std::size_t i = 1; i < history.size(); ++i)
    if (!same_snapshot(history[i], history[i - 1], tol)) last_change = i;
  if (history.size() > 1 && last_change == history.size() - 1) return std::nullopt;
  return last_change + 1;
}

}  // namespace dmilp
