// Threshold descent: repeatedly find a feasible loading with a weighted
// violation local search, then tighten the threshold row f.y <= best - step
// and search again.

#include <algorithm>
#include <atomic>
#include <mutex>
#include <random>
#include <thread>

#include "alo/solver.h"
#include "compiled_problem.h"
#include "splitmix.h"

namespace alo {

using internal::CompiledProblem;
using internal::ObjectiveKind;
using internal::SolveClock;
using internal::SplitMix64;

namespace {

constexpr int kSliceSteps = 64;
constexpr int kSampledContainers = 6;
constexpr int kSampledPartners = 4;
constexpr double kNoise = 0.02;
constexpr double kPlateauMove = 0.3;

struct Shared {
  const CompiledProblem& p;
  const SolveConfig& config;
  SolveClock clock;
  std::int64_t cap = 0;
  std::int64_t target = 0;
  Int128 initial_threshold = 0;
  bool threshold_from_start = false;

  std::mutex mu;
  bool found = false;
  Int128 best = 0;
  std::int64_t best_mass = 0;
  std::vector<int> best_pos;
  std::vector<TracePoint> trace;
  std::atomic<std::uint64_t> version{0};
  std::atomic<std::uint64_t> steps{0};
  std::atomic<bool> stop{false};
  SolveStatus status = SolveStatus::kNoSolutionFound;

  Shared(const CompiledProblem& problem, const SolveConfig& cfg)
      : p(problem), config(cfg), clock(cfg.clock) {}

  // Returns the current best objective after offering a candidate.
  Int128 Offer(const std::vector<int>& pos, Int128 obj, std::int64_t mass) {
    std::lock_guard<std::mutex> lock(mu);
    if (!found || obj < best) {
      found = true;
      best = obj;
      best_mass = mass;
      best_pos = pos;
      trace.push_back({clock.Elapsed(steps.load()), p.ObjectiveValue(obj), mass});
      version.fetch_add(1);
      ObjectiveKind kind = p.objective_kind();
      if (kind == ObjectiveKind::kNull) {
        status = SolveStatus::kOptimal;
        stop = true;
      } else if (kind == ObjectiveKind::kMass && mass >= target) {
        status = mass >= cap ? SolveStatus::kOptimal : SolveStatus::kTauReached;
        stop = true;
      }
    }
    return best;
  }

  Int128 Best() {
    std::lock_guard<std::mutex> lock(mu);
    return best;
  }
};

class Walker {
 public:
  Walker(Shared& shared, std::uint64_t seed)
      : s_(shared),
        p_(shared.p),
        rng_(seed),
        t_(p_.row_count()),
        act_(p_.row_count() + 1, 0),
        rhs_(p_.row_count() + 1, 0),
        norm_(p_.row_count() + 1, 1),
        weight_(p_.row_count() + 1, 1.0),
        delta_(p_.row_count() + 1, 0),
        in_violated_(p_.row_count() + 1, -1),
        pos_(p_.container_count(), -1),
        last_moved_(p_.container_count(), 0) {
    for (std::size_t r = 0; r < p_.row_count(); ++r) {
      rhs_[r] = p_.row(r).rhs;
      norm_[r] = p_.row(r).norm;
    }
    double onorm = 1;
    for (std::size_t v = 0; v < p_.var_count(); ++v) {
      Int128 f = p_.objective(v);
      onorm = std::max(onorm, static_cast<double>(f < 0 ? -f : f));
    }
    norm_[t_] = onorm;
    for (std::size_t r = 0; r < p_.row_count(); ++r) Refresh(r);
    BuildRowContainers();
    stall_limit_ = std::max<std::uint64_t>(20000, 200 * p_.container_count());
    if (s_.threshold_from_start) {
      threshold_on_ = true;
      rhs_[t_] = s_.initial_threshold;
    }
    Restart();
  }

  void Run(int steps) {
    for (int i = 0; i < steps && !s_.stop.load(std::memory_order_relaxed); ++i) {
      Sync();
      if (violated_.empty()) {
        Feasible();
        continue;
      }
      Step();
      ++steps_;
      if (steps_ - last_progress_ > stall_limit_) Restart();
    }
  }

 private:
  void BuildRowContainers() {
    row_containers_.assign(p_.row_count(), {});
    for (std::size_t c = 0; c < p_.container_count(); ++c) {
      for (const auto& ch : p_.choices(c)) {
        for (const auto& e : p_.column(ch.var)) {
          auto& list = row_containers_[e.row];
          if (list.empty() || list.back() != c) list.push_back(c);
        }
      }
      if (!p_.choices(c).empty()) movable_.push_back(c);
    }
  }

  std::size_t Rand(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  double Unit() { return std::uniform_real_distribution<double>(0, 1)(rng_); }

  bool Violated(std::size_t r, Int128 a) const {
    if (r == t_ && !threshold_on_) return false;
    return a > rhs_[r];
  }
  double Viol(std::size_t r, Int128 a) const {
    return Violated(r, a) ? static_cast<double>(a - rhs_[r]) / norm_[r] : 0.0;
  }

  void Refresh(std::size_t r) {
    bool v = Violated(r, act_[r]);
    if (v && in_violated_[r] < 0) {
      in_violated_[r] = static_cast<int>(violated_.size());
      violated_.push_back(r);
    } else if (!v && in_violated_[r] >= 0) {
      std::size_t slot = in_violated_[r];
      std::size_t last = violated_.back();
      violated_[slot] = last;
      in_violated_[last] = static_cast<int>(slot);
      violated_.pop_back();
      in_violated_[r] = -1;
    }
  }

  struct Flip {
    std::size_t var;
    int sign;
  };

  // A move sets up to two containers to new choice indices (-1 = out).
  struct Move {
    std::size_t c[2] = {0, 0};
    int to[2] = {-1, -1};
    int count = 0;
  };

  int Flips(const Move& m, Flip* out) const {
    int n = 0;
    for (int i = 0; i < m.count; ++i) {
      std::size_t c = m.c[i];
      if (pos_[c] >= 0) out[n++] = {p_.choices(c)[pos_[c]].var, -1};
      if (m.to[i] >= 0) out[n++] = {p_.choices(c)[m.to[i]].var, 1};
    }
    return n;
  }

  double Delta(const Move& m) {
    Flip flips[4];
    int n = Flips(m, flips);
    Int128 dobj = 0;
    for (int i = 0; i < n; ++i) {
      dobj += flips[i].sign * p_.objective(flips[i].var);
      for (const auto& e : p_.column(flips[i].var)) {
        if (delta_[e.row] == 0) touched_.push_back(e.row);
        delta_[e.row] += flips[i].sign * e.coef;
      }
    }
    double d = 0;
    for (std::size_t r : touched_) {
      if (delta_[r] != 0) {
        d += weight_[r] * (Viol(r, act_[r] + delta_[r]) - Viol(r, act_[r]));
      }
      delta_[r] = 0;
    }
    touched_.clear();
    if (threshold_on_ && dobj != 0) {
      d += weight_[t_] * (Viol(t_, act_[t_] + dobj) - Viol(t_, act_[t_]));
    }
    return d;
  }

  void ApplyVar(std::size_t var, int sign) {
    for (const auto& e : p_.column(var)) {
      act_[e.row] += sign * e.coef;
      Refresh(e.row);
    }
    Int128 f = p_.objective(var);
    if (f != 0) {
      act_[t_] += sign * f;
      Refresh(t_);
    }
  }

  // Callers subtract the old placement mass first (see Place).
  void Apply(const Move& m) {
    Flip flips[4];
    int n = Flips(m, flips);
    for (int i = 0; i < n; ++i) ApplyVar(flips[i].var, flips[i].sign);
    for (int i = 0; i < m.count; ++i) {
      pos_[m.c[i]] = m.to[i];
      mass_ += (m.to[i] >= 0 ? 1 : 0) * p_.mass(m.c[i]);
      last_moved_[m.c[i]] = steps_;
    }
  }

  void Restart() {
    for (std::size_t c = 0; c < pos_.size(); ++c) {
      if (pos_[c] >= 0) ApplyVar(p_.choices(c)[pos_[c]].var, -1);
      pos_[c] = -1;
    }
    mass_ = 0;
    std::fill(weight_.begin(), weight_.end(), 1.0);
    // Greedy random construction: place containers where they add no
    // violation, threshold row excluded.
    std::vector<std::size_t> order = movable_;
    std::shuffle(order.begin(), order.end(), rng_);
    bool saved = threshold_on_;
    threshold_on_ = false;
    for (std::size_t c : order) {
      const auto& choices = p_.choices(c);
      for (int attempt = 0; attempt < 5; ++attempt) {
        Move m;
        m.c[0] = c;
        m.to[0] = static_cast<int>(Rand(choices.size()));
        m.count = 1;
        if (Delta(m) <= 0) {
          Place(m);
          break;
        }
      }
    }
    threshold_on_ = saved;
    Refresh(t_);
    last_progress_ = steps_;
  }

  void Place(const Move& m) {
    for (int i = 0; i < m.count; ++i) {
      if (pos_[m.c[i]] >= 0) mass_ -= p_.mass(m.c[i]);
    }
    Apply(m);
  }

  void Sync() {
    std::uint64_t v = s_.version.load(std::memory_order_acquire);
    if (v == seen_version_) return;
    seen_version_ = v;
    Int128 best = s_.Best();
    SetThreshold(best - s_.config.threshold_step * p_.objective_scale());
  }

  void SetThreshold(Int128 rhs) {
    if (p_.objective_kind() == ObjectiveKind::kNull) return;
    if (threshold_on_ && rhs >= rhs_[t_]) return;
    threshold_on_ = true;
    rhs_[t_] = rhs;
    Refresh(t_);
    last_progress_ = steps_;
  }

  void Feasible() {
    Int128 best = s_.Offer(pos_, act_[t_], mass_);
    seen_version_ = s_.version.load(std::memory_order_acquire);
    SetThreshold(best - s_.config.threshold_step * p_.objective_scale());
    if (p_.objective_kind() == ObjectiveKind::kNull) s_.stop = true;
  }

  bool SameDomain(std::size_t a, std::size_t b) const {
    return p_.choices(a).size() == p_.choices(b).size() &&
           p_.choices(a).front().bin == p_.choices(b).front().bin;
  }

  void Step() {
    std::size_t r = violated_[Rand(violated_.size())];
    const std::vector<std::size_t>& pool = r == t_ ? movable_ : row_containers_[r];
    if (pool.empty()) return;

    Move best;
    double best_delta = 0;
    int ties = 0;
    bool have = false;
    Move noise;
    bool have_noise = false;
    int seen = 0;
    auto consider = [&](const Move& m) {
      double d = Delta(m);
      ++seen;
      if (Rand(seen) == 0) {
        noise = m;
        have_noise = true;
      }
      bool tabu = false;
      for (int i = 0; i < m.count; ++i) {
        tabu = tabu || (last_moved_[m.c[i]] + tenure_ > steps_ && steps_ > tenure_);
      }
      if (tabu && d >= -1e-12) return;
      if (!have || d < best_delta - 1e-12) {
        best = m;
        best_delta = d;
        have = true;
        ties = 1;
      } else if (d <= best_delta + 1e-12 && Rand(++ties) == 0) {
        best = m;
      }
    };

    int samples = std::min<int>(kSampledContainers, pool.size());
    for (int k = 0; k < samples; ++k) {
      std::size_t c = pool[Rand(pool.size())];
      int n = static_cast<int>(p_.choices(c).size());
      Move m;
      m.c[0] = c;
      m.count = 1;
      for (int to = -1; to < n; ++to) {
        if (to == pos_[c]) continue;
        m.to[0] = to;
        consider(m);
      }
      for (int k2 = 0; k2 < kSampledPartners; ++k2) {
        std::size_t c2 = movable_[Rand(movable_.size())];
        if (c2 == c || pos_[c2] == pos_[c] || !SameDomain(c, c2)) continue;
        Move x;
        x.c[0] = c;
        x.to[0] = pos_[c2];
        x.c[1] = c2;
        x.to[1] = pos_[c];
        x.count = 2;
        consider(x);
      }
    }

    if (have_noise && Unit() < kNoise) {
      Place(noise);
      return;
    }
    if (have && best_delta < -1e-12) {
      Place(best);
      return;
    }
    // Local minimum: raise the weights of the violated rows.
    for (std::size_t v : violated_) weight_[v] += 1.0;
    if (have && Unit() < kPlateauMove) Place(best);
  }

  Shared& s_;
  const CompiledProblem& p_;
  std::mt19937_64 rng_;
  const std::size_t t_;  // threshold row slot
  bool threshold_on_ = false;
  std::vector<Int128> act_;
  std::vector<Int128> rhs_;
  std::vector<double> norm_;
  std::vector<double> weight_;
  std::vector<Int128> delta_;
  std::vector<std::size_t> touched_;
  std::vector<std::size_t> violated_;
  std::vector<int> in_violated_;
  std::vector<int> pos_;
  std::vector<std::uint64_t> last_moved_;
  std::vector<std::vector<std::size_t>> row_containers_;
  std::vector<std::size_t> movable_;
  std::int64_t mass_ = 0;
  std::uint64_t steps_ = 0;
  std::uint64_t last_progress_ = 0;
  std::uint64_t stall_limit_ = 0;
  std::uint64_t seen_version_ = 0;
  std::uint64_t tenure_ = 3;
};

}  // namespace

SolveReport SolveThresholdDescent(const ConstraintSystem& system,
                                  const Payload& payload,
                                  const AircraftSpec& spec,
                                  const SolveConfig& config) {
  config.Validate();
  CompiledProblem p(system, payload, spec);
  Shared shared(p, config);
  shared.cap = p.mass_cap();
  shared.target = internal::TauTarget(config.tau, shared.cap);
  if (config.warm_start && p.objective_kind() == ObjectiveKind::kMass) {
    shared.threshold_from_start = true;
    shared.initial_threshold = -Int128(shared.target);
  }

  std::vector<Walker> walkers;
  walkers.reserve(config.restarts);
  for (int i = 0; i < config.restarts; ++i) {
    walkers.emplace_back(shared, SplitMix64(config.seed * 0x100000001B3ULL + i));
  }

  auto check_budget = [&]() {
    if (shared.clock.Elapsed(shared.steps.load()) >= config.time_budget) {
      shared.stop = true;
    }
  };
  auto run = [&](std::size_t first, std::size_t stride) {
    while (!shared.stop.load()) {
      for (std::size_t w = first; w < walkers.size() && !shared.stop.load(); w += stride) {
        walkers[w].Run(kSliceSteps);
        shared.steps.fetch_add(kSliceSteps);
        check_budget();
      }
    }
  };
  int threads = std::min<int>(config.threads, walkers.size());
  if (threads <= 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(run, t, threads);
    for (auto& th : pool) th.join();
  }

  SolveReport report;
  report.n_l = CountNonzeros(system);
  report.steps = shared.steps.load();
  report.wall_time = shared.clock.WallSeconds();
  report.trace = std::move(shared.trace);
  if (shared.found) {
    report.incumbent = p.ToAssignment(shared.best_pos);
    report.mass = shared.best_mass;
    report.objective = p.ObjectiveValue(shared.best);
    report.status = shared.stop && shared.status != SolveStatus::kNoSolutionFound
                        ? shared.status
                        : SolveStatus::kBudgetExhausted;
  } else {
    report.status = SolveStatus::kNoSolutionFound;
  }
  return report;
}

}  // namespace alo
