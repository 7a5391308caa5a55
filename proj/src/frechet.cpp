#include "dnls/frechet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "dnls/errors.hpp"
#include "dnls/evolution.hpp"
#include "dnls/spectral.hpp"

namespace dnls {

namespace {

void require_odd_power(int p) {
  if (p < 3 || p % 2 == 0) throw DomainError("linearized solvers require an odd integer p >= 3");
}

using TermMap = std::map<std::pair<Partition, Signal>, WirtingerPolynomial>;

void add_term(TermMap& m, Partition tau, Signal eps, const WirtingerPolynomial& F) {
  if (F.is_zero()) return;
  auto key = std::make_pair(std::move(tau), std::move(eps));
  auto it = m.find(key);
  if (it == m.end()) {
    m.emplace(std::move(key), F);
  } else {
    it->second += F;
    if (it->second.is_zero()) m.erase(it);
  }
}

}  // namespace

std::vector<PsiTerm> psi_terms(int k, int p) {
  if (k < 1 || k > kMaxFrechetOrder) throw DomainError("Frechet order must lie in 1.." + std::to_string(kMaxFrechetOrder));
  const auto N = WirtingerPolynomial::power_nonlinearity(p);
  TermMap cur;
  add_term(cur, Partition(std::vector<std::vector<int>>{{1}}), Signal{0}, N.d_dz());
  add_term(cur, Partition(std::vector<std::vector<int>>{{1}}), Signal{1}, N.d_dzbar());
  for (int order = 1; order < k; ++order) {
    TermMap next;
    for (const auto& [key, F] : cur) {
      const auto& [tau, eps] = key;
      Partition grown = tau;
      grown.groups.push_back({order + 1});
      Signal e0 = eps, e1 = eps;
      e0.push_back(0);
      e1.push_back(1);
      add_term(next, grown, e0, F.d_dz());
      add_term(next, grown, e1, F.d_dzbar());
      for (auto& ext : extend_partition(tau)) add_term(next, std::move(ext), eps, F);
    }
    cur = std::move(next);
  }
  std::vector<PsiTerm> out;
  out.reserve(cur.size());
  for (auto& [key, F] : cur) out.push_back(PsiTerm{key.first, key.second, F});
  return out;
}

Trajectory eval_multilinear(const std::map<int, MultilinearFactor>& lower, const Partition& tau, const Signal& eps,
                            const std::vector<LatticeFunction>& args) {
  if (!tau.valid()) throw DomainError("invalid partition " + tau.to_string());
  if (static_cast<int>(eps.size()) != tau.size()) throw DomainError("signal length must equal the group count");
  if (static_cast<int>(args.size()) != tau.n()) throw DomainError("argument count must equal the partition order");
  Trajectory out;
  for (std::size_t j = 0; j < tau.groups.size(); ++j) {
    const auto& g = tau.groups[j];
    auto it = lower.find(static_cast<int>(g.size()));
    if (it == lower.end()) throw DomainError("missing multilinear factor of arity " + std::to_string(g.size()));
    std::vector<LatticeFunction> sub;
    for (int i : g) sub.push_back(args[i - 1]);
    Trajectory f = it->second(sub);
    if (j == 0) {
      out.grid = f.grid;
      out.stride = f.stride;
      out.times = f.times;
      out.snapshots.reserve(f.size());
      for (const auto& s : f.snapshots) {
        Field v = s.field();
        if (eps[j]) for (auto& z : v) z = std::conj(z);
        out.snapshots.emplace_back(s.box(), std::move(v));
      }
      continue;
    }
    if (f.size() != out.size()) throw DomainError("multilinear factors are on different grids");
    for (std::size_t t = 0; t < f.size(); ++t) {
      if (std::abs(f.times[t] - out.times[t]) > 1e-12 * (1.0 + std::abs(out.times[t])))
        throw DomainError("multilinear factors are on different grids");
      Field v = out.snapshots[t].field();
      const auto& w = f.snapshots[t].values();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= eps[j] ? std::conj(w[i]) : w[i];
      out.snapshots[t] = LatticeFunction(f.snapshots[t].box(), std::move(v));
    }
  }
  for (const auto& s : out.snapshots) {
    out.step_sup.push_back(sup_norm(s));
    out.step_l2.push_back(l2_norm(s));
  }
  return out;
}

namespace {

struct CompiledMonomial {
  int a;
  int b;
  double c;
};

struct CompiledTerm {
  std::vector<CompiledMonomial> coeff;
  std::vector<std::pair<int, bool>> factors;  // field index, conjugated
};

struct FieldPlan {
  std::vector<std::uint64_t> key;
  unsigned mask = 0;
  int order = 0;
  std::vector<CompiledTerm> terms;
};

}  // namespace

FrechetEngine::FrechetEngine(int mu, int p, LatticeFunction u0, TimeGrid grid, SolveOptions opts)
    : mu_(mu), p_(p), u0_(std::move(u0)), grid_(grid), opts_(opts) {
  if (mu != 1 && mu != -1) throw DomainError("mu must be +1 or -1");
  require_odd_power(p);
  opts_.store = true;
  opts_.sink = nullptr;
}

const Trajectory& FrechetEngine::base() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(Key{});
    if (it != cache_.end()) return *it->second;
  }
  run({});
  std::lock_guard<std::mutex> lock(mutex_);
  return *cache_.at(Key{});
}

std::shared_ptr<const Trajectory> FrechetEngine::psi(const std::vector<LatticeFunction>& args) {
  if (args.empty() || static_cast<int>(args.size()) > kMaxFrechetOrder)
    throw DomainError("Frechet order must lie in 1.." + std::to_string(kMaxFrechetOrder));
  Key key;
  for (const auto& a : args) {
    if (!(a.box() == u0_.box())) throw DomainError("Frechet argument lives on a different box");
    key.push_back(a.content_hash());
  }
  std::sort(key.begin(), key.end());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      ++hits_;
      return it->second;
    }
    ++misses_;
  }
  run(args);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.at(key);
}

std::size_t FrechetEngine::cache_entries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}
std::size_t FrechetEngine::hits() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return hits_;
}
std::size_t FrechetEngine::misses() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return misses_;
}

void FrechetEngine::run(const std::vector<LatticeFunction>& args) {
  const BoxSpec& box = u0_.box();
  const std::size_t n = box.sites();
  const int k = static_cast<int>(args.size());
  std::vector<std::uint64_t> hashes;
  for (const auto& a : args) hashes.push_back(a.content_hash());

  // One field per distinct argument multiset among the nonempty subsets.
  std::vector<FieldPlan> plans;
  std::map<Key, int> index_of;
  auto key_of = [&](unsigned mask) {
    Key key;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) key.push_back(hashes[i]);
    std::sort(key.begin(), key.end());
    return key;
  };
  std::vector<unsigned> masks;
  for (unsigned m = 1; m < (1u << k); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });
  for (unsigned m : masks) {
    Key key = key_of(m);
    if (index_of.count(key)) continue;
    index_of.emplace(key, static_cast<int>(plans.size()));
    plans.push_back(FieldPlan{key, m, std::popcount(m), {}});
  }
  int max_a = 1, max_b = 1;
  for (auto& plan : plans) {
    std::vector<int> elems;
    for (int i = 0; i < k; ++i)
      if (plan.mask & (1u << i)) elems.push_back(i);
    for (const auto& term : psi_terms(plan.order, p_)) {
      CompiledTerm ct;
      for (const auto& [pw, c] : term.F.terms()) {
        ct.coeff.push_back({pw.first, pw.second, boost::rational_cast<double>(c)});
        max_a = std::max(max_a, pw.first);
        max_b = std::max(max_b, pw.second);
      }
      for (std::size_t j = 0; j < term.tau.groups.size(); ++j) {
        unsigned sub = 0;
        for (int idx : term.tau.groups[j]) sub |= 1u << elems[idx - 1];
        ct.factors.emplace_back(index_of.at(key_of(sub)), term.eps[j] != 0);
      }
      plan.terms.push_back(std::move(ct));
    }
  }

  const std::size_t F = plans.size();
  std::vector<Field> X(F + 1, Field(n, cplx(0.0, 0.0)));
  X[0] = u0_.field();
  for (std::size_t f = 0; f < F; ++f)
    if (plans[f].order == 1) {
      int i = std::countr_zero(plans[f].mask);
      X[f + 1] = args[i].field();
    }

  const cplx half_i(0.0, 0.5), mu_i(0.0, static_cast<double>(mu_));
  Field scratch(n), lap(n);
  std::vector<cplx> pz(max_a + 1), pzb(max_b + 1);
  auto rhs = [&](const std::vector<Field>& S, std::vector<Field>& out) {
    kernels::semilinear_rhs(box, mu_, p_, S[0], out[0], scratch);
    for (std::size_t f = 0; f < F; ++f) {
      kernels::laplacian_stencil(box, S[f + 1].data(), lap.data());
      Field& o = out[f + 1];
      for (std::size_t i = 0; i < n; ++i) {
        const cplx z = S[0][i];
        pz[0] = pzb[0] = cplx(1.0, 0.0);
        for (int a = 1; a <= max_a; ++a) pz[a] = pz[a - 1] * z;
        for (int b = 1; b <= max_b; ++b) pzb[b] = pzb[b - 1] * std::conj(z);
        cplx acc(0.0, 0.0);
        for (const auto& t : plans[f].terms) {
          cplx c(0.0, 0.0);
          for (const auto& m : t.coeff) c += m.c * pz[m.a] * pzb[m.b];
          for (const auto& [g, conj] : t.factors) {
            const cplx w = S[g + 1][i];
            c *= conj ? std::conj(w) : w;
          }
          acc += c;
        }
        o[i] = half_i * lap[i] - mu_i * acc;
      }
    }
  };

  std::vector<TrajectoryRecorder> recs;
  recs.emplace_back(grid_, box, opts_, "frechet base");
  for (std::size_t f = 0; f < F; ++f) recs.emplace_back(grid_, box, opts_, "frechet order " + std::to_string(plans[f].order));
  for (std::size_t f = 0; f <= F; ++f) recs[f].record(0, X[f]);

  std::vector<Field> k1(F + 1, Field(n)), k2 = k1, k3 = k1, k4 = k1, tmp = k1;
  const double h = grid_.dt;
  for (long s = 1; s <= grid_.steps; ++s) {
    rhs(X, k1);
    for (std::size_t f = 0; f <= F; ++f)
      for (std::size_t i = 0; i < n; ++i) tmp[f][i] = X[f][i] + 0.5 * h * k1[f][i];
    rhs(tmp, k2);
    for (std::size_t f = 0; f <= F; ++f)
      for (std::size_t i = 0; i < n; ++i) tmp[f][i] = X[f][i] + 0.5 * h * k2[f][i];
    rhs(tmp, k3);
    for (std::size_t f = 0; f <= F; ++f)
      for (std::size_t i = 0; i < n; ++i) tmp[f][i] = X[f][i] + h * k3[f][i];
    rhs(tmp, k4);
    for (std::size_t f = 0; f <= F; ++f)
      for (std::size_t i = 0; i < n; ++i)
        X[f][i] += (h / 6.0) * (k1[f][i] + 2.0 * k2[f][i] + 2.0 * k3[f][i] + k4[f][i]);
    for (std::size_t f = 0; f <= F; ++f) recs[f].record(s, X[f]);
  }

  std::lock_guard<std::mutex> lock(mutex_);
  cache_.try_emplace(Key{}, std::make_shared<const Trajectory>(std::move(recs[0]).finish()));
  for (std::size_t f = 0; f < F; ++f)
    cache_.try_emplace(plans[f].key, std::make_shared<const Trajectory>(std::move(recs[f + 1]).finish()));
}

Trajectory solve_psi1(const Trajectory& base, const LatticeFunction& v, const TimeGrid& grid, int mu, int p,
                      const SolveOptions& opts) {
  if (!(base.grid == grid)) throw DomainError("base trajectory grid does not match the requested grid");
  if (base.snapshots.empty()) throw DomainError("base trajectory holds no snapshots");
  SolveOptions o = opts;
  o.stride = base.stride;
  FrechetEngine engine(mu, p, base.front(), grid, o);
  return *engine.psi({v});
}

Trajectory solve_psi_k(int mu, int p, const LatticeFunction& u0, const std::vector<LatticeFunction>& v,
                       const TimeGrid& grid, const SolveOptions& opts) {
  FrechetEngine engine(mu, p, u0, grid, opts);
  return *engine.psi(v);
}

FiniteDifferenceReport frechet_difference_check(FrechetEngine& engine, const std::vector<LatticeFunction>& v,
                                                const std::vector<double>& h) {
  const int k = static_cast<int>(v.size());
  if (k < 1 || k > 3) throw DomainError("finite-difference checks cover orders 1..3");
  if (h.empty()) throw DomainError("finite-difference check needs at least one step size");
  auto psi = engine.psi(v);
  FiniteDifferenceReport rep;
  rep.order = k;
  rep.h = h;
  for (double hh : h) {
    if (!(hh > 0.0)) throw DomainError("finite-difference step sizes must be positive");
    std::vector<Field> acc(psi->size(), Field(engine.u0().size(), cplx(0.0, 0.0)));
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      LatticeFunction data = engine.u0();
      for (int i = 0; i < k; ++i)
        if (mask & (1u << i)) data = data + v[i] * cplx(hh, 0.0);
      const double sign = ((k - std::popcount(mask)) % 2 == 0) ? 1.0 : -1.0;
      auto traj = solve_semilinear_rk4(SemilinearProblem{engine.mu(), static_cast<double>(engine.p()), data},
                                       engine.grid(), engine.options());
      for (std::size_t t = 0; t < acc.size(); ++t) {
        const auto& w = traj.snapshots[t].values();
        for (std::size_t i = 0; i < w.size(); ++i) acc[t][i] += sign * w[i];
      }
    }
    const double hk = std::pow(hh, k);
    double worst = 0.0;
    for (std::size_t t = 0; t < acc.size(); ++t) {
      const auto& w = psi->snapshots[t].values();
      for (std::size_t i = 0; i < w.size(); ++i) acc[t][i] -= hk * w[i];
      worst = std::max(worst, l2_norm(std::span<const cplx>(acc[t])));
    }
    rep.remainder.push_back(worst);
    rep.scaled.push_back(worst / hk);
  }
  for (std::size_t i = 1; i < rep.scaled.size(); ++i) rep.improvement.push_back(rep.scaled[i - 1] / rep.scaled[i]);
  return rep;
}

FiniteDifferenceReport frechet_order_check(int mu, int p, const LatticeFunction& u0, const std::vector<LatticeFunction>& v,
                                           const TimeGrid& grid, const std::vector<double>& h,
                                           const SolveOptions& opts) {
  FrechetEngine engine(mu, p, u0, grid, opts);
  return frechet_difference_check(engine, v, h);
}

}  // namespace dnls
