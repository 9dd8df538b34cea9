#include "walras/lyapunov.hpp"

#include <algorithm>
#include <set>

#include "walras/auction.hpp"

namespace walras {

Rat SeparableFrictions::beta_at(int j, const Rat& p) const {
  const auto& steps = beta.at(j);
  Rat v = steps.front().second;
  for (const auto& [start, val] : steps)
    if (start <= p) v = val;
  return v;
}

std::vector<Rat> SeparableFrictions::beta_vector(const PriceVector& p) const {
  std::vector<Rat> out;
  for (std::size_t j = 0; j < p.size(); ++j) out.push_back(beta_at(static_cast<int>(j), p[j]));
  return out;
}

bool SeparableFrictions::price_independent() const {
  return std::all_of(beta.begin(), beta.end(), [](const auto& s) { return s.size() == 1; });
}

SeparableFrictions SeparableFrictions::constant(std::vector<Rat> alpha, const std::vector<Rat>& beta) {
  SeparableFrictions f;
  f.alpha = std::move(alpha);
  for (const auto& b : beta) f.beta.push_back({{Rat(0), b}});
  return f;
}

std::optional<SeparableFrictions> detect_separable(const MarketInstance& inst) {
  SeparableFrictions f;
  f.alpha.assign(inst.n(), Rat(0));
  std::vector<char> alpha_set(inst.n(), 0);
  for (int j = 0; j < inst.m(); ++j) {
    std::set<Rat> starts{Rat(0)};
    for (const auto& b : inst.buyers())
      for (const auto& [x, y] : b.payments[j].breakpoints()) starts.insert(x);
    std::vector<std::pair<Rat, Rat>> steps;
    for (const auto& t : starts) {
      const Rat b0 = inst.buyer(0).payments[j].right_slope(t);
      for (int i = 0; i < inst.n(); ++i) {
        const Rat a = inst.buyer(i).payments[j].right_slope(t) / b0;
        if (alpha_set[i] && a != f.alpha[i]) return std::nullopt;
        f.alpha[i] = a;
        alpha_set[i] = 1;
      }
      if (steps.empty() || steps.back().second != b0) steps.emplace_back(t, b0);
    }
    f.beta.push_back(std::move(steps));
  }
  return f;
}

Rat eval_lyapunov(const MarketInstance& inst, const PriceVector& p) {
  if (!inst.frictionless()) throw WrongMode("the standard potential needs identity payments");
  validate_price(inst, p);
  const Lattice& lat = inst.lattice();
  Rat total;
  for (const auto& b : inst.buyers()) {
    std::optional<Rat> best;
    for (std::size_t k = 0; k < lat.size(); ++k) {
      Rat u = b.valuation.at_index(k);
      for (int j = 0; j < inst.m(); ++j) u -= p[j] * lat.point(k)[j];
      if (!best || u > *best) best = u;
    }
    total += *best;
  }
  for (int j = 0; j < inst.m(); ++j) total += p[j] * inst.supply()[j];
  return total;
}

Rat eval_scaled_lyapunov(const MarketInstance& inst, const SeparableFrictions& fr, const PriceVector& p) {
  validate_price(inst, p);
  if (static_cast<int>(fr.alpha.size()) != inst.n() || static_cast<int>(fr.beta.size()) != inst.m())
    throw WrongMode("separable frictions do not match the instance shape");
  const std::vector<Rat> beta = fr.beta_vector(p);
  for (int i = 0; i < inst.n(); ++i)
    for (int j = 0; j < inst.m(); ++j)
      if (inst.buyer(i).payments[j].right_slope(p[j]) != fr.alpha[i] * beta[j])
        throw WrongMode("slopes are not separable at this price");
  const Lattice& lat = inst.lattice();
  Rat total;
  for (int i = 0; i < inst.n(); ++i) {
    std::optional<Rat> best;
    for (std::size_t k = 0; k < lat.size(); ++k) {
      Rat u = inst.buyer(i).valuation.at_index(k) / fr.alpha[i];
      for (int j = 0; j < inst.m(); ++j) u -= beta[j] * p[j] * lat.point(k)[j];
      if (!best || u > *best) best = u;
    }
    total += *best;
  }
  for (int j = 0; j < inst.m(); ++j) total += beta[j] * p[j] * inst.supply()[j];
  return total;
}

Rat directional_derivative(const MarketInstance& inst, const SeparableFrictions& fr,
                           const PriceVector& p, Mask x) {
  if (x == 0) return Rat(0);
  const std::vector<Rat> beta = fr.beta_vector(p);
  Direction d = zero_direction(inst.m());
  d.support = x;
  for (int j : elements(x)) d.d[j] = 1 / beta[j];
  // Nothing changes on (p, p + eps0 d]: half the distance to the first event.
  const RayEvent ev = ray_event(inst, p, d);
  const Rat eps0 = ev.step ? Rat(*ev.step / 2) : Rat(1);
  PriceVector q = p;
  for (int j = 0; j < inst.m(); ++j) q[j] += eps0 * d.d[j];
  return (eval_scaled_lyapunov(inst, fr, q) - eval_scaled_lyapunov(inst, fr, p)) / eps0;
}

TranslationSums translation_sums(const MarketInstance& inst, const SeparableFrictions& fr,
                                 const PriceVector& p, const PriceVector& pp, const Rat& lambda,
                                 std::optional<std::vector<Rat>> tau) {
  if (sgn(lambda) < 0) throw InvalidInput("lambda must be nonnegative");
  const int m = inst.m();
  validate_price(inst, p);
  validate_price(inst, pp);
  const std::vector<Rat> beta = fr.beta_vector(p);
  if (!tau) {
    tau.emplace();
    for (const auto& b : beta) tau->push_back(1 / b);
  }
  PriceVector lo(m), hi(m);
  for (int j = 0; j < m; ++j) {
    lo[j] = std::max(Rat(p[j] - lambda * (*tau)[j]), pp[j]);
    hi[j] = std::min(p[j], Rat(pp[j] + lambda * (*tau)[j]));
  }
  for (int j = 0; j < m; ++j) {
    const Rat a = std::min({p[j], pp[j], lo[j], hi[j]});
    const Rat b = std::max({p[j], pp[j], lo[j], hi[j]});
    for (const auto& [start, val] : fr.beta[j])
      if (a < start && start <= b) throw WrongMode("beta changes inside the tested box");
  }
  return {eval_scaled_lyapunov(inst, fr, p) + eval_scaled_lyapunov(inst, fr, pp),
          eval_scaled_lyapunov(inst, fr, lo) + eval_scaled_lyapunov(inst, fr, hi)};
}

bool check_translation_submodularity(const MarketInstance& inst, const SeparableFrictions& fr,
                                     const PriceVector& p, const PriceVector& pp, const Rat& lambda,
                                     std::optional<std::vector<Rat>> tau) {
  return translation_sums(inst, fr, p, pp, lambda, std::move(tau)).holds();
}

}  // namespace walras
