#include "wegnerlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "wegnerlab/errors.hpp"

namespace wegnerlab {

namespace {

constexpr double kMassTolerance = 1e-12;
// Level of the cell-boundary enumeration behind the Cantor modulus.
constexpr int kCantorEnumerationDepth = 18;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double pl_density(const PiecewiseLinearDensity& pl, double x) {
  const auto& k = pl.knots;
  if (x < k.front().first || x > k.back().first) return 0.0;
  auto it = std::upper_bound(k.begin(), k.end(), x,
                             [](double v, const auto& knot) { return v < knot.first; });
  if (it == k.end()) return k.back().second;
  auto prev = std::prev(it);
  const double t = (x - prev->first) / (it->first - prev->first);
  return prev->second + t * (it->second - prev->second);
}

double pl_cdf(const PiecewiseLinearDensity& pl, double x) {
  const auto& k = pl.knots;
  if (x <= k.front().first) return 0.0;
  if (x >= k.back().first) return 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    const double x0 = k[i].first, x1 = k[i + 1].first;
    const double f0 = k[i].second, f1 = k[i + 1].second;
    if (x >= x1) {
      acc += 0.5 * (f0 + f1) * (x1 - x0);
      continue;
    }
    const double d = x - x0;
    acc += f0 * d + 0.5 * (f1 - f0) / (x1 - x0) * d * d;
    break;
  }
  return std::clamp(acc, 0.0, 1.0);
}

ModulusValue pl_modulus(const PiecewiseLinearDensity& pl, double eps) {
  std::vector<double> cand;
  for (const auto& [x, f] : pl.knots) {
    cand.push_back(x);
    cand.push_back(x - eps);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  auto window = [&](double e) { return pl_cdf(pl, e + eps) - pl_cdf(pl, e); };
  auto slope = [&](double e) { return pl_density(pl, e + eps) - pl_density(pl, e); };

  double best = 0.0;
  for (double c : cand) best = std::max(best, window(c));
  // Between candidates the window mass is quadratic; its derivative is linear.
  for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
    const double p = cand[i], q = cand[i + 1];
    const double a = p + 0.25 * (q - p), b = p + 0.75 * (q - p);
    const double ga = slope(a), gb = slope(b);
    if (ga == gb) continue;
    const double root = a + (b - a) * ga / (ga - gb);
    if (root > p && root < q) best = std::max(best, window(root));
  }
  return {std::min(best, 1.0), 1e-12};
}

ModulusValue atomic_modulus(const Atomic& a, double eps) {
  auto atoms = a.atoms;
  std::sort(atoms.begin(), atoms.end());
  double best = 0.0, acc = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (j < i) {
      j = i;
      acc = 0.0;
    }
    while (j < atoms.size() && atoms[j].first <= atoms[i].first + eps) acc += atoms[j++].second;
    best = std::max(best, acc);
    acc -= atoms[i].second;
  }
  return {std::min(best, 1.0), 0.0};
}

ModulusValue cantor_modulus(const CantorMeasure& c, double eps) {
  if (eps >= 1.0) return {1.0, 0.0};
  const int depth = std::min(c.depth, kCantorEnumerationDepth);
  const std::uint64_t cells = std::uint64_t{1} << depth;
  std::vector<long double> third(depth);
  long double p = 1.0L;
  for (int k = 0; k < depth; ++k) {
    p /= 3.0L;
    third[k] = 2.0L * p;
  }
  // Window mass for a left endpoint at a level-`depth` cell boundary is exact;
  // any other position loses at most two level-`depth` cells of mass.
  double best = 0.0;
  for (std::uint64_t m = 0; m < cells; ++m) {
    long double left = 0.0L;
    for (int k = 0; k < depth; ++k)
      if ((m >> (depth - 1 - k)) & 1U) left += third[k];
    const double f_left = static_cast<double>(m) / static_cast<double>(cells);
    const double mass = cantor_function(static_cast<double>(left + eps)) - f_left;
    best = std::max(best, mass);
  }
  return {std::clamp(best, 0.0, 1.0), 2.0 * std::ldexp(1.0, -depth)};
}

}  // namespace

double ToeplitzCorrelated::alpha0() const {
  for (const auto& g : coeffs)
    if (g.offset[0] == 0 && g.offset[1] == 0) return g.alpha;
  return 0.0;
}

MeasureSpec MeasureSpec::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorCode::InvalidArgument,
          "uniform density needs finite lo < hi");
  return MeasureSpec(UniformDensity{lo, hi});
}

MeasureSpec MeasureSpec::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  require(knots.size() >= 2, ErrorCode::InvalidArgument, "piecewise-linear density needs two knots");
  double mass = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require(std::isfinite(knots[i].first) && std::isfinite(knots[i].second) && knots[i].second >= 0.0,
            ErrorCode::InvalidArgument, "density values must be finite and nonnegative");
    if (i > 0) {
      require(knots[i].first > knots[i - 1].first, ErrorCode::InvalidArgument,
              "knot points must be strictly increasing");
      mass += 0.5 * (knots[i].second + knots[i - 1].second) * (knots[i].first - knots[i - 1].first);
    }
  }
  require(std::abs(mass - 1.0) <= kMassTolerance, ErrorCode::InvalidArgument,
          "density must integrate to 1, got " + std::to_string(mass));
  return MeasureSpec(PiecewiseLinearDensity{std::move(knots)});
}

MeasureSpec MeasureSpec::cantor(int depth) {
  require(depth >= 1 && depth <= 60, ErrorCode::InvalidArgument, "cantor depth must lie in [1, 60]");
  return MeasureSpec(CantorMeasure{depth});
}

MeasureSpec MeasureSpec::atomic(std::vector<std::pair<double, double>> atoms) {
  require(!atoms.empty(), ErrorCode::InvalidArgument, "atomic measure needs at least one atom");
  double mass = 0.0;
  for (const auto& [x, w] : atoms) {
    require(std::isfinite(x) && w > 0.0, ErrorCode::InvalidArgument, "atoms need finite points and positive weights");
    mass += w;
  }
  require(std::abs(mass - 1.0) <= kMassTolerance, ErrorCode::InvalidArgument,
          "atom weights must sum to 1, got " + std::to_string(mass));
  return MeasureSpec(Atomic{std::move(atoms)});
}

MeasureSpec MeasureSpec::toeplitz(MeasureSpec base, std::vector<GammaCoefficient> coeffs) {
  int zero_count = 0;
  double off_sum = 0.0, a0 = 0.0;
  for (const auto& g : coeffs) {
    require(std::isfinite(g.alpha), ErrorCode::InvalidArgument, "coefficients must be finite");
    if (g.offset[0] == 0 && g.offset[1] == 0) {
      ++zero_count;
      a0 = g.alpha;
    } else {
      off_sum += std::abs(g.alpha);
    }
  }
  require(zero_count == 1, ErrorCode::InvalidArgument, "exactly one coefficient must sit at offset 0");
  require(a0 != 0.0, ErrorCode::InvalidArgument, "alpha_0 must be nonzero");
  require(off_sum < std::abs(a0), ErrorCode::InvalidArgument,
          "dominance condition sum_{j!=0}|alpha_j| < |alpha_0| violated");
  return MeasureSpec(ToeplitzCorrelated{std::make_shared<const MeasureSpec>(std::move(base)), std::move(coeffs)});
}

MeasureSpec MeasureSpec::affine(MeasureSpec base, double scale, double shift) {
  require(std::isfinite(scale) && scale != 0.0 && std::isfinite(shift), ErrorCode::InvalidArgument,
          "affine pushforward needs a finite nonzero scale");
  return MeasureSpec(AffinePushforward{std::make_shared<const MeasureSpec>(std::move(base)), scale, shift});
}

std::string MeasureSpec::kind() const {
  return std::visit(overloaded{
                        [](const UniformDensity&) { return std::string("uniform"); },
                        [](const PiecewiseLinearDensity&) { return std::string("piecewise_linear"); },
                        [](const CantorMeasure&) { return std::string("cantor"); },
                        [](const Atomic&) { return std::string("atomic"); },
                        [](const ToeplitzCorrelated&) { return std::string("toeplitz"); },
                        [](const AffinePushforward&) { return std::string("affine"); },
                    },
                    v_);
}

Interval MeasureSpec::support() const {
  return std::visit(
      overloaded{
          [](const UniformDensity& u) { return Interval{u.lo, u.hi}; },
          [](const PiecewiseLinearDensity& p) { return Interval{p.knots.front().first, p.knots.back().first}; },
          [](const CantorMeasure&) { return Interval{0.0, 1.0}; },
          [](const Atomic& a) {
            auto [lo, hi] = std::minmax_element(a.atoms.begin(), a.atoms.end());
            return Interval{lo->first, hi->first};
          },
          [](const ToeplitzCorrelated& t) {
            const Interval b = t.base->support();
            Interval s{0.0, 0.0};
            for (const auto& g : t.coeffs) {
              s.lo += std::min(g.alpha * b.lo, g.alpha * b.hi);
              s.hi += std::max(g.alpha * b.lo, g.alpha * b.hi);
            }
            return s;
          },
          [](const AffinePushforward& a) {
            const Interval b = a.base->support();
            const double x = a.scale * b.lo + a.shift, y = a.scale * b.hi + a.shift;
            return Interval{std::min(x, y), std::max(x, y)};
          },
      },
      v_);
}

double sample(const MeasureSpec& measure, CounterStream& stream) {
  return std::visit(
      overloaded{
          [&](const UniformDensity& u) { return u.lo + (u.hi - u.lo) * stream.uniform01(); },
          [&](const PiecewiseLinearDensity& p) {
            std::vector<double> xs, fs;
            for (const auto& [x, f] : p.knots) {
              xs.push_back(x);
              fs.push_back(f);
            }
            std::piecewise_linear_distribution<double> dist(xs.begin(), xs.end(), fs.begin());
            return dist(stream);
          },
          [&](const CantorMeasure& c) {
            long double value = 0.0L, third = 1.0L;
            std::uint64_t bits = 0;
            for (int k = 0; k < c.depth; ++k) {
              if (k % 64 == 0) bits = stream();
              third /= 3.0L;
              if ((bits >> (k % 64)) & 1U) value += 2.0L * third;
            }
            return static_cast<double>(value);
          },
          [&](const Atomic& a) {
            std::vector<double> w;
            for (const auto& atom : a.atoms) w.push_back(atom.second);
            std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
            return a.atoms[dist(stream)].first;
          },
          [&](const ToeplitzCorrelated& t) {
            double eta = 0.0;
            for (const auto& g : t.coeffs) eta += g.alpha * sample(*t.base, stream);
            return eta;
          },
          [&](const AffinePushforward& a) { return a.scale * sample(*a.base, stream) + a.shift; },
      },
      measure.variant());
}

ModulusValue modulus_s(const MeasureSpec& measure, double epsilon) {
  require(epsilon > 0.0 && std::isfinite(epsilon), ErrorCode::InvalidArgument, "modulus needs epsilon > 0");
  return std::visit(
      overloaded{
          [&](const UniformDensity& u) { return ModulusValue{std::min(epsilon / (u.hi - u.lo), 1.0), 0.0}; },
          [&](const PiecewiseLinearDensity& p) { return pl_modulus(p, epsilon); },
          [&](const CantorMeasure& c) { return cantor_modulus(c, epsilon); },
          [&](const Atomic& a) { return atomic_modulus(a, epsilon); },
          [&](const ToeplitzCorrelated& t) { return modulus_s(*t.base, epsilon / std::abs(t.alpha0())); },
          [&](const AffinePushforward& a) { return modulus_s(*a.base, epsilon / std::abs(a.scale)); },
      },
      measure.variant());
}

ModulusCurve modulus_curve(const MeasureSpec& measure, std::span<const double> epsilons) {
  ModulusCurve curve;
  curve.epsilons.assign(epsilons.begin(), epsilons.end());
  require(std::is_sorted(curve.epsilons.begin(), curve.epsilons.end()), ErrorCode::InvalidArgument,
          "modulus curve needs sorted epsilons");
  for (double e : curve.epsilons) {
    const auto m = modulus_s(measure, e);
    curve.s_values.push_back(m.value);
    curve.error_bounds.push_back(m.error_bound);
  }
  return curve;
}

MeasureSpec effective_conditional_measure(const MeasureSpec& correlated, double shift) {
  const auto* t = std::get_if<ToeplitzCorrelated>(&correlated.variant());
  require(t != nullptr, ErrorCode::InvalidArgument, "conditional measure needs a toeplitz process");
  require(t->alpha0() != 0.0, ErrorCode::InvalidArgument, "alpha_0 must be nonzero");
  return MeasureSpec::affine(*t->base, t->alpha0(), shift);
}

double cantor_function(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  long double y = x, result = 0.0L, weight = 0.5L;
  for (int k = 0; k < 64; ++k) {
    y *= 3.0L;
    const long double digit = std::floor(y);
    if (digit == 1.0L) return static_cast<double>(result + weight);
    if (digit >= 2.0L) result += weight;
    y -= digit;
    weight *= 0.5L;
  }
  return static_cast<double>(result);
}

double cdf(const MeasureSpec& measure, double x) {
  return std::visit(
      overloaded{
          [&](const UniformDensity& u) { return std::clamp((x - u.lo) / (u.hi - u.lo), 0.0, 1.0); },
          [&](const PiecewiseLinearDensity& p) { return pl_cdf(p, x); },
          [&](const CantorMeasure&) { return cantor_function(x); },
          [&](const Atomic& a) {
            double acc = 0.0;
            for (const auto& [p, w] : a.atoms)
              if (p <= x) acc += w;
            return std::min(acc, 1.0);
          },
          [&](const ToeplitzCorrelated&) -> double {
            throw Error(ErrorCode::InvalidArgument, "no closed-form cdf for a correlated process");
          },
          [&](const AffinePushforward& a) {
            const double y = (x - a.shift) / a.scale;
            if (a.scale > 0.0) return cdf(*a.base, y);
            return 1.0 - cdf(*a.base, std::nextafter(y, -std::numeric_limits<double>::infinity()));
          },
      },
      measure.variant());
}

double kolmogorov_distance(std::vector<double> samples, const MeasureSpec& measure) {
  require(!samples.empty(), ErrorCode::InvalidArgument, "no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double v = samples[i];
    const double f_at = cdf(measure, v);
    const double f_before = cdf(measure, std::nextafter(v, -std::numeric_limits<double>::infinity()));
    d = std::max({d, std::abs(static_cast<double>(j) / n - f_at), std::abs(static_cast<double>(i) / n - f_before)});
    i = j;
  }
  return d;
}

double empirical_window_sup(std::vector<double> samples, double epsilon) {
  require(!samples.empty(), ErrorCode::InvalidArgument, "no samples");
  std::sort(samples.begin(), samples.end());
  std::size_t best = 0, j = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    j = std::max(j, i);
    while (j < samples.size() && samples[j] <= samples[i] + epsilon) ++j;
    best = std::max(best, j - i);
  }
  return static_cast<double>(best) / static_cast<double>(samples.size());
}

}  // namespace wegnerlab
