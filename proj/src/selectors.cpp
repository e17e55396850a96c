#include "bwsel/selectors.hpp"
#include "bwsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bwsel {

namespace {

constexpr double kInvPhi = 0.6180339887498949; // 1/golden ratio

std::string
indirect_suffix(const Kernel& k)
{
  return k.family() == KernelFamily::gaussian ? "g" : std::to_string(k.order());
}

Minimum
minimize_or_throw(const std::function<double(double)>& score,
                  const SelectionContext& ctx,
                  SelectionResult& out,
                  const std::string& what)
{
  auto m = minimize_score(score, ctx.lo(), ctx.hi());
  if (m.boundary) {
    ++out.boundary_hits;
    out.warnings.push_back(what + ": minimizer at end of search interval (h = " +
                           std::to_string(m.h) + ")");
  }
  out.score_trace.insert(out.score_trace.end(), m.trace.begin(), m.trace.end());
  return m;
}

struct OneSidedPair
{
  double left;
  double right;
};

OneSidedPair
onesided_minimizers(const SelectionContext& ctx, const Kernel& base, SelectionResult& out)
{
  const CvScore left(ctx.gaps(), onesided_equivalent(base, Side::left));
  const CvScore right(ctx.gaps(), onesided_equivalent(base, Side::right));
  const double hl = minimize_or_throw(left, ctx, out, "left OSCV").h;
  const double hr = minimize_or_throw(right, ctx, out, "right OSCV").h;
  out.components.emplace_back("raw_left", hl);
  out.components.emplace_back("raw_right", hr);
  return { hl, hr };
}

// phi''''(x) = (x^4 - 6x^2 + 3) phi(x)
double
phi4(double x)
{
  const double x2 = x * x;
  return (x2 * x2 - 6.0 * x2 + 3.0) * std::exp(-0.5 * x2) /
         std::sqrt(2.0 * std::numbers::pi);
}

} // namespace

Minimum
minimize_score(const std::function<double(double)>& score, double lo, double hi)
{
  if (!(lo > 0.0 && hi > lo))
    throw DomainError("search interval must satisfy 0 < lo < hi");

  Minimum m;
  const int npts = kMinimizerGridPoints;
  std::vector<double> hs(npts);
  std::vector<double> values(npts);
  const double ratio = std::log(hi / lo);
  int best = -1;
  for (int i = 0; i < npts; ++i) {
    hs[i] = i == npts - 1 ? hi : lo * std::exp(ratio * i / (npts - 1));
    values[i] = score(hs[i]);
    m.trace.emplace_back(hs[i], values[i]);
    if (std::isfinite(values[i]) && (best < 0 || values[i] < values[best]))
      best = i;
  }
  if (best < 0)
    throw SelectionError("score is not finite anywhere on the search grid");

  double a = hs[std::max(best - 1, 0)];
  double b = hs[std::min(best + 1, npts - 1)];
  const auto eval = [&](double h) {
    const double v = score(h);
    m.trace.emplace_back(h, v);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > kMinimizerTolerance * 0.5 * (a + b)) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  const double refined = fc <= fd ? c : d;
  const double refined_score = std::min(fc, fd);

  if (refined_score < values[best]) {
    m.h = refined;
    m.score = refined_score;
  } else {
    m.h = hs[best];
    m.score = values[best];
  }

  const double snap = 10.0 * kMinimizerTolerance;
  if (best == 0 && m.h <= lo * (1.0 + snap)) {
    m.h = lo;
    m.boundary = true;
  } else if (best == npts - 1 && m.h >= hi * (1.0 - snap)) {
    m.h = hi;
    m.boundary = true;
  }
  return m;
}

std::pair<double, double>
search_interval(const Sample& s)
{
  const double scale = s.robust_scale();
  if (!(scale > 0.0))
    throw SelectionError("sample has zero spread; no bandwidth can be selected");
  const double rate = scale * std::pow(static_cast<double>(s.size()), -0.2);
  return { 0.05 * rate, 10.0 * rate };
}

SelectorSpec
SelectorSpec::cv(Kernel target)
{
  return { SelectorKind::cv, std::move(target), std::nullopt, std::nullopt };
}

SelectorSpec
SelectorSpec::icv(Kernel indirect, Kernel target)
{
  return { SelectorKind::icv, std::move(target), std::move(indirect), std::nullopt };
}

SelectorSpec
SelectorSpec::oscv(Side side, Kernel target)
{
  return { SelectorKind::oscv, std::move(target), std::nullopt, side };
}

SelectorSpec
SelectorSpec::do_validation(Kernel target)
{
  return { SelectorKind::do_validation, std::move(target), std::nullopt, std::nullopt };
}

SelectorSpec
SelectorSpec::ido(Kernel indirect, Kernel target)
{
  return { SelectorKind::ido, std::move(target), std::move(indirect), std::nullopt };
}

SelectorSpec
SelectorSpec::plugin(Kernel target)
{
  return { SelectorKind::plugin, std::move(target), std::nullopt, std::nullopt };
}

SelectorSpec
SelectorSpec::median13(Kernel target)
{
  return { SelectorKind::median13, std::move(target), std::nullopt, std::nullopt };
}

SelectorSpec
SelectorSpec::parse(const std::string& name, Kernel target)
{
  if (name == "cv")
    return cv(target);
  if (name == "oscv-left")
    return oscv(Side::left, target);
  if (name == "oscv-right")
    return oscv(Side::right, target);
  if (name == "do")
    return do_validation(target);
  if (name == "pi")
    return plugin(target);
  if (name == "median13")
    return median13(target);
  for (const char* prefix : { "icv", "ido" }) {
    const std::string p(prefix);
    if (name.rfind(p, 0) != 0 || name.size() == p.size())
      continue;
    const std::string rest = name.substr(p.size());
    Kernel indirect = Kernel::gaussian();
    if (rest != "g") {
      if (rest.find_first_not_of("0123456789") != std::string::npos)
        break;
      const int r = std::stoi(rest);
      if (r < 2)
        throw ConfigError("indirect kernel order must be >= 2 in '" + name + "'");
      indirect = Kernel::polynomial(r);
    }
    return p == "icv" ? icv(indirect, target) : ido(indirect, target);
  }
  throw ConfigError("unknown selector '" + name + "'");
}

std::string
SelectorSpec::name() const
{
  switch (kind) {
    case SelectorKind::cv:
      return "cv";
    case SelectorKind::icv:
      return "icv" + indirect_suffix(*indirect);
    case SelectorKind::oscv:
      return "oscv-" + to_string(*side);
    case SelectorKind::do_validation:
      return "do";
    case SelectorKind::ido:
      return "ido" + indirect_suffix(*indirect);
    case SelectorKind::plugin:
      return "pi";
    case SelectorKind::median13:
      return "median13";
  }
  return "unknown";
}

namespace {

const Sample&
large_enough(const Sample& s)
{
  if (s.size() < kMinSelectionSize)
    throw DomainError("bandwidth selection needs at least " + std::to_string(kMinSelectionSize) +
                      " observations, got " + std::to_string(s.size()));
  return s;
}

} // namespace

SelectionContext::SelectionContext(const Sample& s)
  : sample_(&large_enough(s))
  , gaps_(s)
  , interval_(search_interval(s))
{}

SelectionResult
select_icv(const SelectionContext& ctx, const Kernel& target, const Kernel& indirect)
{
  SelectionResult out;
  out.spec = target == indirect ? SelectorSpec::cv(target)
                                : SelectorSpec::icv(indirect, target);
  const CvScore score(ctx.gaps(), indirect);
  out.raw_h = minimize_or_throw(score, ctx, out, "CV").h;
  out.h = target == indirect ? out.raw_h : rescale_factor(target, indirect) * out.raw_h;
  return out;
}

SelectionResult
select_cv(const SelectionContext& ctx, const Kernel& target)
{
  return select_icv(ctx, target, target);
}

SelectionResult
select_oscv(const SelectionContext& ctx, const Kernel& target, Side side)
{
  SelectionResult out;
  out.spec = SelectorSpec::oscv(side, target);
  const Kernel onesided = onesided_equivalent(target, side);
  const CvScore score(ctx.gaps(), onesided);
  out.raw_h = minimize_or_throw(score, ctx, out, to_string(side) + " OSCV").h;
  out.h = rescale_factor(target, onesided) * out.raw_h;
  return out;
}

SelectionResult
select_do(const SelectionContext& ctx, const Kernel& target)
{
  SelectionResult out;
  out.spec = SelectorSpec::do_validation(target);
  const auto raw = onesided_minimizers(ctx, target, out);
  const double c = rescale_factor(target, onesided_equivalent(target, Side::left));
  const double hl = c * raw.left;
  const double hr = c * raw.right;
  out.components.emplace_back("left_oscv", hl);
  out.components.emplace_back("right_oscv", hr);
  out.raw_h = 0.5 * (raw.left + raw.right);
  out.h = 0.5 * (hl + hr);
  return out;
}

IdoConstants
ido_constants(const Kernel& target, const Kernel& indirect)
{
  const Kernel left = onesided_equivalent(indirect, Side::left);
  return { rescale_factor(target, indirect),
           rescale_factor(indirect, left),
           rescale_factor(target, left) };
}

SelectionResult
select_ido(const SelectionContext& ctx, const Kernel& target, const Kernel& indirect)
{
  SelectionResult out;
  out.spec = SelectorSpec::ido(indirect, target);
  const auto raw = onesided_minimizers(ctx, indirect, out);
  const auto c = ido_constants(target, indirect);
  const double sum = raw.left + raw.right;
  // do-validation bandwidth for the indirect kernel, then moved to the target
  const double h_do_r = 0.5 * c.c_r * sum;
  out.components.emplace_back("do_indirect", h_do_r);
  out.components.emplace_back("compositional", c.c_indirect * h_do_r);
  out.raw_h = 0.5 * sum;
  out.h = 0.5 * c.direct * sum;
  return out;
}

double
plugin_curvature(const SelectionContext& ctx)
{
  const double n = static_cast<double>(ctx.sample().size());
  const double scale = ctx.sample().robust_scale();
  const double g = std::pow(2.0 / (5.0 * n), 1.0 / 7.0) * std::sqrt(2.0) * scale;
  double sum = 0.0;
  for (double gap : ctx.gaps().gaps()) {
    const double x = gap / g;
    if (x > 40.0)
      break;
    sum += phi4(x);
  }
  const double total = n * phi4(0.0) + 2.0 * sum;
  return total / (n * n * std::pow(g, 5));
}

SelectionResult
select_plugin(const SelectionContext& ctx, const Kernel& target)
{
  SelectionResult out;
  out.spec = SelectorSpec::plugin(target);
  const double curvature = plugin_curvature(ctx);
  if (!(curvature > 0.0) || !std::isfinite(curvature))
    throw PluginError("plug-in estimate of R(f'') is not positive");
  const auto& f = target.functionals();
  const double n = static_cast<double>(ctx.sample().size());
  out.h = std::pow(f.R / (f.mu2 * f.mu2 * curvature * n), 0.2);
  out.raw_h = out.h;
  out.components.emplace_back("curvature", curvature);
  return out;
}

double
median_of_13(std::vector<double> values)
{
  if (values.size() != 13)
    throw DomainError("median_of_13 needs exactly 13 values");
  std::nth_element(values.begin(), values.begin() + 6, values.end());
  return values[6];
}

SelectionResult
select_median13(const SelectionContext& ctx, const Kernel& target)
{
  SelectionResult out;
  out.spec = SelectorSpec::median13(target);
  const std::vector<SelectorSpec> members{
    SelectorSpec::cv(target),
    SelectorSpec::icv(Kernel::polynomial(2), target),
    SelectorSpec::icv(Kernel::polynomial(8), target),
    SelectorSpec::icv(Kernel::gaussian(), target),
    SelectorSpec::do_validation(target),
    SelectorSpec::ido(Kernel::polynomial(2), target),
    SelectorSpec::ido(Kernel::polynomial(8), target),
    SelectorSpec::ido(Kernel::gaussian(), target),
    SelectorSpec::plugin(target),
  };
  std::vector<double> values;
  for (const auto& spec : members) {
    auto r = select(ctx, spec);
    out.boundary_hits += r.boundary_hits;
    for (auto& w : r.warnings)
      out.warnings.push_back(spec.name() + ": " + w);
    out.components.emplace_back(spec.name(), r.h);
    values.push_back(r.h);
  }
  // the plug-in value enters five times
  for (int copy = 2; copy <= 5; ++copy)
    out.components.emplace_back("pi", values.back());
  values.insert(values.end(), 4, values.back());
  out.h = median_of_13(std::move(values));
  out.raw_h = out.h;
  return out;
}

SelectionResult
select(const SelectionContext& ctx, const SelectorSpec& spec)
{
  switch (spec.kind) {
    case SelectorKind::cv:
      return select_cv(ctx, spec.target);
    case SelectorKind::icv: {
      auto r = select_icv(ctx, spec.target, *spec.indirect);
      r.spec = spec;
      return r;
    }
    case SelectorKind::oscv:
      return select_oscv(ctx, spec.target, *spec.side);
    case SelectorKind::do_validation:
      return select_do(ctx, spec.target);
    case SelectorKind::ido:
      return select_ido(ctx, spec.target, *spec.indirect);
    case SelectorKind::plugin:
      return select_plugin(ctx, spec.target);
    case SelectorKind::median13:
      return select_median13(ctx, spec.target);
  }
  throw SelectionError("unknown selector kind");
}

SelectionResult
select_cv(const Sample& s, const Kernel& target)
{
  return select_cv(SelectionContext(s), target);
}

SelectionResult
select_icv(const Sample& s, const Kernel& target, const Kernel& indirect)
{
  return select_icv(SelectionContext(s), target, indirect);
}

SelectionResult
select_oscv(const Sample& s, const Kernel& target, Side side)
{
  return select_oscv(SelectionContext(s), target, side);
}

SelectionResult
select_do(const Sample& s, const Kernel& target)
{
  return select_do(SelectionContext(s), target);
}

SelectionResult
select_ido(const Sample& s, const Kernel& target, const Kernel& indirect)
{
  return select_ido(SelectionContext(s), target, indirect);
}

SelectionResult
select_plugin(const Sample& s, const Kernel& target)
{
  return select_plugin(SelectionContext(s), target);
}

SelectionResult
select_median13(const Sample& s, const Kernel& target)
{
  return select_median13(SelectionContext(s), target);
}

SelectionResult
select(const Sample& s, const SelectorSpec& spec)
{
  return select(SelectionContext(s), spec);
}

} // namespace bwsel
