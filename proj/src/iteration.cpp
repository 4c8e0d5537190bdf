#include "mixlab/iteration.hpp"

#include <algorithm>
#include <cmath>

#include "mixlab/error.hpp"

namespace mixlab {

void GeomIterParams::validate() const {
  if (!(c > 0.0) || !(b > 1.0) || !(alpha > 0.0))
    throw Error(ErrorKind::InvalidInput, "need c > 0, b > 1, alpha > 0");
}

double PerturbedSequenceSpec::eps(int h) const {
  switch (kind) {
    case Kind::geometric: return scale * std::pow(rate, h);
    case Kind::power: return scale * std::pow(h + 1.0, -rate);
    case Kind::constant: return scale;
    case Kind::custom: return h < static_cast<int>(values.size()) ? values[h] : 0.0;
  }
  return 0.0;
}

bool PerturbedSequenceSpec::limit_is_zero() const {
  switch (kind) {
    case Kind::geometric: return rate < 1.0 || scale == 0.0;
    case Kind::power: return rate > 0.0 || scale == 0.0;
    case Kind::constant: return scale == 0.0;
    case Kind::custom: return true;
  }
  return false;
}

PerturbedSequenceSpec PerturbedSequenceSpec::geometric(double scale, double q) {
  PerturbedSequenceSpec s;
  s.kind = Kind::geometric;
  s.scale = scale;
  s.rate = q;
  return s;
}

PerturbedSequenceSpec PerturbedSequenceSpec::power(double scale, double e) {
  PerturbedSequenceSpec s;
  s.kind = Kind::power;
  s.scale = scale;
  s.rate = e;
  return s;
}

PerturbedSequenceSpec PerturbedSequenceSpec::constant(double value) {
  PerturbedSequenceSpec s;
  s.kind = Kind::constant;
  s.scale = value;
  return s;
}

PerturbedSequenceSpec PerturbedSequenceSpec::custom(std::vector<double> v) {
  PerturbedSequenceSpec s;
  s.kind = Kind::custom;
  s.values = std::move(v);
  return s;
}

double giusti_threshold(const GeomIterParams& p) {
  p.validate();
  return std::pow(p.c, -1.0 / p.alpha) * std::pow(p.b, -1.0 / (p.alpha * p.alpha));
}

namespace {

void finish(IterationTrace& t) {
  const double y0 = t.y.front();
  for (std::size_t h = 0; h < t.y.size(); ++h) {
    if (t.first_exceeding < 0 && t.y[h] > y0) t.first_exceeding = static_cast<int>(h);
    if (t.y[h] < kIterationTolerance) t.converged = true;
  }
}

}  // namespace

IterationTrace iterate_extremal(const GeomIterParams& p, double y0, int N) {
  p.validate();
  if (!(y0 > 0.0) || N < 1) throw Error(ErrorKind::InvalidInput, "need y0 > 0 and N >= 1");
  IterationTrace t;
  t.y.push_back(y0);
  double bh = 1.0;
  for (int h = 0; h < N; ++h) {
    const double y = t.y.back();
    const double next = y == 0.0 ? 0.0 : p.c * bh * std::pow(y, 1.0 + p.alpha);
    bh *= p.b;
    if (!(next <= kIterationCap)) {
      t.y.push_back(kIterationCap);
      t.diverged = true;
      break;
    }
    t.y.push_back(next);
  }
  finish(t);
  return t;
}

IterationTrace iterate_perturbed(const GeomIterParams& p, double y0,
                                 const PerturbedSequenceSpec& spec, int N) {
  p.validate();
  if (!(y0 >= 0.0) || N < 1) throw Error(ErrorKind::InvalidInput, "need y0 >= 0 and N >= 1");
  if (y0 >= giusti_threshold(p))
    throw Error(ErrorKind::ThresholdViolated, "y0 must lie strictly below the threshold");
  IterationTrace t;
  t.hypothesis_violated = !spec.limit_is_zero();
  t.y.push_back(y0);
  double bh = 1.0;
  for (int h = 0; h < N; ++h) {
    const double e = spec.eps(h);
    if (e < 0.0) throw Error(ErrorKind::InvalidInput, "epsilon_h must be nonnegative");
    const double y = t.y.back();
    t.y.push_back(y == 0.0 ? 0.0 : std::min(y, p.c * bh * (y + e) * std::pow(y, p.alpha)));
    bh *= p.b;
  }
  finish(t);
  return t;
}

}  // namespace mixlab
