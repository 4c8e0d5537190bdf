#pragma once

#include <string>
#include <vector>

namespace mixlab {

struct GeomIterParams {
  double c = 1.0;
  double b = 2.0;
  double alpha = 1.0;
  void validate() const;
};

// ε_h from a small catalog: geometric scale*q^h, power scale*(h+1)^{-s}, constant scale,
// custom list (zero past its end).
struct PerturbedSequenceSpec {
  enum class Kind { geometric, power, constant, custom };
  Kind kind = Kind::geometric;
  double scale = 1.0;
  double rate = 0.5;  // q for geometric, s for power
  std::vector<double> values;

  double eps(int h) const;
  bool limit_is_zero() const;
  static PerturbedSequenceSpec geometric(double scale, double q);
  static PerturbedSequenceSpec power(double scale, double s);
  static PerturbedSequenceSpec constant(double value);
  static PerturbedSequenceSpec custom(std::vector<double> v);
};

struct IterationTrace {
  std::vector<double> y;
  bool converged = false;  // some y_h below the tolerance
  bool diverged = false;   // some y_h above the cap
  int first_exceeding = -1;  // first h with y_h > y_0
  bool hypothesis_violated = false;
};

constexpr double kIterationTolerance = 1e-8;
constexpr double kIterationCap = 1e12;

double giusti_threshold(const GeomIterParams& p);

IterationTrace iterate_extremal(const GeomIterParams& p, double y0, int N);

IterationTrace iterate_perturbed(const GeomIterParams& p, double y0,
                                 const PerturbedSequenceSpec& spec, int N);

}  // namespace mixlab
