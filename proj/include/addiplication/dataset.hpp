#pragma once

// Synthetic regression target: a random two-variable polynomial on the unit
// square, with a non-random train/test split that holds out a disc in the
// middle of the square.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace addi {

/// f(x1, x2) = sum_{i + j <= degree} a_ij x1^i x2^j.
class Multinomial {
 public:
  explicit Multinomial(int degree);

  static std::size_t coefficient_count(int degree);

  int degree() const { return degree_; }
  /// Storage order: i ascending, then j ascending.
  const std::vector<double>& coefficients() const { return coefficients_; }
  double coefficient(int i, int j) const { return coefficients_[index(i, j)]; }
  double& coefficient(int i, int j) { return coefficients_[index(i, j)]; }

 private:
  std::size_t index(int i, int j) const;

  int degree_;
  std::vector<double> coefficients_;
};

/// Coefficients i.i.d. Uniform(-1, 1).
Multinomial sample_multinomial(std::uint64_t seed, int degree = 4);

/// Nested Horner evaluation.
double eval_multinomial(const Multinomial& poly, double x1, double x2);

struct LabeledPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double target = 0.0;
};

struct SplitConfig {
  std::size_t n_points = 600;
  double radius = 0.33;
  double center_x1 = 0.5;
  double center_x2 = 0.5;
};

struct DatasetSplit {
  std::vector<LabeledPoint> train;
  std::vector<LabeledPoint> test;
};

/// Strictly inside the disc; points exactly on the circle go to train.
bool in_test_region(double x1, double x2, const SplitConfig& cfg);

/// Draws n_points i.i.d. uniform on [0, 1]^2 and splits them by the disc.
DatasetSplit generate_split(const Multinomial& poly, std::uint64_t seed, const SplitConfig& cfg = {});

/// Header `x1,x2,target,split`, train rows first, 17 significant digits, LF.
void write_dataset_csv(std::ostream& out, const DatasetSplit& split);

}  // namespace addi
