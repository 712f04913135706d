#include "addiplication/dataset.hpp"

#include <ostream>
#include <random>
#include <stdexcept>

#include "addiplication/csv.hpp"

namespace addi {
namespace {

// Coefficients and points draw from distinct streams of the same seed.
enum class Stream : std::uint32_t { coefficients = 1, points = 2 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace

Multinomial::Multinomial(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("multinomial: degree must be non-negative");
  coefficients_.assign(coefficient_count(degree), 0.0);
}

std::size_t Multinomial::coefficient_count(int degree) {
  const auto d = static_cast<std::size_t>(degree);
  return (d + 1) * (d + 2) / 2;
}

std::size_t Multinomial::index(int i, int j) const {
  if (i < 0 || j < 0 || i + j > degree_) {
    throw std::out_of_range("multinomial: coefficient index outside the degree");
  }
  // Rows i = 0..i-1 hold degree+1, degree, ... entries.
  const auto d = static_cast<std::size_t>(degree_);
  const auto ii = static_cast<std::size_t>(i);
  return ii * (d + 1) - ii * (ii - 1) / 2 + static_cast<std::size_t>(j);
}

Multinomial sample_multinomial(std::uint64_t seed, int degree) {
  Multinomial poly(degree);
  std::mt19937_64 rng = make_rng(seed, Stream::coefficients);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; i + j <= degree; ++j) poly.coefficient(i, j) = uniform(rng);
  }
  return poly;
}

double eval_multinomial(const Multinomial& poly, double x1, double x2) {
  const int d = poly.degree();
  double outer = 0.0;
  for (int i = d; i >= 0; --i) {
    double inner = 0.0;
    for (int j = d - i; j >= 0; --j) inner = inner * x2 + poly.coefficient(i, j);
    outer = outer * x1 + inner;
  }
  return outer;
}

bool in_test_region(double x1, double x2, const SplitConfig& cfg) {
  const double dx = x1 - cfg.center_x1;
  const double dy = x2 - cfg.center_x2;
  return dx * dx + dy * dy < cfg.radius * cfg.radius;
}

DatasetSplit generate_split(const Multinomial& poly, std::uint64_t seed, const SplitConfig& cfg) {
  if (cfg.n_points == 0) throw std::invalid_argument("dataset: n_points must be positive");
  if (!(cfg.radius >= 0.0)) throw std::invalid_argument("dataset: radius must be non-negative");
  DatasetSplit split;
  std::mt19937_64 rng = make_rng(seed, Stream::points);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t p = 0; p < cfg.n_points; ++p) {
    LabeledPoint pt;
    pt.x1 = uniform(rng);
    pt.x2 = uniform(rng);
    pt.target = eval_multinomial(poly, pt.x1, pt.x2);
    (in_test_region(pt.x1, pt.x2, cfg) ? split.test : split.train).push_back(pt);
  }
  return split;
}

void write_dataset_csv(std::ostream& out, const DatasetSplit& split) {
  out << "x1,x2,target,split\n";
  const auto rows = [&out](const std::vector<LabeledPoint>& points, const char* label) {
    for (const LabeledPoint& p : points) {
      out << format_double(p.x1) << ',' << format_double(p.x2) << ',' << format_double(p.target)
          << ',' << label << '\n';
    }
  };
  rows(split.train, "train");
  rows(split.test, "test");
}

}  // namespace addi
