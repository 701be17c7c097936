#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "sqeval/spectrum.hpp"

namespace sqeval::testing {
namespace {

using Real = long double;

Real det3(const std::array<std::array<Real, 3>, 3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

double brute_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson: bad sizes");
  const Real n = static_cast<Real>(a.size());
  Real sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  const Real ma = sa / n, mb = sb / n;
  Real cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(cov / std::sqrt(va * vb));
}

std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (double x : v) {
      if (x < v[i]) ++less;
      if (x == v[i]) ++equal;
    }
    ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

double brute_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return brute_pearson(brute_ranks(a), brute_ranks(b));
}

double brute_rmse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("rmse: bad sizes");
  Real sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (static_cast<Real>(a[i]) - b[i]) * (static_cast<Real>(a[i]) - b[i]);
  return static_cast<double>(std::sqrt(sum / static_cast<Real>(a.size())));
}

std::array<double, 3> normal_equation_fit(const std::vector<double>& x1, const std::vector<double>& x2,
                                          const std::vector<double>& y, const std::vector<double>& weights) {
  std::array<std::array<Real, 3>, 3> xtx{};
  std::array<Real, 3> xty{};
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Real w = weights.empty() ? 1.0L : static_cast<Real>(weights[i]);
    const std::array<Real, 3> row{1.0L, x1[i], x2[i]};
    for (int r = 0; r < 3; ++r) {
      xty[r] += w * row[r] * y[i];
      for (int c = 0; c < 3; ++c) xtx[r][c] += w * row[r] * row[c];
    }
  }
  const Real d = det3(xtx);
  if (std::abs(d) < 1e-18L) throw std::runtime_error("normal equations are singular");
  std::array<double, 3> beta{};
  for (int k = 0; k < 3; ++k) {
    auto m = xtx;
    for (int r = 0; r < 3; ++r) m[r][k] = xty[r];
    beta[k] = static_cast<double>(det3(m) / d);
  }
  return beta;
}

std::vector<double> closed_form_a_weight(const std::vector<double>& x) {
  constexpr double rate = 48000.0;
  const auto curve = [](double f) {
    const double f2 = f * f;
    const double ra = 12194.0 * 12194.0 * f2 * f2 /
                      ((f2 + 20.6 * 20.6) * std::sqrt((f2 + 107.7 * 107.7) * (f2 + 737.9 * 737.9)) * (f2 + 12194.0 * 12194.0));
    return ra * std::pow(10.0, 2.0 / 20.0);
  };
  RealFft fft(x.size());
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(x, spec);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    spec[k] *= k == 0 ? 0.0 : curve(static_cast<double>(k) * rate / static_cast<double>(x.size()));
  }
  std::vector<double> out(x.size());
  fft.inverse(spec, out);
  for (double& v : out) v /= static_cast<double>(x.size());
  return out;
}

double framewise_active_level_db(const std::vector<double>& x) {
  constexpr std::size_t frame = 960;
  std::vector<std::pair<double, double>> frames;  // (sum of squares, samples)
  for (std::size_t start = 0; start < x.size(); start += frame) {
    Real e = 0;
    const std::size_t end = std::min(x.size(), start + frame);
    for (std::size_t i = start; i < end; ++i) e += static_cast<Real>(x[i]) * x[i];
    frames.emplace_back(static_cast<double>(e), static_cast<double>(end - start));
  }
  double loudest = 0;
  for (const auto& [e, n] : frames) loudest = std::max(loudest, e / n);
  Real energy = 0, samples = 0;
  for (const auto& [e, n] : frames) {
    if (10.0 * std::log10(e / n) >= 10.0 * std::log10(loudest) - 35.0) {
      energy += e;
      samples += n;
    }
  }
  return static_cast<double>(10.0L * std::log10(energy / samples));
}

double power_level_db(const std::vector<double>& x) {
  Real e = 0;
  for (double v : x) e += static_cast<Real>(v) * v;
  return static_cast<double>(10.0L * std::log10(e / static_cast<Real>(x.size())));
}

}  // namespace sqeval::testing
