#include <doctest.h>

#include <cmath>
#include <vector>

#include "schmidtlab/entropy.hpp"
#include "schmidtlab/error.hpp"

using namespace schmidtlab;

namespace {

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(std::pow(10.0, lo + (hi - lo) * i / (n - 1)));
  return v;
}

SchmidtSpectrum uniform_spectrum(int count) {
  SchmidtSpectrum s;
  for (int i = 0; i < count; ++i) s.entries.push_back({CartesianIndex{i, 0}, 1.0 / count});
  return s;
}

}  // namespace

TEST_CASE("Schmidt number") {
  CHECK(schmidt_number(1.0) == 1.0);
  CHECK(schmidt_number(1.0 / 3.0) == doctest::Approx(25.0 / 9.0).epsilon(1e-15));
  CHECK(schmidt_number(0.02) == doctest::Approx(625.5001).epsilon(1e-12));
  for (double x : logspace(-3, 3, 61)) {
    CHECK(schmidt_number(x) == schmidt_number(1.0 / x));
    CHECK(schmidt_number(x) >= 1.0);
  }
  CHECK(schmidt_number(1.0 + 1e-6) > 1.0);
  CHECK_THROWS_AS(schmidt_number(0.0), DomainError);
  CHECK_THROWS_AS(schmidt_number(-2.0), DomainError);
}

TEST_CASE("inverse Schmidt number") {
  CHECK(bsigma_from_k(1.0) == 1.0);
  CHECK(bsigma_from_k(25.0 / 9.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(bsigma_from_k(25.0 / 9.0, true) == doctest::Approx(3.0).epsilon(1e-15));
  for (double K : logspace(0, 6, 49)) {
    CHECK(schmidt_number(bsigma_from_k(K)) == doctest::Approx(K).epsilon(1e-12));
    CHECK(bsigma_from_k(K) <= 1.0);
  }
  CHECK_THROWS_AS(bsigma_from_k(0.99), DomainError);
}

TEST_CASE("closed-form Renyi entropy") {
  CHECK(renyi_closed(2.0, 1.0 / 3.0) == doctest::Approx(std::log2(25.0 / 9.0)).epsilon(1e-14));
  CHECK(renyi_closed(2.0, 1.0 / 3.0) == doctest::Approx(1.47393).epsilon(1e-5));
  for (double a : {0.3, 2.0, 7.0}) CHECK(renyi_closed(a, 1.0) == 0.0);
  for (double x : logspace(-2, 2, 41))
    CHECK(std::abs(renyi_closed(2.0, x) - std::log2(schmidt_number(x))) < 1e-10);
  CHECK_THROWS_AS(renyi_closed(1.0, 0.5), DomainError);
  CHECK_THROWS_AS(renyi_closed(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(renyi_closed(2.0, 0.0), DomainError);
}

TEST_CASE("inverted Renyi argument gives the negated value") {
  CHECK(renyi_closed(2.0, 1.0 / 3.0, RenyiForm::inverted) == doctest::Approx(-1.47393).epsilon(1e-5));
  CHECK(renyi_closed(3.0, 0.2, RenyiForm::inverted) == -renyi_closed(3.0, 0.2));
}

TEST_CASE("closed form agrees with direct summation") {
  for (double bs : {0.05, 1.0 / 3.0, 3.0}) {
    const auto s = build_spectrum(bs, Basis::cartesian, TailMass{1e-30});
    for (double a : {0.5, 2.0, 3.0}) CHECK(std::abs(renyi_closed(a, bs) - renyi_from_spectrum(a, s)) < 1e-9);
    CHECK(von_neumann_exact(bs) == doctest::Approx(von_neumann_from_spectrum(s)).epsilon(1e-12));
  }
  CHECK(renyi_from_spectrum(2.0, uniform_spectrum(4)) == doctest::Approx(2.0).epsilon(1e-15));
  const auto coarse = build_spectrum(0.2, Basis::cartesian, MaxOrder{5});
  CHECK_THROWS_AS(renyi_from_spectrum(0.5, coarse), PrecisionError);
  CHECK_NOTHROW(renyi_from_spectrum(2.0, coarse));
}

TEST_CASE("alpha -> 1 brackets the von Neumann entropy") {
  for (double bs : {0.1, 1.0 / 3.0, 4.0}) {
    const double s = von_neumann_exact(bs);
    const double below = renyi_closed(1 - 1e-6, bs), above = renyi_closed(1 + 1e-6, bs);
    CHECK(below >= s);
    CHECK(above <= s);
    CHECK(below - above < 1e-4);
    CHECK(std::abs(below - s) < 1e-4);
  }
}

TEST_CASE("Renyi entropy decreases with alpha") {
  for (double bs : {0.07, 0.5, 6.0}) {
    double previous = INFINITY;
    for (double a = 0.1; a < 10.0; a += 0.37) {
      if (std::abs(a - 1.0) < 1e-9) continue;
      const double h = renyi_closed(a, bs);
      CHECK(h < previous);
      CHECK(h >= 0.0);
      previous = h;
    }
  }
}

TEST_CASE("large-K Renyi approximation") {
  CHECK(f_alpha(2.0) == 0.0);
  CHECK(f_alpha(3.0) == doctest::Approx(2.0 - std::log2(9.0) / 2.0).epsilon(1e-15));
  CHECK(f_alpha(3.0) == doctest::Approx(0.41504).epsilon(1e-5));
  CHECK(renyi_approx(2.0, 37.0) == std::log2(37.0));
  for (double a : {0.5, 3.0}) {
    double previous = INFINITY;
    for (double K : {1e2, 1e3, 1e4}) {
      const double gap = std::abs(renyi_approx(a, K) - renyi_closed(a, bsigma_from_k(K)));
      CHECK(gap < previous);
      previous = gap;
    }
  }
  CHECK_THROWS_AS(renyi_approx(2.0, 0.5), DomainError);
}

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann_exact(1.0) == 0.0);
  CHECK(von_neumann_exact(1.0 / 3.0) == doctest::Approx(2.16341).epsilon(1e-5));
  for (double x : logspace(-2, 2, 41)) CHECK(von_neumann_exact(x) == von_neumann_exact(1.0 / x));
  CHECK(von_neumann_approx(4.0, ApproxForm::leading_log) == 3.0);
  CHECK(von_neumann_approx(1.0, ApproxForm::expansion) + 1.0 / std::log(8.0) ==
        doctest::Approx(0.885390).epsilon(1e-6));
  CHECK(von_neumann_approx(1.0, ApproxForm::leading_log) - von_neumann_exact(1.0) == 1.0);
}

TEST_CASE("expansion error is below 2/K^2 once K >= 100") {
  // Beyond K ~ 1e5 the residual drops under the rounding of S itself.
  int checked = 0;
  for (double x : logspace(-2, 2, 801)) {
    const double K = schmidt_number(x);
    if (K < 100) continue;
    ++checked;
    CHECK(std::abs(von_neumann_exact(x) - von_neumann_approx(K, ApproxForm::expansion)) <= 2.0 / (K * K));
  }
  CHECK(checked > 100);
}

TEST_CASE("entropy report is symmetric") {
  const std::vector<double> alphas{0.5, 2.0, 3.0};
  for (double x : {0.01, 0.2, 0.9}) {
    const auto a = entropy_report(x, alphas), b = entropy_report(1.0 / x, alphas);
    CHECK(a.K == b.K);
    CHECK(a.S_exact == b.S_exact);
    CHECK(a.S_approx_eq21 == b.S_approx_eq21);
    CHECK(a.S_expansion_eq22 == b.S_expansion_eq22);
    for (std::size_t i = 0; i < alphas.size(); ++i) CHECK(a.renyi[i].second == b.renyi[i].second);
    CHECK(a.K >= 1.0);
    CHECK(a.S_exact >= 0.0);
  }
}

TEST_CASE("retained fraction") {
  const DetectionScenario half{0.5, RetentionModel::leading_log};
  CHECK(retained_fraction(512.0, half) == 0.9);
  for (double K : {4.0, 50.0, 1000.0})
    CHECK(retained_fraction(K, half) * von_neumann_approx(K, ApproxForm::leading_log) ==
          doctest::Approx(von_neumann_approx(K, ApproxForm::leading_log) - 1.0).epsilon(1e-14));
  CHECK(retained_fraction(7.0, {1.0, RetentionModel::leading_log}) == 1.0);
  CHECK(retained_fraction(7.0, {1.0, RetentionModel::exact_spectrum}) == 1.0);
  CHECK_THROWS_AS(retained_fraction(1.5, half), DomainError);
  CHECK_THROWS_AS(retained_fraction(10.0, {0.0, RetentionModel::leading_log}), DomainError);
  CHECK_THROWS_AS(retained_fraction(10.0, {1.5, RetentionModel::leading_log}), DomainError);
}

TEST_CASE("retention is non-decreasing in K") {
  for (RetentionModel m : {RetentionModel::leading_log, RetentionModel::exact_spectrum})
    for (double eta : {0.1, 0.5, 0.9}) {
      double previous = -1.0;
      for (double K : logspace(std::log10(1.0 / eta), 6, 60)) {
        const double f = retained_fraction(K, {eta, m});
        CHECK(f >= previous);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        previous = f;
      }
    }
}

TEST_CASE("required Schmidt number") {
  const auto approx = required_k(0.5, 0.9, RetentionModel::leading_log);
  CHECK(approx.K == doctest::Approx(512.0).epsilon(1e-8));
  CHECK(approx.b_sigma == doctest::Approx(0.02211).epsilon(2e-4));
  CHECK(std::abs(approx.b_sigma - 0.0221) < 1e-4);
  CHECK(approx.tolerance <= kRequiredKTolerance * approx.K);

  const auto exact = required_k(0.5, 0.9, RetentionModel::exact_spectrum);
  CHECK(std::abs(exact.K - 512.0) / 512.0 < 0.15);
  CHECK(retained_fraction(exact.K, {0.5, RetentionModel::exact_spectrum}) >= 0.9);
  CHECK(retained_fraction(exact.K * (1 - 1e-6), {0.5, RetentionModel::exact_spectrum}) < 0.9);

  CHECK(required_k(1.0, 0.99, RetentionModel::leading_log).K == 1.0);
  CHECK(required_k(1.0, 0.3, RetentionModel::exact_spectrum).K == 1.0);
  CHECK_THROWS_AS(required_k(0.5, 1.0, RetentionModel::leading_log), DomainError);
  CHECK_THROWS_AS(required_k(0.5, 0.0, RetentionModel::leading_log), DomainError);
  CHECK_THROWS_AS(required_k(0.0, 0.5, RetentionModel::leading_log), DomainError);
}
