#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace matscale;
using testing_util::instance;
using testing_util::sparse_of;

TEST(NormalizeRows, DividesByRowMax) {
  auto [a, s] = normalize_rows(sparse_of({{2, 4}}));
  EXPECT_DOUBLE_EQ(a.coeff(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(a.coeff(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s[0], 4.0);

  auto [b, t] = normalize_rows(sparse_of({{1}}));
  EXPECT_DOUBLE_EQ(b.coeff(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(t[0], 1.0);

  auto [c, u] = normalize_rows(sparse_of({{3, 0}, {0, 6}}));
  EXPECT_EQ(c.nonZeros(), 2);
  EXPECT_DOUBLE_EQ(c.coeff(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(c.coeff(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(u[0], 3.0);
  EXPECT_DOUBLE_EQ(u[1], 6.0);
}

TEST(NormalizeRows, EveryRowMaxIsOne) {
  const ScalingInstance inst = testing_util::random_instance(7, 9, 3, 0.5, 30.0);
  const DenseMatrix a = testing_util::dense(inst);
  for (Index i = 0; i < a.rows(); ++i) EXPECT_EQ(a.row(i).maxCoeff(), 1.0);
}

TEST(NormalizeRows, EmptyRowRejected) {
  try {
    normalize_rows(sparse_of({{1, 0}, {0, 0}}));
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyRow);
  }
}

TEST(ScalingInstance, RejectsUnequalMarginals) {
  try {
    instance({{2, 4}}, {1}, {1, 1});
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInstance);
  }
  EXPECT_THROW(instance({{1, 1}}, {0}, {0, 0}), Error);
  EXPECT_THROW(instance({{1, -1}}, {2}, {1, 1}), Error);
}

TEST(ScalingInstance, FieldsAndNu) {
  const ScalingInstance inst = instance({{2, 1}, {0, 5}}, {1, 2}, {2, 1});
  EXPECT_EQ(inst.h(), 3);
  EXPECT_DOUBLE_EQ(inst.nu(), 0.5);
  EXPECT_FALSE(inst.fully_positive());
  EXPECT_DOUBLE_EQ(inst.row_scales()[1], 5.0);
}

TEST(ScalingInstance, WideAndTallAccepted) {
  EXPECT_NO_THROW(instance({{1, 1, 1}}, {3}, {1, 1, 1}));
  EXPECT_NO_THROW(instance({{1}, {1}, {1}}, {1, 1, 1}, {3}));
}

TEST(ScalingInstance, NormalizationShiftsObjectiveByConstant) {
  std::mt19937_64 rng(4);
  DenseMatrix raw = DenseMatrix::Zero(4, 5);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 5; ++j) raw(i, j) = (i + j) % 3 == 0 ? 0.0 : 0.2 + 3.0 * (i + 1) * (j + 2) / 7.0;
  const std::vector<long long> r{5, 5, 5, 5}, c{4, 4, 4, 4, 4};
  const ScalingInstance inst = ScalingInstance::create(raw.sparseView(), r, c);
  Vector rv(4), cv(5);
  rv.setConstant(5);
  cv.setConstant(4);
  double shift = 0.0;
  for (Index i = 0; i < 4; ++i) shift += rv[i] * std::log(inst.row_scales()[i]);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = testing_util::random_vector(5, rng, -3, 3);
    const double raw_f = oracle::f(raw, rv, cv, x);
    const double f = eval_f(inst, x);
    EXPECT_NEAR(raw_f - f, shift, 1e-12 * std::max(1.0, std::abs(raw_f)));
  }
}

TEST(Feasibility, SpecExamples) {
  EXPECT_TRUE(check_asymptotic_scalability(instance({{1, 0}, {0, 1}}, {1, 1}, {1, 1})).scalable());
  EXPECT_TRUE(check_asymptotic_scalability(instance({{1, 1}, {0, 1}}, {1, 1}, {1, 1})).scalable());

  const ScalingInstance bad = instance({{1, 0}, {1, 0}}, {1, 1}, {1, 1});
  const FeasibilityVerdict v = check_asymptotic_scalability(bad);
  ASSERT_FALSE(v.scalable());
  EXPECT_EQ(v.max_flow, 1);
  ASSERT_TRUE(v.certificate);
  EXPECT_EQ(v.certificate->rows, (std::vector<Index>{0, 1}));
  EXPECT_EQ(v.certificate->cols, (std::vector<Index>{1}));
  EXPECT_TRUE(certificate_valid(bad, *v.certificate));
}

TEST(Feasibility, AllThreeByThreePatternsMatchBruteForce) {
  for (int mask = 0; mask < 512; ++mask) {
    std::vector<std::vector<int>> pat(3, std::vector<int>(3));
    DenseMatrix a = DenseMatrix::Zero(3, 3);
    bool empty_row = false;
    for (int i = 0; i < 3; ++i) {
      int row = 0;
      for (int j = 0; j < 3; ++j) {
        pat[i][j] = (mask >> (3 * i + j)) & 1;
        a(i, j) = pat[i][j];
        row += pat[i][j];
      }
      empty_row |= row == 0;
    }
    const bool expect = oracle::has_perfect_matching(pat);
    if (empty_row) {
      EXPECT_FALSE(expect);
      EXPECT_THROW(ScalingInstance::create(a.sparseView(), {1, 1, 1}, {1, 1, 1}), Error);
      continue;
    }
    const ScalingInstance inst = ScalingInstance::create(a.sparseView(), {1, 1, 1}, {1, 1, 1});
    const FeasibilityVerdict v = check_asymptotic_scalability(inst);
    EXPECT_EQ(v.scalable(), expect) << "mask " << mask;
    EXPECT_EQ(v.certificate.has_value(), !expect);
    if (v.certificate) EXPECT_TRUE(certificate_valid(inst, *v.certificate)) << "mask " << mask;
  }
}

TEST(Feasibility, GeneralMarginals) {
  // Column 0 needs 3 units but only row 0 (r = 1) reaches it.
  const ScalingInstance inst = instance({{1, 1}, {0, 1}}, {1, 3}, {3, 1});
  const FeasibilityVerdict v = check_asymptotic_scalability(inst);
  EXPECT_FALSE(v.scalable());
  ASSERT_TRUE(v.certificate);
  EXPECT_TRUE(certificate_valid(inst, *v.certificate));
}

TEST(Feasibility, CertificateValidRejectsNonZeroMinor) {
  const ScalingInstance inst = instance({{1, 0}, {1, 0}}, {1, 1}, {1, 1});
  EXPECT_FALSE(certificate_valid(inst, ZeroMinor{{0, 1}, {0}}));
  EXPECT_FALSE(certificate_valid(inst, ZeroMinor{{0}, {1}}));  // sum condition fails
}

TEST(Feasibility, SparseScalableGeneratorAlwaysScalable) {
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    EXPECT_TRUE(check_asymptotic_scalability(testing_util::sparse_instance(12, seed, 0.1)).scalable());
}

TEST(DiameterBound, Formulas) {
  const ScalingInstance two = instance({{1, 1}, {1, 1}}, {1, 1}, {1, 1});
  EXPECT_NEAR(diameter_bound(two, 1e-3, Regime::FullPositive), std::log(4.0), 1e-12);
  const ScalingInstance one = instance({{1}}, {1}, {1});
  EXPECT_EQ(diameter_bound(one, 1e-3, Regime::FullPositive), 1.0);
  EXPECT_EQ(diameter_bound(two, 1e-3, Regime::PolyBoundedScaling, 7.5), 7.5);

  // n = 4, h = 4, nu = 0.1.
  const ScalingInstance four = instance({{1, 0.1, 0, 0}, {0, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 0, 1}}, {1, 1, 1, 1},
                                        {1, 1, 1, 1});
  EXPECT_NEAR(diameter_bound(four, 1e-3, Regime::General), 4.0 * std::log(160000.0), 1e-9);
  EXPECT_NEAR(diameter_bound(four, 1e-3, Regime::General), 47.9, 0.05);
}

TEST(DiameterBound, MonotoneInEps) {
  const ScalingInstance inst = testing_util::sparse_instance(10, 1);
  double prev = kUnbounded;
  for (double eps : {1e-8, 1e-6, 1e-4, 1e-2, 0.5}) {
    const double N = diameter_bound(inst, eps, Regime::General);
    EXPECT_LE(N, prev);
    prev = N;
  }
}
