#include <gtest/gtest.h>

#include "dpm/dpm.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace test_extalg {
using namespace dpm;

namespace {

const GroundSet kG2 = GroundSet::numbered(2);

Multivector e(const GroundSet& g, std::size_t i) { return Multivector::theta(g, singleton(i)); }

double distance(const Multivector& a, const Multivector& b) { return (a - b).norm(); }

Subspace line(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return Subspace(GroundSet::numbered(v.size()), x.normalized());
}

// Profile of |coefficient| per basis mask.
std::map<Subset, double> profile(const Multivector& m) {
  std::map<Subset, double> out;
  for (const auto& [a, c] : m.terms())
    if (std::abs(c) > 1e-12) out[a] = std::abs(c);
  return out;
}

void expect_same_profile(const Multivector& a, const Multivector& b, double tol) {
  auto pa = profile(a), pb = profile(b);
  for (const auto& [k, v] : pa) EXPECT_NEAR(v, pb.count(k) ? pb[k] : 0.0, tol);
  for (const auto& [k, v] : pb) EXPECT_NEAR(v, pa.count(k) ? pa[k] : 0.0, tol);
}

}  // namespace

TEST(Wedge, SignRule) {
  const auto w12 = wedge(e(kG2, 0), e(kG2, 1));
  const auto w21 = wedge(e(kG2, 1), e(kG2, 0));
  EXPECT_EQ(w12.coefficient(0b11), Complex(1.0));
  EXPECT_EQ(w21.coefficient(0b11), Complex(-1.0));
  EXPECT_EQ(w12.terms().size(), 1u);
}

TEST(Wedge, RepeatedFactorVanishes) { EXPECT_TRUE(wedge(e(kG2, 0), e(kG2, 0)).empty()); }

TEST(Wedge, Bilinearity) {
  const auto w = wedge(e(kG2, 0) + e(kG2, 1), e(kG2, 0) - e(kG2, 1));
  EXPECT_EQ(w.terms().size(), 1u);
  EXPECT_NEAR(std::abs(w.coefficient(0b11) - Complex(-2.0)), 0.0, 1e-15);
}

TEST(Wedge, GroundMismatchIsStructural) {
  EXPECT_THROW(wedge(e(kG2, 0), e(GroundSet::numbered(3), 0)), StructuralError);
  EXPECT_THROW(interior(e(kG2, 0), e(GroundSet::numbered(3), 0)), StructuralError);
}

TEST(Wedge, Associative) {
  Rng rng(1);
  const auto g = GroundSet::numbered(5);
  for (int i = 0; i < 30; ++i) {
    const auto a = gen::multivector(rng, g), b = gen::multivector(rng, g), c = gen::multivector(rng, g);
    EXPECT_LE(distance(wedge(wedge(a, b), c), wedge(a, wedge(b, c))), 1e-12);
  }
}

TEST(Wedge, OddSimpleSquaresToZero) {
  Rng rng(2);
  const auto g = GroundSet::numbered(5);
  for (std::size_t k : {1u, 3u}) {
    const auto u = gen::simple(rng, g, k);
    EXPECT_LE(wedge(u, u).norm(), 1e-12);
  }
}

TEST(Interior, RemovesAppendedElement) {
  const auto g = GroundSet::numbered(3);
  const auto u = e(g, 0) * Complex(2.0) + wedge(e(g, 0), e(g, 1));
  EXPECT_LE(distance(interior(wedge(u, e(g, 2)), e(g, 2)), u), 1e-15);
  EXPECT_TRUE(interior(u, e(g, 2)).empty());
}

TEST(Interior, BasisExamples) {
  const auto t12 = Multivector::theta(kG2, 0b11);
  EXPECT_LE(distance(interior(t12, e(kG2, 1)), e(kG2, 0)), 1e-15);
  EXPECT_LE(distance(interior(t12, e(kG2, 0)), e(kG2, 1) * Complex(-1.0)), 1e-15);
}

TEST(Interior, AdjointOfWedge) {
  Rng rng(3);
  const auto g = GroundSet::numbered(5);
  for (int i = 0; i < 100; ++i) {
    const auto u = gen::multivector(rng, g, 10), v = gen::multivector(rng, g, 4), w = gen::multivector(rng, g, 10);
    EXPECT_LE(std::abs(inner(interior(u, v), w) - inner(u, wedge(w, v))), 1e-11);
  }
}

TEST(Interior, ConjugateLinearInSecondArgument) {
  Rng rng(4);
  const auto g = GroundSet::numbered(4);
  const auto u = gen::multivector(rng, g, 10), v = gen::one_vector(rng, g);
  const Complex s(0.3, -1.7);
  EXPECT_LE(distance(interior(u, v * s), interior(u, v) * std::conj(s)), 1e-12);
}

TEST(Inner, DeterminantOfGram) {
  Rng rng(5);
  const auto g = GroundSet::numbered(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + trial % 4;
    std::vector<Vector> us, vs;
    Multivector wu = Multivector::scalar(g), wv = Multivector::scalar(g);
    for (std::size_t i = 0; i < k; ++i) {
      us.push_back(gen::vector(rng, 5));
      vs.push_back(gen::vector(rng, 5));
      wu = wedge(wu, Multivector::vector(g, us.back()));
      wv = wedge(wv, Multivector::vector(g, vs.back()));
    }
    Matrix gram(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vs[j].dot(us[i]);
    EXPECT_LE(std::abs(inner(wu, wv) - linalg::determinant(gram)), 1e-9);
  }
}

TEST(Inner, NormMatchesCoefficients) {
  Rng rng(6);
  const auto g = GroundSet::numbered(6);
  for (int i = 0; i < 20; ++i) {
    const auto u = gen::multivector(rng, g, 12);
    EXPECT_NEAR(inner(u, u).real(), u.norm_squared(), 1e-12);
  }
}

TEST(Wedge, WhitneyInequalityForSimpleFactor) {
  Rng rng(7);
  const auto g = GroundSet::numbered(6);
  for (int i = 0; i < 100; ++i) {
    const auto u = gen::simple(rng, g, 1 + i % 3);
    const auto v = gen::multivector(rng, g, 8);
    EXPECT_LE(wedge(u, v).norm(), u.norm() * v.norm() * (1 + 1e-12));
    EXPECT_LE(wedge(v, u).norm(), u.norm() * v.norm() * (1 + 1e-12));
  }
}

TEST(Xi, CoordinateLine) {
  const auto x = xi(line({1, 0}));
  EXPECT_LE(distance(x, e(kG2, 0)), 1e-15);
}

TEST(Xi, DiagonalLine) {
  const auto x = xi(line({1, 1}));
  EXPECT_NEAR(std::norm(x.coefficient(0b01)), 0.5, 1e-15);
  EXPECT_NEAR(std::norm(x.coefficient(0b10)), 0.5, 1e-15);
}

TEST(Xi, TriangleStarSpaceIsUniformOnTrees) {
  const auto x = xi(star_space(Graph::complete(3)));
  int grade = -1;
  ASSERT_TRUE(x.homogeneous(&grade));
  EXPECT_EQ(grade, 2);
  for (Subset b : {Subset{0b011}, Subset{0b101}, Subset{0b110}}) EXPECT_NEAR(std::norm(x.coefficient(b)), 1.0 / 3.0, 1e-12);
}

TEST(Xi, ZeroSubspaceIsScalarOne) {
  const Subspace h(GroundSet::numbered(3), Matrix(3, 0));
  const auto x = xi(h);
  EXPECT_EQ(x.coefficient(0), Complex(1.0));
  EXPECT_EQ(x.terms().size(), 1u);
}

TEST(Xi, UnitHomogeneous) {
  Rng rng(8);
  for (int i = 0; i < 30; ++i) {
    const auto h = random::any_subspace(rng, 6);
    const auto x = xi(h);
    int grade = -1;
    EXPECT_TRUE(x.homogeneous(&grade));
    EXPECT_EQ(static_cast<std::size_t>(grade), h.rank());
    EXPECT_NEAR(x.norm(), 1.0, 1e-12);
  }
}

TEST(Xi, ReverseIdentity) {
  Rng rng(9);
  for (int i = 0; i < 30; ++i) {
    const auto h = random::any_subspace(rng, 5);
    const auto x = xi(h);
    const Vector u = gen::vector(rng, 5), v = gen::vector(rng, 5);
    const auto mu = Multivector::vector(h.ground(), u), mv = Multivector::vector(h.ground(), v);
    const Complex lhs = inner(interior(x, mu), interior(x, mv));
    const Complex rhs = u.dot(h.project(v));  // <P_H v, u>
    EXPECT_LE(std::abs(lhs - rhs), 1e-9);
  }
}

TEST(Xi, WedgeWithElementEnlargesSubspace) {
  Rng rng(10);
  for (int i = 0; i < 30; ++i) {
    const auto h = random::any_subspace(rng, 5);
    const std::size_t el = i % 5;
    const auto coord = Subspace::coordinate(h.ground(), singleton(el));
    const Vector ev = coord.basis().col(0);
    const double perp = (ev - h.project(ev)).norm();
    const auto lhs = wedge(xi(h), e(h.ground(), el));
    if (perp < 1e-6) {
      EXPECT_LE(lhs.norm(), 1e-9);
    } else {
      expect_same_profile(lhs, xi(h + coord) * Complex(perp), 1e-9);
    }
  }
}

TEST(Xi, InteriorWithElementShrinksSubspace) {
  Rng rng(11);
  for (int i = 0; i < 30; ++i) {
    const auto h = random::any_subspace(rng, 5);
    const std::size_t el = i % 5;
    const auto coord = Subspace::coordinate(h.ground(), singleton(el));
    const Vector ev = coord.basis().col(0);
    const double along = h.project(ev).norm();
    const auto lhs = interior(xi(h), e(h.ground(), el));
    if (along < 1e-6) {
      EXPECT_LE(lhs.norm(), 1e-9);
    } else {
      expect_same_profile(lhs, xi(h.intersect(coord.complement())) * Complex(along), 1e-9);
    }
  }
}

TEST(LiftedProjection, Examples) {
  const auto g = GroundSet::numbered(3);
  Rng rng(12);
  const auto u = gen::multivector(rng, g, 8);
  const Subspace full(g, Matrix::Identity(3, 3));
  EXPECT_LE(distance(lifted_projection(full, u), u), 1e-12);
  const Subspace zero(g, Matrix(3, 0));
  EXPECT_LE(distance(lifted_projection(zero, u), Multivector::scalar(g, u.coefficient(0))), 1e-12);
  const auto p = lifted_projection(line({1, 1}), e(kG2, 0));
  EXPECT_LE(distance(p, (e(kG2, 0) + e(kG2, 1)) * Complex(0.5)), 1e-15);
}

// Orthogonal projection onto Ext(H) from the orthonormal basis {∧ of basis subsets}.
TEST(LiftedProjection, MatchesProjectionOntoExtH) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto h = random::any_subspace(rng, n);
    const auto u = gen::multivector(rng, h.ground(), 10);
    Multivector want(h.ground());
    const auto r = h.rank();
    for (Subset j = 0; j < (Subset{1} << r); ++j) {
      Multivector b = Multivector::scalar(h.ground());
      for (auto c : elements(j)) b = wedge(b, Multivector::vector(h.ground(), h.basis().col(static_cast<Eigen::Index>(c))));
      want += b * inner(u, b);
    }
    EXPECT_LE(distance(lifted_projection(h, u), want), 1e-10);
  }
}

TEST(OracleCylinder, Examples) {
  EXPECT_NEAR(oracle_cylinder(line({1, 1}), 0, 0), 1.0, 1e-15);
  EXPECT_NEAR(oracle_cylinder(line({1, 1}), 0b01, 0b10), 0.5, 1e-15);
  EXPECT_NEAR(oracle_cylinder(star_space(Graph::complete(3)), 0b011, 0b100), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(oracle_cylinder(line({1, 1}), 0b01, 0b01), 0.0);
}

TEST(OracleCylinder, AgreesWithDeterminantAndEnumeration) {
  Rng rng(14);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const auto h = random::any_subspace(rng, n);
    const auto q = projection_kernel(h);
    const auto table = enumerate(q);
    for (int k = 0; k < 10; ++k) {
      const auto [a, b] = gen::disjoint_pair(rng, n);
      const double det = cylinder_prob(q, a, b);
      EXPECT_NEAR(oracle_cylinder(h, a, b), det, 1e-9);
      EXPECT_NEAR(table.cylinder(a, b), det, 1e-9);
    }
  }
}

TEST(OracleCylinder, CapacityLimit) {
  Rng rng(15);
  EXPECT_THROW(oracle_cylinder(random::subspace(rng, 13, 2), 1, 0), CapacityError);
}

}  // namespace test_extalg
