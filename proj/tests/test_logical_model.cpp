#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qubot/logical_model.hpp"

using namespace qubot;
using namespace qubot::logical;

namespace {

const cplx I(0, 1);

Eigen::Matrix2cd single(Pauli1 p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli1::I: m << 1, 0, 0, 1; break;
    case Pauli1::X: m << 0, 1, 1, 0; break;
    case Pauli1::Y: m << 0, -I, I, 0; break;
    case Pauli1::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Matrix4c dense(const PauliString& s) {
  const Eigen::Matrix2cd a = single(s.a), b = single(s.b);
  Matrix4c k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return std::pow(I, s.phase.k) * k;
}

std::vector<PauliString> all_strings() {
  std::vector<PauliString> out;
  for (auto a : {Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z})
    for (auto b : {Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z}) out.push_back({a, b});
  return out;
}

bool has(const std::vector<Corrector>& path, Corrector c) {
  return std::find(path.begin(), path.end(), c) != path.end();
}

}  // namespace

TEST_CASE("pauli string products agree with dense matrices (exhaustive)") {
  const auto strings = all_strings();
  for (int pl = 0; pl < 4; ++pl)
    for (auto l : strings)
      for (auto r : strings) {
        l.phase = Phase{pl};
        const PauliString p = l * r;
        CHECK((p.matrix().matrix() - dense(l) * dense(r)).norm() < 1e-14);
        CHECK((p.matrix().matrix() - dense(p)).norm() < 1e-14);
      }
}

TEST_CASE("table rows: computed images and corrected states") {
  const auto report = table1_verify();
  CHECK(report.cells.size() == 12);
  CHECK(report.corrected.size() == 6);
  for (const auto& c : report.cells) CHECK_MESSAGE(c.pass, c.error);
  for (const auto& c : report.corrected) CHECK_MESSAGE(c.pass, c.error);
  CHECK(report.all_pass());
}

TEST_CASE("the opposite L1 phase breaks the corrected column") {
  const auto report = table1_verify(CorrectorConvention{+1});
  CHECK_FALSE(report.all_pass());
  // the error-action cells do not depend on the corrector convention
  for (const auto& c : report.cells) CHECK(c.pass);
}

TEST_CASE("any corrupted table entry is detected") {
  const auto& rows = table1_rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int which = 0; which < 5; ++which) {
      auto bad = rows;
      auto& r = bad[i];
      switch (which) {
        case 0: r.expected[0].first *= -1; break;
        case 1: r.expected[1].first *= -1; break;
        case 2: r.expected[0].second = r.expected[0].second == Bell::psi_plus ? Bell::phi_plus : Bell::psi_plus; break;
        case 3: r.corrected[0] *= -1; break;
        case 4: r.corrected[1] *= -1; break;
      }
      CHECK_FALSE(table1_verify(bad).all_pass());
    }
  }
}

TEST_CASE("correction on a Bloch grid reproduces the corrected column with signs") {
  std::vector<std::pair<cplx, cplx>> grid;
  for (double th : {0.0, 0.7, M_PI / 2, 2.2, M_PI})
    for (double ph : {0.0, 1.0, 2.5, 4.0}) grid.emplace_back(std::cos(th / 2), std::polar(std::sin(th / 2), ph));
  REQUIRE(grid.size() == 20);
  for (const auto& row : table1_rows()) {
    for (auto [alpha, beta] : grid) {
      const auto out = apply_error_and_correct(row.error, logical_state(alpha, beta), {});
      const Vector4c expect = logical_state(double(row.corrected[0]) * alpha, double(row.corrected[1]) * beta).amplitudes();
      CHECK_MESSAGE((out.state.amplitudes() - expect).norm() < 1e-12, row.error.name());
      CHECK(out.reg.mu1 == has(out.path, Corrector::L1));
      CHECK(out.reg.mu2 == has(out.path, Corrector::L2));
    }
    // errors on b leave the logical information intact
    if (row.error.a == Pauli1::I)
      for (auto [alpha, beta] : grid) {
        const auto out = apply_error_and_correct(row.error, logical_state(alpha, beta), {});
        CHECK(out.state.overlap(logical_state(alpha, beta)) == doctest::Approx(1.0).epsilon(1e-12));
      }
  }
}

TEST_CASE("corrector paths follow the post-error sector") {
  const auto psi = logical_state(0.6, 0.8);
  auto path = [&](Pauli1 a, Pauli1 b) { return apply_error_and_correct({a, b}, psi, {}).path; };
  CHECK(path(Pauli1::I, Pauli1::X) == std::vector<Corrector>{Corrector::L2});
  CHECK(path(Pauli1::I, Pauli1::Z) == std::vector<Corrector>{Corrector::L1});
  CHECK(path(Pauli1::X, Pauli1::I) == std::vector<Corrector>{Corrector::L2});
  const auto y = path(Pauli1::I, Pauli1::Y);
  CHECK(y.size() == 2);
  CHECK((has(y, Corrector::L1) && has(y, Corrector::L2)));
  CHECK(path(Pauli1::I, Pauli1::I).empty());
}

TEST_CASE("joint depolarization branches form a partition") {
  for (double p : {0.0, 0.01, 0.3, 0.75, 1.0}) {
    const auto br = depolarize_joint(0.6, cplx(0, 0.8), p);
    double s = 0;
    for (const auto& b : br) s += std::norm(b.weight);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& b : correct_joint(br))
      CHECK(b.state.overlap(logical_state(0.6, cplx(0, 0.8))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(logical_fidelity_after_correction(0.6, cplx(0, 0.8), p) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(depolarize_joint(1, 0, 0.0).size() == 1);
  CHECK_THROWS_AS(depolarize_joint(1, 0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(depolarize_joint(1, 0, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(depolarize_joint(1, 1, 0.1), std::invalid_argument);
}

TEST_CASE("uncorrected fidelity against dense expectation values") {
  const double r = 1 / std::sqrt(2.0);
  for (const auto& e : all_strings()) {
    for (auto [alpha, beta] : {std::pair<cplx, cplx>{1, 0}, {r, r}, {0.6, cplx(0, 0.8)}}) {
      const Vector4c L = logical_state(alpha, beta).amplitudes();
      const double f = std::norm(L.dot(dense(e) * L));
      CHECK(uncorrected_fidelity(e, alpha, beta) == doctest::Approx(f).epsilon(1e-12));
    }
  }
  // Z_a leaves the code space entirely
  CHECK(uncorrected_fidelity({Pauli1::Z, Pauli1::I}, r, r) == doctest::Approx(0.0));
  CHECK(uncorrected_fidelity({Pauli1::I, Pauli1::X}, r, r) == doctest::Approx(1.0));
  CHECK(uncorrected_fidelity({Pauli1::I, Pauli1::X}, 1, 0) == doctest::Approx(0.0));
}

TEST_CASE("equilibria of the dipolar model") {
  const auto p = reference_dipolar_params();
  CHECK(p.jy == -3 * p.jx);
  CHECK(p.jz == 6 * p.jx);
  for (Bell b : kAllBell) {
    const auto res = solve_equilibria(p, b);
    const Vector4c v = bell_state(b).amplitudes();
    const double w = v.dot(interaction_operator(p.jx, p.jy, p.jz).matrix() * v).real();
    CHECK(res.w == doctest::Approx(w).epsilon(1e-14));
    CHECK(res.rhs == doctest::Approx(3 * p.d2 * w / (2 * p.V0)).epsilon(1e-14));
    for (const auto& root : res.roots) {
      const double R = root.R;
      CHECK(R > 0);
      CHECK(std::abs(std::pow(R, 4) * (R - p.delta) - res.rhs) < 1e-9);
      const double h = 1e-4;
      auto V = [&](double x) { return dipolar_potential(p, b, x); };
      CHECK(std::abs(V(R + h) - V(R - h)) / (2 * h) < 1e-6);
      const double second = (V(R + h) - 2 * V(R) + V(R - h)) / (h * h);
      CHECK(root.is_minimum == (second > 0));
    }
  }
  CHECK_FALSE(solve_equilibria(p, Bell::psi_plus).has_minimum());
  CHECK(solve_equilibria(p, Bell::phi_plus).has_minimum());
  DipolarModelParams bad = p;
  bad.V0 = 0;
  CHECK_THROWS_AS(solve_equilibria(bad, Bell::phi_plus), std::invalid_argument);
}
