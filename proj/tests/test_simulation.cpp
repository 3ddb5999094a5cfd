#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "heavycomb/correlation.hpp"
#include "heavycomb/rng.hpp"
#include "heavycomb/simulation.hpp"

using namespace heavycomb;

namespace {
bool within_se(const SimCell& c, double k = 3.0) {
  const double se = std::sqrt(c.alpha * (1.0 - c.alpha) / c.reps);
  return std::abs(c.rejection_rate - c.alpha) <= k * se;
}

const SimCell& find(const SimReport& r, const std::string& method, double alpha) {
  for (const auto& c : r.cells) {
    if (c.method == method && c.alpha == alpha) return c;
  }
  throw std::runtime_error("missing cell " + method);
}
}  // namespace

TEST_SUITE("sim_engine") {
  TEST_CASE("independent draws are uncorrelated") {
    const int n = 4, reps = 100000;
    Rng rng = make_rng(1, Stream::Fixture, 0);
    std::vector<double> sum(n * n, 0.0);
    for (int r = 0; r < reps; ++r) {
      const auto z = sample_z(CorrelationModel::independent(), n, rng);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sum[i * n + j] += z[i] * z[j];
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) CHECK(std::abs(sum[i * n + j] / reps) < 3.0 / std::sqrt(double(reps)));
  }

  TEST_CASE("exchangeable correlation is reproduced") {
    const int reps = 100000;
    Rng rng = make_rng(2, Stream::Fixture, 0);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    const auto m = CorrelationModel::exchangeable(0.99);
    for (int r = 0; r < reps; ++r) {
      const auto z = sample_z(m, 3, rng);
      sxy += z[0] * z[2];
      sxx += z[0] * z[0];
      syy += z[2] * z[2];
    }
    CHECK(sxy / std::sqrt(sxx * syy) == doctest::Approx(0.99).epsilon(0.005));

    const auto z = sample_z(CorrelationModel::exchangeable(1.0), 5, rng);
    for (double v : z) CHECK(v == z[0]);
  }

  TEST_CASE("structured models via Cholesky") {
    const auto banded = CorrelationModel::banded({0.5, 0.2});
    banded.validate(6);
    const auto mat = banded.matrix_for(6);
    CHECK(mat(0, 1) == 0.5);
    CHECK(mat(0, 2) == 0.2);
    CHECK(mat(0, 3) == 0.0);
    Rng rng = make_rng(3, Stream::Fixture, 0);
    const int reps = 100000;
    double s01 = 0.0, s02 = 0.0, s03 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto x = sample_z(banded, 6, rng);
      s01 += x[0] * x[1];
      s02 += x[0] * x[2];
      s03 += x[0] * x[3];
    }
    const double tol = 4.0 / std::sqrt(double(reps));
    CHECK(std::abs(s01 / reps - 0.5) < tol);
    CHECK(std::abs(s02 / reps - 0.2) < tol);
    CHECK(std::abs(s03 / reps) < tol);

    CHECK_THROWS_AS(CorrelationModel::banded({0.9, 0.9, 0.9, -0.9}).validate(8), DomainError);
    CHECK_THROWS_AS(CorrelationModel::exchangeable(-0.5).validate(5), DomainError);
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 1.5, 1.5, 1.0;
    CHECK_THROWS_AS(CorrelationModel::dense(bad).validate(2), DomainError);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.2, 0.3, 1.0;
    CHECK_THROWS_AS(CorrelationModel::dense(asym).validate(2), DomainError);
  }

  TEST_CASE("z to p") {
    CHECK(z_to_p(0.0) == 1.0);
    CHECK(z_to_p(1.9599639845400545) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(z_to_p(-2.7) == z_to_p(2.7));
    // Kolmogorov-Smirnov distance of null p-values from uniform
    const int reps = 100000;
    std::vector<double> p(reps);
    Rng rng = make_rng(4, Stream::Fixture, 0);
    for (double& v : p) v = z_to_p(rng.normal());
    std::sort(p.begin(), p.end());
    double d = 0.0;
    for (int i = 0; i < reps; ++i) d = std::max({d, std::abs(p[i] - double(i) / reps), std::abs(p[i] - double(i + 1) / reps)});
    CHECK(d < 1.63 / std::sqrt(double(reps)));
  }

  TEST_CASE("type-I calibration under independence (reduced scale)") {
    const std::vector<TransformSpec> methods{TransformSpec::fisher(),        TransformSpec::stouffer(),
                                             TransformSpec::min_p(),         TransformSpec::box_cox(0.75),
                                             TransformSpec::harmonic_mean(), TransformSpec::cauchy(),
                                             TransformSpec::trunc_cauchy(),  TransformSpec::box_cox(1.25)};
    const auto r = type1_table(methods, CorrelationModel::independent(), 100, {0.05, 0.01}, 40000, 11);
    CHECK(r.cells.size() == methods.size() * 2);
    for (const auto& c : r.cells) {
      INFO(c.method << " alpha=" << c.alpha << " rate=" << c.rejection_rate);
      CHECK(within_se(c, 3.5));
      CHECK(c.mc_se == doctest::Approx(std::sqrt(c.rejection_rate * (1 - c.rejection_rate) / c.reps)));
      CHECK(c.threshold_kind == ThresholdKind::Analytic);
    }
  }

  TEST_CASE("strong correlation makes Fisher anti-conservative") {
    const auto r = type1_table({TransformSpec::fisher()}, CorrelationModel::exchangeable(0.99), 100, {0.001}, 20000, 12);
    CHECK(r.cells[0].rejection_rate > 0.02);
  }

  TEST_CASE("corrected thresholds") {
    const auto ca = corrected_threshold(TransformSpec::cauchy(), CorrelationModel::independent(), 10, 0.5, 100000, 13);
    CHECK(std::abs(ca) < 0.1);
    const auto fi = corrected_threshold(TransformSpec::fisher(), CorrelationModel::independent(), 2, 0.05, 100000, 14);
    CHECK(fi == doctest::Approx(9.487729036781158).epsilon(0.02));
    const double analytic = analytic_threshold(TransformSpec::harmonic_mean(), 100, 0.01);
    const auto hm =
        corrected_threshold(TransformSpec::harmonic_mean(), CorrelationModel::exchangeable(0.6), 100, 0.01, 100000, 15);
    // positive dependence inflates HM at this level, so the corrected cut is higher
    CHECK(hm > analytic);
    CHECK_THROWS_AS(corrected_threshold(TransformSpec::cauchy(), CorrelationModel::independent(), 10, 0.001, 1000, 1),
                    DomainError);
  }

  TEST_CASE("power with s = 0 equals the type-I table") {
    const std::vector<TransformSpec> methods{TransformSpec::harmonic_mean(), TransformSpec::min_p()};
    const auto m = CorrelationModel::exchangeable(0.3);
    const auto t1 = type1_table(methods, m, 50, {0.01}, 20000, 16);
    const auto pw = power_table(methods, m, SignalSpec::null(50), {0.01}, 20000, false, 16);
    REQUIRE(t1.cells.size() == pw.cells.size());
    for (std::size_t i = 0; i < t1.cells.size(); ++i) CHECK(t1.cells[i].rejection_rate == pw.cells[i].rejection_rate);
  }

  TEST_CASE("signal specs") {
    const auto s = SignalSpec::sparse_weak(100, 5);
    CHECK(s.mu0 == doctest::Approx(std::sqrt(4.0 * std::log(100.0)) / std::pow(5.0, 0.1)));
    const auto c = SignalSpec::calibrated(400, 0.5, 0.4);
    CHECK(c.s == 20);
    CHECK(c.mu0 == doctest::Approx(std::sqrt(0.8 * std::log(400.0))));
    CHECK_THROWS_AS((SignalSpec{10, 11, 1.0}.validate()), DomainError);
  }

  TEST_CASE("determinism: bit-identical reports for 1 vs k workers") {
    const std::vector<TransformSpec> methods{TransformSpec::fisher(), TransformSpec::cauchy(),
                                             TransformSpec::trunc_cauchy(), TransformSpec::higher_criticism()};
    SimOptions serial, one, three;
    serial.exec = {false, 1};
    one.exec = {true, 1};
    three.exec = {true, 3};
    for (auto* o : {&serial, &one, &three}) o->empirical_reps = 20000;
    const auto m = CorrelationModel::exchangeable(0.4);
    const auto a = power_table(methods, m, SignalSpec::sparse_weak(60, 3), {0.05, 0.01}, 9000, true, 21, serial);
    const auto b = power_table(methods, m, SignalSpec::sparse_weak(60, 3), {0.05, 0.01}, 9000, true, 21, one);
    const auto c = power_table(methods, m, SignalSpec::sparse_weak(60, 3), {0.05, 0.01}, 9000, true, 21, three);
    CHECK(a == b);
    CHECK(a == c);
    const auto r1 = ratio_curve(TransformSpec::harmonic_mean(), m, 3, {1e-2, 1e-3}, 300000, 5, serial.exec);
    const auto r3 = ratio_curve(TransformSpec::harmonic_mean(), m, 3, {1e-2, 1e-3}, 300000, 5, three.exec);
    CHECK(r1 == r3);
  }

  TEST_CASE("rank-one ratio closed form") {
    for (double eta : {0.5, 0.75, 1.0, 1.25, 2.0}) {
      const auto pts = ratio_curve_rank_one(TransformSpec::box_cox(eta), 3, {1e-2, 1e-4, 1e-6});
      for (const auto& p : pts) CHECK(p.log_y == doctest::Approx((1.0 - 1.0 / eta) * std::log(3.0)).epsilon(1e-12));
    }
    CHECK(ratio_curve_rank_one(TransformSpec::harmonic_mean(), 3, {1e-3})[0].log_y == doctest::Approx(0.0));
    // gamma > 1 (eta < 1) gives y < 1, gamma < 1 gives y > 1
    CHECK(ratio_curve_rank_one(TransformSpec::box_cox(0.75), 3, {1e-3})[0].log_y < 0.0);
    CHECK(ratio_curve_rank_one(TransformSpec::box_cox(1.25), 3, {1e-3})[0].log_y > 0.0);
    // simulation at rho = 1 agrees with the closed form
    const auto sim = ratio_curve(TransformSpec::box_cox(1.25), CorrelationModel::exchangeable(1.0), 3, {1e-3}, 200000, 3);
    CHECK(sim[0].log_y == doctest::Approx(0.2 * std::log(3.0)).epsilon(0.05));
  }

  TEST_CASE("ratio shrinks towards zero in the tail") {
    // 1e8 draws leave 1000 exceedances at 1e-5; log y then has MC error ~0.03
    const std::int64_t reps = 100000000;
    const double slack = 2.0 / std::sqrt(1e-5 * double(reps));
    for (double rho : {0.0, 0.3, 0.6}) {
      const auto m = rho == 0.0 ? CorrelationModel::independent() : CorrelationModel::exchangeable(rho);
      const auto pts = ratio_curve(TransformSpec::harmonic_mean(), m, 3, {1e-2, 1e-5}, reps, 40 + int(rho * 10));
      INFO("rho=" << rho << " log y(1e-2)=" << pts[0].log_y << " log y(1e-5)=" << pts[1].log_y);
      CHECK(std::abs(pts[1].log_y) <= std::abs(pts[0].log_y) + slack);
      CHECK(std::abs(pts[1].log_y) <= 0.15);
    }
    const auto near = ratio_curve(TransformSpec::box_cox(0.75), CorrelationModel::exchangeable(0.99), 3, {1e-5}, reps, 50);
    const auto one = ratio_curve_rank_one(TransformSpec::box_cox(0.75), 3, {1e-5});
    INFO("rho=0.99 " << near[0].log_y << " rho=1 " << one[0].log_y);
    CHECK(near[0].log_y < 0.0);
    CHECK(one[0].log_y < 0.0);
    CHECK(std::abs(near[0].log_y - one[0].log_y) <= 0.1);
    CHECK_THROWS_AS(ratio_curve(TransformSpec::harmonic_mean(), CorrelationModel::independent(), 3, {1e-5}, 1000, 1),
                    DomainError);
  }

  TEST_CASE("power grows with n in the detectable region (BC1)") {
    // beta = 0.5, tau = 0.4: sqrt(tau) + sqrt(beta) > 1
    double prev = 0.0, prev_se = 0.0;
    SimOptions o;
    o.null_reps = 40000;
    for (int n : {50, 100, 200, 400}) {
      const auto r = power_table({TransformSpec::harmonic_mean()}, CorrelationModel::independent(),
                                 SignalSpec::calibrated(n, 0.5, 0.4), {0.05}, 4000, true, 60, o);
      const auto& c = r.cells[0];
      INFO("n=" << n << " power=" << c.rejection_rate);
      CHECK(c.threshold_kind == ThresholdKind::EmpiricalCorrected);
      CHECK(c.rejection_rate >= prev - 3.0 * std::sqrt(c.mc_se * c.mc_se + prev_se * prev_se));
      prev = c.rejection_rate;
      prev_se = c.mc_se;
    }
  }

  TEST_CASE("corrected power ordering at rho = 0.99") {
    const std::vector<TransformSpec> methods{TransformSpec::min_p(), TransformSpec::box_cox(1.25),
                                             TransformSpec::harmonic_mean(), TransformSpec::box_cox(0.75)};
    SimOptions o;
    o.null_reps = 200000;
    const auto r = power_table(methods, CorrelationModel::exchangeable(0.99), SignalSpec::sparse_weak(100, 5), {0.01},
                               10000, true, 70, o);
    for (std::size_t i = 0; i + 1 < methods.size(); ++i) {
      const auto& a = find(r, methods[i].label(), 0.01);
      const auto& b = find(r, methods[i + 1].label(), 0.01);
      INFO(a.method << "=" << a.rejection_rate << " " << b.method << "=" << b.rejection_rate);
      CHECK(a.rejection_rate - b.rejection_rate >= 3.0 * std::sqrt(a.mc_se * a.mc_se + b.mc_se * b.mc_se));
    }
  }

  TEST_CASE("inflation grid") {
    SimReport a, b;
    a.cells.push_back({"HM", "independent", 0.05, 0.051, 0.0, 100, 1, 0.0, ThresholdKind::Analytic});
    b.cells.push_back({"HM", "exchangeable(0.3)", 0.05, 0.072, 0.0, 100, 1, 0.0, ThresholdKind::Analytic});
    const auto g = inflation_grid({a, b});
    REQUIRE(g.size() == 1);
    CHECK(g[0].worst_model == "exchangeable(0.3)");
    CHECK(g[0].max_rate == 0.072);
    CHECK(g[0].percent_inflation == doctest::Approx(44.0));
  }
}
