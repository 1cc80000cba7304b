#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "zeno/error.hpp"
#include "zeno/estimator.hpp"
#include "zeno/rng.hpp"

using namespace zeno;

namespace {

constexpr double kPi = std::numbers::pi;
const double kRefTau = 1e-8;
const double kRefNu = kPi - 1e-4;

GenericModel two_level(double omega, double delta) { return build_generic(TwoLevelModel{omega, delta}); }

ProtocolParams campaign_params(double tau, double nu, double n, std::uint64_t q, std::uint64_t seed) {
  ProtocolParams p;
  p.tau = tau;
  p.nu = nu;
  p.n_cycles = n;
  p.q_rounds = q;
  p.seed = seed;
  return p;
}

double reference_n() { return std::ceil(1.0 / std::abs(second_order_phi(kRefTau, kRefNu, 1.0))); }

// A record with the given counts, filled in a fixed order.
MeasurementRecord synthetic_record(const ProtocolParams& p, std::size_t minus, std::size_t plus,
                                   std::size_t lost) {
  MeasurementRecord r;
  r.params = p;
  r.seed = p.seed;
  for (std::size_t i = 0; i < minus; ++i) r.rounds.push_back({true, Outcome::Minus});
  for (std::size_t i = 0; i < plus; ++i) r.rounds.push_back({true, Outcome::Plus});
  for (std::size_t i = 0; i < lost; ++i) r.rounds.push_back({false, Outcome::None});
  return r;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("decoupled model: every round survives and reads plus") {
  const auto m = two_level(0.0, 2.0);
  const auto rec = run_campaign(m, campaign_params(0.1, kPi / 2, 1000, 50, 1));
  CHECK(rec.rounds.size() == 50);
  CHECK(rec.survived_count() == 50);
  CHECK(rec.plus_count() == 50);
  CHECK(rec.all_survived());
}

TEST_CASE("campaign at the reference point") {
  const auto rec = run_campaign(two_level(1.0, 1.0), campaign_params(kRefTau, kRefNu, reference_n(), 100, 7));
  CHECK(rec.survived_count() >= 97);
  // minus ~ Binomial(100, sin^2 1): mean 70.8, sd 4.5
  CHECK(rec.minus_count() >= 57);
  CHECK(rec.minus_count() <= 85);
  CHECK(rec.minus_count() + rec.plus_count() == rec.survived_count());
}

TEST_CASE("one round") {
  const auto rec = run_campaign(two_level(1.0, 1.0), campaign_params(1e-3, 1.0, 10, 1, 0));
  CHECK(rec.rounds.size() == 1);
}

TEST_CASE("campaigns are deterministic in the seed") {
  const auto m = two_level(1.0, 0.5);
  const auto p = campaign_params(1e-2, kPi / 2, 31416, 300, 12345);
  const auto a = run_campaign(m, p);
  CHECK(a == run_campaign(m, p));
  auto q = p;
  q.seed = 12346;
  CHECK_FALSE(a == run_campaign(m, q));
}

TEST_CASE("inversion examples") {
  const auto p = campaign_params(kRefTau, kRefNu, 4e20, 10000, 0);
  const auto zero = estimate_fixed_n(synthetic_record(p, 0, 10000, 0));
  CHECK(zero.n_phi_hat == 0.0);
  CHECK(zero.delta_h_hat == 0.0);
  CHECK(zero.ci95_delta_h.contains(0.0));

  const auto one = estimate_fixed_n(synthetic_record(p, 7081, 2919, 0));
  CHECK(one.n_phi_hat == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(one.delta_h_hat == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(one.ci95_delta_h.contains(one.delta_h_hat));
  CHECK(one.ci95_delta_h.contains(1.0));
  CHECK(one.ci95_delta_h.upper - one.ci95_delta_h.lower < 0.05);

  const auto half = estimate_fixed_n(synthetic_record(p, 50, 50, 3));
  CHECK(half.n_phi_hat == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(half.survived_rounds == 100);
  CHECK(half.total_rounds == 103);
  CHECK(half.minus_rounds == 50);
  CHECK(half.phi_hat == doctest::Approx(kPi / 4 / 4e20).epsilon(1e-15));
}

TEST_CASE("inversion edge cases") {
  const auto p = campaign_params(1e-2, kPi / 2, 1000, 10, 0);
  CHECK(kind_of([&] { estimate_fixed_n(synthetic_record(p, 0, 0, 10)); }) == ErrorKind::NoSurvivors);
  const auto all_minus = estimate_fixed_n(synthetic_record(p, 10, 0, 0));
  CHECK(all_minus.degenerate);
  CHECK(all_minus.n_phi_hat == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(all_minus.ci95_delta_h.contains(all_minus.delta_h_hat));
}

TEST_CASE("choosing N") {
  CHECK(choose_n(kRefTau, kRefNu, 1.0) == doctest::Approx(3.1416e20).epsilon(1e-4));
  CHECK(choose_n(1e-2, kPi / 2, 1.0) == 31416.0);
  CHECK(kind_of([] { choose_n(1e-2, kPi / 2, 0.0); }) == ErrorKind::NoFiniteCount);
  CHECK(kind_of([] { choose_n(1e-16, 1e-6, 1e-3); }) == ErrorKind::GuardExceeded);
  // The ceil(1/|phi|) count is accepted as well.
  CHECK_NOTHROW(campaign_params(kRefTau, kRefNu, reference_n(), 1, 0).validate());
}

TEST_CASE("adaptive estimation of a two-level coupling") {
  const auto m = two_level(1.0, 1.0);
  int within = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto r = estimate_adaptive(m, 1e-2, kPi / 2, 400, static_cast<std::uint64_t>(s));
    if (std::abs(r.delta_h_hat - 1.0) <= 0.1) ++within;
    CHECK(r.total_rounds == 400);
    CHECK(r.survived_rounds <= r.total_rounds);
    CHECK(r.delta_h_hat >= 0.0);
    CHECK(r.ci95_delta_h.contains(r.delta_h_hat));
  }
  CHECK(within >= 18);
}

TEST_CASE("adaptive intervals cover the truth at about the nominal rate") {
  const auto m = build_generic(ContinuumModel{{0.5, -2.0}, {3.0, 4.0}});
  int covered = 0;
  const int seeds = 300;
  for (int s = 0; s < seeds; ++s)
    if (estimate_adaptive(m, 1e-2, kPi / 2, 400, static_cast<std::uint64_t>(s)).ci95_delta_h.contains(5.0))
      ++covered;
  // 95% nominal; 0.9 is about four binomial standard deviations below.
  CHECK(covered >= 0.9 * seeds);
}

TEST_CASE("adaptive estimation with no coupling finds zero") {
  const auto r = estimate_adaptive(two_level(0.0, 1.0), 1e-2, kPi / 2, 400, 3);
  CHECK(r.delta_h_hat == 0.0);
  CHECK(r.minus_rounds == 0);
  CHECK(r.converged);
  const auto z = estimate_adaptive(GenericModel(ComplexMatrix(3, 3), 1), 1e-2, kPi / 2, 64, 3);
  CHECK(z.delta_h_hat == 0.0);
}

TEST_CASE("adaptive estimation is deterministic and validates its budget") {
  const auto m = build_generic(ContinuumModel{{0.5, -1.0}, {3.0, 4.0}});
  const auto a = estimate_adaptive(m, 1e-2, kPi / 2, 400, 77);
  const auto b = estimate_adaptive(m, 1e-2, kPi / 2, 400, 77);
  CHECK(a.delta_h_hat == b.delta_h_hat);
  CHECK(a.schedule == b.schedule);
  CHECK(a.minus_rounds == b.minus_rounds);
  CHECK(a.ci95_delta_h.lower == b.ci95_delta_h.lower);
  CHECK(kind_of([&] { estimate_adaptive(m, 1e-2, kPi / 2, 15, 0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("adaptive schedule never exceeds the aliasing limit") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> lt(-4.0, -1.0);
  std::uniform_real_distribution<double> un(0.2, kPi - 0.2);
  for (int i = 0; i < 40; ++i) {
    const std::size_t d = 2 + static_cast<std::size_t>(i % 6);
    const auto m = zeno::testing::random_shifted_model(d, rng);
    const double tau = std::pow(10.0, lt(rng));
    const double nu = un(rng);
    const auto r = estimate_adaptive(m, tau, nu, 128, static_cast<std::uint64_t>(i));
    const double worst = omega_bar(m) * std::sqrt(static_cast<double>(d - 1));
    const double worst_phi = std::abs(second_order_phi(tau, nu, worst));
    for (double n : r.schedule) CHECK(n * worst_phi <= kPi / 2);
    // The worst case really bounds the true Delta H.
    CHECK(delta_h_ee(m) <= worst);
  }
}

TEST_CASE("survival prediction examples") {
  const auto m = two_level(1.0, 1.0);
  const auto cycle = compute_cycle_amplitudes(m, kRefTau, kRefNu);
  const auto ref_point = predicted_survival(campaign_params(kRefTau, kRefNu, reference_n(), 100, 0), cycle);
  CHECK(ref_point.p_all == doctest::Approx(0.990).epsilon(1e-3));
  CHECK(ref_point.asymptote == doctest::Approx(std::exp(-0.01)).epsilon(1e-6));

  const auto low = predicted_survival(campaign_params(1e-2, kPi / 2, 10, 100, 0),
                                      compute_cycle_amplitudes(m, 1e-2, kPi / 2));
  CHECK(low.asymptote == doctest::Approx(std::exp(-200.0)).epsilon(1e-10));

  const auto frozen = predicted_survival(campaign_params(1e-2, kPi / 2, 1e6, 100, 0), CycleAmplitudes{});
  CHECK(frozen.p_all == 1.0);

  CHECK(second_order_p_all(kRefTau, kRefNu, 1.0, reference_n(), 100) == doctest::Approx(0.990).epsilon(1e-3));
  CHECK(second_order_p_all(10.0, 0.0, 1.0, 1, 1) == 0.0);
}

TEST_CASE("estimates at the reference point are consistent across seeds") {
  const auto m = two_level(1.0, 1.0);
  const auto shifted = shift_energy_zero(m).model;
  const auto p0 = campaign_params(kRefTau, kRefNu, reference_n(), 100, 0);
  const auto branch = run_postselected(compute_cycle_amplitudes(shifted, kRefTau, kRefNu), p0);
  const int seeds = 40;
  double sum = 0.0;
  int covered = 0;
  for (int s = 0; s < seeds; ++s) {
    auto p = p0;
    p.seed = derive_seed(2024, static_cast<std::uint64_t>(s));
    const auto est = estimate_fixed_n(run_campaign(branch, p));
    sum += est.delta_h_hat;
    if (est.ci95_delta_h.contains(1.0)) ++covered;
  }
  CHECK(std::abs(sum / seeds - 1.0) <= 0.05);
  CHECK(covered >= 0.9 * seeds);
}

TEST_CASE("empirical survival follows exp(N log P)") {
  const auto m = shift_energy_zero(two_level(1.0, 1.0)).model;
  const double tau = 1e-2, nu = kPi / 2, n = 31416;
  const auto cycle = compute_cycle_amplitudes(m, tau, nu);
  const auto one = exact_survival_one_cycle(cycle, equal_superposition());
  const double expect = std::exp(n * one.log_p);
  CHECK(expect > 0.1);
  CHECK(expect < 0.5);
  std::size_t survived = 0, total = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto rec = run_campaign(m, campaign_params(tau, nu, n, 100, s));
    survived += rec.survived_count();
    total += rec.rounds.size();
  }
  const double sd = std::sqrt(expect * (1 - expect) / static_cast<double>(total));
  CHECK(std::abs(static_cast<double>(survived) / total - expect) <= 3 * sd);
}

TEST_CASE("relabelling continuum frequencies leaves the statistics unchanged") {
  const std::vector<Complex> v{3.0, Complex(0.0, 4.0), 1.0};
  const double tau = 1e-6, nu = kPi / 2;
  const double n = choose_n(tau, nu, std::sqrt(26.0));
  const auto base = build_generic(ContinuumModel{{0.0, 1.0, 2.0}, v});
  const auto ref = estimate_fixed_n(run_campaign(base, campaign_params(tau, nu, n, 200, 5)));
  for (const std::vector<double>& w : {std::vector<double>{2.0, 0.0, 1.0}, std::vector<double>{-7.0, 3.5, 11.0}}) {
    const auto rec = run_campaign(build_generic(ContinuumModel{w, v}), campaign_params(tau, nu, n, 200, 5));
    const auto est = estimate_fixed_n(rec);
    CHECK(est.minus_rounds == ref.minus_rounds);
    CHECK(est.survived_rounds == ref.survived_rounds);
    CHECK(est.delta_h_hat == ref.delta_h_hat);
  }
  CHECK(ref.delta_h_hat == doctest::Approx(std::sqrt(26.0)).epsilon(0.1));
}

TEST_CASE("derived coupling naming") {
  CHECK(derive_coupling(TwoLevelModel{1.0, 1.0}, 0.9)->name == "omega");
  CHECK(derive_coupling(ContinuumModel{{1.0}, {1.0}}, 0.9)->name == "rms_coupling");
  CHECK_FALSE(derive_coupling(GenericModel(ComplexMatrix::identity(2), 0), 0.9).has_value());
}

}  // TEST_SUITE
