#include "zeno/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zeno/error.hpp"
#include "zeno/rng.hpp"

namespace zeno {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxCompositeCycles = 1e6;

void require_shifted(const GenericModel& model) {
  const auto e = model.initial_index();
  if (std::abs(model.hamiltonian()(e, e)) > 1e-12 * omega_bar(model))
    throw Error(ErrorKind::NotShifted, "model must have <e|H|e> = 0; call shift_energy_zero first");
}

// 1 - |1 + inc|^2 without forming 1 + inc.
double deficit_from_increment(Complex inc) { return -2.0 * inc.real() - std::norm(inc); }

// log |1 + inc|
double log_modulus(Complex inc) {
  if (std::abs(inc) < 0.5) return 0.5 * std::log1p(-deficit_from_increment(inc));
  return std::log(std::abs(1.0 + inc));
}

double argument(Complex inc) { return std::atan2(inc.imag(), 1.0 + inc.real()); }

// log(Sum_s w_s exp(x_s)) for normalized weights w_s; stays accurate when
// every x_s is tiny.
double log_weighted_sum_exp(const std::array<double, 2>& w, const std::array<double, 2>& x) {
  bool small = true;
  for (std::size_t s = 0; s < 2; ++s)
    if (w[s] > 0.0 && !(x[s] >= -1.0)) small = false;
  if (small) {
    double acc = 0.0;
    for (std::size_t s = 0; s < 2; ++s)
      if (w[s] > 0.0) acc += w[s] * std::expm1(x[s]);
    return std::log1p(acc);
  }
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < 2; ++s)
    if (w[s] > 0.0) m = std::max(m, std::log(w[s]) + x[s]);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (std::size_t s = 0; s < 2; ++s)
    if (w[s] > 0.0) acc += std::exp(std::log(w[s]) + x[s] - m);
  return m + std::log(acc);
}

std::array<double, 2> ancilla_weights(const StateVector& ancilla) {
  if (ancilla.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "ancilla must be a qubit");
  if (!ancilla.is_normalized()) throw Error(ErrorKind::InvalidArgument, "ancilla must be normalized");
  const double wp = std::norm(ancilla[0]);
  const double wm = std::norm(ancilla[1]);
  const double total = wp + wm;
  return {wp / total, wm / total};
}

}  // namespace

StateVector equal_superposition() {
  const double r = 1.0 / std::numbers::sqrt2;
  return StateVector{Complex(r), Complex(r)};
}

void ProtocolParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw Error(ErrorKind::InvalidArgument, "tau must be positive and finite");
  if (!(nu > 0.0) || !(nu <= kPi))
    throw Error(ErrorKind::InvalidArgument, "nu must lie in (0, pi]");
  if (!(n_cycles >= 1.0) || !std::isfinite(n_cycles) || std::floor(n_cycles) != n_cycles)
    throw Error(ErrorKind::InvalidArgument, "n_cycles must be a whole number >= 1");
  if (q_rounds < 1) throw Error(ErrorKind::InvalidArgument, "q_rounds must be >= 1");
  if (ancilla.dim() != 2 || !ancilla.is_normalized())
    throw Error(ErrorKind::InvalidArgument, "ancilla must be a normalized qubit state");
}

std::size_t MeasurementRecord::survived_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rounds.begin(), rounds.end(), [](const RoundResult& r) { return r.survived; }));
}

std::size_t MeasurementRecord::minus_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      rounds.begin(), rounds.end(), [](const RoundResult& r) { return r.outcome == Outcome::Minus; }));
}

std::size_t MeasurementRecord::plus_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      rounds.begin(), rounds.end(), [](const RoundResult& r) { return r.outcome == Outcome::Plus; }));
}

bool operator==(const MeasurementRecord& a, const MeasurementRecord& b) {
  if (a.seed != b.seed || a.rounds.size() != b.rounds.size()) return false;
  for (std::size_t i = 0; i < a.rounds.size(); ++i)
    if (a.rounds[i].survived != b.rounds[i].survived || a.rounds[i].outcome != b.rounds[i].outcome)
      return false;
  const auto& p = a.params;
  const auto& q = b.params;
  return p.tau == q.tau && p.nu == q.nu && p.n_cycles == q.n_cycles && p.q_rounds == q.q_rounds &&
         p.seed == q.seed;
}

CycleAmplitudes compute_cycle_amplitudes(const GenericModel& model, double tau, double nu) {
  require_shifted(model);
  return compute_cycle_amplitudes(model, spectral_decompose(model.hamiltonian()), tau, nu);
}

CycleAmplitudes compute_cycle_amplitudes(const GenericModel& model, const SpectralDecomposition& decomp,
                                         double tau, double nu) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  if (!std::isfinite(nu)) throw Error(ErrorKind::InvalidArgument, "nu must be finite");
  require_shifted(model);

  const auto& h = model.hamiltonian();
  const auto e = model.initial_index();
  const ComplexMatrix inc = evolution_increment(h, decomp, 0.5 * tau);

  CycleAmplitudes c;
  c.u = inc(e, e);
  // Explicit intermediate-state sum; <e|K(tau)|e> - K_ee^2 would be a
  // difference of two numbers that both round to 1.
  Complex dk2{};
  for (std::size_t i = 0; i < model.dim(); ++i)
    if (i != e) dk2 += inc(e, i) * inc(i, e);
  c.delta_k2 = dk2;

  const Complex base = 2.0 * c.u + c.u * c.u;
  const Complex rot(std::cos(nu), std::sin(nu));
  c.lambda_plus_inc = base + rot * dk2;
  c.lambda_minus_inc = base + std::conj(rot) * dk2;
  return c;
}

double variance_identity_residual(const GenericModel& model, double tau) {
  const auto e = model.initial_index();
  const SpectralDecomposition decomp = spectral_decompose(model.hamiltonian());
  const ComplexMatrix half = evolution_operator(decomp, 0.5 * tau);
  const ComplexMatrix full = evolution_operator(decomp, tau);
  Complex lhs{};
  for (std::size_t i = 0; i < model.dim(); ++i)
    if (i != e) lhs += half(e, i) * half(i, e);
  const Complex rhs = full(e, e) - half(e, e) * half(e, e);
  return std::abs(lhs - rhs);
}

SurvivalProbability exact_survival_one_cycle(const CycleAmplitudes& cycle, const StateVector& ancilla) {
  const auto w = ancilla_weights(ancilla);
  const double deficit = w[0] * deficit_from_increment(cycle.lambda_plus_inc) +
                         w[1] * deficit_from_increment(cycle.lambda_minus_inc);
  const double d = std::clamp(deficit, 0.0, 1.0);
  return {std::log1p(-d), d};
}

BranchReport run_postselected(const CycleAmplitudes& cycle, const ProtocolParams& params) {
  params.validate();
  const double n = params.n_cycles;
  const auto w = ancilla_weights(params.ancilla);
  const std::array<Complex, 2> inc{cycle.lambda_plus_inc, cycle.lambda_minus_inc};

  std::array<double, 2> log_mod{};
  std::array<double, 2> arg{};
  std::array<double, 2> x{};  // 2 N log|lambda_s|
  for (std::size_t s = 0; s < 2; ++s) {
    log_mod[s] = log_modulus(inc[s]);
    arg[s] = argument(inc[s]);
    x[s] = 2.0 * n * log_mod[s];
  }

  const double log_survival = std::min(0.0, log_weighted_sum_exp(w, x));
  if (!std::isfinite(log_survival))
    throw Error(ErrorKind::BranchAnnihilated, "the post-selected branch has zero probability");

  std::vector<Complex> amps(2);
  for (std::size_t s = 0; s < 2; ++s) {
    if (w[s] == 0.0 || !std::isfinite(x[s])) continue;
    const double modulus = std::exp(0.5 * (std::log(w[s]) + x[s] - log_survival));
    const double phase =
        std::arg(params.ancilla[s]) + std::remainder(n * arg[s], 2.0 * kPi);
    amps[s] = std::polar(modulus, phase);
  }

  BranchReport r;
  r.ancilla_state = StateVector(std::move(amps)).normalized();
  r.phi_exact_per_cycle = 0.5 * (arg[0] - arg[1]);
  r.common_phase_per_cycle = 0.5 * (arg[0] + arg[1]);
  r.log_survival = log_survival;
  r.survival_deficit = -std::expm1(log_survival);
  r.n_cycles = n;
  return r;
}

CompositeResult run_full_composite(const GenericModel& model, const ProtocolParams& params,
                                   CompositeMode mode) {
  params.validate();
  if (params.n_cycles > kMaxCompositeCycles)
    throw Error(ErrorKind::GuardExceeded, "explicit simulation is limited to 1e6 cycles");
  require_shifted(model);

  const std::size_t d = model.dim();
  const std::size_t e = model.initial_index();
  const auto cycles = static_cast<std::size_t>(params.n_cycles);

  const SpectralDecomposition decomp = spectral_decompose(model.hamiltonian());
  const ComplexMatrix free = kron(evolution_operator(decomp, 0.5 * params.tau), ComplexMatrix::identity(2));

  ComplexMatrix proj_e(d, d);
  proj_e(e, e) = 1.0;
  const std::array<Complex, 2> m_diag{std::polar(1.0, params.nu), std::polar(1.0, -params.nu)};
  const ComplexMatrix controlled_m =
      kron(proj_e, ComplexMatrix::identity(2)) +
      kron(ComplexMatrix::identity(d) - proj_e, ComplexMatrix::diagonal(m_diag));
  const ComplexMatrix cycle_op = free * controlled_m * free;

  // Per-cycle eigenvalues of the ancilla map, read off the composite operator.
  std::array<Complex, 2> lambda{cycle_op(2 * e, 2 * e), cycle_op(2 * e + 1, 2 * e + 1)};

  std::vector<Complex> psi(2 * d);
  psi[2 * e] = params.ancilla[0];
  psi[2 * e + 1] = params.ancilla[1];

  std::vector<double> cycle_loss;  // 1 - p_n, only needed for sampling
  if (mode == CompositeMode::Sample) cycle_loss.reserve(cycles);
  double log_survival = 0.0;
  for (std::size_t c = 0; c < cycles; ++c) {
    std::vector<Complex> next = matvec(cycle_op, psi);
    const Complex ap = next[2 * e];
    const Complex am = next[2 * e + 1];
    const double p = std::norm(ap) + std::norm(am);
    if (p == 0.0) throw Error(ErrorKind::BranchAnnihilated, "projection found no weight on |e>");
    log_survival += std::log(p);
    if (mode == CompositeMode::Sample) cycle_loss.push_back(1.0 - p);
    const double inv = 1.0 / std::sqrt(p);
    std::fill(psi.begin(), psi.end(), Complex{});
    psi[2 * e] = ap * inv;
    psi[2 * e + 1] = am * inv;
  }

  CompositeResult out;
  BranchReport& b = out.branch;
  b.ancilla_state = StateVector{psi[2 * e], psi[2 * e + 1]}.normalized();
  b.phi_exact_per_cycle = 0.5 * (std::arg(lambda[0]) - std::arg(lambda[1]));
  b.common_phase_per_cycle = 0.5 * (std::arg(lambda[0]) + std::arg(lambda[1]));
  b.log_survival = log_survival;
  b.survival_deficit = -std::expm1(log_survival);
  b.n_cycles = params.n_cycles;

  out.record.seed = params.seed;
  out.record.params = params;
  if (mode == CompositeMode::Sample) {
    const ReadoutProbabilities readout = readout_probabilities(b.ancilla_state);
    out.record.rounds.reserve(params.q_rounds);
    for (std::uint64_t q = 0; q < params.q_rounds; ++q) {
      RandomStream rng(params.seed, q);
      RoundResult round{true, Outcome::None};
      for (double loss : cycle_loss) {
        if (rng.uniform() < loss) {
          round.survived = false;
          break;
        }
      }
      if (round.survived) round.outcome = rng.uniform() < readout.p_minus ? Outcome::Minus : Outcome::Plus;
      out.record.rounds.push_back(round);
    }
  }
  return out;
}

double second_order_phi(double tau, double nu, double delta_h) {
  return -tau * tau * delta_h * delta_h * std::sin(nu) / 4.0;
}

double second_order_pe(double tau, double nu, double delta_h) {
  // (1 + cos nu) / 2 = cos^2(nu/2), exact near nu = pi.
  const double c = std::cos(0.5 * nu);
  return tau * tau * delta_h * delta_h * c * c;
}

double snr(double nu) { return 0.5 * std::tan(0.5 * nu); }

ValidityMargin validity_margin(double tau, double nu, double omega_bar) {
  const double tob = tau * omega_bar;
  const double gap = std::abs(kPi - nu);
  const double margin = tob > 0.0 ? gap / std::sqrt(tob) : std::numeric_limits<double>::infinity();
  return {margin, tob};
}

ReadoutProbabilities readout_probabilities(const StateVector& ancilla) {
  if (ancilla.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "ancilla must be a qubit");
  const Complex sum = ancilla[0] + ancilla[1];
  const Complex diff = ancilla[0] - ancilla[1];
  const double pp = 0.5 * std::norm(sum);
  const double pm = 0.5 * std::norm(diff);
  const double total = pp + pm;
  return {pp / total, pm / total};
}

}  // namespace zeno
