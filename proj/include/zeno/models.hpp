#pragma once

// Model Hamiltonians (hbar = 1, frequencies in units of a caller-chosen
// reference) and the quantities the measurement protocol can recover.

#include <cstddef>
#include <variant>
#include <vector>

#include "zeno/linalg.hpp"

namespace zeno {

/// H = [[0, omega], [omega, delta]] in the basis (|e>, |g>).
struct TwoLevelModel {
  double omega = 0.0;  // Rabi coupling, >= 0
  double delta = 0.0;  // detuning
};

/// |e> at energy 0 coupled to modes |g_i> at omegas[i] through couplings[i].
/// Only a finite discretization of a continuum is represented.
struct ContinuumModel {
  std::vector<double> omegas;
  std::vector<Complex> couplings;  // H_{i e} = V_i
};

/// Full Hermitian matrix with a distinguished initial state |e>.
class GenericModel {
 public:
  GenericModel(ComplexMatrix h, std::size_t initial_index);

  const ComplexMatrix& hamiltonian() const noexcept { return h_; }
  std::size_t initial_index() const noexcept { return initial_; }
  std::size_t dim() const noexcept { return h_.rows(); }

 private:
  ComplexMatrix h_;
  std::size_t initial_;
};

using ModelDescriptor = std::variant<TwoLevelModel, ContinuumModel, GenericModel>;

struct ShiftedModel {
  GenericModel model;
  double shift = 0.0;  // the H_ee that was subtracted
};

struct ModelSummary {
  std::size_t dim = 0;
  double delta_h_ee = 0.0;
  double omega_bar = 0.0;
  double h_ee_shift = 0.0;
};

GenericModel build_generic(const TwoLevelModel& model);
GenericModel build_generic(const ContinuumModel& model);
GenericModel build_generic(const ModelDescriptor& model);

/// H <- H - H_ee I, so that <e|H|e> = 0 exactly.
ShiftedModel shift_energy_zero(const GenericModel& model);

/// sqrt(<e|H^2|e>) = sqrt(Sum_{i != e} |H_ie|^2) for an energy-shifted model.
/// Throws NotShifted when |H_ee| > 1e-12 * omega_bar.
double delta_h_ee(const GenericModel& model);

/// max_ij |H_ij|, the bound used for the validity margin.
double omega_bar(const GenericModel& model);

/// Shifts a copy of the model and reports dim, Delta H_ee, omega_bar and the
/// applied shift (omega_bar is taken after the shift).
ModelSummary summarize(const GenericModel& model);

}  // namespace zeno
