#include "zeno/models.hpp"

#include <cmath>
#include <string>

#include "zeno/error.hpp"

namespace zeno {

GenericModel::GenericModel(ComplexMatrix h, std::size_t initial_index)
    : h_(std::move(h)), initial_(initial_index) {
  if (!h_.is_square() || h_.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "model Hamiltonian must be square and non-empty");
  if (initial_ >= h_.rows())
    throw Error(ErrorKind::InvalidArgument,
                "initial_index " + std::to_string(initial_) + " out of range for dim " +
                    std::to_string(h_.rows()));
  if (!h_.all_finite()) throw Error(ErrorKind::InvalidArgument, "model Hamiltonian is not finite");
  if (hermiticity_defect(h_) > 1e-12 * std::max(1.0, h_.max_abs()))
    throw Error(ErrorKind::NonHermitian, "model Hamiltonian is not Hermitian");
}

GenericModel build_generic(const TwoLevelModel& model) {
  if (!(model.omega >= 0.0) || !std::isfinite(model.omega) || !std::isfinite(model.delta))
    throw Error(ErrorKind::InvalidArgument, "two-level model needs finite omega >= 0 and finite delta");
  return GenericModel(ComplexMatrix{{0.0, model.omega}, {model.omega, model.delta}}, 0);
}

GenericModel build_generic(const ContinuumModel& model) {
  if (model.omegas.empty() || model.couplings.empty())
    throw Error(ErrorKind::EmptyContinuum, "continuum model needs at least one mode");
  if (model.omegas.size() != model.couplings.size())
    throw Error(ErrorKind::DimensionMismatch, "omegas and couplings differ in length");
  const std::size_t n = model.omegas.size() + 1;
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < model.omegas.size(); ++i) {
    const auto& v = model.couplings[i];
    if (!std::isfinite(model.omegas[i]) || !std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::InvalidArgument, "continuum mode " + std::to_string(i) + " is not finite");
    h(i + 1, i + 1) = model.omegas[i];
    h(i + 1, 0) = v;
    h(0, i + 1) = std::conj(v);
  }
  return GenericModel(std::move(h), 0);
}

GenericModel build_generic(const ModelDescriptor& model) {
  return std::visit(
      [](const auto& m) -> GenericModel {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, GenericModel>)
          return m;
        else
          return build_generic(m);
      },
      model);
}

ShiftedModel shift_energy_zero(const GenericModel& model) {
  const std::size_t e = model.initial_index();
  const double shift = model.hamiltonian()(e, e).real();
  ComplexMatrix h = model.hamiltonian();
  if (shift != 0.0)
    for (std::size_t i = 0; i < h.rows(); ++i) h(i, i) -= shift;
  h(e, e) = 0.0;
  return {GenericModel(std::move(h), e), shift};
}

double omega_bar(const GenericModel& model) { return model.hamiltonian().max_abs(); }

double delta_h_ee(const GenericModel& model) {
  const auto& h = model.hamiltonian();
  const std::size_t e = model.initial_index();
  if (std::abs(h(e, e)) > 1e-12 * omega_bar(model))
    throw Error(ErrorKind::NotShifted, "delta_h_ee needs <e|H|e> = 0; call shift_energy_zero first");
  // Scaled sum of squares; couplings may be far from unity.
  double scale = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    if (i != e) scale = std::max(scale, std::abs(h(i, e)));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i)
    if (i != e) s += std::norm(h(i, e) / scale);
  return scale * std::sqrt(s);
}

ModelSummary summarize(const GenericModel& model) {
  const ShiftedModel shifted = shift_energy_zero(model);
  return {model.dim(), delta_h_ee(shifted.model), omega_bar(shifted.model), shifted.shift};
}

}  // namespace zeno
