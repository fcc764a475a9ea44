#pragma once

#include <span>
#include <vector>

#include "varlp/grid.hpp"

namespace varlp {

/// Cell-wise variable exponent p: grid -> [1,2].
///
/// Values in the open band (1, 1 + delta_snap) are snapped to exactly 1
/// at construction, so downstream kernels can dispatch on p == 1 and
/// p == 2 by exact comparison and the near-1 ill-conditioning of the
/// interior formulas never arises.
class ExponentMap {
 public:
  static constexpr double default_snap = 0.05;

  ExponentMap(const GridSpec& spec, std::vector<double> values, double delta_snap = default_snap);
  ExponentMap(const ScalarField& values, double delta_snap = default_snap);
  static ExponentMap constant(const GridSpec& spec, double p, double delta_snap = default_snap);

  const GridSpec& spec() const { return spec_; }
  std::int64_t size() const { return spec_.size(); }
  double operator[](std::int64_t k) const { return p_[static_cast<std::size_t>(k)]; }
  double at(std::int64_t i, std::int64_t j) const { return p_[static_cast<std::size_t>(i * spec_.cols + j)]; }
  std::span<const double> values() const { return p_; }
  double delta_snap() const { return delta_snap_; }

  ScalarField to_field() const { return ScalarField(spec_, p_); }

 private:
  GridSpec spec_;
  std::vector<double> p_;
  double delta_snap_;
};

}  // namespace varlp
