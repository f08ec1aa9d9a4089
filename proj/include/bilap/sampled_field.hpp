#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "bilap/field.hpp"
#include "bilap/geometry.hpp"

namespace bilap {

/// A scalar function that can be evaluated, with its gradient, at arbitrary points.
/// Diagnostics consume this so that grid solutions and closed-form fields go through
/// the same quadrature code.
struct SampledField {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  std::function<double(const Point&)> laplacian;  ///< optional
  double resolution = 0.0;                         ///< grid spacing, 0 for closed-form fields

  double operator()(const Point& z) const { return value(z); }
};

inline SampledField analytic_field(std::function<double(const Point&)> value,
                                   std::function<Point(const Point&)> gradient,
                                   std::function<double(const Point&)> laplacian = {}) {
  return SampledField{std::move(value), std::move(gradient), std::move(laplacian), 0.0};
}

/// Wrap a grid field: values by multilinear interpolation, gradients by interpolated
/// central differences. Below y = 0 the even extension is used.
inline SampledField sample_grid(const ScalarField& w, ThinDerivative thin_rule,
                                const ScalarField* laplacian = nullptr) {
  struct Data {
    ScalarField w;
    std::array<ScalarField, 3> grad;
    ScalarField lap;
    bool has_lap = false;
  };
  auto data = std::make_shared<Data>();
  data->w = w;
  data->grad = nodal_gradient(w, thin_rule);
  if (laplacian != nullptr) {
    data->lap = *laplacian;
    data->has_lap = true;
  }
  SampledField out;
  out.resolution = w.grid->spacing();
  out.value = [data](const Point& z) { return interp(data->w, z); };
  out.gradient = [data](const Point& z) {
    const Point q = z[kY] < 0.0 ? mirror(z) : z;
    Point gz{interp(data->grad[0], q), interp(data->grad[1], q), interp(data->grad[2], q)};
    return z[kY] < 0.0 ? mirror(gz) : gz;
  };
  if (data->has_lap) out.laplacian = [data](const Point& z) { return interp(data->lap, z); };
  return out;
}

}  // namespace bilap
