#include "vqst/tensor.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "vqst/errors.hpp"

namespace vqst {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t p = 1;
  for (std::size_t e : shape) p *= e;
  return p;
}

// row-major strides
std::vector<std::size_t> strides_of(const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) {
    strides[i - 1] = strides[i] * shape[i];
  }
  return strides;
}

}  // namespace

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_)) {
  for (std::size_t e : shape_) {
    if (e == 0) throw dimension_error("tensor extents must be positive");
  }
}

ComplexTensor::ComplexTensor(std::vector<std::size_t> shape,
                             std::vector<cxd> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (std::size_t e : shape_) {
    if (e == 0) throw dimension_error("tensor extents must be positive");
  }
  if (shape_product(shape_) != data_.size()) {
    throw dimension_error("tensor data length does not match shape");
  }
}

std::size_t ComplexTensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) throw dimension_error("axis out of range");
  return shape_[axis];
}

namespace {

std::size_t flat_index(const std::vector<std::size_t>& shape,
                       const std::vector<std::size_t>& idx) {
  if (idx.size() != shape.size()) throw dimension_error("index rank mismatch");
  std::size_t flat = 0, stride = 1;
  for (std::size_t i = shape.size(); i-- > 0;) {
    if (idx[i] >= shape[i]) throw dimension_error("index out of range");
    flat += idx[i] * stride;
    stride *= shape[i];
  }
  return flat;
}

}  // namespace

cxd& ComplexTensor::at(const std::vector<std::size_t>& idx) {
  return data_[flat_index(shape_, idx)];
}

const cxd& ComplexTensor::at(const std::vector<std::size_t>& idx) const {
  return data_[flat_index(shape_, idx)];
}

bool ComplexTensor::all_finite() const {
  for (const cxd& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

ComplexTensor permute(const ComplexTensor& a,
                      const std::vector<std::size_t>& perm) {
  if (perm.size() != a.rank()) throw dimension_error("permutation rank mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t p : perm) {
    if (p >= perm.size() || seen[p])
      throw dimension_error("invalid axis permutation");
    seen[p] = true;
  }
  std::vector<std::size_t> new_shape(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) new_shape[i] = a.shape()[perm[i]];

  const auto in_strides = strides_of(a.shape());
  const auto out_strides = strides_of(new_shape);
  ComplexTensor out(new_shape);
  const std::size_t n = a.size();
  for (std::size_t flat = 0; flat < n; ++flat) {
    // decompose output flat index, gather from input
    std::size_t rem = flat, src = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      const std::size_t coord = rem / out_strides[i];
      rem %= out_strides[i];
      src += coord * in_strides[perm[i]];
    }
    out[flat] = a[src];
  }
  return out;
}

ComplexTensor contract(const ComplexTensor& a,
                       const std::vector<std::size_t>& axes_a,
                       const ComplexTensor& b,
                       const std::vector<std::size_t>& axes_b) {
  if (axes_a.size() != axes_b.size())
    throw dimension_error("contract: axis lists differ in length");
  for (std::size_t i = 0; i < axes_a.size(); ++i) {
    if (axes_a[i] >= a.rank() || axes_b[i] >= b.rank())
      throw dimension_error("contract: axis out of range");
    if (a.shape()[axes_a[i]] != b.shape()[axes_b[i]])
      throw dimension_error("contract: extent mismatch on paired axes");
  }

  auto free_axes = [](const ComplexTensor& t,
                      const std::vector<std::size_t>& axes) {
    std::vector<bool> contracted(t.rank(), false);
    for (std::size_t ax : axes) contracted[ax] = true;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < t.rank(); ++i)
      if (!contracted[i]) free.push_back(i);
    return free;
  };
  const auto free_a = free_axes(a, axes_a);
  const auto free_b = free_axes(b, axes_b);

  // permute a to (free..., contracted...) and b to (contracted..., free...)
  std::vector<std::size_t> perm_a = free_a;
  perm_a.insert(perm_a.end(), axes_a.begin(), axes_a.end());
  std::vector<std::size_t> perm_b = axes_b;
  perm_b.insert(perm_b.end(), free_b.begin(), free_b.end());

  const ComplexTensor pa = permute(a, perm_a);
  const ComplexTensor pb = permute(b, perm_b);

  std::size_t m = 1, k = 1, n = 1;
  for (std::size_t ax : free_a) m *= a.shape()[ax];
  for (std::size_t ax : axes_a) k *= a.shape()[ax];
  for (std::size_t ax : free_b) n *= b.shape()[ax];

  using Mat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> ma(pa.data().data(), m, k);
  Eigen::Map<const Mat> mb(pb.data().data(), k, n);

  std::vector<std::size_t> out_shape;
  for (std::size_t ax : free_a) out_shape.push_back(a.shape()[ax]);
  for (std::size_t ax : free_b) out_shape.push_back(b.shape()[ax]);
  if (out_shape.empty()) out_shape.push_back(1);  // scalar as shape [1]

  ComplexTensor out(out_shape);
  Eigen::Map<Mat> mo(out.data().data(), m, n);
  mo.noalias() = ma * mb;
  return out;
}

ComplexTensor reshape(const ComplexTensor& a,
                      std::vector<std::size_t> new_shape) {
  if (shape_product(new_shape) != a.size())
    throw dimension_error("reshape: element count mismatch");
  return ComplexTensor(std::move(new_shape), a.data());
}

SvdResult svd(const ComplexTensor& m) {
  if (m.rank() != 2) throw dimension_error("svd: input must be rank-2");
  const std::size_t rows = m.shape()[0];
  const std::size_t cols = m.shape()[1];

  using Mat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Mat> mm(m.data().data(), rows, cols);
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(
      mm, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const std::size_t k = std::min(rows, cols);
  const Eigen::MatrixXcd& u = solver.matrixU();
  const Eigen::MatrixXcd vdag = solver.matrixV().adjoint();
  const Eigen::VectorXd& sv = solver.singularValues();

  SvdResult r;
  r.u = ComplexTensor({rows, k});
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < k; ++j) r.u[i * k + j] = u(i, j);
  r.s.assign(sv.data(), sv.data() + k);
  r.vdag = ComplexTensor({k, cols});
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < cols; ++j) r.vdag[i * cols + j] = vdag(i, j);
  return r;
}

ComplexTensor identity_tensor(std::size_t n) {
  ComplexTensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
  return t;
}

}  // namespace vqst
