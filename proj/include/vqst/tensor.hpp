#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace vqst {

using cxd = std::complex<double>;

// Dense complex tensor with row-major flat storage. The flat layout is part
// of the contract: reshape is metadata-only and never touches the data.
class ComplexTensor {
 public:
  ComplexTensor() = default;

  // zero-filled tensor of the given shape
  explicit ComplexTensor(std::vector<std::size_t> shape);

  ComplexTensor(std::vector<std::size_t> shape, std::vector<cxd> data);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const;

  const std::vector<cxd>& data() const { return data_; }
  std::vector<cxd>& data() { return data_; }

  cxd& operator[](std::size_t flat) { return data_[flat]; }
  const cxd& operator[](std::size_t flat) const { return data_[flat]; }

  // multi-index access, row-major
  cxd& at(const std::vector<std::size_t>& idx);
  const cxd& at(const std::vector<std::size_t>& idx) const;

  bool all_finite() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<cxd> data_;
};

struct SvdResult {
  ComplexTensor u;        // m x k, orthonormal columns
  std::vector<double> s;  // k singular values, descending
  ComplexTensor vdag;     // k x n, orthonormal rows
};

// Tensor contraction over the paired axes. The result carries the free axes
// of `a` followed by the free axes of `b`, each in their original order.
ComplexTensor contract(const ComplexTensor& a,
                       const std::vector<std::size_t>& axes_a,
                       const ComplexTensor& b,
                       const std::vector<std::size_t>& axes_b);

// Metadata-only reshape; product of extents must match.
ComplexTensor reshape(const ComplexTensor& a,
                      std::vector<std::size_t> new_shape);

// Axis permutation: result axis i is input axis perm[i]. Data is copied.
ComplexTensor permute(const ComplexTensor& a,
                      const std::vector<std::size_t>& perm);

// Thin SVD of a rank-2 tensor: u * diag(s) * vdag reconstructs the input.
SvdResult svd(const ComplexTensor& m);

// identity matrix as a rank-2 tensor
ComplexTensor identity_tensor(std::size_t n);

}  // namespace vqst
