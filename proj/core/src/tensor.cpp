#include "prefdiff/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace prefdiff {

namespace {
size_t shape_product(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d <= 0) throw std::invalid_argument("tensor: shape entries must be positive");
        n *= static_cast<size_t>(d);
    }
    return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size())
        throw std::invalid_argument("tensor: shape " + shape_str() + " does not match data length " +
                                    std::to_string(data_.size()));
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int> shape, double v) {
    Tensor t(std::move(shape));
    for (double& x : t.data_) x = v;
    return t;
}

int Tensor::rows() const {
    if (rank() == 2) return shape_[0];
    if (rank() == 1) return shape_[0];
    throw std::invalid_argument("tensor: rows() on rank " + std::to_string(rank()));
}

int Tensor::cols() const {
    if (rank() == 2) return shape_[1];
    if (rank() == 1) return 1;
    throw std::invalid_argument("tensor: cols() on rank " + std::to_string(rank()));
}

double& Tensor::at(int r, int c) {
    if (rank() != 2) throw std::invalid_argument("tensor: at(r,c) on rank " + std::to_string(rank()));
    return data_[static_cast<size_t>(r) * static_cast<size_t>(shape_[1]) + static_cast<size_t>(c)];
}

double Tensor::at(int r, int c) const { return const_cast<Tensor*>(this)->at(r, c); }

double Tensor::item() const {
    if (data_.size() != 1) throw std::invalid_argument("tensor: item() on non-scalar " + shape_str());
    return data_[0];
}

bool Tensor::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::string Tensor::shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

double dot(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("dot: shape mismatch");
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(const Tensor& a) { return dot(a, a); }

Tensor operator+(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("tensor +: shape mismatch");
    Tensor out = a;
    for (int i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("tensor -: shape mismatch");
    Tensor out = a;
    for (int i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Tensor operator*(double s, const Tensor& a) {
    Tensor out = a;
    for (int i = 0; i < out.size(); ++i) out[i] *= s;
    return out;
}

}  // namespace prefdiff
