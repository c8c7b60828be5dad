#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "core/tensor.hpp"

namespace testing {

inline tddr::nn::Matrix mat(Eigen::Index rows, Eigen::Index cols, const std::vector<double>& values) {
  tddr::nn::Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = values.at(static_cast<std::size_t>(k));
  return m;
}

// Network with explicitly given [W0, b0, W1, b1, ...] values (row-major).
inline tddr::nn::Mlp net_from(std::vector<int> widths, tddr::nn::OutputActivation out, double scale,
                              const std::vector<std::vector<double>>& params) {
  tddr::nn::Mlp net(widths, out, scale);
  auto p = net.parameters();
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k].value = mat(p[k].value.rows(), p[k].value.cols(), params.at(k));
  }
  return net;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// Central differences of f with respect to every entry of m.
inline tddr::nn::Matrix numeric_grad(tddr::nn::Matrix& m, const std::function<double()>& f, double h = 1e-5) {
  tddr::nn::Matrix g(m.rows(), m.cols());
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const double saved = m.data()[k];
    m.data()[k] = saved + h;
    const double up = f();
    m.data()[k] = saved - h;
    const double down = f();
    m.data()[k] = saved;
    g.data()[k] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace testing
