#include "cdprune/mask.hpp"

#include "cdprune/errors.hpp"
#include "cdprune/nn.hpp"

namespace cdprune {

PruneMask PruneMask::ones(const Network& net) {
  PruneMask mask;
  for (const auto& layer : net.layers()) {
    mask.layers.push_back(Matrix::Ones(layer.W.rows(), layer.W.cols()));
  }
  mask.surviving = mask.total();
  return mask;
}

std::size_t PruneMask::total() const {
  std::size_t n = 0;
  for (const auto& m : layers) n += static_cast<std::size_t>(m.size());
  return n;
}

double PruneMask::remaining_fraction() const {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(surviving) / static_cast<double>(n);
}

bool PruneMask::matches(const Network& net) const {
  if (layers.size() != net.layers().size()) return false;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& W = net.layers()[l].W;
    if (layers[l].rows() != W.rows() || layers[l].cols() != W.cols()) return false;
  }
  return true;
}

void PruneMask::recount() {
  std::size_t n = 0;
  for (const auto& m : layers) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double v = m.data()[i];
      if (v == 1.0) {
        ++n;
      } else if (v != 0.0) {
        throw ContractError("mask entries must be exactly 0 or 1");
      }
    }
  }
  surviving = n;
}

}  // namespace cdprune
