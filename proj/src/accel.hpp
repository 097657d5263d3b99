#pragma once

#include <deque>

#include "twr/types.hpp"

namespace twr::detail {

// Anderson extrapolation over the history of (iterate, map value) pairs of
// a fixed-point iteration x -> G(x). candidate() returns the least-squares
// combination; callers must safeguard acceptance (monotone MSE) themselves.
class AndersonAccelerator {
 public:
  explicit AndersonAccelerator(int memory = 12) : memory_(memory) {}

  void push(const Vec& x, const Vec& gx) {
    xs_.push_back(x);
    gs_.push_back(gx);
    if (static_cast<int>(xs_.size()) > memory_) {
      xs_.pop_front();
      gs_.pop_front();
    }
  }

  bool ready() const { return xs_.size() >= 2; }

  Vec candidate() const {
    const int m = static_cast<int>(xs_.size()) - 1;
    const Index dim = xs_.back().size();
    Eigen::MatrixXcd f(dim, m + 1);
    for (int j = 0; j <= m; ++j) f.col(j) = gs_[static_cast<size_t>(j)] - xs_[static_cast<size_t>(j)];
    Eigen::MatrixXcd df(dim, m);
    for (int j = 0; j < m; ++j) df.col(j) = f.col(j + 1) - f.col(j);
    const Eigen::VectorXcd gamma = df.colPivHouseholderQr().solve(f.col(m));
    Vec out = gs_.back();
    for (int j = 0; j < m; ++j) {
      out -= gamma[j] * (gs_[static_cast<size_t>(j + 1)] - gs_[static_cast<size_t>(j)]);
    }
    return out;
  }

  void reset() {
    xs_.clear();
    gs_.clear();
  }

 private:
  int memory_;
  std::deque<Vec> xs_, gs_;
};

}  // namespace twr::detail
