#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace descon {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// All precondition and configuration failures surface as descon::Error so
// callers (tests, CLI) can distinguish them from genuine logic bugs.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace descon
