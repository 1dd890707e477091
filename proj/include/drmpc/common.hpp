#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace drmpc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using MatList = std::vector<Mat>;

// Error hierarchy. The CLI maps the category to a process exit code.
enum class ErrorKind {
  structural,
  dimension,
  unsupported,
  size,
  uncontrollable,
  synthesis,
  schedule_invalid,
  tightening_infeasible,
  infeasible,
  numerical,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by tighten() when a constraint set becomes empty; carries the index.
class TighteningInfeasible : public Error {
 public:
  TighteningInfeasible(const std::string& which, int index)
      : Error(ErrorKind::tightening_infeasible,
              "tightened " + which + " set at step " + std::to_string(index) + " is empty"),
        which_(which),
        index_(index) {}
  const std::string& which() const noexcept { return which_; }
  int index() const noexcept { return index_; }

 private:
  std::string which_;
  int index_;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::dimension, what);
}

enum class Mode { robust, lpv };

inline const char* to_string(Mode m) { return m == Mode::robust ? "robust" : "lpv"; }

}  // namespace drmpc
