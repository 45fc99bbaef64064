#include "isingps/errors.hpp"

#include <sstream>

namespace isingps {

DivergenceError::DivergenceError(double tau, std::int64_t trajectory)
    : std::runtime_error("trajectory diverged"), tau_(tau), trajectory_(trajectory) {
  rebuild_message();
}

void DivergenceError::set_trajectory(std::int64_t trajectory) {
  trajectory_ = trajectory;
  rebuild_message();
}

void DivergenceError::rebuild_message() {
  std::ostringstream os;
  os << "trajectory diverged (non-finite state) at tau=" << tau_;
  if (trajectory_ >= 0) os << ", trajectory=" << trajectory_;
  message_ = os.str();
}

}  // namespace isingps
