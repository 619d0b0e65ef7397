#pragma once

#include <stdexcept>
#include <string>

namespace jigsawbench {

// Every recoverable failure in the library carries one of these codes so
// callers (and tests) can react without parsing message strings.
enum class Errc {
  bad_length,
  bad_digit,
  unsupported_value,
  clearance_too_large,
  no_base_plate,
  placement_infeasible,
  gripper_occupied,
  gripper_empty,
  background_missing,
  empty_box,
  out_of_bounds,
  no_attempts,
  no_fragments_placed,
  incompatible_tasks,
  config_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::bad_length: return "BadLength";
    case Errc::bad_digit: return "BadDigit";
    case Errc::unsupported_value: return "UnsupportedValue";
    case Errc::clearance_too_large: return "ClearanceTooLarge";
    case Errc::no_base_plate: return "NoBasePlate";
    case Errc::placement_infeasible: return "PlacementInfeasible";
    case Errc::gripper_occupied: return "GripperOccupied";
    case Errc::gripper_empty: return "GripperEmpty";
    case Errc::background_missing: return "BackgroundMissing";
    case Errc::empty_box: return "EmptyBox";
    case Errc::out_of_bounds: return "OutOfBounds";
    case Errc::no_attempts: return "NoAttempts";
    case Errc::no_fragments_placed: return "NoFragmentsPlaced";
    case Errc::incompatible_tasks: return "IncompatibleTasks";
    case Errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

class BenchError : public std::runtime_error {
 public:
  BenchError(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw BenchError(code, what);
}

}  // namespace jigsawbench
