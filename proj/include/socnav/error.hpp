#pragma once

#include <stdexcept>
#include <string>

namespace socnav {

// Every failure raised by the library carries a stable machine-readable code
// (used verbatim by the CLI and the HTTP service) plus the offending field.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string field, const std::string& detail)
      : std::runtime_error(code + ": " + (field.empty() ? detail : field + ": " + detail)),
        code_(std::move(code)),
        field_(std::move(field)) {}

  const std::string& code() const { return code_; }
  const std::string& field() const { return field_; }

 private:
  std::string code_;
  std::string field_;
};

namespace errc {
inline constexpr const char* malformed_document = "malformed_document";
inline constexpr const char* rle_length_mismatch = "rle_length_mismatch";
inline constexpr const char* out_of_bounds = "out_of_bounds";
inline constexpr const char* invariant_violation = "invariant_violation";
inline constexpr const char* dimension_mismatch = "dimension_mismatch";
inline constexpr const char* empty_batch = "empty_batch";
inline constexpr const char* generation_failed = "generation_failed";
inline constexpr const char* endpoint_mismatch = "endpoint_mismatch";
inline constexpr const char* infeasible = "infeasible";
inline constexpr const char* scenario_mismatch = "scenario_mismatch";
inline constexpr const char* training_aborted = "training_aborted";
inline constexpr const char* invalid_config = "invalid_config";
inline constexpr const char* io_error = "io_error";
inline constexpr const char* not_found = "not_found";
inline constexpr const char* conflict = "conflict";
}  // namespace errc

}  // namespace socnav
