#pragma once

#include <stdexcept>
#include <string>

namespace cirf {

enum class Errc {
  not_prime,
  order_mismatch,
  divisibility_violation,
  width_overflow,
  correlation_bound_violation,
  length_mismatch,
  shape_mismatch,
  zero_element,
  zero_filter_entry,
  window_too_large,
  rank_too_large,
  dither_exhausted,
  scenario_mismatch,
  empty_scores,
  no_anchor,
  format_version_mismatch,
  corrupt_header,
  corrupt_payload,
  io_error,
  bad_argument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace cirf
