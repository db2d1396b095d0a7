#include "cirf/error.hpp"

namespace cirf {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::not_prime: return "not_prime";
    case Errc::order_mismatch: return "order_mismatch";
    case Errc::divisibility_violation: return "divisibility_violation";
    case Errc::width_overflow: return "width_overflow";
    case Errc::correlation_bound_violation: return "correlation_bound_violation";
    case Errc::length_mismatch: return "length_mismatch";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::zero_element: return "zero_element";
    case Errc::zero_filter_entry: return "zero_filter_entry";
    case Errc::window_too_large: return "window_too_large";
    case Errc::rank_too_large: return "rank_too_large";
    case Errc::dither_exhausted: return "dither_exhausted";
    case Errc::scenario_mismatch: return "scenario_mismatch";
    case Errc::empty_scores: return "empty_scores";
    case Errc::no_anchor: return "no_anchor";
    case Errc::format_version_mismatch: return "format_version_mismatch";
    case Errc::corrupt_header: return "corrupt_header";
    case Errc::corrupt_payload: return "corrupt_payload";
    case Errc::io_error: return "io_error";
    case Errc::bad_argument: return "bad_argument";
  }
  return "unknown";
}

}  // namespace cirf
