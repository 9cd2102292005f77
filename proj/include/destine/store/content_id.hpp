#pragma once

#include <compare>
#include <string>

namespace destine::store {

// Content identifier returned by a store backend. Opaque to the chain: the
// ledger records the text verbatim and never interprets it.
struct ContentId {
  std::string text;

  friend auto operator<=>(const ContentId&, const ContentId&) = default;
};

}  // namespace destine::store
