#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace evagg {

enum class FeatureKind { text, integer, ipaddr, timestamp };

std::string_view to_string(FeatureKind kind);
std::optional<FeatureKind> parse_feature_kind(std::string_view name);

/// Milliseconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t epoch_ms = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// IPv4 or IPv6 address. IPv4 addresses occupy the first four bytes.
class IpAddress {
 public:
  IpAddress() = default;

  static std::optional<IpAddress> parse(std::string_view text);
  static IpAddress v4(std::uint32_t host_order);

  bool is_v4() const { return !v6_; }
  const std::array<std::uint8_t, 16>& bytes() const { return bytes_; }
  std::uint32_t v4_value() const;

  /// Canonical dotted-quad or RFC 5952 text.
  std::string to_string() const;

  friend auto operator<=>(const IpAddress&, const IpAddress&) = default;

 private:
  bool v6_ = false;
  std::array<std::uint8_t, 16> bytes_{};
};

/// `std::monostate` is the absent value; it is distinct from empty text.
using FeatureValue =
    std::variant<std::monostate, std::string, std::int64_t, IpAddress, Timestamp>;

inline bool is_absent(const FeatureValue& v) {
  return std::holds_alternative<std::monostate>(v);
}

/// Kind of a present value; nullopt for absent.
std::optional<FeatureKind> kind_of(const FeatureValue& v);

/// Canonical text form. Absent renders as the empty string.
std::string to_text(const FeatureValue& v);

/// Converts text to a value of the given kind. Throws TypeMismatch.
FeatureValue parse_value(FeatureKind kind, std::string_view text);

std::size_t hash_value(const FeatureValue& v);

struct FeatureValueHash {
  std::size_t operator()(const FeatureValue& v) const { return hash_value(v); }
};

}  // namespace evagg
