#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gcenter {

/// Number of equivalent interstitial-silicon sites around the C-C axis.
inline constexpr int kSiteCount = 6;

/// One value per site, indexed by n in [0, 5].
using SiteValues = std::array<double, kSiteCount>;

constexpr SiteValues uniform_site_values(double value)
{
  return {value, value, value, value, value, value};
}

/// Sites n and n+3 form an inversion pair sharing one emission dipole.
constexpr int inversion_partner(int site) { return (site + 3) % kSiteCount; }

/// Dipole pair index p in {0,1,2} for sites {p, p+3}.
constexpr int dipole_pair(int site) { return site % 3; }

/// Subset of the six sites, stored as a bitmask.
class SiteSet {
 public:
  constexpr SiteSet() = default;
  SiteSet(std::initializer_list<int> sites);

  static constexpr SiteSet all() { return SiteSet(0x3f); }
  static constexpr SiteSet from_bits(std::uint8_t bits) { return SiteSet(bits & 0x3f); }
  /// Parses "all", "0,3" or "{0,3}".
  static SiteSet parse(const std::string& text);

  constexpr bool contains(int site) const { return (bits_ >> site) & 1u; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  int size() const;
  std::vector<int> sites() const;

  void insert(int site);
  /// Image under the inversion relabeling n -> n+3.
  SiteSet inverted() const;

  std::string to_string() const;

  friend constexpr SiteSet operator|(SiteSet a, SiteSet b) { return SiteSet(a.bits_ | b.bits_); }
  friend constexpr SiteSet operator&(SiteSet a, SiteSet b) { return SiteSet(a.bits_ & b.bits_); }
  friend constexpr auto operator<=>(SiteSet, SiteSet) = default;

 private:
  constexpr explicit SiteSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

/// Crystal direction by integer Miller indices, e.g. [1-10].
struct Miller {
  int h = 0;
  int k = 0;
  int l = 0;

  Eigen::Vector3d vector() const { return Eigen::Vector3d(h, k, l); }
  Eigen::Vector3d unit() const;
  bool is_zero() const { return h == 0 && k == 0 && l == 0; }
  /// "[1-10]" style.
  std::string to_string() const;
  /// Accepts "110", "1-10", "[1-10]", "-1,1,0".
  static Miller parse(const std::string& text);

  friend constexpr bool operator==(const Miller&, const Miller&) = default;
};

/// True if `axis` is a member of the <111> family (sign included).
bool is_111_family(const Miller& axis);

/// Representatives of the four <111> defect orientations, negatives identified.
const std::array<Miller, 4>& defect_orientations();

}  // namespace gcenter
