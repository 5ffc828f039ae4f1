#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimred/linalg.hpp"

namespace dimred {

/// Distribution a projection map was drawn from. `explicit_matrix` marks a
/// hand-built map whose entries cannot be regenerated from a seed.
enum class Family { gaussian, rademacher, subspace, explicit_matrix };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// A linear map R^m -> R^d stored as a row-major d x m matrix with any
/// normalization already applied. Immutable once built.
class ProjectionMap {
public:
    ProjectionMap(Family family, std::size_t source_dim, std::size_t target_dim,
                  std::uint64_t seed, std::vector<double> entries);

    static ProjectionMap from_entries(std::size_t source_dim, std::size_t target_dim,
                                      std::vector<double> entries);

    Family family() const noexcept { return family_; }
    std::size_t source_dim() const noexcept { return source_dim_; }
    std::size_t target_dim() const noexcept { return target_dim_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const double> entries() const noexcept { return entries_; }
    double entry(std::size_t row, std::size_t col) const { return entries_[row * source_dim_ + col]; }

    /// Matrix-vector product; throws std::invalid_argument on a dimension mismatch.
    Vector apply(std::span<const double> x) const;
    std::vector<Vector> apply_all(std::span<const Vector> points) const;

private:
    Family family_;
    std::size_t source_dim_;
    std::size_t target_dim_;
    std::uint64_t seed_;
    std::vector<double> entries_;
};

ProjectionMap sample_gaussian(std::size_t m, std::size_t d, std::uint64_t seed);
ProjectionMap sample_rademacher(std::size_t m, std::size_t d, std::uint64_t seed);
/// Orthonormal rows scaled by sqrt(m/d); requires d <= m.
ProjectionMap sample_subspace(std::size_t m, std::size_t d, std::uint64_t seed);
ProjectionMap sample_map(Family family, std::size_t m, std::size_t d, std::uint64_t seed);

/// Image of the j-th standard basis vector under sample_map(family, m, d, seed).
/// Bit-identical to the corresponding column of the full map; the Gaussian and
/// Rademacher families only generate the d entries they need.
Vector basis_image(Family family, std::size_t m, std::size_t d, std::uint64_t seed, std::size_t j);

struct DistortionVerdict {
    std::size_t first = 0;
    std::size_t second = 0;
    double ratio = 1.0;  // ||pi x - pi y|| / ||x - y||, 1 when x == y
    bool preserved = true;
};

/// True iff 1/(1+eps) <= ratio <= 1+eps.
bool within_band(double ratio, double eps) noexcept;

double distortion_ratio(std::span<const double> x, std::span<const double> y,
                        std::span<const double> image_x, std::span<const double> image_y);

DistortionVerdict classify_pair(const ProjectionMap& map, std::span<const double> x,
                                std::span<const double> y, double eps,
                                std::size_t first = 0, std::size_t second = 1);

/// Same predicate for points whose images are already known.
DistortionVerdict classify_images(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> image_x, std::span<const double> image_y,
                                  double eps, std::size_t first = 0, std::size_t second = 1);

/// JSON envelope {family, m, d, seed}; explicit maps also carry "entries".
std::string to_json(const ProjectionMap& map);
ProjectionMap projection_from_json(std::string_view text);

/// Flat little-endian float64 dump of the row-major entries, no header.
void write_binary(const ProjectionMap& map, const std::filesystem::path& path);
ProjectionMap read_binary(const std::filesystem::path& path, std::size_t m, std::size_t d);

}  // namespace dimred
