#include "dimred/projection.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dimred/random.hpp"
#include "json.hpp"

namespace dimred {

namespace {

void check_dims(std::size_t m, std::size_t d) {
    if (m == 0 || d == 0) throw std::invalid_argument("projection dimensions must be positive");
}

std::uint64_t family_tag(Family family) {
    switch (family) {
        case Family::gaussian: return 1;
        case Family::rademacher: return 2;
        case Family::subspace: return 3;
        case Family::explicit_matrix: return 4;
    }
    return 0;
}

// Every entry is keyed by (family, m, d, seed, index), so maps that differ in
// any of these are independent.
std::uint64_t entry_key(Family family, std::size_t m, std::size_t d, std::uint64_t seed) {
    return derive_seed(seed, family_tag(family), (static_cast<std::uint64_t>(m) << 32) ^ d);
}

// Unscaled N(0,1) matrix shared by the Gaussian and subspace families.
std::vector<double> gaussian_entries(Family family, std::size_t m, std::size_t d, std::uint64_t seed) {
    const std::uint64_t key = entry_key(family, m, d, seed);
    std::vector<double> entries(m * d);
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] = counter_normal(key, i);
    return entries;
}

std::uint64_t to_little_endian(std::uint64_t bits) {
    if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(bits);
    return bits;
}

}  // namespace

std::string_view to_string(Family family) {
    switch (family) {
        case Family::gaussian: return "gaussian";
        case Family::rademacher: return "rademacher";
        case Family::subspace: return "subspace";
        case Family::explicit_matrix: return "explicit";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "rademacher") return Family::rademacher;
    if (name == "subspace") return Family::subspace;
    if (name == "explicit") return Family::explicit_matrix;
    throw std::invalid_argument("unknown projection family: " + std::string(name));
}

ProjectionMap::ProjectionMap(Family family, std::size_t source_dim, std::size_t target_dim,
                             std::uint64_t seed, std::vector<double> entries)
    : family_(family), source_dim_(source_dim), target_dim_(target_dim), seed_(seed),
      entries_(std::move(entries)) {
    check_dims(source_dim_, target_dim_);
    if (entries_.size() != source_dim_ * target_dim_)
        throw std::invalid_argument("projection entries must have d*m values");
    for (double v : entries_)
        if (!std::isfinite(v)) throw std::invalid_argument("projection entries must be finite");
}

ProjectionMap ProjectionMap::from_entries(std::size_t source_dim, std::size_t target_dim,
                                          std::vector<double> entries) {
    return ProjectionMap(Family::explicit_matrix, source_dim, target_dim, 0, std::move(entries));
}

Vector ProjectionMap::apply(std::span<const double> x) const {
    if (x.size() != source_dim_)
        throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                    " does not match map source dimension " + std::to_string(source_dim_));
    Vector out(target_dim_, 0.0);
    for (std::size_t r = 0; r < target_dim_; ++r) {
        const double* row = entries_.data() + r * source_dim_;
        double sum = 0.0;
        for (std::size_t c = 0; c < source_dim_; ++c) sum += row[c] * x[c];
        out[r] = sum;
    }
    return out;
}

std::vector<Vector> ProjectionMap::apply_all(std::span<const Vector> points) const {
    std::vector<Vector> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(apply(p));
    return out;
}

ProjectionMap sample_gaussian(std::size_t m, std::size_t d, std::uint64_t seed) {
    check_dims(m, d);
    auto entries = gaussian_entries(Family::gaussian, m, d, seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (double& v : entries) v *= scale;
    return ProjectionMap(Family::gaussian, m, d, seed, std::move(entries));
}

ProjectionMap sample_rademacher(std::size_t m, std::size_t d, std::uint64_t seed) {
    check_dims(m, d);
    const std::uint64_t key = entry_key(Family::rademacher, m, d, seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<double> entries(m * d);
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] = counter_sign(key, i) * scale;
    return ProjectionMap(Family::rademacher, m, d, seed, std::move(entries));
}

ProjectionMap sample_subspace(std::size_t m, std::size_t d, std::uint64_t seed) {
    check_dims(m, d);
    if (d > m) throw std::invalid_argument("subspace projection requires d <= m");
    const auto raw = gaussian_entries(Family::subspace, m, d, seed);

    // Columns of the m x d matrix G^T span a uniformly random d-dimensional subspace.
    Eigen::MatrixXd gt(m, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < m; ++c) gt(c, r) = raw[r * m + c];
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gt);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, d);
    // Fix the column signs against R's diagonal so Q is the Gram-Schmidt basis.
    const Eigen::MatrixXd& packed = qr.matrixQR();
    const double scale = std::sqrt(static_cast<double>(m) / static_cast<double>(d));
    std::vector<double> entries(m * d);
    for (std::size_t r = 0; r < d; ++r) {
        const double sign = packed(r, r) < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < m; ++c) entries[r * m + c] = sign * scale * q(c, r);
    }
    return ProjectionMap(Family::subspace, m, d, seed, std::move(entries));
}

ProjectionMap sample_map(Family family, std::size_t m, std::size_t d, std::uint64_t seed) {
    switch (family) {
        case Family::gaussian: return sample_gaussian(m, d, seed);
        case Family::rademacher: return sample_rademacher(m, d, seed);
        case Family::subspace: return sample_subspace(m, d, seed);
        case Family::explicit_matrix: break;
    }
    throw std::invalid_argument("explicit maps cannot be sampled from a seed");
}

Vector basis_image(Family family, std::size_t m, std::size_t d, std::uint64_t seed, std::size_t j) {
    check_dims(m, d);
    if (j >= m) throw std::invalid_argument("basis index out of range");
    Vector column(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    switch (family) {
        case Family::gaussian: {
            const std::uint64_t key = entry_key(family, m, d, seed);
            for (std::size_t r = 0; r < d; ++r) column[r] = counter_normal(key, r * m + j) * scale;
            return column;
        }
        case Family::rademacher: {
            const std::uint64_t key = entry_key(family, m, d, seed);
            for (std::size_t r = 0; r < d; ++r) column[r] = counter_sign(key, r * m + j) * scale;
            return column;
        }
        case Family::subspace: {
            const auto map = sample_subspace(m, d, seed);
            for (std::size_t r = 0; r < d; ++r) column[r] = map.entry(r, j);
            return column;
        }
        case Family::explicit_matrix: break;
    }
    throw std::invalid_argument("explicit maps cannot be sampled from a seed");
}

bool within_band(double ratio, double eps) noexcept {
    return ratio * (1.0 + eps) >= 1.0 && ratio <= 1.0 + eps;
}

double distortion_ratio(std::span<const double> x, std::span<const double> y,
                        std::span<const double> image_x, std::span<const double> image_y) {
    const double original = distance(x, y);
    if (original == 0.0) return 1.0;
    return distance(image_x, image_y) / original;
}

DistortionVerdict classify_images(std::span<const double> x, std::span<const double> y,
                                  std::span<const double> image_x, std::span<const double> image_y,
                                  double eps, std::size_t first, std::size_t second) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    DistortionVerdict verdict;
    verdict.first = first;
    verdict.second = second;
    verdict.ratio = distortion_ratio(x, y, image_x, image_y);
    verdict.preserved = within_band(verdict.ratio, eps);
    return verdict;
}

DistortionVerdict classify_pair(const ProjectionMap& map, std::span<const double> x,
                                std::span<const double> y, double eps,
                                std::size_t first, std::size_t second) {
    const Vector image_x = map.apply(x);
    const Vector image_y = map.apply(y);
    return classify_images(x, y, image_x, image_y, eps, first, second);
}

std::string to_json(const ProjectionMap& map) {
    nlohmann::json j;
    j["family"] = std::string(to_string(map.family()));
    j["m"] = map.source_dim();
    j["d"] = map.target_dim();
    j["seed"] = map.seed();
    if (map.family() == Family::explicit_matrix)
        j["entries"] = std::vector<double>(map.entries().begin(), map.entries().end());
    return j.dump();
}

ProjectionMap projection_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    const Family family = parse_family(j.at("family").get<std::string>());
    const auto m = j.at("m").get<std::size_t>();
    const auto d = j.at("d").get<std::size_t>();
    if (family == Family::explicit_matrix)
        return ProjectionMap::from_entries(m, d, j.at("entries").get<std::vector<double>>());
    return sample_map(family, m, d, j.at("seed").get<std::uint64_t>());
}

void write_binary(const ProjectionMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (double v : map.entries()) {
        const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

ProjectionMap read_binary(const std::filesystem::path& path, std::size_t m, std::size_t d) {
    check_dims(m, d);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<double> entries(m * d);
    for (double& v : entries) {
        std::uint64_t bits = 0;
        if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
            throw std::runtime_error("binary map is shorter than d*m entries");
        v = std::bit_cast<double>(to_little_endian(bits));
    }
    return ProjectionMap::from_entries(m, d, std::move(entries));
}

}  // namespace dimred
