#include "dimred/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dimred {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::invalid_argument("line " + std::to_string(line) + ": not a number: '" + std::string(field) + "'");
    return value;
}

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

Dataset dataset_from_csv(std::string_view text) {
    std::vector<Vector> points;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        Vector row;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            row.push_back(parse_double(rest.substr(0, comma), line_no));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        points.push_back(std::move(row));
    }
    auto data = Dataset::from_points(std::move(points));
    data.validate();
    return data;
}

std::string dataset_to_csv(const Dataset& data) {
    std::string out;
    for (const auto& x : data.points) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j) out += ',';
            out += format_double(x[j]);
        }
        out += '\n';
    }
    return out;
}

Dataset dataset_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    Dataset data;
    data.points = j.at("points").get<std::vector<Vector>>();
    data.dim = j.contains("dim") ? j.at("dim").get<std::size_t>() : (data.points.empty() ? 0 : data.points[0].size());
    if (j.contains("ids")) data.ids = j.at("ids").get<std::vector<std::string>>();
    if (j.contains("labels")) data.labels = j.at("labels").get<std::vector<std::size_t>>();
    data.validate();
    return data;
}

std::string to_json(const Dataset& data) {
    nlohmann::json j;
    j["dim"] = data.dim;
    j["points"] = data.points;
    if (!data.ids.empty()) j["ids"] = data.ids;
    if (!data.labels.empty()) j["labels"] = data.labels;
    return j.dump();
}

Dataset load_dataset(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    return path.extension() == ".json" ? dataset_from_json(text) : dataset_from_csv(text);
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    write_text_file(path, path.extension() == ".json" ? to_json(data) : dataset_to_csv(data));
}

Clustering clustering_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    Clustering c;
    if (j.is_array()) {
        c.assignment = j.get<std::vector<std::size_t>>();
        c.k = 1;
        for (auto a : c.assignment) c.k = std::max(c.k, a + 1);
    } else {
        c.assignment = j.at("assignment").get<std::vector<std::size_t>>();
        c.k = j.at("k").get<std::size_t>();
    }
    c.validate(c.assignment.size());
    return c;
}

std::string to_json(const Clustering& clustering) {
    nlohmann::json j;
    j["k"] = clustering.k;
    j["assignment"] = clustering.assignment;
    return j.dump();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace dimred
