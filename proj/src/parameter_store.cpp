#include "narx/parameter_store.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "narx/errors.hpp"

namespace narx {

ParamId ParameterStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
    if (name.empty() || rows == 0 || cols == 0) {
        throw ArgumentError("ParameterStore::add: invalid entry '" + name + "'");
    }
    if (name.find_first_of("[]\t \n#") != std::string::npos) {
        throw ArgumentError("ParameterStore::add: illegal character in name '" + name + "'");
    }
    if (contains(name)) throw ArgumentError("ParameterStore::add: duplicate name '" + name + "'");
    const ParamId id = entries_.size();
    entries_.push_back(ParamEntry{name, rows, cols, std::vector<double>(rows * cols, 0.0),
                                  std::vector<double>(rows * cols, 0.0)});
    index_.emplace(name, id);
    return id;
}

ParamId ParameterStore::id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ArgumentError("unknown parameter '" + name + "'");
    return it->second;
}

ParamId ParameterStore::require(const std::string& name, std::size_t rows,
                                std::size_t cols) const {
    const ParamId found = id(name);
    const auto& e = entries_[found];
    if (e.rows != rows || e.cols != cols) {
        throw ShapeError("parameter '" + name + "' is " + std::to_string(e.rows) + "x" +
                         std::to_string(e.cols) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    return found;
}

std::size_t ParameterStore::scalar_count() const noexcept {
    std::size_t total = 0;
    for (const auto& e : entries_) total += e.size();
    return total;
}

std::vector<std::string> ParameterStore::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
}

void ParameterStore::zero_grad() {
    for (auto& e : entries_) std::fill(e.grad.begin(), e.grad.end(), 0.0);
}

bool ParameterStore::same_values(const ParameterStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& a = entries_[i];
        const auto& b = other.entries_[i];
        if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
        if (!std::equal(a.value.begin(), a.value.end(), b.value.begin(),
                        [](double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; })) {
            return false;
        }
    }
    return true;
}

void ParameterStore::save(std::ostream& out) const {
    for (const auto& e : entries_) out << "# " << e.name << ' ' << e.rows << ' ' << e.cols << '\n';
    char buf[40];
    for (const auto& e : entries_) {
        for (std::size_t i = 0; i < e.value.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", e.value[i]);
            out << e.name << '[' << i << "]\t" << buf << '\n';
        }
    }
}

namespace {

std::size_t parse_size(std::string_view text, std::size_t line_no) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("parameter file line " + std::to_string(line_no) + ": bad integer '" +
                         std::string(text) + "'");
    }
    return v;
}

}  // namespace

ParameterStore ParameterStore::load(std::istream& in) {
    ParameterStore store;
    std::vector<std::vector<bool>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream header(line.substr(1));
            std::string name, rows, cols, extra;
            if (!(header >> name >> rows >> cols) || (header >> extra)) {
                throw ParseError("parameter file line " + std::to_string(line_no) +
                                 ": malformed header");
            }
            if (store.contains(name)) {
                throw ParseError("parameter file line " + std::to_string(line_no) +
                                 ": duplicate entry '" + name + "'");
            }
            store.add(name, parse_size(rows, line_no), parse_size(cols, line_no));
            seen.emplace_back(store.entries_.back().size(), false);
            continue;
        }
        const auto open = line.find('[');
        const auto close = line.find("]\t");
        if (open == std::string::npos || close == std::string::npos || close < open) {
            throw ParseError("parameter file line " + std::to_string(line_no) +
                             ": expected name[index]<TAB>value");
        }
        const std::string name = line.substr(0, open);
        if (!store.contains(name)) {
            throw ParseError("parameter file line " + std::to_string(line_no) +
                             ": undeclared parameter '" + name + "'");
        }
        const ParamId id = store.id(name);
        const std::size_t index =
            parse_size(std::string_view(line).substr(open + 1, close - open - 1), line_no);
        if (index >= store.entries_[id].size()) {
            throw ParseError("parameter file line " + std::to_string(line_no) +
                             ": index out of range for '" + name + "'");
        }
        const std::string_view text = std::string_view(line).substr(close + 2);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ParseError("parameter file line " + std::to_string(line_no) + ": bad value '" +
                             std::string(text) + "'");
        }
        if (seen[id][index]) {
            throw ParseError("parameter file line " + std::to_string(line_no) + ": duplicate " +
                             name + "[" + std::to_string(index) + "]");
        }
        seen[id][index] = true;
        store.entries_[id].value[index] = value;
    }
    for (std::size_t id = 0; id < seen.size(); ++id) {
        if (std::find(seen[id].begin(), seen[id].end(), false) != seen[id].end()) {
            throw ParseError("parameter file: missing values for '" + store.entries_[id].name + "'");
        }
    }
    return store;
}

void ParameterStore::save_file(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path.string());
    save(out);
    if (!out) throw FileError("write failed: " + path.string());
}

ParameterStore ParameterStore::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path.string());
    return load(in);
}

}  // namespace narx
