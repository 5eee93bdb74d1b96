#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace narx {

using ParamId = std::size_t;

/// One named learnable tensor. Vectors are stored as len x 1.
struct ParamEntry {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> value;
    std::vector<double> grad;

    std::size_t size() const noexcept { return value.size(); }
};

/// All learnable weights of one model, addressable by name or by id, with a
/// gradient slot of the same shape for every entry.
///
/// Text format: a header block of `# name rows cols` lines, then one line per
/// scalar, `name[index]<TAB>value`, printed with 17 significant digits.
class ParameterStore {
public:
    ParamId add(const std::string& name, std::size_t rows, std::size_t cols);
    ParamId add_vector(const std::string& name, std::size_t len) { return add(name, len, 1); }

    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    ParamId id(const std::string& name) const;
    /// id(name), additionally checking the entry's shape.
    ParamId require(const std::string& name, std::size_t rows, std::size_t cols) const;

    const ParamEntry& entry(ParamId id) const { return entries_.at(id); }
    ParamEntry& entry(ParamId id) { return entries_.at(id); }

    std::span<const double> value(ParamId id) const { return entries_[id].value; }
    std::span<double> value(ParamId id) { return entries_[id].value; }
    std::span<const double> grad(ParamId id) const { return entries_[id].grad; }
    std::span<double> grad(ParamId id) { return entries_[id].grad; }

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t scalar_count() const noexcept;
    std::vector<std::string> names() const;

    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }
    auto begin() noexcept { return entries_.begin(); }
    auto end() noexcept { return entries_.end(); }

    void zero_grad();

    /// True when names, shapes and values all match bit for bit.
    bool same_values(const ParameterStore& other) const;

    void save(std::ostream& out) const;
    static ParameterStore load(std::istream& in);
    void save_file(const std::filesystem::path& path) const;
    static ParameterStore load_file(const std::filesystem::path& path);

private:
    std::vector<ParamEntry> entries_;
    std::map<std::string, ParamId> index_;
};

}  // namespace narx
