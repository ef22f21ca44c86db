#pragma once

#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace calbench {

/// A single named, bounded parameter.
struct ParamEntry {
    std::string name;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Ordered vector of named, bounded parameters. The order is fixed and defines
/// the coordinate system used by objectives, optimizers and MH proposals.
class ParamVector {
public:
    ParamVector() = default;
    ParamVector(std::initializer_list<ParamEntry> entries);

    /// Appends an entry; throws std::invalid_argument on a bound violation or
    /// duplicate name.
    void add(const std::string& name, double value, double lower, double upper);

    bool has(const std::string& name) const;
    double get(const std::string& name) const;
    void set(const std::string& name, double value);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const ParamEntry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<ParamEntry>& entries() const { return entries_; }

    std::vector<double> values() const;
    std::vector<std::string> names() const;

    /// Copy with the same names/bounds but new values (size must match).
    ParamVector with_values(std::span<const double> vals) const;

    /// Subvector restricted to the given names, keeping this vector's order
    /// for each name as listed. Missing names throw.
    ParamVector subset(const std::vector<std::string>& names) const;

    /// Copy where the named entries take values from `free` (a vector produced
    /// by subset() with the same name order).
    ParamVector merged(const ParamVector& free) const;

    /// True when names, order and bounds all match.
    bool same_layout(const ParamVector& other) const;

private:
    std::size_t index_of(const std::string& name) const;
    std::vector<ParamEntry> entries_;
};

/// Euclidean distance between two conformal parameter vectors.
/// Throws on a name/order mismatch.
double param_distance(const ParamVector& a, const ParamVector& b);

}  // namespace calbench
